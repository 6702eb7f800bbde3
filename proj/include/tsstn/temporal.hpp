#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tsstn/core.hpp"
#include "tsstn/nnkit.hpp"

namespace tsstn {

// Half-minute bins following the frame cadence; the terminal bin pools all
// frames at or past 20 minutes.
inline constexpr int kNumTimeBins = 41;

inline int time_bin(double t_min) {
    if (t_min < 0.0 || !std::isfinite(t_min)) {
        throw std::invalid_argument("time_bin: t_min must be non-negative");
    }
    int bin = static_cast<int>(std::floor(t_min / 0.5));
    return std::min(bin, kNumTimeBins - 1);
}

inline double bin_t_center(int bin) { return 0.5 * bin + 0.25; }

using ImportanceWeights = std::array<double, kNumGroups>;

// One theta row per time bin; softmax per row yields the importance weights,
// so normalization (sum 1, non-negative) is structural.
struct TemporalWeights {
    nn::Mat theta;  // kNumTimeBins x kNumGroups, zero-initialized: uniform weights

    TemporalWeights() : theta(kNumTimeBins, kNumGroups) {}

    ImportanceWeights weights_for_bin(int bin) const {
        nn::Tensor1 row(theta.row(bin), theta.row(bin) + kNumGroups);
        nn::Tensor1 w = nn::softmax(row);
        ImportanceWeights out;
        for (int i = 0; i < kNumGroups; ++i) out[i] = w[i];
        return out;
    }

    ImportanceWeights weights_at(double t_min) const { return weights_for_bin(time_bin(t_min)); }

    // Accumulates dL/dtheta for the bin given dL/dw at w = softmax(theta[bin]).
    void backward(int bin, const ImportanceWeights& w, const ImportanceWeights& dw,
                  TemporalWeights& grad) const {
        double dot = 0.0;
        for (int i = 0; i < kNumGroups; ++i) dot += dw[i] * w[i];
        double* g = grad.theta.row(bin);
        for (int i = 0; i < kNumGroups; ++i) g[i] += w[i] * (dw[i] - dot);
    }

    template <typename F>
    void for_each_param(const std::string& prefix, F&& fn) {
        fn(prefix + ".theta", theta.a, std::vector<std::size_t>{theta.rows, theta.cols});
    }
};

}  // namespace tsstn
