#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsstn/rng.hpp"

namespace tsstn::nn {

using Tensor1 = std::vector<double>;

inline void check_finite(const Tensor1& v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) throw std::runtime_error(std::string(what) + ": non-finite value");
    }
}

struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    Tensor1 a;  // row-major

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
    const double* row(std::size_t i) const { return a.data() + i * cols; }
    double* row(std::size_t i) { return a.data() + i * cols; }
};

// Parameter blocks carry no gradient state; a gradient buffer is simply a
// zeroed second instance of the same struct. That keeps per-thread gradient
// accumulation trivial.
struct DenseParam {
    Mat w;      // out x in
    Tensor1 b;  // out

    DenseParam() = default;
    DenseParam(std::size_t out, std::size_t in) : w(out, in), b(out, 0.0) {}
    std::size_t in_dim() const { return w.cols; }
    std::size_t out_dim() const { return w.rows; }

    template <typename F>
    void for_each_param(const std::string& prefix, F&& fn) {
        fn(prefix + ".w", w.a, std::vector<std::size_t>{w.rows, w.cols});
        fn(prefix + ".b", b, std::vector<std::size_t>{b.size()});
    }
};

struct EmbeddingParam {
    Mat table;  // vocab x dim; row 0 is the out-of-vocabulary slot

    EmbeddingParam() = default;
    EmbeddingParam(std::size_t vocab, std::size_t dim) : table(vocab, dim) {}
    std::size_t vocab() const { return table.rows; }
    std::size_t dim() const { return table.cols; }

    template <typename F>
    void for_each_param(const std::string& prefix, F&& fn) {
        fn(prefix, table.a, std::vector<std::size_t>{table.rows, table.cols});
    }
};

inline Tensor1 dense_forward(const DenseParam& p, const Tensor1& x) {
    if (x.size() != p.in_dim()) {
        throw std::invalid_argument("dense_forward: input size " + std::to_string(x.size()) +
                                    " != in dim " + std::to_string(p.in_dim()));
    }
    Tensor1 y(p.out_dim());
    for (std::size_t i = 0; i < p.out_dim(); ++i) {
        const double* wr = p.w.row(i);
        double acc = p.b[i];
        for (std::size_t j = 0; j < x.size(); ++j) acc += wr[j] * x[j];
        y[i] = acc;
    }
    check_finite(y, "dense_forward");
    return y;
}

// Accumulates dW, db into grad; writes dL/dx into dx when non-null.
inline void dense_backward(const DenseParam& p, const Tensor1& x, const Tensor1& dy,
                           DenseParam& grad, Tensor1* dx) {
    if (dy.size() != p.out_dim() || x.size() != p.in_dim()) {
        throw std::invalid_argument("dense_backward: shape mismatch");
    }
    for (std::size_t i = 0; i < p.out_dim(); ++i) {
        double g = dy[i];
        grad.b[i] += g;
        double* gw = grad.w.row(i);
        for (std::size_t j = 0; j < x.size(); ++j) gw[j] += g * x[j];
    }
    if (dx) {
        dx->assign(p.in_dim(), 0.0);
        for (std::size_t i = 0; i < p.out_dim(); ++i) {
            double g = dy[i];
            const double* wr = p.w.row(i);
            for (std::size_t j = 0; j < dx->size(); ++j) (*dx)[j] += g * wr[j];
        }
    }
}

inline constexpr double kLeakySlope = 0.01;

inline double leaky_relu(double x) { return x >= 0.0 ? x : kLeakySlope * x; }

inline Tensor1 leaky_relu(const Tensor1& x) {
    Tensor1 y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = leaky_relu(x[i]);
    return y;
}

// pre is the pre-activation input from the forward pass
inline Tensor1 leaky_relu_backward(const Tensor1& pre, const Tensor1& dy) {
    Tensor1 dx(pre.size());
    for (std::size_t i = 0; i < pre.size(); ++i) dx[i] = pre[i] >= 0.0 ? dy[i] : kLeakySlope * dy[i];
    return dx;
}

inline double tanh_act(double x) { return std::tanh(x); }

inline double tanh_backward(double y, double dy) { return dy * (1.0 - y * y); }

struct DropoutMask {
    std::vector<std::uint8_t> keep;
    double scale = 1.0;
    bool active = false;
};

// Inverted dropout: survivors scaled at train time, eval is identity.
inline Tensor1 dropout(const Tensor1& x, double rate, bool training, Rng& rng,
                       DropoutMask* mask = nullptr) {
    if (!(rate >= 0.0 && rate < 1.0)) throw std::invalid_argument("dropout: rate must be in [0, 1)");
    if (!training || rate == 0.0) {
        if (mask) mask->active = false;
        return x;
    }
    Tensor1 y(x.size());
    double scale = 1.0 / (1.0 - rate);
    if (mask) {
        mask->keep.assign(x.size(), 1);
        mask->scale = scale;
        mask->active = true;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        bool keep = rng.uniform01() >= rate;
        y[i] = keep ? x[i] * scale : 0.0;
        if (mask && !keep) mask->keep[i] = 0;
    }
    return y;
}

inline Tensor1 dropout_backward(const DropoutMask& mask, const Tensor1& dy) {
    if (!mask.active) return dy;
    Tensor1 dx(dy.size());
    for (std::size_t i = 0; i < dy.size(); ++i) dx[i] = mask.keep[i] ? dy[i] * mask.scale : 0.0;
    return dx;
}

// Max-subtracted softmax; output sums to 1 and is non-negative.
inline Tensor1 softmax(const Tensor1& theta) {
    Tensor1 w(theta.size());
    double mx = *std::max_element(theta.begin(), theta.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        w[i] = std::exp(theta[i] - mx);
        sum += w[i];
    }
    for (double& v : w) v /= sum;
    return w;
}

// dL/dtheta from dL/dw at y = softmax(theta)
inline Tensor1 softmax_backward(const Tensor1& y, const Tensor1& dy) {
    double dot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) dot += dy[i] * y[i];
    Tensor1 dtheta(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) dtheta[i] = y[i] * (dy[i] - dot);
    return dtheta;
}

inline constexpr double kProbClamp = 1e-6;

struct BceResult {
    double loss = 0.0;
    double dloss_dp = 0.0;
};

// Binary cross-entropy of p = P(blue wins) against label y in {0, 1}.
// p is clamped away from {0, 1} before the logs.
inline BceResult bce_loss(double p, int y) {
    double pc = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
    BceResult r;
    r.loss = -(y * std::log(pc) + (1 - y) * std::log(1.0 - pc));
    r.dloss_dp = -y / pc + (1 - y) / (1.0 - pc);
    return r;
}

// Glorot-style uniform init for dense weights; biases stay zero.
inline void glorot_init(Mat& w, Rng& rng) {
    double bound = std::sqrt(6.0 / static_cast<double>(w.rows + w.cols));
    for (double& v : w.a) v = rng.uniform(-bound, bound);
}

inline void embedding_init(Mat& table, Rng& rng) {
    for (double& v : table.a) v = rng.uniform(-0.05, 0.05);
}

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Bias-corrected Adam over a flat list of (param, grad) array pairs bound
// once before training. Deterministic: no internal randomness.
class Adam {
public:
    explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

    void bind(Tensor1& params, const Tensor1& grads) {
        if (params.size() != grads.size()) throw std::invalid_argument("Adam::bind: shape mismatch");
        slots_.push_back(Slot{&params, &grads, Tensor1(params.size(), 0.0), Tensor1(params.size(), 0.0)});
    }

    void step() {
        ++t_;
        double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
        double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
        for (Slot& s : slots_) {
            for (std::size_t i = 0; i < s.p->size(); ++i) {
                double g = (*s.g)[i];
                s.m[i] = cfg_.beta1 * s.m[i] + (1.0 - cfg_.beta1) * g;
                s.v[i] = cfg_.beta2 * s.v[i] + (1.0 - cfg_.beta2) * g * g;
                double mhat = s.m[i] / bc1;
                double vhat = s.v[i] / bc2;
                (*s.p)[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
            }
        }
    }

    long long step_count() const { return t_; }

private:
    struct Slot {
        Tensor1* p;
        const Tensor1* g;
        Tensor1 m;
        Tensor1 v;
    };
    std::vector<Slot> slots_;
    AdamConfig cfg_;
    long long t_ = 0;
};

// ---------------------------------------------------------------------------
// Small MLP: N hidden layers, each dense -> leaky ReLU -> dropout, then a
// scalar head squashed by tanh.

struct MlpParam {
    std::vector<DenseParam> hidden;
    DenseParam head;  // out dim 1

    MlpParam() = default;
    MlpParam(std::size_t in_dim, const std::vector<std::size_t>& hidden_dims) {
        std::size_t d = in_dim;
        for (std::size_t h : hidden_dims) {
            hidden.emplace_back(h, d);
            d = h;
        }
        head = DenseParam(1, d);
    }

    std::size_t in_dim() const { return hidden.empty() ? head.in_dim() : hidden.front().in_dim(); }

    void init(Rng& rng) {
        for (auto& layer : hidden) glorot_init(layer.w, rng);
        glorot_init(head.w, rng);
    }

    template <typename F>
    void for_each_param(const std::string& prefix, F&& fn) {
        for (std::size_t i = 0; i < hidden.size(); ++i) {
            hidden[i].for_each_param(prefix + ".h" + std::to_string(i), fn);
        }
        head.for_each_param(prefix + ".head", fn);
    }
};

struct MlpCache {
    Tensor1 input;
    std::vector<Tensor1> pre;   // pre-activation per hidden layer
    std::vector<Tensor1> act;   // post relu+dropout per hidden layer
    std::vector<DropoutMask> masks;
    double head_pre = 0.0;
    double s = 0.0;  // tanh output
    bool valid = false;
};

inline double mlp_forward(const MlpParam& p, const Tensor1& x, double dropout_rate, bool training,
                          Rng& rng, MlpCache* cache) {
    if (cache) {
        cache->input = x;
        cache->pre.clear();
        cache->act.clear();
        cache->masks.assign(p.hidden.size(), DropoutMask{});
    }
    Tensor1 cur = x;
    for (std::size_t i = 0; i < p.hidden.size(); ++i) {
        Tensor1 pre = dense_forward(p.hidden[i], cur);
        Tensor1 act = leaky_relu(pre);
        act = dropout(act, dropout_rate, training, rng, cache ? &cache->masks[i] : nullptr);
        if (cache) {
            cache->pre.push_back(std::move(pre));
            cache->act.push_back(act);
        }
        cur = std::move(act);
    }
    Tensor1 z = dense_forward(p.head, cur);
    double s = tanh_act(z[0]);
    if (cache) {
        cache->head_pre = z[0];
        cache->s = s;
        cache->valid = true;
    }
    return s;
}

// ds is dL/ds at the tanh output; returns dL/dx for upstream (embedding) layers.
inline Tensor1 mlp_backward(const MlpParam& p, const MlpCache& cache, double ds, MlpParam& grad) {
    if (!cache.valid) throw std::logic_error("mlp_backward called without a recorded forward pass");
    double dz = tanh_backward(cache.s, ds);
    const Tensor1& head_in = p.hidden.empty() ? cache.input : cache.act.back();
    Tensor1 dcur;
    dense_backward(p.head, head_in, Tensor1{dz}, grad.head, &dcur);
    for (std::size_t i = p.hidden.size(); i-- > 0;) {
        Tensor1 dact = dropout_backward(cache.masks[i], dcur);
        Tensor1 dpre = leaky_relu_backward(cache.pre[i], dact);
        const Tensor1& layer_in = i == 0 ? cache.input : cache.act[i - 1];
        dense_backward(p.hidden[i], layer_in, dpre, grad.hidden[i], &dcur);
    }
    return dcur;
}

}  // namespace tsstn::nn
