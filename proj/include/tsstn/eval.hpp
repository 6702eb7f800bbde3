#pragma once

#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tsstn/core.hpp"
#include "tsstn/model.hpp"
#include "tsstn/temporal.hpp"

namespace tsstn {

// Evaluation-by-time grid. Points below 20 minutes at the given spacing plus
// a terminal 20.0 point whose bin pools every frame at or past 20 minutes.
inline std::vector<double> make_time_grid(double spacing_min = 2.5) {
    if (!(spacing_min >= 0.5)) throw DataError("time grid spacing must be at least 0.5 minutes");
    std::vector<double> grid;
    for (double t = 0.0; t < 20.0 - 1e-9; t += spacing_min) grid.push_back(t);
    grid.push_back(20.0);
    return grid;
}

using PredictBlueFn = std::function<bool(const Frame&)>;

struct ModelCurve {
    std::string name;
    std::vector<double> accuracy;  // one entry per grid point; 0/0 counts as 0
};

struct EvalReport {
    std::vector<double> grid;
    std::vector<std::size_t> counts;  // frames per grid point
    std::vector<ModelCurve> models;
};

// A frame counts toward grid point g when its time bin equals g's bin, so a
// frame lands on at most one grid point; the terminal point absorbs 20 min+.
// Only matches still alive at t produce frames at t, so survivorship is
// inherent in the counts.
inline EvalReport evaluate(const std::vector<std::pair<std::string, PredictBlueFn>>& models,
                           const std::vector<Frame>& frames,
                           const std::vector<double>& grid = make_time_grid()) {
    if (frames.empty()) throw DataError("evaluate: empty test set");
    if (models.empty()) throw DataError("evaluate: no models given");

    std::map<int, std::size_t> bin_to_point;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!bin_to_point.emplace(time_bin(grid[i]), i).second) {
            throw DataError("evaluate: grid points collide in the same time bin");
        }
    }

    EvalReport report;
    report.grid = grid;
    report.counts.assign(grid.size(), 0);
    std::vector<std::vector<std::size_t>> correct(models.size(),
                                                  std::vector<std::size_t>(grid.size(), 0));

    for (const Frame& f : frames) {
        auto it = bin_to_point.find(time_bin(f.t_min));
        if (it == bin_to_point.end()) continue;
        std::size_t pt = it->second;
        ++report.counts[pt];
        for (std::size_t m = 0; m < models.size(); ++m) {
            if (models[m].second(f) == f.blue_wins) ++correct[m][pt];
        }
    }

    for (std::size_t m = 0; m < models.size(); ++m) {
        ModelCurve curve;
        curve.name = models[m].first;
        curve.accuracy.resize(grid.size(), 0.0);
        for (std::size_t pt = 0; pt < grid.size(); ++pt) {
            if (report.counts[pt] > 0) {
                curve.accuracy[pt] =
                    static_cast<double>(correct[m][pt]) / static_cast<double>(report.counts[pt]);
            }
        }
        report.models.push_back(std::move(curve));
    }
    return report;
}

// Each spatial model as a standalone predictor: blue iff its win-score is
// positive, seeded coin on an exact zero.
inline std::vector<std::pair<std::string, PredictBlueFn>> spatial_predictors(const TsstnModel& model) {
    std::vector<std::pair<std::string, PredictBlueFn>> out;
    for (int i = 0; i < kNumGroups; ++i) {
        out.emplace_back(kGroupNames[i], [&model, i](const Frame& f) {
            GroupedFeatures g = group_features(f);
            double s = model.win_scores(g)[i];
            if (s > 0.0) return true;
            if (s < 0.0) return false;
            return seeded_tie_coin(model.tie_seed ^ static_cast<std::uint64_t>(i), g);
        });
    }
    return out;
}

// Per-bin importance weights, optionally joined with per-bin accuracy of each
// spatial model measured on the given frames. Tab-separated.
inline std::string weight_accuracy_table(const TsstnModel& model,
                                         const std::vector<Frame>* frames = nullptr) {
    std::string out = "bin\tt_center";
    for (int i = 0; i < kNumGroups; ++i) out += std::string("\tw_") + kGroupNames[i];
    if (frames) {
        for (int i = 0; i < kNumGroups; ++i) out += std::string("\tacc_") + kGroupNames[i];
        out += "\tframes";
    }
    out += "\n";

    std::array<std::array<std::size_t, kNumTimeBins>, kNumGroups> correct{};
    std::array<std::size_t, kNumTimeBins> counts{};
    if (frames) {
        for (const Frame& f : *frames) {
            int bin = time_bin(f.t_min);
            ++counts[bin];
            GroupedFeatures g = group_features(f);
            WinScoreVector s = model.win_scores(g);
            for (int i = 0; i < kNumGroups; ++i) {
                bool blue = s[i] > 0.0 ||
                            (s[i] == 0.0 && seeded_tie_coin(model.tie_seed ^ static_cast<std::uint64_t>(i), g));
                if (blue == f.blue_wins) ++correct[i][bin];
            }
        }
    }

    char buf[64];
    for (int bin = 0; bin < kNumTimeBins; ++bin) {
        ImportanceWeights w = model.temporal.weights_for_bin(bin);
        std::snprintf(buf, sizeof(buf), "%d\t%.2f", bin, bin_t_center(bin));
        out += buf;
        for (int i = 0; i < kNumGroups; ++i) {
            std::snprintf(buf, sizeof(buf), "\t%.6f", w[i]);
            out += buf;
        }
        if (frames) {
            for (int i = 0; i < kNumGroups; ++i) {
                double acc = counts[bin] ? static_cast<double>(correct[i][bin]) /
                                               static_cast<double>(counts[bin])
                                         : 0.0;
                std::snprintf(buf, sizeof(buf), "\t%.4f", acc);
                out += buf;
            }
            std::snprintf(buf, sizeof(buf), "\t%zu", counts[bin]);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

inline std::string eval_report_tsv(const EvalReport& r) {
    std::string out = "t_min\tframes";
    for (const ModelCurve& m : r.models) out += "\t" + m.name;
    out += "\n";
    char buf[64];
    for (std::size_t pt = 0; pt < r.grid.size(); ++pt) {
        bool last = pt + 1 == r.grid.size();
        std::snprintf(buf, sizeof(buf), last ? "%.1f+\t%zu" : "%.1f\t%zu", r.grid[pt], r.counts[pt]);
        out += buf;
        for (const ModelCurve& m : r.models) {
            std::snprintf(buf, sizeof(buf), "\t%.4f", m.accuracy[pt]);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

inline std::string eval_report_human(const EvalReport& r) {
    std::string out;
    char buf[128];
    for (const ModelCurve& m : r.models) {
        out += m.name + ":\n";
        for (std::size_t pt = 0; pt < r.grid.size(); ++pt) {
            bool last = pt + 1 == r.grid.size();
            std::snprintf(buf, sizeof(buf), "  %5.1f%s min  acc %6.2f%%  (%zu frames)\n", r.grid[pt],
                          last ? "+" : " ", m.accuracy[pt] * 100.0, r.counts[pt]);
            out += buf;
        }
    }
    return out;
}

}  // namespace tsstn
