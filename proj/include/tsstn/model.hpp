#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <string>

#include "tsstn/core.hpp"
#include "tsstn/ingest.hpp"
#include "tsstn/spatial.hpp"
#include "tsstn/temporal.hpp"
#include "tsstn/train.hpp"

namespace tsstn {

struct GroupExplanation {
    std::string name;
    double win_score = 0.0;
    double weight = 0.0;
    double contribution = 0.0;
};

// Interpretable prediction: the weighted sum F, its probability mapping, and
// the per-group breakdown. contribution_i = weight_i * win_score_i and the
// six contributions sum to F.
struct Explanation {
    double t_min = 0.0;
    double F = 0.0;
    double p_blue = 0.5;
    std::array<GroupExplanation, kNumGroups> groups;
    std::array<int, kNumGroups> ranking{};  // group indices by |contribution|, descending
};

inline Explanation compose_explanation(const WinScoreVector& s, const ImportanceWeights& w,
                                       double t_min) {
    Explanation e;
    e.t_min = t_min;
    double f = 0.0;
    for (int i = 0; i < kNumGroups; ++i) {
        double c = w[i] * s[i];
        e.groups[i] = GroupExplanation{kGroupNames[i], s[i], w[i], c};
        f += c;
    }
    e.F = f;
    e.p_blue = (f + 1.0) / 2.0;
    for (int i = 0; i < kNumGroups; ++i) e.ranking[i] = i;
    std::stable_sort(e.ranking.begin(), e.ranking.end(), [&](int a, int b) {
        return std::abs(e.groups[a].contribution) > std::abs(e.groups[b].contribution);
    });
    return e;
}

// Deterministic comment template over an explanation. Names the favored team,
// its probability to one decimal, and the top_k groups by |contribution| with
// advantage/disadvantage phrasing relative to the favored team.
inline std::string explain_text(const Explanation& e, int top_k = 2) {
    char buf[64];
    if (e.F == 0.0) {
        return "The game is even: both teams have a win probability of 50.0%.";
    }
    bool blue = e.F > 0.0;
    double p = blue ? e.p_blue : 1.0 - e.p_blue;
    std::snprintf(buf, sizeof(buf), "%.1f", p * 100.0);

    std::string adv, dis;
    int k = std::clamp(top_k, 1, kNumGroups);
    for (int r = 0; r < k; ++r) {
        const GroupExplanation& ge = e.groups[e.ranking[r]];
        bool helps = (ge.contribution > 0.0) == blue;
        std::string& part = helps ? adv : dis;
        if (!part.empty()) part += " and ";
        part += ge.name;
    }

    std::string text = std::string("The win probability of the ") + (blue ? "Blue" : "Red") +
                       " Team is " + buf + "%";
    if (!adv.empty()) text += ", driven by its advantage in " + adv;
    if (!dis.empty()) text += (adv.empty() ? ", despite" : " despite") + std::string(" its disadvantage in ") + dis;
    text += ".";
    return text;
}

// Content hash used for seeded tie-breaking; deterministic for identical inputs.
inline std::uint64_t hash_features(const GroupedFeatures& g) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xffULL;
            h *= 0x100000001b3ULL;
        }
    };
    auto mixd = [&](double d) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(d));
        std::memcpy(&bits, &d, sizeof(bits));
        mix(bits);
    };
    mixd(g.gold_diff);
    mixd(g.kill_diff);
    mixd(g.tower_diff);
    for (int v : g.wild) mix(static_cast<std::uint64_t>(static_cast<std::int64_t>(v)));
    for (double v : g.soldier) mixd(v);
    for (int v : g.heroes) mix(static_cast<std::uint64_t>(static_cast<std::int64_t>(v)));
    mixd(g.t_min);
    return h;
}

inline bool seeded_tie_coin(std::uint64_t seed, const GroupedFeatures& g) {
    std::uint64_t s = seed ^ hash_features(g);
    return (splitmix64(s) & 1ULL) != 0;
}

// The two-stage model: six spatial predictors plus time-binned softmax
// weights, trained jointly.
struct TsstnModel {
    SpatialStage spatial;
    TemporalWeights temporal;
    NormStats stats;
    std::uint64_t tie_seed = 0;

    explicit TsstnModel(const SpatialConfig& cfg = {}) : spatial(cfg) {}

    void init(Rng& rng) { spatial.init(rng); }  // theta stays zero: uniform weights

    struct Grads {
        SpatialStage spatial;
        TemporalWeights temporal;

        template <typename F>
        void for_each_param(const std::string& prefix, F&& fn) {
            spatial.for_each_param(prefix + "spatial", fn);
            temporal.for_each_param(prefix + "temporal", fn);
        }
    };

    Grads make_grads() const {
        Grads g{spatial, temporal};
        zero_params(g);
        return g;
    }

    template <typename F>
    void for_each_param(const std::string& prefix, F&& fn) {
        spatial.for_each_param(prefix + "spatial", fn);
        temporal.for_each_param(prefix + "temporal", fn);
    }

    void bind_adam(nn::Adam& adam, Grads& grads) {
        auto p = param_arrays(*this);
        auto g = param_arrays(grads);
        for (std::size_t i = 0; i < p.size(); ++i) adam.bind(*p[i], *g[i]);
    }

    WinScoreVector win_scores(const GroupedFeatures& g) const {
        Rng rng(0);  // unused in eval mode
        return spatial.forward_all(g, stats, Mode::kEval, rng);
    }

    Explanation predict(const GroupedFeatures& g) const {
        WinScoreVector s = win_scores(g);
        ImportanceWeights w = temporal.weights_at(g.t_min);
        return compose_explanation(s, w, g.t_min);
    }

    double predict_p(const GroupedFeatures& g) const { return predict(g).p_blue; }

    // true = blue; an exact F == 0 resolves by a seeded deterministic coin
    bool predict_binary(const GroupedFeatures& g) const {
        double f = predict(g).F;
        if (f > 0.0) return true;
        if (f < 0.0) return false;
        return seeded_tie_coin(tie_seed, g);
    }

    // One training example: forward in train mode (dropout live), then exact
    // reverse-mode gradients for both stages.
    StepResult accumulate(const Example& ex, Rng& rng, Grads& grads) const {
        SpatialCache cache;
        WinScoreVector s = spatial.forward_all(ex.g, stats, Mode::kTrain, rng, &cache);
        int bin = time_bin(ex.g.t_min);
        ImportanceWeights w = temporal.weights_for_bin(bin);

        double f = 0.0;
        for (int i = 0; i < kNumGroups; ++i) f += w[i] * s[i];
        double p = (f + 1.0) / 2.0;
        nn::BceResult bce = nn::bce_loss(p, ex.y);
        double df = 0.5 * bce.dloss_dp;

        WinScoreVector ds;
        ImportanceWeights dw;
        for (int i = 0; i < kNumGroups; ++i) {
            ds[i] = df * w[i];
            dw[i] = df * s[i];
        }
        temporal.backward(bin, w, dw, grads.temporal);
        spatial.backward(cache, ds, grads.spatial);

        StepResult r;
        r.loss = bce.loss;
        r.correct = ((f > 0.0) == (ex.y == 1)) ? 1 : 0;
        return r;
    }
};

inline TrainReport train(TsstnModel& model, const std::vector<Frame>& train_frames,
                         const std::vector<Frame>& val_frames, const TrainConfig& cfg) {
    if (!model.stats.fitted) throw ModelError("train: NormStats must be fitted before training");
    auto train_ex = make_examples(train_frames);
    auto val_ex = make_examples(val_frames);
    model.tie_seed = cfg.seed;
    return train_model(model, train_ex, val_ex, cfg);
}

// Line-delimited explanation record.
inline std::string explanation_to_line(const std::string& match_id, const Explanation& e,
                                       int top_k = 2) {
    nlohmann::ordered_json j;
    j["match_id"] = match_id;
    j["t_min"] = e.t_min;
    j["p_blue"] = e.p_blue;
    j["F"] = e.F;
    nlohmann::ordered_json groups = nlohmann::ordered_json::array();
    for (int r = 0; r < kNumGroups; ++r) {
        const GroupExplanation& ge = e.groups[e.ranking[r]];
        groups.push_back({{"name", ge.name}, {"s", ge.win_score}, {"w", ge.weight}, {"c", ge.contribution}});
    }
    j["groups"] = groups;
    j["comment"] = explain_text(e, top_k);
    return j.dump();
}

}  // namespace tsstn
