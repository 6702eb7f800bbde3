#pragma once

#include <string>
#include <vector>

#include "tsstn/core.hpp"
#include "tsstn/ingest.hpp"
#include "tsstn/model.hpp"
#include "tsstn/spatial.hpp"
#include "tsstn/train.hpp"

namespace tsstn {

// Gold heuristic: the richer team wins; exact ties resolve by a seeded coin.
struct HeuristicModel {
    std::uint64_t tie_seed = 0;

    bool predict_blue(const Frame& f) const {
        long long gd = f.blue.team_gold - f.red.team_gold;
        if (gd > 0) return true;
        if (gd < 0) return false;
        return seeded_tie_coin(tie_seed, group_features(f));
    }

    bool predict_blue(const GroupedFeatures& g) const {
        if (g.gold_diff > 0) return true;
        if (g.gold_diff < 0) return false;
        return seeded_tie_coin(tie_seed, g);
    }

    double predict_p(const GroupedFeatures& g) const {
        if (g.gold_diff == 0) return 0.5;
        return g.gold_diff > 0 ? 1.0 : 0.0;
    }
};

inline bool heuristic_predict(const Frame& f, std::uint64_t seed) {
    return HeuristicModel{seed}.predict_blue(f);
}

// Embedding tables for the all-feature baselines. Same shapes and lookup
// rules as the spatial stage, so assembled inputs are byte-identical given
// identical table values.
struct FeatureBank {
    std::vector<nn::EmbeddingParam> wild_slots;
    std::vector<nn::EmbeddingParam> soldier_slots;
    nn::EmbeddingParam hero_table;
    nn::EmbeddingParam time_table;

    explicit FeatureBank(const SpatialConfig& cfg = {})
        : wild_slots(10, nn::EmbeddingParam(SpatialConfig::kWildClip + 1, SpatialConfig::kWildEmbDim)),
          soldier_slots(6, nn::EmbeddingParam(SpatialConfig::kSoldierBuckets, SpatialConfig::kSoldierEmbDim)),
          hero_table(static_cast<std::size_t>(cfg.hero_vocab), SpatialConfig::kHeroEmbDim),
          time_table(kNumTimeBins, SpatialConfig::kTimeEmbDim) {}

    void init(Rng& rng) {
        for (auto& e : wild_slots) nn::embedding_init(e.table, rng);
        for (auto& e : soldier_slots) nn::embedding_init(e.table, rng);
        nn::embedding_init(hero_table.table, rng);
        nn::embedding_init(time_table.table, rng);
    }

    template <typename F>
    void for_each_param(const std::string& prefix, F&& fn) {
        for (std::size_t i = 0; i < wild_slots.size(); ++i)
            wild_slots[i].for_each_param(prefix + ".wild" + std::to_string(i), fn);
        for (std::size_t i = 0; i < soldier_slots.size(); ++i)
            soldier_slots[i].for_each_param(prefix + ".soldier" + std::to_string(i), fn);
        hero_table.for_each_param(prefix + ".heroes", fn);
        time_table.for_each_param(prefix + ".time", fn);
    }
};

// scalar diffs (3) + wild (80) + soldier (48) + heroes (32) + time (8)
inline constexpr std::size_t kAllFeatureDim = 3 + 10 * SpatialConfig::kWildEmbDim +
                                              6 * SpatialConfig::kSoldierEmbDim +
                                              2 * SpatialConfig::kHeroEmbDim +
                                              SpatialConfig::kTimeEmbDim;

struct AllFeatureCache {
    std::array<int, 10> wild_idx{};
    std::array<int, 6> soldier_idx{};
    std::array<int, 10> hero_idx{};
    int tbin = 0;
    nn::MlpCache mlp;
};

inline nn::Tensor1 assemble_all_features(const FeatureBank& bank, const GroupedFeatures& g,
                                         const NormStats& stats, int hero_vocab,
                                         AllFeatureCache* cache = nullptr) {
    nn::Tensor1 x;
    x.reserve(kAllFeatureDim);
    x.push_back(normalize(g.gold_diff, stats.gold_diff));
    x.push_back(normalize(g.kill_diff, stats.kill_diff));
    x.push_back(normalize(g.tower_diff, stats.tower_diff));

    auto widx = wild_indices(g);
    nn::Tensor1 part = wild_features(bank.wild_slots, widx);
    x.insert(x.end(), part.begin(), part.end());

    auto sidx = soldier_indices(g, stats);
    part = soldier_features(bank.soldier_slots, sidx);
    x.insert(x.end(), part.begin(), part.end());

    auto hidx = hero_indices(g, hero_vocab);
    part = heroes_features(bank.hero_table, hidx);
    x.insert(x.end(), part.begin(), part.end());

    int tbin = time_bin(g.t_min);
    append_time_feature(x, bank.time_table, tbin);

    if (cache) {
        cache->wild_idx = widx;
        cache->soldier_idx = sidx;
        cache->hero_idx = hidx;
        cache->tbin = tbin;
    }
    return x;
}

inline void all_features_backward(const AllFeatureCache& cache, const nn::Tensor1& dx,
                                  FeatureBank& grad) {
    std::size_t off = 3;  // normalized scalars are inputs, not parameters
    for (int slot = 0; slot < 10; ++slot) {
        double* row = grad.wild_slots[slot].table.row(cache.wild_idx[slot]);
        for (int d = 0; d < SpatialConfig::kWildEmbDim; ++d) row[d] += dx[off++];
    }
    for (int slot = 0; slot < 6; ++slot) {
        double* row = grad.soldier_slots[slot].table.row(cache.soldier_idx[slot]);
        for (int d = 0; d < SpatialConfig::kSoldierEmbDim; ++d) row[d] += dx[off++];
    }
    for (int i = 0; i < 10; ++i) {
        double* row = grad.hero_table.table.row(cache.hero_idx[i]);
        std::size_t base = off + (i < 5 ? 0 : SpatialConfig::kHeroEmbDim);
        for (int d = 0; d < SpatialConfig::kHeroEmbDim; ++d) row[d] += dx[base + d];
    }
    off += 2 * SpatialConfig::kHeroEmbDim;
    double* trow = grad.time_table.table.row(cache.tbin);
    for (int d = 0; d < SpatialConfig::kTimeEmbDim; ++d) trow[d] += dx[off + d];
}

// One network over all six groups' preprocessed inputs. With hidden layers
// this is the Fully-Connected baseline; with none it is the all-feature
// logistic regression (affine + tanh).
struct AllFeatureModel {
    SpatialConfig cfg;
    FeatureBank bank;
    nn::MlpParam mlp;
    NormStats stats;
    std::uint64_t tie_seed = 0;

    AllFeatureModel(const SpatialConfig& c, const std::vector<std::size_t>& hidden_dims)
        : cfg(c), bank(c), mlp(kAllFeatureDim, hidden_dims) {}

    void init(Rng& rng) {
        bank.init(rng);
        mlp.init(rng);
    }

    struct Grads {
        FeatureBank bank;
        nn::MlpParam mlp;

        template <typename F>
        void for_each_param(const std::string& prefix, F&& fn) {
            bank.for_each_param(prefix + "bank", fn);
            mlp.for_each_param(prefix + "net", fn);
        }
    };

    Grads make_grads() const {
        Grads g{bank, mlp};
        zero_params(g);
        return g;
    }

    template <typename F>
    void for_each_param(const std::string& prefix, F&& fn) {
        bank.for_each_param(prefix + "bank", fn);
        mlp.for_each_param(prefix + "net", fn);
    }

    void bind_adam(nn::Adam& adam, Grads& grads) {
        auto p = param_arrays(*this);
        auto g = param_arrays(grads);
        for (std::size_t i = 0; i < p.size(); ++i) adam.bind(*p[i], *g[i]);
    }

    double predict_F(const GroupedFeatures& g) const {
        Rng rng(0);
        nn::Tensor1 x = assemble_all_features(bank, g, stats, cfg.hero_vocab);
        return nn::mlp_forward(mlp, x, cfg.dropout_rate, false, rng, nullptr);
    }

    double predict_p(const GroupedFeatures& g) const { return (predict_F(g) + 1.0) / 2.0; }

    bool predict_binary(const GroupedFeatures& g) const {
        double f = predict_F(g);
        if (f > 0.0) return true;
        if (f < 0.0) return false;
        return seeded_tie_coin(tie_seed, g);
    }

    StepResult accumulate(const Example& ex, Rng& rng, Grads& grads) const {
        AllFeatureCache cache;
        nn::Tensor1 x = assemble_all_features(bank, ex.g, stats, cfg.hero_vocab, &cache);
        double f = nn::mlp_forward(mlp, x, cfg.dropout_rate, true, rng, &cache.mlp);
        double p = (f + 1.0) / 2.0;
        nn::BceResult bce = nn::bce_loss(p, ex.y);
        double ds = 0.5 * bce.dloss_dp;
        nn::Tensor1 dx = nn::mlp_backward(mlp, cache.mlp, ds, grads.mlp);
        all_features_backward(cache, dx, grads.bank);

        StepResult r;
        r.loss = bce.loss;
        r.correct = ((f > 0.0) == (ex.y == 1)) ? 1 : 0;
        return r;
    }
};

inline constexpr std::array<std::size_t, 4> kFcPaperDims = {1024, 4096, 512, 64};
inline constexpr std::array<std::size_t, 4> kFcDeskDims = {128, 256, 64, 16};

inline AllFeatureModel make_fc_model(const SpatialConfig& cfg,
                                     const std::vector<std::size_t>& hidden_dims = {
                                         kFcDeskDims.begin(), kFcDeskDims.end()}) {
    return AllFeatureModel(cfg, hidden_dims);
}

inline AllFeatureModel make_logistic_all_model(const SpatialConfig& cfg) {
    return AllFeatureModel(cfg, {});
}

inline TrainReport baseline_train(AllFeatureModel& model, const std::vector<Frame>& train_frames,
                                  const std::vector<Frame>& val_frames, const TrainConfig& cfg) {
    if (!model.stats.fitted) throw ModelError("baseline_train: NormStats must be fitted");
    auto train_ex = make_examples(train_frames);
    auto val_ex = make_examples(val_frames);
    model.tie_seed = cfg.seed;
    return train_model(model, train_ex, val_ex, cfg);
}

}  // namespace tsstn
