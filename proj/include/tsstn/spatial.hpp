#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "tsstn/core.hpp"
#include "tsstn/ingest.hpp"
#include "tsstn/nnkit.hpp"
#include "tsstn/temporal.hpp"

namespace tsstn {

enum class Mode { kTrain, kEval };

// Geometry shared by the three embedding-fed models. The hidden dims are the
// desk defaults for each model; the embedding layout is fixed.
struct SpatialConfig {
    int hero_vocab = kDefaultHeroVocab;
    double dropout_rate = 0.2;
    std::vector<std::size_t> wild_hidden{256, 16};
    std::vector<std::size_t> soldier_hidden{256, 16};
    std::vector<std::size_t> heroes_hidden{128, 16};

    static constexpr int kWildClip = 10;  // counts clipped to [0, 10] -> 11 embedding rows
    static constexpr int kWildEmbDim = 8;
    static constexpr int kSoldierBuckets = 16;
    static constexpr int kSoldierEmbDim = 8;
    static constexpr int kHeroEmbDim = 16;
    static constexpr int kTimeEmbDim = 8;

    std::size_t wild_input_dim() const { return 10 * kWildEmbDim + kTimeEmbDim; }
    std::size_t soldier_input_dim() const { return 6 * kSoldierEmbDim + kTimeEmbDim; }
    std::size_t heroes_input_dim() const { return 2 * kHeroEmbDim + kTimeEmbDim; }
};

using WinScoreVector = std::array<double, kNumGroups>;

// tanh reaches exactly +/-1.0 in doubles when saturated; win-scores are
// contractually strict, so nudge inside the open interval.
inline double clamp_score(double s) { return std::clamp(s, -1.0 + 1e-12, 1.0 - 1e-12); }

// --- index pipelines, shared verbatim with the all-feature baselines -------

inline std::array<int, 10> wild_indices(const GroupedFeatures& g) {
    std::array<int, 10> idx;
    for (int i = 0; i < 10; ++i) idx[i] = std::clamp(g.wild[i], 0, SpatialConfig::kWildClip);
    return idx;
}

// Equal-width buckets over the normalized training range [0, 1].
inline std::array<int, 6> soldier_indices(const GroupedFeatures& g, const NormStats& stats) {
    std::array<int, 6> idx;
    for (int i = 0; i < 6; ++i) {
        double nd = std::clamp(normalize(g.soldier[i], stats.soldier[i]), 0.0, 1.0);
        idx[i] = std::min(static_cast<int>(nd * SpatialConfig::kSoldierBuckets),
                          SpatialConfig::kSoldierBuckets - 1);
    }
    return idx;
}

// Ids outside [0, vocab) map to the OOV row 0. Each team's five ids are
// sorted so the pooled sum is exactly order-invariant.
inline std::array<int, 10> hero_indices(const GroupedFeatures& g, int vocab) {
    std::array<int, 10> idx;
    for (int i = 0; i < 10; ++i) {
        int h = g.heroes[i];
        idx[i] = (h >= 0 && h < vocab) ? h : 0;
    }
    std::sort(idx.begin(), idx.begin() + 5);
    std::sort(idx.begin() + 5, idx.end());
    return idx;
}

namespace detail {
inline void append_row(nn::Tensor1& out, const nn::Mat& table, int row) {
    const double* r = table.row(static_cast<std::size_t>(row));
    out.insert(out.end(), r, r + table.cols);
}
}  // namespace detail

// 10 slot lookups concatenated (80 values)
inline nn::Tensor1 wild_features(const std::vector<nn::EmbeddingParam>& slots,
                                 const std::array<int, 10>& idx) {
    nn::Tensor1 out;
    out.reserve(10 * SpatialConfig::kWildEmbDim);
    for (int i = 0; i < 10; ++i) detail::append_row(out, slots[i].table, idx[i]);
    return out;
}

// 6 slot lookups concatenated (48 values)
inline nn::Tensor1 soldier_features(const std::vector<nn::EmbeddingParam>& slots,
                                    const std::array<int, 6>& idx) {
    nn::Tensor1 out;
    out.reserve(6 * SpatialConfig::kSoldierEmbDim);
    for (int i = 0; i < 6; ++i) detail::append_row(out, slots[i].table, idx[i]);
    return out;
}

// Per-team sums from a shared table, blue then red (32 values)
inline nn::Tensor1 heroes_features(const nn::EmbeddingParam& table, const std::array<int, 10>& idx) {
    nn::Tensor1 out(2 * SpatialConfig::kHeroEmbDim, 0.0);
    for (int i = 0; i < 10; ++i) {
        const double* r = table.table.row(static_cast<std::size_t>(idx[i]));
        double* dst = out.data() + (i < 5 ? 0 : SpatialConfig::kHeroEmbDim);
        for (int d = 0; d < SpatialConfig::kHeroEmbDim; ++d) dst[d] += r[d];
    }
    return out;
}

inline void append_time_feature(nn::Tensor1& out, const nn::EmbeddingParam& time_table, int bin) {
    detail::append_row(out, time_table.table, bin);
}

// --- the six models ---------------------------------------------------------

// Logistic-regression core for the scalar diff groups: two inputs
// (normalized diff, normalized time), tanh output.
struct ScalarSpatialModel {
    nn::Tensor1 p{0.0, 0.0, 0.0};  // w_diff, w_time, bias

    double forward(double nd, double nt) const { return nn::tanh_act(p[0] * nd + p[1] * nt + p[2]); }

    void backward(double nd, double nt, double s, double ds, ScalarSpatialModel& grad) const {
        double dz = nn::tanh_backward(s, ds);
        grad.p[0] += dz * nd;
        grad.p[1] += dz * nt;
        grad.p[2] += dz;
    }

    void init(Rng& rng) {
        double bound = std::sqrt(6.0 / 3.0);
        p[0] = rng.uniform(-bound, bound);
        p[1] = rng.uniform(-bound, bound);
        p[2] = 0.0;
    }

    template <typename F>
    void for_each_param(const std::string& prefix, F&& fn) {
        fn(prefix, p, std::vector<std::size_t>{p.size()});
    }
};

struct WildModel {
    std::vector<nn::EmbeddingParam> slot_emb;  // 10 tables, 11 x 8
    nn::EmbeddingParam time_emb;               // 41 x 8
    nn::MlpParam mlp;

    explicit WildModel(const SpatialConfig& cfg = {})
        : slot_emb(10, nn::EmbeddingParam(SpatialConfig::kWildClip + 1, SpatialConfig::kWildEmbDim)),
          time_emb(kNumTimeBins, SpatialConfig::kTimeEmbDim),
          mlp(cfg.wild_input_dim(), cfg.wild_hidden) {}

    void init(Rng& rng) {
        for (auto& e : slot_emb) nn::embedding_init(e.table, rng);
        nn::embedding_init(time_emb.table, rng);
        mlp.init(rng);
    }

    template <typename F>
    void for_each_param(const std::string& prefix, F&& fn) {
        for (std::size_t i = 0; i < slot_emb.size(); ++i)
            slot_emb[i].for_each_param(prefix + ".emb" + std::to_string(i), fn);
        time_emb.for_each_param(prefix + ".time", fn);
        mlp.for_each_param(prefix + ".mlp", fn);
    }
};

struct SoldierModel {
    std::vector<nn::EmbeddingParam> slot_emb;  // 6 tables, 16 x 8
    nn::EmbeddingParam time_emb;
    nn::MlpParam mlp;

    explicit SoldierModel(const SpatialConfig& cfg = {})
        : slot_emb(6, nn::EmbeddingParam(SpatialConfig::kSoldierBuckets, SpatialConfig::kSoldierEmbDim)),
          time_emb(kNumTimeBins, SpatialConfig::kTimeEmbDim),
          mlp(cfg.soldier_input_dim(), cfg.soldier_hidden) {}

    void init(Rng& rng) {
        for (auto& e : slot_emb) nn::embedding_init(e.table, rng);
        nn::embedding_init(time_emb.table, rng);
        mlp.init(rng);
    }

    template <typename F>
    void for_each_param(const std::string& prefix, F&& fn) {
        for (std::size_t i = 0; i < slot_emb.size(); ++i)
            slot_emb[i].for_each_param(prefix + ".emb" + std::to_string(i), fn);
        time_emb.for_each_param(prefix + ".time", fn);
        mlp.for_each_param(prefix + ".mlp", fn);
    }
};

struct HeroesModel {
    nn::EmbeddingParam hero_emb;  // vocab x 16, row 0 OOV
    nn::EmbeddingParam time_emb;
    nn::MlpParam mlp;

    explicit HeroesModel(const SpatialConfig& cfg = {})
        : hero_emb(static_cast<std::size_t>(cfg.hero_vocab), SpatialConfig::kHeroEmbDim),
          time_emb(kNumTimeBins, SpatialConfig::kTimeEmbDim),
          mlp(cfg.heroes_input_dim(), cfg.heroes_hidden) {}

    void init(Rng& rng) {
        nn::embedding_init(hero_emb.table, rng);
        nn::embedding_init(time_emb.table, rng);
        mlp.init(rng);
    }

    template <typename F>
    void for_each_param(const std::string& prefix, F&& fn) {
        hero_emb.for_each_param(prefix + ".emb", fn);
        time_emb.for_each_param(prefix + ".time", fn);
        mlp.for_each_param(prefix + ".mlp", fn);
    }
};

struct ScalarCache {
    double nd = 0.0;
    double nt = 0.0;
    double s = 0.0;
};

template <int N>
struct EmbedCache {
    std::array<int, N> idx{};
    int tbin = 0;
    nn::MlpCache mlp;
};

struct SpatialCache {
    ScalarCache gold, kill, tower;
    EmbedCache<10> wild;
    EmbedCache<6> soldier;
    EmbedCache<10> heroes;
};

// The Spatial-stage: six independent predictors. Each win-score depends only
// on its own group's features plus game time.
struct SpatialStage {
    SpatialConfig cfg;
    ScalarSpatialModel gold, kill, tower;
    WildModel wild;
    SoldierModel soldier;
    HeroesModel heroes;

    explicit SpatialStage(const SpatialConfig& c = {})
        : cfg(c), wild(c), soldier(c), heroes(c) {}

    void init(Rng& rng) {
        gold.init(rng);
        kill.init(rng);
        tower.init(rng);
        wild.init(rng);
        soldier.init(rng);
        heroes.init(rng);
    }

    WinScoreVector forward_all(const GroupedFeatures& g, const NormStats& stats, Mode mode,
                               Rng& rng, SpatialCache* cache = nullptr) const {
        bool training = mode == Mode::kTrain;
        int tbin = time_bin(g.t_min);
        double nt = normalize(g.t_min, stats.t_min);

        WinScoreVector s{};
        ScalarCache sc_gold{normalize(g.gold_diff, stats.gold_diff), nt, 0.0};
        ScalarCache sc_kill{normalize(g.kill_diff, stats.kill_diff), nt, 0.0};
        ScalarCache sc_tower{normalize(g.tower_diff, stats.tower_diff), nt, 0.0};
        sc_gold.s = gold.forward(sc_gold.nd, sc_gold.nt);
        sc_kill.s = kill.forward(sc_kill.nd, sc_kill.nt);
        sc_tower.s = tower.forward(sc_tower.nd, sc_tower.nt);
        s[kGold] = sc_gold.s;
        s[kKill] = sc_kill.s;
        s[kTower] = sc_tower.s;

        auto widx = wild_indices(g);
        nn::Tensor1 wx = wild_features(wild.slot_emb, widx);
        append_time_feature(wx, wild.time_emb, tbin);
        s[kWildResource] = nn::mlp_forward(wild.mlp, wx, cfg.dropout_rate, training, rng,
                                           cache ? &cache->wild.mlp : nullptr);

        auto sidx = soldier_indices(g, stats);
        nn::Tensor1 sx = soldier_features(soldier.slot_emb, sidx);
        append_time_feature(sx, soldier.time_emb, tbin);
        s[kSoldier] = nn::mlp_forward(soldier.mlp, sx, cfg.dropout_rate, training, rng,
                                      cache ? &cache->soldier.mlp : nullptr);

        auto hidx = hero_indices(g, cfg.hero_vocab);
        nn::Tensor1 hx = heroes_features(heroes.hero_emb, hidx);
        append_time_feature(hx, heroes.time_emb, tbin);
        s[kHeroes] = nn::mlp_forward(heroes.mlp, hx, cfg.dropout_rate, training, rng,
                                     cache ? &cache->heroes.mlp : nullptr);

        if (cache) {
            cache->gold = sc_gold;
            cache->kill = sc_kill;
            cache->tower = sc_tower;
            cache->wild.idx = widx;
            cache->wild.tbin = tbin;
            cache->soldier.idx = sidx;
            cache->soldier.tbin = tbin;
            cache->heroes.idx = hidx;
            cache->heroes.tbin = tbin;
        }

        for (double& v : s) v = clamp_score(v);
        return s;
    }

    // ds holds dL/ds_i for the six raw win-scores.
    void backward(const SpatialCache& cache, const WinScoreVector& ds, SpatialStage& grad) const {
        gold.backward(cache.gold.nd, cache.gold.nt, cache.gold.s, ds[kGold], grad.gold);
        kill.backward(cache.kill.nd, cache.kill.nt, cache.kill.s, ds[kKill], grad.kill);
        tower.backward(cache.tower.nd, cache.tower.nt, cache.tower.s, ds[kTower], grad.tower);

        nn::Tensor1 dwx = nn::mlp_backward(wild.mlp, cache.wild.mlp, ds[kWildResource], grad.wild.mlp);
        for (int slot = 0; slot < 10; ++slot) {
            double* row = grad.wild.slot_emb[slot].table.row(cache.wild.idx[slot]);
            const double* src = dwx.data() + slot * SpatialConfig::kWildEmbDim;
            for (int d = 0; d < SpatialConfig::kWildEmbDim; ++d) row[d] += src[d];
        }
        scatter_time(dwx, 10 * SpatialConfig::kWildEmbDim, cache.wild.tbin, grad.wild.time_emb);

        nn::Tensor1 dsx = nn::mlp_backward(soldier.mlp, cache.soldier.mlp, ds[kSoldier], grad.soldier.mlp);
        for (int slot = 0; slot < 6; ++slot) {
            double* row = grad.soldier.slot_emb[slot].table.row(cache.soldier.idx[slot]);
            const double* src = dsx.data() + slot * SpatialConfig::kSoldierEmbDim;
            for (int d = 0; d < SpatialConfig::kSoldierEmbDim; ++d) row[d] += src[d];
        }
        scatter_time(dsx, 6 * SpatialConfig::kSoldierEmbDim, cache.soldier.tbin, grad.soldier.time_emb);

        nn::Tensor1 dhx = nn::mlp_backward(heroes.mlp, cache.heroes.mlp, ds[kHeroes], grad.heroes.mlp);
        for (int i = 0; i < 10; ++i) {
            double* row = grad.heroes.hero_emb.table.row(cache.heroes.idx[i]);
            const double* src = dhx.data() + (i < 5 ? 0 : SpatialConfig::kHeroEmbDim);
            for (int d = 0; d < SpatialConfig::kHeroEmbDim; ++d) row[d] += src[d];
        }
        scatter_time(dhx, 2 * SpatialConfig::kHeroEmbDim, cache.heroes.tbin, grad.heroes.time_emb);
    }

    template <typename F>
    void for_each_param(const std::string& prefix, F&& fn) {
        gold.for_each_param(prefix + ".gold", fn);
        kill.for_each_param(prefix + ".kill", fn);
        tower.for_each_param(prefix + ".tower", fn);
        wild.for_each_param(prefix + ".wild", fn);
        soldier.for_each_param(prefix + ".soldier", fn);
        heroes.for_each_param(prefix + ".heroes", fn);
    }

private:
    static void scatter_time(const nn::Tensor1& dx, std::size_t offset, int tbin,
                             nn::EmbeddingParam& grad_table) {
        double* row = grad_table.table.row(tbin);
        for (int d = 0; d < SpatialConfig::kTimeEmbDim; ++d) row[d] += dx[offset + d];
    }
};

// Generic helpers over any struct exposing for_each_param.
template <typename P>
void zero_params(P& p) {
    p.for_each_param("", [](const std::string&, nn::Tensor1& v, const std::vector<std::size_t>&) {
        std::fill(v.begin(), v.end(), 0.0);
    });
}

template <typename P>
P zeroed_like(const P& p) {
    P z = p;
    zero_params(z);
    return z;
}

template <typename P>
std::vector<nn::Tensor1*> param_arrays(P& p) {
    std::vector<nn::Tensor1*> out;
    p.for_each_param("", [&](const std::string&, nn::Tensor1& v, const std::vector<std::size_t>&) {
        out.push_back(&v);
    });
    return out;
}

// dst += src, elementwise over paired parameter arrays
template <typename P>
void add_params(P& dst, P& src) {
    auto d = param_arrays(dst);
    auto s = param_arrays(src);
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t j = 0; j < d[i]->size(); ++j) (*d[i])[j] += (*s[i])[j];
    }
}

template <typename P>
void scale_params(P& p, double factor) {
    p.for_each_param("", [&](const std::string&, nn::Tensor1& v, const std::vector<std::size_t>&) {
        for (double& x : v) x *= factor;
    });
}

}  // namespace tsstn
