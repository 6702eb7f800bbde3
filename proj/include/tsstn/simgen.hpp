#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "tsstn/core.hpp"
#include "tsstn/nnkit.hpp"
#include "tsstn/rng.hpp"
#include "tsstn/temporal.hpp"

#include "json.hpp"

namespace tsstn {

// Synthetic-data knobs. signal_weights[g] sets how strongly channel g's
// trajectory tracks the latent advantage; the Heroes entry sets the share of
// latent advantage carried by the hidden hero-synergy term.
struct SimConfig {
    std::size_t n_matches = 1000;
    std::uint64_t seed = 0;
    double mean_duration_min = 16.0;  // in [8, 30]
    std::array<double, kNumGroups> signal_weights{0.35, 0.15, 0.12, 0.10, 0.13, 0.15};
    double noise_scale = 0.5;
    int hero_pool = kDefaultHeroVocab;
    double synergy_scale = 1.0;
};

inline void validate_sim_config(const SimConfig& cfg) {
    if (cfg.n_matches == 0) throw DataError("sim config: n_matches must be positive");
    if (!(cfg.mean_duration_min >= 8.0 && cfg.mean_duration_min <= 30.0))
        throw DataError("sim config: mean_duration_min must be in [8, 30]");
    double sum = 0.0;
    for (double w : cfg.signal_weights) {
        if (w < 0.0) throw DataError("sim config: signal_weights must be non-negative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw DataError("sim config: signal_weights must sum to 1");
    if (cfg.noise_scale < 0.0) throw DataError("sim config: noise_scale must be non-negative");
    if (cfg.hero_pool < 11) throw DataError("sim config: hero_pool must be at least 11");
    if (cfg.synergy_scale < 0.0) throw DataError("sim config: synergy_scale must be non-negative");
}

// Hidden pairwise hero-synergy table, drawn once per master seed. Entries are
// mostly additive in per-hero strength plus a low-rank pairwise term, so a
// sum-pooled embedding model can recover the bulk of it.
struct SynergyTable {
    int hero_pool = 0;
    double alpha = 1.0;
    double beta = 0.7;
    double normalizer = 1.0;
    std::vector<double> strength;  // per hero
    nn::Mat factors;               // hero_pool x 2

    static SynergyTable build(std::uint64_t master_seed, int hero_pool) {
        SynergyTable t;
        t.hero_pool = hero_pool;
        Rng rng(derive_seed(master_seed, 0x53594E45ULL));
        t.strength.resize(hero_pool);
        t.factors = nn::Mat(hero_pool, 2);
        for (int h = 0; h < hero_pool; ++h) {
            t.strength[h] = rng.normal();
            t.factors(h, 0) = rng.normal();
            t.factors(h, 1) = rng.normal();
        }
        // analytic stddev of team_value difference for iid hero draws
        t.normalizer = std::sqrt(2.0 * (0.8 * t.alpha * t.alpha + 0.2 * t.beta * t.beta));
        return t;
    }

    double pair_value(int a, int b) const {
        return alpha * (strength[a] + strength[b]) +
               beta * (factors(a, 0) * factors(b, 0) + factors(a, 1) * factors(b, 1));
    }

    // mean pairwise synergy over the 10 unordered pairs of a five-hero team
    double team_value(const int* heroes) const {
        double sum = 0.0;
        for (int i = 0; i < kTeamSize; ++i)
            for (int j = i + 1; j < kTeamSize; ++j) sum += pair_value(heroes[i], heroes[j]);
        return sum / 10.0;
    }

    // standardized blue-minus-red synergy difference
    double team_diff_z(const int* blue, const int* red) const {
        return (team_value(blue) - team_value(red)) / normalizer;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["hero_pool"] = hero_pool;
        j["alpha"] = alpha;
        j["beta"] = beta;
        j["normalizer"] = normalizer;
        j["strength"] = strength;
        nlohmann::ordered_json f = nlohmann::ordered_json::array();
        for (int h = 0; h < hero_pool; ++h) f.push_back({factors(h, 0), factors(h, 1)});
        j["factors"] = f;
        return j;
    }
};

struct MatchTruth {
    std::string match_id;
    double adv = 0.0;    // latent advantage (hero synergy included)
    double syn_z = 0.0;  // standardized synergy difference
    bool blue_wins = false;
};

struct SimResult {
    std::vector<Frame> frames;
    SynergyTable synergy;
    std::vector<MatchTruth> truths;
};

namespace simdetail {

// trajectory constants, per minute of game time
inline constexpr double kGoldBaseRate = 2200.0;   // per-team income at t = 0
inline constexpr double kGoldBaseRamp = 60.0;     // income growth per minute
inline constexpr double kGoldDrift = 250.0;       // diff drift per unit adv*signal
inline constexpr double kGoldNoise = 300.0;
inline constexpr double kKillBaseRate = 0.9;
inline constexpr double kKillDrift = 0.5;
inline constexpr double kKillNoise = 0.9;
inline constexpr double kTowerStart = 5.0;        // demolition begins
inline constexpr double kTowerBaseRate = 0.28;
inline constexpr double kTowerDrift = 0.25;
inline constexpr double kTowerNoise = 0.22;
inline constexpr double kSoldierPush = 120.0;
inline constexpr double kSoldierNoise = 150.0;
// lane positions mean-revert (waves reset); keeps frames within one match
// from sharing a persistent random offset
inline constexpr double kSoldierRevert = 0.5;
inline constexpr double kWildStart = 8.0;         // no wild objective changes before this
inline constexpr double kDarkTyrantStart = 10.0;

inline constexpr std::array<double, 3> kLaneBase = {9200.0, 7600.0, 8800.0};
inline constexpr std::array<double, 3> kLanePush = {0.9, 1.2, 1.0};

// soldiers grow more potent late-game: integrated push scale
inline double soldier_ramp(double t) { return 0.25 * t + 0.0375 * t * t; }

// Durations are 8 + Exp(m) clamped at 30. Solve for the raw mean m so the
// clamped mean hits the configured target: m * (1 - exp(-22/m)) = target - 8.
inline double raw_duration_mean(double target_mean) {
    double want = target_mean - 8.0;
    if (want <= 1e-9) return 1e-9;
    double lo = want, hi = 8.0 * want + 1.0;
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        double clamped = mid * (1.0 - std::exp(-22.0 / mid));
        (clamped < want ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline void draw_distinct_heroes(Rng& rng, int pool, std::array<int, 10>& out) {
    for (int i = 0; i < 10; ++i) {
        for (;;) {
            int h = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(pool - 1)));
            bool dup = false;
            for (int j = 0; j < i; ++j) dup |= (out[j] == h);
            if (!dup) {
                out[i] = h;
                break;
            }
        }
    }
}

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace simdetail

// Generates one match per derived sub-seed; per-match streams make the output
// independent of generation order.
inline SimResult generate_full(const SimConfig& cfg) {
    validate_sim_config(cfg);
    using namespace simdetail;

    SimResult result;
    result.synergy = SynergyTable::build(cfg.seed, cfg.hero_pool);
    result.frames.reserve(cfg.n_matches * 33);

    const std::array<double, kNumGroups>& sw = cfg.signal_weights;
    double hero_share = sw[kHeroes];
    double duration_mean = raw_duration_mean(cfg.mean_duration_min);

    for (std::size_t m = 0; m < cfg.n_matches; ++m) {
        Rng rng(derive_seed(cfg.seed, 1 + m));

        char idbuf[32];
        std::snprintf(idbuf, sizeof(idbuf), "m%07zu", m);
        std::string match_id = idbuf;

        std::array<int, 10> heroes;
        draw_distinct_heroes(rng, cfg.hero_pool, heroes);
        double syn_z = result.synergy.team_diff_z(heroes.data(), heroes.data() + 5);

        double a0 = rng.normal();
        double adv = std::sqrt(std::max(0.0, 1.0 - hero_share)) * a0 +
                     std::sqrt(hero_share) * cfg.synergy_scale * syn_z;
        bool blue_wins = adv + cfg.noise_scale * rng.normal() > 0.0;

        // one-sided matches tend to end earlier (survivorship in late bins)
        double surv = (1.3 - 0.6 * std::tanh(std::abs(adv))) / 0.937;
        double extra = -std::log(1.0 - rng.uniform01()) * duration_mean * surv;
        int steps = static_cast<int>(std::clamp(std::llround((8.0 + extra) * 2.0), 16LL, 60LL));

        result.truths.push_back(MatchTruth{match_id, adv, syn_z, blue_wins});

        double gold_base = 0.0, gold_diff = 0.0;
        double kill_base = 0.0, kill_diff = 0.0;
        double tower_lost_blue = 0.0, tower_lost_red = 0.0;
        std::array<double, 3> walk_blue{}, walk_red{};
        TeamState blue, red;
        blue.soldier_dist.resize(3);
        red.soldier_dist.resize(3);
        for (int i = 0; i < kTeamSize; ++i) {
            blue.heroes.push_back(heroes[i]);
            red.heroes.push_back(heroes[kTeamSize + i]);
        }

        const double dt = 0.5;
        for (int k = 0; k <= steps; ++k) {
            double t = 0.5 * k;

            if (k > 0) {
                double tprev = 0.5 * (k - 1);
                gold_base += (kGoldBaseRate + kGoldBaseRamp * tprev) * dt;
                gold_diff += kGoldDrift * sw[kGold] * adv * dt +
                             cfg.noise_scale * kGoldNoise * std::sqrt(dt) * rng.normal();

                if (tprev >= 1.0) kill_base += kKillBaseRate * dt;
                kill_diff += kKillDrift * sw[kKill] * adv * dt +
                             cfg.noise_scale * kKillNoise * std::sqrt(dt) * rng.normal();

                if (tprev >= kTowerStart) {
                    double base = kTowerBaseRate * (1.0 + 0.08 * (tprev - kTowerStart)) * dt;
                    double drift = kTowerDrift * sw[kTower] * adv * dt;
                    double nscale = cfg.noise_scale * kTowerNoise * std::sqrt(dt);
                    tower_lost_blue += base - drift + nscale * rng.normal();
                    tower_lost_red += base + drift + nscale * rng.normal();
                    tower_lost_blue = std::clamp(tower_lost_blue, 0.0, 9.0);
                    tower_lost_red = std::clamp(tower_lost_red, 0.0, 9.0);
                }

                for (int lane = 0; lane < 3; ++lane) {
                    double n = cfg.noise_scale * kSoldierNoise * std::sqrt(dt);
                    walk_blue[lane] += -kSoldierRevert * walk_blue[lane] * dt + n * rng.normal();
                    walk_red[lane] += -kSoldierRevert * walk_red[lane] * dt + n * rng.normal();
                }

                // wild objective spawns, claimed with advantage-tilted odds;
                // draws sequenced explicitly to keep the stream reproducible
                auto claim = [&](double tilt) {
                    double jitter = rng.normal();
                    double u = rng.uniform01();
                    return u < logistic(tilt * sw[kWildResource] * adv +
                                        0.4 * cfg.noise_scale * jitter);
                };
                auto spawns_at = [&](double first, double period) {
                    if (t + 1e-9 < first) return false;
                    double phase = (t - first) / period;
                    return std::abs(phase - std::round(phase)) < 1e-9;
                };
                if (spawns_at(kWildStart, 3.0)) (claim(3.0) ? blue : red).overlords += 1;
                if (spawns_at(kDarkTyrantStart, 2.5)) (claim(3.0) ? blue : red).dark_tyrants += 1;
                if (spawns_at(kWildStart, 2.5)) (claim(2.5) ? blue : red).tyrants += 1;
                if (spawns_at(kWildStart, 1.5)) {
                    // each side usually secures its own jungle buffs
                    auto own_buff = [&](double tilt) {
                        double jitter = rng.normal();
                        double u = rng.uniform01();
                        return u < logistic(2.6 + tilt * sw[kWildResource] * adv +
                                            0.25 * cfg.noise_scale * jitter);
                    };
                    (own_buff(2.0) ? blue : red).red_buffs += 1;
                    (own_buff(-2.0) ? red : blue).blue_buffs += 1;
                }
            }

            blue.team_gold = std::max(0LL, std::llround(gold_base + gold_diff / 2.0));
            red.team_gold = std::max(0LL, std::llround(gold_base - gold_diff / 2.0));
            blue.kills = std::max(0, static_cast<int>(std::lround(kill_base + kill_diff / 2.0)));
            red.kills = std::max(0, static_cast<int>(std::lround(kill_base - kill_diff / 2.0)));
            blue.towers_total = std::clamp(9 - static_cast<int>(std::lround(tower_lost_blue)), 0, 9);
            red.towers_total = std::clamp(9 - static_cast<int>(std::lround(tower_lost_red)), 0, 9);

            double push = kSoldierPush * sw[kSoldier] * adv * soldier_ramp(t);
            double creep = 35.0 * t;
            for (int lane = 0; lane < 3; ++lane) {
                blue.soldier_dist[lane] =
                    std::max(0.0, kLaneBase[lane] - creep - kLanePush[lane] * push + walk_blue[lane]);
                red.soldier_dist[lane] =
                    std::max(0.0, kLaneBase[lane] - creep + kLanePush[lane] * push + walk_red[lane]);
            }

            Frame f;
            f.match_id = match_id;
            f.t_min = t;
            f.blue = blue;
            f.red = red;
            f.blue_wins = blue_wins;
            result.frames.push_back(std::move(f));
        }
    }
    return result;
}

inline std::vector<Frame> generate(const SimConfig& cfg) { return generate_full(cfg).frames; }

struct ChannelMoments {
    double mean = 0.0;
    double var = 0.0;
    std::size_t n = 0;
};

// Scalar channels summarized per time bin, all with blue-favoring sign.
inline constexpr std::array<const char*, 5> kSummaryChannels = {
    "gold_diff", "kill_diff", "tower_diff", "wild_diff", "soldier_diff"};

struct SimSummary {
    std::size_t n_frames = 0;
    std::size_t n_matches = 0;
    double blue_win_fraction = 0.0;
    std::array<std::size_t, kNumTimeBins> frames_per_bin{};
    std::array<std::array<ChannelMoments, 5>, kNumTimeBins> channels{};
};

inline SimSummary summarize(const std::vector<Frame>& frames) {
    if (frames.empty()) throw DataError("summarize: no frames");
    SimSummary s;
    s.n_frames = frames.size();

    std::array<std::array<double, 5>, kNumTimeBins> msum{};
    std::array<std::array<double, 5>, kNumTimeBins> m2sum{};

    std::string last_id;
    std::size_t blue_wins = 0;
    for (const Frame& f : frames) {
        if (f.match_id != last_id) {
            last_id = f.match_id;
            ++s.n_matches;
            if (f.blue_wins) ++blue_wins;
        }
        int bin = time_bin(f.t_min);
        ++s.frames_per_bin[bin];
        GroupedFeatures g = group_features(f);
        double wild_diff = 0.0;
        for (int i = 0; i < 5; ++i) wild_diff += g.wild[i] - g.wild[5 + i];
        double soldier_diff = 0.0;
        for (int i = 0; i < 3; ++i) soldier_diff += (g.soldier[3 + i] - g.soldier[i]) / 3.0;
        std::array<double, 5> vals = {g.gold_diff, g.kill_diff, g.tower_diff, wild_diff, soldier_diff};
        for (int c = 0; c < 5; ++c) {
            msum[bin][c] += vals[c];
            m2sum[bin][c] += vals[c] * vals[c];
        }
    }
    s.blue_win_fraction = static_cast<double>(blue_wins) / static_cast<double>(s.n_matches);
    for (int b = 0; b < kNumTimeBins; ++b) {
        std::size_t n = s.frames_per_bin[b];
        for (int c = 0; c < 5; ++c) {
            ChannelMoments& cm = s.channels[b][c];
            cm.n = n;
            if (n == 0) continue;
            cm.mean = msum[b][c] / static_cast<double>(n);
            cm.var = std::max(0.0, m2sum[b][c] / static_cast<double>(n) - cm.mean * cm.mean);
        }
    }
    return s;
}

}  // namespace tsstn
