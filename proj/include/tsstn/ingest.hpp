#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <string>
#include <unordered_map>
#include <vector>

#include "tsstn/core.hpp"
#include "tsstn/rng.hpp"

namespace tsstn {

struct MinMax {
    double min = 0.0;
    double max = 0.0;
};

// Per-feature min/max computed on the training split only. Persisted with
// the model; inference never refits.
struct NormStats {
    MinMax gold_diff;
    MinMax kill_diff;
    MinMax tower_diff;
    std::array<MinMax, 6> soldier{};  // blue 3 lanes then red 3 lanes
    MinMax t_min;
    bool fitted = false;
};

// (x - min) / (max - min), clamped to [-1, 2] so live inputs beyond the
// training extremes stay usable. A degenerate max == min feature maps to 0.
inline double normalize(double x, const MinMax& s) {
    if (s.max == s.min) return 0.0;
    double v = (x - s.min) / (s.max - s.min);
    return std::clamp(v, -1.0, 2.0);
}

inline NormStats fit_norm_stats(const std::vector<Frame>& train_frames) {
    if (train_frames.empty()) throw DataError("fit_norm_stats: empty training set");
    NormStats stats;
    bool first = true;
    auto track = [&](MinMax& mm, double x) {
        if (first) {
            mm.min = mm.max = x;
        } else {
            mm.min = std::min(mm.min, x);
            mm.max = std::max(mm.max, x);
        }
    };
    for (const Frame& f : train_frames) {
        GroupedFeatures g = group_features(f);
        track(stats.gold_diff, g.gold_diff);
        track(stats.kill_diff, g.kill_diff);
        track(stats.tower_diff, g.tower_diff);
        for (int i = 0; i < 6; ++i) track(stats.soldier[i], g.soldier[i]);
        track(stats.t_min, g.t_min);
        first = false;
    }
    stats.fitted = true;
    return stats;
}

struct LoadResult {
    std::vector<Frame> frames;
    std::size_t malformed_lines = 0;  // did not parse as a frame record
    std::size_t invalid_frames = 0;   // parsed but violate frame invariants
};

inline LoadResult load_frames(std::istream& in, int hero_vocab = kDefaultHeroVocab) {
    LoadResult result;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Frame f;
        try {
            f = parse_frame_line(line);
        } catch (const DataError&) {
            ++result.malformed_lines;
            continue;
        }
        if (!validate_frame(f, hero_vocab).ok()) {
            ++result.invalid_frames;
            continue;
        }
        result.frames.push_back(std::move(f));
    }
    return result;
}

inline LoadResult load_frames(const std::string& path, int hero_vocab = kDefaultHeroVocab) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open frame file: " + path);
    return load_frames(in, hero_vocab);
}

struct SplitSpec {
    std::size_t test_matches = 10;
    double val_fraction = 0.1;
    std::uint64_t seed = 0;
};

struct Split {
    std::vector<Frame> train;
    std::vector<Frame> val;
    std::vector<Frame> test;
};

// Partition by match_id so no game straddles splits. Deterministic for a
// fixed seed: match ids are shuffled in first-appearance order.
inline Split split_by_match(const std::vector<Frame>& frames, const SplitSpec& spec) {
    std::vector<std::string> ids;
    std::unordered_map<std::string, int> bucket;  // 0 train, 1 val, 2 test
    for (const Frame& f : frames) {
        if (bucket.emplace(f.match_id, 0).second) ids.push_back(f.match_id);
    }
    if (ids.size() < 3) throw DataError("split_by_match: need at least 3 distinct matches");
    if (spec.test_matches == 0 || spec.test_matches + 2 > ids.size())
        throw DataError("split_by_match: test_matches must leave room for train and val");
    if (!(spec.val_fraction > 0.0 && spec.val_fraction < 1.0))
        throw DataError("split_by_match: val_fraction must be in (0, 1)");

    Rng rng(spec.seed);
    rng.shuffle(ids);

    std::size_t remaining = ids.size() - spec.test_matches;
    std::size_t n_val = static_cast<std::size_t>(std::llround(spec.val_fraction * static_cast<double>(remaining)));
    n_val = std::clamp<std::size_t>(n_val, 1, remaining - 1);

    for (std::size_t i = 0; i < ids.size(); ++i) {
        int b = i < spec.test_matches ? 2 : (i < spec.test_matches + n_val ? 1 : 0);
        bucket[ids[i]] = b;
    }

    Split split;
    for (const Frame& f : frames) {
        switch (bucket[f.match_id]) {
            case 0: split.train.push_back(f); break;
            case 1: split.val.push_back(f); break;
            default: split.test.push_back(f); break;
        }
    }
    return split;
}

}  // namespace tsstn
