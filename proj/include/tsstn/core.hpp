#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace tsstn {

// Bad or unreadable input data. CLI maps this to exit code 3.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Broken model artifact or inconsistent model state. CLI maps this to exit code 4.
struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The six feature groups, in the fixed order used everywhere: win-score
// vectors, importance weights, contribution vectors, reports.
enum GroupId : int {
    kGold = 0,
    kKill = 1,
    kTower = 2,
    kWildResource = 3,
    kSoldier = 4,
    kHeroes = 5,
};
inline constexpr int kNumGroups = 6;

inline constexpr std::array<const char*, kNumGroups> kGroupNames = {
    "Gold", "Kill", "Tower", "Wild Resource", "Soldier", "Heroes"};

// Hero identifier space; id 0 is the out-of-vocabulary slot.
inline constexpr int kDefaultHeroVocab = 120;

inline constexpr int kMaxTowers = 9;
inline constexpr int kTeamSize = 5;
inline constexpr int kNumLanes = 3;

// Per-hero stats kept from the raw record. Not model inputs.
struct HeroDetail {
    int dead_cnt = 0;
    int assist_cnt = 0;
    int kill_cnt = 0;
    long long gold = 0;
};

// Extra per-team fields present in the raw data that we parse and keep but
// never feed to the model (tower sub-counts, participation, role flags).
struct TeamAux {
    std::optional<double> participation;
    std::optional<int> middle_towers;
    std::optional<int> crystal_towers;
    std::optional<int> overlord_buff;
    std::optional<int> dark_tyrant_buff;
    std::vector<HeroDetail> hero_details;  // empty or one entry per hero
};

struct TeamState {
    long long team_gold = 0;
    int kills = 0;
    int towers_total = kMaxTowers;
    int overlords = 0;
    int dark_tyrants = 0;
    int tyrants = 0;
    int red_buffs = 0;
    int blue_buffs = 0;
    std::vector<double> soldier_dist;  // top, middle, bottom lane; size 3 when valid
    std::vector<int> heroes;           // size 5 when valid
    TeamAux aux;
};

// One half-minute snapshot of a match. Blue is the reference team: the
// outcome label and every probability in the project are blue-referenced.
struct Frame {
    std::string match_id;
    double t_min = 0.0;
    TeamState blue;
    TeamState red;
    bool blue_wins = false;
};

// The six preprocessed feature-group inputs derived from one frame.
struct GroupedFeatures {
    double gold_diff = 0.0;   // blue - red
    double kill_diff = 0.0;
    double tower_diff = 0.0;
    std::array<int, 10> wild{};       // 5 objective counts, blue then red
    std::array<double, 6> soldier{};  // blue 3 lanes then red 3 lanes
    std::array<int, 10> heroes{};     // blue 5 then red 5
    double t_min = 0.0;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

namespace detail {

inline bool is_half_minute(double t) {
    double steps = t / 0.5;
    return std::abs(steps - std::round(steps)) < 1e-9;
}

inline void validate_team(const TeamState& team, const char* side, int hero_vocab,
                          ValidationReport& report) {
    auto add = [&](const std::string& msg) { report.violations.push_back(std::string(side) + ": " + msg); };

    if (team.team_gold < 0) add("team_gold is negative");
    if (team.kills < 0) add("kills is negative");
    if (team.towers_total < 0 || team.towers_total > kMaxTowers)
        add("towers_total outside [0, 9]");
    if (team.overlords < 0) add("overlords is negative");
    if (team.dark_tyrants < 0) add("dark_tyrants is negative");
    if (team.tyrants < 0) add("tyrants is negative");
    if (team.red_buffs < 0) add("red_buffs is negative");
    if (team.blue_buffs < 0) add("blue_buffs is negative");

    if (team.soldier_dist.size() != kNumLanes) {
        add("soldier_dist must have exactly 3 lane distances");
    } else {
        for (double d : team.soldier_dist) {
            if (!(d >= 0.0) || !std::isfinite(d)) {
                add("soldier_dist has a negative or non-finite value");
                break;
            }
        }
    }

    if (team.heroes.size() != kTeamSize) {
        add("team must have exactly 5 hero identifiers");
    } else {
        for (std::size_t i = 0; i < team.heroes.size(); ++i) {
            int h = team.heroes[i];
            if (h < 0 || h >= hero_vocab) {
                add("hero id " + std::to_string(h) + " outside [0, " + std::to_string(hero_vocab) + ")");
            }
            for (std::size_t j = i + 1; j < team.heroes.size(); ++j) {
                if (team.heroes[j] == h) {
                    add("duplicate hero id " + std::to_string(h));
                }
            }
        }
    }
}

}  // namespace detail

// Collects every violated invariant; never throws on bad content.
inline ValidationReport validate_frame(const Frame& f, int hero_vocab = kDefaultHeroVocab) {
    ValidationReport report;
    if (f.t_min < 0.0 || !std::isfinite(f.t_min)) {
        report.violations.push_back("t_min must be a non-negative finite value");
    } else if (!detail::is_half_minute(f.t_min)) {
        report.violations.push_back("t_min must be a multiple of 0.5 (half-minute frame cadence)");
    }
    detail::validate_team(f.blue, "blue", hero_vocab, report);
    detail::validate_team(f.red, "red", hero_vocab, report);
    return report;
}

// Blue-minus-red diffs for the scalar groups, blue-first concatenation for
// the categorical ones. Total and deterministic on valid frames.
inline GroupedFeatures group_features(const Frame& f) {
    if (f.blue.heroes.size() != kTeamSize || f.red.heroes.size() != kTeamSize ||
        f.blue.soldier_dist.size() != kNumLanes || f.red.soldier_dist.size() != kNumLanes) {
        throw std::invalid_argument("group_features requires a valid frame");
    }
    GroupedFeatures g;
    g.gold_diff = static_cast<double>(f.blue.team_gold - f.red.team_gold);
    g.kill_diff = static_cast<double>(f.blue.kills - f.red.kills);
    g.tower_diff = static_cast<double>(f.blue.towers_total - f.red.towers_total);
    g.wild = {f.blue.overlords, f.blue.dark_tyrants, f.blue.tyrants, f.blue.red_buffs,
              f.blue.blue_buffs, f.red.overlords,   f.red.dark_tyrants, f.red.tyrants,
              f.red.red_buffs,  f.red.blue_buffs};
    for (int lane = 0; lane < kNumLanes; ++lane) {
        g.soldier[lane] = f.blue.soldier_dist[lane];
        g.soldier[kNumLanes + lane] = f.red.soldier_dist[lane];
    }
    for (int i = 0; i < kTeamSize; ++i) {
        g.heroes[i] = f.blue.heroes[i];
        g.heroes[kTeamSize + i] = f.red.heroes[i];
    }
    g.t_min = f.t_min;
    return g;
}

inline Frame swap_teams(const Frame& f) {
    Frame s = f;
    std::swap(s.blue, s.red);
    s.blue_wins = !f.blue_wins;
    return s;
}

// ---------------------------------------------------------------------------
// Line-delimited frame file format. One JSON object per line; unknown extra
// fields are ignored on input.

namespace detail {

inline nlohmann::ordered_json team_to_json(const TeamState& t) {
    nlohmann::ordered_json j;
    j["team_gold"] = t.team_gold;
    j["kills"] = t.kills;
    j["towers_total"] = t.towers_total;
    j["overlords"] = t.overlords;
    j["dark_tyrants"] = t.dark_tyrants;
    j["tyrants"] = t.tyrants;
    j["red_buffs"] = t.red_buffs;
    j["blue_buffs"] = t.blue_buffs;
    j["soldier_dist"] = t.soldier_dist;
    j["heroes"] = t.heroes;
    if (t.aux.participation) j["participation"] = *t.aux.participation;
    if (t.aux.middle_towers) j["middle_towers"] = *t.aux.middle_towers;
    if (t.aux.crystal_towers) j["crystal_towers"] = *t.aux.crystal_towers;
    if (t.aux.overlord_buff) j["overlord_buff"] = *t.aux.overlord_buff;
    if (t.aux.dark_tyrant_buff) j["dark_tyrant_buff"] = *t.aux.dark_tyrant_buff;
    if (!t.aux.hero_details.empty()) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& h : t.aux.hero_details) {
            arr.push_back({{"dead_cnt", h.dead_cnt},
                           {"assist_cnt", h.assist_cnt},
                           {"kill_cnt", h.kill_cnt},
                           {"gold", h.gold}});
        }
        j["hero_details"] = arr;
    }
    return j;
}

inline TeamState team_from_json(const nlohmann::json& j) {
    TeamState t;
    t.team_gold = j.at("team_gold").get<long long>();
    t.kills = j.at("kills").get<int>();
    t.towers_total = j.at("towers_total").get<int>();
    t.overlords = j.at("overlords").get<int>();
    t.dark_tyrants = j.at("dark_tyrants").get<int>();
    t.tyrants = j.at("tyrants").get<int>();
    t.red_buffs = j.at("red_buffs").get<int>();
    t.blue_buffs = j.at("blue_buffs").get<int>();
    t.soldier_dist = j.at("soldier_dist").get<std::vector<double>>();
    t.heroes = j.at("heroes").get<std::vector<int>>();
    if (j.contains("participation")) t.aux.participation = j["participation"].get<double>();
    if (j.contains("middle_towers")) t.aux.middle_towers = j["middle_towers"].get<int>();
    if (j.contains("crystal_towers")) t.aux.crystal_towers = j["crystal_towers"].get<int>();
    if (j.contains("overlord_buff")) t.aux.overlord_buff = j["overlord_buff"].get<int>();
    if (j.contains("dark_tyrant_buff")) t.aux.dark_tyrant_buff = j["dark_tyrant_buff"].get<int>();
    if (j.contains("hero_details")) {
        for (const auto& hj : j["hero_details"]) {
            HeroDetail h;
            h.dead_cnt = hj.value("dead_cnt", 0);
            h.assist_cnt = hj.value("assist_cnt", 0);
            h.kill_cnt = hj.value("kill_cnt", 0);
            h.gold = hj.value("gold", 0LL);
            t.aux.hero_details.push_back(h);
        }
    }
    return t;
}

}  // namespace detail

inline std::string frame_to_line(const Frame& f) {
    nlohmann::ordered_json j;
    j["match_id"] = f.match_id;
    j["t_min"] = f.t_min;
    j["blue_wins"] = f.blue_wins;
    j["blue"] = detail::team_to_json(f.blue);
    j["red"] = detail::team_to_json(f.red);
    return j.dump();
}

// Throws DataError on anything that does not parse as a frame record.
inline Frame parse_frame_line(std::string_view line) {
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw DataError("malformed frame record: not a JSON object");
    }
    try {
        Frame f;
        f.match_id = j.at("match_id").get<std::string>();
        f.t_min = j.at("t_min").get<double>();
        f.blue_wins = j.at("blue_wins").get<bool>();
        f.blue = detail::team_from_json(j.at("blue"));
        f.red = detail::team_from_json(j.at("red"));
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed frame record: ") + e.what());
    }
}

}  // namespace tsstn
