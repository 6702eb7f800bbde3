// Acceptance suite. Runs every criterion at its stated tolerance and prints
// one pass/fail line per criterion on stdout; progress goes to stderr.
// Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tsstn/baselines.hpp"
#include "tsstn/eval.hpp"
#include "tsstn/ingest.hpp"
#include "tsstn/model.hpp"
#include "tsstn/persist.hpp"
#include "tsstn/simgen.hpp"
#include "tsstn/train.hpp"

using namespace tsstn;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

struct Checker {
    Outcome& out;
    void require(bool cond, const std::string& what) {
        if (!cond) {
            out.ok = false;
            out.detail += (out.detail.empty() ? "" : "; ") + what;
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void progress(const std::string& msg) { std::fprintf(stderr, "  .. %s\n", msg.c_str()); }

// ---------------------------------------------------------------------------

Outcome criterion1_paper_fixture() {
    Outcome out;
    Checker c{out};
    const WinScoreVector s = {0.590, 0.292, 0.612, 0.901, 0.611, 0.231};
    const ImportanceWeights w = {0.348, 0.184, 0.129, 0.101, 0.172, 0.065};
    const std::array<double, 6> expect_contrib = {0.205, 0.054, 0.079, 0.091, 0.105, 0.015};

    Explanation e = compose_explanation(s, w, 15.0);
    for (int i = 0; i < kNumGroups; ++i) {
        c.require(std::abs(e.groups[i].contribution - expect_contrib[i]) <= 0.001,
                  std::string("contribution ") + kGroupNames[i]);
    }
    double sum = 0.0;
    for (const auto& g : e.groups) sum += g.contribution;
    c.require(std::abs(sum - e.F) <= 1e-9, "sum of contributions != F");
    c.require(std::abs(e.p_blue - 0.774) <= 0.001, "p_blue outside 0.774 +/- 0.001");
    char buf[64];
    std::snprintf(buf, sizeof(buf), "F=%.4f p_blue=%.4f", e.F, e.p_blue);
    if (out.ok) out.detail = buf;
    return out;
}

Outcome criterion2_weight_invariants() {
    Outcome out;
    Checker c{out};
    Rng rng(20240521);
    for (int trial = 0; trial < 1000 && out.ok; ++trial) {
        TemporalWeights tw;
        for (double& v : tw.theta.a) v = rng.uniform(-12.0, 12.0);
        for (int bin = 0; bin < kNumTimeBins; ++bin) {
            ImportanceWeights w = tw.weights_for_bin(bin);
            double sum = 0.0;
            for (double v : w) {
                c.require(v >= 0.0, "negative weight");
                sum += v;
            }
            c.require(std::abs(sum - 1.0) <= 1e-12, "weights do not sum to 1 within 1e-12");
        }
    }
    for (int trial = 0; trial < 100 && out.ok; ++trial) {
        TemporalWeights tw;
        for (double& v : tw.theta.a) v = rng.uniform(-8.0, 8.0);
        int bin = static_cast<int>(rng.uniform_int(kNumTimeBins));
        double shift = rng.uniform(-8.0, 8.0);
        ImportanceWeights before = tw.weights_for_bin(bin);
        for (int i = 0; i < kNumGroups; ++i) tw.theta(bin, i) += shift;
        ImportanceWeights after = tw.weights_for_bin(bin);
        for (int i = 0; i < kNumGroups; ++i) {
            c.require(std::abs(after[i] - before[i]) <= 1e-12, "shift changed a weight");
        }
        c.require(std::max_element(before.begin(), before.end()) - before.begin() ==
                      std::max_element(after.begin(), after.end()) - after.begin(),
                  "shift changed the argmax");
    }
    if (out.ok) out.detail = "1000 matrices, 100 shifts";
    return out;
}

Outcome criterion3_gradient_correctness() {
    Outcome out;
    Checker c{out};

    SpatialConfig cfg;
    cfg.hero_vocab = 50;
    cfg.dropout_rate = 0.0;  // dropout disabled for the check
    TsstnModel model(cfg);
    Rng init(0xC3);
    model.init(init);

    SimConfig sim;
    sim.n_matches = 12;
    sim.seed = 33;
    sim.hero_pool = 50;
    auto frames = generate(sim);
    model.stats = fit_norm_stats(frames);

    std::vector<Example> batch;
    for (std::size_t i = 0; i < frames.size() && batch.size() < 8; i += 17) {
        batch.push_back(Example{group_features(frames[i]), frames[i].blue_wins ? 1 : 0});
    }

    auto batch_loss = [&](TsstnModel& m) {
        double loss = 0.0;
        for (const Example& ex : batch) loss += nn::bce_loss(m.predict_p(ex.g), ex.y).loss;
        return loss / batch.size();
    };

    auto grads = model.make_grads();
    Rng rng(0);
    for (const Example& ex : batch) model.accumulate(ex, rng, grads);
    scale_params(grads, 1.0 / batch.size());

    // flat views with names, so sampling can span every block
    struct Block {
        std::string name;
        nn::Tensor1* p;
        nn::Tensor1* g;
    };
    std::vector<Block> blocks;
    {
        std::vector<std::pair<std::string, nn::Tensor1*>> pv, gv;
        model.for_each_param("", [&](const std::string& n, nn::Tensor1& v,
                                     const std::vector<std::size_t>&) { pv.emplace_back(n, &v); });
        grads.for_each_param("", [&](const std::string& n, nn::Tensor1& v,
                                     const std::vector<std::size_t>&) { gv.emplace_back(n, &v); });
        for (std::size_t i = 0; i < pv.size(); ++i)
            blocks.push_back(Block{pv[i].first, pv[i].second, gv[i].second});
    }

    Rng pick(0xF1);
    const double h = 1e-6;
    int checked = 0, failed = 0;
    double worst = 0.0;
    for (const Block& b : blocks) {
        // coordinates per block: exhaustive for tiny blocks, sampled otherwise
        std::vector<std::size_t> coords;
        if (b.p->size() <= 4) {
            for (std::size_t i = 0; i < b.p->size(); ++i) coords.push_back(i);
        } else {
            for (int k = 0; k < 3; ++k) coords.push_back(pick.uniform_int(b.p->size()));
        }
        for (std::size_t i : coords) {
            double saved = (*b.p)[i];
            (*b.p)[i] = saved + h;
            double lp = batch_loss(model);
            (*b.p)[i] = saved - h;
            double lm = batch_loss(model);
            (*b.p)[i] = saved;
            double numeric = (lp - lm) / (2 * h);
            double analytic = (*b.g)[i];
            double diff = std::abs(analytic - numeric);
            double rel = diff / std::max({std::abs(analytic), std::abs(numeric), 1e-30});
            if (diff > 1e-9 && rel > 1e-4) {
                ++failed;
                if (rel > worst) worst = rel;
                if (failed <= 3) {
                    c.require(false, b.name + "[" + std::to_string(i) + "] rel " + std::to_string(rel));
                }
            }
            ++checked;
        }
    }
    c.require(checked >= 100, "fewer than 100 parameters sampled");
    c.require(failed == 0, std::to_string(failed) + " gradient mismatches");
    if (out.ok) out.detail = std::to_string(checked) + " parameters checked";
    return out;
}

// shared between criteria 4 and 6
struct RecoverabilityA {
    std::vector<Frame> test_frames;
    std::vector<Example> train_ex, val_ex;
    NormStats stats;
    TsstnModel tsstn{SpatialConfig{}};
    bool trained = false;
};

SimConfig recoverability_a_config() {
    SimConfig sim;
    sim.n_matches = 20000;
    sim.seed = 0xA11CE;
    sim.signal_weights = {0.8, 0.05, 0.05, 0.03, 0.05, 0.02};
    sim.noise_scale = 0.4;
    return sim;
}

TrainConfig recoverability_train_config(std::uint64_t seed) {
    TrainConfig tc;
    tc.epochs = 6;  // well under the 10-epoch budget
    tc.batch_size = 256;
    tc.lr = 1e-3;
    tc.seed = seed;
    tc.patience = 3;
    tc.threads = 4;
    return tc;
}

void build_dataset(const SimConfig& sim, RecoverabilityA& data) {
    auto frames = generate(sim);
    progress("generated " + std::to_string(frames.size()) + " frames");
    Split split = split_by_match(frames, SplitSpec{4000, 0.1, 99});
    frames.clear();
    frames.shrink_to_fit();
    data.stats = fit_norm_stats(split.train);
    data.train_ex = make_examples(split.train);
    split.train.clear();
    split.train.shrink_to_fit();
    data.val_ex = make_examples(split.val);
    split.val.clear();
    data.test_frames = std::move(split.test);
}

Outcome criterion4_recoverability_gold(RecoverabilityA& data) {
    Outcome out;
    Checker c{out};

    build_dataset(recoverability_a_config(), data);

    SpatialConfig cfg;
    TsstnModel model(cfg);
    model.stats = data.stats;
    Rng init(derive_seed(7, 0x1A17));
    model.init(init);
    TrainConfig tc = recoverability_train_config(7);
    TrainReport report = train_model(model, data.train_ex, data.val_ex, tc);
    progress("tsstn trained, " + std::to_string(report.epochs.size()) + " epochs, val acc " +
             std::to_string(report.epochs[report.best_epoch].val_acc));
    data.tsstn = model;
    data.trained = true;

    auto predictor = [&model](const Frame& f) { return model.predict_binary(group_features(f)); };
    EvalReport er = evaluate({{"tsstn", predictor}}, data.test_frames);
    double acc10 = 0.0;
    for (std::size_t pt = 0; pt < er.grid.size(); ++pt) {
        if (er.grid[pt] == 10.0) acc10 = er.models[0].accuracy[pt];
    }
    c.require(acc10 >= 0.80, "accuracy at 10 min " + std::to_string(acc10) + " < 0.80");

    bool gold_dominates = true;
    for (int bin = 8; bin <= 24; ++bin) {  // 4.0 .. 12.0 minutes
        ImportanceWeights w = model.temporal.weights_for_bin(bin);
        int argmax = static_cast<int>(std::max_element(w.begin(), w.end()) - w.begin());
        if (argmax != kGold) {
            gold_dominates = false;
            c.require(false, "w_gold not largest in bin " + std::to_string(bin));
            break;
        }
    }

    if (out.ok && gold_dominates) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "acc@10min=%.3f, w_gold largest in bins 8..24", acc10);
        out.detail = buf;
    }
    return out;
}

Outcome criterion5_recoverability_heroes() {
    Outcome out;
    Checker c{out};

    SimConfig sim;
    sim.n_matches = 20000;
    sim.seed = 0xB0B;
    sim.signal_weights = {0.02, 0.02, 0.02, 0.01, 0.02, 0.91};
    sim.noise_scale = 0.4;
    sim.synergy_scale = 1.0;

    RecoverabilityA data;
    build_dataset(sim, data);

    SpatialConfig cfg;
    TsstnModel model(cfg);
    model.stats = data.stats;
    Rng init(derive_seed(13, 0x1A17));
    model.init(init);
    TrainConfig tc = recoverability_train_config(13);
    TrainReport report = train_model(model, data.train_ex, data.val_ex, tc);
    progress("tsstn trained, " + std::to_string(report.epochs.size()) + " epochs, val acc " +
             std::to_string(report.epochs[report.best_epoch].val_acc));

    ImportanceWeights w0 = model.temporal.weights_for_bin(0);
    int argmax = static_cast<int>(std::max_element(w0.begin(), w0.end()) - w0.begin());
    c.require(argmax == kHeroes, "w_heroes not largest at bin 0 (argmax " +
                                     std::string(kGroupNames[argmax]) + ")");

    // spatial-model accuracies on the opening frames only
    std::vector<Frame> opening;
    for (const Frame& f : data.test_frames)
        if (f.t_min == 0.0) opening.push_back(f);
    EvalReport er = evaluate(spatial_predictors(model), opening, {0.0});

    double heroes_acc = 0.0;
    char buf[160];
    for (const ModelCurve& curve : er.models) {
        double acc = curve.accuracy[0];
        if (curve.name == kGroupNames[kHeroes]) {
            heroes_acc = acc;
            c.require(acc > 0.55, "heroes spatial accuracy at t=0 is " + std::to_string(acc));
        }
        if (curve.name == kGroupNames[kGold] || curve.name == kGroupNames[kKill] ||
            curve.name == kGroupNames[kTower]) {
            c.require(std::abs(acc - 0.5) <= 0.02,
                      curve.name + " accuracy at t=0 is " + std::to_string(acc) + ", outside 50 +/- 2");
        }
    }
    if (out.ok) {
        std::snprintf(buf, sizeof(buf), "w_heroes[bin0]=%.3f largest, heroes acc@0=%.3f", w0[kHeroes],
                      heroes_acc);
        out.detail = buf;
    }
    return out;
}

Outcome criterion6_baseline_ordering(RecoverabilityA& data) {
    Outcome out;
    Checker c{out};
    if (!data.trained) {
        out.ok = false;
        out.detail = "skipped: recoverability-A training unavailable";
        return out;
    }

    SpatialConfig cfg;
    AllFeatureModel fc = make_fc_model(cfg);  // desk-scale dims 128,256,64,16
    fc.stats = data.stats;
    Rng init(derive_seed(21, 0x1A17));
    fc.init(init);
    TrainConfig tc = recoverability_train_config(21);
    TrainReport report = train_model(fc, data.train_ex, data.val_ex, tc);
    progress("fc trained, " + std::to_string(report.epochs.size()) + " epochs, val acc " +
             std::to_string(report.epochs[report.best_epoch].val_acc));

    HeuristicModel heuristic{7};
    const TsstnModel& tsstn = data.tsstn;
    std::vector<std::pair<std::string, PredictBlueFn>> predictors = {
        {"tsstn", [&tsstn](const Frame& f) { return tsstn.predict_binary(group_features(f)); }},
        {"heuristic", [&heuristic](const Frame& f) { return heuristic.predict_blue(f); }},
        {"fc", [&fc](const Frame& f) { return fc.predict_binary(group_features(f)); }},
    };
    EvalReport er = evaluate(predictors, data.test_frames);

    std::string summary;
    for (double checkpoint : {0.0, 5.0, 10.0, 15.0, 20.0}) {
        double tsstn_acc = 0, heur_acc = 0, fc_acc = 0;
        for (std::size_t pt = 0; pt < er.grid.size(); ++pt) {
            if (er.grid[pt] != checkpoint) continue;
            tsstn_acc = er.models[0].accuracy[pt];
            heur_acc = er.models[1].accuracy[pt];
            fc_acc = er.models[2].accuracy[pt];
        }
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%.0fmin t=%.3f h=%.3f fc=%.3f ", checkpoint, tsstn_acc,
                      heur_acc, fc_acc);
        summary += buf;
        c.require(tsstn_acc >= heur_acc - 0.01,
                  "tsstn below heuristic-1pt at " + std::to_string(checkpoint) + " min");
        c.require(std::abs(fc_acc - tsstn_acc) <= 0.03,
                  "fc more than 3 points from tsstn at " + std::to_string(checkpoint) + " min");
    }
    progress(summary);
    if (out.ok) out.detail = summary;
    return out;
}

Outcome criterion7_independence_and_interpretability() {
    Outcome out;
    Checker c{out};

    SpatialConfig cfg;
    cfg.hero_vocab = 60;
    TsstnModel model(cfg);
    Rng init(0xD7);
    model.init(init);
    for (double& v : model.temporal.theta.a) v = init.uniform(-1.0, 1.0);

    NormStats stats;
    stats.gold_diff = {-10000.0, 10000.0};
    stats.kill_diff = {-20.0, 20.0};
    stats.tower_diff = {-9.0, 9.0};
    for (auto& mm : stats.soldier) mm = {0.0, 10000.0};
    stats.t_min = {0.0, 20.0};
    stats.fitted = true;
    model.stats = stats;

    Rng rng(0x7777);
    for (int trial = 0; trial < 1000 && out.ok; ++trial) {
        // random frame
        GroupedFeatures g{};
        g.gold_diff = rng.uniform(-9000, 9000);
        g.kill_diff = rng.uniform(-18, 18);
        g.tower_diff = static_cast<double>(static_cast<int>(rng.uniform_int(19)) - 9);
        for (int i = 0; i < 10; ++i) g.wild[i] = static_cast<int>(rng.uniform_int(12));
        for (int i = 0; i < 6; ++i) g.soldier[i] = rng.uniform(0, 10000);
        std::vector<int> ids;
        while (ids.size() < 10) {
            int h = 1 + static_cast<int>(rng.uniform_int(59));
            bool dup = false;
            for (int v : ids) dup |= v == h;
            if (!dup) ids.push_back(h);
        }
        for (int i = 0; i < 10; ++i) g.heroes[i] = ids[i];
        g.t_min = 0.5 * static_cast<double>(rng.uniform_int(45));

        WinScoreVector base = model.win_scores(g);

        // perturb each group in turn; only that group's score may move
        for (int group = 0; group < kNumGroups && out.ok; ++group) {
            GroupedFeatures p = g;
            switch (group) {
                case kGold: p.gold_diff += 515.0; break;
                case kKill: p.kill_diff += 3.0; break;
                case kTower: p.tower_diff += 2.0; break;
                case kWildResource: p.wild[1] += 2; break;
                case kSoldier: p.soldier[2] += 700.0; break;
                case kHeroes: p.heroes[3] = (p.heroes[3] % 58) + 1 == p.heroes[3] ? 59 : (p.heroes[3] % 58) + 1; break;
            }
            WinScoreVector s = model.win_scores(p);
            for (int i = 0; i < kNumGroups; ++i) {
                if (i == group) continue;
                c.require(s[i] == base[i], std::string("perturbing ") + kGroupNames[group] +
                                               " changed " + kGroupNames[i]);
            }
        }

        // hero-order permutation invariance
        GroupedFeatures shuffled = g;
        for (int half = 0; half < 2; ++half) {
            for (int i = 4; i > 0; --i) {
                int j = static_cast<int>(rng.uniform_int(i + 1));
                std::swap(shuffled.heroes[half * 5 + i], shuffled.heroes[half * 5 + j]);
            }
        }
        c.require(model.win_scores(shuffled)[kHeroes] == base[kHeroes],
                  "hero order changed the Heroes win-score");

        // contribution additivity and ranking consistency
        Explanation e = model.predict(g);
        double sum = 0.0;
        for (const auto& ge : e.groups) sum += ge.contribution;
        c.require(std::abs(sum - e.F) <= 1e-9, "contributions do not sum to F");
        for (int r = 1; r < kNumGroups; ++r) {
            c.require(std::abs(e.groups[e.ranking[r - 1]].contribution) >=
                          std::abs(e.groups[e.ranking[r]].contribution),
                      "ranking not sorted by |contribution|");
        }
    }
    if (out.ok) out.detail = "1000 randomized frames";
    return out;
}

Outcome criterion8_determinism_and_persistence() {
    Outcome out;
    Checker c{out};

    SimConfig sim;
    sim.n_matches = 400;
    sim.seed = 88;
    sim.signal_weights = {0.5, 0.1, 0.1, 0.1, 0.1, 0.1};
    auto frames = generate(sim);
    Split split = split_by_match(frames, SplitSpec{60, 0.1, 5});
    NormStats stats = fit_norm_stats(split.train);
    auto train_ex = make_examples(split.train);
    auto val_ex = make_examples(split.val);

    auto run_training = [&]() {
        SpatialConfig cfg;
        TsstnModel model(cfg);
        model.stats = stats;
        Rng init(derive_seed(31, 0x1A17));
        model.init(init);
        TrainConfig tc;
        tc.epochs = 3;
        tc.seed = 31;
        tc.threads = 4;
        train_model(model, train_ex, val_ex, tc);
        return model;
    };

    TsstnModel m1 = run_training();
    TsstnModel m2 = run_training();
    progress("two seeded trainings complete");

    std::string p1 = (fs::temp_directory_path() / "acc_det1.bin").string();
    std::string p2 = (fs::temp_directory_path() / "acc_det2.bin").string();
    save_model(m1, p1);
    save_model(m2, p2);
    auto read_bytes = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    };
    std::string b1 = read_bytes(p1);
    c.require(!b1.empty() && b1 == read_bytes(p2), "seeded runs gave different artifacts");

    // save/load round trip: bit-identical predictions on 10k frames
    SimConfig big;
    big.n_matches = 350;
    big.seed = 89;
    auto pred_frames = generate(big);
    c.require(pred_frames.size() >= 10000, "prediction set smaller than 10k frames");
    pred_frames.resize(10000);

    Artifact art = load_model(p1);
    const auto& loaded = std::get<TsstnModel>(art.model);
    bool identical = true;
    for (const Frame& f : pred_frames) {
        GroupedFeatures g = group_features(f);
        Explanation a = m1.predict(g);
        Explanation b = loaded.predict(g);
        if (a.F != b.F || a.p_blue != b.p_blue) {
            identical = false;
            break;
        }
        for (int i = 0; i < kNumGroups; ++i) {
            if (a.groups[i].win_score != b.groups[i].win_score ||
                a.groups[i].weight != b.groups[i].weight) {
                identical = false;
                break;
            }
        }
        if (!identical) break;
    }
    c.require(identical, "loaded model predictions differ from the trained model");
    fs::remove(p1);
    fs::remove(p2);
    if (out.ok) out.detail = "bit-identical artifacts; 10000 frames round-trip clean";
    return out;
}

// Trained-model spot checks that ride along with the recoverability run; they
// gate the exit code but are reported on stderr, not as criterion lines.
bool supplemental_checks(const RecoverabilityA& data) {
    if (!data.trained) return false;
    bool ok = true;
    const TsstnModel& model = data.tsstn;

    // trained Gold model: sign agreement with clear gold leads
    std::size_t n = 0, agree = 0;
    for (const Frame& f : data.test_frames) {
        GroupedFeatures g = group_features(f);
        double centered = 2.0 * normalize(g.gold_diff, model.stats.gold_diff) - 1.0;
        if (std::abs(centered) <= 0.2 || g.gold_diff == 0.0) continue;
        ++n;
        double s0 = model.win_scores(g)[kGold];
        if ((s0 > 0.0) == (g.gold_diff > 0.0)) ++agree;
    }
    double frac = n ? static_cast<double>(agree) / n : 0.0;
    std::fprintf(stderr, "  .. supplemental: gold sign agreement %.4f on %zu frames %s\n", frac, n,
                 frac >= 0.95 ? "(ok)" : "(FAIL)");
    ok &= frac >= 0.95;

    // WildResource spatial model before 8 minutes: features are all zero, so
    // accuracy collapses to the label balance
    std::vector<Frame> early;
    for (const Frame& f : data.test_frames)
        if (f.t_min < 8.0) early.push_back(f);
    std::size_t correct = 0;
    for (const Frame& f : early) {
        GroupedFeatures g = group_features(f);
        double s = model.win_scores(g)[kWildResource];
        bool blue = s > 0.0 || (s == 0.0 && seeded_tie_coin(model.tie_seed ^ 3ULL, g));
        if (blue == f.blue_wins) ++correct;
    }
    double wild_acc = early.empty() ? 0.0 : static_cast<double>(correct) / early.size();
    std::fprintf(stderr, "  .. supplemental: wild accuracy before 8 min %.4f on %zu frames %s\n",
                 wild_acc, early.size(), std::abs(wild_acc - 0.5) <= 0.03 ? "(ok)" : "(FAIL)");
    ok &= std::abs(wild_acc - 0.5) <= 0.03;
    return ok;
}

}  // namespace

int main() {
    struct Entry {
        const char* name;
        Outcome outcome;
        double seconds = 0.0;
    };
    std::vector<Entry> entries = {
        {"paper fixture reproduction", {}, 0},
        {"importance-weight invariant suite", {}, 0},
        {"gradient correctness", {}, 0},
        {"recoverability A (gold signal)", {}, 0},
        {"recoverability B (heroes pregame signal)", {}, 0},
        {"baseline ordering", {}, 0},
        {"independence and interpretability invariants", {}, 0},
        {"determinism and persistence", {}, 0},
    };

    RecoverabilityA shared;
    bool supplemental_ok = true;

    auto run = [&](int idx, auto&& fn) {
        std::fprintf(stderr, "criterion %d: %s\n", idx + 1, entries[idx].name);
        auto t0 = std::chrono::steady_clock::now();
        try {
            entries[idx].outcome = fn();
        } catch (const std::exception& e) {
            entries[idx].outcome.ok = false;
            entries[idx].outcome.detail = std::string("exception: ") + e.what();
        }
        entries[idx].seconds = seconds_since(t0);
    };

    run(0, criterion1_paper_fixture);
    run(1, criterion2_weight_invariants);
    run(2, criterion3_gradient_correctness);
    run(3, [&] { return criterion4_recoverability_gold(shared); });
    run(5, [&] { return criterion6_baseline_ordering(shared); });
    supplemental_ok = supplemental_checks(shared);
    // release the A dataset before building B
    shared.train_ex.clear();
    shared.train_ex.shrink_to_fit();
    shared.val_ex.clear();
    shared.val_ex.shrink_to_fit();
    run(4, criterion5_recoverability_heroes);
    run(6, criterion7_independence_and_interpretability);
    run(7, criterion8_determinism_and_persistence);

    bool all_ok = supplemental_ok;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const Entry& e = entries[i];
        all_ok &= e.outcome.ok;
        std::printf("[%s] %zu. %s (%.1fs)%s%s\n", e.outcome.ok ? "PASS" : "FAIL", i + 1, e.name,
                    e.seconds, e.outcome.detail.empty() ? "" : " — ", e.outcome.detail.c_str());
    }
    if (!supplemental_ok) std::printf("supplemental trained-model checks failed (see stderr)\n");
    return all_ok ? 0 : 1;
}
