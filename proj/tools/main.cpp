// tsstn command-line interface: simulate | train | eval | predict | explain |
// export-weights. Exit codes: 0 ok, 2 usage, 3 data error, 4 model error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "tsstn/baselines.hpp"
#include "tsstn/core.hpp"
#include "tsstn/eval.hpp"
#include "tsstn/ingest.hpp"
#include "tsstn/model.hpp"
#include "tsstn/persist.hpp"
#include "tsstn/simgen.hpp"
#include "tsstn/train.hpp"

namespace {

using namespace tsstn;

std::array<double, kNumGroups> parse_signal_weights(const std::string& text) {
    std::array<double, kNumGroups> w{};
    std::map<std::string, int> names = {{"gold", kGold},   {"kill", kKill},       {"tower", kTower},
                                        {"wild", kWildResource}, {"soldier", kSoldier}, {"heroes", kHeroes}};
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw DataError("bad --signal entry (want name=value): " + item);
        std::string name = item.substr(0, eq);
        auto it = names.find(name);
        if (it == names.end()) throw DataError("unknown signal channel: " + name);
        w[it->second] = std::stod(item.substr(eq + 1));
    }
    return w;
}

std::vector<std::size_t> parse_dims(const std::string& text) {
    std::vector<std::size_t> dims;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) dims.push_back(std::stoul(item));
    return dims;
}

std::vector<Frame> load_data(const std::string& path, int hero_vocab) {
    LoadResult r = load_frames(path, hero_vocab);
    if (r.malformed_lines || r.invalid_frames) {
        std::cerr << "warning: skipped " << r.malformed_lines << " malformed line(s) and "
                  << r.invalid_frames << " invalid frame(s) in " << path << "\n";
    }
    if (r.frames.empty()) throw DataError("no valid frames in " + path);
    return r.frames;
}

int cmd_simulate(const SimConfig& cfg, const std::string& out_path,
                 const std::string& synergy_path) {
    SimResult result = generate_full(cfg);

    std::ofstream out(out_path);
    if (!out) throw DataError("cannot write frame file: " + out_path);
    for (const Frame& f : result.frames) out << frame_to_line(f) << "\n";
    out.close();

    if (!synergy_path.empty()) {
        std::ofstream syn(synergy_path);
        if (!syn) throw DataError("cannot write synergy dump: " + synergy_path);
        syn << result.synergy.to_json().dump(2) << "\n";
    }

    SimSummary sum = summarize(result.frames);
    std::printf("wrote %zu frames from %zu matches to %s\n", sum.n_frames, sum.n_matches,
                out_path.c_str());
    std::printf("blue win fraction: %.3f\n", sum.blue_win_fraction);
    return 0;
}

struct TrainArgs {
    std::string model = "tsstn";
    std::string data;
    std::string out;
    std::uint64_t seed = 0;
    TrainConfig train;
    SplitSpec split;
    int hero_vocab = kDefaultHeroVocab;
    std::string fc_dims = "128,256,64,16";
    bool paper_dims = false;
};

void print_report(const TrainReport& report) {
    for (std::size_t e = 0; e < report.epochs.size(); ++e) {
        const EpochStats& st = report.epochs[e];
        std::printf("epoch %2zu  train loss %.4f acc %.3f | val loss %.4f acc %.3f%s\n", e + 1,
                    st.train_loss, st.train_acc, st.val_loss, st.val_acc,
                    static_cast<int>(e) == report.best_epoch ? "  *" : "");
    }
    if (report.early_stopped) std::printf("early stop; restored epoch %d\n", report.best_epoch + 1);
}

int cmd_train(const TrainArgs& args) {
    std::vector<Frame> frames = load_data(args.data, args.hero_vocab);

    nlohmann::ordered_json meta;
    meta["seed"] = args.seed;
    meta["epochs"] = args.train.epochs;
    meta["batch_size"] = args.train.batch_size;
    meta["lr"] = args.train.lr;
    meta["threads"] = args.train.threads;
    meta["test_matches"] = args.split.test_matches;
    meta["val_fraction"] = args.split.val_fraction;

    if (args.model == "heuristic") {
        HeuristicModel m{args.seed};
        save_model(m, args.out, meta);
        std::printf("heuristic model written to %s\n", args.out.c_str());
        return 0;
    }

    SplitSpec split_spec = args.split;
    split_spec.seed = args.seed;
    Split split = split_by_match(frames, split_spec);
    std::printf("split: %zu train / %zu val / %zu test frames\n", split.train.size(),
                split.val.size(), split.test.size());

    NormStats stats = fit_norm_stats(split.train);
    TrainConfig tc = args.train;
    tc.seed = args.seed;

    SpatialConfig cfg;
    cfg.hero_vocab = args.hero_vocab;

    if (args.model == "tsstn") {
        TsstnModel model(cfg);
        model.stats = stats;
        Rng rng(derive_seed(args.seed, 0x1A17));
        model.init(rng);
        TrainReport report = train(model, split.train, split.val, tc);
        print_report(report);
        save_model(model, args.out, meta);
    } else if (args.model == "fc" || args.model == "lr") {
        std::vector<std::size_t> dims;
        if (args.model == "fc") {
            dims = args.paper_dims ? std::vector<std::size_t>(kFcPaperDims.begin(), kFcPaperDims.end())
                                   : parse_dims(args.fc_dims);
        }
        AllFeatureModel model(cfg, dims);
        model.stats = stats;
        Rng rng(derive_seed(args.seed, 0x1A17));
        model.init(rng);
        TrainReport report = baseline_train(model, split.train, split.val, tc);
        print_report(report);
        save_model(model, args.model == "fc" ? ModelKind::kFullyConnected : ModelKind::kLogisticAll,
                   args.out, meta);
    } else {
        throw DataError("unknown model kind: " + args.model);
    }
    std::printf("model written to %s\n", args.out.c_str());
    return 0;
}

int cmd_eval(const std::vector<std::string>& model_paths, const std::string& data_path,
             double grid_spacing, bool spatial, const std::string& tsv_path, int hero_vocab) {
    std::vector<Frame> frames = load_data(data_path, hero_vocab);

    std::vector<Artifact> artifacts;
    std::vector<std::pair<std::string, PredictBlueFn>> predictors;
    for (const std::string& path : model_paths) artifacts.push_back(load_model(path));
    for (std::size_t i = 0; i < artifacts.size(); ++i) {
        const Artifact& art = artifacts[i];
        std::string name = model_kind_name(art.kind);
        predictors.emplace_back(name, [&art](const Frame& f) { return artifact_predict_blue(art, f); });
    }
    if (spatial) {
        for (const Artifact& art : artifacts) {
            if (const auto* m = std::get_if<TsstnModel>(&art.model)) {
                for (auto& p : spatial_predictors(*m)) predictors.push_back(std::move(p));
                break;
            }
        }
    }

    EvalReport report = evaluate(predictors, frames, make_time_grid(grid_spacing));
    std::string tsv = eval_report_tsv(report);
    if (!tsv_path.empty()) {
        std::ofstream out(tsv_path);
        if (!out) throw DataError("cannot write report: " + tsv_path);
        out << tsv;
        std::printf("report table written to %s\n", tsv_path.c_str());
    } else {
        std::cout << tsv << "\n";
    }
    std::cout << eval_report_human(report);
    return 0;
}

std::vector<Frame> frames_for_inference(const std::string& data_path, const std::string& line,
                                        int hero_vocab) {
    if (!line.empty()) {
        Frame f = parse_frame_line(line);
        ValidationReport vr = validate_frame(f, hero_vocab);
        if (!vr.ok()) {
            std::string msg = "invalid frame:";
            for (const auto& v : vr.violations) msg += "\n  " + v;
            throw DataError(msg);
        }
        return {f};
    }
    return load_data(data_path, hero_vocab);
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& line, int top_k, bool comments_only) {
    Artifact art = load_model(model_path);
    const auto* model = std::get_if<TsstnModel>(&art.model);
    if (!model) throw ModelError("predict/explain need a tsstn artifact (got " +
                                 std::string(model_kind_name(art.kind)) + ")");
    int vocab = model->spatial.cfg.hero_vocab;
    for (const Frame& f : frames_for_inference(data_path, line, vocab)) {
        Explanation e = model->predict(group_features(f));
        if (comments_only) {
            std::cout << explain_text(e, top_k) << "\n";
        } else {
            std::cout << explanation_to_line(f.match_id, e, top_k) << "\n";
        }
    }
    return 0;
}

int cmd_export_weights(const std::string& model_path, const std::string& out_path,
                       const std::string& data_path) {
    Artifact art = load_model(model_path);
    const auto* model = std::get_if<TsstnModel>(&art.model);
    if (!model) throw ModelError("export-weights needs a tsstn artifact");

    std::optional<std::vector<Frame>> frames;
    if (!data_path.empty()) frames = load_data(data_path, model->spatial.cfg.hero_vocab);

    std::string table = weight_accuracy_table(*model, frames ? &*frames : nullptr);
    if (out_path.empty() || out_path == "-") {
        std::cout << table;
    } else {
        std::ofstream out(out_path);
        if (!out) throw DataError("cannot write weight table: " + out_path);
        out << table;
        std::printf("weight table written to %s\n", out_path.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-stage spatial-temporal win prediction for MOBA matches"};
    app.require_subcommand(1);

    // simulate
    SimConfig sim;
    std::string sim_out, sim_signal, sim_synergy;
    auto* simulate = app.add_subcommand("simulate", "generate a synthetic frame file");
    simulate->add_option("--n", sim.n_matches, "number of matches")->required();
    simulate->add_option("--seed", sim.seed, "master seed")->envname("TSSTN_SEED");
    simulate->add_option("--out", sim_out, "output frame file")->required();
    simulate->add_option("--signal", sim_signal, "per-group signal weights, e.g. gold=0.8,kill=0.2");
    simulate->add_option("--noise", sim.noise_scale, "noise scale");
    simulate->add_option("--mean-duration", sim.mean_duration_min, "mean match duration (minutes)");
    simulate->add_option("--hero-pool", sim.hero_pool, "hero id space");
    simulate->add_option("--synergy-scale", sim.synergy_scale, "hero synergy multiplier");
    simulate->add_option("--dump-synergy", sim_synergy, "write the hidden synergy table as JSON");

    // train
    TrainArgs ta;
    auto* train_cmd = app.add_subcommand("train", "train a model and save the artifact");
    train_cmd->add_option("--model", ta.model, "tsstn|fc|lr|heuristic")
        ->check(CLI::IsMember({"tsstn", "fc", "lr", "heuristic"}));
    train_cmd->add_option("--data", ta.data, "frame file")->required();
    train_cmd->add_option("--out", ta.out, "artifact path")->required();
    train_cmd->add_option("--seed", ta.seed, "training seed")->envname("TSSTN_SEED");
    train_cmd->add_option("--epochs", ta.train.epochs, "max epochs");
    train_cmd->add_option("--batch", ta.train.batch_size, "mini-batch size");
    train_cmd->add_option("--lr", ta.train.lr, "Adam learning rate");
    train_cmd->add_option("--patience", ta.train.patience, "early-stop patience (epochs)");
    train_cmd->add_option("--threads", ta.train.threads, "worker threads (part of the replay contract)");
    train_cmd->add_option("--test-matches", ta.split.test_matches, "matches held out as test");
    train_cmd->add_option("--val-fraction", ta.split.val_fraction, "validation fraction of non-test");
    train_cmd->add_option("--hero-vocab", ta.hero_vocab, "hero id space");
    train_cmd->add_option("--fc-dims", ta.fc_dims, "fc hidden dims (comma list)");
    train_cmd->add_flag("--paper-dims", ta.paper_dims, "use the full-size fc dims 1024,4096,512,64");

    // eval
    std::vector<std::string> eval_models;
    std::string eval_data, eval_tsv;
    double eval_grid = 2.5;
    bool eval_spatial = false;
    int eval_vocab = kDefaultHeroVocab;
    auto* eval_cmd = app.add_subcommand("eval", "accuracy by game time for one or more models");
    eval_cmd->add_option("--models", eval_models, "model artifacts")->required()->expected(-1);
    eval_cmd->add_option("--data", eval_data, "frame file with held-out matches")->required();
    eval_cmd->add_option("--grid", eval_grid, "grid spacing in minutes");
    eval_cmd->add_flag("--spatial", eval_spatial, "add per-spatial-model accuracy curves");
    eval_cmd->add_option("--tsv", eval_tsv, "write the delimited table here instead of stdout");
    eval_cmd->add_option("--hero-vocab", eval_vocab, "hero id space for frame validation");

    // predict / explain
    std::string pr_model, pr_data, pr_line;
    int pr_topk = 2;
    auto* predict_cmd = app.add_subcommand("predict", "explanation records for frames");
    predict_cmd->add_option("--model", pr_model, "tsstn artifact")->required();
    predict_cmd->add_option("--data", pr_data, "frame file");
    predict_cmd->add_option("--line", pr_line, "single frame record (JSON)");
    predict_cmd->add_option("--top-k", pr_topk, "groups named in the comment");

    std::string ex_model, ex_data, ex_line;
    int ex_topk = 2;
    auto* explain_cmd = app.add_subcommand("explain", "comment strings for frames");
    explain_cmd->add_option("--model", ex_model, "tsstn artifact")->required();
    explain_cmd->add_option("--data", ex_data, "frame file");
    explain_cmd->add_option("--line", ex_line, "single frame record (JSON)");
    explain_cmd->add_option("--top-k", ex_topk, "groups named in the comment");

    // export-weights
    std::string ew_model, ew_out, ew_data;
    auto* export_cmd = app.add_subcommand("export-weights", "importance-weight curves per time bin");
    export_cmd->add_option("--model", ew_model, "tsstn artifact")->required();
    export_cmd->add_option("--out", ew_out, "output table path ('-' for stdout)");
    export_cmd->add_option("--data", ew_data, "frames for per-spatial accuracy columns");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (simulate->parsed()) {
            if (!sim_signal.empty()) sim.signal_weights = parse_signal_weights(sim_signal);
            return cmd_simulate(sim, sim_out, sim_synergy);
        }
        if (train_cmd->parsed()) return cmd_train(ta);
        if (eval_cmd->parsed())
            return cmd_eval(eval_models, eval_data, eval_grid, eval_spatial, eval_tsv, eval_vocab);
        if (predict_cmd->parsed()) {
            if (pr_data.empty() == pr_line.empty())
                throw DataError("predict: give exactly one of --data or --line");
            return cmd_predict(pr_model, pr_data, pr_line, pr_topk, false);
        }
        if (explain_cmd->parsed()) {
            if (ex_data.empty() == ex_line.empty())
                throw DataError("explain: give exactly one of --data or --line");
            return cmd_predict(ex_model, ex_data, ex_line, ex_topk, true);
        }
        if (export_cmd->parsed()) return cmd_export_weights(ew_model, ew_out, ew_data);
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const ModelError& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
