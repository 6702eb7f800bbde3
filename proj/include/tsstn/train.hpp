#pragma once

#include <cmath>
#include <limits>
#include <numeric>
#include <thread>
#include <vector>

#include "tsstn/core.hpp"
#include "tsstn/ingest.hpp"
#include "tsstn/nnkit.hpp"
#include "tsstn/spatial.hpp"

namespace tsstn {

struct TrainConfig {
    int epochs = 10;
    std::size_t batch_size = 256;
    double lr = 1e-3;
    std::uint64_t seed = 0;
    int patience = 3;  // early stop after this many non-improving epochs on val loss
    int threads = 4;   // fixed default; chunk layout is part of the reproducibility contract
};

struct EpochStats {
    double train_loss = 0.0;
    double train_acc = 0.0;
    double val_loss = 0.0;
    double val_acc = 0.0;
};

struct TrainReport {
    std::vector<EpochStats> epochs;
    int best_epoch = -1;
    bool early_stopped = false;
};

struct Example {
    GroupedFeatures g;
    int y = 0;  // 1 = blue wins
};

inline std::vector<Example> make_examples(const std::vector<Frame>& frames) {
    std::vector<Example> out;
    out.reserve(frames.size());
    for (const Frame& f : frames) out.push_back(Example{group_features(f), f.blue_wins ? 1 : 0});
    return out;
}

struct StepResult {
    double loss = 0.0;
    int correct = 0;
};

namespace detail {

template <typename M>
EpochStats eval_metrics(const M& model, const std::vector<Example>& examples) {
    EpochStats st;
    double loss = 0.0;
    std::size_t correct = 0;
    for (const Example& ex : examples) {
        double p = model.predict_p(ex.g);
        loss += nn::bce_loss(p, ex.y).loss;
        correct += ((p > 0.5) == (ex.y == 1)) ? 1 : 0;
    }
    st.val_loss = loss / static_cast<double>(examples.size());
    st.val_acc = static_cast<double>(correct) / static_cast<double>(examples.size());
    return st;
}

}  // namespace detail

// Shuffled mini-batch training with Adam, early stopping on validation loss,
// and restoration of the best-epoch parameters.
//
// Reproducibility contract: per-example RNG streams are derived from
// (seed, epoch, position-in-epoch) only, thread buffers merge in fixed
// order, so a fixed (seed, threads) pair replays bit-identically.
template <typename M>
TrainReport train_model(M& model, const std::vector<Example>& train_set,
                        const std::vector<Example>& val_set, const TrainConfig& cfg) {
    if (train_set.empty() || val_set.empty()) throw DataError("train_model: empty train or val split");
    if (cfg.epochs <= 0 || cfg.batch_size == 0 || cfg.patience <= 0) {
        throw std::invalid_argument("train_model: epochs, batch_size and patience must be positive");
    }

    auto master_grads = model.make_grads();
    nn::Adam adam(nn::AdamConfig{cfg.lr, 0.9, 0.999, 1e-8});
    model.bind_adam(adam, master_grads);

    int n_threads = std::clamp(cfg.threads, 1, 64);
    std::vector<decltype(model.make_grads())> thread_grads;
    for (int t = 0; t < n_threads; ++t) thread_grads.push_back(model.make_grads());

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);

    TrainReport report;
    M best_model = model;
    double best_val = std::numeric_limits<double>::infinity();
    int stall = 0;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::uint64_t epoch_seed = derive_seed(cfg.seed, 0x45504F43ULL + static_cast<std::uint64_t>(epoch));
        Rng shuffle_rng(derive_seed(epoch_seed, 0));
        shuffle_rng.shuffle(order);

        double epoch_loss = 0.0;
        std::size_t epoch_correct = 0;

        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            std::size_t nb = std::min(cfg.batch_size, order.size() - start);
            std::size_t chunk = (nb + n_threads - 1) / n_threads;

            std::vector<double> losses(n_threads, 0.0);
            std::vector<std::size_t> corrects(n_threads, 0);
            auto worker = [&](int t) {
                zero_params(thread_grads[t]);
                std::size_t lo = std::min(nb, t * chunk);
                std::size_t hi = std::min(nb, lo + chunk);
                for (std::size_t k = lo; k < hi; ++k) {
                    const Example& ex = train_set[order[start + k]];
                    Rng ex_rng(derive_seed(epoch_seed, 1 + start + k));
                    StepResult r = model.accumulate(ex, ex_rng, thread_grads[t]);
                    losses[t] += r.loss;
                    corrects[t] += r.correct;
                }
            };
            if (n_threads == 1) {
                worker(0);
            } else {
                std::vector<std::thread> pool;
                for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker, t);
                for (auto& th : pool) th.join();
            }

            zero_params(master_grads);
            for (int t = 0; t < n_threads; ++t) add_params(master_grads, thread_grads[t]);
            scale_params(master_grads, 1.0 / static_cast<double>(nb));
            adam.step();

            for (int t = 0; t < n_threads; ++t) {
                epoch_loss += losses[t];
                epoch_correct += corrects[t];
            }
        }

        EpochStats st = detail::eval_metrics(model, val_set);
        st.train_loss = epoch_loss / static_cast<double>(train_set.size());
        st.train_acc = static_cast<double>(epoch_correct) / static_cast<double>(train_set.size());
        if (!std::isfinite(st.val_loss)) {
            throw ModelError("training diverged at epoch " + std::to_string(epoch) +
                             ": validation loss is not finite");
        }
        report.epochs.push_back(st);

        if (st.val_loss < best_val) {
            best_val = st.val_loss;
            best_model = model;
            report.best_epoch = epoch;
            stall = 0;
        } else if (++stall >= cfg.patience) {
            report.early_stopped = true;
            break;
        }
    }

    model = best_model;
    return report;
}

}  // namespace tsstn
