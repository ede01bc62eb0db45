#pragma once

#include "thermadet/dataset.hpp"
#include "thermadet/model.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <thread>

namespace thermadet::train {

using nn::Mat;
using nn::Vec;

struct TrainConfig {
    double learning_rate = 1e-3;
    int batch_size = 32;
    int max_epochs = 200;
    int patience = 4;  // epochs without val-loss improvement before stopping
    uint64_t seed = 0;
    double grad_clip = 5.0;  // global norm; <= 0 disables
    int threads = 0;         // 0 = hardware concurrency
    int chunk_size = 4;      // windows per deterministic reduction chunk

    void validate() const {
        if (patience < 1) throw std::invalid_argument("TrainConfig: patience must be >= 1");
        if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
        if (max_epochs < 1) throw std::invalid_argument("TrainConfig: max_epochs must be >= 1");
    }
};

struct EpochEntry {
    int epoch = 0;  // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;
    double seconds = 0.0;
    bool is_best = false;
};

struct TrainLog {
    std::vector<EpochEntry> epochs;
    int best_epoch = 0;  // 1-based
    double best_val_loss = 0.0;
};

// Stop once the validation loss has not improved for `patience` epochs.
class EarlyStopper {
  public:
    explicit EarlyStopper(int patience) : patience_(patience) {
        if (patience < 1) throw std::invalid_argument("EarlyStopper: patience must be >= 1");
    }

    // Feed one epoch's validation loss; returns true if it is a new best.
    bool observe(double val_loss) {
        ++epoch_;
        if (epoch_ == 1 || val_loss < best_loss_) {
            best_loss_ = val_loss;
            best_epoch_ = epoch_;
            stale_ = 0;
            return true;
        }
        ++stale_;
        return false;
    }

    bool should_stop() const { return stale_ >= patience_; }
    int best_epoch() const { return best_epoch_; }
    double best_loss() const { return best_loss_; }

  private:
    int patience_;
    int epoch_ = 0;
    int stale_ = 0;
    int best_epoch_ = 0;
    double best_loss_ = 0.0;
};

// Adam with bias correction; state mirrors the parameter store.
template <typename S>
struct Adam {
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    nn::TensorStore<S> m, v;
    long step_count = 0;

    explicit Adam(const nn::TensorStore<S>& params) : m(params.zeros_like()), v(params.zeros_like()) {}

    void step(nn::TensorStore<S>& params, const nn::TensorStore<S>& grads, double lr) {
        ++step_count;
        const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step_count));
        const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step_count));
        const double scale = lr * std::sqrt(bc2) / bc1;
        for (size_t i = 0; i < params.tensors.size(); ++i) {
            auto& mi = m.tensors[i];
            auto& vi = v.tensors[i];
            const auto& g = grads.tensors[i];
            mi = (S(beta1) * mi + S(1.0 - beta1) * g).eval();
            vi = (S(beta2) * vi.array() + S(1.0 - beta2) * g.array().square()).matrix().eval();
            params.tensors[i].array() -=
                S(scale) * mi.array() / (vi.array().sqrt() + S(eps));
        }
    }
};

// A training window: frames plus shared per-sequence condition encodings.
template <typename S>
struct TrainWindow {
    Mat<S> frames;  // (T, pixels)
    const Mat<S>* cond_map = nullptr;
    const Vec<S>* cond_vec = nullptr;
    std::string parent_id;
    int start = 0;
};

// Runs `fn(chunk_index, begin, end)` over [0, n) in fixed chunks. Chunk
// boundaries do not depend on the thread count, so per-chunk results can be
// reduced in chunk order for bit-identical output on any machine load.
template <typename Fn>
void for_each_chunk(int n, int chunk_size, int threads, Fn&& fn) {
    const int n_chunks = (n + chunk_size - 1) / chunk_size;
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, n_chunks));

    if (threads == 1) {
        for (int ci = 0; ci < n_chunks; ++ci) fn(ci, ci * chunk_size, std::min(n, (ci + 1) * chunk_size));
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (int ci = next.fetch_add(1); ci < n_chunks; ci = next.fetch_add(1))
                fn(ci, ci * chunk_size, std::min(n, (ci + 1) * chunk_size));
        });
    for (auto& t : pool) t.join();
}

namespace detail {

template <typename S>
Mat<S> draw_noise(int rows, int cols, Rng& rng) {
    Mat<S> eps(rows, cols);
    for (Eigen::Index j = 0; j < eps.size(); ++j) eps.data()[j] = static_cast<S>(rng.normal());
    return eps;
}

template <typename S>
void check_guard(const std::vector<TrainWindow<S>>& windows, const data::SplitAssignment* guard,
                 const char* which) {
    if (!guard) return;
    for (const auto& w : windows) {
        const auto it = guard->find(w.parent_id);
        if (it != guard->end() && it->second == data::Split::Test)
            throw std::logic_error(std::string("train: ") + which + " windows include test-split sequence " +
                                   w.parent_id);
    }
}

}  // namespace detail

// Mean validation loss with the latent at its posterior mean (z = mu), so the
// early-stopping signal is deterministic.
template <typename S>
double validate(const model::SeqVae<S>& m, const std::vector<TrainWindow<S>>& val_windows,
                const TrainConfig& cfg) {
    if (val_windows.empty()) throw std::invalid_argument("validate: empty validation set");
    const int n = static_cast<int>(val_windows.size());
    const int n_chunks = (n + cfg.chunk_size - 1) / cfg.chunk_size;
    std::vector<double> partial(n_chunks, 0.0);
    for_each_chunk(n, cfg.chunk_size, cfg.threads, [&](int ci, int begin, int end) {
        typename model::SeqVae<S>::Forward fw;
        double acc = 0.0;
        for (int i = begin; i < end; ++i) {
            const auto& w = val_windows[i];
            m.forward(w.frames, *w.cond_map, *w.cond_vec, nullptr, fw);
            acc += m.total_loss(w.frames, fw).total;
        }
        partial[ci] = acc;
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total / n;
}

// Adam training with validation-based early stopping. Deterministic given the
// config seed: shuffles and reparameterization noise are derived from it, and
// gradient reduction order is fixed. Returns the log; the model is left at
// the best-validation-loss parameters.
template <typename S>
TrainLog train(model::SeqVae<S>& m, const std::vector<TrainWindow<S>>& train_windows,
               const std::vector<TrainWindow<S>>& val_windows, const TrainConfig& cfg,
               const data::SplitAssignment* guard = nullptr) {
    cfg.validate();
    if (train_windows.empty()) throw std::invalid_argument("train: empty training set");
    detail::check_guard(train_windows, guard, "train");
    detail::check_guard(val_windows, guard, "val");

    const int n = static_cast<int>(train_windows.size());
    const int latent = m.config().latent_dim;
    const bool stochastic = m.config().has_latent_variance();

    Adam<S> adam(m.params());
    EarlyStopper stopper(cfg.patience);
    nn::TensorStore<S> best_params = m.params();
    TrainLog log;

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;

    const int max_chunks = (cfg.batch_size + cfg.chunk_size - 1) / cfg.chunk_size;
    std::vector<nn::TensorStore<S>> chunk_grads;
    for (int i = 0; i < max_chunks; ++i) chunk_grads.push_back(m.params().zeros_like());
    std::vector<double> chunk_loss(max_chunks, 0.0);
    nn::TensorStore<S> grads = m.params().zeros_like();

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        Rng shuffle_rng(derive_seed(cfg.seed, 0x73687566, static_cast<uint64_t>(epoch)));
        shuffle_rng.shuffle(order.begin(), order.end());

        double epoch_loss = 0.0;
        int n_batches = 0;
        for (int batch_begin = 0; batch_begin < n; batch_begin += cfg.batch_size) {
            const int batch_n = std::min(cfg.batch_size, n - batch_begin);
            const int n_chunks = (batch_n + cfg.chunk_size - 1) / cfg.chunk_size;

            for_each_chunk(batch_n, cfg.chunk_size, cfg.threads, [&](int ci, int begin, int end) {
                auto& g = chunk_grads[ci];
                g.set_zero();
                double acc = 0.0;
                typename model::SeqVae<S>::Forward fw;
                for (int bi = begin; bi < end; ++bi) {
                    const int wi = order[batch_begin + bi];
                    const auto& w = train_windows[wi];
                    Mat<S> eps;
                    const Mat<S>* eps_ptr = nullptr;
                    if (stochastic) {
                        Rng noise_rng(derive_seed(cfg.seed, static_cast<uint64_t>(epoch),
                                                  0x10000000ull + static_cast<uint64_t>(wi)));
                        eps = detail::draw_noise<S>(static_cast<int>(w.frames.rows()), latent, noise_rng);
                        eps_ptr = &eps;
                    }
                    m.forward(w.frames, *w.cond_map, *w.cond_vec, eps_ptr, fw);
                    acc += m.total_loss(w.frames, fw).total;
                    m.backward(w.frames, fw, g);
                }
                chunk_loss[ci] = acc;
            });

            grads.set_zero();
            double batch_loss = 0.0;
            for (int ci = 0; ci < n_chunks; ++ci) {
                grads.add_scaled(chunk_grads[ci], S(1));
                batch_loss += chunk_loss[ci];
            }
            const S inv_batch = S(1) / static_cast<S>(batch_n);
            for (auto& t : grads.tensors) t *= inv_batch;
            batch_loss /= batch_n;

            if (!std::isfinite(batch_loss))
                throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch) +
                                         " (diverged); consider a lower learning rate");

            if (cfg.grad_clip > 0.0) {
                const double norm = std::sqrt(grads.squared_norm());
                if (norm > cfg.grad_clip)
                    for (auto& t : grads.tensors) t *= S(cfg.grad_clip / norm);
            }
            adam.step(m.params(), grads, cfg.learning_rate);
            epoch_loss += batch_loss;
            ++n_batches;
        }
        epoch_loss /= std::max(1, n_batches);

        const double val_loss = validate(m, val_windows, cfg);
        if (!std::isfinite(val_loss))
            throw std::runtime_error("train: non-finite validation loss at epoch " + std::to_string(epoch));
        const bool is_best = stopper.observe(val_loss);
        if (is_best) best_params = m.params();

        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        log.epochs.push_back({epoch, epoch_loss, val_loss, seconds, is_best});
        if (stopper.should_stop()) break;
    }

    m.params() = best_params;
    log.best_epoch = stopper.best_epoch();
    log.best_val_loss = stopper.best_loss();
    return log;
}

// Train-log CSV: epoch, train_loss, val_loss, seconds, best. The seconds
// column is only populated when wall time is requested, keeping default
// pipeline outputs byte-reproducible.
void write_train_log(const std::filesystem::path& path, const TrainLog& log, bool wall_time = false);

}  // namespace thermadet::train
