#include "mlmap/training.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace mlmap {

std::uint64_t mix_seed(std::initializer_list<std::uint64_t> values) {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (std::uint64_t v : values) {
        h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        // splitmix64 finalizer
        std::uint64_t z = h + 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        h = z ^ (z >> 31);
    }
    return h;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    std::vector<std::thread> workers;
    std::size_t worker_count = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    workers.reserve(worker_count);
    for (std::size_t w = 0; w < worker_count; ++w) {
        workers.emplace_back([&, w] {
            try {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (std::thread& t : workers) t.join();
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);
}

namespace {

class M2lTrainable final : public TrainableModel {
public:
    explicit M2lTrainable(M2lModel& m) : model_(m) {}
    ParamRegistry& registry() override { return model_.registry(); }

    std::pair<double, double> chunk_pass(const std::vector<TrainingPair>& chunk, const PreparedSplitData& data,
                                         Rng* dropout_rng, std::vector<Tensor>* grads) override {
        std::vector<const PreparedMotion*> motions;
        std::vector<const PreparedText*> sentences;
        for (const TrainingPair& p : chunk) {
            motions.push_back(&data.motions[static_cast<std::size_t>(p.motion_idx)]);
            sentences.push_back(&data.sentences[static_cast<std::size_t>(p.sentence_idx)]);
        }
        M2lModel::Batch batch = model_.make_batch(motions, sentences);
        Tape tape;
        TapeBind bind(tape);
        M2lModel::LossGraph g = model_.loss_graph(tape, bind, batch, dropout_rng);
        double sum = g.sum_loss.value()(0, 0);
        if (!std::isfinite(sum))
            throw std::runtime_error("non-finite loss; first non-finite tensor: " + tape.first_non_finite());
        if (grads) {
            tape.backward(g.sum_loss);
            ParamRegistry& reg = model_.registry();
            for (std::size_t i = 0; i < reg.count(); ++i) {
                Tensor gi = bind.grad_of(reg.tensor(i));
                for (std::size_t k = 0; k < gi.data.size(); ++k) (*grads)[i].data[k] += gi.data[k];
            }
        }
        return {sum, g.active_count};
    }

private:
    M2lModel& model_;
};

class L2mTrainable final : public TrainableModel {
public:
    explicit L2mTrainable(L2mModel& m) : model_(m) {}
    ParamRegistry& registry() override { return model_.registry(); }

    std::pair<double, double> chunk_pass(const std::vector<TrainingPair>& chunk, const PreparedSplitData& data,
                                         Rng* dropout_rng, std::vector<Tensor>* grads) override {
        std::vector<const PreparedMotion*> motions;
        std::vector<const PreparedText*> sentences;
        for (const TrainingPair& p : chunk) {
            motions.push_back(&data.motions[static_cast<std::size_t>(p.motion_idx)]);
            sentences.push_back(&data.sentences[static_cast<std::size_t>(p.sentence_idx)]);
        }
        L2mModel::Batch batch = model_.make_batch(sentences, motions);
        Tape tape;
        TapeBind bind(tape);
        L2mModel::LossGraph g = model_.loss_graph(tape, bind, batch, dropout_rng);
        double sum = g.sum_loss.value()(0, 0);
        if (!std::isfinite(sum))
            throw std::runtime_error("non-finite loss; first non-finite tensor: " + tape.first_non_finite());
        if (grads) {
            tape.backward(g.sum_loss);
            ParamRegistry& reg = model_.registry();
            for (std::size_t i = 0; i < reg.count(); ++i) {
                Tensor gi = bind.grad_of(reg.tensor(i));
                for (std::size_t k = 0; k < gi.data.size(); ++k) (*grads)[i].data[k] += gi.data[k];
            }
        }
        return {sum, g.active_count};
    }

private:
    L2mModel& model_;
};

std::vector<Tensor> zero_like(const ParamRegistry& reg) {
    std::vector<Tensor> out;
    out.reserve(reg.count());
    for (std::size_t i = 0; i < reg.count(); ++i)
        out.push_back(Tensor::zeros(reg.tensor(i).rows, reg.tensor(i).cols));
    return out;
}

// Ordered chunk evaluation shared by training and validation passes.
struct ChunkOutcome {
    std::vector<Tensor> grads;
    double sum = 0.0;
    double active = 0.0;
};

std::vector<std::vector<TrainingPair>> make_chunks(const std::vector<TrainingPair>& pairs, std::size_t first,
                                                  std::size_t last, std::size_t microbatch) {
    std::vector<std::vector<TrainingPair>> chunks;
    for (std::size_t i = first; i < last; i += microbatch) {
        std::size_t end = std::min(last, i + microbatch);
        chunks.emplace_back(pairs.begin() + static_cast<std::ptrdiff_t>(i),
                            pairs.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return chunks;
}

}  // namespace

std::unique_ptr<TrainableModel> make_trainable(M2lModel& model) { return std::make_unique<M2lTrainable>(model); }
std::unique_ptr<TrainableModel> make_trainable(L2mModel& model) { return std::make_unique<L2mTrainable>(model); }

double evaluate_loss(TrainableModel& model, const PreparedSplitData& data, const RunConfig& cfg) {
    std::vector<TrainingPair> pairs = make_pairs(data);
    if (pairs.empty()) return std::numeric_limits<double>::quiet_NaN();
    auto chunks = make_chunks(pairs, 0, pairs.size(), std::max<std::size_t>(1, cfg.microbatch));
    std::vector<ChunkOutcome> results(chunks.size());
    parallel_for(chunks.size(), cfg.threads, [&](std::size_t i) {
        auto [sum, active] = model.chunk_pass(chunks[i], data, nullptr, nullptr);
        results[i].sum = sum;
        results[i].active = active;
    });
    double total = 0.0, active = 0.0;
    for (const ChunkOutcome& r : results) {
        total += r.sum;
        active += r.active;
    }
    return active > 0 ? total / active : std::numeric_limits<double>::quiet_NaN();
}

TrainResult train_model(TrainableModel& model, const PreparedSplitData& train_data,
                        const PreparedSplitData& val_data, const RunConfig& cfg, Nadam& opt,
                        std::size_t start_epoch, const TrainHooks& hooks) {
    std::vector<TrainingPair> pairs = make_pairs(train_data);
    if (pairs.empty()) throw std::runtime_error("train_model: no training pairs");
    ParamRegistry& reg = model.registry();
    const std::size_t microbatch = std::max<std::size_t>(1, cfg.microbatch);

    TrainResult result;
    result.best_val = std::numeric_limits<double>::infinity();

    for (std::size_t epoch = start_epoch + 1; epoch <= cfg.training_epochs; ++epoch) {
        Rng shuffle_rng(mix_seed({cfg.seed, 0x01, epoch}));
        std::vector<TrainingPair> order = pairs;
        shuffle_rng.shuffle(order);

        double epoch_sum = 0.0, epoch_active = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_index) {
            std::size_t end = std::min(order.size(), start + cfg.batch_size);
            auto chunks = make_chunks(order, start, end, microbatch);

            std::vector<ChunkOutcome> results(chunks.size());
            parallel_for(chunks.size(), cfg.threads, [&](std::size_t i) {
                results[i].grads = zero_like(reg);
                Rng dropout_rng(mix_seed({cfg.seed, 0x02, epoch, batch_index, i}));
                auto [sum, active] = model.chunk_pass(chunks[i], train_data, &dropout_rng, &results[i].grads);
                results[i].sum = sum;
                results[i].active = active;
            });

            std::vector<Tensor> grads = zero_like(reg);
            double batch_active = 0.0;
            for (const ChunkOutcome& r : results) {
                for (std::size_t gi = 0; gi < grads.size(); ++gi)
                    for (std::size_t k = 0; k < grads[gi].data.size(); ++k)
                        grads[gi].data[k] += r.grads[gi].data[k];
                batch_active += r.active;
                epoch_sum += r.sum;
                epoch_active += r.active;
            }
            if (batch_active <= 0) continue;
            for (Tensor& g : grads)
                for (double& v : g.data) v /= batch_active;
            clip_gradients(grads, cfg.clip_norm());
            opt.step(reg, grads);
        }

        double train_loss = epoch_active > 0 ? epoch_sum / epoch_active : std::numeric_limits<double>::quiet_NaN();
        double val_loss = evaluate_loss(model, val_data, cfg);
        result.curve.emplace_back(train_loss, val_loss);
        if (std::isfinite(val_loss) && val_loss < result.best_val) {
            result.best_val = val_loss;
            result.best_epoch = epoch;
            result.best_params.clear();
            for (std::size_t i = 0; i < reg.count(); ++i) result.best_params.push_back(reg.tensor(i));
        }
        if (hooks.on_epoch) hooks.on_epoch(epoch, train_loss, val_loss);
    }
    return result;
}

}  // namespace mlmap
