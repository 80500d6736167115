#pragma once

#include "mlmap/config.hpp"
#include "mlmap/l2m_model.hpp"
#include "mlmap/m2l_model.hpp"
#include "mlmap/optimizer.hpp"
#include "mlmap/prepared_data.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace mlmap {

// deterministic seed derivation for per-epoch shuffles and per-chunk dropout
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> values);

// Uniform training interface over both model directions.
class TrainableModel {
public:
    virtual ~TrainableModel() = default;
    virtual ParamRegistry& registry() = 0;

    // Sum loss and active-step count over the chunk. When grads is non-null
    // the parameter gradients of the sum loss are added into it (registry
    // order). Throws on a non-finite loss, naming the first bad tensor.
    virtual std::pair<double, double> chunk_pass(const std::vector<TrainingPair>& chunk,
                                                 const PreparedSplitData& data, Rng* dropout_rng,
                                                 std::vector<Tensor>* grads) = 0;
};

std::unique_ptr<TrainableModel> make_trainable(M2lModel& model);
std::unique_ptr<TrainableModel> make_trainable(L2mModel& model);

struct TrainHooks {
    // epoch (1-based), train loss, validation loss (nan without val data)
    std::function<void(std::size_t, double, double)> on_epoch;
};

struct TrainResult {
    std::vector<std::pair<double, double>> curve;
    std::size_t best_epoch = 0;  // 1-based; 0 = no validation data
    double best_val = 0.0;
    std::vector<Tensor> best_params;  // registry order snapshot at best epoch
};

// Mini-batch training with teacher forcing. Batches are split into chunks of
// cfg.microbatch examples whose gradients are reduced in chunk order, so the
// result is identical for any thread count.
TrainResult train_model(TrainableModel& model, const PreparedSplitData& train_data,
                        const PreparedSplitData& val_data, const RunConfig& cfg, Nadam& opt,
                        std::size_t start_epoch = 0, const TrainHooks& hooks = {});

// Mean loss over a dataset without dropout (validation / reporting).
double evaluate_loss(TrainableModel& model, const PreparedSplitData& data, const RunConfig& cfg);

// Runs fn(0..n-1), distributing indices over `threads` workers.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace mlmap
