#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "burstcast/core/exec.hpp"
#include "burstcast/dataset.hpp"
#include "burstcast/nn/adam.hpp"
#include "burstcast/nn/params.hpp"

namespace burstcast::nn {

struct TrainConfig {
    double learning_rate = 1e-4;
    std::size_t batch_size = 32;
    std::size_t max_epochs = 50;
    /// Unset means the variant default: 10 for lstm_attention, 15 otherwise.
    std::optional<std::size_t> early_stop_patience;
    double plateau_factor = 0.5;
    std::size_t plateau_patience = 5;
    double plateau_min_delta = 1e-6;
    double min_learning_rate = 1e-6;
    double dropout = 0.2;
    std::uint64_t seed = 42;
    Exec exec = Exec::parallel;

    std::size_t patience_for(Variant v) const;
    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

struct EpochRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;  // standardized MSE, mean over samples
    double val_loss = 0.0;    // standardized MSE
    double val_rmse = 0.0;    // raw target units
    double learning_rate = 0.0;
    bool operator==(const EpochRecord&) const = default;
};

/// Checkpointing, early stopping and the plateau schedule, separated from the
/// numerics so the epoch arithmetic can be exercised directly.
class EpochController {
public:
    EpochController(std::size_t patience, std::size_t max_epochs, double learning_rate, double plateau_factor,
                    std::size_t plateau_patience, double plateau_min_delta, double min_learning_rate);
    EpochController(const TrainConfig& config, Variant variant);

    struct Decision {
        bool checkpoint = false;
        bool stop = false;
    };

    /// Feed the validation result of the epoch just finished.
    Decision observe(double val_rmse, double val_loss);

    double learning_rate() const { return lr_; }
    std::size_t epoch() const { return epoch_; }
    std::size_t best_epoch() const { return best_epoch_; }
    double best_rmse() const { return best_rmse_; }

private:
    std::size_t patience_, max_epochs_, plateau_patience_;
    double lr_, factor_, min_delta_, min_lr_;
    std::size_t epoch_ = 0, best_epoch_ = 0, plateau_wait_ = 0;
    double best_rmse_, best_loss_;
};

struct TrainedModel {
    ModelParams params;  // best checkpoint
    std::vector<EpochRecord> history;
    std::size_t best_epoch = 0;
    double target_mean = 0.0;
    double target_std = 1.0;
    AdamState optimizer;  // state at the final epoch
    TrainConfig config;

    std::size_t epochs_ran() const { return history.size(); }
    /// Raw-space predictions for every sample of `set`.
    std::vector<double> predict(const SequenceSet& set, Exec exec = Exec::parallel) const;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch Adam on standardized targets with a seeded per-epoch shuffle.
/// Throws TrainingError on empty partitions or a non-finite loss.
TrainedModel train(const ModelSpec& spec, const SequenceSet& train_set, const SequenceSet& val_set,
                   const TrainConfig& config, const EpochCallback& on_epoch = {});

}  // namespace burstcast::nn
