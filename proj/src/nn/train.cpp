#include "burstcast/nn/train.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "burstcast/core/error.hpp"
#include "burstcast/core/rng.hpp"
#include "burstcast/nn/network.hpp"

namespace burstcast::nn {

std::size_t TrainConfig::patience_for(Variant v) const {
    if (early_stop_patience) return *early_stop_patience;
    return v == Variant::lstm_attention ? 10 : 15;
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("train.learning_rate must be positive");
    if (batch_size == 0) throw std::invalid_argument("train.batch_size must be positive");
    if (max_epochs == 0) throw std::invalid_argument("train.max_epochs must be positive");
    if (early_stop_patience && *early_stop_patience == 0)
        throw std::invalid_argument("train.early_stop_patience must be positive");
    if (!(plateau_factor > 0.0 && plateau_factor < 1.0))
        throw std::invalid_argument("train.plateau_factor must lie in (0, 1)");
    if (plateau_patience == 0) throw std::invalid_argument("train.plateau_patience must be positive");
    if (!(min_learning_rate > 0.0)) throw std::invalid_argument("train.min_learning_rate must be positive");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("train.dropout must lie in [0, 1)");
}

EpochController::EpochController(std::size_t patience, std::size_t max_epochs, double learning_rate,
                                 double plateau_factor, std::size_t plateau_patience, double plateau_min_delta,
                                 double min_learning_rate)
    : patience_(patience),
      max_epochs_(max_epochs),
      plateau_patience_(plateau_patience),
      lr_(learning_rate),
      factor_(plateau_factor),
      min_delta_(plateau_min_delta),
      min_lr_(min_learning_rate),
      best_rmse_(std::numeric_limits<double>::infinity()),
      best_loss_(std::numeric_limits<double>::infinity()) {}

EpochController::EpochController(const TrainConfig& c, Variant v)
    : EpochController(c.patience_for(v), c.max_epochs, c.learning_rate, c.plateau_factor, c.plateau_patience,
                      c.plateau_min_delta, c.min_learning_rate) {}

EpochController::Decision EpochController::observe(double val_rmse, double val_loss) {
    ++epoch_;
    Decision d;
    if (val_rmse < best_rmse_) {
        best_rmse_ = val_rmse;
        best_epoch_ = epoch_;
        d.checkpoint = true;
    }
    if (val_loss < best_loss_ - min_delta_) {
        best_loss_ = val_loss;
        plateau_wait_ = 0;
    } else if (++plateau_wait_ >= plateau_patience_) {
        lr_ = std::max(lr_ * factor_, min_lr_);
        plateau_wait_ = 0;
    }
    d.stop = epoch_ - best_epoch_ >= patience_ || epoch_ >= max_epochs_;
    return d;
}

std::vector<double> TrainedModel::predict(const SequenceSet& set, Exec exec) const {
    const Network net(params.spec);
    const SampleView view{set.inputs.data(), set.sample_size(), set.targets_scaled};
    auto out = nn::predict(net, params.values, view, exec);
    for (double& v : out) v = v * target_std + target_mean;
    return out;
}

namespace {

void check_set(const SequenceSet& s, const ModelSpec& spec, const char* name) {
    if (s.size() == 0) throw TrainingError(std::string(name) + " partition has no sequences");
    if (s.lookback != spec.lookback || s.width != spec.input_width)
        throw ShapeError(std::string(name) + " sequences do not match the model's lookback/input width");
}

}  // namespace

TrainedModel train(const ModelSpec& spec, const SequenceSet& tr, const SequenceSet& va, const TrainConfig& config,
                   const EpochCallback& on_epoch) {
    config.validate();
    spec.validate();
    check_set(tr, spec, "training");
    check_set(va, spec, "validation");

    const Network net(spec);
    TrainedModel out;
    out.config = config;
    out.target_mean = tr.target_mean;
    out.target_std = tr.target_std;
    out.params = init_params(spec, derive_seed(config.seed, {0x696e6974}));
    ModelParams current = out.params;
    AdamState adam(current.values.size());
    EpochController ctl(config, spec.variant);

    const SampleView train_view{tr.inputs.data(), tr.sample_size(), tr.targets_scaled};
    const SampleView val_view{va.inputs.data(), va.sample_size(), va.targets_scaled};
    std::vector<std::size_t> order(tr.size());

    for (std::size_t epoch = 1;; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng shuffle_rng(derive_seed(config.seed, {0x73687566, epoch}));
        shuffle_rng.shuffle(order);

        const double lr = ctl.learning_rate();
        double sq_sum = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_index) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            const std::span<const std::size_t> batch(order.data() + start, end - start);
            auto lg = batch_loss_gradient(net, current.values, train_view, batch,
                                          derive_seed(config.seed, {0x64726f70, epoch, batch_index}), config.exec);
            if (!std::isfinite(lg.loss))
                throw TrainingError("non-finite training loss at epoch " + std::to_string(epoch) + ", batch " +
                                    std::to_string(batch_index));
            sq_sum += lg.loss * static_cast<double>(batch.size());
            adam_step(current.values, lg.grad, adam, lr);
        }

        const auto pred = nn::predict(net, current.values, val_view, config.exec);
        double val_sq = 0.0, raw_sq = 0.0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            const double r = pred[i] - va.targets_scaled[i];
            val_sq += r * r;
            const double rr = pred[i] * tr.target_std + tr.target_mean - va.targets_raw[i];
            raw_sq += rr * rr;
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = sq_sum / static_cast<double>(order.size());
        rec.val_loss = val_sq / static_cast<double>(pred.size());
        rec.val_rmse = std::sqrt(raw_sq / static_cast<double>(pred.size()));
        rec.learning_rate = lr;
        if (!std::isfinite(rec.val_loss))
            throw TrainingError("non-finite validation loss at epoch " + std::to_string(epoch));
        out.history.push_back(rec);
        if (on_epoch) on_epoch(rec);

        const auto decision = ctl.observe(rec.val_rmse, rec.val_loss);
        if (decision.checkpoint) out.params = current;
        if (decision.stop) break;
    }
    out.best_epoch = ctl.best_epoch();
    out.optimizer = std::move(adam);
    return out;
}

}  // namespace burstcast::nn
