#pragma once

#include <functional>
#include <json.hpp>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "burstcast/baselines/linear.hpp"
#include "burstcast/baselines/sarima.hpp"
#include "burstcast/dataset.hpp"
#include "burstcast/eval_stats.hpp"
#include "burstcast/experiments/config.hpp"
#include "burstcast/nn/train.hpp"

namespace burstcast::experiments {

using Log = std::function<void(const std::string&)>;

struct LoadedData {
    PanelSeries panel;
    std::optional<RejectionReport> rejections;
    std::optional<AggregateReport> aggregation;
};

/// Reads or generates the configured panel.
LoadedData load_data(const DataSource& source);

/// Weeks [begin, end) of a panel.
PanelSeries slice_panel(const PanelSeries& panel, std::size_t begin, std::size_t end);

/// Features, split and train-only scaler for one panel.
struct Prepared {
    PanelSeries panel;
    FeatureMatrix features;
    SplitIndex split;
    Scaler scaler;
};

Prepared prepare(const PanelSeries& panel, const FeatureConfig& features, SplitFractions fractions);
Prepared prepare_with_split(const PanelSeries& panel, const FeatureConfig& features,
                            const std::function<SplitIndex(std::size_t)>& make_split);

/// Test targets every model can forecast: feature rows e with
/// test.begin + U - 1 <= e <= test.end - 2, geography-major.
struct EvalTargets {
    std::vector<std::size_t> geo;
    std::vector<std::size_t> row;
    std::vector<long> geo_id;
    std::vector<long> ordinal;
    std::vector<double> actual;
    std::size_t size() const { return actual.size(); }
};

EvalTargets evaluable_targets(const Prepared& data, std::size_t universe_lookback);

/// Hands out test metrics at most once per label, so no model can be scored
/// on the test window twice within a run.
class TestGate {
public:
    MetricReport evaluate(const std::string& label, std::span<const double> predictions, const EvalTargets& targets);
    std::size_t evaluations() const { return seen_.size(); }

private:
    std::set<std::string> seen_;
};

struct ModelRun {
    std::string label;
    std::string model;
    MetricReport metrics;
    std::optional<std::size_t> samples;
    std::optional<std::size_t> epochs;
    std::optional<std::size_t> parameters;
    std::size_t n_features = 0;
    std::optional<nn::TrainedModel> trained;
    nlohmann::json fitted;
};

std::vector<double> predict_seasonal_naive(const Prepared& data, const EvalTargets& targets);
std::vector<double> predict_moving_average(const Prepared& data, const EvalTargets& targets, std::size_t window);

struct SarimaRun {
    baselines::PanelSarima fits;
    std::vector<double> predictions;
};
/// Per-geography order search on the weeks up to the end of the training
/// partition, then fixed-parameter one-step filtering over the full series.
SarimaRun run_sarima(const Prepared& data, const EvalTargets& targets, Exec exec = Exec::parallel);

/// Fits and scores one baseline by name.
ModelRun run_baseline(const std::string& name, const Prepared& data, const EvalTargets& targets,
                      const ExperimentConfig& config, TestGate& gate, const std::string& label);

struct DeepRunOptions {
    nn::Variant variant = nn::Variant::bilstm;
    std::size_t lookback = 30;
    std::size_t universe_lookback = 0;
    nn::TrainConfig train;
    Log log;
};

/// Trains on the train/validation windows and scores once on `targets`.
ModelRun run_deep(const Prepared& data, const EvalTargets& targets, const DeepRunOptions& options, TestGate& gate,
                  const std::string& label);

}  // namespace burstcast::experiments
