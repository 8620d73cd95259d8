#pragma once

#include <string>

#include "burstcast/experiments/pipeline.hpp"
#include "burstcast/experiments/result_table.hpp"

namespace burstcast::experiments {

struct RunContext {
    const ExperimentConfig& config;
    const PanelSeries& panel;
    Log log;
};

/// Baselines and deep models on one split; improvement is measured against
/// the best baseline by macro RMSE.
ResultTable run_main_comparison(const RunContext& ctx);

/// Training history truncated to each span; validation and test windows stay
/// those of the full panel.
ResultTable run_history_ablation(const RunContext& ctx);

/// One row per lookback, all sharing the sample universe of the longest one.
ResultTable run_seqlen_ablation(const RunContext& ctx);

/// Drops one feature group per row; the noise floor is the largest RMSE
/// change over seed-only reruns of the full feature set.
ResultTable run_feature_ablation(const RunContext& ctx);

/// Every configured architecture on identical data and test targets.
ResultTable run_architecture_ablation(const RunContext& ctx);

/// Dispatch by family name ("main", "history", "seqlen", "features",
/// "architecture").
ResultTable run_family(const std::string& family, const RunContext& ctx);

}  // namespace burstcast::experiments
