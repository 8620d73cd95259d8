#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "burstcast/dataset.hpp"
#include "burstcast/ingest.hpp"
#include "burstcast/nn/model_spec.hpp"
#include "burstcast/nn/train.hpp"
#include "burstcast/synth.hpp"

namespace burstcast::experiments {

/// Schema violations, one message per offending key.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> issues);
    const std::vector<std::string>& issues() const { return issues_; }

private:
    std::vector<std::string> issues_;
};

enum class SourceKind { panel, csv, synth };

struct DataSource {
    SourceKind kind = SourceKind::synth;
    /// Resolved against the config file's directory.
    std::filesystem::path path;
    Grain grain = Grain::region;
    ColumnMap columns;
    SynthConfig synth;
};

inline const std::vector<std::string> kBaselineModels{"seasonal_naive", "moving_average", "linear", "sarima"};
inline const std::vector<std::string> kFamilies{"main", "history", "seqlen", "features", "architecture"};

struct AblationConfig {
    std::vector<std::string> families{"main", "history", "seqlen", "features", "architecture"};
    nn::Variant model = nn::Variant::bilstm;
    /// Years of training history; nullopt is the full panel.
    std::vector<std::optional<int>> history_spans{5, 10, 20, std::nullopt};
    std::vector<std::size_t> sequence_lengths{20, 30, 40};
    std::size_t reference_lookback = 30;
    std::vector<FeatureGroup> feature_groups{FeatureGroup::lag, FeatureGroup::rolling, FeatureGroup::temporal,
                                             FeatureGroup::casualty, FeatureGroup::geography};
    std::vector<nn::Variant> architectures{nn::Variant::uni_lstm, nn::Variant::lstm_attention, nn::Variant::bilstm};
    std::size_t noise_floor_seeds = 5;
};

struct ExperimentConfig {
    DataSource data;
    FeatureConfig features;
    SplitFractions split;
    nn::TrainConfig train;
    std::size_t lookback = 30;
    /// Baselines and deep variants for the main comparison, in row order.
    std::vector<std::string> models{"seasonal_naive", "moving_average", "linear", "sarima", "bilstm",
                                    "lstm_attention"};
    std::size_t moving_average_window = 4;
    double ridge_lambda = 1e-8;
    AblationConfig ablations;
    std::uint64_t seed = 42;
};

/// Validates every key; unknown keys are errors. Relative paths resolve
/// against `base_dir`.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Fully resolved configuration with every default filled in.
nlohmann::json to_json(const ExperimentConfig& config);

/// FNV-1a (64-bit, hex) of the canonical resolved document.
std::string config_hash(const ExperimentConfig& config);

}  // namespace burstcast::experiments
