#pragma once

#include <filesystem>
#include <string>

#include "burstcast/nn/train.hpp"

namespace burstcast::nn {

/// JSON document: format tag, version, spec, layout table, flat parameters,
/// optimizer moments, epoch history. Doubles round-trip exactly.
std::string checkpoint_to_json(const TrainedModel& model);
TrainedModel checkpoint_from_json(const std::string& text);

void save_checkpoint(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_checkpoint(const std::filesystem::path& path);

}  // namespace burstcast::nn
