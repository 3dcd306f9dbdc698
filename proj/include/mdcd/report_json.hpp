#pragma once

#include <json.hpp>

#include "mdcd/discovery.hpp"
#include "mdcd/synth.hpp"

namespace mdcd {

using ordered_json = nlohmann::ordered_json;

ordered_json settings_to_json(const ScoreConfig& cfg);
ordered_json subset_score_to_json(const SubsetScore& s);
ordered_json report_to_json(const DiscoveryReport& r);
ordered_json direction_to_json(const DirectionResult& r, const std::string& x,
                               const std::string& y);
ordered_json truth_to_json(const SynthInstance& inst);

const char* direction_label_name(DirectionLabel label);

}  // namespace mdcd
