#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "energynet/builder.hpp"
#include "energynet/finetune.hpp"

namespace energynet {

using json = nlohmann::json;

inline constexpr const char* kDbnSchema = "energynet.dbn";
inline constexpr const char* kMlpSchema = "energynet.mlp";
inline constexpr int kSchemaVersion = 1;

// {"d", "k", "w" (row-major), "b_v", "b_h"}
json to_json(const RbmParams& p);
RbmParams rbm_from_json(const json& j);

// RbmParams fields plus {"n", "beta", "penalty"}
json to_json(const IRbmState& s);
IRbmState irbm_from_json(const json& j);

// {"schema", "version", "layer_sizes", "layers": [RbmParams...]}
json to_json(const Dbn& dbn);
Dbn dbn_from_json(const json& j);

// {"schema", "version", "layer_sizes", "activation", "hidden": [...], "output": {...}}
json to_json(const Mlp& mlp);
Mlp mlp_from_json(const json& j);

// {"accuracy", "mean_nll", "n"}
json to_json(const Evaluation& ev);

/// One JSON-lines record of the build trace.
json to_json(const BuildRecord& r);

/// Fixed-width table of the build records.
std::string summary_table(const BuildReport& report);

/// Writes `contents` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
json read_json_file(const std::filesystem::path& path);

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);
std::string to_string(PenaltyConvention c);
PenaltyConvention penalty_from_string(const std::string& s);

}  // namespace energynet
