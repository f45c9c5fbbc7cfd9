#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "energynet/builder.hpp"
#include "energynet/data.hpp"
#include "energynet/finetune.hpp"
#include "energynet/serialize.hpp"

namespace energynet::cli {

/// Bad invocation or unreadable input; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every knob a command can read. Defaults match the library defaults.
struct RunConfig {
  std::uint64_t seed = 0;
  std::string out = ".";
  int threads = 1;

  // data
  std::string data;
  std::string labels;
  std::string binarize = "threshold:0.5";  ///< or "stochastic[:SEED]", "none"
  std::string delimiter = ",";
  bool header = false;
  std::optional<int> label_column;
  std::string scaler;  ///< min-max scaler saved by an earlier run

  // build
  BuildConfig build;
  std::string penalty = "absolute";

  // fine-tuning
  std::string dbn;
  std::string mlp;
  std::string init = "warm";  ///< warm | sizes
  std::string activation = "relu";
  TrainHyper train;
  int classes = 0;  ///< 0: one more than the largest label
};

/// Registers every option of RunConfig on `app`, plus --config for a
/// key = value file. Values given on the command line win over the file.
void add_options(CLI::App& app, RunConfig& cfg);

/// Resolves the string-valued choices into `cfg.build` and friends.
void finalize(RunConfig& cfg);

struct LoadedData {
  Dataset data;
  std::optional<MinMaxScaler> scaler;  ///< set for delimited text
};

/// Dataset from --data (IDX, or delimited text for .csv/.tsv/.txt), binarized
/// per --binarize. `want_labels` turns missing labels into a usage error.
LoadedData load_dataset(const RunConfig& cfg, bool want_labels);

json scaler_to_json(const MinMaxScaler& s);

}  // namespace energynet::cli
