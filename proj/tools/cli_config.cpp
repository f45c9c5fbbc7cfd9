#include "cli_config.hpp"

#include <filesystem>

namespace energynet::cli {

namespace fs = std::filesystem;

void add_options(CLI::App& app, RunConfig& cfg) {
  app.set_config("--config", "", "key = value file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);

  app.add_option("--seed", cfg.seed, "Seed for every random draw");
  app.add_option("--out", cfg.out, "Output directory");
  app.add_option("--threads", cfg.threads, "Worker threads for AIS")->check(CLI::PositiveNumber);

  auto* data = "Data";
  app.add_option("--data", cfg.data, "IDX image file, or .csv/.tsv/.txt table")->group(data);
  app.add_option("--labels", cfg.labels, "IDX label file")->group(data);
  app.add_option("--binarize", cfg.binarize, "threshold[:T], stochastic[:SEED] or none")->group(data);
  app.add_option("--delimiter", cfg.delimiter, "Field separator of delimited text")->group(data);
  app.add_flag("--header", cfg.header, "Delimited text starts with a header row")->group(data);
  app.add_option("--label-column", cfg.label_column, "Label column of delimited text (negative counts from the end)")
      ->group(data);
  app.add_option("--scaler", cfg.scaler, "Reuse a saved min-max scaler for delimited text")->group(data);

  auto* build = "Build";
  BuildConfig& b = cfg.build;
  app.add_option("--max-layers", b.max_layers)->group(build);
  app.add_option("--gamma", b.gamma_threshold, "Growth threshold")->group(build);
  app.add_option("--beta", b.beta, "Per-unit penalty")->group(build);
  app.add_option("--penalty", cfg.penalty, "absolute | softplus_scaled")->group(build);
  app.add_option("--cd-k", b.cd_k)->group(build);
  app.add_option("--lr", b.lr, "CD learning rate")->group(build);
  app.add_option("--batch-size", b.batch_size, "CD minibatch size")->group(build);
  app.add_option("--min-checks", b.min_checks)->group(build);
  app.add_option("--max-steps", b.max_steps)->group(build);
  app.add_option("--n-mc", b.n_mc, "Posterior samples per example in the likelihood bound")->group(build);
  app.add_option("--mdl-weight", b.mdl_weight, "Complexity weight (default: training-set size)")->group(build);
  app.add_option("--lambda", b.lambda)->group(build);
  app.add_option("--norm-p", b.norm_p)->group(build);
  app.add_flag("--mean-field,!--sampled", b.mean_field, "Pass probabilities between layers")->group(build);
  app.add_flag("--init-visible-bias,!--zero-visible-bias", b.init_visible_bias)->group(build);
  app.add_option("--ais-temps", b.ais.n_temps)->group(build);
  app.add_option("--ais-chains", b.ais.n_chains)->group(build);

  auto* tune = "Fine-tuning";
  app.add_option("--dbn", cfg.dbn, "dbn.json from a build")->group(tune);
  app.add_option("--mlp", cfg.mlp, "mlp.json from finetune")->group(tune);
  app.add_option("--init", cfg.init, "warm (copy DBN weights) | sizes (sizes only)")
      ->check(CLI::IsMember({"warm", "sizes"}))
      ->group(tune);
  app.add_option("--activation", cfg.activation)->check(CLI::IsMember({"relu", "sigmoid"}))->group(tune);
  app.add_option("--ft-lr", cfg.train.lr)->group(tune);
  app.add_option("--ft-batch", cfg.train.batch_size)->group(tune);
  app.add_option("--epochs", cfg.train.epochs)->group(tune);
  app.add_option("--classes", cfg.classes, "Output classes (default: largest label + 1)")->group(tune);
}

void finalize(RunConfig& cfg) {
  try {
    cfg.build.penalty = penalty_from_string(cfg.penalty);
    if (cfg.binarize != "none") BinarizeMode::parse(cfg.binarize);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  if (cfg.delimiter.size() != 1) throw UsageError("--delimiter must be a single character");
  cfg.build.seed = cfg.seed;
  cfg.build.ais.seed = cfg.seed;
  cfg.build.ais.threads = cfg.threads;
  cfg.train.seed = cfg.seed;
}

namespace {

void require_file(const std::string& path, const char* flag) {
  if (path.empty()) throw UsageError(std::string(flag) + " is required");
  if (!fs::is_regular_file(path)) throw UsageError(std::string("no such file: ") + path);
}

bool is_text(const fs::path& p) {
  const std::string ext = p.extension().string();
  return ext == ".csv" || ext == ".tsv" || ext == ".txt";
}

MinMaxScaler scaler_from_json(const json& j) {
  const auto lo = j.at("min").get<std::vector<double>>();
  const auto hi = j.at("max").get<std::vector<double>>();
  if (lo.size() != hi.size()) throw FormatError("scaler: min and max differ in length");
  MinMaxScaler s;
  s.min = Eigen::Map<const Vector>(lo.data(), static_cast<Eigen::Index>(lo.size()));
  s.max = Eigen::Map<const Vector>(hi.data(), static_cast<Eigen::Index>(hi.size()));
  return s;
}

}  // namespace

json scaler_to_json(const MinMaxScaler& s) {
  return {{"min", std::vector<double>(s.min.begin(), s.min.end())},
          {"max", std::vector<double>(s.max.begin(), s.max.end())}};
}

LoadedData load_dataset(const RunConfig& cfg, bool want_labels) {
  require_file(cfg.data, "--data");
  LoadedData out;
  if (is_text(cfg.data)) {
    DelimitedOptions opts;
    opts.delimiter = fs::path(cfg.data).extension() == ".tsv" && cfg.delimiter == "," ? '\t' : cfg.delimiter[0];
    opts.header = cfg.header;
    opts.label_column = cfg.label_column;
    out.data = load_delimited_raw(cfg.data, opts);
    if (!cfg.scaler.empty()) {
      require_file(cfg.scaler, "--scaler");
      out.scaler = scaler_from_json(read_json_file(cfg.scaler));
    } else {
      out.scaler = MinMaxScaler::fit(out.data.features);
    }
    out.data.features = out.scaler->apply(out.data.features);
  } else {
    std::optional<fs::path> labels;
    if (!cfg.labels.empty()) {
      require_file(cfg.labels, "--labels");
      labels = cfg.labels;
    }
    out.data = load_idx(cfg.data, labels);
  }
  if (want_labels && !out.data.has_labels())
    throw UsageError("this command needs labels (--labels, or --label-column for delimited text)");
  if (cfg.binarize != "none") out.data = binarize(out.data, BinarizeMode::parse(cfg.binarize));
  return out;
}

}  // namespace energynet::cli
