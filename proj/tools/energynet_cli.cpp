#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cli_config.hpp"

namespace fs = std::filesystem;
using namespace energynet;
using namespace energynet::cli;

namespace {

void write_json(const fs::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

fs::path out_dir(const RunConfig& cfg) {
  const fs::path dir(cfg.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw UsageError("cannot create output directory " + cfg.out);
  return dir;
}

template <class F>
auto checked_artifact(const std::string& path, const char* flag, F parse) {
  if (path.empty()) throw UsageError(std::string(flag) + " is required");
  if (!fs::is_regular_file(path)) throw UsageError("no such file: " + path);
  return parse(read_json_file(path));
}

void validate_or_usage(const RunConfig& cfg) {
  try {
    cfg.build.validate();
    cfg.train.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  } catch (const DivergenceError& e) {
    throw UsageError(e.what());
  }
}

void save_scaler(const fs::path& dir, const LoadedData& in) {
  if (in.scaler) write_json(dir / "scaler.json", scaler_to_json(*in.scaler));
}

int cmd_build(const RunConfig& cfg, bool seed_given) {
  if (!seed_given) throw UsageError("build needs --seed (or seed in the config file)");
  validate_or_usage(cfg);
  const LoadedData in = load_dataset(cfg, false);
  const fs::path dir = out_dir(cfg);

  Rng rng(cfg.seed);
  const BuildResult r = build_network(in.data.features, cfg.build, rng);
  r.report.check(cfg.build);

  std::string lines;
  for (const auto& rec : r.report.records) lines += to_json(rec).dump() + "\n";
  std::ostringstream summary;
  summary << "binarize: " << cfg.binarize << "\n"
          << "penalty: " << cfg.penalty << "\n"
          << "mdl_weight: " << (cfg.build.mdl_weight ? std::to_string(*cfg.build.mdl_weight) : "m") << "\n"
          << "lambda: " << cfg.build.lambda << "\n\n"
          << summary_table(r.report);

  write_json(dir / "dbn.json", to_json(r.dbn));
  write_file_atomic(dir / "report.jsonl", lines);
  write_file_atomic(dir / "summary.txt", summary.str());
  save_scaler(dir, in);
  std::cout << summary.str();
  return 0;
}

int cmd_finetune(const RunConfig& cfg) {
  validate_or_usage(cfg);
  const Dbn dbn = checked_artifact(cfg.dbn, "--dbn", dbn_from_json);
  const LoadedData in = load_dataset(cfg, true);
  const fs::path dir = out_dir(cfg);

  const int classes = cfg.classes > 0 ? cfg.classes : in.data.num_classes();
  const Activation act = activation_from_string(cfg.activation);
  Rng rng(cfg.seed);
  const Mlp start = cfg.init == "warm" ? init_from_dbn(dbn, classes, rng, act)
                                       : init_from_sizes(dbn.layer_sizes(), classes, rng, act);
  const TrainResult tr = train_supervised(start, in.data, cfg.train);
  const Evaluation fit = evaluate(tr.mlp, in.data);

  std::string log;
  for (std::size_t e = 0; e < tr.epoch_losses.size(); ++e)
    log += json{{"epoch", e}, {"loss", tr.epoch_losses[e]}}.dump() + "\n";
  const json meta = {{"init", cfg.init},
                     {"activation", cfg.activation},
                     {"lr", cfg.train.lr},
                     {"batch_size", cfg.train.batch_size},
                     {"epochs", cfg.train.epochs},
                     {"seed", cfg.seed},
                     {"best_epoch", tr.best_epoch},
                     {"train", to_json(fit)}};

  write_json(dir / "mlp.json", to_json(tr.mlp));
  write_file_atomic(dir / "train_log.jsonl", log);
  write_json(dir / "finetune.json", meta);
  save_scaler(dir, in);
  std::cout << meta.dump() << "\n";
  return 0;
}

int cmd_eval(const RunConfig& cfg) {
  const Mlp mlp = checked_artifact(cfg.mlp, "--mlp", mlp_from_json);
  const LoadedData in = load_dataset(cfg, true);
  std::cout << to_json(evaluate(mlp, in.data)).dump() << "\n";
  return 0;
}

int cmd_ll(const RunConfig& cfg) {
  validate_or_usage(cfg);
  const Dbn dbn = checked_artifact(cfg.dbn, "--dbn", dbn_from_json);
  const LoadedData in = load_dataset(cfg, false);
  Rng rng(cfg.seed);
  const LikelihoodEstimate est = estimate_dbn_loglik(dbn, in.data.features, cfg.build.ais, cfg.build.n_mc, rng);
  std::cout << json{{"mean", est.mean},
                    {"std_error", est.std_error},
                    {"top_log_z", est.top_log_z},
                    {"top_log_z_stderr", est.top_log_z_stderr},
                    {"n", in.data.size()}}
                   .dump()
            << "\n";
  return 0;
}

std::string csv(const Matrix& m) {
  std::ostringstream os;
  os << m.format(Eigen::IOFormat(Eigen::FullPrecision, Eigen::DontAlignCols, ",", "\n", "", "", "", "\n"));
  return os.str();
}

int cmd_export(const RunConfig& cfg) {
  if (cfg.dbn.empty() == cfg.mlp.empty()) throw UsageError("export needs exactly one of --dbn and --mlp");
  const fs::path dir = out_dir(cfg);
  std::vector<fs::path> written;
  auto put = [&](const std::string& name, const Matrix& m) {
    write_file_atomic(dir / name, csv(m));
    written.push_back(dir / name);
  };
  if (!cfg.dbn.empty()) {
    const Dbn dbn = checked_artifact(cfg.dbn, "--dbn", dbn_from_json);
    for (std::size_t t = 0; t < dbn.depth(); ++t) {
      const std::string p = "layer" + std::to_string(t + 1) + "_";
      put(p + "w.csv", dbn.layer(t).w);
      put(p + "b_v.csv", dbn.layer(t).b_v);
      put(p + "b_h.csv", dbn.layer(t).b_h);
    }
  } else {
    const Mlp mlp = checked_artifact(cfg.mlp, "--mlp", mlp_from_json);
    for (std::size_t t = 0; t < mlp.hidden.size(); ++t) {
      const std::string p = "hidden" + std::to_string(t + 1) + "_";
      put(p + "w.csv", mlp.hidden[t].w);
      put(p + "b.csv", mlp.hidden[t].b);
    }
    put("output_w.csv", mlp.output.w);
    put("output_b.csv", mlp.output.b);
  }
  for (const auto& p : written) std::cout << p.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("Grow a deep belief network layer by layer, then fine-tune it as a classifier.", "energynet");
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  add_options(app, cfg);
  auto* build = app.add_subcommand("build", "Grow and select layers; writes dbn.json, report.jsonl, summary.txt");
  auto* finetune = app.add_subcommand("finetune", "Train a classifier from a DBN; writes mlp.json, train_log.jsonl");
  auto* eval = app.add_subcommand("eval", "Print accuracy and mean NLL of an MLP as JSON");
  auto* ll = app.add_subcommand("ll", "Print the mean log-likelihood lower bound of a DBN");
  auto* exp = app.add_subcommand("export", "Write DBN or MLP parameters as CSV files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    finalize(cfg);
    if (*build) return cmd_build(cfg, app.get_option("--seed")->count() > 0);
    if (*finetune) return cmd_finetune(cfg);
    if (*eval) return cmd_eval(cfg);
    if (*ll) return cmd_ll(cfg);
    if (*exp) return cmd_export(cfg);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NonConvergenceError& e) {
    const auto& last = e.trace().back();
    std::cerr << "error: " << e.what() << " (last step " << last.step << ", n " << last.n << ")\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
