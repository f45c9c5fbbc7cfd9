#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "energynet/data.hpp"
#include "energynet/serialize.hpp"

using namespace energynet;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string output;  ///< stdout and stderr
};

Run run(const std::string& args) {
  const std::string cmd = std::string(ENERGYNET_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  Run r;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe)) r.output += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "energynet_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Binary rows as a 1 x d IDX image file, plus labels when present.
void write_binary_idx(const Dataset& ds, const fs::path& images, const fs::path& labels) {
  std::vector<std::uint8_t> px;
  for (long r = 0; r < ds.size(); ++r)
    for (long c = 0; c < ds.dim(); ++c) px.push_back(ds.features(r, c) > 0.5 ? 255 : 0);
  write_idx_images(images, px, static_cast<std::uint32_t>(ds.size()), 1, static_cast<std::uint32_t>(ds.dim()));
  if (ds.has_labels()) write_idx_labels(labels, std::vector<std::uint8_t>(ds.labels.begin(), ds.labels.end()));
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("build on synthetic data, determinism and missing input") {
  const fs::path dir = scratch();
  const Dataset ds = synth_modes(2, 16, 500, 0.05, 11);
  write_binary_idx(ds, dir / "s.idx", dir / "s-labels.idx");

  const Run a = run("build --data " + quote(dir / "s.idx") + " --seed 5 --out " + quote(dir / "a"));
  REQUIRE_MESSAGE(a.code == 0, a.output);
  const Run b = run("build --data " + quote(dir / "s.idx") + " --seed 5 --out " + quote(dir / "b"));
  REQUIRE(b.code == 0);

  const Dbn dbn = dbn_from_json(read_json_file(dir / "a" / "dbn.json"));
  CHECK(dbn.depth() >= 1);
  CHECK(slurp(dir / "a" / "report.jsonl") == slurp(dir / "b" / "report.jsonl"));
  CHECK(fs::exists(dir / "a" / "summary.txt"));

  // Accepted rows strictly decrease in M.
  std::istringstream lines(slurp(dir / "a" / "report.jsonl"));
  std::string line;
  double last = std::numeric_limits<double>::infinity();
  int accepted = 0;
  while (std::getline(lines, line)) {
    const json rec = json::parse(line);
    if (rec.at("decision") != "accept") continue;
    CHECK(rec.at("M").get<double>() < last);
    last = rec.at("M").get<double>();
    ++accepted;
  }
  CHECK(accepted == static_cast<int>(dbn.depth()));

  // The command is a thin wrapper over the library call.
  BuildConfig cfg;
  cfg.seed = 5;
  cfg.ais.seed = 5;
  Rng rng(5);
  CHECK(build_network(ds.features, cfg, rng).dbn == dbn);

  const Run missing = run("build --data " + quote(dir / "absent.idx") + " --seed 1 --out " + quote(dir / "m"));
  CHECK(missing.code == 2);
  CHECK(missing.output.find("absent.idx") != std::string::npos);
  CHECK(run("build --data " + quote(dir / "s.idx") + " --out " + quote(dir / "m")).code == 2);
  CHECK(run("frobnicate").code == 2);
}

TEST_CASE("eval of a perfect model") {
  const fs::path dir = scratch();
  Dataset ds;
  ds.features = (Matrix(4, 2) << 1, 0, 0, 1, 1, 0, 0, 1).finished();
  ds.labels = {0, 1, 0, 1};
  write_binary_idx(ds, dir / "p.idx", dir / "p-labels.idx");

  Mlp mlp;
  mlp.hidden.push_back({Matrix::Identity(2, 2), Vector::Zero(2)});
  mlp.output = {(Matrix(2, 2) << 100, -100, -100, 100).finished(), Vector::Zero(2)};
  write_file_atomic(dir / "perfect.json", to_json(mlp).dump());

  const Run r = run("eval --mlp " + quote(dir / "perfect.json") + " --data " + quote(dir / "p.idx") + " --labels " +
                    quote(dir / "p-labels.idx"));
  REQUIRE_MESSAGE(r.code == 0, r.output);
  const json out = json::parse(r.output);
  CHECK(out.at("accuracy").get<double>() == 1.0);
  CHECK(out.at("mean_nll").get<double>() < 1e-12);
  CHECK(out.at("n").get<long>() == 4);

  const Run wrong = run("eval --mlp " + quote(dir / "p.idx") + " --data " + quote(dir / "p.idx"));
  CHECK(wrong.code == 2);
}

TEST_CASE("ll equals the library value") {
  const fs::path dir = scratch();
  const Dataset ds = synth_modes(3, 6, 40, 0.1, 2);
  write_binary_idx(ds, dir / "t.idx", dir / "t-labels.idx");
  Rng init(8);
  const Dbn dbn({RbmParams(init.normal_matrix(6, 3, 0.5), init.normal_matrix(6, 1, 0.5).col(0),
                           init.normal_matrix(3, 1, 0.5).col(0))});
  write_file_atomic(dir / "one.json", to_json(dbn).dump());

  const Run r = run("ll --dbn " + quote(dir / "one.json") + " --data " + quote(dir / "t.idx") +
                    " --seed 4 --ais-temps 300 --ais-chains 8 --n-mc 5");
  REQUIRE_MESSAGE(r.code == 0, r.output);
  const json out = json::parse(r.output);

  AisConfig ais;
  ais.n_temps = 300;
  ais.n_chains = 8;
  ais.seed = 4;
  Rng rng(4);
  const LikelihoodEstimate lib = estimate_dbn_loglik(dbn, ds.features, ais, 5, rng);
  CHECK(out.at("mean").get<double>() == lib.mean);
  CHECK(out.at("std_error").get<double>() == lib.std_error);
}

TEST_CASE("finetune then eval on separable data") {
  const fs::path dir = scratch();
  Rng g(3);
  Dataset ds;
  ds.features = g.bernoulli(Matrix(Matrix::Constant(200, 8, 0.5)));
  for (long r = 0; r < ds.size(); ++r) ds.labels.push_back(ds.features(r, 0) > 0.5 ? 1 : 0);
  write_binary_idx(ds, dir / "sep.idx", dir / "sep-labels.idx");
  Rng init(9);
  write_file_atomic(dir / "sep-dbn.json",
                    to_json(Dbn({RbmParams(init.normal_matrix(8, 6, 0.1), Vector::Zero(8), Vector::Zero(6))})).dump());

  const std::string data = " --data " + quote(dir / "sep.idx") + " --labels " + quote(dir / "sep-labels.idx");
  for (const char* mode : {"warm", "sizes"}) {
    const fs::path out = dir / mode;
    const Run ft = run(std::string("finetune --init ") + mode + " --dbn " + quote(dir / "sep-dbn.json") + data +
                       " --seed 1 --ft-lr 0.1 --epochs 100 --out " + quote(out));
    REQUIRE_MESSAGE(ft.code == 0, ft.output);
    CHECK(read_json_file(out / "finetune.json").at("init") == mode);
    const Run ev = run("eval --mlp " + quote(out / "mlp.json") + data);
    REQUIRE(ev.code == 0);
    CHECK(json::parse(ev.output).at("accuracy").get<double>() == 1.0);
  }
}

TEST_CASE("config file with flag override") {
  const fs::path dir = scratch();
  const Dataset ds = synth_modes(2, 10, 200, 0.05, 1);
  write_binary_idx(ds, dir / "c.idx", dir / "c-labels.idx");
  std::ofstream(dir / "run.cfg") << "# build settings\nseed = 7\nmax-layers = 1\n";
  const std::string base = "build --config " + quote(dir / "run.cfg") + " --data " + quote(dir / "c.idx");

  REQUIRE(run(base + " --out " + quote(dir / "c1")).code == 0);
  CHECK(dbn_from_json(read_json_file(dir / "c1" / "dbn.json")).depth() == 1);
  REQUIRE(run(base + " --seed 8 --out " + quote(dir / "c2")).code == 0);
  CHECK(slurp(dir / "c1" / "report.jsonl") != slurp(dir / "c2" / "report.jsonl"));

  std::ofstream(dir / "typo.cfg") << "max_layerz = 2\n";
  CHECK(run("build --config " + quote(dir / "typo.cfg") + " --data " + quote(dir / "c.idx")).code == 2);
}

TEST_CASE("export writes CSV parameters") {
  const fs::path dir = scratch();
  const Dbn dbn({RbmParams::zeros(3, 2)});
  write_file_atomic(dir / "z.json", to_json(dbn).dump());
  const Run r = run("export --dbn " + quote(dir / "z.json") + " --out " + quote(dir / "csv"));
  REQUIRE_MESSAGE(r.code == 0, r.output);
  CHECK(slurp(dir / "csv" / "layer1_w.csv") == "0,0\n0,0\n0,0\n");
  CHECK(run("export --out " + quote(dir / "csv")).code == 2);
}
