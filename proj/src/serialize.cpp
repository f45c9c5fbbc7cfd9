#include "energynet/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unistd.h>

namespace energynet {

namespace {

json matrix_to_json(const Matrix& m) {
  json arr = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) arr.push_back(m(r, c));
  return arr;
}

Matrix matrix_from_json(const json& arr, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (!arr.is_array() || static_cast<Eigen::Index>(arr.size()) != rows * cols)
    throw FormatError(std::string(what) + ": expected " + std::to_string(rows * cols) + " entries");
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = arr.at(static_cast<std::size_t>(r * cols + c)).get<double>();
  return m;
}

json vector_to_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector vector_from_json(const json& arr, Eigen::Index n, const char* what) {
  if (!arr.is_array() || static_cast<Eigen::Index>(arr.size()) != n)
    throw FormatError(std::string(what) + ": expected " + std::to_string(n) + " entries");
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = arr.at(static_cast<std::size_t>(i)).get<double>();
  return v;
}

void check_schema(const json& j, const char* schema) {
  if (!j.is_object() || !j.contains("schema") || j["schema"] != schema)
    throw FormatError(std::string("expected a '") + schema + "' document");
  const int version = j.value("version", -1);
  if (version != kSchemaVersion)
    throw FormatError(std::string(schema) + ": schema version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kSchemaVersion) + ")");
}

json dense_to_json(const DenseLayer& l) {
  return {{"in", l.w.rows()}, {"out", l.w.cols()}, {"w", matrix_to_json(l.w)}, {"b", vector_to_json(l.b)}};
}

DenseLayer dense_from_json(const json& j) {
  const auto in = j.at("in").get<Eigen::Index>();
  const auto out = j.at("out").get<Eigen::Index>();
  return {matrix_from_json(j.at("w"), in, out, "dense w"), vector_from_json(j.at("b"), out, "dense b")};
}

// Wraps nlohmann errors so callers only see energynet errors.
template <class F>
auto parse_guard(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw FormatError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

json to_json(const RbmParams& p) {
  return {{"d", p.visible_size()},
          {"k", p.hidden_size()},
          {"w", matrix_to_json(p.w)},
          {"b_v", vector_to_json(p.b_v)},
          {"b_h", vector_to_json(p.b_h)}};
}

RbmParams rbm_from_json(const json& j) {
  return parse_guard("RbmParams", [&] {
    const auto d = j.at("d").get<Eigen::Index>();
    const auto k = j.at("k").get<Eigen::Index>();
    return RbmParams(matrix_from_json(j.at("w"), d, k, "w"), vector_from_json(j.at("b_v"), d, "b_v"),
                     vector_from_json(j.at("b_h"), k, "b_h"));
  });
}

json to_json(const IRbmState& s) {
  return {{"d", s.visible_size()}, {"k", s.n()},          {"w", matrix_to_json(s.w())},
          {"b_v", vector_to_json(s.b_v())}, {"b_h", vector_to_json(s.b_h())}, {"n", s.n()},
          {"beta", s.beta()},      {"penalty", to_string(s.convention())}};
}

IRbmState irbm_from_json(const json& j) {
  return parse_guard("IRbmState", [&] {
    const auto d = j.at("d").get<Eigen::Index>();
    const auto n = j.at("n").get<Eigen::Index>();
    if (j.contains("k") && j["k"].get<Eigen::Index>() != n) throw FormatError("IRbmState: k and n disagree");
    return IRbmState(matrix_from_json(j.at("w"), d, n, "w"), vector_from_json(j.at("b_v"), d, "b_v"),
                     vector_from_json(j.at("b_h"), n, "b_h"), j.at("beta").get<double>(),
                     penalty_from_string(j.value("penalty", std::string("absolute"))));
  });
}

json to_json(const Dbn& dbn) {
  json layers = json::array();
  for (const auto& l : dbn.layers()) layers.push_back(to_json(l));
  return {{"schema", kDbnSchema}, {"version", kSchemaVersion}, {"layer_sizes", dbn.layer_sizes()}, {"layers", layers}};
}

Dbn dbn_from_json(const json& j) {
  check_schema(j, kDbnSchema);
  return parse_guard("Dbn", [&] {
    std::vector<RbmParams> layers;
    for (const auto& l : j.at("layers")) layers.push_back(rbm_from_json(l));
    Dbn dbn(std::move(layers));
    if (j.contains("layer_sizes") && j["layer_sizes"].get<std::vector<int>>() != dbn.layer_sizes())
      throw FormatError("Dbn: layer_sizes metadata disagrees with the layers");
    return dbn;
  });
}

json to_json(const Mlp& mlp) {
  json hidden = json::array();
  for (const auto& l : mlp.hidden) hidden.push_back(dense_to_json(l));
  return {{"schema", kMlpSchema},          {"version", kSchemaVersion}, {"layer_sizes", mlp.layer_sizes()},
          {"activation", to_string(mlp.activation)}, {"hidden", hidden},  {"output", dense_to_json(mlp.output)}};
}

Mlp mlp_from_json(const json& j) {
  check_schema(j, kMlpSchema);
  return parse_guard("Mlp", [&] {
    Mlp mlp;
    mlp.activation = activation_from_string(j.at("activation").get<std::string>());
    for (const auto& l : j.at("hidden")) mlp.hidden.push_back(dense_from_json(l));
    mlp.output = dense_from_json(j.at("output"));
    mlp.validate();
    return mlp;
  });
}

json to_json(const Evaluation& ev) { return {{"accuracy", ev.accuracy}, {"mean_nll", ev.mean_nll}, {"n", ev.n}}; }

json to_json(const BuildRecord& r) {
  return {{"layer", r.layer},
          {"n", r.n},
          {"gamma", r.gamma},
          {"steps", r.steps},
          {"loglik_per_example", r.loglik_per_example},
          {"loglik_stderr", r.loglik_stderr},
          {"neg_loglik_total", r.neg_loglik_total},
          {"complexity", r.complexity},
          {"mdl_weight", r.mdl_weight},
          {"M", r.description_length},
          {"architecture", r.architecture},
          {"decision", to_string(r.decision)}};
}

std::string summary_table(const BuildReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(6) << "layer" << std::setw(7) << "n" << std::setw(9) << "gamma" << std::setw(8)
      << "steps" << std::setw(14) << "loglik/ex" << std::setw(16) << "-LL total" << std::setw(12) << "complexity"
      << std::setw(16) << "M" << "decision\n";
  out << std::fixed;
  for (const auto& r : report.records) {
    out << std::setw(6) << r.layer << std::setw(7) << r.n << std::setw(9) << std::setprecision(4) << r.gamma
        << std::setw(8) << r.steps << std::setw(14) << std::setprecision(4) << r.loglik_per_example << std::setw(16)
        << std::setprecision(2) << r.neg_loglik_total << std::setw(12) << std::setprecision(5) << r.complexity
        << std::setw(16) << std::setprecision(2) << r.description_length << to_string(r.decision) << "\n";
  }
  out << "accepted architecture:";
  for (int n : report.accepted_sizes) out << ' ' << n;
  out << "\n";
  return out.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  const std::filesystem::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw FormatError("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw FormatError("cannot move " + tmp.string() + " to " + path.string());
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string to_string(Activation a) { return a == Activation::kRelu ? "relu" : "sigmoid"; }

Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::kRelu;
  if (s == "sigmoid") return Activation::kSigmoid;
  throw InvalidArgument("unknown activation '" + s + "'");
}

std::string to_string(PenaltyConvention c) {
  return c == PenaltyConvention::kAbsolute ? "absolute" : "softplus_scaled";
}

PenaltyConvention penalty_from_string(const std::string& s) {
  if (s == "absolute") return PenaltyConvention::kAbsolute;
  if (s == "softplus_scaled") return PenaltyConvention::kSoftplusScaled;
  throw InvalidArgument("unknown penalty convention '" + s + "'");
}

}  // namespace energynet
