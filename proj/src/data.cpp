#include "energynet/data.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "energynet/error.hpp"
#include "energynet/random.hpp"

namespace energynet {

namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& buf, std::size_t offset, const std::filesystem::path& path) {
  if (buf.size() < offset + 4)
    throw FormatError(path.string() + ": truncated header (expected at least " + std::to_string(offset + 4) +
                      " bytes, got " + std::to_string(buf.size()) + ")");
  return (std::uint32_t{buf[offset]} << 24) | (std::uint32_t{buf[offset + 1]} << 16) |
         (std::uint32_t{buf[offset + 2]} << 8) | std::uint32_t{buf[offset + 3]};
}

void put_be32(std::ofstream& out, std::uint32_t x) {
  const char bytes[4] = {static_cast<char>(x >> 24), static_cast<char>(x >> 16), static_cast<char>(x >> 8),
                         static_cast<char>(x)};
  out.write(bytes, 4);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, delim)) cells.emplace_back(trim(cell));
  if (!line.empty() && line.back() == delim) cells.emplace_back();
  return cells;
}

}  // namespace

int Dataset::num_classes() const {
  if (labels.empty()) return 0;
  return *std::max_element(labels.begin(), labels.end()) + 1;
}

void Dataset::validate() const {
  if (features.rows() < 1) throw InvalidArgument("Dataset: no examples");
  if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != features.rows())
    throw InvalidArgument("Dataset: " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(features.rows()) + " rows");
  if (!features.allFinite()) throw InvalidArgument("Dataset: non-finite feature");
}

Dataset Dataset::slice(long begin, long count) const {
  if (begin < 0 || count < 0 || begin + count > size()) throw InvalidArgument("Dataset::slice: out of range");
  Dataset out;
  out.features = features.middleRows(begin, count);
  if (has_labels()) out.labels.assign(labels.begin() + begin, labels.begin() + begin + count);
  out.feature_names = feature_names;
  return out;
}

Dataset Dataset::select(const std::vector<long>& order) const {
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(order.size()), features.cols());
  for (std::size_t i = 0; i < order.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(order[i]);
    if (has_labels()) out.labels.push_back(labels[static_cast<std::size_t>(order[i])]);
  }
  out.feature_names = feature_names;
  return out;
}

double feature_bound(const Matrix& features) {
  if (features.size() == 0) return 0.0;
  return features.cwiseAbs().maxCoeff();
}

Dataset load_idx(const std::filesystem::path& images, const std::optional<std::filesystem::path>& labels) {
  const auto buf = read_file(images);
  const std::uint32_t magic = read_be32(buf, 0, images);
  if (magic != kIdxImageMagic) {
    std::ostringstream msg;
    msg << images.string() << ": bad IDX image magic 0x" << std::hex << magic << " (expected 0x803)";
    throw FormatError(msg.str());
  }
  const std::uint32_t count = read_be32(buf, 4, images);
  const std::uint32_t rows = read_be32(buf, 8, images);
  const std::uint32_t cols = read_be32(buf, 12, images);
  const std::size_t dim = std::size_t{rows} * cols;
  const std::size_t expected = 16 + std::size_t{count} * dim;
  if (buf.size() != expected)
    throw FormatError(images.string() + ": expected " + std::to_string(expected) + " bytes for " +
                      std::to_string(count) + " images of " + std::to_string(rows) + "x" + std::to_string(cols) +
                      ", got " + std::to_string(buf.size()));

  Dataset ds;
  ds.features.resize(count, static_cast<Eigen::Index>(dim));
  for (std::uint32_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      ds.features(i, static_cast<Eigen::Index>(j)) = buf[16 + i * dim + j] / 255.0;

  if (labels) {
    const auto lbuf = read_file(*labels);
    const std::uint32_t lmagic = read_be32(lbuf, 0, *labels);
    if (lmagic != kIdxLabelMagic) {
      std::ostringstream msg;
      msg << labels->string() << ": bad IDX label magic 0x" << std::hex << lmagic << " (expected 0x801)";
      throw FormatError(msg.str());
    }
    const std::uint32_t lcount = read_be32(lbuf, 4, *labels);
    if (lbuf.size() != 8 + std::size_t{lcount})
      throw FormatError(labels->string() + ": expected " + std::to_string(8 + std::size_t{lcount}) + " bytes, got " +
                        std::to_string(lbuf.size()));
    if (lcount != count)
      throw FormatError("label count " + std::to_string(lcount) + " in " + labels->string() +
                        " does not match image count " + std::to_string(count));
    ds.labels.assign(lbuf.begin() + 8, lbuf.end());
  }
  return ds;
}

void write_idx_images(const std::filesystem::path& path, const std::vector<std::uint8_t>& pixels, std::uint32_t count,
                      std::uint32_t rows, std::uint32_t cols) {
  if (pixels.size() != std::size_t{count} * rows * cols) throw InvalidArgument("write_idx_images: pixel count mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  put_be32(out, kIdxImageMagic);
  put_be32(out, count);
  put_be32(out, rows);
  put_be32(out, cols);
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
}

void write_idx_labels(const std::filesystem::path& path, const std::vector<std::uint8_t>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  put_be32(out, kIdxLabelMagic);
  put_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.write(reinterpret_cast<const char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
}

MinMaxScaler MinMaxScaler::fit(const Matrix& x) {
  if (x.rows() == 0) throw InvalidArgument("MinMaxScaler: empty input");
  return {x.colwise().minCoeff().transpose(), x.colwise().maxCoeff().transpose()};
}

Matrix MinMaxScaler::apply(const Matrix& x) const {
  if (x.cols() != min.size()) throw DimensionError("MinMaxScaler: column count differs from the fitted data");
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double range = max[c] - min[c];
    for (Eigen::Index r = 0; r < x.rows(); ++r)
      out(r, c) = range > 0.0 ? std::clamp((x(r, c) - min[c]) / range, 0.0, 1.0) : 0.0;
  }
  return out;
}

Dataset load_delimited_raw(const std::filesystem::path& path, const DelimitedOptions& opts) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());

  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  std::string line;
  long lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split_line(line, opts.delimiter);
    if (opts.header && names.empty()) {
      names = std::move(cells);
      width = names.size();
      continue;
    }
    if (width == 0) width = cells.size();
    if (cells.size() != width)
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(width) +
                        " columns, found " + std::to_string(cells.size()));
    std::vector<double> row(width);
    for (std::size_t c = 0; c < width; ++c) {
      const std::string& cell = cells[c];
      const char* end = cell.data() + cell.size();
      auto [ptr, ec] = std::from_chars(cell.data(), end, row[c]);
      if (ec != std::errc() || ptr != end || cell.empty())
        throw FormatError(path.string() + ":" + std::to_string(lineno) + ": column " + std::to_string(c + 1) +
                          " is not numeric: '" + cell + "'");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError(path.string() + ": no data rows");

  std::optional<std::size_t> label_col;
  if (opts.label_name) {
    auto it = std::find(names.begin(), names.end(), *opts.label_name);
    if (it == names.end()) throw FormatError(path.string() + ": no column named '" + *opts.label_name + "'");
    label_col = static_cast<std::size_t>(it - names.begin());
  } else if (opts.label_column) {
    const int idx = *opts.label_column < 0 ? static_cast<int>(width) + *opts.label_column : *opts.label_column;
    if (idx < 0 || idx >= static_cast<int>(width))
      throw FormatError(path.string() + ": label column " + std::to_string(*opts.label_column) + " out of range");
    label_col = static_cast<std::size_t>(idx);
  }

  Dataset ds;
  const std::size_t n_feat = width - (label_col ? 1 : 0);
  ds.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n_feat));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Eigen::Index out_c = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (label_col && c == *label_col) {
        const double y = rows[r][c];
        if (y < 0 || y != std::floor(y))
          throw FormatError(path.string() + ": row " + std::to_string(r + 1) + ": label " + std::to_string(y) +
                            " is not a non-negative integer");
        ds.labels.push_back(static_cast<int>(y));
      } else {
        ds.features(static_cast<Eigen::Index>(r), out_c++) = rows[r][c];
      }
    }
  }
  for (std::size_t c = 0; c < names.size(); ++c)
    if (!label_col || c != *label_col) ds.feature_names.push_back(names[c]);
  return ds;
}

Dataset load_delimited(const std::filesystem::path& path, const DelimitedOptions& opts, const MinMaxScaler* scaler) {
  Dataset ds = load_delimited_raw(path, opts);
  ds.features = scaler ? scaler->apply(ds.features) : MinMaxScaler::fit(ds.features).apply(ds.features);
  return ds;
}

BinarizeMode BinarizeMode::parse(const std::string& text) {
  BinarizeMode mode;
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (kind == "threshold") {
    mode.kind = Kind::kThreshold;
    if (!arg.empty()) {
      auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), mode.threshold);
      if (ec != std::errc() || ptr != arg.data() + arg.size()) throw InvalidArgument("bad threshold: " + arg);
    }
  } else if (kind == "stochastic") {
    mode.kind = Kind::kStochastic;
    if (!arg.empty()) {
      auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), mode.seed);
      if (ec != std::errc() || ptr != arg.data() + arg.size()) throw InvalidArgument("bad seed: " + arg);
    }
  } else {
    throw InvalidArgument("unknown binarization mode '" + text + "' (threshold[:T] or stochastic[:SEED])");
  }
  return mode;
}

std::string BinarizeMode::to_string() const {
  std::ostringstream out;
  if (kind == Kind::kThreshold)
    out << "threshold:" << threshold;
  else
    out << "stochastic:" << seed;
  return out.str();
}

Dataset binarize(const Dataset& ds, const BinarizeMode& mode) {
  for (Eigen::Index r = 0; r < ds.features.rows(); ++r)
    for (Eigen::Index c = 0; c < ds.features.cols(); ++c) {
      const double x = ds.features(r, c);
      if (!(x >= 0.0 && x <= 1.0))
        throw InvalidArgument("binarize: value " + std::to_string(x) + " at (" + std::to_string(r) + ", " +
                              std::to_string(c) + ") is outside [0, 1]");
    }
  Dataset out = ds;
  if (mode.kind == BinarizeMode::Kind::kThreshold) {
    out.features = (ds.features.array() >= mode.threshold).cast<double>().matrix();
  } else {
    Rng rng(mode.seed);
    out.features = rng.bernoulli(ds.features);
  }
  return out;
}

Dataset synth_modes(int n_modes, int d, long m, double flip_prob, std::uint64_t seed, Matrix* prototypes) {
  if (n_modes < 1 || d < 1 || m < 1) throw InvalidArgument("synth_modes: n_modes, d and m must be positive");
  if (d < 63 && static_cast<std::uint64_t>(n_modes) > (std::uint64_t{1} << d))
    throw InvalidArgument("synth_modes: more modes than binary vectors of length " + std::to_string(d));
  if (!(flip_prob >= 0.0 && flip_prob <= 1.0)) throw InvalidArgument("synth_modes: flip_prob must lie in [0, 1]");

  Rng rng(seed);
  Matrix protos(n_modes, d);
  std::set<std::vector<bool>> seen;
  for (int i = 0; i < n_modes;) {
    std::vector<bool> bits(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) bits[static_cast<std::size_t>(j)] = rng.bernoulli(0.5);
    if (!seen.insert(bits).second) continue;
    for (int j = 0; j < d; ++j) protos(i, j) = bits[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
    ++i;
  }

  Dataset ds;
  ds.features.resize(m, d);
  ds.labels.resize(static_cast<std::size_t>(m));
  for (long r = 0; r < m; ++r) {
    const auto mode = static_cast<int>(rng.index(static_cast<std::size_t>(n_modes)));
    ds.labels[static_cast<std::size_t>(r)] = mode;
    for (int j = 0; j < d; ++j) {
      const double bit = protos(mode, j);
      ds.features(r, j) = rng.bernoulli(flip_prob) ? 1.0 - bit : bit;
    }
  }
  if (prototypes) *prototypes = protos;
  return ds;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, long train_count, std::uint64_t seed) {
  if (train_count < 0 || train_count > ds.size()) throw InvalidArgument("split: train_count out of range");
  std::vector<long> order(static_cast<std::size_t>(ds.size()));
  std::iota(order.begin(), order.end(), 0L);
  Rng rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
  std::vector<long> first(order.begin(), order.begin() + train_count);
  std::vector<long> second(order.begin() + train_count, order.end());
  return {ds.select(first), ds.select(second)};
}

}  // namespace energynet
