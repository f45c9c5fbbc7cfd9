#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "energynet/data.hpp"
#include "energynet/error.hpp"
#include "energynet/random.hpp"

using namespace energynet;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "energynet_test_data";
  fs::create_directories(dir);
  return dir / name;
}

void be32(std::ofstream& out, std::uint32_t x) {
  const unsigned char b[4] = {static_cast<unsigned char>(x >> 24), static_cast<unsigned char>(x >> 16),
                              static_cast<unsigned char>(x >> 8), static_cast<unsigned char>(x)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

// Hand-rolled IDX writer, independent of the library's.
void raw_images(const fs::path& p, std::uint32_t count, std::uint32_t rows, std::uint32_t cols, std::size_t drop = 0) {
  std::ofstream out(p, std::ios::binary);
  be32(out, 0x803);
  be32(out, count);
  be32(out, rows);
  be32(out, cols);
  const std::size_t n = std::size_t{count} * rows * cols - drop;
  for (std::size_t i = 0; i < n; ++i) out.put(static_cast<char>(i % 256));
}

void raw_labels(const fs::path& p, std::uint32_t count) {
  std::ofstream out(p, std::ios::binary);
  be32(out, 0x801);
  be32(out, count);
  for (std::uint32_t i = 0; i < count; ++i) out.put(static_cast<char>(i % 10));
}

void text(const fs::path& p, const std::string& body) { std::ofstream(p) << body; }

int hamming(const Matrix& a, long r, const Matrix& b, long s) {
  return static_cast<int>((a.row(r) - b.row(s)).cwiseAbs().sum());
}

}  // namespace

TEST_CASE("IDX loading") {
  const auto img = scratch("t10k-images.idx");
  const auto lab = scratch("t10k-labels.idx");
  raw_images(img, 10000, 28, 28);
  raw_labels(lab, 10000);
  const Dataset ds = load_idx(img, lab);
  CHECK(ds.size() == 10000);
  CHECK(ds.dim() == 784);
  CHECK(ds.features(0, 1) == doctest::Approx(1.0 / 255.0));
  CHECK(ds.features(0, 255) == 1.0);
  CHECK(ds.labels[13] == 3);

  SUBCASE("truncated image file names both byte counts") {
    const auto bad = scratch("trunc.idx");
    raw_images(bad, 3, 2, 2, 5);
    try {
      load_idx(bad);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("28") != std::string::npos);  // 16 + 12 expected
      CHECK(msg.find("23") != std::string::npos);  // actual
    }
  }

  SUBCASE("label count mismatch") {
    const auto small = scratch("small.idx");
    const auto labels = scratch("small-labels.idx");
    raw_images(small, 4, 2, 2);
    raw_labels(labels, 5);
    CHECK_THROWS_AS(load_idx(small, labels), FormatError);
  }

  SUBCASE("wrong magic") { CHECK_THROWS_AS(load_idx(lab), FormatError); }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_idx(scratch("nope.idx")), FormatError); }
}

TEST_CASE("IDX writer round trip") {
  const auto img = scratch("rt-images.idx");
  const auto lab = scratch("rt-labels.idx");
  write_idx_images(img, {0, 255, 51, 102, 0, 0}, 2, 1, 3);
  write_idx_labels(lab, {7, 2});
  const Dataset ds = load_idx(img, lab);
  CHECK(ds.features.rows() == 2);
  CHECK(ds.features(0, 2) == doctest::Approx(0.2));
  CHECK(ds.labels == std::vector<int>{7, 2});
}

TEST_CASE("delimited text") {
  const auto p = scratch("toy.csv");
  text(p, "a,b,c,label\n0,3,1,0\n5,3,2,1\n10,3,3,1\n");
  DelimitedOptions opts;
  opts.header = true;
  opts.label_name = "label";
  const Dataset ds = load_delimited(p, opts);
  CHECK(ds.dim() == 3);
  CHECK(ds.features(0, 0) == 0.0);
  CHECK(ds.features(1, 0) == 0.5);
  CHECK(ds.features(2, 0) == 1.0);
  CHECK(ds.features.col(1).isZero());
  CHECK(ds.labels == std::vector<int>{0, 1, 1});
  CHECK(ds.feature_names == std::vector<std::string>{"a", "b", "c"});

  SUBCASE("label column by index, no header, other delimiter") {
    const auto q = scratch("toy.tsv");
    text(q, "1\t0\t4\n2\t1\t8\n");
    DelimitedOptions o;
    o.delimiter = '\t';
    o.label_column = 1;
    const Dataset t = load_delimited(q, o);
    CHECK(t.dim() == 2);
    CHECK(t.labels == std::vector<int>{0, 1});
  }

  SUBCASE("scaler fitted on one split applies to another") {
    const MinMaxScaler sc = MinMaxScaler::fit((Matrix(2, 1) << 0, 10).finished());
    const Matrix y = sc.apply((Matrix(3, 1) << 5, -1, 20).finished());
    CHECK(y(0, 0) == 0.5);
    CHECK(y(1, 0) == 0.0);
    CHECK(y(2, 0) == 1.0);
  }

  SUBCASE("malformed rows") {
    const auto r = scratch("ragged.csv");
    text(r, "1,2\n3\n");
    CHECK_THROWS_AS(load_delimited(r, {}), FormatError);
    text(r, "1,2\n3,x\n");
    CHECK_THROWS_AS(load_delimited(r, {}), FormatError);
  }
}

TEST_CASE("binarization") {
  Dataset ds;
  ds.features = (Matrix(1, 3) << 0.5, 0.49, 1.0).finished();
  const Dataset t = binarize(ds, BinarizeMode::parse("threshold:0.5"));
  CHECK(t.features(0, 0) == 1.0);
  CHECK(t.features(0, 1) == 0.0);

  Dataset ones;
  ones.features = Matrix::Ones(50, 2);
  CHECK(binarize(ones, BinarizeMode::parse("stochastic:3")).features.isOnes());

  Dataset point3;
  point3.features = Matrix::Constant(10000, 1, 0.3);
  const double mean = binarize(point3, BinarizeMode::parse("stochastic:9")).features.mean();
  CHECK(std::abs(mean - 0.3) < 0.02);

  ds.features(0, 2) = 1.5;
  CHECK_THROWS_AS(binarize(ds, BinarizeMode{}), InvalidArgument);
  CHECK_THROWS_AS(BinarizeMode::parse("median"), InvalidArgument);
  CHECK(BinarizeMode::parse("stochastic:12").to_string() == "stochastic:12");
  CHECK(BinarizeMode::parse("threshold").threshold == 0.5);
}

TEST_CASE("synthetic modes") {
  Matrix protos;
  const Dataset clean = synth_modes(4, 12, 300, 0.0, 1, &protos);
  CHECK(protos.rows() == 4);
  for (long r = 0; r < clean.size(); ++r) CHECK(hamming(clean.features, r, protos, clean.labels[static_cast<std::size_t>(r)]) == 0);

  // One mode: distances to the prototype are Binomial(d, flip).
  const int d = 40;
  const double flip = 0.1;
  const long m = 5000;
  const Dataset noisy = synth_modes(1, d, m, flip, 2, &protos);
  double mean = 0.0, sq = 0.0;
  for (long r = 0; r < m; ++r) {
    const double h = hamming(noisy.features, r, protos, 0);
    mean += h;
    sq += h * h;
  }
  mean /= m;
  const double var = sq / m - mean * mean;
  CHECK(std::abs(mean - d * flip) < 4.0 * std::sqrt(d * flip * (1 - flip) / m));
  CHECK(var == doctest::Approx(d * flip * (1 - flip)).epsilon(0.1));

  CHECK(synth_modes(3, 8, 50, 0.1, 7).features == synth_modes(3, 8, 50, 0.1, 7).features);
  CHECK_THROWS_AS(synth_modes(5, 2, 10, 0.0, 1), InvalidArgument);
}

TEST_CASE("split") {
  const Dataset ds = synth_modes(2, 6, 20, 0.1, 3);
  const auto [a, b] = split(ds, 15, 4);
  CHECK(a.size() == 15);
  CHECK(b.size() == 5);
  CHECK(a.labels.size() == 15);
  CHECK(split(ds, 15, 4).first.features == a.features);
  CHECK(feature_bound((Matrix(2, 2) << 0.5, -3, 1, 2).finished()) == 3.0);
}
