#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "energynet/math.hpp"

namespace energynet {

/// Feature matrix (rows are examples, values in [0, 1]) with optional labels.
struct Dataset {
  Matrix features;
  std::vector<int> labels;  ///< empty, or one per row
  std::vector<std::string> feature_names;

  long size() const { return static_cast<long>(features.rows()); }
  long dim() const { return static_cast<long>(features.cols()); }
  bool has_labels() const { return !labels.empty(); }
  int num_classes() const;

  /// Throws InvalidArgument when m < 1, labels mismatch or features are not finite.
  void validate() const;

  /// Rows [begin, begin + count).
  Dataset slice(long begin, long count) const;
  /// Rows in `order`.
  Dataset select(const std::vector<long>& order) const;
};

/// max |x_ij| over the sample.
double feature_bound(const Matrix& features);

// ---- IDX ------------------------------------------------------------------

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/// Reads an IDX image file (u8 pixels scaled by 1/255, rows flattened
/// row-major) and optionally its label file.
Dataset load_idx(const std::filesystem::path& images, const std::optional<std::filesystem::path>& labels = {});

/// Writes rows of `pixels` (values in [0, 255]) as an IDX image file.
void write_idx_images(const std::filesystem::path& path, const std::vector<std::uint8_t>& pixels, std::uint32_t count,
                      std::uint32_t rows, std::uint32_t cols);
void write_idx_labels(const std::filesystem::path& path, const std::vector<std::uint8_t>& labels);

// ---- delimited text ---------------------------------------------------------

struct DelimitedOptions {
  char delimiter = ',';
  bool header = false;
  /// Column index holding the label; negative counts from the end (-1 = last).
  std::optional<int> label_column;
  /// Alternative to label_column when the file has a header.
  std::optional<std::string> label_name;
};

/// Per-column min-max scaling fitted on one split and reused on others.
/// Constant columns map to 0; values outside the fitted range are clamped.
struct MinMaxScaler {
  Vector min;
  Vector max;

  static MinMaxScaler fit(const Matrix& x);
  Matrix apply(const Matrix& x) const;
};

/// Unscaled numeric table.
Dataset load_delimited_raw(const std::filesystem::path& path, const DelimitedOptions& opts);

/// Loads the table and min-max scales each feature column to [0, 1]. When
/// `scaler` is given it is applied instead of fitting a new one.
Dataset load_delimited(const std::filesystem::path& path, const DelimitedOptions& opts,
                       const MinMaxScaler* scaler = nullptr);

// ---- binarization -------------------------------------------------------------

struct BinarizeMode {
  enum class Kind { kThreshold, kStochastic };
  Kind kind = Kind::kThreshold;
  double threshold = 0.5;
  std::uint64_t seed = 0;

  /// "threshold", "threshold:T", "stochastic", "stochastic:SEED".
  static BinarizeMode parse(const std::string& text);
  std::string to_string() const;
};

/// threshold: bit = (x >= tau). stochastic: bit ~ Bernoulli(x).
/// Throws InvalidArgument for values outside [0, 1].
Dataset binarize(const Dataset& ds, const BinarizeMode& mode);

// ---- synthetic data -------------------------------------------------------------

/// m rows of length d, each a copy of one of `n_modes` distinct random
/// prototypes with independent bit flips at `flip_prob`. Labels hold the
/// mode index; prototypes are returned through `prototypes` when non-null.
Dataset synth_modes(int n_modes, int d, long m, double flip_prob, std::uint64_t seed,
                    Matrix* prototypes = nullptr);

/// Shuffled split: the first `train_count` rows of a seeded permutation form
/// the first dataset.
std::pair<Dataset, Dataset> split(const Dataset& ds, long train_count, std::uint64_t seed);

}  // namespace energynet
