#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "mrarc/numkit.hpp"

namespace mrarc {

/// Image geometry for column vectors; pixel (r, c) lives at index r * width + c.
struct ImageShape {
  int height = 0;
  int width = 0;
};

/// Samples stored one per column, with an optional label per column.
struct LabeledMatrix {
  Mat samples;
  std::vector<int> labels;
  std::optional<ImageShape> image_shape;

  Index dim() const noexcept { return samples.rows(); }
  Index count() const noexcept { return samples.cols(); }
  bool has_labels() const noexcept { return !labels.empty(); }
  void validate() const;
};

/// Union-of-subspaces generator: class k owns a random d-dimensional
/// subspace of R^m; samples are basis * (coeff_scale * N(0, I_d)).
struct SyntheticSpec {
  int num_classes = 10;
  int subspace_dim = 5;
  int ambient_dim = 100;
  int train_per_class = 30;
  int test_per_class = 20;
  double coeff_scale = 1.0;
  std::uint64_t seed = 0;
  std::optional<ImageShape> image_shape;

  void validate() const;
};

/// Columns are class-major (all of class 0, then class 1, ...). For each
/// class the generator draws the basis, then the training samples, then
/// the test samples, from one xoshiro256** stream.
std::pair<LabeledMatrix, LabeledMatrix> gen_subspace_data(const SyntheticSpec& spec);

struct UniformFill {
  double lo = 0.0;
  double hi = 255.0;
};

/// Arbitrary patch image, resampled (nearest neighbour) onto the region.
struct PatchFill {
  Mat patch;
};

struct BlockOcclusion {
  double fraction = 0.0;
  std::variant<UniformFill, PatchFill> fill = UniformFill{};
};

struct PixelCorruption {
  double fraction = 0.0;
  double lo = 0.0;
  double hi = 255.0;
};

struct NoiseSpec {
  std::variant<BlockOcclusion, PixelCorruption> variant;
  std::uint64_t seed = 0;
};

/// Occluded region size for an h x w image: a square of side
/// round(sqrt(fraction * h * w)) when it fits (the whole image at fraction 1), otherwise a full-width (or
/// full-height) band of the same area, clipped to the image.
std::pair<int, int> occlusion_extent(double fraction, int height, int width);

/// Number of corrupted coordinates: round-half-up of fraction * m.
Index corruption_count(double fraction, Index m);

/// Overwrites one uniformly placed region per column.
LabeledMatrix occlude(const LabeledMatrix& x, const BlockOcclusion& spec, std::uint64_t seed);

/// Replaces corruption_count(fraction, m) distinct coordinates per column
/// with Uniform[lo, hi) draws.
LabeledMatrix corrupt(const LabeledMatrix& x, const PixelCorruption& spec, std::uint64_t seed);

LabeledMatrix apply_noise(const LabeledMatrix& x, const NoiseSpec& spec);

enum class MatrixFormat { Csv, RawF64 };

/// CSV: one sample per row, comma-separated values, integer label last.
/// RawF64: "MRARC1", u32 m, u32 N, u32 has_labels (all little-endian),
/// m * N doubles in column-major order, then N int32 labels if present.
LabeledMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format);
void save_matrix(const std::filesystem::path& path, const LabeledMatrix& x, MatrixFormat format);

/// RawF64 when the file starts with the magic, CSV otherwise.
MatrixFormat detect_format(const std::filesystem::path& path);
LabeledMatrix load_matrix(const std::filesystem::path& path);

}  // namespace mrarc
