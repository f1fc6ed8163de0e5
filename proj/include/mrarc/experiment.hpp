#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mrarc/classify.hpp"
#include "mrarc/data.hpp"

namespace mrarc {

enum class NoiseKind { None, PixelCorruption, BlockOcclusion };

/// Noise applied to the test split, one sweep level at a time. With
/// `relative_to_signal`, lo and hi are multiples of the root-mean-square
/// entry of the clean training samples.
struct NoiseSweep {
  NoiseKind kind = NoiseKind::None;
  std::vector<double> levels{0.0};
  double lo = 0.0;
  double hi = 255.0;
  bool relative_to_signal = false;
  std::optional<Mat> patch;  // block occlusion fill; uniform when absent
};

struct MethodEntry {
  std::string label;
  ClassifierSpec spec;
};

struct ExperimentSpec {
  std::optional<SyntheticSpec> synthetic;
  std::filesystem::path train_path;
  std::filesystem::path test_path;
  std::optional<ImageShape> image_shape;  // for file data

  NoiseSweep noise;
  std::vector<MethodEntry> methods;
  int repeats = 1;
  std::uint64_t seed = 0;
  bool normalize_queries = true;
  bool record_wall_time = false;
  int threads = 1;

  void validate() const;
};

/// Parses the JSON config. Throws ConfigError naming the offending field.
/// Relative file paths resolve against `base_dir`.
ExperimentSpec parse_experiment(std::string_view json_text,
                                const std::filesystem::path& base_dir = {});
ExperimentSpec load_experiment(const std::filesystem::path& path);

struct CellResult {
  std::string method;
  std::size_t method_index = 0;
  double noise_level = 0.0;
  std::size_t level_index = 0;
  int repeat = 0;
  double accuracy = 0.0;
  double mean_solver_iters = 0.0;
  double wall_time_ms = 0.0;
  std::size_t unconverged = 0;
  std::optional<std::string> error;
};

struct ExperimentResult {
  /// Sorted by (method, level, repeat).
  std::vector<CellResult> cells;
};

inline constexpr std::string_view kCsvHeader =
    "method,noise_level,repeat,accuracy,mean_solver_iters,wall_time_ms";

/// Repeat r uses data seed `seed + r`; the noise seed of level l in repeat
/// r is mix_seed(seed + r, l). Every method in one (level, repeat) cell
/// sees the same corrupted test split.
ExperimentResult run_experiment(const ExperimentSpec& spec);

std::string to_csv(const ExperimentResult& result);
/// Mean, min and max accuracy per (method, level) over repeats.
std::string summary_json(const ExperimentSpec& spec, const ExperimentResult& result);

}  // namespace mrarc
