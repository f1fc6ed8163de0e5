#include "mrarc/data.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "mrarc/random.hpp"

namespace mrarc {

namespace {

constexpr char kMagic[] = {'M', 'R', 'A', 'R', 'C', '1'};
constexpr std::size_t kMagicSize = sizeof(kMagic);

void check_fraction(double f, const char* what) {
  if (!(f >= 0.0 && f <= 1.0)) {
    throw InvalidArgument(std::string(what) + ": fraction must lie in [0, 1], got " +
                          std::to_string(f));
  }
}

// Little-endian helpers, independent of host byte order.
void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffU));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffU));
}

std::uint64_t get_le(const std::string& in, std::size_t offset, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[offset + static_cast<std::size_t>(i)]))
         << (8 * i);
  }
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

LabeledMatrix parse_csv(const std::string& text, const std::string& name) {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::size_t width = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line = trim(std::string_view(text).substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.size() - start
                                                                              : comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    auto fail = [&](const std::string& why) -> ParseError {
      return ParseError(name + ": line " + std::to_string(line_no) + ": " + why, line_no, 0);
    };
    if (fields.size() < 2) throw fail("need at least one value and a label");
    if (width == 0) width = fields.size();
    if (fields.size() != width) {
      throw fail("expected " + std::to_string(width) + " fields, found " +
                 std::to_string(fields.size()));
    }
    std::vector<double> values(width - 1);
    for (std::size_t i = 0; i + 1 < width; ++i) {
      const auto f = fields[i];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), values[i]);
      if (ec != std::errc() || ptr != f.data() + f.size() || f.empty()) {
        throw fail("field " + std::to_string(i + 1) + " is not a number: '" + std::string(f) + "'");
      }
      if (!std::isfinite(values[i])) throw fail("field " + std::to_string(i + 1) + " is not finite");
    }
    int label = 0;
    const auto lf = fields.back();
    const auto [ptr, ec] = std::from_chars(lf.data(), lf.data() + lf.size(), label);
    if (ec != std::errc() || ptr != lf.data() + lf.size() || lf.empty()) {
      throw fail("label is not an integer: '" + std::string(lf) + "'");
    }
    if (label < 0) throw fail("label must be non-negative");
    rows.push_back(std::move(values));
    labels.push_back(label);
  }
  if (rows.empty()) throw ParseError(name + ": no samples", line_no, 0);

  LabeledMatrix out;
  out.samples.resize(static_cast<Index>(width - 1), static_cast<Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t i = 0; i + 1 < width; ++i) {
      out.samples(static_cast<Index>(i), static_cast<Index>(j)) = rows[j][i];
    }
  }
  out.labels = std::move(labels);
  return out;
}

std::string format_csv(const LabeledMatrix& x) {
  if (!x.has_labels()) throw InvalidArgument("CSV output needs one label per sample");
  std::string out;
  std::array<char, 64> buf{};
  for (Index j = 0; j < x.count(); ++j) {
    for (Index i = 0; i < x.dim(); ++i) {
      const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x.samples(i, j));
      out.append(buf.data(), res.ptr);
      out.push_back(',');
    }
    out += std::to_string(x.labels[static_cast<std::size_t>(j)]);
    out.push_back('\n');
  }
  return out;
}

LabeledMatrix parse_raw(const std::string& bytes, const std::string& name) {
  const std::size_t header = kMagicSize + 12;
  if (bytes.size() < kMagicSize || std::memcmp(bytes.data(), kMagic, kMagicSize) != 0) {
    throw MagicMismatch(name + ": missing MRARC1 magic");
  }
  if (bytes.size() < header) throw ParseError(name + ": truncated header", 0, bytes.size());
  const auto m = static_cast<std::size_t>(get_le(bytes, kMagicSize, 4));
  const auto n = static_cast<std::size_t>(get_le(bytes, kMagicSize + 4, 4));
  const auto has_labels = get_le(bytes, kMagicSize + 8, 4);
  if (has_labels > 1) {
    throw ParseError(name + ": has_labels must be 0 or 1", 0, kMagicSize + 8);
  }
  const std::size_t payload = m * n * 8 + (has_labels ? n * 4 : 0);
  if (bytes.size() != header + payload) {
    throw ParseError(name + ": expected " + std::to_string(header + payload) + " bytes, found " +
                         std::to_string(bytes.size()),
                     0, std::min(bytes.size(), header + payload));
  }
  LabeledMatrix out;
  out.samples.resize(static_cast<Index>(m), static_cast<Index>(n));
  std::size_t offset = header;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      const std::uint64_t word = get_le(bytes, offset, 8);
      double v = 0.0;
      std::memcpy(&v, &word, sizeof v);
      if (!std::isfinite(v)) throw ParseError(name + ": non-finite value", 0, offset);
      out.samples(static_cast<Index>(i), static_cast<Index>(j)) = v;
      offset += 8;
    }
  }
  if (has_labels) {
    out.labels.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const auto raw = static_cast<std::uint32_t>(get_le(bytes, offset, 4));
      const auto label = static_cast<std::int32_t>(raw);
      if (label < 0) throw ParseError(name + ": negative label", 0, offset);
      out.labels[j] = label;
      offset += 4;
    }
  }
  return out;
}

std::string format_raw(const LabeledMatrix& x) {
  std::string out(kMagic, kMagicSize);
  put_u32(out, static_cast<std::uint32_t>(x.dim()));
  put_u32(out, static_cast<std::uint32_t>(x.count()));
  put_u32(out, x.has_labels() ? 1U : 0U);
  for (Index j = 0; j < x.count(); ++j) {
    for (Index i = 0; i < x.dim(); ++i) {
      std::uint64_t word = 0;
      const double v = x.samples(i, j);
      std::memcpy(&word, &v, sizeof v);
      put_u64(out, word);
    }
  }
  for (int label : x.labels) put_u32(out, static_cast<std::uint32_t>(label));
  return out;
}

}  // namespace

void LabeledMatrix::validate() const {
  if (has_labels() && static_cast<Index>(labels.size()) != count()) {
    throw DimensionMismatch("LabeledMatrix: " + std::to_string(labels.size()) + " labels for " +
                            std::to_string(count()) + " samples");
  }
  for (int l : labels) {
    if (l < 0) throw InvalidArgument("LabeledMatrix: negative label");
  }
  if (image_shape && static_cast<Index>(image_shape->height) * image_shape->width != dim()) {
    throw GeometryMismatch("LabeledMatrix: image shape does not match sample length");
  }
}

void SyntheticSpec::validate() const {
  if (num_classes < 1) throw InvalidSpec("synthetic: num_classes must be at least 1");
  if (subspace_dim < 1) throw InvalidSpec("synthetic: subspace_dim must be at least 1");
  if (subspace_dim >= ambient_dim) throw InvalidSpec("synthetic: subspace_dim must be below ambient_dim");
  if (train_per_class < 1 || test_per_class < 1) {
    throw InvalidSpec("synthetic: per-class train and test counts must be at least 1");
  }
  if (!(coeff_scale > 0.0) || !std::isfinite(coeff_scale)) {
    throw InvalidSpec("synthetic: coeff_scale must be positive");
  }
  if (image_shape && (image_shape->height < 1 || image_shape->width < 1 ||
                      image_shape->height * image_shape->width != ambient_dim)) {
    throw InvalidSpec("synthetic: image shape must multiply to ambient_dim");
  }
}

std::pair<LabeledMatrix, LabeledMatrix> gen_subspace_data(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const Index m = spec.ambient_dim;
  const Index d = spec.subspace_dim;
  LabeledMatrix train;
  LabeledMatrix test;
  train.samples.resize(m, static_cast<Index>(spec.num_classes) * spec.train_per_class);
  test.samples.resize(m, static_cast<Index>(spec.num_classes) * spec.test_per_class);
  train.image_shape = test.image_shape = spec.image_shape;

  auto draw = [&](const Mat& basis) {
    Vec coeffs(d);
    for (Index i = 0; i < d; ++i) coeffs[i] = spec.coeff_scale * rng.normal();
    return Vec(basis * coeffs);
  };

  Index train_col = 0;
  Index test_col = 0;
  for (int k = 0; k < spec.num_classes; ++k) {
    Mat g(m, d);
    for (Index j = 0; j < d; ++j) {
      for (Index i = 0; i < m; ++i) g(i, j) = rng.normal();
    }
    const Mat basis = orthonormal_basis(g);
    for (int s = 0; s < spec.train_per_class; ++s) {
      train.samples.col(train_col++) = draw(basis);
      train.labels.push_back(k);
    }
    for (int s = 0; s < spec.test_per_class; ++s) {
      test.samples.col(test_col++) = draw(basis);
      test.labels.push_back(k);
    }
  }
  return {std::move(train), std::move(test)};
}

std::pair<int, int> occlusion_extent(double fraction, int height, int width) {
  check_fraction(fraction, "occlusion");
  if (fraction >= 1.0) return {height, width};
  const double area = fraction * height * width;
  const int side = static_cast<int>(std::floor(std::sqrt(area) + 0.5));
  if (side <= std::min(height, width)) return {side, side};
  if (width <= height) {
    const int h = std::min(height, static_cast<int>(std::floor(area / width + 0.5)));
    return {h, width};
  }
  const int w = std::min(width, static_cast<int>(std::floor(area / height + 0.5)));
  return {height, w};
}

Index corruption_count(double fraction, Index m) {
  check_fraction(fraction, "corruption");
  return std::min<Index>(m, static_cast<Index>(std::floor(fraction * static_cast<double>(m) + 0.5)));
}

LabeledMatrix occlude(const LabeledMatrix& x, const BlockOcclusion& spec, std::uint64_t seed) {
  if (!x.image_shape) throw GeometryMismatch("occlude: samples carry no image shape");
  const int h = x.image_shape->height;
  const int w = x.image_shape->width;
  if (static_cast<Index>(h) * w != x.dim()) {
    throw GeometryMismatch("occlude: image shape " + std::to_string(h) + "x" + std::to_string(w) +
                           " does not match sample length " + std::to_string(x.dim()));
  }
  const auto [rh, rw] = occlusion_extent(spec.fraction, h, w);
  LabeledMatrix out = x;
  if (rh == 0 || rw == 0) return out;

  const auto* patch = std::get_if<PatchFill>(&spec.fill);
  if (patch != nullptr && patch->patch.size() == 0) throw InvalidArgument("occlude: empty patch");
  const auto* uniform = std::get_if<UniformFill>(&spec.fill);
  if (uniform != nullptr && !(uniform->lo <= uniform->hi)) {
    throw InvalidArgument("occlude: fill range has lo > hi");
  }

  Rng rng(seed);
  for (Index j = 0; j < out.count(); ++j) {
    const int top = static_cast<int>(rng.below(static_cast<std::uint64_t>(h - rh + 1)));
    const int left = static_cast<int>(rng.below(static_cast<std::uint64_t>(w - rw + 1)));
    for (int r = 0; r < rh; ++r) {
      for (int c = 0; c < rw; ++c) {
        double v = 0.0;
        if (patch != nullptr) {
          const Index pr = static_cast<Index>(r) * patch->patch.rows() / rh;
          const Index pc = static_cast<Index>(c) * patch->patch.cols() / rw;
          v = patch->patch(pr, pc);
        } else {
          v = rng.uniform(uniform->lo, uniform->hi);
        }
        out.samples(static_cast<Index>(top + r) * w + left + c, j) = v;
      }
    }
  }
  return out;
}

LabeledMatrix corrupt(const LabeledMatrix& x, const PixelCorruption& spec, std::uint64_t seed) {
  if (!(spec.lo <= spec.hi)) throw InvalidArgument("corrupt: range has lo > hi");
  const Index m = x.dim();
  const Index count = corruption_count(spec.fraction, m);
  LabeledMatrix out = x;
  if (count == 0) return out;

  Rng rng(seed);
  std::vector<Index> idx(static_cast<std::size_t>(m));
  for (Index j = 0; j < out.count(); ++j) {
    std::iota(idx.begin(), idx.end(), Index{0});
    for (Index i = 0; i < count; ++i) {
      const auto pick = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(m - i)));
      std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick)]);
      out.samples(idx[static_cast<std::size_t>(i)], j) = rng.uniform(spec.lo, spec.hi);
    }
  }
  return out;
}

LabeledMatrix apply_noise(const LabeledMatrix& x, const NoiseSpec& spec) {
  if (const auto* occ = std::get_if<BlockOcclusion>(&spec.variant)) return occlude(x, *occ, spec.seed);
  return corrupt(x, std::get<PixelCorruption>(spec.variant), spec.seed);
}

LabeledMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format) {
  const std::string bytes = read_file(path);
  LabeledMatrix out = format == MatrixFormat::Csv ? parse_csv(bytes, path.string())
                                                  : parse_raw(bytes, path.string());
  out.validate();
  return out;
}

void save_matrix(const std::filesystem::path& path, const LabeledMatrix& x, MatrixFormat format) {
  x.validate();
  write_file(path, format == MatrixFormat::Csv ? format_csv(x) : format_raw(x));
}

MatrixFormat detect_format(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char head[kMagicSize] = {};
  in.read(head, kMagicSize);
  if (in.gcount() == static_cast<std::streamsize>(kMagicSize) &&
      std::memcmp(head, kMagic, kMagicSize) == 0) {
    return MatrixFormat::RawF64;
  }
  return MatrixFormat::Csv;
}

LabeledMatrix load_matrix(const std::filesystem::path& path) {
  return load_matrix(path, detect_format(path));
}

}  // namespace mrarc
