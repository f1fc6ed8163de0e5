#include "mrarc/experiment.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mrarc/random.hpp"

namespace mrarc {

namespace {

using nlohmann::json;

[[noreturn]] void config_fail(const std::string& field, const std::string& why) {
  throw ConfigError("config field '" + field + "': " + why);
}

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; }) == allowed.end()) {
      config_fail(where.empty() ? key : where + "." + key, "unknown field");
    }
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) config_fail(where + "." + key, "missing");
  return *it;
}

double get_number(const json& v, const std::string& field) {
  if (!v.is_number()) config_fail(field, "expected a number");
  return v.get<double>();
}

double get_positive(const json& v, const std::string& field) {
  const double d = get_number(v, field);
  if (!(d > 0.0) || !std::isfinite(d)) config_fail(field, "must be positive");
  return d;
}

long long get_integer(const json& v, const std::string& field, long long min_value) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) config_fail(field, "expected an integer");
  const long long i = v.get<long long>();
  if (i < min_value) config_fail(field, "must be at least " + std::to_string(min_value));
  return i;
}

bool get_bool(const json& v, const std::string& field) {
  if (!v.is_boolean()) config_fail(field, "expected true or false");
  return v.get<bool>();
}

std::string get_string(const json& v, const std::string& field) {
  if (!v.is_string()) config_fail(field, "expected a string");
  return v.get<std::string>();
}

ImageShape get_shape(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 2) config_fail(field, "expected [height, width]");
  return ImageShape{static_cast<int>(get_integer(v[0], field + "[0]", 1)),
                    static_cast<int>(get_integer(v[1], field + "[1]", 1))};
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

MethodEntry parse_method_entry(const json& m, const std::string& where) {
  if (!m.is_object()) config_fail(where, "expected an object");
  reject_unknown(m, where,
                 {"method", "label", "lambda", "mu", "epsilon", "max_iter", "hq_inner_tol",
                  "hq_inner_max", "sigma", "min_sigma", "loss"});
  const std::string name = get_string(require(m, "method", where), where + ".method");
  Method method;
  try {
    method = parse_method(name);
  } catch (const InvalidArgument& e) {
    config_fail(where + ".method", e.what());
  }
  if (is_multimodal(method)) {
    config_fail(where + ".method", name + " needs multimodal data, which bench does not generate");
  }
  MethodEntry entry;
  entry.label = m.contains("label") ? get_string(m["label"], where + ".label")
                                    : std::string(method_name(method));
  const double lambda = m.contains("lambda") ? get_positive(m["lambda"], where + ".lambda") : 1e-3;
  entry.spec = ClassifierSpec::make(method, lambda);
  SolverConfig& cfg = entry.spec.solver;
  if (m.contains("mu")) cfg.mu = get_positive(m["mu"], where + ".mu");
  if (m.contains("epsilon")) cfg.epsilon = get_positive(m["epsilon"], where + ".epsilon");
  if (m.contains("max_iter")) {
    cfg.max_iter = static_cast<std::size_t>(get_integer(m["max_iter"], where + ".max_iter", 1));
  }
  if (m.contains("hq_inner_tol")) {
    cfg.hq_inner_tol = get_number(m["hq_inner_tol"], where + ".hq_inner_tol");
    if (cfg.hq_inner_tol < 0.0) config_fail(where + ".hq_inner_tol", "must be non-negative");
  }
  if (m.contains("hq_inner_max")) {
    cfg.hq_inner_max =
        static_cast<std::size_t>(get_integer(m["hq_inner_max"], where + ".hq_inner_max", 1));
  }
  if (m.contains("loss")) {
    const std::string loss = get_string(m["loss"], where + ".loss");
    if (loss == "modal") {
      cfg.loss = ModalLoss{};
    } else if (loss == "squared") {
      cfg.loss = SquaredLoss{};
    } else {
      config_fail(where + ".loss", "expected \"modal\" or \"squared\"");
    }
  }
  if (m.contains("sigma") || m.contains("min_sigma")) {
    auto* modal = std::get_if<ModalLoss>(&cfg.loss);
    if (modal == nullptr) config_fail(where + ".sigma", "only meaningful with the modal loss");
    if (m.contains("sigma") && !(m["sigma"].is_string() && m["sigma"] == "adaptive")) {
      modal->sigma_policy = FixedSigma{get_positive(m["sigma"], where + ".sigma")};
    } else {
      AdaptiveSigma a;
      if (m.contains("min_sigma")) a.min_sigma = get_positive(m["min_sigma"], where + ".min_sigma");
      modal->sigma_policy = a;
    }
  }
  return entry;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void normalize_columns(Mat& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    const double norm = m.col(j).norm();
    if (norm > 0.0) m.col(j) /= norm;
  }
}

struct CellOutcome {
  std::size_t correct = 0;
  std::size_t iterations = 0;
  std::size_t unconverged = 0;
};

CellOutcome classify_all(const Classifier& classifier, const Mat& queries,
                         const std::vector<int>& labels, int threads) {
  const Index count = queries.cols();
  std::vector<ClassificationResult> results(static_cast<std::size_t>(count));
  auto work = [&](Index j) { results[static_cast<std::size_t>(j)] = classifier.classify(queries.col(j)); };

  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(count)));
  if (workers == 1) {
    for (Index j = 0; j < count; ++j) work(j);
  } else {
    std::atomic<Index> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (Index j = next++; j < count; j = next++) work(j);
        } catch (...) {
          errors[static_cast<std::size_t>(t)] = std::current_exception();
          next = count;
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  CellOutcome out;
  for (std::size_t j = 0; j < results.size(); ++j) {
    if (results[j].label == labels[j]) ++out.correct;
    out.iterations += results[j].iterations;
    if (!results[j].converged) ++out.unconverged;
  }
  return out;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (methods.empty()) throw ConfigError("config field 'methods': need at least one method");
  if (noise.levels.empty()) throw ConfigError("config field 'noise.levels': need at least one level");
  if (repeats < 1) throw ConfigError("config field 'repeats': must be at least 1");
  if (threads < 1) throw ConfigError("config field 'threads': must be at least 1");
  if (!synthetic && (train_path.empty() || test_path.empty())) {
    throw ConfigError("config field 'data': need a synthetic block or train and test paths");
  }
  for (double level : noise.levels) {
    if (!(level >= 0.0 && level <= 1.0)) {
      throw ConfigError("config field 'noise.levels': levels must lie in [0, 1]");
    }
  }
  if (!(noise.lo <= noise.hi)) throw ConfigError("config field 'noise.range': lo exceeds hi");
  if (synthetic) {
    try {
      synthetic->validate();
    } catch (const InvalidSpec& e) {
      throw ConfigError(std::string("config field 'data.synthetic': ") + e.what());
    }
  }
}

ExperimentSpec parse_experiment(std::string_view json_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(root, "",
                 {"data", "noise", "methods", "repeats", "seed", "normalize_queries",
                  "record_wall_time", "threads"});

  ExperimentSpec spec;
  const json& data = require(root, "data", "config");
  if (!data.is_object()) config_fail("data", "expected an object");
  reject_unknown(data, "data", {"synthetic", "train", "test", "image_shape"});
  if (data.contains("synthetic")) {
    const json& s = data["synthetic"];
    if (!s.is_object()) config_fail("data.synthetic", "expected an object");
    reject_unknown(s, "data.synthetic",
                   {"classes", "subspace_dim", "ambient_dim", "train_per_class", "test_per_class",
                    "coeff_scale", "image_shape"});
    SyntheticSpec syn;
    auto int_field = [&](const char* key, int& dst) {
      if (s.contains(key)) dst = static_cast<int>(get_integer(s[key], std::string("data.synthetic.") + key, 1));
    };
    int_field("classes", syn.num_classes);
    int_field("subspace_dim", syn.subspace_dim);
    int_field("ambient_dim", syn.ambient_dim);
    int_field("train_per_class", syn.train_per_class);
    int_field("test_per_class", syn.test_per_class);
    if (s.contains("coeff_scale")) syn.coeff_scale = get_positive(s["coeff_scale"], "data.synthetic.coeff_scale");
    if (s.contains("image_shape")) syn.image_shape = get_shape(s["image_shape"], "data.synthetic.image_shape");
    spec.synthetic = syn;
    if (data.contains("train") || data.contains("test")) {
      config_fail("data", "give either a synthetic block or train/test paths, not both");
    }
  } else {
    spec.train_path = resolve(base_dir, get_string(require(data, "train", "data"), "data.train"));
    spec.test_path = resolve(base_dir, get_string(require(data, "test", "data"), "data.test"));
  }
  if (data.contains("image_shape")) spec.image_shape = get_shape(data["image_shape"], "data.image_shape");

  if (root.contains("noise")) {
    const json& n = root["noise"];
    if (!n.is_object()) config_fail("noise", "expected an object");
    reject_unknown(n, "noise", {"type", "levels", "range", "relative_to_signal", "patch"});
    const std::string type = get_string(require(n, "type", "noise"), "noise.type");
    if (type == "none") {
      spec.noise.kind = NoiseKind::None;
    } else if (type == "pixel_corruption") {
      spec.noise.kind = NoiseKind::PixelCorruption;
    } else if (type == "block_occlusion") {
      spec.noise.kind = NoiseKind::BlockOcclusion;
    } else {
      config_fail("noise.type", "expected none, pixel_corruption or block_occlusion");
    }
    if (n.contains("levels")) {
      const json& levels = n["levels"];
      if (!levels.is_array() || levels.empty()) config_fail("noise.levels", "expected a non-empty array");
      spec.noise.levels.clear();
      for (std::size_t i = 0; i < levels.size(); ++i) {
        const double v = get_number(levels[i], "noise.levels[" + std::to_string(i) + "]");
        if (!(v >= 0.0 && v <= 1.0)) config_fail("noise.levels[" + std::to_string(i) + "]", "must lie in [0, 1]");
        spec.noise.levels.push_back(v);
      }
    }
    if (n.contains("range")) {
      const json& r = n["range"];
      if (!r.is_array() || r.size() != 2) config_fail("noise.range", "expected [lo, hi]");
      spec.noise.lo = get_number(r[0], "noise.range[0]");
      spec.noise.hi = get_number(r[1], "noise.range[1]");
      if (!(spec.noise.lo <= spec.noise.hi)) config_fail("noise.range", "lo exceeds hi");
    }
    if (n.contains("relative_to_signal")) {
      spec.noise.relative_to_signal = get_bool(n["relative_to_signal"], "noise.relative_to_signal");
    }
    if (n.contains("patch")) {
      const auto path = resolve(base_dir, get_string(n["patch"], "noise.patch"));
      try {
        spec.noise.patch = load_matrix(path).samples.transpose();
      } catch (const Error& e) {
        config_fail("noise.patch", e.what());
      }
    }
  }

  const json& methods = require(root, "methods", "config");
  if (!methods.is_array() || methods.empty()) config_fail("methods", "expected a non-empty array");
  for (std::size_t i = 0; i < methods.size(); ++i) {
    spec.methods.push_back(parse_method_entry(methods[i], "methods[" + std::to_string(i) + "]"));
  }

  if (root.contains("repeats")) spec.repeats = static_cast<int>(get_integer(root["repeats"], "repeats", 1));
  if (root.contains("seed")) spec.seed = static_cast<std::uint64_t>(get_integer(root["seed"], "seed", 0));
  if (root.contains("normalize_queries")) {
    spec.normalize_queries = get_bool(root["normalize_queries"], "normalize_queries");
  }
  if (root.contains("record_wall_time")) {
    spec.record_wall_time = get_bool(root["record_wall_time"], "record_wall_time");
  }
  if (root.contains("threads")) spec.threads = static_cast<int>(get_integer(root["threads"], "threads", 1));
  spec.validate();
  return spec;
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_experiment(ss.str(), path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult result;

  std::optional<LabeledMatrix> file_train;
  std::optional<LabeledMatrix> file_test;
  if (!spec.synthetic) {
    file_train = load_matrix(spec.train_path);
    file_test = load_matrix(spec.test_path);
    if (!file_train->has_labels() || !file_test->has_labels()) {
      throw ConfigError("config field 'data': train and test files need labels");
    }
    if (spec.image_shape) file_train->image_shape = file_test->image_shape = spec.image_shape;
  }

  for (int r = 0; r < spec.repeats; ++r) {
    const std::uint64_t repeat_seed = spec.seed + static_cast<std::uint64_t>(r);
    LabeledMatrix train;
    LabeledMatrix test;
    if (spec.synthetic) {
      SyntheticSpec syn = *spec.synthetic;
      syn.seed = repeat_seed;
      std::tie(train, test) = gen_subspace_data(syn);
    } else {
      train = *file_train;
      test = *file_test;
    }
    const double signal_rms =
        train.samples.size() > 0
            ? std::sqrt(train.samples.squaredNorm() / static_cast<double>(train.samples.size()))
            : 0.0;
    const double scale = spec.noise.relative_to_signal ? signal_rms : 1.0;
    const Dictionary dict(train.samples, train.labels);

    for (std::size_t l = 0; l < spec.noise.levels.size(); ++l) {
      const double level = spec.noise.levels[l];
      LabeledMatrix noisy = test;
      const std::uint64_t noise_seed = mix_seed(repeat_seed, l);
      if (spec.noise.kind == NoiseKind::PixelCorruption) {
        noisy = corrupt(test, PixelCorruption{level, scale * spec.noise.lo, scale * spec.noise.hi}, noise_seed);
      } else if (spec.noise.kind == NoiseKind::BlockOcclusion) {
        BlockOcclusion occ{level, UniformFill{scale * spec.noise.lo, scale * spec.noise.hi}};
        if (spec.noise.patch) occ.fill = PatchFill{*spec.noise.patch};
        noisy = occlude(test, occ, noise_seed);
      }
      if (spec.normalize_queries) normalize_columns(noisy.samples);

      for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
        const MethodEntry& method = spec.methods[mi];
        CellResult cell;
        cell.method = method.label;
        cell.method_index = mi;
        cell.noise_level = level;
        cell.level_index = l;
        cell.repeat = r;
        const auto start = std::chrono::steady_clock::now();
        try {
          const Classifier classifier(dict, method.spec);
          const CellOutcome outcome = classify_all(classifier, noisy.samples, noisy.labels, spec.threads);
          const double count = static_cast<double>(noisy.count());
          cell.accuracy = static_cast<double>(outcome.correct) / count;
          cell.mean_solver_iters = static_cast<double>(outcome.iterations) / count;
          cell.unconverged = outcome.unconverged;
        } catch (const std::exception& e) {
          cell.accuracy = std::numeric_limits<double>::quiet_NaN();
          cell.mean_solver_iters = std::numeric_limits<double>::quiet_NaN();
          cell.error = e.what();
        }
        if (spec.record_wall_time) {
          cell.wall_time_ms = std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - start)
                                  .count();
        }
        result.cells.push_back(std::move(cell));
      }
    }
  }

  std::stable_sort(result.cells.begin(), result.cells.end(), [](const CellResult& a, const CellResult& b) {
    return std::tie(a.method_index, a.level_index, a.repeat) <
           std::tie(b.method_index, b.level_index, b.repeat);
  });
  return result;
}

std::string to_csv(const ExperimentResult& result) {
  std::string out(kCsvHeader);
  out.push_back('\n');
  for (const CellResult& c : result.cells) {
    out += c.method;
    out += ',' + format_double(c.noise_level);
    out += ',' + std::to_string(c.repeat);
    out += ',' + format_double(c.accuracy);
    out += ',' + format_double(c.mean_solver_iters);
    out += ',' + format_double(c.wall_time_ms);
    out.push_back('\n');
  }
  return out;
}

std::string summary_json(const ExperimentSpec& spec, const ExperimentResult& result) {
  json cells = json::array();
  for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
    for (std::size_t l = 0; l < spec.noise.levels.size(); ++l) {
      std::vector<const CellResult*> group;
      for (const CellResult& c : result.cells) {
        if (c.method_index == mi && c.level_index == l) group.push_back(&c);
      }
      double sum = 0.0;
      double iters = 0.0;
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      std::size_t ok = 0;
      std::size_t unconverged = 0;
      json errors = json::array();
      for (const CellResult* c : group) {
        unconverged += c->unconverged;
        if (c->error) {
          errors.push_back({{"repeat", c->repeat}, {"message", *c->error}});
          continue;
        }
        ++ok;
        sum += c->accuracy;
        iters += c->mean_solver_iters;
        lo = std::min(lo, c->accuracy);
        hi = std::max(hi, c->accuracy);
      }
      json cell = {{"method", spec.methods[mi].label},
                   {"noise_level", spec.noise.levels[l]},
                   {"repeats", group.size()},
                   {"unconverged", unconverged},
                   {"errors", errors}};
      if (ok > 0) {
        cell["accuracy"] = {{"mean", sum / static_cast<double>(ok)}, {"min", lo}, {"max", hi}};
        cell["mean_solver_iters"] = iters / static_cast<double>(ok);
      } else {
        cell["accuracy"] = nullptr;
        cell["mean_solver_iters"] = nullptr;
      }
      cells.push_back(std::move(cell));
    }
  }
  json root = {{"seed", spec.seed}, {"repeats", spec.repeats}, {"cells", cells}};
  return root.dump(2) + "\n";
}

}  // namespace mrarc
