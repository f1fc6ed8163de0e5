// mrarc: synthetic data generation, classification and benchmark sweeps.
//
// Exit codes: 0 success, 1 runtime error, 2 usage or configuration error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "mrarc/classify.hpp"
#include "mrarc/data.hpp"
#include "mrarc/experiment.hpp"
#include "mrarc/modal.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kRuntimeError = 1;
constexpr int kConfigError = 2;

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw mrarc::ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary | std::ios::trunc);
  if (!f) throw mrarc::IoError("cannot write " + out);
  f << text;
}

mrarc::SyntheticSpec synthetic_from_config(const std::string& config_path) {
  mrarc::SyntheticSpec spec;
  if (config_path.empty()) return spec;
  // Reuse the bench schema: wrap the block as a one-method experiment.
  json root;
  try {
    root = json::parse(read_text(config_path));
  } catch (const json::parse_error& e) {
    throw mrarc::ConfigError(config_path + ": not valid JSON: " + e.what());
  }
  json synthetic = root.contains("data") ? root["data"].value("synthetic", json::object())
                                         : root.value("synthetic", json::object());
  json wrapped = {{"data", {{"synthetic", synthetic}}},
                  {"methods", json::array({{{"method", "CRC"}}})}};
  try {
    return *mrarc::parse_experiment(wrapped.dump()).synthetic;
  } catch (const mrarc::ConfigError& e) {
    throw mrarc::ConfigError(config_path + ": " + e.what());
  }
}

int run_gen(const std::string& config, std::optional<std::uint64_t> seed, const std::string& out,
            const std::string& data_format) {
  mrarc::SyntheticSpec spec = synthetic_from_config(config);
  if (seed) spec.seed = *seed;
  const auto format = data_format == "raw" ? mrarc::MatrixFormat::RawF64 : mrarc::MatrixFormat::Csv;
  const std::string ext = format == mrarc::MatrixFormat::Csv ? ".csv" : ".f64";
  fs::create_directories(out);
  const auto [train, test] = mrarc::gen_subspace_data(spec);
  mrarc::save_matrix(fs::path(out) / ("train" + ext), train, format);
  mrarc::save_matrix(fs::path(out) / ("test" + ext), test, format);
  return 0;
}

int run_classify(const std::string& dict_path, const std::string& query_path,
                 const std::string& method, double lambda, const std::string& format,
                 const std::string& out) {
  const mrarc::LabeledMatrix train = mrarc::load_matrix(dict_path);
  if (!train.has_labels()) throw mrarc::ConfigError(dict_path + ": dictionary needs labels");
  const mrarc::LabeledMatrix queries = mrarc::load_matrix(query_path);
  mrarc::Method m;
  try {
    m = mrarc::parse_method(method);
  } catch (const mrarc::InvalidArgument& e) {
    throw mrarc::ConfigError(std::string("--method: ") + e.what());
  }
  if (mrarc::is_multimodal(m)) throw mrarc::ConfigError("--method: multimodal methods are library-only");
  const mrarc::Dictionary dict(train.samples, train.labels);
  const mrarc::Classifier classifier(dict, mrarc::ClassifierSpec::make(m, lambda));

  std::string text;
  json rows = json::array();
  for (mrarc::Index j = 0; j < queries.count(); ++j) {
    const auto result = classifier.classify(queries.samples.col(j));
    if (format == "json") {
      rows.push_back({{"index", j}, {"label", result.label}, {"residuals", result.residuals},
                      {"iterations", result.iterations}, {"converged", result.converged}});
    } else {
      text += std::to_string(result.label) + "\n";
    }
  }
  if (format == "json") text = rows.dump(2) + "\n";
  write_output(text, out);
  return 0;
}

int run_bench(const std::string& config, std::optional<std::uint64_t> seed, const std::string& out,
              const std::string& format) {
  mrarc::ExperimentSpec spec = mrarc::load_experiment(config);
  if (seed) spec.seed = *seed;
  const mrarc::ExperimentResult result = mrarc::run_experiment(spec);
  write_output(format == "json" ? mrarc::summary_json(spec, result) : mrarc::to_csv(result), out);
  return 0;
}

int run_modecheck(const std::string& input, const std::string& kernel, double sigma,
                  const std::string& format, const std::string& out) {
  std::ifstream in(input);
  if (!in) throw mrarc::ConfigError("cannot read residual file " + input);
  std::vector<double> values;
  std::string token;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    for (char& ch : line) {
      if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
    }
    std::istringstream ls(line);
    while (ls >> token) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size() || !std::isfinite(v)) {
        throw mrarc::ParseError(input + ": line " + std::to_string(line_no) + ": bad value '" +
                                    token + "'",
                                line_no, 0);
      }
      values.push_back(v);
    }
  }
  const mrarc::Vec samples = Eigen::Map<const mrarc::Vec>(values.data(), static_cast<mrarc::Index>(values.size()));
  if (samples.size() == 0) throw mrarc::EmptyInput(input + ": no residuals");
  const mrarc::Kernel k =
      kernel == "epanechnikov" ? mrarc::Kernel::epanechnikov() : mrarc::Kernel::gaussian(sigma);
  const double mode = mrarc::estimate_mode(k, samples);
  const double mean = samples.mean();
  const double at_mode = mrarc::parzen_density(k, samples, mode);
  const double at_zero = mrarc::parzen_density(k, samples, 0.0);

  std::ostringstream os;
  os.precision(10);
  if (format == "json") {
    json j = {{"samples", samples.size()}, {"kernel", kernel}, {"mode", mode}, {"mean", mean},
              {"density_at_mode", at_mode}, {"density_at_zero", at_zero}};
    if (kernel == "gaussian") j["sigma"] = sigma;
    os << j.dump(2) << "\n";
  } else {
    os << "samples,mode,mean,density_at_mode,density_at_zero\n"
       << samples.size() << ',' << mode << ',' << mean << ',' << at_mode << ',' << at_zero << "\n";
  }
  write_output(os.str(), out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust representation classifiers with a modal loss: data, classification, benchmarks"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;

  auto* gen = app.add_subcommand("gen", "Write a synthetic union-of-subspaces dataset");
  std::string data_format = "csv";
  gen->add_option("--config", config, "JSON file with a synthetic block");
  gen->add_option("--seed", seed, "Generator seed");
  gen->add_option("--out", out, "Output directory")->required();
  gen->add_option("--data-format", data_format, "csv or raw")->check(CLI::IsMember({"csv", "raw"}));

  auto* cls = app.add_subcommand("classify", "Classify query samples against a dictionary file");
  std::string dict_path;
  std::string query_path;
  std::string method = "MRSRC";
  double lambda = 1e-3;
  cls->add_option("--dict", dict_path, "Labeled training matrix (CSV or RawF64)")->required();
  cls->add_option("--query", query_path, "Query matrix (CSV or RawF64)")->required();
  cls->add_option("--method", method, "MRSRC, MRBSRC, MRCRC, SRC, BSRC, CRC or LRC");
  cls->add_option("--lambda", lambda, "Regularization weight")->check(CLI::PositiveNumber);
  cls->add_option("--out", out, "Output file (default stdout)");
  cls->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* bench = app.add_subcommand("bench", "Run an experiment sweep from a JSON config");
  bench->add_option("--config", config, "Experiment config")->required();
  bench->add_option("--seed", seed, "Override the config seed");
  bench->add_option("--out", out, "Output file (default stdout)");
  bench->add_option("--format", format, "csv rows or json summary")->check(CLI::IsMember({"csv", "json"}));

  auto* mode = app.add_subcommand("modecheck", "Estimate the mode of a residual sample");
  std::string input;
  std::string kernel = "gaussian";
  double sigma = 0.1;
  mode->add_option("--input", input, "Residual values (whitespace or comma separated)")->required();
  mode->add_option("--kernel", kernel, "gaussian or epanechnikov")
      ->check(CLI::IsMember({"gaussian", "epanechnikov"}));
  mode->add_option("--sigma", sigma, "Gaussian bandwidth")->check(CLI::PositiveNumber);
  mode->add_option("--out", out, "Output file (default stdout)");
  mode->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*gen) return run_gen(config, seed, out, data_format);
    if (*cls) return run_classify(dict_path, query_path, method, lambda, format, out);
    if (*bench) return run_bench(config, seed, out, format);
    if (*mode) return run_modecheck(input, kernel, sigma, format, out);
  } catch (const mrarc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return 0;
}
