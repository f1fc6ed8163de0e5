#include "mrarc/classify.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

namespace mrarc {

namespace {

constexpr std::pair<Method, std::string_view> kMethodNames[] = {
    {Method::MRSRC, "MRSRC"}, {Method::MRBSRC, "MRBSRC"}, {Method::MRCRC, "MRCRC"},
    {Method::SRC, "SRC"},     {Method::BSRC, "BSRC"},     {Method::CRC, "CRC"},
    {Method::LRC, "LRC"},     {Method::MRJSRC, "MRJSRC"}, {Method::JSRC, "JSRC"},
};

AtomicSet atomic_set_for(const ClassifierSpec& spec, const Dictionary& dict) {
  switch (spec.method) {
    case Method::MRSRC:
    case Method::SRC:
      return Sparse{};
    case Method::MRBSRC:
    case Method::BSRC:
      return Block{spec.block_partition.value_or(Partition::from_labels(dict.class_of()))};
    case Method::MRCRC:
    case Method::CRC:
      return Collaborative{};
    case Method::MRJSRC:
    case Method::JSRC:
      return JointRows{};
    case Method::LRC:
      break;
  }
  throw InvalidArgument("no atomic set for method " + std::string(method_name(spec.method)));
}

// y - A_k c_k for class k.
Vec class_residual(const Dictionary& dict, const Vec& y, const Vec& c, int k) {
  Vec r = y;
  const Mat& a = dict.atoms();
  for (Index j : dict.columns_of(k)) {
    if (c[j] != 0.0) r.noalias() -= c[j] * a.col(j);
  }
  return r;
}

double residual_value(const Vec& r, const std::vector<double>& sigma, std::size_t modality) {
  if (sigma.empty()) return r.norm();
  return mrlf(r, sigma[modality]);
}

}  // namespace

Dictionary::Dictionary(Mat a, std::vector<int> class_of, int num_classes)
    : a_(std::move(a)), class_of_(std::move(class_of)), num_classes_(num_classes) {
  if (static_cast<Index>(class_of_.size()) != a_.cols()) {
    throw DimensionMismatch("Dictionary: " + std::to_string(class_of_.size()) +
                            " labels for " + std::to_string(a_.cols()) + " columns");
  }
  if (num_classes_ < 1) throw InvalidArgument("Dictionary: need at least one class");
  require_finite(a_, "dictionary");
  members_.assign(static_cast<std::size_t>(num_classes_), {});
  for (Index j = 0; j < a_.cols(); ++j) {
    const int k = class_of_[static_cast<std::size_t>(j)];
    if (k < 0 || k >= num_classes_) {
      throw IndexOutOfRange("Dictionary: label " + std::to_string(k) + " out of range");
    }
    members_[static_cast<std::size_t>(k)].push_back(j);
    const double norm = a_.col(j).norm();
    if (norm == 0.0) {
      throw InvalidArgument("Dictionary: column " + std::to_string(j) + " is zero");
    }
    a_.col(j) /= norm;
  }
  for (int k = 0; k < num_classes_; ++k) {
    if (members_[static_cast<std::size_t>(k)].empty()) {
      throw InvalidArgument("Dictionary: class " + std::to_string(k) + " has no columns");
    }
  }
}

Dictionary::Dictionary(Mat a, std::vector<int> class_of)
    : Dictionary(std::move(a), class_of,
                 class_of.empty() ? 0 : *std::max_element(class_of.begin(), class_of.end()) + 1) {}

const std::vector<Index>& Dictionary::columns_of(int k) const {
  if (k < 0 || k >= num_classes_) {
    throw IndexOutOfRange("class " + std::to_string(k) + " out of range");
  }
  return members_[static_cast<std::size_t>(k)];
}

Mat Dictionary::class_atoms(int k) const {
  const auto& cols = columns_of(k);
  Mat out(a_.rows(), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Index>(i)) = a_.col(cols[i]);
  return out;
}

std::string_view method_name(Method m) {
  for (const auto& [method, name] : kMethodNames) {
    if (method == m) return name;
  }
  return "?";
}

Method parse_method(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
  for (const auto& [method, n] : kMethodNames) {
    if (n == upper) return method;
  }
  throw InvalidArgument("unknown method '" + std::string(name) + "'");
}

bool is_multimodal(Method m) { return m == Method::MRJSRC || m == Method::JSRC; }

bool is_modal(Method m) {
  return m == Method::MRSRC || m == Method::MRBSRC || m == Method::MRCRC ||
         m == Method::MRJSRC;
}

ClassifierSpec ClassifierSpec::make(Method method, double lambda) {
  ClassifierSpec spec;
  spec.method = method;
  spec.solver.lambda = lambda;
  if (is_modal(method)) {
    spec.solver.loss = ModalLoss{};
  } else {
    spec.solver.loss = SquaredLoss{};
  }
  return spec;
}

Vec restrict_to_class(const Vec& c, const Dictionary& dict, int k) {
  if (c.size() != dict.cols()) {
    throw DimensionMismatch("restrict_to_class: coefficient length does not match dictionary");
  }
  Vec out = Vec::Zero(c.size());
  for (Index j : dict.columns_of(k)) out[j] = c[j];
  return out;
}

int argmin_label(const std::vector<double>& residuals) {
  if (residuals.empty()) throw EmptyInput("argmin_label: no residuals");
  int best = 0;
  for (std::size_t k = 1; k < residuals.size(); ++k) {
    if (residuals[k] < residuals[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
  }
  return best;
}

Classifier::Classifier(const Dictionary& dict, ClassifierSpec spec)
    : dict_(&dict), spec_(std::move(spec)) {
  if (is_multimodal(spec_.method)) {
    throw InvalidArgument(std::string(method_name(spec_.method)) +
                          " needs multimodal input; use classify_multimodal");
  }
  if (spec_.method == Method::LRC) return;
  spec_.solver.validate();
  if (spec_.method == Method::CRC && !spec_.solver.is_modal()) return;
  solver_.emplace(dict.atoms(), atomic_set_for(spec_, dict), spec_.solver);
}

ClassificationResult Classifier::classify(const Vec& y) const {
  const Dictionary& dict = *dict_;
  if (y.size() != dict.rows()) {
    throw DimensionMismatch("classify: query has " + std::to_string(y.size()) +
                            " entries, dictionary has " + std::to_string(dict.rows()) + " rows");
  }
  if (spec_.method == Method::LRC) return classify_lrc(dict, y);

  ClassificationResult out;
  Vec c;
  std::vector<double> sigma;
  if (!solver_) {
    c = solve_crc(dict.atoms(), y, spec_.solver.lambda);
  } else {
    SolveResult solved = solver_->solve(y);
    c = std::move(solved.coefficients);
    sigma = std::move(solved.sigma);
    out.iterations = solved.iterations;
    out.converged = solved.converged;
  }

  out.residuals.resize(static_cast<std::size_t>(dict.num_classes()));
  for (int k = 0; k < dict.num_classes(); ++k) {
    out.residuals[static_cast<std::size_t>(k)] =
        residual_value(class_residual(dict, y, c, k), sigma, 0);
  }
  out.label = argmin_label(out.residuals);
  out.coefficients = std::move(c);
  return out;
}

ClassificationResult classify(const Dictionary& dict, const Vec& y,
                              const ClassifierSpec& spec) {
  return Classifier(dict, spec).classify(y);
}

ClassificationResult classify_lrc(const Dictionary& dict, const Vec& y) {
  if (y.size() != dict.rows()) throw DimensionMismatch("classify_lrc: query length mismatch");
  require_finite(y, "query");
  ClassificationResult out;
  out.coefficients = Mat::Zero(dict.cols(), 1);
  out.residuals.resize(static_cast<std::size_t>(dict.num_classes()));
  for (int k = 0; k < dict.num_classes(); ++k) {
    const Mat ak = dict.class_atoms(k);
    Mat normal = gram(ak, Vec::Ones(ak.rows()));
    const Vec rhs = ak.transpose() * y;
    Eigen::LLT<Mat> llt(normal);
    if (llt.info() != Eigen::Success || llt.rcond() < 1e-12) {
      normal.diagonal().array() += 1e-10;
      llt.compute(normal);
    }
    const Vec ck = llt.solve(rhs);
    const auto& cols = dict.columns_of(k);
    for (std::size_t i = 0; i < cols.size(); ++i) out.coefficients(cols[i], 0) = ck[static_cast<Index>(i)];
    out.residuals[static_cast<std::size_t>(k)] = (y - ak * ck).norm();
  }
  out.label = argmin_label(out.residuals);
  return out;
}

ClassificationResult classify_multimodal(const std::vector<Dictionary>& dicts,
                                         const std::vector<Vec>& ys,
                                         const ClassifierSpec& spec) {
  if (dicts.empty()) throw InconsistentModalities("classify_multimodal: no modalities");
  if (dicts.size() != ys.size()) {
    throw InconsistentModalities("classify_multimodal: " + std::to_string(dicts.size()) +
                                 " dictionaries but " + std::to_string(ys.size()) + " queries");
  }
  if (!is_multimodal(spec.method)) {
    throw InvalidArgument(std::string(method_name(spec.method)) + " is not a multimodal method");
  }
  const Dictionary& first = dicts.front();
  for (const Dictionary& d : dicts) {
    if (d.cols() != first.cols() || d.num_classes() != first.num_classes() ||
        d.class_of() != first.class_of()) {
      throw InconsistentModalities("classify_multimodal: dictionaries disagree on class layout");
    }
  }

  std::vector<Mat> xs;
  xs.reserve(dicts.size());
  for (const Dictionary& d : dicts) xs.push_back(d.atoms());
  MatrixSolveResult solved = JointSolver(std::move(xs), JointRows{}, spec.solver).solve(ys);

  ClassificationResult out;
  out.iterations = solved.iterations;
  out.converged = solved.converged;
  out.residuals.assign(static_cast<std::size_t>(first.num_classes()), 0.0);
  for (std::size_t j = 0; j < dicts.size(); ++j) {
    const Vec cj = solved.coefficients.col(static_cast<Index>(j));
    for (int k = 0; k < first.num_classes(); ++k) {
      out.residuals[static_cast<std::size_t>(k)] +=
          residual_value(class_residual(dicts[j], ys[j], cj, k), solved.sigma, j);
    }
  }
  out.label = argmin_label(out.residuals);
  out.coefficients = std::move(solved.coefficients);
  return out;
}

ClassificationResult classify_set(const Dictionary& dict, const std::vector<Vec>& ys,
                                  const ClassifierSpec& spec) {
  if (ys.empty()) throw EmptyQuerySet("classify_set: no query frames");
  const Classifier classifier(dict, spec);
  ClassificationResult out;
  out.residuals.assign(static_cast<std::size_t>(dict.num_classes()), 0.0);
  out.coefficients = Mat::Zero(dict.cols(), static_cast<Index>(ys.size()));
  for (std::size_t f = 0; f < ys.size(); ++f) {
    const ClassificationResult frame = classifier.classify(ys[f]);
    for (std::size_t k = 0; k < out.residuals.size(); ++k) out.residuals[k] += frame.residuals[k];
    out.coefficients.col(static_cast<Index>(f)) = frame.coefficients.col(0);
    out.iterations += frame.iterations;
    out.converged = out.converged && frame.converged;
  }
  for (double& r : out.residuals) r /= static_cast<double>(ys.size());
  out.label = argmin_label(out.residuals);
  return out;
}

}  // namespace mrarc
