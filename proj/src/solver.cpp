#include "mrarc/solver.hpp"

#include <cmath>
#include <string>

namespace mrarc {

namespace {

void check_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidArgument(std::string("SolverConfig: ") + name +
                          " must be positive, got " + std::to_string(v));
  }
}

void check_vector_set(const AtomicSet& set) {
  if (std::holds_alternative<JointRows>(set)) {
    throw ShapeMismatch("vector solver cannot use the joint-rows atomic set");
  }
}

double data_term(const SolverConfig& cfg, const Vec& e, double sigma) {
  if (cfg.is_modal()) {
    const auto& loss = std::get<ModalLoss>(cfg.loss);
    if (loss.kernel != KernelType::Gaussian) return mrlf(Kernel::epanechnikov(), e);
    return mrlf(e, sigma);
  }
  return e.squaredNorm();
}

double sigma_floor(const ModalLoss& loss, const Vec& y) {
  const auto* a = std::get_if<AdaptiveSigma>(&loss.sigma_policy);
  if (a != nullptr && a->min_sigma > 0.0) return a->min_sigma;
  return default_min_sigma(y);
}

}  // namespace

void SolverConfig::validate() const {
  check_positive(lambda, "lambda");
  check_positive(mu, "mu");
  check_positive(epsilon, "epsilon");
  if (max_iter < 1) throw InvalidArgument("SolverConfig: max_iter must be at least 1");
  if (hq_inner_max < 1) throw InvalidArgument("SolverConfig: hq_inner_max must be at least 1");
  if (!(hq_inner_tol >= 0.0)) throw InvalidArgument("SolverConfig: hq_inner_tol must be non-negative");
  if (const auto* m = std::get_if<ModalLoss>(&loss)) {
    m->validate();
    if (m->kernel != KernelType::Gaussian) {
      throw UnsupportedKernel("SolverConfig: the half-quadratic solver needs the Gaussian kernel");
    }
  }
}

double hq_subproblem_objective(const Mat& x, const Vec& y, const Vec& target,
                               double mu, double sigma, const Vec& z) {
  return mrlf(y - x * z, sigma) + 0.5 * mu * (z - target).squaredNorm();
}

HqOutcome hq_z_update(const Mat& x, const Vec& y, const Vec& target, double mu,
                      double sigma, const Vec& z0, const HqOptions& options) {
  if (x.rows() != y.size() || x.cols() != target.size() || z0.size() != x.cols()) {
    throw DimensionMismatch("hq_z_update: inconsistent shapes");
  }
  if (options.max_passes < 1) throw InvalidArgument("hq_z_update: max_passes must be at least 1");

  HqOutcome out;
  out.z = z0;
  if (options.trace) {
    out.objective.push_back(hq_subproblem_objective(x, y, target, mu, sigma, out.z));
  }
  const double inv_var = 1.0 / (sigma * sigma);
  const Vec mu_target = mu * target;
  const Mat* xxt = x.rows() < x.cols() ? options.xxt : nullptr;
  for (std::size_t pass = 0; pass < options.max_passes; ++pass) {
    const Vec t = hq_weights(y - x * out.z, sigma) * inv_var;
    const WeightedRidge ridge(x, t, mu, xxt);
    Vec rhs = mu_target;
    rhs.noalias() += x.transpose() * t.cwiseProduct(y);
    Vec z = ridge.solve(rhs);
    const double change = (z - out.z).norm();
    const double scale = 1.0 + out.z.norm();
    out.z = std::move(z);
    out.passes = pass + 1;
    if (options.trace) {
      out.objective.push_back(hq_subproblem_objective(x, y, target, mu, sigma, out.z));
    }
    if (change <= options.tol * scale) break;
  }
  return out;
}

ArSolver::ArSolver(Mat x, AtomicSet set, SolverConfig config)
    : x_(std::make_shared<const Mat>(std::move(x))),
      set_(std::move(set)),
      config_(std::move(config)) {
  config_.validate();
  check_vector_set(set_);
  require_finite(*x_, "design matrix");
  if (const auto* b = std::get_if<Block>(&set_)) {
    if (b->partition.dimension() != x_->cols()) {
      throw DimensionMismatch("block partition does not match the number of columns");
    }
  }
  if (config_.is_modal()) {
    if (x_->rows() < x_->cols()) xxt_ = (*x_) * x_->transpose();
  } else {
    squared_.emplace(*x_, Vec::Constant(x_->rows(), 2.0), config_.mu);
  }
}

SolveResult ArSolver::solve(const Vec& y) const {
  const Mat& x = *x_;
  if (y.size() != x.rows()) {
    throw DimensionMismatch("solve: target has " + std::to_string(y.size()) +
                            " entries, design has " + std::to_string(x.rows()) + " rows");
  }
  require_finite(y, "target");

  const Index n = x.cols();
  const double mu = config_.mu;
  const double gamma = config_.lambda / mu;
  const bool modal = config_.is_modal();

  Vec c = Vec::Zero(n);
  Vec z = Vec::Zero(n);
  Vec lagrange = Vec::Zero(n);

  double sigma = 0.0;
  double floor = 0.0;
  const ModalLoss* loss = modal ? &std::get<ModalLoss>(config_.loss) : nullptr;
  if (modal) floor = sigma_floor(*loss, y);

  Vec xty2;
  if (!modal) xty2 = 2.0 * (x.transpose() * y);

  HqOptions hq;
  hq.tol = config_.hq_inner_tol;
  hq.max_passes = config_.hq_inner_max;
  hq.xxt = xxt_.size() > 0 ? &xxt_ : nullptr;

  SolveResult result;
  for (std::size_t iter = 0; iter < config_.max_iter; ++iter) {
    Vec c_next = prox(set_, Vec(z - lagrange / mu), gamma);

    if (modal) {
      sigma = loss->resolve_sigma(y - x * z, floor);
      z = hq_z_update(x, y, Vec(c_next + lagrange / mu), mu, sigma, z, hq).z;
    } else {
      z = squared_->solve(Vec(xty2 + mu * c_next + lagrange));
    }
    lagrange += mu * (c_next - z);

    IterationRecord rec;
    rec.feasibility = inf_norm(c_next - z);
    rec.step = inf_norm(c_next - c);
    rec.objective = data_term(config_, y - x * c_next, sigma) +
                    config_.lambda * atomic_norm(set_, c_next);
    if (modal) rec.sigma = {sigma};
    c = std::move(c_next);
    result.iterations = iter + 1;
    const bool done = rec.feasibility < config_.epsilon && rec.step < config_.epsilon;
    result.history.push_back(std::move(rec));
    if (done) {
      result.converged = true;
      break;
    }
  }
  result.coefficients = std::move(c);
  if (modal) result.sigma = {sigma};
  return result;
}

SolveResult solve_mrar(const Mat& x, const Vec& y, const AtomicSet& set,
                       const SolverConfig& cfg) {
  if (!cfg.is_modal()) throw InvalidArgument("solve_mrar: config must use the modal loss");
  return ArSolver(x, set, cfg).solve(y);
}

SolveResult solve_ar_squared(const Mat& x, const Vec& y, const AtomicSet& set,
                             const SolverConfig& cfg) {
  if (cfg.is_modal()) throw InvalidArgument("solve_ar_squared: config must use the squared loss");
  return ArSolver(x, set, cfg).solve(y);
}

Vec solve_crc(const Mat& a, const Vec& y, double lambda) {
  if (a.rows() != y.size()) throw DimensionMismatch("solve_crc: A and y disagree on rows");
  if (!(lambda > 0.0)) throw InvalidArgument("solve_crc: lambda must be positive");
  Mat normal = gram(a, Vec::Ones(a.rows()));
  normal.diagonal().array() += lambda;
  return solve_spd(normal, a.transpose() * y);
}

JointSolver::JointSolver(std::vector<Mat> xs, AtomicSet set, SolverConfig config)
    : xs_(std::make_shared<const std::vector<Mat>>(std::move(xs))),
      set_(std::move(set)),
      config_(std::move(config)) {
  config_.validate();
  if (!std::holds_alternative<JointRows>(set_)) {
    throw ShapeMismatch("multimodal solver needs the joint-rows atomic set");
  }
  if (xs_->empty()) throw DimensionMismatch("multimodal solver needs at least one modality");
  const Index n = xs_->front().cols();
  for (const Mat& x : *xs_) {
    if (x.cols() != n) {
      throw DimensionMismatch("modalities disagree on the number of columns");
    }
    require_finite(x, "design matrix");
  }
  for (const Mat& x : *xs_) {
    if (config_.is_modal()) {
      xxt_.push_back(x.rows() < x.cols() ? Mat(x * x.transpose()) : Mat());
    } else {
      squared_.emplace_back(x, Vec::Constant(x.rows(), 2.0), config_.mu);
    }
  }
}

MatrixSolveResult JointSolver::solve(const std::vector<Vec>& ys) const {
  const auto& xs = *xs_;
  const std::size_t count = xs.size();
  if (ys.size() != count) {
    throw DimensionMismatch("multimodal solve: " + std::to_string(ys.size()) +
                            " targets for " + std::to_string(count) + " modalities");
  }
  for (std::size_t j = 0; j < count; ++j) {
    if (ys[j].size() != xs[j].rows()) {
      throw DimensionMismatch("multimodal solve: target " + std::to_string(j) +
                              " does not match its dictionary");
    }
    require_finite(ys[j], "target");
  }

  const Index n = xs.front().cols();
  const Index cols = static_cast<Index>(count);
  const double mu = config_.mu;
  const double gamma = config_.lambda / mu;
  const bool modal = config_.is_modal();
  const ModalLoss* loss = modal ? &std::get<ModalLoss>(config_.loss) : nullptr;

  Mat c = Mat::Zero(n, cols);
  Mat z = Mat::Zero(n, cols);
  Mat lagrange = Mat::Zero(n, cols);

  std::vector<double> sigma(modal ? count : 0, 0.0);
  std::vector<double> floor(modal ? count : 0, 0.0);
  std::vector<Vec> xty2(count);
  for (std::size_t j = 0; j < count; ++j) {
    if (modal) {
      floor[j] = sigma_floor(*loss, ys[j]);
    } else {
      xty2[j] = 2.0 * (xs[j].transpose() * ys[j]);
    }
  }

  HqOptions hq;
  hq.tol = config_.hq_inner_tol;
  hq.max_passes = config_.hq_inner_max;

  MatrixSolveResult result;
  for (std::size_t iter = 0; iter < config_.max_iter; ++iter) {
    Mat c_next = prox(set_, Mat(z - lagrange / mu), gamma);

    // Columns are independent given C and Lambda.
    for (std::size_t j = 0; j < count; ++j) {
      const Index col = static_cast<Index>(j);
      if (modal) {
        sigma[j] = loss->resolve_sigma(ys[j] - xs[j] * z.col(col), floor[j]);
        hq.xxt = xxt_[j].size() > 0 ? &xxt_[j] : nullptr;
        const Vec target = c_next.col(col) + lagrange.col(col) / mu;
        z.col(col) = hq_z_update(xs[j], ys[j], target, mu, sigma[j], z.col(col), hq).z;
      } else {
        z.col(col) = squared_[j].solve(
            Vec(xty2[j] + mu * c_next.col(col) + lagrange.col(col)));
      }
    }
    lagrange += mu * (c_next - z);

    IterationRecord rec;
    rec.feasibility = inf_norm(c_next - z);
    rec.step = inf_norm(c_next - c);
    double fit = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
      fit += data_term(config_, ys[j] - xs[j] * c_next.col(static_cast<Index>(j)),
                       modal ? sigma[j] : 0.0);
    }
    rec.objective = fit + config_.lambda * atomic_norm(set_, c_next);
    rec.sigma = sigma;
    c = std::move(c_next);
    result.iterations = iter + 1;
    const bool done = rec.feasibility < config_.epsilon && rec.step < config_.epsilon;
    result.history.push_back(std::move(rec));
    if (done) {
      result.converged = true;
      break;
    }
  }
  result.coefficients = std::move(c);
  result.sigma = sigma;
  return result;
}

MatrixSolveResult solve_mrar_multimodal(const std::vector<Mat>& xs,
                                        const std::vector<Vec>& ys,
                                        const AtomicSet& set,
                                        const SolverConfig& cfg) {
  return JointSolver(xs, set, cfg).solve(ys);
}

}  // namespace mrarc
