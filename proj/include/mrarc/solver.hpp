#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "mrarc/atomic.hpp"
#include "mrarc/modal.hpp"
#include "mrarc/numkit.hpp"

namespace mrarc {

/// ||y - Xc||^2 data term (no 1/2 factor).
struct SquaredLoss {};

using LossModel = std::variant<ModalLoss, SquaredLoss>;

struct SolverConfig {
  double lambda = 1e-3;
  double mu = 0.1;
  double epsilon = 1e-7;
  std::size_t max_iter = 100000;
  double hq_inner_tol = 1e-6;
  std::size_t hq_inner_max = 10;
  LossModel loss = ModalLoss{};

  void validate() const;
  bool is_modal() const noexcept { return std::holds_alternative<ModalLoss>(loss); }
};

/// One ADMM outer iteration. `sigma` holds the bandwidth used per modality
/// (empty for the squared loss).
struct IterationRecord {
  double feasibility = 0.0;  // ||c - z||_inf
  double step = 0.0;         // ||c_new - c_old||_inf
  double objective = 0.0;    // loss(y - Xc) + lambda * atomic_norm(c)
  std::vector<double> sigma;
};

template <class Coefficients>
struct BasicSolveResult {
  Coefficients coefficients;
  bool converged = false;
  std::size_t iterations = 0;
  std::vector<IterationRecord> history;
  /// Bandwidth in force at exit, one per modality; empty for squared loss.
  std::vector<double> sigma;
};

using SolveResult = BasicSolveResult<Vec>;
using MatrixSolveResult = BasicSolveResult<Mat>;

/// z-subproblem  min_z mrlf(y - Xz; sigma) + (mu/2) ||z - target||^2
/// at fixed sigma.
double hq_subproblem_objective(const Mat& x, const Vec& y, const Vec& target,
                               double mu, double sigma, const Vec& z);

struct HqOutcome {
  Vec z;
  std::size_t passes = 0;
  /// Subproblem objective at the starting point followed by its value after
  /// every pass.
  std::vector<double> objective;
};

struct HqOptions {
  double tol = 1e-6;
  std::size_t max_passes = 10;
  bool trace = false;
  const Mat* xxt = nullptr;
};

/// Half-quadratic minimization of the z-subproblem: alternate the weight
/// update w = exp(-e^2 / (2 sigma^2)) with the weighted ridge solve
/// z = (X^T T X + mu I)^-1 (X^T T y + mu target), T = diag(w) / sigma^2,
/// starting from z0. Stops when ||dz|| <= tol (1 + ||z||) or after
/// max_passes passes.
HqOutcome hq_z_update(const Mat& x, const Vec& y, const Vec& target, double mu,
                      double sigma, const Vec& z0, const HqOptions& options);

/// ADMM solver for  min_c loss(y - Xc) + lambda * atomic_norm(c)  over a
/// fixed design matrix; reusable across right-hand sides. With a modal loss
/// the z-step runs the half-quadratic loop, with the squared loss it is the
/// closed form (2 X^T X + mu I)^-1 (2 X^T y + mu c + Lambda).
class ArSolver {
 public:
  ArSolver(Mat x, AtomicSet set, SolverConfig config);

  SolveResult solve(const Vec& y) const;

  const Mat& design() const noexcept { return *x_; }
  const SolverConfig& config() const noexcept { return config_; }
  const AtomicSet& atomic_set() const noexcept { return set_; }

 private:
  std::shared_ptr<const Mat> x_;
  AtomicSet set_;
  SolverConfig config_;
  Mat xxt_;                              // modal loss, m < n
  std::optional<WeightedRidge> squared_;  // squared loss
};

/// Modal-loss ADMM. Requires cfg.loss to hold ModalLoss.
SolveResult solve_mrar(const Mat& x, const Vec& y, const AtomicSet& set,
                       const SolverConfig& cfg);

/// Squared-loss ADMM (SRC with Sparse, BSRC with Block). Requires
/// cfg.loss to hold SquaredLoss.
SolveResult solve_ar_squared(const Mat& x, const Vec& y, const AtomicSet& set,
                             const SolverConfig& cfg);

/// Ridge closed form (A^T A + lambda I)^-1 A^T y.
Vec solve_crc(const Mat& a, const Vec& y, double lambda);

/// Multimodal ADMM over C in R^{n x M} with the joint-rows atomic set;
/// column j is fitted against (xs[j], ys[j]). Works with both losses.
class JointSolver {
 public:
  JointSolver(std::vector<Mat> xs, AtomicSet set, SolverConfig config);

  MatrixSolveResult solve(const std::vector<Vec>& ys) const;

  std::size_t modalities() const noexcept { return xs_->size(); }

 private:
  std::shared_ptr<const std::vector<Mat>> xs_;
  AtomicSet set_;
  SolverConfig config_;
  std::vector<Mat> xxt_;
  std::vector<WeightedRidge> squared_;
};

MatrixSolveResult solve_mrar_multimodal(const std::vector<Mat>& xs,
                                        const std::vector<Vec>& ys,
                                        const AtomicSet& set,
                                        const SolverConfig& cfg);

}  // namespace mrarc
