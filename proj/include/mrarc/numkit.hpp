#pragma once

#include <optional>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "mrarc/errors.hpp"

namespace mrarc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

bool all_finite(const Mat& m);
bool all_finite(const Vec& v);

/// Throws NonFinite naming `what` when any entry is NaN or infinite.
void require_finite(const Mat& m, const char* what);
void require_finite(const Vec& v, const char* what);

/// Solves M x = b by Cholesky. M must be square and symmetric to 1e-10
/// relative; a non-positive pivot raises NotSPD.
Vec solve_spd(const Mat& m, const Vec& b);

/// A^T diag(w) A. w must be non-negative with one entry per row of A.
Mat gram(const Mat& a, const Vec& w);

/// Orthonormal basis of the column span of `a` (thin Householder Q).
/// Requires rows >= cols.
Mat orthonormal_basis(const Mat& a);

/// Max-abs norm; zero for empty input.
double inf_norm(const Mat& m);

/// Factorized solver for the weighted ridge system
///
///   (X^T diag(t) X + mu I) z = rhs,   t >= 0, mu > 0.
///
/// When X has fewer rows than columns the factorization works on the
/// m x m system mu I + S X X^T S (S = diag(sqrt(t))) through the Woodbury
/// identity; otherwise it factors the n x n normal matrix directly.
/// `xxt`, when given, must equal X X^T and is reused instead of recomputed.
/// `x` (and `xxt`) must outlive the solver.
class WeightedRidge {
 public:
  WeightedRidge(const Mat& x, const Vec& t, double mu,
                const Mat* xxt = nullptr);

  Vec solve(const Vec& rhs) const;

  bool uses_dual() const noexcept { return dual_; }

 private:
  const Mat* x_;
  Vec sqrt_t_;
  double mu_;
  bool dual_;
  Eigen::LLT<Mat> llt_;
};

}  // namespace mrarc
