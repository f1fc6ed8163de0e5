#include "mrarc/numkit.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <string>

namespace mrarc {

bool all_finite(const Mat& m) { return m.allFinite(); }
bool all_finite(const Vec& v) { return v.allFinite(); }

void require_finite(const Mat& m, const char* what) {
  if (!m.allFinite()) throw NonFinite(std::string(what) + " has non-finite entries");
}

void require_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) throw NonFinite(std::string(what) + " has non-finite entries");
}

double inf_norm(const Mat& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

Vec solve_spd(const Mat& m, const Vec& b) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("solve_spd: matrix is " + std::to_string(m.rows()) +
                            "x" + std::to_string(m.cols()) + ", not square");
  }
  if (m.rows() != b.size()) {
    throw DimensionMismatch("solve_spd: matrix has " + std::to_string(m.rows()) +
                            " rows but rhs has " + std::to_string(b.size()));
  }
  const double scale = std::max(1.0, inf_norm(m));
  if (inf_norm(m - m.transpose()) > 1e-10 * scale) {
    throw NotSPD("solve_spd: matrix is not symmetric");
  }
  Eigen::LLT<Mat> llt(m);
  if (llt.info() != Eigen::Success) {
    throw NotSPD("solve_spd: non-positive pivot in Cholesky factorization");
  }
  return llt.solve(b);
}

Mat gram(const Mat& a, const Vec& w) {
  if (w.size() != a.rows()) {
    throw DimensionMismatch("gram: weight vector has " + std::to_string(w.size()) +
                            " entries, matrix has " + std::to_string(a.rows()) +
                            " rows");
  }
  if ((w.array() < 0.0).any()) throw InvalidArgument("gram: negative weight");
  Mat g(a.cols(), a.cols());
  g.noalias() = a.transpose() * w.asDiagonal() * a;
  // Exact symmetry; the product above can differ in the last ulp.
  return 0.5 * (g + g.transpose());
}

Mat orthonormal_basis(const Mat& a) {
  if (a.rows() < a.cols()) {
    throw DimensionMismatch("orthonormal_basis: more columns than rows");
  }
  Eigen::HouseholderQR<Mat> qr(a);
  return qr.householderQ() * Mat::Identity(a.rows(), a.cols());
}

WeightedRidge::WeightedRidge(const Mat& x, const Vec& t, double mu, const Mat* xxt)
    : x_(&x), sqrt_t_(t.size()), mu_(mu), dual_(x.rows() < x.cols()) {
  if (t.size() != x.rows()) {
    throw DimensionMismatch("WeightedRidge: weight count does not match rows");
  }
  if (!(mu > 0.0)) throw InvalidArgument("WeightedRidge: mu must be positive");
  if ((t.array() < 0.0).any()) throw InvalidArgument("WeightedRidge: negative weight");
  sqrt_t_ = t.cwiseSqrt();

  Mat system;
  if (dual_) {
    const Index m = x.rows();
    if (xxt != nullptr) {
      if (xxt->rows() != m || xxt->cols() != m) {
        throw DimensionMismatch("WeightedRidge: X X^T has the wrong shape");
      }
      system = sqrt_t_.asDiagonal() * (*xxt) * sqrt_t_.asDiagonal();
    } else {
      const Mat sx = sqrt_t_.asDiagonal() * x;
      system.noalias() = sx * sx.transpose();
    }
    system.diagonal().array() += mu;
  } else {
    const Mat sx = sqrt_t_.asDiagonal() * x;
    system.noalias() = sx.transpose() * sx;
    system.diagonal().array() += mu;
  }
  llt_.compute(system);
  if (llt_.info() != Eigen::Success) {
    throw NotSPD("WeightedRidge: factorization failed");
  }
}

Vec WeightedRidge::solve(const Vec& rhs) const {
  if (rhs.size() != x_->cols()) {
    throw DimensionMismatch("WeightedRidge::solve: rhs has the wrong length");
  }
  if (!dual_) return llt_.solve(rhs);
  // (mu I + X^T S^2 X)^-1 = (I - X^T S (mu I + S X X^T S)^-1 S X) / mu
  const Vec inner = sqrt_t_.cwiseProduct(*x_ * rhs);
  const Vec back = x_->transpose() * sqrt_t_.cwiseProduct(llt_.solve(inner));
  return (rhs - back) / mu_;
}

}  // namespace mrarc
