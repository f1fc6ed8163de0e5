#pragma once

// Independent reference computations used only by the test suites.

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "mrarc/random.hpp"

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline Mat random_matrix(mrarc::Rng& rng, int rows, int cols) {
  Mat m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

inline Vec random_vector(mrarc::Rng& rng, int n) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

// Golden-section search on [lo, hi]. `less(a, b)` reports f(a) < f(b); the
// caller evaluates the objective difference directly so comparisons stay
// accurate down to the spacing of doubles instead of sqrt(eps).
inline double golden_section(const std::function<bool(double, double)>& less, double lo,
                             double hi, int iters = 300) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  for (int i = 0; i < iters && b - a > 0.0; ++i) {
    if (less(x1, x2)) {
      b = x2;
      x2 = x1;
      x1 = b - r * (b - a);
    } else {
      a = x1;
      x1 = x2;
      x2 = a + r * (b - a);
    }
    if (!(a < x1 && x1 < b) && !(a < x2 && x2 < b)) break;
  }
  // The kink at zero is a common minimizer; compare it against the bracket.
  const double mid = 0.5 * (a + b);
  if (lo <= 0.0 && hi >= 0.0 && less(0.0, mid)) return 0.0;
  return mid;
}

// argmin_c 0.5 (c - z)^2 + gamma |c| by golden-section search.
inline double scalar_l1_prox(double z, double gamma) {
  auto less = [&](double a, double b) {
    // f(a) - f(b) = 0.5 (a - b)(a + b - 2z) + gamma (|a| - |b|)
    return 0.5 * (a - b) * (a + b - 2.0 * z) + gamma * (std::abs(a) - std::abs(b)) < 0.0;
  };
  const double r = std::abs(z) + 1.0;
  return golden_section(less, -r, r);
}

inline Vec l1_prox(const Vec& z, double gamma) {
  Vec out(z.size());
  for (int i = 0; i < z.size(); ++i) out[i] = scalar_l1_prox(z[i], gamma);
  return out;
}

// argmin_c 0.5 ||c - z||^2 + gamma ||c||_2: the minimizer lies on the ray
// through z, c = t z / ||z||, t in [0, ||z||]; search over t.
inline Vec l2_prox(const Vec& z, double gamma) {
  const double nz = z.norm();
  if (nz == 0.0) return Vec::Zero(z.size());
  auto less = [&](double a, double b) {
    return 0.5 * (a - b) * (a + b - 2.0 * nz) + gamma * (a - b) < 0.0;
  };
  const double t = golden_section(less, 0.0, nz);
  return (t / nz) * z;
}

// Aᵀ diag(w) A via an explicit triple loop.
inline Mat naive_gram(const Mat& a, const Vec& w) {
  Mat g = Mat::Zero(a.cols(), a.cols());
  for (int p = 0; p < a.cols(); ++p)
    for (int q = 0; q < a.cols(); ++q) {
      double s = 0.0;
      for (int i = 0; i < a.rows(); ++i) s += a(i, p) * w[i] * a(i, q);
      g(p, q) = s;
    }
  return g;
}

inline double lasso_objective(const Mat& x, const Vec& y, const Vec& c, double lambda) {
  return (y - x * c).squaredNorm() + lambda * c.lpNorm<1>();
}

// ISTA for min ||y - Xc||^2 + lambda ||c||_1 with step 1/L, L = 2 sigma_max(X)^2.
inline Vec ista_lasso(const Mat& x, const Vec& y, double lambda, double tol = 1e-10,
                      int max_iter = 2000000) {
  Vec v = Vec::Ones(x.cols());
  for (int i = 0; i < 500; ++i) v = (x.transpose() * (x * v)).normalized();
  const double lip = 2.0 * (x * v).squaredNorm() * 1.0001;
  Vec c = Vec::Zero(x.cols());
  for (int it = 0; it < max_iter; ++it) {
    const Vec grad = 2.0 * x.transpose() * (x * c - y);
    Vec next = c - grad / lip;
    for (int i = 0; i < next.size(); ++i) {
      const double mag = std::abs(next[i]) - lambda / lip;
      next[i] = mag > 0.0 ? std::copysign(mag, next[i]) : 0.0;
    }
    const double change = (next - c).cwiseAbs().maxCoeff();
    c = next;
    if (change < tol) break;
  }
  return c;
}

// Minimizer of phi(y - c) + lambda |c| over a uniform grid, refined once
// with a finer grid around the winner. phi(e) = 1 - exp(-e^2 / (2 sigma^2)).
inline double scalar_modal_grid(double y, double lambda, double sigma) {
  auto f = [&](double c) {
    const double e = y - c;
    return 1.0 - std::exp(-e * e / (2.0 * sigma * sigma)) + lambda * std::abs(c);
  };
  const double lo = std::min(0.0, y) - 1.0, hi = std::max(0.0, y) + 1.0;
  double best = 0.0, best_f = f(0.0);
  const int n = 200001;
  for (int i = 0; i < n; ++i) {
    const double c = lo + (hi - lo) * i / (n - 1);
    if (f(c) < best_f) best_f = f(c), best = c;
  }
  const double h = (hi - lo) / (n - 1);
  for (int i = -1000; i <= 1000; ++i) {
    const double c = best + h * i / 1000.0;
    if (f(c) < best_f) best_f = f(c), best = c;
  }
  return best;
}

}  // namespace oracle
