#include "mrarc/modal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace mrarc {

namespace {

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("kernel bandwidth must be positive, got " +
                          std::to_string(sigma));
  }
}

double epanechnikov(double e) {
  const double v = 1.0 - e * e;
  return v > 0.0 ? 0.75 * v : 0.0;
}

}  // namespace

Kernel Kernel::gaussian(double sigma) {
  check_sigma(sigma);
  return Kernel{KernelType::Gaussian, sigma};
}

Kernel Kernel::epanechnikov() { return Kernel{KernelType::Epanechnikov, 1.0}; }

double kernel_eval(const Kernel& k, double e) {
  if (k.type == KernelType::Epanechnikov) return epanechnikov(e);
  check_sigma(k.sigma);
  return std::exp(-e * e / (2.0 * k.sigma * k.sigma));
}

double density_kernel_eval(const Kernel& k, double e) {
  if (k.type == KernelType::Epanechnikov) return epanechnikov(e);
  check_sigma(k.sigma);
  return std::exp(-e * e / (2.0 * k.sigma * k.sigma)) /
         (std::sqrt(2.0 * std::numbers::pi) * k.sigma);
}

void ModalLoss::validate() const {
  if (const auto* f = std::get_if<FixedSigma>(&sigma_policy)) check_sigma(f->sigma);
}

double ModalLoss::resolve_sigma(const Vec& e, double floor) const {
  if (const auto* f = std::get_if<FixedSigma>(&sigma_policy)) return f->sigma;
  const auto& a = std::get<AdaptiveSigma>(sigma_policy);
  return adaptive_sigma(e, a.min_sigma > 0.0 ? a.min_sigma : floor);
}

double default_min_sigma(const Vec& y) {
  if (y.size() == 0) return 1e-4;
  return 1e-4 * (1.0 + y.norm() / std::sqrt(static_cast<double>(y.size())));
}

double adaptive_sigma(const Vec& e, double min_sigma) {
  if (e.size() == 0) throw EmptyInput("adaptive_sigma: empty residual");
  const double s = std::sqrt(e.squaredNorm() / (2.0 * static_cast<double>(e.size())));
  return std::max(min_sigma, s);
}

double mrlf(const Vec& e, double sigma) {
  check_sigma(sigma);
  const double scale = 1.0 / (2.0 * sigma * sigma);
  double total = 0.0;
  for (Index i = 0; i < e.size(); ++i) total += 1.0 - std::exp(-e[i] * e[i] * scale);
  return total;
}

double mrlf(const ModalLoss& loss, const Vec& e) {
  const double sigma = loss.resolve_sigma(e, default_min_sigma(e));
  if (loss.kernel == KernelType::Epanechnikov) return mrlf(Kernel::epanechnikov(), e);
  return mrlf(e, sigma);
}

double mrlf(const Kernel& k, const Vec& e) {
  if (k.type == KernelType::Gaussian) return mrlf(e, k.sigma);
  double total = 0.0;
  for (Index i = 0; i < e.size(); ++i) total += 1.0 - epanechnikov(e[i]);
  return total;
}

Vec hq_weights(const Vec& e, double sigma) {
  check_sigma(sigma);
  const double scale = 1.0 / (2.0 * sigma * sigma);
  return e.unaryExpr([scale](double v) { return std::exp(-v * v * scale); });
}

HQState hq_weights(const ModalLoss& loss, const Vec& e) {
  if (loss.kernel != KernelType::Gaussian) {
    throw UnsupportedKernel("hq_weights: half-quadratic weights need the Gaussian kernel");
  }
  const double sigma = loss.resolve_sigma(e, default_min_sigma(e));
  return HQState{hq_weights(e, sigma), sigma};
}

double parzen_density(const Kernel& k, const Vec& samples, double t) {
  if (samples.size() == 0) throw EmptyInput("parzen_density: no samples");
  double total = 0.0;
  for (Index i = 0; i < samples.size(); ++i) total += density_kernel_eval(k, t - samples[i]);
  return total / static_cast<double>(samples.size());
}

double estimate_mode(const Kernel& k, const Vec& samples, std::optional<ModeGrid> grid) {
  if (samples.size() == 0) throw EmptyInput("estimate_mode: no samples");
  ModeGrid g = grid.value_or(ModeGrid{samples.minCoeff(), samples.maxCoeff(), 512});
  if (g.points < 2) throw InvalidArgument("estimate_mode: grid needs at least 2 points");
  if (!(g.hi >= g.lo)) throw InvalidArgument("estimate_mode: grid upper end below lower end");
  if (g.hi == g.lo) return g.lo;

  const double step = (g.hi - g.lo) / static_cast<double>(g.points - 1);
  auto at = [&](int i) { return i == g.points - 1 ? g.hi : g.lo + step * i; };
  int best = 0;
  double best_density = -1.0;
  for (int i = 0; i < g.points; ++i) {
    const double d = parzen_density(k, samples, at(i));
    if (d > best_density) {
      best_density = d;
      best = i;
    }
  }

  double a = at(std::max(0, best - 1));
  double b = at(std::min(g.points - 1, best + 1));
  for (int iter = 0; iter < 100 && b - a > 1e-12 * (1.0 + std::abs(a)); ++iter) {
    const double m1 = a + (b - a) / 3.0;
    const double m2 = b - (b - a) / 3.0;
    if (parzen_density(k, samples, m1) < parzen_density(k, samples, m2)) {
      a = m1;
    } else {
      b = m2;
    }
  }
  const double refined = 0.5 * (a + b);
  return parzen_density(k, samples, refined) >= best_density ? refined : at(best);
}

}  // namespace mrarc
