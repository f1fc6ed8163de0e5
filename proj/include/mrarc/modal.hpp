#pragma once

#include <optional>
#include <variant>

#include "mrarc/numkit.hpp"

namespace mrarc {

enum class KernelType { Gaussian, Epanechnikov };

/// Even kernel. Gaussian carries a bandwidth; Epanechnikov has the fixed
/// support [-1, 1] and ignores `sigma`.
struct Kernel {
  KernelType type = KernelType::Gaussian;
  double sigma = 1.0;

  static Kernel gaussian(double sigma);
  static Kernel epanechnikov();
};

/// Unit-peak kernel used by the modal loss: exp(-e^2 / (2 sigma^2)) for the
/// Gaussian, (3/4)(1 - e^2)_+ for Epanechnikov.
double kernel_eval(const Kernel& k, double e);

/// Area-normalized kernel used for density estimation.
double density_kernel_eval(const Kernel& k, double e);

struct FixedSigma {
  double sigma = 1.0;
};

/// sigma = max(min_sigma, sqrt(||e||^2 / (2m))), recomputed from the
/// current residual. A min_sigma of zero or less selects the default floor
/// 1e-4 * (1 + ||y|| / sqrt(m)) derived from the target vector.
struct AdaptiveSigma {
  double min_sigma = 0.0;
};

using SigmaPolicy = std::variant<FixedSigma, AdaptiveSigma>;

/// Modal regression loss sum_i (1 - K(e_i)).
struct ModalLoss {
  KernelType kernel = KernelType::Gaussian;
  SigmaPolicy sigma_policy = AdaptiveSigma{};

  void validate() const;
  /// Bandwidth the policy selects for residual `e`, with `floor` used as
  /// the adaptive lower bound.
  double resolve_sigma(const Vec& e, double floor) const;
};

/// Half-quadratic state: per-sample weights in (0, 1] and the bandwidth
/// they were computed with.
struct HQState {
  Vec w;
  double sigma = 1.0;
};

/// Default adaptive floor 1e-4 * (1 + ||y|| / sqrt(m)).
double default_min_sigma(const Vec& y);

double adaptive_sigma(const Vec& e, double min_sigma);

/// Loss with an explicit Gaussian bandwidth.
double mrlf(const Vec& e, double sigma);
/// Loss with the bandwidth chosen by `loss.sigma_policy`; an adaptive
/// policy with no floor uses the default floor computed from `e`.
double mrlf(const ModalLoss& loss, const Vec& e);
/// Loss under an arbitrary kernel (Epanechnikov included).
double mrlf(const Kernel& k, const Vec& e);

/// exp(-e_i^2 / (2 sigma^2)).
Vec hq_weights(const Vec& e, double sigma);
HQState hq_weights(const ModalLoss& loss, const Vec& e);

double parzen_density(const Kernel& k, const Vec& samples, double t);

struct ModeGrid {
  double lo = 0.0;
  double hi = 0.0;
  int points = 512;
};

/// Grid maximizer of the Parzen density, refined by ternary search inside
/// the neighbouring grid cells. The default grid spans [min, max] of the
/// samples.
double estimate_mode(const Kernel& k, const Vec& samples,
                     std::optional<ModeGrid> grid = std::nullopt);

}  // namespace mrarc
