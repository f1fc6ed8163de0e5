#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mrarc/modal.hpp"
#include "oracles.hpp"

using namespace mrarc;

namespace {

Vec mixture_samples(std::uint64_t seed, int count) {
  Rng rng(seed);
  Vec s(count);
  for (int i = 0; i < count; ++i) {
    const double center = rng.uniform() < 0.9 ? 0.0 : 5.0;
    s[i] = center + 0.1 * rng.normal();
  }
  return s;
}

}  // namespace

TEST(Kernel, Evaluation) {
  EXPECT_DOUBLE_EQ(kernel_eval(Kernel::gaussian(1.0), 0.0), 1.0);
  EXPECT_DOUBLE_EQ(kernel_eval(Kernel::epanechnikov(), 1.0), 0.0);
  EXPECT_DOUBLE_EQ(kernel_eval(Kernel::epanechnikov(), 0.0), 0.75);
  EXPECT_NEAR(kernel_eval(Kernel::gaussian(2.0), 2.0), std::exp(-0.5), 1e-15);
  EXPECT_NEAR(kernel_eval(Kernel::gaussian(2.0), 2.0), 0.6065, 1e-4);
  EXPECT_THROW(Kernel::gaussian(0.0), InvalidArgument);
}

TEST(Kernel, Evenness) {
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const double e = rng.normal() * 3.0;
    for (const Kernel& k : {Kernel::gaussian(0.3), Kernel::gaussian(5.0), Kernel::epanechnikov()}) {
      EXPECT_EQ(kernel_eval(k, e), kernel_eval(k, -e));
      EXPECT_EQ(density_kernel_eval(k, e), density_kernel_eval(k, -e));
    }
  }
}

TEST(Mrlf, Values) {
  EXPECT_EQ(mrlf(Vec::Zero(9), 0.7), 0.0);
  const double sigma = 1.3;
  Vec half(1);
  half[0] = sigma * std::sqrt(2.0 * std::log(2.0));
  EXPECT_NEAR(mrlf(half, sigma), 0.5, 1e-15);
  ModalLoss fixed{KernelType::Gaussian, FixedSigma{sigma}};
  EXPECT_NEAR(mrlf(fixed, half), 0.5, 1e-15);
}

TEST(Mrlf, EqualsScaledParzenComplementForUnitPeakKernel) {
  // With the unit-peak kernel K(e) = sqrt(2 pi) sigma * K_density(e), the
  // loss is m (1 - sqrt(2 pi) sigma p_hat(0)).
  Rng rng(3);
  const double sigma = 0.8;
  const Vec e = oracle::random_vector(rng, 7);
  const double p0 = parzen_density(Kernel::gaussian(sigma), e, 0.0);
  EXPECT_NEAR(mrlf(e, sigma), 7.0 * (1.0 - std::sqrt(2.0 * std::numbers::pi) * sigma * p0), 1e-12);
}

TEST(Mrlf, LowerBoundAndPointwiseConsistency) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec e = oracle::random_vector(rng, 6);
    const double sigma = 0.1 + rng.uniform();
    const double total = mrlf(e, sigma);
    EXPECT_GT(total, 0.0);
    EXPECT_LE(total, 6.0);
    double pointwise = 0.0;
    for (Index i = 0; i < e.size(); ++i) pointwise += 1.0 - kernel_eval(Kernel::gaussian(sigma), e[i]);
    EXPECT_NEAR(total, pointwise, 1e-14);
  }
}

TEST(HqWeights, Values) {
  EXPECT_EQ(hq_weights(Vec::Zero(4), 1.0), Vec::Ones(4));
  Vec e(2);
  e << 0.0, 10.0 * 0.5;
  const Vec w = hq_weights(e, 0.5);
  EXPECT_EQ(w[0], 1.0);
  EXPECT_NEAR(w[1], std::exp(-50.0), 1e-30);
  ModalLoss epan{KernelType::Epanechnikov, AdaptiveSigma{}};
  EXPECT_THROW(hq_weights(epan, e), UnsupportedKernel);
}

TEST(HqWeights, ElementwiseKernelAndMonotone) {
  Rng rng(2);
  const Vec e = oracle::random_vector(rng, 50);
  const HQState state = hq_weights(ModalLoss{KernelType::Gaussian, FixedSigma{0.9}}, e);
  EXPECT_EQ(state.sigma, 0.9);
  for (Index i = 0; i < e.size(); ++i) {
    EXPECT_NEAR(state.w[i], kernel_eval(Kernel::gaussian(0.9), e[i]), 1e-14 * state.w[i]);
    EXPECT_GT(state.w[i], 0.0);
    EXPECT_LE(state.w[i], 1.0);
    for (Index j = 0; j < e.size(); ++j) {
      if (std::abs(e[i]) <= std::abs(e[j])) EXPECT_GE(state.w[i], state.w[j]);
    }
  }
}

TEST(HqWeights, SurrogateInfimumIsAttainedAtKernelWeights) {
  // Per sample, phi(u) = 1 - exp(-u^2 / 2s^2) is concave in u^2, so
  // phi(u) = min_v [ (v / 2s^2) u^2 + psi(v) ] with psi(v) = 1 - v + v ln v
  // (the conjugate in the weight variable), attained at v = exp(-u^2 / 2s^2).
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const double sigma = 0.3 + rng.uniform();
    const Vec e = oracle::random_vector(rng, 8);
    auto surrogate = [&](const Vec& w) {
      double s = 0.0;
      for (Index i = 0; i < e.size(); ++i) {
        s += w[i] * e[i] * e[i] / (2.0 * sigma * sigma) + 1.0 - w[i] + w[i] * std::log(w[i]);
      }
      return s;
    };
    const Vec w_star = hq_weights(e, sigma);
    const double at_star = surrogate(w_star);
    EXPECT_NEAR(at_star, mrlf(e, sigma), 1e-12);
    for (int k = 0; k < 1000; ++k) {
      Vec w(e.size());
      for (Index i = 0; i < e.size(); ++i) w[i] = 1e-6 + (1.0 - 1e-6) * rng.uniform();
      EXPECT_LE(at_star, surrogate(w) + 1e-12);
    }
  }
}

TEST(AdaptiveSigma, Formula) {
  EXPECT_NEAR(adaptive_sigma(Vec::Constant(5, 3.0), 1e-4), 3.0 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(adaptive_sigma(Vec::Zero(5), 0.25), 0.25);
  Vec e(2);
  e << 3, 4;
  EXPECT_DOUBLE_EQ(adaptive_sigma(e, 1e-4), 2.5);
  EXPECT_THROW(adaptive_sigma(Vec(), 1.0), EmptyInput);
  EXPECT_NEAR(default_min_sigma(Vec::Constant(4, 2.0)), 1e-4 * 3.0, 1e-18);
}

TEST(Parzen, Values) {
  EXPECT_NEAR(parzen_density(Kernel::gaussian(1.0), Vec::Zero(1), 0.0), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-15);
  Vec two(2);
  two << -0.7, 0.7;
  const Kernel k = Kernel::gaussian(0.5);
  EXPECT_NEAR(parzen_density(k, two, 0.0), parzen_density(k, Vec::Constant(1, 0.7), 0.0), 1e-15);
  EXPECT_THROW(parzen_density(k, Vec(), 0.0), EmptyInput);
}

TEST(Parzen, MixtureDensityConcentratesAtDominantComponent) {
  const Vec s = mixture_samples(77, 10000);
  const Kernel k = Kernel::gaussian(0.1);
  EXPECT_GT(parzen_density(k, s, 0.0), 5.0 * parzen_density(k, s, 5.0));
}

TEST(Parzen, IntegratesToOne) {
  Rng rng(4);
  const Vec s = oracle::random_vector(rng, 40);
  for (const Kernel& k : {Kernel::gaussian(0.3), Kernel::epanechnikov()}) {
    const double lo = s.minCoeff() - 4.0, hi = s.maxCoeff() + 4.0;
    const int n = 20001;
    const double h = (hi - lo) / (n - 1);
    double integral = 0.0;
    for (int i = 0; i < n; ++i) {
      const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
      integral += w * parzen_density(k, s, lo + h * i);
    }
    EXPECT_NEAR(integral * h, 1.0, 1e-3);
  }
}

TEST(Mode, Examples) {
  EXPECT_EQ(estimate_mode(Kernel::gaussian(0.5), Vec::Constant(5, 3.0)), 3.0);
  Vec two(2);
  two << -1.0, 1.0;
  EXPECT_NEAR(estimate_mode(Kernel::gaussian(10.0), two), 0.0, 1e-6);
  EXPECT_THROW(estimate_mode(Kernel::gaussian(1.0), Vec()), EmptyInput);
  const Vec s = mixture_samples(123, 10000);
  EXPECT_NEAR(estimate_mode(Kernel::gaussian(0.1), s), 0.0, 0.05);
}

TEST(Mode, ExplicitGrid) {
  Vec s(3);
  s << 1.0, 1.1, 0.9;
  EXPECT_NEAR(estimate_mode(Kernel::gaussian(0.2), s, ModeGrid{-5.0, 5.0, 512}), 1.0, 1e-6);
  EXPECT_THROW(estimate_mode(Kernel::gaussian(0.2), s, ModeGrid{1.0, 0.0, 512}), InvalidArgument);
}
