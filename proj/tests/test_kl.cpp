#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "bvm/kl.hpp"
#include "bvm/sampler.hpp"
#include "oracle.hpp"

using namespace bvm;

namespace {

oracle::MeanSe mc_kl(const BvmSineParams& fa, const BvmSineParams& fb, int n, std::uint64_t seed) {
  const double la = log_norm_constant(fa, kPreciseSeries), lb = log_norm_constant(fb, kPreciseSeries);
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(n));
  for (const auto& x : sample(fa, n, seed)) v.push_back(log_density(x, fa, la) - log_density(x, fb, lb));
  return oracle::mean_se(v);
}

BvmSineParams random_params(std::mt19937_64& rng, bool with_lambda = true) {
  std::uniform_real_distribution<double> mu(-kPi, kPi), lk(std::log(0.2), std::log(20.0)), r(-0.9, 0.9);
  return BvmSineParams::from_rho(mu(rng), mu(rng), std::exp(lk(rng)), std::exp(lk(rng)), with_lambda ? r(rng) : 0.0);
}

}  // namespace

TEST(Kl, IdenticalIsZero) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const auto p = random_params(rng);
    EXPECT_NEAR(kl_sine(p, p), 0.0, 1e-10);
    const auto q = p.with_lambda(0.0);
    EXPECT_NEAR(kl_independent(q, q), 0.0, 1e-10);
  }
}

TEST(Kl, ZeroLambdaReduction) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const auto a = random_params(rng, false), b = random_params(rng, false);
    EXPECT_NEAR(kl_sine(a, b), kl_independent(a, b), 1e-10) << a << " " << b;
  }
}

TEST(Kl, HalfTurnShift) {
  const BvmSineParams a(0.3, 1.0, 4.0, 2.0, 0.0), b(0.3 + kPi, 1.0, 4.0, 2.0, 0.0);
  EXPECT_NEAR(kl_independent(a, b), 2 * 4.0 * bessel_ratio_A(4.0), 1e-12);
}

TEST(Kl, IndependentRejectsLambda) {
  EXPECT_THROW(kl_independent(BvmSineParams(0, 0, 1, 1, 0.5), BvmSineParams(0, 0, 1, 1, 0)), DomainError);
}

TEST(Kl, MonteCarloExamples) {
  {
    const BvmSineParams a(kPi / 2, kPi / 2, 10, 10, 9), b(0, 0, 1, 1, 0);
    const auto mc = mc_kl(a, b, 100000, 11);
    EXPECT_TRUE(oracle::within_se(kl_sine(a, b), mc)) << kl_sine(a, b) << " vs " << mc.mean << " +- " << mc.se;
  }
  {
    const BvmSineParams a(0, 0, 5, 2, 0), b(0.3, -0.2, 1, 1, 0);
    const auto mc = mc_kl(a, b, 100000, 12);
    EXPECT_TRUE(oracle::within_se(kl_independent(a, b), mc)) << kl_independent(a, b) << " vs " << mc.mean;
  }
}

// Exercises the cross term: both means shifted on both axes and lambda_b != 0.
TEST(Kl, MonteCarloCrossTerm) {
  const BvmSineParams a(0.5, -0.7, 3, 6, 2.5), b(-0.6, 0.9, 2, 1, -1.2);
  const auto mc = mc_kl(a, b, 100000, 13);
  EXPECT_TRUE(oracle::within_se(kl_sine(a, b), mc)) << kl_sine(a, b) << " vs " << mc.mean << " +- " << mc.se;
}

TEST(Kl, NonNegativeAndAsymmetric) {
  std::mt19937_64 rng(3);
  bool asymmetric = false;
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_params(rng), b = random_params(rng);
    const double ab = kl_sine(a, b), ba = kl_sine(b, a);
    EXPECT_GE(ab, -kKlFloor);
    EXPECT_GE(ba, -kKlFloor);
    if (std::abs(ab - ba) > 1e-6) asymmetric = true;
  }
  EXPECT_TRUE(asymmetric);
}
