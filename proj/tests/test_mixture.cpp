#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "bvm/mixture.hpp"
#include "bvm/sampler.hpp"

using namespace bvm;

namespace {

std::vector<TorusPoint> mixture_sample(const std::vector<BvmSineParams>& comps, const std::vector<int>& counts,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<TorusPoint> out;
  for (std::size_t j = 0; j < comps.size(); ++j) {
    auto part = sample(comps[j], counts[j], rng);
    out.insert(out.end(), part.begin(), part.end());
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

MixtureModel make_model(std::vector<BvmSineParams> comps, std::vector<double> weights, Variant v = Variant::Sine) {
  MixtureModel m;
  m.variant = v;
  m.components = std::move(comps);
  m.weights = std::move(weights);
  return m;
}

double mean_distance(const BvmSineParams& a, const BvmSineParams& b) {
  return std::hypot(angular_difference(a.mu1(), b.mu1()), angular_difference(a.mu2(), b.mu2()));
}

const std::vector<BvmSineParams> kTwoBlobs{BvmSineParams(-kPi / 2, -kPi / 2, 20, 20, 0),
                                           BvmSineParams(kPi / 2, kPi / 2, 20, 20, 0)};

}  // namespace

TEST(Mixture, UniversalIntegerCode) {
  const double c = std::log2(2.865064);
  EXPECT_DOUBLE_EQ(detail::log2_star(1), c);
  EXPECT_DOUBLE_EQ(detail::log2_star(2), c + 1.0);
  EXPECT_NEAR(detail::log2_star(16), c + 4 + 2 + 1, 1e-12);
  EXPECT_NEAR(detail::log2_factorial(5), std::log2(120.0), 1e-12);
}

TEST(Mixture, SingleComponentMatchesSingleMessage) {
  const auto d = sample(BvmSineParams(0.4, -1.0, 3, 5, 1.5), 300, 3);
  const BvmSineParams p(0.5, -1.1, 2.8, 5.3, 1.2);
  const auto single = message_length(d, p, Variant::Sine);
  const auto mix = mixture_message_length(d, make_model({p}, {1.0}));
  EXPECT_NEAR(mix.total - single.total, std::log2(2.865064), 1e-8);
  EXPECT_NEAR(mix.second_part, single.second_part, 1e-8);
}

TEST(Mixture, EmWithOneComponentIsMml) {
  const auto d = sample(BvmSineParams(1.0, 2.0, 4, 2, -1), 400, 5);
  const auto em = em_fit(d, make_model({moment_init(d)}, {1.0}));
  const auto mml = estimate_mml(d);
  EXPECT_TRUE(em.converged);
  EXPECT_NEAR(em.model.components[0].kappa1(), mml.params_hat.kappa1(), 1e-3);
  EXPECT_NEAR(em.model.components[0].lambda(), mml.params_hat.lambda(), 1e-3);
  EXPECT_NEAR(em.model.message.total - mml.objective_value, std::log2(2.865064), 1e-4);
}

TEST(Mixture, ResponsibilitiesAreRowStochastic) {
  const auto d = mixture_sample(kTwoBlobs, {300, 200}, 1);
  const MixtureData md(d);
  const auto m = make_model({BvmSineParams(0, 0, 1, 1, 0.5), BvmSineParams(2, 2, 5, 1, 0),
                             BvmSineParams(-1, 3, 0.1, 9, -0.5)},
                            {0.2, 0.5, 0.3});
  const auto r = e_step(md, m);
  EXPECT_LT((r.r.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-10);
  EXPECT_GE(r.r.minCoeff(), 0.0);
  const auto fit = em_fit(md, m);
  EXPECT_LT((fit.resp.r.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-10);
}

TEST(Mixture, EmRecoversTwoComponents) {
  const auto d = mixture_sample(kTwoBlobs, {2000, 2000}, 7);
  const auto fit = em_fit(d, make_model({BvmSineParams(-1, -1, 1, 1, 0), BvmSineParams(1, 1, 1, 1, 0)}, {0.5, 0.5}));
  ASSERT_EQ(fit.model.size(), 2u);
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_NEAR(fit.model.weights[j], 0.5, 0.05);
    EXPECT_LT(mean_distance(fit.model.components[j], kTwoBlobs[j]), 0.1);
  }
}

TEST(Mixture, EmRequiresFivePointsPerComponent) {
  const auto d = sample(BvmSineParams(0, 0, 1, 1, 0), 9, 1);
  EXPECT_THROW(em_fit(d, make_model(kTwoBlobs, {0.5, 0.5})), DomainError);
}

TEST(Mixture, EmSecondPartNonIncreasing) {
  const auto d = mixture_sample(kTwoBlobs, {600, 400}, 9);
  const auto init = make_model({BvmSineParams(-0.5, -0.5, 2, 2, 0), BvmSineParams(0.5, 0.5, 2, 2, 0)}, {0.5, 0.5});
  MixtureOptions opt;
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= 8; ++it) {
    opt.max_em_iterations = it;
    opt.em_tolerance = 0.0;
    const auto fit = em_fit(d, init, opt);
    EXPECT_LE(fit.model.message.second_part, prev + 1e-8 * std::abs(prev)) << it;
    prev = fit.model.message.second_part;
  }
}

TEST(Mixture, DuplicatedComponentCostsBits) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto d = mixture_sample(kTwoBlobs, {500, 300}, seed);
    const auto fit = em_fit(d, make_model(kTwoBlobs, {0.6, 0.4}));
    const MixtureData md(d);
    for (std::size_t j = 0; j < fit.model.size(); ++j) {
      MixtureModel dup = fit.model;
      dup.weights[j] *= 0.5;
      dup.weights.insert(dup.weights.begin() + static_cast<long>(j), dup.weights[j]);
      dup.components.insert(dup.components.begin() + static_cast<long>(j), dup.components[j]);
      const auto m = mixture_message_length(md, dup, e_step(md, dup));
      EXPECT_GT(m.total, fit.model.message.total);
    }
  }
}

TEST(Mixture, LabelPermutationInvariance) {
  const auto d = mixture_sample(kTwoBlobs, {300, 300}, 4);
  const auto a = make_model({kTwoBlobs[0], kTwoBlobs[1], BvmSineParams(0, 2, 1, 3, 0.5)}, {0.2, 0.3, 0.5});
  const auto b = make_model({a.components[2], a.components[0], a.components[1]}, {0.5, 0.2, 0.3});
  EXPECT_NEAR(mixture_message_length(d, a).total, mixture_message_length(d, b).total, 1e-8);
}

TEST(Mixture, MergeOfIdenticalComponentsShortens) {
  const auto d = sample(BvmSineParams(0.3, 0.3, 8, 8, 2), 800, 11);
  const auto one = em_fit(d, make_model({moment_init(d)}, {1.0}));
  const auto twin = make_model({one.model.components[0], one.model.components[0]}, {0.5, 0.5});
  const MixtureData md(d);
  EmResult parent;
  parent.model = twin;
  parent.resp = e_step(md, twin);
  parent.model.message = mixture_message_length(md, twin, parent.resp);
  EXPECT_EQ(merge_partner(twin, 0), 1u);
  const auto merged = merge(md, parent, 0);
  EXPECT_EQ(merged.model.size(), 1u);
  EXPECT_LT(merged.model.message.total, parent.model.message.total);
  EXPECT_THROW(merge(md, one, 0), DomainError);
}

TEST(Mixture, DeleteVanishingComponent) {
  const auto d = sample(BvmSineParams(0.3, 0.3, 8, 8, 2), 800, 12);
  const MixtureData md(d);
  const auto one = em_fit(md, make_model({moment_init(d)}, {1.0}));
  const auto pair = make_model({one.model.components[0], BvmSineParams(3, 3, 50, 50, 0)}, {1 - 1e-9, 1e-9});
  EmResult parent;
  parent.model = pair;
  parent.resp = e_step(md, pair);
  const auto deleted = remove_component(md, parent, 1);
  EXPECT_EQ(deleted.model.size(), 1u);
  EXPECT_NEAR(deleted.model.message.total, one.model.message.total, 1e-6 * one.model.message.total);
  EXPECT_THROW(remove_component(md, one, 0), DomainError);
}

TEST(Mixture, SplitTieBreakTowardFirstAxis) {
  const std::vector<TorusPoint> d{{0.5, 0}, {-0.5, 0}, {0, 0.5}, {0, -0.5}};
  const MixtureData md(d);
  const auto axis = split_axis(md, Eigen::VectorXd::Ones(4), BvmSineParams(0, 0, 1, 1, 0));
  EXPECT_EQ(axis.direction, Eigen::Vector2d(1, 0));
  EXPECT_NEAR(axis.sd, std::sqrt(0.125), 1e-12);
  // Off the diagonal the leading direction is +/-(1, 1)/sqrt 2, reported with a positive first entry.
  const std::vector<TorusPoint> e{{0.5, 0.5}, {-0.5, -0.5}, {0.1, -0.1}, {-0.1, 0.1}};
  const auto diag = split_axis(MixtureData(e), Eigen::VectorXd::Ones(4), BvmSineParams(0, 0, 1, 1, 0));
  EXPECT_NEAR(diag.direction[0], std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(diag.direction[1], std::sqrt(0.5), 1e-12);
}

TEST(Mixture, SplitBimodalComponent) {
  const std::vector<BvmSineParams> blobs{BvmSineParams(-1, 0.5, 20, 20, 0), BvmSineParams(1, 0.5, 20, 20, 0)};
  const auto d = mixture_sample(blobs, {500, 500}, 21);
  const MixtureData md(d);
  const auto one = em_fit(md, make_model({moment_init(d)}, {1.0}));
  const auto two = split(md, one, 0);
  ASSERT_TRUE(two.has_value());
  ASSERT_EQ(two->model.size(), 2u);
  EXPECT_LT(two->model.message.total, one.model.message.total);
  EXPECT_NEAR(two->model.weights[0] + two->model.weights[1], 1.0, 1e-12);
  for (const auto& truth : blobs) {
    const double best = std::min(mean_distance(two->model.components[0], truth),
                                 mean_distance(two->model.components[1], truth));
    EXPECT_LT(best, 0.1);
  }
}

TEST(Mixture, SearchRecoversTwoBlobsWithMonotoneTrace) {
  const auto d = mixture_sample(kTwoBlobs, {700, 500}, 5);
  const auto res = search_optimal_mixture(d, Variant::Sine, 5);
  EXPECT_EQ(res.model.size(), 2u);
  ASSERT_GE(res.trace.size(), 2u);
  EXPECT_EQ(res.trace.front().operation, "initial");
  for (std::size_t i = 1; i < res.trace.size(); ++i) {
    EXPECT_LT(res.trace[i].total, res.trace[i - 1].total);
    EXPECT_EQ(res.trace[i].iteration, static_cast<int>(i));
  }
  EXPECT_NEAR(res.trace.back().total, res.model.message.total, 1e-9);
  const auto again = search_optimal_mixture(d, Variant::Sine, 5);
  ASSERT_EQ(again.trace.size(), res.trace.size());
  for (std::size_t i = 0; i < res.trace.size(); ++i) EXPECT_EQ(again.trace[i].total, res.trace[i].total);
}

TEST(Mixture, SearchOnUniformDataKeepsOneComponent) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  std::vector<TorusPoint> d;
  for (int i = 0; i < 2000; ++i) d.emplace_back(u(rng), u(rng));
  const auto res = search_optimal_mixture(d, Variant::Sine, 1);
  ASSERT_EQ(res.model.size(), 1u);
  EXPECT_LT(res.model.components[0].kappa1(), 0.2);
  EXPECT_LT(res.model.components[0].kappa2(), 0.2);
}

TEST(Mixture, IndependentVariantKeepsLambdaZero) {
  const auto d = mixture_sample(kTwoBlobs, {300, 300}, 8);
  const auto res = search_optimal_mixture(d, Variant::Independent, 2);
  for (const auto& c : res.model.components) EXPECT_EQ(c.lambda(), 0.0);
  EXPECT_NO_THROW(res.model.validate());
  EXPECT_THROW(search_optimal_mixture(std::vector<TorusPoint>(10, TorusPoint(0, 0)), Variant::Sine, 1),
               DomainError);
}
