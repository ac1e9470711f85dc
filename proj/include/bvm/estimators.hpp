// Point estimators for the BVM Sine and Independent models: ML, three MAP
// versions, MML; plus the Rosenblatt transform and a likelihood-ratio test.
//
// All estimators work on weighted sufficient statistics, so the same code
// serves single fits and the EM M-step. The search runs in an unconstrained
// chart around a reference mean:
//
//   x = (m1, m2, ln kappa1, ln kappa2, atanh rho),   mu_k = ref_k + m_k
//
// except MAP3, which searches the Rosenblatt cube directly.

#ifndef BVM_ESTIMATORS_HPP_
#define BVM_ESTIMATORS_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>

#include <boost/math/distributions/chi_squared.hpp>
#include <Eigen/Core>

#include "bvm/errors.hpp"
#include "bvm/fisher_mml.hpp"
#include "bvm/norm_constant.hpp"
#include "bvm/optimize.hpp"
#include "bvm/params.hpp"
#include "bvm/stats.hpp"
#include "bvm/torus.hpp"

namespace bvm {

enum class Method { ML, MAP1, MAP2, MAP3, MML };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::ML: return "ML";
    case Method::MAP1: return "MAP1";
    case Method::MAP2: return "MAP2";
    case Method::MAP3: return "MAP3";
    case Method::MML: return "MML";
  }
  return "?";
}

inline Method parse_method(std::string_view s) {
  if (s == "ml" || s == "ML") return Method::ML;
  if (s == "map1" || s == "MAP1") return Method::MAP1;
  if (s == "map2" || s == "MAP2") return Method::MAP2;
  if (s == "map3" || s == "MAP3") return Method::MAP3;
  if (s == "mml" || s == "MML") return Method::MML;
  throw InputError("unknown estimation method '" + std::string(s) + "'");
}

struct EstimatorReport {
  Method method = Method::ML;
  BvmSineParams params_hat;
  double objective_value = 0.0;  // nats, except MML which is total bits
  int optimizer_evals = 0;
  bool converged = false;
};

// Search box: kappa = exp(u), u in [kLogKappaMin, kLogKappaMax]; |rho| <= kRhoMax.
inline constexpr double kLogKappaMin = -23.0;
inline constexpr double kLogKappaMax = 12.0;
inline constexpr double kRhoMax = 1.0 - 1e-8;

struct EstimatorOptions {
  Variant variant = Variant::Sine;
  NelderMeadOptions optimizer{};
  SeriesConfig series = kPreciseSeries;
  MmlSettings mml{};
  double step_scale = 1.0;          // initial simplex size multiplier
  std::uint64_t restart_seed = 17;  // for the single random restart
};

// ---------------------------------------------------------------- moments

inline BvmSineParams moment_init(const TorusStats& stats, Variant variant = Variant::Sine) {
  if (!(stats.n > 0.0)) throw DomainError("moment_init: empty data");
  const double mu1 = wrap_angle(stats.ref1 + std::atan2(stats.s1, stats.c1));
  const double mu2 = wrap_angle(stats.ref2 + std::atan2(stats.s2, stats.c2));
  const TorusStats r = stats.recentered(mu1, mu2);
  const double kmin = std::exp(kLogKappaMin), kmax = std::exp(kLogKappaMax);
  auto kappa_of = [&](double rbar, const char* axis) {
    if (1.0 - rbar < 1e-12)
      throw DegenerateDataError(std::string("moment_init: all points coincide on ") + axis);
    const double k = rbar * (2.0 - rbar * rbar) / (1.0 - rbar * rbar);
    return std::clamp(k, kmin, kmax);
  };
  const double k1 = kappa_of(std::hypot(r.c1, r.s1) / r.n, "theta1");
  const double k2 = kappa_of(std::hypot(r.c2, r.s2) / r.n, "theta2");
  if (variant == Variant::Independent) return BvmSineParams::independent(mu1, mu2, k1, k2);
  const double denom = std::sqrt(std::max(r.sin_sq1(), 0.0) * std::max(r.sin_sq2(), 0.0));
  const double rho = denom > 0.0 ? std::clamp(r.ss / denom, -0.95, 0.95) : 0.0;
  return BvmSineParams::from_rho(mu1, mu2, k1, k2, rho);
}

inline BvmSineParams moment_init(std::span<const TorusPoint> data, Variant variant = Variant::Sine) {
  if (data.empty()) throw DomainError("moment_init: empty data");
  return moment_init(TorusStats::from(data), variant);
}

// ------------------------------------------------------------- Rosenblatt

struct RosenblattVector {
  std::array<double, 5> z{};
  double& operator[](std::size_t i) { return z[i]; }
  double operator[](std::size_t i) const { return z[i]; }
};

namespace detail {

// 1 - cos(atan k) without cancellation at small k.
inline double kappa_to_unit(double k) {
  const double s = std::sqrt(1.0 + k * k);
  return k * k / (s * (1.0 + s));
}

// tan(acos(1 - z)).
inline double unit_to_kappa(double z) { return std::sqrt(z * (2.0 - z)) / (1.0 - z); }

}  // namespace detail

inline RosenblattVector rosenblatt_forward(const BvmSineParams& p) {
  RosenblattVector v;
  v[0] = (p.mu1() + kPi) / kTwoPi;
  v[1] = (p.mu2() + kPi) / kTwoPi;
  v[2] = detail::kappa_to_unit(p.kappa1());
  v[3] = detail::kappa_to_unit(p.kappa2());
  v[4] = 0.5 * (p.rho() + 1.0);
  return v;
}

inline BvmSineParams rosenblatt_inverse(const RosenblattVector& v) {
  for (std::size_t i = 0; i < 5; ++i)
    if (!(v[i] >= 0.0 && v[i] <= 1.0))
      throw DomainError("rosenblatt_inverse: z" + std::to_string(i + 1) + " outside [0, 1]");
  if (v[2] == 1.0 || v[3] == 1.0) throw DomainError("rosenblatt_inverse: infinite concentration");
  const double k1 = detail::unit_to_kappa(v[2]);
  const double k2 = detail::unit_to_kappa(v[3]);
  return BvmSineParams(kPi * (2.0 * v[0] - 1.0), kPi * (2.0 * v[1] - 1.0), k1, k2,
                       (2.0 * v[4] - 1.0) * std::sqrt(k1 * k2));
}

// ------------------------------------------------------------- objectives

// ln h(Theta) + ln L for the MAP versions: MAP1 in Theta, MAP2 in
// (mu1, mu2, kappa1, kappa2, rho), MAP3 flat on the Rosenblatt cube.
inline double log_prior_for(Method m, const BvmSineParams& p) {
  switch (m) {
    case Method::MAP1: return log_prior_density(p, Parameterization::Theta);
    case Method::MAP2: return log_prior_density(p, Parameterization::ThetaPrime);
    default: return 0.0;
  }
}

// Objective in the units reported by EstimatorReport.
inline double estimator_objective(Method m, const TorusStats& s, const BvmSineParams& p,
                                  const EstimatorOptions& opt) {
  if (m == Method::MML) return message_length_from_stats(s, p, opt.variant, opt.mml, opt.series).total;
  const double nll = s.negative_log_likelihood(p, log_norm_constant(p, opt.series));
  return nll - log_prior_for(m, p);
}

namespace detail {

struct Chart {
  double ref1 = 0.0, ref2 = 0.0;
  int dim = 5;
  bool cube = false;  // MAP3

  BvmSineParams params(const Eigen::VectorXd& x) const {
    if (cube) {
      const double k1 = unit_to_kappa(x[2]), k2 = unit_to_kappa(x[3]);
      return BvmSineParams(ref1 + kTwoPi * x[0] - kPi, ref2 + kTwoPi * x[1] - kPi, k1, k2,
                           (2.0 * x[4] - 1.0) * std::sqrt(k1 * k2));
    }
    const double k1 = std::exp(x[2]), k2 = std::exp(x[3]);
    const double rho = dim == 5 ? std::tanh(x[4]) : 0.0;
    return BvmSineParams(ref1 + x[0], ref2 + x[1], k1, k2, rho * std::sqrt(k1 * k2));
  }

  Eigen::VectorXd point(const BvmSineParams& p) const {
    Eigen::VectorXd x(dim);
    const double m1 = angular_difference(p.mu1(), ref1), m2 = angular_difference(p.mu2(), ref2);
    const double kmin = std::exp(kLogKappaMin), kmax = std::exp(kLogKappaMax);
    const double k1 = std::clamp(p.kappa1(), kmin, kmax), k2 = std::clamp(p.kappa2(), kmin, kmax);
    const double rho = std::clamp(p.rho(), -kRhoMax, kRhoMax);
    if (cube) {
      x << (m1 + kPi) / kTwoPi, (m2 + kPi) / kTwoPi, kappa_to_unit(k1), kappa_to_unit(k2),
          0.5 * (rho + 1.0);
      return x;
    }
    x[0] = m1;
    x[1] = m2;
    x[2] = std::log(k1);
    x[3] = std::log(k2);
    if (dim == 5) x[4] = std::atanh(rho);
    return x;
  }

  void bounds(Eigen::VectorXd& lo, Eigen::VectorXd& hi) const {
    const double inf = std::numeric_limits<double>::infinity();
    lo.resize(dim);
    hi.resize(dim);
    lo[0] = lo[1] = -inf;
    hi[0] = hi[1] = inf;
    if (cube) {
      lo[2] = lo[3] = kappa_to_unit(std::exp(kLogKappaMin));
      hi[2] = hi[3] = kappa_to_unit(std::exp(kLogKappaMax));
      lo[4] = 0.5 * (1.0 - kRhoMax);
      hi[4] = 0.5 * (1.0 + kRhoMax);
      return;
    }
    lo[2] = lo[3] = kLogKappaMin;
    hi[2] = hi[3] = kLogKappaMax;
    if (dim == 5) {
      lo[4] = -std::atanh(kRhoMax);
      hi[4] = std::atanh(kRhoMax);
    }
  }

  Eigen::VectorXd steps(const BvmSineParams& p, double n, double scale) const {
    Eigen::VectorXd s(dim);
    const double sn = std::sqrt(std::max(n, 1.0));
    auto mu_step = [&](double k) { return std::min(0.5, 1.0 / std::sqrt(std::max(k, 1e-3) * sn)); };
    s[0] = mu_step(p.kappa1());
    s[1] = mu_step(p.kappa2());
    s[2] = s[3] = std::min(0.5, 2.0 / sn);
    if (dim == 5) s[4] = std::min(0.5, 2.0 / sn);
    if (cube) {
      s[0] /= kTwoPi;
      s[1] /= kTwoPi;
      // dz/du = k^2 / (1 + k^2)^(3/2) for z = kappa_to_unit(e^u).
      auto dz = [](double k) { return k * k / std::pow(1.0 + k * k, 1.5); };
      s[2] = std::max(s[2] * dz(p.kappa1()), 1e-9);
      s[3] = std::max(s[3] * dz(p.kappa2()), 1e-9);
      s[4] = std::min(0.25, 0.5 * s[4] * (1.0 - p.rho() * p.rho()) + 1e-6);
    }
    return s * scale;
  }
};

}  // namespace detail

// Minimizes the objective of `method` from `start` (moment_init if absent).
inline EstimatorReport estimate(const TorusStats& stats, Method method, const EstimatorOptions& opt = {},
                                std::optional<BvmSineParams> start = std::nullopt) {
  if (!(stats.n > 0.0)) throw DomainError("estimate: empty data");
  if (opt.variant == Variant::Independent && method != Method::ML && method != Method::MML)
    throw DomainError("estimate: MAP versions are defined for the Sine variant only");
  opt.series.validate();
  BvmSineParams init = start ? *start : moment_init(stats, opt.variant);
  if (opt.variant == Variant::Independent) init = init.with_lambda(0.0);

  detail::Chart chart;
  chart.ref1 = init.mu1();
  chart.ref2 = init.mu2();
  chart.dim = free_parameters(opt.variant);
  chart.cube = method == Method::MAP3;
  const TorusStats local = stats.recentered(chart.ref1, chart.ref2);

  // Infeasible trial points (series failure, singular Fisher) score +inf.
  auto f = [&](const Eigen::VectorXd& x) {
    try {
      return estimator_objective(method, local, chart.params(x), opt);
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  Eigen::VectorXd lo, hi;
  chart.bounds(lo, hi);
  const Eigen::VectorXd step = chart.steps(init, stats.n, opt.step_scale);
  NelderMeadResult res = nelder_mead(f, chart.point(init), step, lo, hi, opt.optimizer);

  if (!res.converged) {
    std::mt19937_64 rng(opt.restart_seed);
    std::normal_distribution<double> jitter(0.0, 1.0);
    Eigen::VectorXd x0 = res.x;
    for (Eigen::Index i = 0; i < x0.size(); ++i) x0[i] += step[i] * jitter(rng);
    NelderMeadResult again = nelder_mead(f, detail::project(x0, lo, hi), step, lo, hi, opt.optimizer);
    again.evals += res.evals;
    if (again.f <= res.f) {
      res = again;
    } else {
      res.evals = again.evals;
    }
  }
  if (!std::isfinite(res.f)) throw ConvergenceError("estimate: no finite objective value found", res.f, res.evals);

  EstimatorReport rep;
  rep.method = method;
  rep.params_hat = chart.params(res.x);
  rep.objective_value = res.f;
  rep.optimizer_evals = res.evals;
  rep.converged = res.converged;
  return rep;
}

namespace detail {

inline TorusStats stats_for(std::span<const TorusPoint> data) {
  if (data.size() < 5) throw DomainError("estimator needs at least 5 points");
  return TorusStats::from(data);
}

}  // namespace detail

inline EstimatorReport estimate_ml(std::span<const TorusPoint> data, Variant variant = Variant::Sine,
                                   EstimatorOptions opt = {}) {
  opt.variant = variant;
  return estimate(detail::stats_for(data), Method::ML, opt);
}

inline EstimatorReport estimate_map(std::span<const TorusPoint> data, Method version,
                                    EstimatorOptions opt = {}) {
  if (version != Method::MAP1 && version != Method::MAP2 && version != Method::MAP3)
    throw DomainError("estimate_map: version must be MAP1, MAP2 or MAP3");
  opt.variant = Variant::Sine;
  return estimate(detail::stats_for(data), version, opt);
}

inline EstimatorReport estimate_mml(std::span<const TorusPoint> data, Variant variant = Variant::Sine,
                                    EstimatorOptions opt = {}) {
  opt.variant = variant;
  return estimate(detail::stats_for(data), Method::MML, opt);
}

// ------------------------------------------------------------------- LRT

struct LikelihoodRatio {
  double statistic = 0.0;
  double p_value = 1.0;
};

inline constexpr int kLrtDegreesOfFreedom = 5;

inline LikelihoodRatio likelihood_ratio_test(const TorusStats& stats, const BvmSineParams& params_hat,
                                             const BvmSineParams& params_ref,
                                             const SeriesConfig& cfg = kPreciseSeries) {
  const double nll_hat = stats.negative_log_likelihood(params_hat, log_norm_constant(params_hat, cfg));
  const double nll_ref = stats.negative_log_likelihood(params_ref, log_norm_constant(params_ref, cfg));
  LikelihoodRatio r;
  r.statistic = std::max(0.0, 2.0 * (nll_ref - nll_hat));
  const boost::math::chi_squared dist(kLrtDegreesOfFreedom);
  r.p_value = r.statistic == 0.0 ? 1.0 : boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

inline LikelihoodRatio likelihood_ratio_test(std::span<const TorusPoint> data, const BvmSineParams& params_hat,
                                             const BvmSineParams& params_ref,
                                             const SeriesConfig& cfg = kPreciseSeries) {
  return likelihood_ratio_test(TorusStats::from(data), params_hat, params_ref, cfg);
}

// Upper-tail critical value of chi^2(dof) at significance p.
inline double chi_squared_critical_value(double p, int dof = kLrtDegreesOfFreedom) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("chi_squared_critical_value: p must lie in (0, 1)");
  const boost::math::chi_squared dist(dof);
  return boost::math::quantile(boost::math::complement(dist, p));
}

}  // namespace bvm

#endif  // BVM_ESTIMATORS_HPP_
