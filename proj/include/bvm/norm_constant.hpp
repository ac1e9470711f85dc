// Normalization constant c(kappa1, kappa2, lambda) of the BVM Sine density and
// its first and second partial derivatives, all in log scale.
//
//   c = 4 pi^2 sum_j C(2j, j) e^j I_j(kappa1) I_j(kappa2),  e = lambda^2 / (4 kappa1 kappa2)
//
// Every quantity is a positive Bessel-product series summed with a running
// log-sum-exp, terminated once a term falls below termination_ratio of the
// partial sum. Derivatives shift the Bessel orders (kappa partials) or weight
// the terms by j (lambda partials).

#ifndef BVM_NORM_CONSTANT_HPP_
#define BVM_NORM_CONSTANT_HPP_

#include <cmath>
#include <limits>
#include <string>

#include "bvm/errors.hpp"
#include "bvm/params.hpp"
#include "bvm/special_fn.hpp"

namespace bvm {

struct SeriesConfig {
  double termination_ratio = 1e-6;
  int max_terms = 1000;

  void validate() const {
    if (!(termination_ratio > 0.0 && termination_ratio < 1.0))
      throw DomainError("SeriesConfig: termination_ratio must lie in (0, 1)");
    if (max_terms < 1) throw DomainError("SeriesConfig: max_terms must be >= 1");
  }
};

// Tight termination used by the estimators and tests that difference the
// series numerically.
inline constexpr SeriesConfig kPreciseSeries{1e-15, 1000};

// Natural logs of c and its nine partials. The lambda-odd partials
// (c_l, c_k1l, c_k2l) carry the sign of lambda separately; sign 0 means the
// partial is exactly zero and its log is -inf.
struct NormDerivatives {
  double log_c = 0.0;
  double log_c_k1 = 0.0;
  double log_c_k2 = 0.0;
  double log_c_k1k1 = 0.0;
  double log_c_k2k2 = 0.0;
  double log_c_k1k2 = 0.0;
  double log_c_l = 0.0;
  double log_c_k1l = 0.0;
  double log_c_k2l = 0.0;
  double log_c_ll = 0.0;
  int sign_l = 0;
  int sign_k1l = 0;
  int sign_k2l = 0;

  // partial / c, i.e. expectations under the density.
  double over_c(double log_partial, int sign = 1) const {
    return sign == 0 ? 0.0 : sign * std::exp(log_partial - log_c);
  }
  double k1() const { return over_c(log_c_k1); }
  double k2() const { return over_c(log_c_k2); }
  double k1k1() const { return over_c(log_c_k1k1); }
  double k2k2() const { return over_c(log_c_k2k2); }
  double k1k2() const { return over_c(log_c_k1k2); }
  double l() const { return over_c(log_c_l, sign_l); }
  double k1l() const { return over_c(log_c_k1l, sign_k1l); }
  double k2l() const { return over_c(log_c_k2l, sign_k2l); }
  double ll() const { return over_c(log_c_ll); }
};

namespace detail {

inline const double kLogFourPiSq = std::log(4.0 * std::numbers::pi * std::numbers::pi);
inline const double kLogEightPiSq = std::log(8.0 * std::numbers::pi * std::numbers::pi);

inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

// ln sum_{j >= first} C(2j, j) w(j) e^j I_{j+m}(k1) I_{j+n}(k2), where
// log_weight(j) = ln w(j).
template <typename LogWeight>
double log_bessel_series(LogBesselLadder& l1, LogBesselLadder& l2, int m, int n, double log_e,
                         int first, LogWeight log_weight, const SeriesConfig& cfg,
                         const char* name) {
  const double log_stop = std::log(cfg.termination_ratio);
  double log_binom = 0.0;  // ln C(2j, j), starting at j = 0
  for (int j = 0; j < first; ++j) log_binom += std::log(2.0 * (2.0 * j + 1.0) / (j + 1.0));
  double log_sum = kNegInf;
  int terms = 0;
  for (int j = first;; ++j) {
    const double log_ej = j == 0 ? 0.0 : j * log_e;
    const double log_f = log_binom + log_weight(j) + log_ej + l1(j + m) + l2(j + n);
    log_sum = log_add(log_sum, log_f);
    ++terms;
    if (log_f - log_sum < log_stop || log_f == kNegInf) break;
    if (terms >= cfg.max_terms)
      throw ConvergenceError(std::string("normalization series ") + name +
                                 " did not converge",
                             log_sum, terms);
    log_binom += std::log(2.0 * (2.0 * j + 1.0) / (j + 1.0));
  }
  return log_sum;
}

inline double log_e_ratio(double k1, double k2, double lambda) {
  return 2.0 * std::log(std::abs(lambda)) - std::log(4.0) - std::log(k1) - std::log(k2);
}

}  // namespace detail

// ln c(kappa1, kappa2, lambda). Closed form when lambda = 0.
inline double log_norm_constant(const BvmSineParams& p, const SeriesConfig& cfg = {}) {
  cfg.validate();
  const double k1 = p.kappa1_eff();
  const double k2 = p.kappa2_eff();
  if (p.lambda() == 0.0)
    return detail::kLogFourPiSq + log_bessel_i(0, k1) + log_bessel_i(0, k2);
  LogBesselLadder l1(k1, 64), l2(k2, 64);
  const double log_e = detail::log_e_ratio(k1, k2, p.lambda());
  return detail::kLogFourPiSq +
         detail::log_bessel_series(l1, l2, 0, 0, log_e, 0, [](int) { return 0.0; }, cfg, "S1(0,0)");
}

inline NormDerivatives log_norm_derivatives(const BvmSineParams& p, const SeriesConfig& cfg = {}) {
  cfg.validate();
  const double k1 = p.kappa1_eff();
  const double k2 = p.kappa2_eff();
  const double lambda = p.lambda();
  LogBesselLadder l1(k1, 64), l2(k2, 64);
  NormDerivatives d;
  const auto& base = detail::kLogFourPiSq;

  if (lambda == 0.0) {
    d.log_c = base + l1(0) + l2(0);
    d.log_c_k1 = base + l1(1) + l2(0);
    d.log_c_k2 = base + l1(0) + l2(1);
    d.log_c_k1k2 = base + l1(1) + l2(1);
    d.log_c_k1k1 = d.log_c_k1 + std::log(std::exp(l1(2) - l1(1)) + 1.0 / k1);
    d.log_c_k2k2 = d.log_c_k2 + std::log(std::exp(l2(2) - l2(1)) + 1.0 / k2);
    d.log_c_l = d.log_c_k1l = d.log_c_k2l = detail::kNegInf;
    d.sign_l = d.sign_k1l = d.sign_k2l = 0;
    // Only the j = 1 term of the lambda'' series survives the limit.
    d.log_c_ll = base + l1(1) + l2(1) - std::log(k1) - std::log(k2);
    return d;
  }

  const double log_e = detail::log_e_ratio(k1, k2, lambda);
  auto s1 = [&](int m, int n, const char* name) {
    return base + detail::log_bessel_series(l1, l2, m, n, log_e, 0, [](int) { return 0.0; }, cfg, name);
  };
  const double log_delta2 = detail::kLogEightPiSq - std::log(std::abs(lambda));
  auto s2 = [&](int m, int n, const char* name) {
    return log_delta2 + detail::log_bessel_series(
                            l1, l2, m, n, log_e, 1, [](int j) { return std::log(static_cast<double>(j)); },
                            cfg, name);
  };

  d.log_c = s1(0, 0, "S1(0,0)");
  d.log_c_k1 = s1(1, 0, "S1(1,0)");
  d.log_c_k2 = s1(0, 1, "S1(0,1)");
  d.log_c_k1k2 = s1(1, 1, "S1(1,1)");
  const double s20 = s1(2, 0, "S1(2,0)");
  const double s02 = s1(0, 2, "S1(0,2)");
  d.log_c_k1k1 = d.log_c_k1 + std::log(std::exp(s20 - d.log_c_k1) + 1.0 / k1);
  d.log_c_k2k2 = d.log_c_k2 + std::log(std::exp(s02 - d.log_c_k2) + 1.0 / k2);

  const int sign = lambda > 0.0 ? 1 : -1;
  d.log_c_l = s2(0, 0, "S2(0,0)");
  d.log_c_k1l = s2(1, 0, "S2(1,0)");
  d.log_c_k2l = s2(0, 1, "S2(0,1)");
  d.sign_l = d.sign_k1l = d.sign_k2l = sign;
  d.log_c_ll = log_delta2 - std::log(std::abs(lambda)) +
               detail::log_bessel_series(
                   l1, l2, 0, 0, log_e, 1,
                   [](int j) { return std::log(static_cast<double>(j) * (2.0 * j - 1.0)); }, cfg,
                   "S(c_ll)");
  return d;
}

}  // namespace bvm

#endif  // BVM_NORM_CONSTANT_HPP_
