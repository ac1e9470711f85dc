// Modified Bessel functions of the first kind, integer order, in natural-log
// scale.
//
// Orders 0 and 1 use the ascending power series for x <= 20 and the Hankel
// asymptotic expansion above that. Higher orders are seeded with the Debye
// uniform asymptotic expansion at order max(v, 50) and brought down with the
// backward ratio recurrence
//
//   I_{k-1}(x) / I_k(x) = 2k/x + I_{k+1}(x) / I_k(x),
//
// which is stable in the downward direction. Nothing is ever exponentiated,
// so arguments up to ~1e5 and orders up to ~1e3 are fine.

#ifndef BVM_SPECIAL_FN_HPP_
#define BVM_SPECIAL_FN_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "bvm/errors.hpp"

namespace bvm {

struct LogBessel {
  int order = 0;
  double argument = 0.0;
  double log_value = 0.0;  // ln I_order(argument); -inf allowed
};

namespace detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Debye polynomials u_k(t), coefficients of t^(k), t^(k+2), ..., t^(3k).
// u_{k+1} = t^2 (1 - t^2) u_k' / 2 + (1/8) int_0^t (1 - 5 s^2) u_k(s) ds.
struct DebyeTables {
  static constexpr int kTerms = 8;
  static double u(int k, double t) {
    // clang-format off
    static const std::array<std::vector<double>, kTerms + 1> coef = {{
      {1.0},
      {1.0 / 8, -5.0 / 24},
      {9.0 / 128, -77.0 / 192, 385.0 / 1152},
      {75.0 / 1024, -4563.0 / 5120, 17017.0 / 9216, -85085.0 / 82944},
      {3675.0 / 32768, -96833.0 / 40960, 144001.0 / 16384, -7436429.0 / 663552,
       37182145.0 / 7962624},
      {59535.0 / 262144, -67608983.0 / 9175040, 250881631.0 / 5898240,
       -108313205.0 / 1179648, 5391411025.0 / 63700992, -5391411025.0 / 191102976},
      {2401245.0 / 4194304, -388895895.0 / 14680064, 1441372804469.0 / 6606028800,
       -33010308331.0 / 47185920, 4445922195.0 / 4194304, -1169936192425.0 / 1528823808,
       5849680962125.0 / 27518828544},
      {57972915.0 / 33554432, -25388505925.0 / 234881024, 1007390378503.0 / 838860800,
       -1602251736839.0 / 301989888, 10559432785187.0 / 905969664,
       -36927006432745.0 / 2717908992, 1774793203908725.0 / 220150628352,
       -1267709431363375.0 / 660451885056},
      {13043905875.0 / 2147483648, -928090660435.0 / 1879048192,
       667955999804539.0 / 93952409600, -276439228010667.0 / 6710886400,
       3542717254441859.0 / 28991029248, -39803268297948155.0 / 195689447424,
       75358832548684685.0 / 391378894848, -512408152157076175.0 / 5283615080448,
       2562040760785380875.0 / 126806761930752},
    }};
    // clang-format on
    const auto& c = coef[static_cast<std::size_t>(k)];
    const double t2 = t * t;
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t2 + *it;
    return acc * std::pow(t, k);
  }
};

// ln I_v(x) from the Debye expansion; accurate for v >= 50, any x > 0.
inline double log_bessel_debye(double v, double x) {
  const double z = x / v;
  const double sq = std::sqrt(1.0 + z * z);
  const double t = 1.0 / sq;
  const double eta = sq + std::log(z) - std::log1p(sq);
  double series = 0.0;
  double vk = 1.0;
  for (int k = 0; k <= DebyeTables::kTerms; ++k) {
    series += DebyeTables::u(k, t) / vk;
    vk *= v;
  }
  return v * eta - 0.5 * std::log(2.0 * std::numbers::pi * v) - 0.5 * std::log(sq) +
         std::log(series);
}

// ln I_v(x) for v in {0, 1}: power series (x <= 20) or Hankel expansion.
inline double log_bessel_low_order(int v, double x) {
  if (x <= 20.0) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 0; k < 200; ++k) {
      term *= q / (static_cast<double>(k + 1) * static_cast<double>(k + 1 + v));
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return v == 0 ? std::log(sum) : std::log(0.5 * x) + std::log(sum);
  }
  const double mu = 4.0 * v * v;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (mu - odd * odd) / (k * 8.0 * x);
    if (std::abs(next) >= std::abs(term)) break;  // asymptotic: stop at smallest term
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return x - 0.5 * std::log(2.0 * std::numbers::pi * x) + std::log(sum);
}

inline void require_nonnegative(double x, const char* what) {
  if (!(x >= 0.0)) throw DomainError(std::string(what) + ": argument must be >= 0");
}

}  // namespace detail

// ln I_v(x) for all orders v = 0..max_order at a fixed argument. Grows on
// demand; the series for the normalization constant walk up the order.
class LogBesselLadder {
public:
  static constexpr int kSeedOrder = 50;

  explicit LogBesselLadder(double x, int max_order = kSeedOrder) : x_(x) {
    detail::require_nonnegative(x, "LogBesselLadder");
    build(std::max(max_order, 1));
  }

  double argument() const noexcept { return x_; }

  double operator()(int order) {
    if (order < 0) throw DomainError("LogBesselLadder: negative order");
    if (order >= static_cast<int>(logs_.size())) build(std::max(order, 2 * static_cast<int>(logs_.size())));
    return logs_[static_cast<std::size_t>(order)];
  }

private:
  void build(int max_order) {
    logs_.assign(static_cast<std::size_t>(max_order) + 1, detail::kNegInf);
    if (x_ == 0.0) {
      logs_[0] = 0.0;
      return;
    }
    const int top = std::max(max_order, kSeedOrder);
    double log_top = detail::log_bessel_debye(top, x_);
    const double log_above = detail::log_bessel_debye(top + 1, x_);
    double ratio = std::exp(log_above - log_top);  // I_{k+1}/I_k at k = top
    if (top <= max_order) logs_[static_cast<std::size_t>(top)] = log_top;
    double log_k = log_top;
    for (int k = top; k >= 1; --k) {
      const double inv = 2.0 * k / x_ + ratio;  // I_{k-1}/I_k
      log_k += std::log(inv);
      ratio = 1.0 / inv;
      if (k - 1 <= max_order) logs_[static_cast<std::size_t>(k - 1)] = log_k;
    }
  }

  double x_;
  std::vector<double> logs_;
};

// ln I_order(x). Domain error for negative order or x.
inline double log_bessel_i(int order, double x) {
  if (order < 0) throw DomainError("log_bessel_i: order must be >= 0");
  detail::require_nonnegative(x, "log_bessel_i");
  if (x == 0.0) return order == 0 ? 0.0 : detail::kNegInf;
  if (order <= 1) return detail::log_bessel_low_order(order, x);
  if (order >= LogBesselLadder::kSeedOrder) return detail::log_bessel_debye(order, x);
  LogBesselLadder ladder(x, order);
  return ladder(order);
}

inline LogBessel evaluate_log_bessel(int order, double x) {
  return LogBessel{order, x, log_bessel_i(order, x)};
}

// A(x) = I_1(x) / I_0(x), the mean resultant length of a von Mises(kappa = x).
inline double bessel_ratio_A(double x) {
  detail::require_nonnegative(x, "bessel_ratio_A");
  if (x == 0.0) return 0.0;
  return std::exp(detail::log_bessel_low_order(1, x) - detail::log_bessel_low_order(0, x));
}

// dA/dx = 1 - A/x - A^2, the Fisher information of a von Mises in kappa.
inline double bessel_ratio_A_derivative(double x) {
  detail::require_nonnegative(x, "bessel_ratio_A_derivative");
  if (x == 0.0) return 0.5;
  const double a = bessel_ratio_A(x);
  return 1.0 - a / x - a * a;
}

}  // namespace bvm

#endif  // BVM_SPECIAL_FN_HPP_
