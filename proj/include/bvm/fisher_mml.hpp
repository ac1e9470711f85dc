// Fisher information, parameter priors and the two-part message length.
//
//   I(Theta, D) = (d/2) log q_d - log(h(Theta) / sqrt|F(Theta)|)      first part (see parameter_cost_nats)
//               + L(D | Theta) + d/2 + N * (-2 log eps)              second part
//
// with |F(Theta)| = N^d |F_1(Theta)|. Likelihood math is in nats; the
// MessageLength returned to callers is in bits.

#ifndef BVM_FISHER_MML_HPP_
#define BVM_FISHER_MML_HPP_

#include <cmath>
#include <numbers>
#include <span>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "bvm/density.hpp"
#include "bvm/errors.hpp"
#include "bvm/norm_constant.hpp"
#include "bvm/params.hpp"
#include "bvm/special_fn.hpp"
#include "bvm/stats.hpp"

namespace bvm {

struct FisherBlocks {
  Eigen::Matrix2d fa;  // (mu1, mu2)
  Eigen::Matrix3d fs;  // (kappa1, kappa2, lambda)
  double log_det_single = 0.0;
};

namespace detail {

template <typename Matrix>
double log_det_spd(const Matrix& m, const char* what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success || !m.allFinite())
    throw ConditioningError(std::string(what) + " is not positive definite");
  const auto& l = llt.matrixL();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double li = l(i, i);
    if (!(li > 0.0)) throw ConditioningError(std::string(what) + " is singular");
    acc += 2.0 * std::log(li);
  }
  return acc;
}

}  // namespace detail

// Single-observation Fisher blocks from precomputed derivatives.
inline FisherBlocks fisher_single(const BvmSineParams& p, const NormDerivatives& d) {
  const double k1 = p.kappa1_eff(), k2 = p.kappa2_eff(), lambda = p.lambda();
  const double ck1 = d.k1(), ck2 = d.k2(), cl = d.l();
  FisherBlocks f;
  f.fa(0, 0) = k1 * ck1 + lambda * cl;
  f.fa(1, 1) = k2 * ck2 + lambda * cl;
  f.fa(0, 1) = f.fa(1, 0) = -lambda * d.k1k2();
  f.fs(0, 0) = d.k1k1() - ck1 * ck1;
  f.fs(1, 1) = d.k2k2() - ck2 * ck2;
  f.fs(2, 2) = d.ll() - cl * cl;
  f.fs(0, 1) = f.fs(1, 0) = d.k1k2() - ck1 * ck2;
  f.fs(0, 2) = f.fs(2, 0) = d.k1l() - cl * ck1;
  f.fs(1, 2) = f.fs(2, 1) = d.k2l() - cl * ck2;
  f.log_det_single =
      detail::log_det_spd(f.fa, "angular Fisher block") + detail::log_det_spd(f.fs, "scale Fisher block");
  return f;
}

inline FisherBlocks fisher_single(const BvmSineParams& p, const SeriesConfig& cfg = kPreciseSeries) {
  return fisher_single(p, log_norm_derivatives(p, cfg));
}

// Independent variant: diagonal 4x4 over (mu1, mu2, kappa1, kappa2).
struct FisherIndependent {
  Eigen::Vector4d diagonal;
  double log_det_single = 0.0;
};

inline FisherIndependent fisher_independent(const BvmSineParams& p) {
  const double k1 = p.kappa1_eff(), k2 = p.kappa2_eff();
  FisherIndependent f;
  f.diagonal << k1 * bessel_ratio_A(k1), k2 * bessel_ratio_A(k2), bessel_ratio_A_derivative(k1),
      bessel_ratio_A_derivative(k2);
  if (!(f.diagonal.array() > 0.0).all() || !f.diagonal.allFinite())
    throw ConditioningError("independent Fisher matrix is not positive definite");
  f.log_det_single = f.diagonal.array().log().sum();
  return f;
}

// ln |F(Theta)| for n observations: d ln n + ln |F_1|.
inline double log_det_fisher(const BvmSineParams& p, double n, Variant variant = Variant::Sine,
                             const SeriesConfig& cfg = kPreciseSeries) {
  if (!(n > 0.0)) throw DomainError("log_det_fisher: sample size must be positive");
  const double single = variant == Variant::Sine ? fisher_single(p, cfg).log_det_single
                                                 : fisher_independent(p).log_det_single;
  return free_parameters(variant) * std::log(n) + single;
}

// Optimal lattice quantizing constants (Conway & Sloane).
struct MmlConstants {
  int d = 5;
  double q_d = 0.075625;

  static MmlConstants for_dimension(int d) {
    switch (d) {
      case 1: return {1, 1.0 / 12.0};
      case 2: return {2, 5.0 / (36.0 * std::sqrt(3.0))};
      case 3: return {3, 19.0 / (192.0 * std::cbrt(2.0))};
      case 4: return {4, 0.076603};
      case 5: return {5, 0.075625};
      default: throw DomainError("MmlConstants: unsupported dimension " + std::to_string(d));
    }
  }
  static MmlConstants for_variant(Variant v) { return for_dimension(free_parameters(v)); }
};

enum class Parameterization { Theta, ThetaPrime, ThetaDoublePrime };

// ln h(Theta) for the Sine model in each parameterization. THETA_DOUBLE_PRIME
// is the flat prior on the Rosenblatt cube.
inline double log_prior_density(const BvmSineParams& p, Parameterization which) {
  if (which == Parameterization::ThetaDoublePrime) return 0.0;
  const double k1 = p.kappa1(), k2 = p.kappa2();
  const double log_scale = -1.5 * std::log1p(k1 * k1) - 1.5 * std::log1p(k2 * k2) -
                           std::log(8.0 * std::numbers::pi * std::numbers::pi);
  const double log_root = 0.5 * (std::log(k1) + std::log(k2));
  return which == Parameterization::Theta ? log_root + log_scale : 2.0 * log_root + log_scale;
}

inline double prior_density(const BvmSineParams& p, Parameterization which) {
  return std::exp(log_prior_density(p, which));
}

// ln h for the Independent variant: product of two von Mises priors,
// uniform mean times k / (1 + k^2)^(3/2).
inline double log_prior_independent(const BvmSineParams& p) {
  const double k1 = p.kappa1(), k2 = p.kappa2();
  return std::log(k1) + std::log(k2) - 1.5 * std::log1p(k1 * k1) - 1.5 * std::log1p(k2 * k2) -
         std::log(4.0 * std::numbers::pi * std::numbers::pi);
}

struct MessageLength {
  double first_part = 0.0;   // bits
  double second_part = 0.0;  // bits
  double total = 0.0;        // bits
};

struct MmlSettings {
  double epsilon = 1e-3;  // data resolution per coordinate, radians
};

inline constexpr double kLn2 = std::numbers::ln2;

namespace detail {

// (d/2) ln q_d - ln h + (1/2) ln |F|, i.e. -ln p with p the prior mass of the
// quantization cell.
inline double log_cell_cost(const BvmSineParams& p, Variant variant, double n, const NormDerivatives* derivs,
                            const SeriesConfig& cfg) {
  const auto k = MmlConstants::for_variant(variant);
  double log_h = 0.0, log_det = 0.0;
  if (variant == Variant::Independent) {
    log_h = log_prior_independent(p);
    log_det = fisher_independent(p).log_det_single;
  } else {
    log_h = log_prior_density(p, Parameterization::Theta);
    log_det = derivs ? fisher_single(p, *derivs).log_det_single : fisher_single(p, cfg).log_det_single;
  }
  return 0.5 * k.d * std::log(k.q_d) - log_h + 0.5 * (k.d * std::log(n) + log_det);
}

}  // namespace detail

// First part in nats for a component that has effective sample size n.
// Near kappa = 0 the angular Fisher terms vanish and p exceeds 1, so the cell
// is coded as having mass p / (1 + p); once -ln p >> 0 nothing changes.
inline double parameter_cost_nats(const BvmSineParams& p, Variant variant, double n,
                                  const NormDerivatives* derivs = nullptr,
                                  const SeriesConfig& cfg = kPreciseSeries) {
  const double raw = detail::log_cell_cost(p, variant, n, derivs, cfg);
  return raw > 0.0 ? raw + std::log1p(std::exp(-raw)) : std::log1p(std::exp(raw));
}

// Second part in nats given the negative log-likelihood.
inline double data_cost_nats(double nll, Variant variant, double n, const MmlSettings& s = {}) {
  return nll + 0.5 * free_parameters(variant) - 2.0 * n * std::log(s.epsilon);
}

inline MessageLength message_length_from_stats(const TorusStats& stats, const BvmSineParams& p,
                                               Variant variant, const MmlSettings& s = {},
                                               const SeriesConfig& cfg = kPreciseSeries) {
  if (!(stats.n > 0.0)) throw DomainError("message_length: empty data");
  if (variant == Variant::Independent && p.lambda() != 0.0)
    throw DomainError("message_length: Independent variant requires lambda = 0");
  double first = 0.0, log_c = 0.0;
  if (variant == Variant::Sine) {
    const auto d = log_norm_derivatives(p, cfg);
    first = parameter_cost_nats(p, variant, stats.n, &d);
    log_c = d.log_c;
  } else {
    first = parameter_cost_nats(p, variant, stats.n);
    log_c = log_norm_constant(p, cfg);
  }
  const double second = data_cost_nats(stats.negative_log_likelihood(p, log_c), variant, stats.n, s);
  MessageLength m;
  m.first_part = first / kLn2;
  m.second_part = second / kLn2;
  m.total = m.first_part + m.second_part;
  return m;
}

inline MessageLength message_length(std::span<const TorusPoint> data, const BvmSineParams& p,
                                    Variant variant, const MmlSettings& s = {},
                                    const SeriesConfig& cfg = kPreciseSeries) {
  if (data.empty()) throw DomainError("message_length: empty data");
  return message_length_from_stats(TorusStats::from(data, {}, p.mu1(), p.mu2()), p, variant, s, cfg);
}

}  // namespace bvm

#endif  // BVM_FISHER_MML_HPP_
