// Density, likelihood and moments of the BVM Sine distribution.

#ifndef BVM_DENSITY_HPP_
#define BVM_DENSITY_HPP_

#include <cmath>
#include <span>

#include "bvm/errors.hpp"
#include "bvm/norm_constant.hpp"
#include "bvm/params.hpp"
#include "bvm/torus.hpp"

namespace bvm {

// Exponent of the unnormalized density at x.
inline double log_kernel(const TorusPoint& x, const BvmSineParams& p) {
  const double d1 = x.theta1() - p.mu1();
  const double d2 = x.theta2() - p.mu2();
  return p.kappa1() * std::cos(d1) + p.kappa2() * std::cos(d2) +
         p.lambda() * std::sin(d1) * std::sin(d2);
}

inline double log_density(const TorusPoint& x, const BvmSineParams& p, double log_c) {
  return log_kernel(x, p) - log_c;
}

inline double log_density(const TorusPoint& x, const BvmSineParams& p,
                          const SeriesConfig& cfg = {}) {
  return log_density(x, p, log_norm_constant(p, cfg));
}

// N ln c - sum of kernel exponents, by direct summation over the data.
inline double negative_log_likelihood(std::span<const TorusPoint> data, const BvmSineParams& p,
                                      const SeriesConfig& cfg = {}) {
  if (data.empty()) throw DomainError("negative_log_likelihood: empty data");
  double kernel = 0.0;
  for (const auto& x : data) kernel += log_kernel(x, p);
  return static_cast<double>(data.size()) * log_norm_constant(p, cfg) - kernel;
}

struct Expectations {
  double e_cos1 = 0.0;    // E[cos(t1 - mu1)]
  double e_cos2 = 0.0;    // E[cos(t2 - mu2)]
  double e_sinsin = 0.0;  // E[sin(t1 - mu1) sin(t2 - mu2)]
  double e_coscos = 0.0;  // E[cos(t1 - mu1) cos(t2 - mu2)]
  // E[sin(t1 - mu1)], E[sin(t2 - mu2)] and the mixed cos*sin moments vanish.
};

inline Expectations expectations(const NormDerivatives& d) {
  return Expectations{d.k1(), d.k2(), d.l(), d.k1k2()};
}

inline Expectations expectations(const BvmSineParams& p, const SeriesConfig& cfg = {}) {
  return expectations(log_norm_derivatives(p, cfg));
}

struct LimitCovariance {
  double rho = 0.0;
  double c11 = 0.0;
  double c22 = 0.0;
  double c12 = 0.0;
};

// Correlation and the covariance of the limiting bivariate Gaussian (large
// concentrations). Requires kappa1 kappa2 > lambda^2 strictly, so it is
// undefined for the kappa = 0 uniform case.
inline LimitCovariance correlation_and_limit_covariance(const BvmSineParams& p) {
  const double det = p.kappa1() * p.kappa2() - p.lambda() * p.lambda();
  if (!(det > 0.0))
    throw DomainError("correlation_and_limit_covariance: requires kappa1 kappa2 > lambda^2");
  return LimitCovariance{p.rho(), p.kappa2() / det, p.kappa1() / det, p.lambda() / det};
}

}  // namespace bvm

#endif  // BVM_DENSITY_HPP_
