// Kullback-Leibler divergence KL(fa || fb) = E_a[ln fa - ln fb] between two
// Sine densities, in nats. All expectations under fa come from the
// normalization-constant partials of fa.

#ifndef BVM_KL_HPP_
#define BVM_KL_HPP_

#include <algorithm>
#include <cmath>

#include "bvm/density.hpp"
#include "bvm/errors.hpp"
#include "bvm/norm_constant.hpp"
#include "bvm/params.hpp"
#include "bvm/special_fn.hpp"

namespace bvm {

// Values this far below zero are returned as is; anything in (-kKlFloor, 0)
// is rounding noise and clamps to 0.
inline constexpr double kKlFloor = 1e-10;

inline double kl_sine(const BvmSineParams& fa, const BvmSineParams& fb,
                      const SeriesConfig& cfg = kPreciseSeries) {
  const NormDerivatives da = log_norm_derivatives(fa, cfg);
  const Expectations e = expectations(da);
  const double log_cb = log_norm_constant(fb, cfg);
  const double d1 = fa.mu1() - fb.mu1(), d2 = fa.mu2() - fb.mu2();
  const double c1 = std::cos(d1), s1 = std::sin(d1), c2 = std::cos(d2), s2 = std::sin(d2);
  const double kl = (log_cb - da.log_c) + (fa.kappa1() - fb.kappa1() * c1) * e.e_cos1 +
                    (fa.kappa2() - fb.kappa2() * c2) * e.e_cos2 +
                    (fa.lambda() - fb.lambda() * c1 * c2) * e.e_sinsin -
                    fb.lambda() * s1 * s2 * e.e_coscos;
  return kl > -kKlFloor && kl < 0.0 ? 0.0 : kl;
}

inline double kl_independent(const BvmSineParams& fa, const BvmSineParams& fb) {
  if (fa.lambda() != 0.0 || fb.lambda() != 0.0)
    throw DomainError("kl_independent: both distributions must have lambda = 0");
  auto axis = [](double ka, double kb, double delta) {
    return log_bessel_i(0, kb) - log_bessel_i(0, ka) + bessel_ratio_A(ka) * (ka - kb * std::cos(delta));
  };
  const double kl = axis(fa.kappa1(), fb.kappa1(), fa.mu1() - fb.mu1()) +
                    axis(fa.kappa2(), fb.kappa2(), fa.mu2() - fb.mu2());
  return std::max(kl, 0.0);
}

}  // namespace bvm

#endif  // BVM_KL_HPP_
