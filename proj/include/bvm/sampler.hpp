// Exact sampling from von Mises and BVM Sine distributions.

#ifndef BVM_SAMPLER_HPP_
#define BVM_SAMPLER_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "bvm/errors.hpp"
#include "bvm/params.hpp"
#include "bvm/special_fn.hpp"
#include "bvm/torus.hpp"

namespace bvm {

using Rng = std::mt19937_64;

// Uniform on the open interval (0, 1), independent of the standard library's
// distribution implementation so streams are reproducible everywhere.
inline double uniform_open(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Best & Fisher (1979) wrapped-Cauchy envelope rejection sampler.
inline double sample_von_mises(double mu, double kappa, Rng& rng) {
  if (kappa < 1e-8) return wrap_angle(kTwoPi * uniform_open(rng) - kPi);
  const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
  const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
  const double r = (1.0 + rho * rho) / (2.0 * rho);
  for (;;) {
    const double u1 = uniform_open(rng);
    const double u2 = uniform_open(rng);
    const double z = std::cos(kPi * u1);
    const double f = (1.0 + r * z) / (r + z);
    const double c = kappa * (r - f);
    if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
      const double u3 = uniform_open(rng);
      const double angle = std::acos(std::clamp(f, -1.0, 1.0));
      return wrap_angle(u3 > 0.5 ? mu + angle : mu - angle);
    }
  }
}

// One draw: theta1 from its marginal by rejection against a von Mises(mu1,
// kappa1) proposal, then theta2 | theta1, which is von Mises with mean
// mu2 + atan2(lambda s, kappa2) and concentration sqrt(kappa2^2 + lambda^2 s^2),
// s = sin(theta1 - mu1).
inline TorusPoint sample_one(const BvmSineParams& p, Rng& rng) {
  const double k1 = p.kappa1(), k2 = p.kappa2(), lambda = p.lambda();
  double t1 = 0.0;
  double s = 0.0;
  if (lambda == 0.0) {
    t1 = sample_von_mises(p.mu1(), k1, rng);
    return TorusPoint(t1, sample_von_mises(p.mu2(), k2, rng));
  }
  const double log_envelope = log_bessel_i(0, std::sqrt(k2 * k2 + lambda * lambda));
  for (;;) {
    t1 = sample_von_mises(p.mu1(), k1, rng);
    s = std::sin(t1 - p.mu1());
    const double log_accept =
        log_bessel_i(0, std::sqrt(k2 * k2 + lambda * lambda * s * s)) - log_envelope;
    if (std::log(uniform_open(rng)) < log_accept) break;
  }
  const double conc = std::sqrt(k2 * k2 + lambda * lambda * s * s);
  const double mean = p.mu2() + std::atan2(lambda * s, k2);
  return TorusPoint(t1, sample_von_mises(mean, conc, rng));
}

inline std::vector<TorusPoint> sample(const BvmSineParams& p, int n, Rng& rng) {
  if (n < 1) throw DomainError("sample: n must be >= 1");
  std::vector<TorusPoint> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(sample_one(p, rng));
  return out;
}

inline std::vector<TorusPoint> sample(const BvmSineParams& p, int n, std::uint64_t seed) {
  Rng rng(seed);
  return sample(p, n, rng);
}

}  // namespace bvm

#endif  // BVM_SAMPLER_HPP_
