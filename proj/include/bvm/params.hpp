// Parameter vector of the bivariate von Mises Sine model.

#ifndef BVM_PARAMS_HPP_
#define BVM_PARAMS_HPP_

#include <cmath>
#include <ostream>
#include <string>

#include "bvm/errors.hpp"
#include "bvm/torus.hpp"

namespace bvm {

// SINE has five free parameters; INDEPENDENT is the lambda = 0 restriction.
enum class Variant { Sine, Independent };

inline int free_parameters(Variant v) { return v == Variant::Sine ? 5 : 4; }

inline const char* to_string(Variant v) { return v == Variant::Sine ? "sine" : "independent"; }

// Concentrations below this are treated as this value inside the series.
inline constexpr double kKappaFloor = 1e-10;

// Theta = (mu1, mu2, kappa1, kappa2, lambda) with kappa >= 0 and
// lambda^2 < kappa1 kappa2 (lambda = 0 always allowed).
class BvmSineParams {
public:
  BvmSineParams() = default;
  BvmSineParams(double mu1, double mu2, double kappa1, double kappa2, double lambda)
      : mu1_(wrap_angle(mu1)), mu2_(wrap_angle(mu2)), kappa1_(kappa1), kappa2_(kappa2),
        lambda_(lambda) {
    if (!(kappa1 >= 0.0) || !(kappa2 >= 0.0) || !std::isfinite(kappa1) || !std::isfinite(kappa2))
      throw DomainError("BvmSineParams: concentrations must be finite and >= 0");
    if (!std::isfinite(lambda) || !std::isfinite(mu1) || !std::isfinite(mu2))
      throw DomainError("BvmSineParams: non-finite parameter");
    if (lambda != 0.0 && !(lambda * lambda < kappa1 * kappa2))
      throw DomainError("BvmSineParams: lambda^2 must be < kappa1 * kappa2, got lambda = " +
                        std::to_string(lambda));
  }

  // lambda = rho * sqrt(kappa1 kappa2).
  static BvmSineParams from_rho(double mu1, double mu2, double kappa1, double kappa2, double rho) {
    return BvmSineParams(mu1, mu2, kappa1, kappa2, rho * std::sqrt(kappa1 * kappa2));
  }

  static BvmSineParams independent(double mu1, double mu2, double kappa1, double kappa2) {
    return BvmSineParams(mu1, mu2, kappa1, kappa2, 0.0);
  }

  double mu1() const noexcept { return mu1_; }
  double mu2() const noexcept { return mu2_; }
  double kappa1() const noexcept { return kappa1_; }
  double kappa2() const noexcept { return kappa2_; }
  double lambda() const noexcept { return lambda_; }

  // Concentrations as used by the numerics (floored at kKappaFloor).
  double kappa1_eff() const noexcept { return kappa1_ < kKappaFloor ? kKappaFloor : kappa1_; }
  double kappa2_eff() const noexcept { return kappa2_ < kKappaFloor ? kKappaFloor : kappa2_; }

  double rho() const noexcept {
    return lambda_ == 0.0 ? 0.0 : lambda_ / std::sqrt(kappa1_ * kappa2_);
  }

  BvmSineParams with_lambda(double lambda) const {
    return BvmSineParams(mu1_, mu2_, kappa1_, kappa2_, lambda);
  }

  friend bool operator==(const BvmSineParams&, const BvmSineParams&) = default;

  friend std::ostream& operator<<(std::ostream& os, const BvmSineParams& p) {
    return os << "(mu1=" << p.mu1_ << ", mu2=" << p.mu2_ << ", kappa1=" << p.kappa1_
              << ", kappa2=" << p.kappa2_ << ", lambda=" << p.lambda_ << ")";
  }

private:
  double mu1_ = 0.0;
  double mu2_ = 0.0;
  double kappa1_ = 0.0;
  double kappa2_ = 0.0;
  double lambda_ = 0.0;
};

}  // namespace bvm

#endif  // BVM_PARAMS_HPP_
