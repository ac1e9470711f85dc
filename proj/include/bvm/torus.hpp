// Points on the torus [-pi, pi) x [-pi, pi) and angle wrapping.

#ifndef BVM_TORUS_HPP_
#define BVM_TORUS_HPP_

#include <cmath>
#include <numbers>

namespace bvm {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Wrap into [-pi, pi); +pi maps to -pi.
inline double wrap_angle(double theta) {
  double r = theta - kTwoPi * std::round(theta / kTwoPi);
  if (r >= kPi) r -= kTwoPi;
  if (r < -kPi) r += kTwoPi;
  return r;
}

// Signed angular difference a - b wrapped into [-pi, pi).
inline double angular_difference(double a, double b) { return wrap_angle(a - b); }

inline double degrees_to_radians(double deg) { return deg * kPi / 180.0; }
inline double radians_to_degrees(double rad) { return rad * 180.0 / kPi; }

class TorusPoint {
public:
  TorusPoint() = default;
  TorusPoint(double theta1, double theta2)
      : theta1_(wrap_angle(theta1)), theta2_(wrap_angle(theta2)) {}

  double theta1() const noexcept { return theta1_; }
  double theta2() const noexcept { return theta2_; }

  friend bool operator==(const TorusPoint&, const TorusPoint&) = default;

private:
  double theta1_ = 0.0;
  double theta2_ = 0.0;
};

}  // namespace bvm

#endif  // BVM_TORUS_HPP_
