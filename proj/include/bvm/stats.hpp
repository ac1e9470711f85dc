// Weighted trigonometric sufficient statistics of torus data.
//
// The Sine log-likelihood depends on the data only through nine weighted sums
// of sines and cosines, so estimators and EM M-steps evaluate it in O(1).
// Sums are taken relative to a reference point, which keeps the optimizer's
// mean offsets small and makes estimates exactly equivariant under rotation.

#ifndef BVM_STATS_HPP_
#define BVM_STATS_HPP_

#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "bvm/errors.hpp"
#include "bvm/params.hpp"
#include "bvm/torus.hpp"

namespace bvm {

struct TorusStats {
  double ref1 = 0.0;
  double ref2 = 0.0;
  double n = 0.0;  // total weight
  double c1 = 0.0, s1 = 0.0, c2 = 0.0, s2 = 0.0;
  double cc = 0.0, cs = 0.0, sc = 0.0, ss = 0.0;  // e.g. cs = sum w cos(x) sin(y)
  double c2x = 0.0, s2x = 0.0, c2y = 0.0, s2y = 0.0;  // double-angle sums

  // data[i] weighted by weights[i] (all ones when weights is empty).
  static TorusStats from(std::span<const TorusPoint> data, std::span<const double> weights = {},
                         double ref1 = 0.0, double ref2 = 0.0) {
    if (!weights.empty() && weights.size() != data.size())
      throw DomainError("TorusStats: weights and data differ in length");
    TorusStats s;
    s.ref1 = ref1;
    s.ref2 = ref2;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double w = weights.empty() ? 1.0 : weights[i];
      const double x = data[i].theta1() - ref1;
      const double y = data[i].theta2() - ref2;
      const double cx = std::cos(x), sx = std::sin(x), cy = std::cos(y), sy = std::sin(y);
      s.n += w;
      s.c1 += w * cx;
      s.s1 += w * sx;
      s.c2 += w * cy;
      s.s2 += w * sy;
      s.cc += w * cx * cy;
      s.cs += w * cx * sy;
      s.sc += w * sx * cy;
      s.ss += w * sx * sy;
      s.c2x += w * (cx * cx - sx * sx);
      s.s2x += w * 2.0 * sx * cx;
      s.c2y += w * (cy * cy - sy * sy);
      s.s2y += w * 2.0 * sy * cy;
    }
    return s;
  }

  // The same data summarized about a different reference point.
  TorusStats recentered(double new_ref1, double new_ref2) const {
    const double a = new_ref1 - ref1, b = new_ref2 - ref2;
    const double ca = std::cos(a), sa = std::sin(a), cb = std::cos(b), sb = std::sin(b);
    TorusStats r;
    r.ref1 = new_ref1;
    r.ref2 = new_ref2;
    r.n = n;
    // cos(x - a) = cx ca + sx sa ; sin(x - a) = sx ca - cx sa
    r.c1 = c1 * ca + s1 * sa;
    r.s1 = s1 * ca - c1 * sa;
    r.c2 = c2 * cb + s2 * sb;
    r.s2 = s2 * cb - c2 * sb;
    const double cxcy = cc, cxsy = cs, sxcy = sc, sxsy = ss;
    r.cc = ca * cb * cxcy + ca * sb * cxsy + sa * cb * sxcy + sa * sb * sxsy;
    r.cs = ca * cb * cxsy - ca * sb * cxcy + sa * cb * sxsy - sa * sb * sxcy;
    r.sc = ca * cb * sxcy + ca * sb * sxsy - sa * cb * cxcy - sa * sb * cxsy;
    r.ss = ca * cb * sxsy - ca * sb * sxcy - sa * cb * cxsy + sa * sb * cxcy;
    const double c2a = std::cos(2.0 * a), s2a = std::sin(2.0 * a);
    const double c2b = std::cos(2.0 * b), s2b = std::sin(2.0 * b);
    r.c2x = c2x * c2a + s2x * s2a;
    r.s2x = s2x * c2a - c2x * s2a;
    r.c2y = c2y * c2b + s2y * s2b;
    r.s2y = s2y * c2b - c2y * s2b;
    return r;
  }

  // sum_i w_i [k1 cos(t1 - mu1) + k2 cos(t2 - mu2) + lambda sin(t1 - mu1) sin(t2 - mu2)]
  // with mu given as offsets from the reference point.
  double kernel_sum(double m1, double m2, double kappa1, double kappa2, double lambda) const {
    const double cm1 = std::cos(m1), sm1 = std::sin(m1), cm2 = std::cos(m2), sm2 = std::sin(m2);
    const double cos1 = c1 * cm1 + s1 * sm1;
    const double cos2 = c2 * cm2 + s2 * sm2;
    const double sinsin = ss * cm1 * cm2 - sc * cm1 * sm2 - cs * sm1 * cm2 + cc * sm1 * sm2;
    return kappa1 * cos1 + kappa2 * cos2 + lambda * sinsin;
  }

  double kernel_sum(const BvmSineParams& p) const {
    return kernel_sum(p.mu1() - ref1, p.mu2() - ref2, p.kappa1(), p.kappa2(), p.lambda());
  }

  // sum w sin^2(x), sum w sin^2(y) about the reference point.
  double sin_sq1() const { return 0.5 * (n - c2x); }
  double sin_sq2() const { return 0.5 * (n - c2y); }

  TorusStats& operator+=(const TorusStats& o) {
    const TorusStats r = o.recentered(ref1, ref2);
    n += r.n;
    c1 += r.c1; s1 += r.s1; c2 += r.c2; s2 += r.s2;
    cc += r.cc; cs += r.cs; sc += r.sc; ss += r.ss;
    c2x += r.c2x; s2x += r.s2x; c2y += r.c2y; s2y += r.s2y;
    return *this;
  }

  double negative_log_likelihood(const BvmSineParams& p, double log_c) const {
    return n * log_c - kernel_sum(p);
  }
};

// Per-point trigonometric features, computed once so that weighted
// statistics and kernel values for many parameter vectors are dense
// matrix products. Columns follow the TorusStats field order
// (c1, s1, c2, s2, cc, cs, sc, ss, c2x, s2x, c2y, s2y) about reference 0.
class TrigFeatures {
public:
  static constexpr int kColumns = 12;

  explicit TrigFeatures(std::span<const TorusPoint> data) : f_(static_cast<Eigen::Index>(data.size()), kColumns) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double x = data[i].theta1(), y = data[i].theta2();
      const double cx = std::cos(x), sx = std::sin(x), cy = std::cos(y), sy = std::sin(y);
      f_.row(static_cast<Eigen::Index>(i)) << cx, sx, cy, sy, cx * cy, cx * sy, sx * cy, sx * sy,
          cx * cx - sx * sx, 2.0 * sx * cx, cy * cy - sy * sy, 2.0 * sy * cy;
    }
  }

  Eigen::Index size() const { return f_.rows(); }
  auto row(Eigen::Index i) const { return f_.row(i); }

  TorusStats stats(const Eigen::VectorXd& weights, double ref1 = 0.0, double ref2 = 0.0) const {
    if (weights.size() != f_.rows()) throw DomainError("TrigFeatures: weights and data differ in length");
    const Eigen::Matrix<double, kColumns, 1> t = f_.transpose() * weights;
    TorusStats s;
    s.n = weights.sum();
    s.c1 = t[0]; s.s1 = t[1]; s.c2 = t[2]; s.s2 = t[3];
    s.cc = t[4]; s.cs = t[5]; s.sc = t[6]; s.ss = t[7];
    s.c2x = t[8]; s.s2x = t[9]; s.c2y = t[10]; s.s2y = t[11];
    return s.recentered(ref1, ref2);
  }

  // Kernel exponent of p at every point.
  Eigen::VectorXd kernels(const BvmSineParams& p) const {
    const double cm1 = std::cos(p.mu1()), sm1 = std::sin(p.mu1());
    const double cm2 = std::cos(p.mu2()), sm2 = std::sin(p.mu2());
    const double k1 = p.kappa1(), k2 = p.kappa2(), l = p.lambda();
    Eigen::Matrix<double, kColumns, 1> w;
    w << k1 * cm1, k1 * sm1, k2 * cm2, k2 * sm2, l * sm1 * sm2, -l * sm1 * cm2, -l * cm1 * sm2,
        l * cm1 * cm2, 0.0, 0.0, 0.0, 0.0;
    return f_ * w;
  }

private:
  Eigen::Matrix<double, Eigen::Dynamic, kColumns> f_;
};

}  // namespace bvm

#endif  // BVM_STATS_HPP_
