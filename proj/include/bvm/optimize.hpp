// Box-constrained Nelder-Mead with adaptive coefficients (Gao & Han 2012).
//
// Trial points are projected onto the box. Non-finite objective values count
// as +inf, so callers may signal an infeasible point by throwing inside the
// objective and catching it there, or by returning inf directly.

#ifndef BVM_OPTIMIZE_HPP_
#define BVM_OPTIMIZE_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Core>

namespace bvm {

struct NelderMeadOptions {
  double ftol_rel = 1e-12;
  double ftol_abs = 1e-14;
  double xtol = 1e-9;
  int max_evals = 5000;
  int polish_restarts = 3;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double f = std::numeric_limits<double>::infinity();
  int evals = 0;
  bool converged = false;
};

namespace detail {

inline Eigen::VectorXd project(Eigen::VectorXd x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
  return x;
}

template <typename F>
NelderMeadResult nelder_mead_once(F& f, const Eigen::VectorXd& x0, const Eigen::VectorXd& step,
                                  const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                  const NelderMeadOptions& opt, int budget) {
  const auto n = x0.size();
  const double dn = static_cast<double>(n);
  const double alpha = 1.0, beta = 1.0 + 2.0 / dn, gamma = 0.75 - 0.5 / dn, delta = 1.0 - 1.0 / dn;
  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(n) + 1);
  std::vector<double> fv(pts.size());
  pts[0] = project(x0, lo, hi);
  fv[0] = eval(pts[0]);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd x = pts[0];
    x[i] += step[i];
    // Step inward when the vertex would sit on the far side of a bound.
    if (x[i] > hi[i]) x[i] = pts[0][i] - step[i];
    x = project(x, lo, hi);
    pts[static_cast<std::size_t>(i) + 1] = x;
    fv[static_cast<std::size_t>(i) + 1] = eval(x);
  }

  std::vector<std::size_t> order(pts.size());
  bool converged = false;
  while (evals < budget) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
    const auto best = order.front(), worst = order.back(), second = order[order.size() - 2];

    double extent = 0.0;
    for (std::size_t k = 0; k < pts.size(); ++k)
      extent = std::max(extent, (pts[k] - pts[best]).cwiseAbs().maxCoeff());
    const double spread = fv[worst] - fv[best];
    if (std::isfinite(spread) && spread <= opt.ftol_rel * std::abs(fv[best]) + opt.ftol_abs &&
        extent <= opt.xtol * (1.0 + pts[best].cwiseAbs().maxCoeff())) {
      converged = true;
      break;
    }
    if (extent == 0.0) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < pts.size(); ++k)
      if (k != worst) centroid += pts[k];
    centroid /= dn;

    const Eigen::VectorXd xr = project(centroid + alpha * (centroid - pts[worst]), lo, hi);
    const double fr = eval(xr);
    if (fr < fv[best]) {
      const Eigen::VectorXd xe = project(centroid + beta * (xr - centroid), lo, hi);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe, fv[worst] = fe;
      } else {
        pts[worst] = xr, fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      pts[worst] = xr, fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    const Eigen::VectorXd xc = outside ? project(centroid + gamma * (xr - centroid), lo, hi)
                                       : project(centroid - gamma * (centroid - pts[worst]), lo, hi);
    const double fc = eval(xc);
    if (fc < (outside ? fr : fv[worst])) {
      pts[worst] = xc, fv[worst] = fc;
      continue;
    }
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (k == best) continue;
      pts[k] = project(pts[best] + delta * (pts[k] - pts[best]), lo, hi);
      fv[k] = eval(pts[k]);
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  return {pts[best], fv[best], evals, converged};
}

}  // namespace detail

// Minimizes f over the box [lo, hi]. After convergence the search restarts
// from the best point with a smaller simplex until a restart stops paying.
template <typename F>
NelderMeadResult nelder_mead(F f, const Eigen::VectorXd& x0, const Eigen::VectorXd& step,
                             const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                             const NelderMeadOptions& opt = {}) {
  NelderMeadResult res = detail::nelder_mead_once(f, x0, step, lo, hi, opt, opt.max_evals);
  Eigen::VectorXd s = step * 0.1;
  for (int r = 0; r < opt.polish_restarts && res.evals < opt.max_evals; ++r) {
    auto next = detail::nelder_mead_once(f, res.x, s, lo, hi, opt, opt.max_evals - res.evals);
    const double gain = res.f - next.f;
    next.evals += res.evals;
    const bool better = next.f < res.f;
    if (better) {
      res.x = next.x;
      res.f = next.f;
    }
    res.evals = next.evals;
    res.converged = next.converged;
    if (!better || gain <= opt.ftol_rel * std::abs(res.f) + opt.ftol_abs) break;
    s *= 0.5;
  }
  return res;
}

}  // namespace bvm

#endif  // BVM_OPTIMIZE_HPP_
