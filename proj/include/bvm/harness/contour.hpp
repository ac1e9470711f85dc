// Highest-density contours of single components, for plotting.
//
// The level is the (1 - mass) quantile of the component's own density over
// random draws, so the region it encloses carries `mass` of the probability.
// The curve is traced by marching squares on a periodic grid laid out in
// the component's chart: mu - 180 deg to mu + 180 deg on both axes. Vertices
// are reported in that chart (unwrapped degrees), so a closed contour never
// breaks at the +-180 seam.

#ifndef BVM_HARNESS_CONTOUR_HPP_
#define BVM_HARNESS_CONTOUR_HPP_

#include <algorithm>
#include <array>
#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bvm/density.hpp"
#include "bvm/errors.hpp"
#include "bvm/params.hpp"
#include "bvm/sampler.hpp"
#include "bvm/torus.hpp"

namespace bvm {

struct ContourPath {
  std::vector<std::pair<double, double>> vertices_deg;  // (phi, psi)
  bool closed = false;
};

struct ComponentContour {
  std::size_t component = 0;
  double log_kernel_level = 0.0;  // contour of log_kernel(x, p) == level
  std::vector<ContourPath> paths;
};

struct ContourOptions {
  double mass = 0.80;
  int samples = 100000;
  int grid = 360;
};

// Kernel level enclosing `mass` of the distribution, estimated from draws.
inline double hdr_kernel_level(const BvmSineParams& p, double mass, int samples, Rng& rng) {
  if (!(mass > 0.0 && mass < 1.0)) throw DomainError("hdr_kernel_level: mass must lie in (0, 1)");
  if (samples < 1) throw DomainError("hdr_kernel_level: need at least one sample");
  std::vector<double> v(static_cast<std::size_t>(samples));
  for (auto& x : v) x = log_kernel(sample_one(p, rng), p);
  const auto k = static_cast<std::size_t>((1.0 - mass) * static_cast<double>(samples));
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return v[k];
}

inline std::vector<ContourPath> trace_level(const BvmSineParams& p, double level, int grid) {
  if (grid < 4) throw DomainError("trace_level: grid too coarse");
  const double step = 360.0 / grid;
  const double phi0 = radians_to_degrees(p.mu1()) - 180.0 + 0.5 * step;
  const double psi0 = radians_to_degrees(p.mu2()) - 180.0 + 0.5 * step;
  auto wrap = [grid](int i) { return ((i % grid) + grid) % grid; };

  std::vector<double> val(static_cast<std::size_t>(grid) * static_cast<std::size_t>(grid));
  auto at = [&](int i, int j) -> double& {
    return val[static_cast<std::size_t>(wrap(i)) * static_cast<std::size_t>(grid) + static_cast<std::size_t>(wrap(j))];
  };
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j)
      at(i, j) = log_kernel(TorusPoint(degrees_to_radians(phi0 + i * step), degrees_to_radians(psi0 + j * step)), p);

  // Edge keys: type 0 joins (i, j)-(i+1, j), type 1 joins (i, j)-(i, j+1).
  auto key = [&](int type, int i, int j) {
    return (static_cast<std::int64_t>(type) * grid + wrap(i)) * grid + wrap(j);
  };
  auto point = [&](int type, int i, int j) {
    const int ci = wrap(i), cj = wrap(j);
    const double va = at(ci, cj), vb = type == 0 ? at(ci + 1, cj) : at(ci, cj + 1);
    const double t = (level - va) / (vb - va);
    return type == 0 ? std::make_pair(phi0 + (ci + t) * step, psi0 + cj * step)
                     : std::make_pair(phi0 + ci * step, psi0 + (cj + t) * step);
  };

  std::vector<std::array<std::int64_t, 2>> segs;
  std::unordered_map<std::int64_t, std::pair<double, double>> where;
  std::unordered_map<std::int64_t, std::vector<std::size_t>> touch;
  auto add = [&](std::array<int, 3> a, std::array<int, 3> b) {
    const auto ka = key(a[0], a[1], a[2]), kb = key(b[0], b[1], b[2]);
    where.try_emplace(ka, point(a[0], a[1], a[2]));
    where.try_emplace(kb, point(b[0], b[1], b[2]));
    touch[ka].push_back(segs.size());
    touch[kb].push_back(segs.size());
    segs.push_back({ka, kb});
  };

  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const double v0 = at(i, j), v1 = at(i + 1, j), v2 = at(i + 1, j + 1), v3 = at(i, j + 1);
      const int idx = (v0 >= level) | (v1 >= level) << 1 | (v2 >= level) << 2 | (v3 >= level) << 3;
      if (idx == 0 || idx == 15) continue;
      const std::array<int, 3> bottom{0, i, j}, right{1, i + 1, j}, top{0, i, j + 1}, left{1, i, j};
      if (idx == 5 || idx == 10) {
        const bool centre = 0.25 * (v0 + v1 + v2 + v3) >= level;
        if ((idx == 5) == centre) {
          add(bottom, right);
          add(top, left);
        } else {
          add(bottom, left);
          add(right, top);
        }
        continue;
      }
      std::vector<std::array<int, 3>> hit;
      if ((v0 >= level) != (v1 >= level)) hit.push_back(bottom);
      if ((v1 >= level) != (v2 >= level)) hit.push_back(right);
      if ((v3 >= level) != (v2 >= level)) hit.push_back(top);
      if ((v0 >= level) != (v3 >= level)) hit.push_back(left);
      add(hit[0], hit[1]);
    }
  }

  std::vector<ContourPath> paths;
  std::vector<bool> used(segs.size(), false);
  auto next_segment = [&](std::int64_t k, std::size_t from) -> std::ptrdiff_t {
    for (auto s : touch[k])
      if (s != from && !used[s]) return static_cast<std::ptrdiff_t>(s);
    return -1;
  };
  for (std::size_t s0 = 0; s0 < segs.size(); ++s0) {
    if (used[s0]) continue;
    used[s0] = true;
    std::vector<std::int64_t> chain{segs[s0][0], segs[s0][1]};
    // Extend forward, then backward from the start.
    for (int dir = 0; dir < 2; ++dir) {
      std::size_t cur = s0;
      while (true) {
        const std::int64_t end = dir == 0 ? chain.back() : chain.front();
        const auto nxt = next_segment(end, cur);
        if (nxt < 0) break;
        cur = static_cast<std::size_t>(nxt);
        used[cur] = true;
        const std::int64_t other = segs[cur][0] == end ? segs[cur][1] : segs[cur][0];
        if (dir == 0) {
          chain.push_back(other);
        } else {
          chain.insert(chain.begin(), other);
        }
      }
    }
    ContourPath path;
    path.closed = chain.size() > 2 && chain.front() == chain.back();
    for (auto k : chain) path.vertices_deg.push_back(where[k]);
    paths.push_back(std::move(path));
  }
  std::sort(paths.begin(), paths.end(),
            [](const ContourPath& a, const ContourPath& b) { return a.vertices_deg.size() > b.vertices_deg.size(); });
  return paths;
}

inline ComponentContour component_contour(const BvmSineParams& p, std::size_t component_id, Rng& rng,
                                          const ContourOptions& opt = {}) {
  ComponentContour c;
  c.component = component_id;
  c.log_kernel_level = hdr_kernel_level(p, opt.mass, opt.samples, rng);
  c.paths = trace_level(p, c.log_kernel_level, opt.grid);
  return c;
}

}  // namespace bvm

#endif  // BVM_HARNESS_CONTOUR_HPP_
