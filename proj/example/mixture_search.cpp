// Fit a mixture to synthetic dihedral-like data and print the search path.

#include <cstdio>

#include "bvm.hpp"

int main() {
  using namespace bvm;
  Rng rng(11);
  std::vector<TorusPoint> data;
  // A broad helix-like cluster, a tight correlated sheet-like cluster, and a small third one.
  for (const auto& [c, n] : {std::pair{BvmSineParams::from_rho(-1.1, -0.8, 25, 15, 0.4), 1500},
                             std::pair{BvmSineParams::from_rho(-2.1, 2.3, 12, 8, -0.6), 1000},
                             std::pair{BvmSineParams(1.0, 0.6, 30, 30, 0), 300}}) {
    const auto part = sample(c, n, rng);
    data.insert(data.end(), part.begin(), part.end());
  }

  const auto res = search_optimal_mixture(data, Variant::Sine, 11);
  std::printf("%-4s %-8s %3s %12s %12s %12s\n", "it", "op", "K", "first", "second", "total");
  for (const auto& t : res.trace)
    std::printf("%-4d %-8s %3d %12.1f %12.1f %12.1f\n", t.iteration, t.operation.c_str(), t.components, t.first_part,
                t.second_part, t.total);

  std::printf("\nweight   mu1(deg) mu2(deg)   kappa1   kappa2      rho\n");
  for (std::size_t j = 0; j < res.model.size(); ++j) {
    const auto& c = res.model.components[j];
    std::printf("%6.3f %9.1f %8.1f %8.2f %8.2f %8.3f\n", res.model.weights[j], radians_to_degrees(c.mu1()),
                radians_to_degrees(c.mu2()), c.kappa1(), c.kappa2(), c.rho());
  }
  std::printf("\n%.4f bits per point (uniform torus at the same resolution: %.4f)\n",
              res.model.message.total / static_cast<double>(data.size()),
              2 * std::log2(kTwoPi) - std::log2(1e-6));
}
