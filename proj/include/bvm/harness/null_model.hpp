// Null-model baselines: the uniform torus encoding versus a fitted mixture.

#ifndef BVM_HARNESS_NULL_MODEL_HPP_
#define BVM_HARNESS_NULL_MODEL_HPP_

#include <cmath>
#include <string>

#include "bvm/errors.hpp"
#include "bvm/mixture.hpp"
#include "bvm/torus.hpp"

namespace bvm {

enum class NullModel { Uniform, Mixture };

inline const char* to_string(NullModel m) { return m == NullModel::Uniform ? "uniform" : "mixture"; }

struct NullModelReport {
  NullModel model = NullModel::Uniform;
  double total_bits = 0.0;
  double bits_per_point = 0.0;
  std::size_t n = 0;
};

// Each point costs 2 log2(2 pi) - log2(eps^2 / (R r)) bits.
inline NullModelReport uniform_null_bits(std::size_t n, double epsilon = 1e-3, double big_r = 1.0,
                                         double small_r = 1.0) {
  if (!(epsilon > 0.0) || !(big_r > 0.0) || !(small_r > 0.0))
    throw DomainError("uniform_null_bits: epsilon, R and r must be positive");
  NullModelReport rep;
  rep.model = NullModel::Uniform;
  rep.n = n;
  rep.bits_per_point = 2.0 * std::log2(kTwoPi) - std::log2(epsilon * epsilon / (big_r * small_r));
  rep.total_bits = static_cast<double>(n) * rep.bits_per_point;
  return rep;
}

inline NullModelReport mixture_null_report(const MixtureModel& model, std::size_t n) {
  if (n == 0) throw DomainError("mixture_null_report: empty data");
  NullModelReport rep;
  rep.model = NullModel::Mixture;
  rep.n = n;
  rep.total_bits = model.message.total;
  rep.bits_per_point = rep.total_bits / static_cast<double>(n);
  return rep;
}

}  // namespace bvm

#endif  // BVM_HARNESS_NULL_MODEL_HPP_
