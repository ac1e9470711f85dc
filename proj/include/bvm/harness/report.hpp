// Output encodings for mixture runs: model JSON, search trace CSV and
// contour CSV.
//
// Contour CSV rows are (component_id, vertex_index, phi_deg, psi_deg). A
// component may have several polylines; vertex_index restarts at 0 at the
// start of each one.

#ifndef BVM_HARNESS_REPORT_HPP_
#define BVM_HARNESS_REPORT_HPP_

#include <ostream>
#include <vector>

#include <json.hpp>

#include "bvm/harness/contour.hpp"
#include "bvm/harness/null_model.hpp"
#include "bvm/mixture.hpp"
#include "bvm/torus.hpp"

namespace bvm {

inline nlohmann::ordered_json message_json(const MessageLength& m) {
  return {{"first_part_bits", m.first_part}, {"second_part_bits", m.second_part}, {"total_bits", m.total}};
}

inline nlohmann::ordered_json params_json(const BvmSineParams& p) {
  return {{"mu1", p.mu1()},
          {"mu2", p.mu2()},
          {"mu1_deg", radians_to_degrees(p.mu1())},
          {"mu2_deg", radians_to_degrees(p.mu2())},
          {"kappa1", p.kappa1()},
          {"kappa2", p.kappa2()},
          {"lambda", p.lambda()},
          {"rho", p.rho()}};
}

inline nlohmann::ordered_json mixture_json(const MixtureModel& m, std::size_t n) {
  nlohmann::ordered_json comps = nlohmann::ordered_json::array();
  for (std::size_t j = 0; j < m.size(); ++j) {
    auto c = params_json(m.components[j]);
    c["weight"] = m.weights[j];
    comps.push_back(std::move(c));
  }
  return {{"variant", to_string(m.variant)},
          {"n", n},
          {"K", m.size()},
          {"weights", m.weights},
          {"components", std::move(comps)},
          {"message", message_json(m.message)}};
}

inline nlohmann::ordered_json null_json(const NullModelReport& r) {
  return {{"model", to_string(r.model)}, {"n", r.n}, {"total_bits", r.total_bits}, {"bits_per_point", r.bits_per_point}};
}

inline void write_trace_csv(std::ostream& os, const std::vector<SearchTraceEntry>& trace) {
  os << "iteration,K,first_part_bits,second_part_bits,total_bits\n";
  const auto old = os.precision(12);
  for (const auto& t : trace)
    os << t.iteration << ',' << t.components << ',' << t.first_part << ',' << t.second_part << ',' << t.total << '\n';
  os.precision(old);
}

inline void write_contour_csv(std::ostream& os, const std::vector<ComponentContour>& contours) {
  os << "component_id,vertex_index,phi_deg,psi_deg\n";
  const auto old = os.precision(8);
  for (const auto& c : contours)
    for (const auto& path : c.paths)
      for (std::size_t v = 0; v < path.vertices_deg.size(); ++v)
        os << c.component << ',' << v << ',' << path.vertices_deg[v].first << ',' << path.vertices_deg[v].second
           << '\n';
  os.precision(old);
}

}  // namespace bvm

#endif  // BVM_HARNESS_REPORT_HPP_
