// CSV ingestion of (phi, psi) angle pairs.

#ifndef BVM_HARNESS_INGEST_HPP_
#define BVM_HARNESS_INGEST_HPP_

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bvm/errors.hpp"
#include "bvm/torus.hpp"

namespace bvm {

enum class AngleUnit { Degrees, Radians };

inline AngleUnit parse_unit(std::string_view s) {
  if (s == "degrees" || s == "deg") return AngleUnit::Degrees;
  if (s == "radians" || s == "rad") return AngleUnit::Radians;
  throw InputError("unknown angle unit '" + std::string(s) + "' (expected degrees or radians)");
}

struct AngleDataset {
  std::vector<TorusPoint> points;
  AngleUnit source_unit = AngleUnit::Radians;
  std::size_t n() const { return points.size(); }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

inline bool parse_number(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, out);
  return !s.empty() && res.ec == std::errc() && res.ptr == end;
}

}  // namespace detail

// Two numeric columns per row, optional "phi,psi" header on the first line.
// Blank lines are skipped. Angles are wrapped into [-pi, pi).
inline AngleDataset ingest(std::istream& in, AngleUnit unit, const std::string& source = "input") {
  AngleDataset ds;
  ds.source_unit = unit;
  std::string line;
  int lineno = 0;
  bool seen_row = false;
  while (std::getline(in, line)) {
    ++lineno;
    // Accept the typographic minus sign.
    for (std::size_t pos; (pos = line.find("\xE2\x88\x92")) != std::string::npos;) line.replace(pos, 3, "-");
    const std::string_view row = detail::trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    const auto where = source + ":" + std::to_string(lineno);
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos)
      throw InputError(where + ": expected two comma-separated columns");
    const auto a = row.substr(0, comma), b = row.substr(comma + 1);
    double phi = 0.0, psi = 0.0;
    if (!detail::parse_number(a, phi) || !detail::parse_number(b, psi)) {
      if (!seen_row && detail::lower(detail::trim(a)) == "phi" && detail::lower(detail::trim(b)) == "psi") {
        seen_row = true;
        continue;
      }
      throw InputError(where + ": non-numeric value");
    }
    seen_row = true;
    if (!std::isfinite(phi) || !std::isfinite(psi)) throw InputError(where + ": non-finite value");
    if (unit == AngleUnit::Degrees) {
      phi = degrees_to_radians(phi);
      psi = degrees_to_radians(psi);
    }
    ds.points.emplace_back(phi, psi);
  }
  if (ds.points.empty()) throw InputError(source + ": no data rows");
  return ds;
}

inline AngleDataset ingest(const std::string& path, AngleUnit unit) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return ingest(in, unit, path);
}

inline AngleDataset ingest_string(const std::string& text, AngleUnit unit) {
  std::istringstream in(text);
  return ingest(in, unit);
}

}  // namespace bvm

#endif  // BVM_HARNESS_INGEST_HPP_
