#pragma once

// JSON and CSV encodings of reports, plus atomic file output.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "bumplab/compactness.hpp"
#include "bumplab/error.hpp"
#include "bumplab/grid.hpp"
#include "bumplab/spectral.hpp"
#include "bumplab/weights.hpp"

namespace bumplab {

using json = nlohmann::ordered_json;

inline json cube_json(const Grid& g, const Cube& q) {
  return {{"a", q.left(g)}, {"b", q.right(g)}, {"first_cell", q.first}, {"cells", q.length}};
}

/// {constant, argmax:{a,b}, family, preset, p, delta} plus the log exponents used.
inline json to_json(const BumpReport& r, const Grid& g, const BumpSpec& spec) {
  return {{"constant", r.constant},
          {"argmax", cube_json(g, r.argmax)},
          {"family", r.family},
          {"preset", to_string(spec.preset)},
          {"p", spec.p},
          {"delta", spec.delta},
          {"a_left", spec.a_left},
          {"a_right", spec.a_right}};
}

inline json curve_json(const std::vector<CurvePoint>& pts, const char* xname, const char* yname) {
  json arr = json::array();
  for (const auto& pt : pts) arr.push_back({{xname, pt.x}, {yname, pt.y}});
  return arr;
}

inline json to_json(const KRReport& r) {
  return {{"bound_sup", r.bound_sup},
          {"tail_curve", curve_json(r.tail_curve, "N", "tail")},
          {"modulus_curve", curve_json(r.modulus_curve, "h", "modulus")},
          {"slope", r.slope}};
}

inline json to_json(const TailReport& r) {
  return {{"C_bv", r.C_bv}, {"N0", r.N0}, {"support_radius", r.support_radius}, {"v_certificate", r.v_certificate}};
}

inline json to_json(const SpectralReport& r) {
  json ratios = json::array();
  for (const auto& t : r.tail_ratios) {
    ratios.push_back({{"K", t.K}, {"sigma_ratio", t.sigma_ratio}, {"energy_tail", t.energy_tail}});
  }
  return {{"m", r.m}, {"singular_values", r.singular_values}, {"tail_ratios", ratios}};
}

inline json to_json(const DecayComparison& c) {
  return {{"bmo_rescale", c.bmo_rescale},
          {"cmo", to_json(c.cmo)},
          {"bmo", to_json(c.bmo)},
          {"cmo_tail_smaller", c.cmo_tail_smaller}};
}

inline std::string curve_csv(const std::vector<CurvePoint>& pts, const std::string& header) {
  std::ostringstream os;
  os << std::setprecision(17) << header << '\n';
  for (const auto& pt : pts) os << pt.x << ',' << pt.y << '\n';
  return os.str();
}

/// "k,sigma" with 1-based k.
inline std::string sigma_csv(const std::vector<double>& sigma) {
  std::ostringstream os;
  os << std::setprecision(17) << "k,sigma\n";
  for (std::size_t k = 0; k < sigma.size(); ++k) os << k + 1 << ',' << sigma[k] << '\n';
  return os.str();
}

inline std::string grid_function_csv(const GridFunction& f) {
  std::ostringstream os;
  write_csv(os, f);
  return os.str();
}

/// Writes to a sibling temporary and renames, so readers never see a partial file.
inline void atomic_write(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os << contents;
    if (!os.flush()) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

} // namespace bumplab
