#pragma once

/**
 * @file report_io.hpp
 * @brief JSON and CSV output for reports and fields.
 *
 * JSON is built as nlohmann::ordered_json (insertion order is output order)
 * and printed by `dump`, which writes every floating value with 17
 * significant digits so identical runs give identical bytes. Non-finite
 * values print as null. CSV follows RFC 4180: CRLF line ends, fields quoted
 * when they contain a comma, quote or line break.
 */

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "boxcalc/euler_lagrange.hpp"
#include "boxcalc/grid.hpp"
#include "boxcalc/identities.hpp"
#include "boxcalc/scale_limit.hpp"
#include "boxcalc/solver.hpp"

namespace boxcalc {

using Json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void dump_string(std::ostream& os, const std::string& s) {
  // reuse the library's escaping for strings
  os << Json(s).dump();
}

inline void dump(std::ostream& os, const Json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad;
        dump_string(os, it.key());
        os << ": ";
        dump(os, it.value(), indent, depth + 1);
      }
      os << "\n" << close << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        dump(os, j[i], indent, depth + 1);
      }
      os << "\n" << close << "]";
      return;
    }
    case Json::value_t::number_float:
      os << format_double(j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

}  // namespace detail

/// Deterministic pretty printer (17 significant digits for floats).
inline std::string dump(const Json& j, int indent = 2) {
  std::ostringstream os;
  detail::dump(os, j, indent, 0);
  os << "\n";
  return os.str();
}

inline Json to_json(cplx z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

inline Json to_json(const std::vector<NamedValue>& values) {
  Json out = Json::array();
  for (const auto& nv : values) {
    Json ordered;
    ordered["name"] = nv.name;
    ordered["re"] = nv.value.real();
    ordered["im"] = nv.value.imag();
    out.push_back(ordered);
  }
  return out;
}

inline Json to_json(const DefectReport& r) {
  Json j;
  j["identity"] = std::string(to_string(r.identity));
  j["h_sequence"] = r.h_sequence;
  j["defect_norm"] = r.defect_norm;
  j["fitted_slope"] = r.fitted_slope;
  j["threshold"] = r.threshold;
  j["components"] = to_json(r.components);
  j["warnings"] = r.warnings;
  j["pass"] = r.pass;
  return j;
}

inline Json to_json(const ELReport& r) {
  Json j;
  j["variant"] = std::string(to_string(r.variant));
  j["h"] = r.h;
  j["residual_norm"] = r.residual_norm;
  j["boundary_defects"] = to_json(r.boundary_defects);
  j["multiplier"] = r.multiplier ? to_json(*r.multiplier) : Json(nullptr);
  j["parameter"] = r.parameter ? to_json(*r.parameter) : Json(nullptr);
  j["scale"] = r.scale;
  j["tol"] = r.tol;
  j["smooth_tol"] = r.smooth_tol;
  j["is_extremal"] = r.is_extremal;
  j["is_extremal_smooth"] = r.is_extremal_smooth;
  j["warnings"] = r.warnings;
  return j;
}

inline Json to_json(const SolveStats& s) {
  Json j;
  j["unknowns"] = s.unknowns;
  j["method"] = s.method;
  j["linear_residual"] = s.residual;
  j["iterations"] = s.iterations;
  j["extrapolated_ghost_nodes"] = s.ghost;
  return j;
}

/// One RFC 4180 record terminated by CRLF.
inline std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
      out += f;
    } else {
      out += '"';
      for (char c : f) {
        if (c == '"') out += '"';
        out += c;
      }
      out += '"';
    }
  }
  out += "\r\n";
  return out;
}

/// identity, h, defect, slope, pass
inline std::string to_csv(const DefectReport& r) {
  std::string out = csv_row({"identity", "h", "defect", "slope", "pass"});
  for (std::size_t k = 0; k < r.h_sequence.size(); ++k) {
    out += csv_row({std::string(to_string(r.identity)), format_double(r.h_sequence[k]),
                    format_double(r.defect_norm[k]), format_double(r.fitted_slope),
                    r.pass ? "true" : "false"});
  }
  return out;
}

/// node, x, re, im, trusted over [a,b]
inline std::string to_csv(const GridFunction1D& f, const std::string& value = "value") {
  std::string out = csv_row({"node", "x", "re_" + value, "im_" + value, "trusted"});
  const Grid1D& g = f.grid();
  for (std::size_t k = g.first(); k <= g.last(); ++k) {
    out += csv_row({std::to_string(k - g.first()), format_double(g.node(k)),
                    format_double(f[k].real()), format_double(f[k].imag()),
                    f.trusted(k) ? "1" : "0"});
  }
  return out;
}

/// x1, x2, re, im, trusted over R
inline std::string to_csv(const GridFunction2D& f, const std::string& value = "value") {
  std::string out = csv_row({"x1", "x2", "re_" + value, "im_" + value, "trusted"});
  const Grid1D& a1 = f.grid().axis1();
  const Grid1D& a2 = f.grid().axis2();
  for (std::size_t i = a1.first(); i <= a1.last(); ++i) {
    for (std::size_t j = a2.first(); j <= a2.last(); ++j) {
      out += csv_row({format_double(a1.node(i)), format_double(a2.node(j)),
                      format_double(f(i, j).real()), format_double(f(i, j).imag()),
                      f.trusted(i, j) ? "1" : "0"});
    }
  }
  return out;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(Errc::config_invalid, "cannot open " + path + " for writing");
  os << content;
  if (!os) throw Error(Errc::config_invalid, "failed writing " + path);
}

}  // namespace boxcalc
