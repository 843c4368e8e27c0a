#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "conetrap/config.hpp"

namespace conetrap {

std::string format_double(double value) {
  if (value == 0.0) return "0";  // normalize negative zero
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  fail(Errc::ConfigParseError, "line " + std::to_string(line) + ": " + msg);
}

double to_number(const std::string& s, int line) {
  const char* c = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(c, &end);
  if (end == c || *end != '\0' || !std::isfinite(v)) {
    parse_fail(line, "expected a number, got '" + s + "'");
  }
  return v;
}

int to_int(const std::string& s, int line) {
  const double v = to_number(s, line);
  const int i = static_cast<int>(std::lround(v));
  if (std::abs(v - i) > 0.0) parse_fail(line, "expected an integer, got '" + s + "'");
  return i;
}

bool to_bool(const std::string& s, int line) {
  if (s == "true") return true;
  if (s == "false") return false;
  parse_fail(line, "expected true or false, got '" + s + "'");
}

std::string to_string_value(const std::string& s, int line) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    return s.substr(1, s.size() - 2);
  }
  parse_fail(line, "expected a quoted string, got '" + s + "'");
}

std::vector<double> to_array(const std::string& s, int line) {
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') {
    parse_fail(line, "expected an array [..], got '" + s + "'");
  }
  std::vector<double> out;
  std::string inner = s.substr(1, s.size() - 2);
  std::stringstream ss(inner);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) parse_fail(line, "empty array element");
    out.push_back(to_number(item, line));
  }
  return out;
}

// Strip a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  bool has_kappa_list = false, has_kappa_range = false;
  double kappa_min = 0.0, kappa_max = 0.0;
  int kappa_count = 0;

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') parse_fail(line_no, "unterminated section header");
      section = line.substr(1, line.size() - 2);
      if (section != "geometry" && section != "material" && section != "cutoff" &&
          section != "numerics" && section != "sweep" && section != "output") {
        parse_fail(line_no, "unknown section [" + section + "]");
      }
      if (section == "geometry") cfg.has_geometry = true;
      if (section == "material") cfg.has_material = true;
      continue;
    }

    const size_t eq = line.find('=');
    if (eq == std::string::npos) parse_fail(line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) parse_fail(line_no, "expected key = value");

    if (section.empty()) {
      if (key == "command") {
        cfg.command = to_string_value(value, line_no);
      } else {
        parse_fail(line_no, "unknown top-level key '" + key + "'");
      }
    } else if (section == "geometry") {
      if (key == "alpha_degrees") {
        cfg.alpha_degrees = to_number(value, line_no);
      } else if (key == "mesh_file") {
        cfg.mesh_file = to_string_value(value, line_no);
      } else {
        parse_fail(line_no, "unknown key '" + key + "' in [geometry]");
      }
    } else if (section == "material") {
      if (key == "eps_plus") {
        cfg.eps_plus = to_number(value, line_no);
      } else if (key == "eps_minus") {
        cfg.eps_minus = to_number(value, line_no);
      } else if (key == "delta") {
        cfg.delta = to_number(value, line_no);
      } else if (key == "dissipation") {
        const std::string v = to_string_value(value, line_no);
        if (v == "minus-only") {
          cfg.scope = DissipationScope::MinusOnly;
        } else if (v == "uniform") {
          cfg.scope = DissipationScope::Uniform;
        } else {
          fail(Errc::ConfigValidationError, "dissipation must be minus-only or uniform");
        }
      } else if (key == "validation_override") {
        cfg.validation_override = to_bool(value, line_no);
      } else {
        parse_fail(line_no, "unknown key '" + key + "' in [material]");
      }
    } else if (section == "cutoff") {
      if (key == "r_one") {
        cfg.cutoff.r_one = to_number(value, line_no);
      } else if (key == "rho") {
        cfg.cutoff.rho = to_number(value, line_no);
      } else if (key == "family") {
        const std::string v = to_string_value(value, line_no);
        if (v == "polynomial-c2") {
          cfg.cutoff.family = CutoffFamily::PolynomialC2;
        } else if (v == "smooth-bump") {
          cfg.cutoff.family = CutoffFamily::SmoothBump;
        } else {
          fail(Errc::ConfigValidationError, "family must be polynomial-c2 or smooth-bump");
        }
      } else {
        parse_fail(line_no, "unknown key '" + key + "' in [cutoff]");
      }
    } else if (section == "numerics") {
      if (key == "n_elements") {
        cfg.numerics.n_elements = to_int(value, line_no);
      } else if (key == "refinement") {
        cfg.numerics.refinement = to_int(value, line_no);
      } else if (key == "m_max") {
        cfg.numerics.m_max = to_int(value, line_no);
      } else if (key == "element_order") {
        const std::string v = to_string_value(value, line_no);
        if (v == "p1") {
          cfg.numerics.order = ElementOrder::P1;
        } else if (v == "p2") {
          cfg.numerics.order = ElementOrder::P2;
        } else {
          fail(Errc::ConfigValidationError, "element_order must be p1 or p2");
        }
      } else if (key == "route") {
        const std::string v = to_string_value(value, line_no);
        if (v == "axisym") {
          cfg.sphere_route = false;
        } else if (v == "sphere") {
          cfg.sphere_route = true;
        } else {
          fail(Errc::ConfigValidationError, "route must be axisym or sphere");
        }
      } else if (key == "tol_critical") {
        cfg.numerics.tol_critical = to_number(value, line_no);
      } else if (key == "tol_d_rel") {
        cfg.numerics.tol_d_rel = to_number(value, line_no);
      } else if (key == "bisect_width") {
        cfg.numerics.bisect_width = to_number(value, line_no);
      } else if (key == "solver_tol") {
        cfg.numerics.solver_tol = to_number(value, line_no);
      } else {
        parse_fail(line_no, "unknown key '" + key + "' in [numerics]");
      }
    } else if (section == "sweep") {
      if (key == "deltas") {
        cfg.deltas = to_array(value, line_no);
      } else if (key == "kappas") {
        cfg.kappas = to_array(value, line_no);
        has_kappa_list = true;
      } else if (key == "kappa_min") {
        kappa_min = to_number(value, line_no);
        has_kappa_range = true;
      } else if (key == "kappa_max") {
        kappa_max = to_number(value, line_no);
        has_kappa_range = true;
      } else if (key == "kappa_count") {
        kappa_count = to_int(value, line_no);
        has_kappa_range = true;
      } else if (key == "taus") {
        cfg.taus = to_array(value, line_no);
      } else if (key == "modes") {
        for (double v : to_array(value, line_no)) {
          const int m = static_cast<int>(std::lround(v));
          if (std::abs(v - m) > 0.0 || m < 0) {
            fail(Errc::ConfigValidationError, "modes must be nonnegative integers");
          }
          cfg.modes.push_back(m);
        }
      } else {
        parse_fail(line_no, "unknown key '" + key + "' in [sweep]");
      }
    } else if (section == "output") {
      if (key == "path") {
        cfg.out_path = to_string_value(value, line_no);
      } else if (key == "format") {
        cfg.format = to_string_value(value, line_no);
        if (cfg.format != "csv" && cfg.format != "json") {
          fail(Errc::ConfigValidationError, "format must be csv or json");
        }
      } else {
        parse_fail(line_no, "unknown key '" + key + "' in [output]");
      }
    }
  }

  // Contract checks that do not depend on the command.
  if (!cfg.has_material) {
    fail(Errc::ConfigValidationError, "missing [material] section");
  }
  if (cfg.has_geometry && !cfg.mesh_file.empty() && cfg.alpha_degrees != 0.0) {
    fail(Errc::ConfigValidationError, "give either alpha_degrees or mesh_file, not both");
  }
  if (!cfg.deltas.empty()) {
    if (!std::is_sorted(cfg.deltas.begin(), cfg.deltas.end())) {
      fail(Errc::ConfigValidationError, "delta list must be sorted ascending");
    }
    if (cfg.deltas.front() < 0.0) {
      fail(Errc::ConfigValidationError, "delta values must be nonnegative");
    }
  }
  if (has_kappa_list && has_kappa_range) {
    fail(Errc::ConfigValidationError, "give either kappas or kappa_min/max/count, not both");
  }
  if (has_kappa_range) {
    if (kappa_count < 2 || !(kappa_min < kappa_max)) {
      fail(Errc::ConfigValidationError, "kappa range needs kappa_min < kappa_max, count >= 2");
    }
    for (int i = 0; i < kappa_count; ++i) {
      cfg.kappas.push_back(kappa_min + (kappa_max - kappa_min) * i / (kappa_count - 1));
    }
  }
  if (!cfg.kappas.empty()) {
    if (!std::is_sorted(cfg.kappas.begin(), cfg.kappas.end())) {
      fail(Errc::ConfigValidationError, "kappa grid must be sorted ascending");
    }
    if (cfg.kappas.back() >= 0.0) {
      fail(Errc::ConfigValidationError, "kappa grid must be strictly negative");
    }
  }
  if (!cfg.taus.empty()) {
    for (double t : cfg.taus) {
      if (!(t > 0.0)) fail(Errc::ConfigValidationError, "tau values must be positive");
    }
  }
  if (cfg.numerics.n_elements < 2 || cfg.numerics.refinement < 0 || cfg.numerics.m_max < 0) {
    fail(Errc::ConfigValidationError, "numerics out of range");
  }
  if (!(cfg.cutoff.r_one > 0.0) || !(cfg.cutoff.rho > cfg.cutoff.r_one)) {
    fail(Errc::ConfigValidationError, "cutoff needs 0 < r_one < rho");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::IoError, "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

TipGeometry RunConfig::geometry() const {
  if (!has_geometry) fail(Errc::ConfigValidationError, "missing [geometry] section");
  if (!mesh_file.empty()) return make_region_geometry(mesh_file);
  return make_cap_geometry(alpha_degrees * M_PI / 180.0);
}

Material RunConfig::material() const {
  if (validation_override) return make_validation_material(eps_plus, eps_minus, delta, scope);
  return make_material(eps_plus, eps_minus, delta, scope);
}

void validate_for_command(const RunConfig& config) {
  const std::string& c = config.command;
  if (c != "exponents" && c != "sweep-delta" && c != "scan-contrast" && c != "flux-check" &&
      c != "validate") {
    fail(Errc::ConfigValidationError, "unknown command '" + c + "'");
  }
  if (!config.has_geometry) {
    fail(Errc::ConfigValidationError, "command " + c + " needs a [geometry] section");
  }
  if (c == "sweep-delta" && config.deltas.empty()) {
    fail(Errc::ConfigValidationError, "sweep-delta needs a deltas list in [sweep]");
  }
  if (c == "scan-contrast") {
    if (config.kappas.empty()) {
      fail(Errc::ConfigValidationError, "scan-contrast needs a kappa grid in [sweep]");
    }
    if (!config.mesh_file.empty()) {
      fail(Errc::ConfigValidationError, "scan-contrast runs on cap geometries only");
    }
  }
  if (c == "flux-check") {
    for (double t : config.taus) {
      if (t > config.cutoff.r_one) {
        fail(Errc::ConfigValidationError, "tau values must lie in (0, r_one]");
      }
    }
  }
}

std::vector<std::string> config_echo(const RunConfig& cfg) {
  std::vector<std::string> lines;
  if (cfg.has_geometry) {
    lines.push_back(cfg.mesh_file.empty()
                        ? "geometry alpha_degrees=" + format_double(cfg.alpha_degrees)
                        : "geometry mesh_file=" + cfg.mesh_file);
  }
  lines.push_back("material eps_plus=" + format_double(cfg.eps_plus) +
                  " eps_minus=" + format_double(cfg.eps_minus) +
                  " delta=" + format_double(cfg.delta) + " dissipation=" +
                  (cfg.scope == DissipationScope::MinusOnly ? "minus-only" : "uniform") +
                  (cfg.validation_override ? " validation_override=true" : ""));
  lines.push_back("cutoff r_one=" + format_double(cfg.cutoff.r_one) +
                  " rho=" + format_double(cfg.cutoff.rho) + " family=" +
                  (cfg.cutoff.family == CutoffFamily::PolynomialC2 ? "polynomial-c2"
                                                                   : "smooth-bump"));
  lines.push_back(
      "numerics n_elements=" + std::to_string(cfg.numerics.n_elements) +
      " refinement=" + std::to_string(cfg.numerics.refinement) +
      " m_max=" + std::to_string(cfg.numerics.m_max) +
      " element_order=" + (cfg.numerics.order == ElementOrder::P2 ? "p2" : "p1") +
      " route=" + (cfg.sphere_route ? "sphere" : "axisym"));
  auto join = [](const std::vector<double>& v) {
    std::string s = "[";
    for (size_t i = 0; i < v.size(); ++i) {
      if (i) s += ",";
      s += format_double(v[i]);
    }
    return s + "]";
  };
  if (!cfg.deltas.empty()) lines.push_back("sweep deltas=" + join(cfg.deltas));
  if (!cfg.kappas.empty()) lines.push_back("sweep kappas=" + join(cfg.kappas));
  if (!cfg.taus.empty()) lines.push_back("sweep taus=" + join(cfg.taus));
  return lines;
}

}  // namespace conetrap
