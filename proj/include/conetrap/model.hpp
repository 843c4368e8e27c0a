#pragma once

#include <string>

#include "conetrap/types.hpp"

namespace conetrap {

// Region labels on the unit sphere. Plus carries the positive permittivity
// (the spherical cap of radius alpha about the south pole), Minus the
// negative one (the complement).
enum class Region { Minus, Plus };

enum class GeometryKind { CircularCap, GeneralRegion };

struct TipGeometry {
  GeometryKind kind = GeometryKind::CircularCap;
  double alpha = 0.0;          // cap half-angle, CircularCap only
  double phi_interface = 0.0;  // latitude of the cap boundary = alpha - pi/2
  std::string mesh_path;       // GeneralRegion only: labeled mesh file
};

TipGeometry make_cap_geometry(double alpha);
TipGeometry make_region_geometry(const std::string& mesh_path);

// Where the limiting-absorption dissipation i*delta is added. MinusOnly
// perturbs the negative-permittivity (lossy) region alone, which is the mode
// that reproduces the tabulated eigenvalue drift; Uniform adds i*delta in
// both regions.
enum class DissipationScope { MinusOnly, Uniform };

struct Material {
  double eps_plus = 1.0;
  double eps_minus = -1.0;
  double delta = 0.0;
  double kappa = -1.0;  // eps_minus / eps_plus
  DissipationScope scope = DissipationScope::MinusOnly;

  Complex eps(Region r) const {
    const double base = (r == Region::Minus) ? eps_minus : eps_plus;
    const bool dissipate = (r == Region::Minus) || scope == DissipationScope::Uniform;
    return {base, dissipate ? delta : 0.0};
  }
};

Material make_material(double eps_plus, double eps_minus, double delta,
                       DissipationScope scope = DissipationScope::MinusOnly);

// Validation override: permits eps_minus >= 0 (e.g. eps identically one for
// spectrum sanity checks). Regular runs must use make_material.
Material make_validation_material(double eps_plus, double eps_minus, double delta,
                                  DissipationScope scope = DissipationScope::MinusOnly);

enum class CutoffFamily { PolynomialC2, SmoothBump };

// Radial cutoff profile: chi == 1 on [0, r_one], chi == 0 on [rho, inf),
// C^2 across both joints, monotone in between.
struct CutoffProfile {
  double r_one = 0.5;
  double rho = 1.0;
  CutoffFamily family = CutoffFamily::PolynomialC2;
};

CutoffProfile make_cutoff(double r_one, double rho,
                          CutoffFamily family = CutoffFamily::PolynomialC2);

struct CutoffValue {
  double chi;
  double chi_prime;
  double chi_double_prime;
};

CutoffValue eval_cutoff(const CutoffProfile& profile, double r);

struct AzimuthalMode {
  int m = 0;
};

}  // namespace conetrap
