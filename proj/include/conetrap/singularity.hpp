#pragma once

#include <optional>
#include <vector>

#include "conetrap/eigensolver.hpp"

namespace conetrap {

// Numerical knobs shared by the pipelines, with the library defaults.
struct Numerics {
  int n_elements = 256;        // latitude elements (axisym route)
  int refinement = 4;          // icosphere subdivision level (sphere route)
  int m_max = 3;               // azimuthal orders 0..m_max scanned
  ElementOrder order = ElementOrder::P2;  // axisym element order
  double tol_critical = 1e-6;  // |Im mu| band and critical-line gap tolerance
  double tol_d_rel = 1e-8;     // D-degeneracy threshold, relative to eps scale
  double bisect_width = 1e-3;  // contrast-interval endpoint resolution
  double solver_tol = 1e-10;   // eigenpair residual target
};

// A discrete eigenfunction together with the discretization it lives on,
// sufficient to evaluate it (and its surface gradient) anywhere.
struct FieldOnSphere {
  WeightedPencil::Kind kind = WeightedPencil::Kind::Axisym;
  ElementOrder order = ElementOrder::P2;
  int mode_m = 0;       // axisym azimuthal order; -1 on the sphere route
  LatitudeMesh lat;     // axisym
  SphereMesh sph;       // full sphere
  Eigen::VectorXd coeffs;  // full-length real dof vector (poles included)
};

// A validated black-hole pair. eta is stored as a positive magnitude with an
// orientation sign; the outgoing exponent is lambda = -1/2 + i * signed_eta().
struct SingularExponent {
  double eta = 0.0;        // > 0
  int orientation = +1;    // fixed by the sign rule signed_eta * D > 0
  double mu = 0.0;         // = -(eta^2 + 1/4)
  double D = 0.0;          // integral of eps |Phi|^2 over the sphere
  double beta0 = 0.0;
  double beta_max = 0.0;
  bool multiplicity_warning = false;
  FieldOnSphere field;
  Material material{};         // material of the selecting pencil (delta = 0)
  double phi_interface = 0.0;  // cap-boundary latitude of the discretization

  double signed_eta() const { return orientation * eta; }
  Complex lambda_out() const { return {-0.5, signed_eta()}; }
};

// Solutions with real mu < -1/4 (within tolerance), i.e. exponents on the
// critical line with eta != 0. Eigenvectors are phase-aligned to real and
// normalized to unit L2 norm on the sphere. Orientation and D are not yet
// fixed; run select_outgoing on each result.
std::vector<SingularExponent> find_black_hole_pairs(const WeightedPencil& pencil,
                                                    const std::vector<EigenSolution>& solutions,
                                                    double tol_imag = 1e-6);

// Fixes the orientation so that signed_eta * D > 0 and stores D, computed
// from the material-weighted mass form of the delta = 0 pencil.
SingularExponent select_outgoing(SingularExponent candidate, const WeightedPencil& pencil,
                                 const Material& material, double tol_d_rel = 1e-8);

// Kondratiev weight window: beta0 = min |Re lambda + 1/2| over eigenvalues
// off the critical line; beta_max = min(1/2, beta0).
std::pair<double, double> compute_beta0(const std::vector<EigenSolution>& solutions,
                                        double tol_critical = 1e-6);

// First-order drift of the tracked eigenvalue under dissipation, computed
// from the plain (unweighted) stiffness/mass forms restricted to the region
// that receives i*delta under the material's dissipation scope:
//   lambda' = [ |grad Phi|^2_S + (eta^2 + 1/4) |Phi|^2_S ] / (2 signed_eta D).
// Real and positive for an outgoing exponent.
double perturbation_slope(const SingularExponent& exponent, const Material& material,
                          double tol_d_rel = 1e-8);

struct DeltaSweepRow {
  double delta = 0.0;
  Complex lambda;            // tracked lambda^delta
  Complex eta;               // lambda = -1/2 + i eta
  bool in_window = false;    // Re lambda in (-1/2, -1/2 + beta0 - sqrt(delta))
  double tracking_distance = 0.0;
};

struct DeltaSweepResult {
  std::vector<DeltaSweepRow> rows;
  SingularExponent exponent;  // the delta = 0 outgoing pair that was tracked
  std::vector<Warning> warnings;
};

// Limiting-absorption sweep: solve the dissipative pencil for each delta and
// follow the unique eigenvalue branch emanating from the outgoing exponent
// by nearest-neighbor continuation among candidates with Re lambda > -1/2.
DeltaSweepResult sweep_delta(const TipGeometry& geometry, const Material& material,
                             const Numerics& numerics, const std::vector<double>& deltas,
                             bool sphere_route = false);

struct ContrastRow {
  double kappa = 0.0;
  int mode_m = 0;
  bool exists = false;
  double eta = 0.0;  // valid when exists
  double D = 0.0;    // valid when exists
  bool degenerate = false;
};

struct ContrastEndpoint {
  double kappa_inside = 0.0;   // bracket edge where a pair still exists
  double kappa_outside = 0.0;  // bracket edge without a pair
  double endpoint_D = 0.0;     // D at kappa_inside (surviving side)
};

struct ContrastScanResult {
  double alpha = 0.0;
  std::vector<ContrastRow> rows;
  std::vector<ContrastEndpoint> endpoints;
  std::vector<Warning> warnings;
};

// Scans the contrast grid for black-hole pairs per azimuthal mode and
// brackets the existence-boundary contrasts by bisection.
ContrastScanResult scan_contrast(double alpha, const std::vector<double>& kappa_grid,
                                 const std::vector<int>& modes, const Numerics& numerics,
                                 int jobs = 1);

struct ExponentsResult {
  std::vector<SingularExponent> pairs;  // outgoing-selected, eta descending per mode
  std::vector<double> lambda_prime;     // parallel to pairs
  std::vector<int> modes_searched;
  double beta0 = 0.0;
  double beta_max = 0.0;
  std::vector<Warning> warnings;
};

// Full exponent pipeline at delta = 0: per-mode solve (axisym route) or one
// sphere solve, pair detection, outgoing selection, beta0 from the joint
// spectrum, and perturbation slopes.
ExponentsResult compute_exponents(const TipGeometry& geometry, const Material& material,
                                  const Numerics& numerics, bool sphere_route = false);

}  // namespace conetrap
