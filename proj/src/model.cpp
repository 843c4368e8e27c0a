#include "conetrap/model.hpp"

#include <cmath>
#include <cstdlib>

namespace conetrap {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::AlphaOutOfRange: return "AlphaOutOfRange";
    case Errc::SignViolation: return "SignViolation";
    case Errc::NegativeDissipation: return "NegativeDissipation";
    case Errc::GeometryKindMismatch: return "GeometryKindMismatch";
    case Errc::MeshFileInvalid: return "MeshFileInvalid";
    case Errc::DegenerateTriangle: return "DegenerateTriangle";
    case Errc::PoleQuadratureFailure: return "PoleQuadratureFailure";
    case Errc::MassMatrixSingular: return "MassMatrixSingular";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::EndpointDegeneracy: return "EndpointDegeneracy";
    case Errc::NoSpectralGap: return "NoSpectralGap";
    case Errc::TrackingAmbiguity: return "TrackingAmbiguity";
    case Errc::WindowEmpty: return "WindowEmpty";
    case Errc::MultiplicityWarning: return "MultiplicityWarning";
    case Errc::PointOutsideChart: return "PointOutsideChart";
    case Errc::TauOutsidePlateau: return "TauOutsidePlateau";
    case Errc::QuadratureNotConverged: return "QuadratureNotConverged";
    case Errc::ConfigParseError: return "ConfigParseError";
    case Errc::ConfigValidationError: return "ConfigValidationError";
    case Errc::IoError: return "IoError";
  }
  return "UnknownError";
}

void init_determinism() {
  // OpenBLAS and OpenMP read these on first use; setting them before any
  // linear algebra keeps solver thread counts (and thus reduction orders)
  // fixed. Never overrides an explicit user choice.
  ::setenv("OPENBLAS_NUM_THREADS", "1", /*overwrite=*/0);
  ::setenv("OMP_NUM_THREADS", "1", /*overwrite=*/0);
}

TipGeometry make_cap_geometry(double alpha) {
  if (!(alpha > 0.0) || !(alpha < M_PI)) {
    fail(Errc::AlphaOutOfRange, "cap angle must lie strictly between 0 and pi, got " +
                                    std::to_string(alpha));
  }
  TipGeometry g;
  g.kind = GeometryKind::CircularCap;
  g.alpha = alpha;
  g.phi_interface = -M_PI / 2.0 + alpha;
  return g;
}

TipGeometry make_region_geometry(const std::string& mesh_path) {
  TipGeometry g;
  g.kind = GeometryKind::GeneralRegion;
  g.mesh_path = mesh_path;
  return g;
}

namespace {

Material make_material_impl(double eps_plus, double eps_minus, double delta,
                            DissipationScope scope) {
  if (delta < 0.0) {
    fail(Errc::NegativeDissipation, "dissipation must be nonnegative, got " +
                                        std::to_string(delta));
  }
  Material m;
  m.eps_plus = eps_plus;
  m.eps_minus = eps_minus;
  m.delta = delta;
  m.kappa = eps_minus / eps_plus;
  m.scope = scope;
  return m;
}

}  // namespace

Material make_material(double eps_plus, double eps_minus, double delta,
                       DissipationScope scope) {
  if (!(eps_plus > 0.0) || !(eps_minus < 0.0)) {
    fail(Errc::SignViolation, "need eps_plus > 0 and eps_minus < 0, got (" +
                                  std::to_string(eps_plus) + ", " + std::to_string(eps_minus) +
                                  ")");
  }
  return make_material_impl(eps_plus, eps_minus, delta, scope);
}

Material make_validation_material(double eps_plus, double eps_minus, double delta,
                                  DissipationScope scope) {
  if (!(eps_plus > 0.0)) {
    fail(Errc::SignViolation, "validation override still needs eps_plus > 0");
  }
  return make_material_impl(eps_plus, eps_minus, delta, scope);
}

CutoffProfile make_cutoff(double r_one, double rho, CutoffFamily family) {
  if (!(r_one > 0.0) || !(r_one < rho)) {
    fail(Errc::ConfigValidationError,
         "cutoff needs 0 < r_one < rho, got r_one=" + std::to_string(r_one) +
             " rho=" + std::to_string(rho));
  }
  return CutoffProfile{r_one, rho, family};
}

namespace {

// Quintic smoothstep on [0,1]: h(0)=1, h(1)=0 with first and second
// derivatives vanishing at both ends (C^2 joints come for free).
inline void quintic(double t, double& h, double& hp, double& hpp) {
  const double t2 = t * t, t3 = t2 * t;
  h = 1.0 - (10.0 * t3 - 15.0 * t2 * t2 + 6.0 * t2 * t3);
  hp = -(30.0 * t2 - 60.0 * t3 + 30.0 * t2 * t2);
  hpp = -(60.0 * t - 180.0 * t2 + 120.0 * t3);
}

// C^infinity bump transition: g(t) = f(1-t) / (f(t) + f(1-t)) with
// f(t) = exp(-1/t) for t > 0 (0 otherwise). Derivatives by exact formulas.
inline double fexp(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
inline double fexp_p(double t) { return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }
inline double fexp_pp(double t) {
  if (t <= 0.0) return 0.0;
  return std::exp(-1.0 / t) * (1.0 - 2.0 * t) / (t * t * t * t);
}

inline void bump(double t, double& h, double& hp, double& hpp) {
  const double a = fexp(1.0 - t), b = fexp(t);
  const double ap = -fexp_p(1.0 - t), bp = fexp_p(t);
  const double app = fexp_pp(1.0 - t), bpp = fexp_pp(t);
  const double s = a + b, sp = ap + bp, spp = app + bpp;
  h = a / s;
  hp = (ap * s - a * sp) / (s * s);
  hpp = (app * s - a * spp) / (s * s) - 2.0 * sp * (ap * s - a * sp) / (s * s * s);
}

}  // namespace

CutoffValue eval_cutoff(const CutoffProfile& profile, double r) {
  if (r < 0.0) fail(Errc::PointOutsideChart, "cutoff evaluated at negative radius");
  if (r <= profile.r_one) return {1.0, 0.0, 0.0};
  if (r >= profile.rho) return {0.0, 0.0, 0.0};
  const double w = profile.rho - profile.r_one;
  const double t = (r - profile.r_one) / w;
  double h, hp, hpp;
  if (profile.family == CutoffFamily::PolynomialC2) {
    quintic(t, h, hp, hpp);
  } else {
    bump(t, h, hp, hpp);
  }
  return {h, hp / w, hpp / (w * w)};
}

}  // namespace conetrap
