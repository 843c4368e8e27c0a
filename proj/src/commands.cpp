#include <algorithm>
#include <cmath>
#include <functional>

#include "conetrap/commands.hpp"

namespace conetrap {

namespace {

std::vector<std::string> base_header(const RunConfig& cfg) {
  std::vector<std::string> h;
  h.push_back(kVersion);
  h.push_back("command " + cfg.command);
  for (auto& line : config_echo(cfg)) h.push_back(line);
  return h;
}

void add_mesh_line(std::vector<std::string>& header, const RunConfig& cfg) {
  if (cfg.sphere_route || !cfg.mesh_file.empty()) {
    const SphereMesh mesh = build_sphere_mesh(cfg.geometry(), cfg.numerics.refinement);
    header.push_back("mesh vertices=" + std::to_string(mesh.vertices.size()) +
                     " triangles=" + std::to_string(mesh.triangles.size()));
  } else {
    const LatitudeMesh mesh = build_latitude_mesh(cfg.geometry(), cfg.numerics.n_elements);
    header.push_back("mesh nodes=" + std::to_string(mesh.nodes.size()) + " dofs=" +
                     std::to_string(axisym_dof_count(mesh, cfg.numerics.order)));
  }
}

void add_warnings(std::vector<std::string>& header, const std::vector<Warning>& warnings) {
  for (const auto& w : warnings) {
    header.push_back(std::string("warning ") + errc_name(w.code) + ": " + w.detail);
  }
}

int exit_from_warnings(const std::vector<Warning>& warnings) {
  return warnings.empty() ? 0 : 2;
}

CommandResult run_exponents(const RunConfig& cfg) {
  const ExponentsResult res =
      compute_exponents(cfg.geometry(), cfg.material(), cfg.numerics, cfg.sphere_route);
  CommandResult out;
  out.table.header = base_header(cfg);
  add_mesh_line(out.table.header, cfg);
  out.table.header.push_back("beta0=" + format_double(res.beta0) +
                             " beta_max=" + format_double(res.beta_max));
  add_warnings(out.table.header, res.warnings);
  out.table.columns = {"mode_m", "eta", "D", "beta0", "beta_max", "lambda_prime"};
  for (size_t i = 0; i < res.pairs.size(); ++i) {
    const SingularExponent& p = res.pairs[i];
    out.table.rows.push_back({std::to_string(p.field.mode_m), format_double(p.eta),
                              format_double(p.D), format_double(p.beta0),
                              format_double(p.beta_max), format_double(res.lambda_prime[i])});
  }
  out.exit_code = exit_from_warnings(res.warnings);
  return out;
}

CommandResult run_sweep_delta(const RunConfig& cfg) {
  const DeltaSweepResult res =
      sweep_delta(cfg.geometry(), cfg.material(), cfg.numerics, cfg.deltas, cfg.sphere_route);
  CommandResult out;
  out.table.header = base_header(cfg);
  add_mesh_line(out.table.header, cfg);
  out.table.header.push_back(
      "tracked mode_m=" + std::to_string(res.exponent.field.mode_m) +
      " eta=" + format_double(res.exponent.eta) + " D=" + format_double(res.exponent.D) +
      " beta0=" + format_double(res.exponent.beta0));
  add_warnings(out.table.header, res.warnings);
  out.table.columns = {"delta",  "re_lambda", "im_lambda",        "re_eta",
                       "im_eta", "in_window", "tracking_distance"};
  for (const auto& row : res.rows) {
    out.table.rows.push_back({format_double(row.delta), format_double(row.lambda.real()),
                              format_double(row.lambda.imag()), format_double(row.eta.real()),
                              format_double(row.eta.imag()), row.in_window ? "1" : "0",
                              format_double(row.tracking_distance)});
  }
  out.exit_code = exit_from_warnings(res.warnings);
  return out;
}

CommandResult run_scan_contrast(const RunConfig& cfg) {
  std::vector<int> modes = cfg.modes;
  if (modes.empty()) {
    for (int m = 0; m <= cfg.numerics.m_max; ++m) modes.push_back(m);
  }
  const double alpha = cfg.geometry().alpha;
  const ContrastScanResult res =
      scan_contrast(alpha, cfg.kappas, modes, cfg.numerics, cfg.jobs);
  CommandResult out;
  out.table.header = base_header(cfg);
  add_mesh_line(out.table.header, cfg);
  for (const auto& ep : res.endpoints) {
    out.table.header.push_back("critical_interval inside=" + format_double(ep.kappa_inside) +
                               " outside=" + format_double(ep.kappa_outside) +
                               " endpoint_D=" + format_double(ep.endpoint_D));
  }
  add_warnings(out.table.header, res.warnings);
  out.table.columns = {"kappa", "mode_m", "eta_or_empty", "D"};
  for (const auto& row : res.rows) {
    out.table.rows.push_back({format_double(row.kappa), std::to_string(row.mode_m),
                              row.exists ? format_double(row.eta) : "",
                              row.exists && !row.degenerate ? format_double(row.D) : ""});
  }
  out.exit_code = exit_from_warnings(res.warnings);
  return out;
}

CommandResult run_flux_check(const RunConfig& cfg) {
  const ExponentsResult res =
      compute_exponents(cfg.geometry(), cfg.material(), cfg.numerics, cfg.sphere_route);
  CommandResult out;
  out.table.header = base_header(cfg);
  add_mesh_line(out.table.header, cfg);
  add_warnings(out.table.header, res.warnings);
  out.table.columns = {"tau",       "re_surface", "im_surface",       "re_volume",
                       "im_volume", "eta_D",      "residual_identity"};
  if (res.pairs.empty()) {
    out.table.header.push_back("note no black-hole pair detected; nothing to check");
    out.exit_code = exit_from_warnings(res.warnings);
    return out;
  }
  // Strongest pair across all modes.
  size_t best = 0;
  for (size_t i = 1; i < res.pairs.size(); ++i) {
    if (res.pairs[i].eta > res.pairs[best].eta) best = i;
  }
  const SingularExponent& pair = res.pairs[best];

  const Complex volume = volume_flux_integral(pair, cfg.cutoff);
  const Complex denom = coefficient_denominator(pair, cfg.cutoff, 1e-10);
  const double eta_d = pair.signed_eta() * pair.D;
  out.table.header.push_back("denominator re=" + format_double(denom.real()) +
                             " im=" + format_double(denom.imag()) + " conj_residual=" +
                             format_double(std::abs(denom - std::conj(volume))));

  std::vector<double> taus = cfg.taus;
  if (taus.empty()) {
    taus = {cfg.cutoff.r_one / 4.0, cfg.cutoff.r_one / 2.0, cfg.cutoff.r_one};
  }
  for (double tau : taus) {
    const Complex surf = surface_flux(pair, tau, cfg.cutoff);
    out.table.rows.push_back({format_double(tau), format_double(surf.real()),
                              format_double(surf.imag()), format_double(volume.real()),
                              format_double(volume.imag()), format_double(eta_d),
                              format_double(std::abs(volume.imag() - eta_d))});
  }
  out.exit_code = exit_from_warnings(res.warnings);
  return out;
}

// ---------------------------------------------------------------------------
// validate: self-checks of the discretization and the spectral pipeline.

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Eigenvalues of the eps == 1 problem are l(l+1); compare the lowest cluster
// averages against the exact values and report the worst relative error.
double harmonic_errors(std::vector<double> mu, const std::vector<int>& degeneracy,
                       std::vector<double>* errors) {
  std::sort(mu.begin(), mu.end());
  errors->clear();
  size_t k = 0;
  double worst = 0.0;
  for (size_t l = 0; l < degeneracy.size(); ++l) {
    const double exact = static_cast<double>(l * (l + 1));
    double avg = 0.0;
    for (int d = 0; d < degeneracy[l]; ++d) {
      if (k >= mu.size()) return 1e30;
      avg += mu[k++];
    }
    avg /= degeneracy[l];
    const double err = l == 0 ? std::abs(avg) : std::abs(avg - exact) / exact;
    errors->push_back(err);
    if (l > 0) worst = std::max(worst, err);
  }
  return worst;
}

std::vector<double> real_spectrum(const WeightedPencil& pencil, double tol) {
  std::vector<double> mu;
  for (const auto& s : solve_gevp(pencil, tol)) mu.push_back(s.mu.real());
  return mu;
}

Check check_euler(const RunConfig& cfg) {
  const SphereMesh mesh = build_sphere_mesh(cfg.geometry(), cfg.numerics.refinement);
  const int chi = euler_characteristic(mesh);
  return {"euler_characteristic", chi == 2,
          "chi=" + std::to_string(chi) + " vertices=" + std::to_string(mesh.vertices.size())};
}

Check check_region_areas(const RunConfig& cfg) {
  const TipGeometry geom = cfg.geometry();
  const SphereMesh mesh = build_sphere_mesh(geom, cfg.numerics.refinement);
  const double plus = region_area(mesh, Region::Plus);
  const double minus = region_area(mesh, Region::Minus);
  if (geom.kind != GeometryKind::CircularCap) {
    const double total_err = std::abs(plus + minus - 4.0 * M_PI) / (4.0 * M_PI);
    return {"region_areas", total_err < 0.02,
            "total_rel_err=" + format_double(total_err) + " (general mesh)"};
  }
  const double exact_plus = 2.0 * M_PI * (1.0 - std::cos(geom.alpha));
  const double err_plus = std::abs(plus - exact_plus) / (4.0 * M_PI);
  const double err_minus = std::abs(minus - (4.0 * M_PI - exact_plus)) / (4.0 * M_PI);
  const double worst = std::max(err_plus, err_minus);
  return {"region_areas", worst < 0.02, "worst_rel_err=" + format_double(worst)};
}

Check check_cutoff_identity(const RunConfig& cfg) {
  // int chi chi' dr over the transition band must be -1/2 exactly
  // (antiderivative chi^2/2 between chi=1 and chi=0), for any profile.
  const CutoffProfile& profile = cfg.cutoff;
  double integral = 0.0;
  const int panels = 256;
  const double h = (profile.rho - profile.r_one) / panels;
  static const double gx[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                               0.8611363115940526};
  static const double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                               0.3478548451374538};
  for (int k = 0; k < panels; ++k) {
    const double mid = profile.r_one + (k + 0.5) * h;
    for (int q = 0; q < 4; ++q) {
      const double r = mid + 0.5 * h * gx[q];
      const CutoffValue cv = eval_cutoff(profile, r);
      integral += 0.5 * h * gw[q] * cv.chi * cv.chi_prime;
    }
  }
  const double err = std::abs(integral + 0.5);
  return {"cutoff_identity", err <= 1e-10, "integral=" + format_double(integral)};
}

Check check_harmonic_axisym(const RunConfig& cfg) {
  const TipGeometry geom = cfg.geometry();
  if (geom.kind != GeometryKind::CircularCap) {
    return {"harmonic_axisym_order", true, "skipped (general mesh)"};
  }
  const Material ones = make_validation_material(1.0, 1.0, 0.0);
  const std::vector<int> degeneracy = {1, 1, 1, 1};  // m=0 line: one mu per l
  std::vector<double> coarse_err, fine_err;
  const int n = std::max(16, cfg.numerics.n_elements / 4);
  for (int stage = 0; stage < 2; ++stage) {
    const LatitudeMesh mesh = build_latitude_mesh(geom, stage == 0 ? n : 2 * n);
    const WeightedPencil pencil =
        assemble_axisym(mesh, ones, AzimuthalMode{0}, ElementOrder::P1);
    harmonic_errors(real_spectrum(pencil, cfg.numerics.solver_tol), degeneracy,
                    stage == 0 ? &coarse_err : &fine_err);
  }
  double worst_order = 1e30;
  std::string detail = "orders:";
  for (size_t l = 1; l < fine_err.size(); ++l) {
    const double order = std::log2(coarse_err[l] / fine_err[l]);
    worst_order = std::min(worst_order, order);
    detail += " " + format_double(order);
  }
  return {"harmonic_axisym_order", worst_order >= 1.8, detail};
}

Check check_harmonic_sphere(const RunConfig& cfg) {
  if (cfg.numerics.refinement < 1) {
    return {"harmonic_sphere", false, "needs refinement >= 1"};
  }
  const Material ones = make_validation_material(1.0, 1.0, 0.0);
  const TipGeometry geom = cfg.geometry();
  const std::vector<int> degeneracy = {1, 3, 5};
  std::vector<double> coarse_err, fine_err;
  for (int stage = 0; stage < 2; ++stage) {
    const int ref = cfg.numerics.refinement - 1 + stage;
    const SphereMesh mesh = build_sphere_mesh(geom, ref);
    const WeightedPencil pencil = assemble_sphere(mesh, ones);
    harmonic_errors(real_spectrum(pencil, cfg.numerics.solver_tol), degeneracy,
                    stage == 0 ? &coarse_err : &fine_err);
  }
  double worst_err = 0.0, worst_order = 1e30;
  std::string detail = "rel_err:";
  for (size_t l = 1; l < fine_err.size(); ++l) {
    worst_err = std::max(worst_err, fine_err[l]);
    worst_order = std::min(worst_order, std::log2(coarse_err[l] / fine_err[l]));
    detail += " " + format_double(fine_err[l]);
  }
  detail += " worst_order=" + format_double(worst_order);
  return {"harmonic_sphere", worst_err < 0.02 && worst_order >= 1.8, detail};
}

Check check_pair_mu_real(const RunConfig& cfg) {
  const TipGeometry geom = cfg.geometry();
  Material mat = cfg.material();
  mat.delta = 0.0;
  if (!(mat.eps_minus < 0.0)) {
    return {"pair_mu_real", true, "skipped (no sign change)"};
  }
  const LatitudeMesh mesh = build_latitude_mesh(geom, cfg.numerics.n_elements);
  const WeightedPencil pencil =
      assemble_axisym(mesh, mat, AzimuthalMode{0}, cfg.numerics.order);
  const auto solutions = solve_gevp(pencil, cfg.numerics.solver_tol);
  double worst = 0.0;
  int found = 0;
  for (const auto& s : solutions) {
    if (s.mu.real() < -0.25 && std::abs(s.mu.imag()) < 1e-3 * (1.0 + std::abs(s.mu))) {
      worst = std::max(worst, std::abs(s.mu.imag()));
      ++found;
    }
  }
  if (found == 0) return {"pair_mu_real", true, "skipped (no pair at this config)"};
  return {"pair_mu_real", worst <= 1e-8,
          "pairs=" + std::to_string(found) + " worst_im=" + format_double(worst)};
}

// Cross-route comparison: every axisym m in {0,1,2} eigenvalue inside the
// window appears in the sphere spectrum within the scaled tolerance, and
// conversely for sphere eigenvalues identified as m <= 2.
Check check_cross_route(const RunConfig& cfg) {
  const TipGeometry geom = cfg.geometry();
  if (geom.kind != GeometryKind::CircularCap) {
    return {"axisym_vs_sphere", true, "skipped (general mesh)"};
  }
  Material mat = cfg.material();
  mat.delta = 0.0;

  const double window = 30.0;
  const double tol = 5e-2;

  std::vector<double> axi;
  const LatitudeMesh lat = build_latitude_mesh(geom, std::max(cfg.numerics.n_elements, 128));
  for (int m = 0; m <= 2; ++m) {
    const WeightedPencil pencil = assemble_axisym(lat, mat, AzimuthalMode{m}, ElementOrder::P2);
    for (const auto& s : solve_gevp(pencil, cfg.numerics.solver_tol)) {
      if (std::abs(s.mu) < window) axi.push_back(s.mu.real());
    }
  }

  const SphereMesh sph = build_sphere_mesh(geom, cfg.numerics.refinement);
  const WeightedPencil pencil = assemble_sphere(sph, mat);
  const auto solutions = solve_gevp(pencil, cfg.numerics.solver_tol);
  std::vector<double> sphere_all, sphere_low_m;
  std::vector<Eigen::VectorXcd> vectors;
  std::vector<size_t> vec_index;
  for (const auto& s : solutions) {
    if (std::abs(s.mu) >= window) continue;
    sphere_all.push_back(s.mu.real());
    vectors.push_back(s.vector);
  }
  const auto ids = dominant_azimuthal_orders(sph, vectors, 8);
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i].first <= 2) sphere_low_m.push_back(sphere_all[i]);
  }

  double worst = 0.0;
  auto nearest_gap = [](double mu, const std::vector<double>& pool) {
    double best = 1e30;
    for (double v : pool) best = std::min(best, std::abs(mu - v));
    return best / (1.0 + std::abs(mu));
  };
  for (double mu : axi) worst = std::max(worst, nearest_gap(mu, sphere_all));
  for (double mu : sphere_low_m) worst = std::max(worst, nearest_gap(mu, axi));
  return {"axisym_vs_sphere", worst <= tol,
          "worst_scaled_gap=" + format_double(worst) + " axi_count=" +
              std::to_string(axi.size()) + " sphere_count=" + std::to_string(sphere_all.size()) +
              " low_m_count=" + std::to_string(sphere_low_m.size())};
}

CommandResult run_validate(const RunConfig& cfg) {
  std::vector<Check> checks;
  checks.push_back(check_euler(cfg));
  checks.push_back(check_region_areas(cfg));
  checks.push_back(check_cutoff_identity(cfg));
  checks.push_back(check_harmonic_axisym(cfg));
  checks.push_back(check_harmonic_sphere(cfg));
  checks.push_back(check_pair_mu_real(cfg));
  checks.push_back(check_cross_route(cfg));

  CommandResult out;
  out.table.header = base_header(cfg);
  add_mesh_line(out.table.header, cfg);
  out.table.columns = {"check", "status", "detail"};
  bool all_pass = true;
  for (const auto& c : checks) {
    all_pass = all_pass && c.pass;
    out.table.rows.push_back({c.name, c.pass ? "pass" : "fail", c.detail});
  }
  out.exit_code = all_pass ? 0 : 1;
  return out;
}

}  // namespace

CommandResult run_command(const RunConfig& config) {
  validate_for_command(config);
  if (config.command == "exponents") return run_exponents(config);
  if (config.command == "sweep-delta") return run_sweep_delta(config);
  if (config.command == "scan-contrast") return run_scan_contrast(config);
  if (config.command == "flux-check") return run_flux_check(config);
  return run_validate(config);
}

}  // namespace conetrap
