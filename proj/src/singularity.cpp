#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "conetrap/singularity.hpp"

namespace conetrap {

namespace {

// Azimuthal integration factor turning a latitude-line integral into a true
// sphere integral for Phi = f(phi) (m = 0) or Phi = cos(m theta) f(phi).
double azimuthal_factor(const WeightedPencil& pencil) {
  if (pencil.kind == WeightedPencil::Kind::FullSphere) return 1.0;
  return pencil.mode_m == 0 ? 2.0 * M_PI : M_PI;
}

// Real quadratic form x^T M x of a weights-assembled pencil matrix against a
// full-length dof vector (pole dofs sliced off where the pencil removed them).
double quad_form(const Eigen::MatrixXcd& M, const WeightedPencil& shape,
                 const Eigen::VectorXd& full_coeffs) {
  Eigen::VectorXd x;
  if (shape.pole_dirichlet) {
    x = full_coeffs.segment(1, full_coeffs.size() - 2);
  } else {
    x = full_coeffs;
  }
  return (x.transpose() * M.real() * x)(0, 0);
}

Eigen::VectorXd reinstate_poles(const WeightedPencil& pencil, const Eigen::VectorXd& reduced) {
  if (!pencil.pole_dirichlet) return reduced;
  Eigen::VectorXd full = Eigen::VectorXd::Zero(reduced.size() + 2);
  full.segment(1, reduced.size()) = reduced;
  return full;
}

RegionWeights unit_weights() { return RegionWeights{{1.0, 0.0}, {1.0, 0.0}}; }

WeightedPencil assemble_like(const WeightedPencil& pencil, const RegionWeights& w) {
  if (pencil.kind == WeightedPencil::Kind::Axisym) {
    return assemble_axisym_weights(pencil.lat_mesh, w, AzimuthalMode{pencil.mode_m},
                                   pencil.order);
  }
  return assemble_sphere_weights(pencil.sph_mesh, w);
}

}  // namespace

std::vector<SingularExponent> find_black_hole_pairs(const WeightedPencil& pencil,
                                                    const std::vector<EigenSolution>& solutions,
                                                    double tol_imag) {
  const double c_m = azimuthal_factor(pencil);
  const WeightedPencil unit = assemble_like(pencil, unit_weights());

  std::vector<SingularExponent> pairs;
  for (const auto& sol : solutions) {
    const double scale = 1.0 + std::abs(sol.mu);
    if (std::abs(sol.mu.imag()) > tol_imag * scale) continue;
    if (!(sol.mu.real() < -0.25 - tol_imag)) continue;

    SingularExponent e;
    e.mu = sol.mu.real();
    e.eta = std::sqrt(-e.mu - 0.25);
    e.orientation = +1;

    // Phase-align the eigenvector to real: rotate by the phase of its
    // largest component, then drop the (numerically zero) imaginary part.
    Eigen::Index imax = 0;
    sol.vector.cwiseAbs().maxCoeff(&imax);
    const Complex phase = sol.vector[imax] / std::abs(sol.vector[imax]);
    Eigen::VectorXd real_vec = (sol.vector / phase).real();

    // Normalize the interpolant to unit L2 norm over the sphere.
    const double norm2 = c_m * [&] {
      Eigen::VectorXd tmp = real_vec;
      return (tmp.transpose() * unit.B.real() * tmp)(0, 0);
    }();
    if (!(norm2 > 0.0)) continue;
    real_vec /= std::sqrt(norm2);

    e.field.kind = pencil.kind;
    e.field.order = pencil.order;
    e.field.mode_m = pencil.kind == WeightedPencil::Kind::Axisym ? pencil.mode_m : -1;
    e.field.lat = pencil.lat_mesh;
    e.field.sph = pencil.sph_mesh;
    e.field.coeffs = reinstate_poles(pencil, real_vec);
    pairs.push_back(std::move(e));
  }

  // Strongest singularity (largest eta) first; flag distinct magnitudes.
  std::sort(pairs.begin(), pairs.end(),
            [](const SingularExponent& a, const SingularExponent& b) { return a.eta > b.eta; });
  bool distinct = false;
  for (size_t i = 1; i < pairs.size(); ++i) {
    if (std::abs(pairs[i].eta - pairs[0].eta) > 1e-6 * (1.0 + pairs[0].eta)) distinct = true;
  }
  if (distinct) {
    for (auto& p : pairs) p.multiplicity_warning = true;
  }
  return pairs;
}

SingularExponent select_outgoing(SingularExponent candidate, const WeightedPencil& pencil,
                                 const Material& material, double tol_d_rel) {
  const double c_m = azimuthal_factor(pencil);
  candidate.D = c_m * quad_form(pencil.B, pencil, candidate.field.coeffs);
  const double eps_scale = std::abs(material.eps_plus) + std::abs(material.eps_minus);
  if (std::abs(candidate.D) < tol_d_rel * eps_scale) {
    fail(Errc::EndpointDegeneracy,
         "|D| = " + std::to_string(std::abs(candidate.D)) + " below threshold");
  }
  candidate.orientation = candidate.D > 0.0 ? +1 : -1;
  candidate.material = material;
  if (pencil.kind == WeightedPencil::Kind::Axisym) {
    candidate.phi_interface = pencil.lat_mesh.nodes[pencil.lat_mesh.interface_index];
  } else if (!pencil.sph_mesh.interface_edges.empty()) {
    double z = 0.0;
    int n = 0;
    for (const auto& e : pencil.sph_mesh.interface_edges) {
      z += pencil.sph_mesh.vertices[e[0]][2] + pencil.sph_mesh.vertices[e[1]][2];
      n += 2;
    }
    candidate.phi_interface = std::asin(std::clamp(z / n, -1.0, 1.0));
  }
  return candidate;
}

std::pair<double, double> compute_beta0(const std::vector<EigenSolution>& solutions,
                                        double tol_critical) {
  double beta0 = std::numeric_limits<double>::infinity();
  for (const auto& sol : solutions) {
    const double gap = std::abs(sol.lambda_plus.real() + 0.5);
    if (gap > tol_critical && gap < beta0) beta0 = gap;
  }
  if (!std::isfinite(beta0)) {
    fail(Errc::NoSpectralGap, "every eigenvalue sits on the critical line");
  }
  return {beta0, std::min(0.5, beta0)};
}

double perturbation_slope(const SingularExponent& exponent, const Material& material,
                          double tol_d_rel) {
  const double eps_scale = std::abs(material.eps_plus) + std::abs(material.eps_minus);
  if (std::abs(exponent.D) < tol_d_rel * eps_scale) {
    fail(Errc::EndpointDegeneracy, "slope undefined at a degenerate pair (D ~ 0)");
  }
  if (!(exponent.signed_eta() * exponent.D > 0.0)) {
    fail(Errc::ConfigValidationError, "slope requires an outgoing-selected exponent");
  }
  // Indicator weights of the dissipating region(s).
  RegionWeights w;
  w.minus = Complex(1.0, 0.0);
  w.plus = Complex(material.scope == DissipationScope::Uniform ? 1.0 : 0.0, 0.0);

  WeightedPencil shape;
  shape.kind = exponent.field.kind;
  shape.order = exponent.field.order;
  shape.mode_m = std::max(exponent.field.mode_m, 0);
  shape.lat_mesh = exponent.field.lat;
  shape.sph_mesh = exponent.field.sph;
  shape.pole_dirichlet =
      shape.kind == WeightedPencil::Kind::Axisym && exponent.field.mode_m >= 1;

  const WeightedPencil forms = assemble_like(shape, w);
  const double c_m = azimuthal_factor(shape);
  const double grad2 = c_m * quad_form(forms.A, forms, exponent.field.coeffs);
  const double mass2 = c_m * quad_form(forms.B, forms, exponent.field.coeffs);
  const double numerator = grad2 + (exponent.eta * exponent.eta + 0.25) * mass2;
  return numerator / (2.0 * exponent.signed_eta() * exponent.D);
}

namespace {

struct ModeSolve {
  WeightedPencil pencil;
  std::vector<EigenSolution> solutions;
};

std::vector<ModeSolve> solve_all_modes(const TipGeometry& geometry, const Material& material,
                                       const Numerics& numerics, bool sphere_route) {
  std::vector<ModeSolve> out;
  if (sphere_route || geometry.kind == GeometryKind::GeneralRegion) {
    const SphereMesh mesh = build_sphere_mesh(geometry, numerics.refinement);
    ModeSolve ms;
    ms.pencil = assemble_sphere(mesh, material);
    ms.solutions = solve_gevp(ms.pencil, numerics.solver_tol);
    out.push_back(std::move(ms));
  } else {
    const LatitudeMesh mesh = build_latitude_mesh(geometry, numerics.n_elements);
    for (int m = 0; m <= numerics.m_max; ++m) {
      ModeSolve ms;
      ms.pencil = assemble_axisym(mesh, material, AzimuthalMode{m}, numerics.order);
      ms.solutions = solve_gevp(ms.pencil, numerics.solver_tol);
      out.push_back(std::move(ms));
    }
  }
  return out;
}

std::vector<EigenSolution> joint_solutions(const std::vector<ModeSolve>& modes) {
  std::vector<EigenSolution> joint;
  for (const auto& ms : modes) {
    joint.insert(joint.end(), ms.solutions.begin(), ms.solutions.end());
  }
  return joint;
}

}  // namespace

ExponentsResult compute_exponents(const TipGeometry& geometry, const Material& material,
                                  const Numerics& numerics, bool sphere_route) {
  if (material.delta != 0.0) {
    fail(Errc::ConfigValidationError, "exponent detection runs on the delta = 0 pencil");
  }
  ExponentsResult result;
  const auto modes = solve_all_modes(geometry, material, numerics, sphere_route);
  const auto [beta0, beta_max] = compute_beta0(joint_solutions(modes), numerics.tol_critical);
  result.beta0 = beta0;
  result.beta_max = beta_max;

  for (const auto& ms : modes) {
    result.modes_searched.push_back(ms.pencil.kind == WeightedPencil::Kind::Axisym
                                        ? ms.pencil.mode_m
                                        : -1);
    auto pairs = find_black_hole_pairs(ms.pencil, ms.solutions, numerics.tol_critical);

    if (ms.pencil.kind == WeightedPencil::Kind::FullSphere && !pairs.empty()) {
      // Tag each candidate with its dominant azimuthal order and keep only
      // orders the mode scan is asked for; this drops the under-resolved
      // high-order interface oscillations of the sign-changing discretization
      // (they sit at very large |mu| and drift with refinement).
      std::vector<Eigen::VectorXcd> vecs;
      vecs.reserve(pairs.size());
      for (const auto& p : pairs) vecs.push_back(p.field.coeffs.cast<Complex>());
      const auto ids = dominant_azimuthal_orders(ms.pencil.sph_mesh, vecs, 31);
      std::vector<SingularExponent> kept;
      for (size_t i = 0; i < pairs.size(); ++i) {
        // A separated eigenfunction cos(m theta) f(phi) concentrates its
        // azimuthal power in one order; broadband candidates are unresolved.
        if (ids[i].first <= numerics.m_max && ids[i].second >= 0.5) {
          pairs[i].field.mode_m = ids[i].first;
          kept.push_back(std::move(pairs[i]));
        }
      }
      pairs = std::move(kept);
      bool distinct = false;
      for (size_t i = 1; i < pairs.size(); ++i) {
        if (std::abs(pairs[i].eta - pairs[0].eta) > 1e-6 * (1.0 + pairs[0].eta)) distinct = true;
      }
      for (auto& p : pairs) p.multiplicity_warning = distinct;
    }

    bool warned_multiplicity = false;
    for (auto& p : pairs) {
      p.beta0 = beta0;
      p.beta_max = beta_max;
      if (p.multiplicity_warning && !warned_multiplicity) {
        result.warnings.push_back({Errc::MultiplicityWarning,
                                   "several distinct |eta| detected in one spectrum"});
        warned_multiplicity = true;
      }
      try {
        SingularExponent selected = select_outgoing(std::move(p), ms.pencil, material,
                                                    numerics.tol_d_rel);
        result.lambda_prime.push_back(
            perturbation_slope(selected, material, numerics.tol_d_rel));
        result.pairs.push_back(std::move(selected));
      } catch (const Error& err) {
        if (err.code() != Errc::EndpointDegeneracy) throw;
        result.warnings.push_back({Errc::EndpointDegeneracy, err.what()});
      }
    }
  }
  return result;
}

DeltaSweepResult sweep_delta(const TipGeometry& geometry, const Material& material,
                             const Numerics& numerics, const std::vector<double>& deltas,
                             bool sphere_route) {
  if (deltas.empty() || !std::is_sorted(deltas.begin(), deltas.end()) || deltas.front() < 0.0) {
    fail(Errc::ConfigValidationError, "delta list must be ascending and nonnegative");
  }
  Material base = material;
  base.delta = 0.0;

  // The delta = 0 spectrum fixes the tracked pair, its mode, and beta0.
  ExponentsResult zero = compute_exponents(geometry, base, numerics, sphere_route);
  if (zero.pairs.empty()) {
    fail(Errc::ConfigValidationError, "no black-hole pair at delta = 0; nothing to track");
  }
  DeltaSweepResult result;
  result.warnings = zero.warnings;
  if (zero.pairs.size() > 1) {
    result.warnings.push_back(
        {Errc::MultiplicityWarning,
         "multiple pairs at delta = 0; tracking the largest-eta pair"});
  }
  result.exponent = zero.pairs.front();
  const double beta0 = zero.beta0;
  const SingularExponent& exp0 = result.exponent;

  const bool axisym = exp0.field.kind == WeightedPencil::Kind::Axisym;
  const LatitudeMesh lat = exp0.field.lat;
  const SphereMesh sph = exp0.field.sph;
  const int mode_m = std::max(exp0.field.mode_m, 0);

  Complex lambda_prev = exp0.lambda_out();
  for (double delta : deltas) {
    DeltaSweepRow row;
    row.delta = delta;
    if (beta0 - std::sqrt(delta) <= 0.0) {
      result.warnings.push_back(
          {Errc::WindowEmpty, "beta0 - sqrt(delta) <= 0 at delta = " + std::to_string(delta)});
    }
    if (delta == 0.0) {
      row.lambda = exp0.lambda_out();
      row.tracking_distance = 0.0;
    } else {
      Material damped = material;
      damped.delta = delta;
      WeightedPencil pencil =
          axisym ? assemble_axisym(lat, damped, AzimuthalMode{mode_m}, numerics.order)
                 : assemble_sphere(sph, damped);
      const auto solutions = solve_gevp(pencil, numerics.solver_tol);

      // Candidates live on the physical sheet Re lambda > -1/2 (lambda_plus
      // branch); continuation picks the one nearest the previous step.
      double best = std::numeric_limits<double>::infinity();
      double second = std::numeric_limits<double>::infinity();
      Complex chosen;
      for (const auto& sol : solutions) {
        const Complex lam = sol.lambda_plus;
        if (!(lam.real() > -0.5 - 1e-12)) continue;
        const double d = std::abs(lam - lambda_prev);
        if (d < best) {
          second = best;
          best = d;
          chosen = lam;
        } else if (d < second) {
          second = d;
        }
      }
      if (!std::isfinite(best)) {
        fail(Errc::NoConvergence, "no candidate eigenvalue on the physical sheet");
      }
      if (std::isfinite(second) && second - best <= 1e-9 * (1.0 + best)) {
        fail(Errc::TrackingAmbiguity,
             "two continuation candidates at distance " + std::to_string(best));
      }
      row.lambda = chosen;
      row.tracking_distance = best;
      lambda_prev = chosen;
    }
    row.eta = Complex(0.0, -1.0) * (row.lambda + Complex(0.5, 0.0));
    row.in_window =
        row.lambda.real() > -0.5 && row.lambda.real() < -0.5 + beta0 - std::sqrt(delta);
    result.rows.push_back(row);
  }
  return result;
}

namespace {

struct KappaProbe {
  bool any_pair = false;
  std::vector<ContrastRow> rows;  // one per mode
};

KappaProbe probe_kappa(double alpha, double kappa, const std::vector<int>& modes,
                       const Numerics& numerics) {
  const TipGeometry geometry = make_cap_geometry(alpha);
  const Material material = make_material(1.0, kappa, 0.0);
  const LatitudeMesh mesh = build_latitude_mesh(geometry, numerics.n_elements);
  KappaProbe probe;
  for (int m : modes) {
    const WeightedPencil pencil =
        assemble_axisym(mesh, material, AzimuthalMode{m}, numerics.order);
    const auto solutions = solve_gevp(pencil, numerics.solver_tol);
    auto pairs = find_black_hole_pairs(pencil, solutions, numerics.tol_critical);
    ContrastRow row;
    row.kappa = kappa;
    row.mode_m = m;
    row.exists = !pairs.empty();
    if (row.exists) {
      probe.any_pair = true;
      row.eta = pairs.front().eta;
      try {
        const SingularExponent sel =
            select_outgoing(std::move(pairs.front()), pencil, material, numerics.tol_d_rel);
        row.D = sel.D;
      } catch (const Error& err) {
        if (err.code() != Errc::EndpointDegeneracy) throw;
        row.degenerate = true;
      }
    }
    probe.rows.push_back(row);
  }
  return probe;
}

}  // namespace

ContrastScanResult scan_contrast(double alpha, const std::vector<double>& kappa_grid,
                                 const std::vector<int>& modes, const Numerics& numerics,
                                 int jobs) {
  if (kappa_grid.empty() || !std::is_sorted(kappa_grid.begin(), kappa_grid.end())) {
    fail(Errc::ConfigValidationError, "kappa grid must be ascending");
  }
  if (kappa_grid.back() >= 0.0) {
    fail(Errc::ConfigValidationError, "kappa grid must be strictly negative");
  }
  ContrastScanResult result;
  result.alpha = alpha;

  // Independent kappa points evaluated by a small worker pool; results land
  // in input order.
  std::vector<KappaProbe> probes(kappa_grid.size());
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(kappa_grid.size())));
  if (workers == 1) {
    for (size_t i = 0; i < kappa_grid.size(); ++i) {
      probes[i] = probe_kappa(alpha, kappa_grid[i], modes, numerics);
    }
  } else {
    std::atomic<size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&] {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= kappa_grid.size()) return;
        try {
          probes[i] = probe_kappa(alpha, kappa_grid[i], modes, numerics);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  for (const auto& probe : probes) {
    for (const auto& row : probe.rows) {
      result.rows.push_back(row);
      if (row.degenerate) {
        result.warnings.push_back(
            {Errc::EndpointDegeneracy, "D ~ 0 at kappa = " + std::to_string(row.kappa)});
      }
    }
  }

  // Bisect every existence flip between adjacent grid points down to the
  // configured width; report D from the surviving side.
  for (size_t i = 0; i + 1 < kappa_grid.size(); ++i) {
    const bool left = probes[i].any_pair;
    const bool right = probes[i + 1].any_pair;
    if (left == right) continue;
    double k_in = left ? kappa_grid[i] : kappa_grid[i + 1];
    double k_out = left ? kappa_grid[i + 1] : kappa_grid[i];
    while (std::abs(k_in - k_out) > numerics.bisect_width) {
      const double mid = 0.5 * (k_in + k_out);
      if (probe_kappa(alpha, mid, modes, numerics).any_pair) {
        k_in = mid;
      } else {
        k_out = mid;
      }
    }
    ContrastEndpoint ep;
    ep.kappa_inside = k_in;
    ep.kappa_outside = k_out;
    const KappaProbe edge = probe_kappa(alpha, k_in, modes, numerics);
    for (const auto& row : edge.rows) {
      if (row.exists) {
        ep.endpoint_D = row.D;
        break;
      }
    }
    result.endpoints.push_back(ep);
  }
  return result;
}

}  // namespace conetrap
