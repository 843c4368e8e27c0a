#pragma once

#include "conetrap/singularity.hpp"

namespace conetrap {

// Which of the two singular radial exponents is meant: Plus is the outgoing
// one, lambda = -1/2 + i*signed_eta; Minus conjugates the radial exponent.
enum class SingSign { Plus, Minus };

// Pointwise sample of the cutoff singular function s(r, theta, phi) =
// chi(r) r^lambda Phi(theta, phi) and its gradient in the orthonormal
// spherical frame (radial, east, north): d_theta is the (1/(r cos phi))
// d/d theta component, d_phi the (1/r) d/d phi component.
struct SingularFieldSample {
  double r = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  Complex value;
  Complex d_r;
  Complex d_theta;
  Complex d_phi;
};

// Evaluate the singular function by the product rule over chi(r), the power
// r^lambda, and the FEM interpolant Phi of the exponent's eigenfunction.
// theta is longitude (periodic), phi latitude in [-pi/2, pi/2].
SingularFieldSample eval_singular_function(const SingularExponent& exponent,
                                           const CutoffProfile& cutoff, double r, double theta,
                                           double phi, SingSign sign = SingSign::Plus);

// Energy flux through the sphere of radius tau (inside the chi == 1 plateau,
// 0 < tau <= r_one): integral of eps * conj(d_r s) * s over the sphere,
// computed by angular sampling quadrature. Analytically -(1/2 + i eta) * D.
Complex surface_flux(const SingularExponent& exponent, double tau,
                     const CutoffProfile& cutoff = CutoffProfile{});

// Volume integral of div(eps grad conj(s)) * s over the ball of radius rho,
// by exact angular/radial separation: D times the radial factor
// int [2 conj(lambda) chi' chi + r chi chi'' + 2 chi chi'] dr over
// [r_one, rho]. Its imaginary part equals eta * D.
Complex volume_flux_integral(const SingularExponent& exponent, const CutoffProfile& cutoff);

// Volume integral of div(eps grad s) * conj(s): the denominator of the
// singularity-coefficient extraction formula; equals the conjugate of
// volume_flux_integral and has nonzero imaginary part whenever |D| > tol_d.
Complex coefficient_denominator(const SingularExponent& exponent, const CutoffProfile& cutoff,
                                double tol_d = 1e-10);

}  // namespace conetrap
