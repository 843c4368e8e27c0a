#include <cmath>
#include <functional>

#include "conetrap/flux.hpp"

namespace conetrap {

namespace {

// 6-point Gauss-Legendre rule on [-1, 1].
constexpr double kG6X[6] = {-0.9324695142031521, -0.6612093864662645, -0.2386191860831969,
                            0.2386191860831969,  0.6612093864662645,  0.9324695142031521};
constexpr double kG6W[6] = {0.1713244923791704, 0.3607615730481386, 0.4679139345726910,
                            0.4679139345726910, 0.3607615730481386, 0.1713244923791704};

constexpr int kThetaSamples = 64;  // trapezoid rule on the periodic longitude

// Value and angular derivatives of the eigenfunction interpolant at a
// surface point. d_theta_over_cos already includes the 1/cos(phi) factor of
// the orthonormal east component.
struct AngularSample {
  double value = 0.0;
  double d_phi = 0.0;
  double d_theta_over_cos = 0.0;
};

AngularSample eval_angular(const FieldOnSphere& field, double theta, double phi) {
  AngularSample out;
  if (field.kind == WeightedPencil::Kind::Axisym) {
    double f = 0.0, fp = 0.0;
    eval_axisym_basis(field.lat, field.order, field.coeffs, phi, f, fp);
    const int m = field.mode_m;
    const double c = std::cos(m * theta);
    const double s = std::sin(m * theta);
    out.value = c * f;
    out.d_phi = c * fp;
    const double cosphi = std::cos(phi);
    if (m == 0) {
      out.d_theta_over_cos = 0.0;
    } else if (std::abs(cosphi) < 1e-13) {
      // Pole-vanishing modes: f(+-pi/2) = 0, so the east component limit is
      // finite; the interpolant pins it to zero exactly at the poles.
      out.d_theta_over_cos = 0.0;
    } else {
      out.d_theta_over_cos = -m * s * f / cosphi;
    }
  } else {
    const std::array<double, 3> p = {std::cos(phi) * std::cos(theta),
                                     std::cos(phi) * std::sin(theta), std::sin(phi)};
    std::array<double, 3> g;
    out.value = eval_sphere_p1(field.sph, field.coeffs, p, &g);
    const double st = std::sin(theta), ct = std::cos(theta);
    const double sp = std::sin(phi), cp = std::cos(phi);
    // East and north unit vectors; the surface gradient is already tangent.
    out.d_theta_over_cos = -st * g[0] + ct * g[1];
    out.d_phi = -sp * ct * g[0] - sp * st * g[1] + cp * g[2];
  }
  return out;
}

Region region_at(const SingularExponent& exponent, double phi) {
  return phi < exponent.phi_interface ? Region::Plus : Region::Minus;
}

// Composite Gauss quadrature of a complex integrand with panel doubling
// until two successive refinements agree.
Complex adaptive_radial(const std::function<Complex(double)>& f, double a, double b) {
  Complex prev = 0.0;
  bool have_prev = false;
  for (int panels = 4; panels <= 1024; panels *= 2) {
    Complex total = 0.0;
    const double h = (b - a) / panels;
    for (int k = 0; k < panels; ++k) {
      const double mid = a + (k + 0.5) * h;
      for (int q = 0; q < 6; ++q) {
        total += 0.5 * h * kG6W[q] * f(mid + 0.5 * h * kG6X[q]);
      }
    }
    if (have_prev && std::abs(total - prev) <= 1e-12 * (1.0 + std::abs(total))) {
      return total;
    }
    prev = total;
    have_prev = true;
  }
  fail(Errc::QuadratureNotConverged, "radial cutoff quadrature did not stabilize");
}

// Radial factor int_{r_one}^{rho} [2a chi' chi + r chi chi'' + 2 chi chi'] dr
// of the separated volume integral, for radial exponent power a.
Complex radial_factor(const CutoffProfile& cutoff, Complex a) {
  return adaptive_radial(
      [&](double r) -> Complex {
        const CutoffValue cv = eval_cutoff(cutoff, r);
        return 2.0 * a * cv.chi_prime * cv.chi + r * cv.chi * cv.chi_double_prime +
               2.0 * cv.chi * cv.chi_prime;
      },
      cutoff.r_one, cutoff.rho);
}

}  // namespace

SingularFieldSample eval_singular_function(const SingularExponent& exponent,
                                           const CutoffProfile& cutoff, double r, double theta,
                                           double phi, SingSign sign) {
  if (!std::isfinite(r) || !std::isfinite(theta) || !std::isfinite(phi) || r <= 0.0 ||
      std::abs(phi) > M_PI / 2.0 + 1e-12) {
    fail(Errc::PointOutsideChart, "need r > 0 and |phi| <= pi/2");
  }
  const double eta_s = exponent.signed_eta();
  const Complex p(-0.5, sign == SingSign::Plus ? eta_s : -eta_s);
  const CutoffValue cv = eval_cutoff(cutoff, r);

  SingularFieldSample out;
  out.r = r;
  out.theta = theta;
  out.phi = phi;
  if (cv.chi == 0.0 && cv.chi_prime == 0.0 && cv.chi_double_prime == 0.0) {
    return out;  // outside the support; value and gradient vanish
  }
  const AngularSample ang = eval_angular(exponent.field, theta, phi);
  const Complex r_p = std::pow(Complex(r, 0.0), p);
  const Complex r_pm1 = r_p / r;
  out.value = cv.chi * r_p * ang.value;
  out.d_r = (cv.chi_prime * r_p + p * cv.chi * r_pm1) * ang.value;
  out.d_phi = cv.chi * r_pm1 * ang.d_phi;
  out.d_theta = cv.chi * r_pm1 * ang.d_theta_over_cos;
  return out;
}

Complex surface_flux(const SingularExponent& exponent, double tau, const CutoffProfile& cutoff) {
  if (!(tau > 0.0) || tau > cutoff.r_one) {
    fail(Errc::TauOutsidePlateau, "need 0 < tau <= r_one");
  }
  const double dtheta = 2.0 * M_PI / kThetaSamples;

  // Latitude panels: the element intervals of the originating mesh (axisym),
  // or a uniform split fine enough for the P1 sphere interpolant.
  std::vector<double> breaks;
  if (exponent.field.kind == WeightedPencil::Kind::Axisym) {
    breaks = exponent.field.lat.nodes;
  } else {
    const int panels = 256;
    breaks.reserve(panels + 1);
    for (int k = 0; k <= panels; ++k) {
      breaks.push_back(-M_PI / 2.0 + M_PI * k / panels);
    }
  }

  Complex flux = 0.0;
  for (size_t e = 0; e + 1 < breaks.size(); ++e) {
    const double a = breaks[e], b = breaks[e + 1];
    for (int q = 0; q < 6; ++q) {
      const double phi = 0.5 * (a + b) + 0.5 * (b - a) * kG6X[q];
      const double wphi = 0.5 * (b - a) * kG6W[q];
      const Complex eps = exponent.material.eps(region_at(exponent, phi));
      Complex ring = 0.0;
      for (int i = 0; i < kThetaSamples; ++i) {
        const SingularFieldSample s =
            eval_singular_function(exponent, cutoff, tau, i * dtheta, phi, SingSign::Plus);
        ring += s.value * std::conj(s.d_r);
      }
      flux += eps * ring * dtheta * wphi * std::cos(phi) * tau * tau;
    }
  }
  return flux;
}

Complex volume_flux_integral(const SingularExponent& exponent, const CutoffProfile& cutoff) {
  const Complex lambda_bar = std::conj(exponent.lambda_out());
  return exponent.D * radial_factor(cutoff, lambda_bar);
}

Complex coefficient_denominator(const SingularExponent& exponent, const CutoffProfile& cutoff,
                                double tol_d) {
  if (std::abs(exponent.D) < tol_d) {
    fail(Errc::EndpointDegeneracy, "denominator guarantee needs |D| above threshold");
  }
  return exponent.D * radial_factor(cutoff, exponent.lambda_out());
}

}  // namespace conetrap
