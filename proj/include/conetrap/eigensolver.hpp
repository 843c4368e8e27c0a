#pragma once

#include <utility>
#include <vector>

#include "conetrap/discretization.hpp"

namespace conetrap {

// One generalized eigenpair of A x = mu B x together with the two roots of
// lambda (lambda + 1) = mu.
struct EigenSolution {
  Complex mu;
  Complex lambda_minus;  // -1/2 - sqrt(1/4 + mu)
  Complex lambda_plus;   // -1/2 + sqrt(1/4 + mu), principal branch
  Eigen::VectorXcd vector;
  double residual = 0.0;  // ||A v - mu B v|| / (||A|| + |mu| ||B||)
};

// lambda_minus, lambda_plus with the principal square root: the sqrt term of
// lambda_plus has nonnegative real part.
std::pair<Complex, Complex> mu_to_lambda(Complex mu);

// All eigenpairs of the dense pencil, canonically ordered by (Re mu, Im mu).
// Reduction: pivoted LU of B (condition guard), Hessenberg + shifted-QR on
// B^{-1} A, then inverse-iteration refinement of each pair on the original
// pencil until the stored residual bound holds.
std::vector<EigenSolution> solve_gevp(const WeightedPencil& pencil, double tol = 1e-10);

}  // namespace conetrap
