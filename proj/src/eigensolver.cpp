#include <algorithm>
#include <cmath>

#include <lapacke.h>

#include "conetrap/eigensolver.hpp"

namespace conetrap {

std::pair<Complex, Complex> mu_to_lambda(Complex mu) {
  Complex root = std::sqrt(0.25 + mu);
  if (root.real() < 0.0 || (root.real() == 0.0 && root.imag() < 0.0)) {
    root = -root;  // normalize the branch representative
  }
  return {Complex(-0.5, 0.0) - root, Complex(-0.5, 0.0) + root};
}

namespace {

bool is_real_pencil(const WeightedPencil& p) {
  return p.A.imag().cwiseAbs().maxCoeff() == 0.0 && p.B.imag().cwiseAbs().maxCoeff() == 0.0;
}

// Eigenvalues+vectors of a general complex matrix via LAPACK (Hessenberg
// reduction followed by shifted QR).
void eig_dense_complex(Eigen::MatrixXcd C, Eigen::VectorXcd& values, Eigen::MatrixXcd& vectors) {
  const lapack_int n = static_cast<lapack_int>(C.rows());
  values.resize(n);
  vectors.resize(n, n);
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', 'V', n, reinterpret_cast<lapack_complex_double*>(C.data()), n,
      reinterpret_cast<lapack_complex_double*>(values.data()), nullptr, 1,
      reinterpret_cast<lapack_complex_double*>(vectors.data()), n);
  if (info != 0) fail(Errc::NoConvergence, "zgeev info=" + std::to_string(info));
}

// Real path: dgeev on a real matrix, complex pairs reassembled from the
// packed real representation.
void eig_dense_real(Eigen::MatrixXd C, Eigen::VectorXcd& values, Eigen::MatrixXcd& vectors) {
  const lapack_int n = static_cast<lapack_int>(C.rows());
  Eigen::VectorXd wr(n), wi(n);
  Eigen::MatrixXd vr(n, n);
  const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'V', n, C.data(), n, wr.data(),
                                        wi.data(), nullptr, 1, vr.data(), n);
  if (info != 0) fail(Errc::NoConvergence, "dgeev info=" + std::to_string(info));
  values.resize(n);
  vectors.resize(n, n);
  for (lapack_int j = 0; j < n; ++j) {
    values[j] = Complex(wr[j], wi[j]);
    if (wi[j] == 0.0) {
      vectors.col(j) = vr.col(j).cast<Complex>();
    } else if (wi[j] > 0.0) {
      vectors.col(j) = vr.col(j).cast<Complex>() + Complex(0, 1) * vr.col(j + 1).cast<Complex>();
    } else {
      vectors.col(j) =
          vr.col(j - 1).cast<Complex>() - Complex(0, 1) * vr.col(j).cast<Complex>();
    }
  }
}

}  // namespace

std::vector<EigenSolution> solve_gevp(const WeightedPencil& pencil, double tol) {
  const Eigen::MatrixXcd& A = pencil.A;
  const Eigen::MatrixXcd& B = pencil.B;
  const auto n = A.rows();
  if (n == 0 || A.cols() != n || B.rows() != n || B.cols() != n) {
    fail(Errc::ConfigValidationError, "pencil matrices must be square and matching");
  }

  // Reduce to the standard problem C = B^{-1} A via pivoted LU, guarding the
  // reduction with a condition estimate.
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(B);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-12)) {
    fail(Errc::MassMatrixSingular,
         "mass matrix condition estimate " + std::to_string(1.0 / std::max(rcond, 1e-300)) +
             " exceeds 1e12");
  }

  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;
  if (is_real_pencil(pencil)) {
    const Eigen::MatrixXd Ar = A.real();
    const Eigen::MatrixXd Br = B.real();
    Eigen::PartialPivLU<Eigen::MatrixXd> lur(Br);
    eig_dense_real(lur.solve(Ar), values, vectors);
  } else {
    eig_dense_complex(lu.solve(A), values, vectors);
  }

  const double normA = A.norm();
  const double normB = B.norm();

  std::vector<EigenSolution> out(static_cast<size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    EigenSolution& s = out[static_cast<size_t>(j)];
    s.mu = values[j];
    s.vector = vectors.col(j).normalized();
    auto residual = [&](const Eigen::VectorXcd& v) {
      return (A * v - s.mu * (B * v)).norm() / (normA + std::abs(s.mu) * normB);
    };
    s.residual = residual(s.vector);
    // Inverse-iteration refinement on the original pencil: solve
    // (A - mu B) w = B v and renormalize. The slightly perturbed shift keeps
    // the factorization usable at an exact eigenvalue.
    for (int pass = 0; pass < 3 && s.residual > tol; ++pass) {
      const double scale = std::abs(s.mu) + 1.0;
      const Complex shift = s.mu + Complex(0.0, 1e-14 * scale);
      Eigen::PartialPivLU<Eigen::MatrixXcd> slu(A - shift * B);
      Eigen::VectorXcd w = slu.solve(B * s.vector);
      const double wn = w.norm();
      if (!(wn > 0.0) || !std::isfinite(wn)) break;
      w /= wn;
      const double r = residual(w);
      if (r < s.residual) {
        s.vector = std::move(w);
        s.residual = r;
      } else {
        break;
      }
    }
    std::tie(s.lambda_minus, s.lambda_plus) = mu_to_lambda(s.mu);
  }

  std::sort(out.begin(), out.end(), [](const EigenSolution& a, const EigenSolution& b) {
    if (a.mu.real() != b.mu.real()) return a.mu.real() < b.mu.real();
    return a.mu.imag() < b.mu.imag();
  });
  return out;
}

}  // namespace conetrap
