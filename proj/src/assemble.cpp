#include <cmath>

#include "conetrap/discretization.hpp"

namespace conetrap {

namespace {

// 4-point Gauss-Legendre on [-1, 1]; nodes are interior, so the 1/cos(phi)
// azimuthal term is never evaluated at a pole.
constexpr std::array<double, 4> kGaussX = {-0.8611363115940526, -0.3399810435848563,
                                           0.3399810435848563, 0.8611363115940526};
constexpr std::array<double, 4> kGaussW = {0.3478548451374538, 0.6521451548625461,
                                           0.6521451548625461, 0.3478548451374538};

void shape_p1(double x, std::array<double, 3>& N, std::array<double, 3>& dN, int& n_shape) {
  N = {(1.0 - x) / 2.0, (1.0 + x) / 2.0, 0.0};
  dN = {-0.5, 0.5, 0.0};
  n_shape = 2;
}

void shape_p2(double x, std::array<double, 3>& N, std::array<double, 3>& dN, int& n_shape) {
  N = {x * (x - 1.0) / 2.0, 1.0 - x * x, x * (x + 1.0) / 2.0};
  dN = {x - 0.5, -2.0 * x, x + 0.5};
  n_shape = 3;
}

}  // namespace

WeightedPencil assemble_axisym_weights(const LatitudeMesh& mesh, const RegionWeights& weights,
                                       AzimuthalMode mode, ElementOrder order) {
  const int m = mode.m;
  if (m < 0) fail(Errc::ConfigValidationError, "azimuthal order must be >= 0");
  const int n_elem = static_cast<int>(mesh.nodes.size()) - 1;
  const int ndof = axisym_dof_count(mesh, order);

  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(ndof, ndof);
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(ndof, ndof);

  std::array<double, 3> N{}, dN{};
  int n_shape = 0;
  for (int e = 0; e < n_elem; ++e) {
    const double a = mesh.nodes[static_cast<size_t>(e)];
    const double b = mesh.nodes[static_cast<size_t>(e) + 1];
    const double h = b - a;
    const Complex w_eps = weights.at(mesh.element_region[static_cast<size_t>(e)]);
    std::array<int, 3> dofs{};
    if (order == ElementOrder::P1) {
      dofs = {e, e + 1, 0};
    } else {
      dofs = {2 * e, 2 * e + 1, 2 * e + 2};
    }
    for (int q = 0; q < 4; ++q) {
      const double x = kGaussX[static_cast<size_t>(q)];
      const double wq = kGaussW[static_cast<size_t>(q)] * h / 2.0;
      const double phi = a + h * (x + 1.0) / 2.0;
      const double c = std::cos(phi);
      if (c <= 0.0) fail(Errc::PoleQuadratureFailure, "quadrature node reached a pole");
      if (order == ElementOrder::P1) {
        shape_p1(x, N, dN, n_shape);
      } else {
        shape_p2(x, N, dN, n_shape);
      }
      const double jac = 2.0 / h;  // d/dphi = jac * d/dx
      for (int i = 0; i < n_shape; ++i) {
        for (int j = 0; j < n_shape; ++j) {
          const double stiff = dN[static_cast<size_t>(i)] * jac * dN[static_cast<size_t>(j)] *
                               jac * c;
          const double azim = (m > 0)
                                  ? (static_cast<double>(m) * m / c) *
                                        N[static_cast<size_t>(i)] * N[static_cast<size_t>(j)]
                                  : 0.0;
          const double mass = N[static_cast<size_t>(i)] * N[static_cast<size_t>(j)] * c;
          A(dofs[static_cast<size_t>(i)], dofs[static_cast<size_t>(j)]) +=
              w_eps * wq * (stiff + azim);
          B(dofs[static_cast<size_t>(i)], dofs[static_cast<size_t>(j)]) += w_eps * wq * mass;
        }
      }
    }
  }

  WeightedPencil pencil;
  pencil.kind = WeightedPencil::Kind::Axisym;
  pencil.mode_m = m;
  pencil.order = order;
  pencil.lat_mesh = mesh;
  if (m >= 1) {
    // Essential pole conditions f(+-pi/2) = 0: drop the endpoint dofs.
    pencil.pole_dirichlet = true;
    pencil.A = A.block(1, 1, ndof - 2, ndof - 2);
    pencil.B = B.block(1, 1, ndof - 2, ndof - 2);
  } else {
    pencil.A = std::move(A);
    pencil.B = std::move(B);
  }
  return pencil;
}

WeightedPencil assemble_axisym(const LatitudeMesh& mesh, const Material& material,
                               AzimuthalMode mode, ElementOrder order) {
  RegionWeights w;
  w.minus = material.eps(Region::Minus);
  w.plus = material.eps(Region::Plus);
  return assemble_axisym_weights(mesh, w, mode, order);
}

WeightedPencil assemble_sphere_weights(const SphereMesh& mesh, const RegionWeights& weights) {
  const int nv = static_cast<int>(mesh.vertices.size());
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(nv, nv);
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(nv, nv);

  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Eigen::Vector3d p0(mesh.vertices[static_cast<size_t>(tri[0])].data());
    const Eigen::Vector3d p1(mesh.vertices[static_cast<size_t>(tri[1])].data());
    const Eigen::Vector3d p2(mesh.vertices[static_cast<size_t>(tri[2])].data());
    const Eigen::Vector3d n = (p1 - p0).cross(p2 - p0);
    const double area2 = n.norm();
    const double area = area2 / 2.0;
    if (area < 1e-14) fail(Errc::DegenerateTriangle, "triangle " + std::to_string(t));
    const Eigen::Vector3d nhat = n / area2;
    // In-plane P1 gradients: grad lambda_0 = nhat x (p2 - p1) / (2 area),
    // cyclically; sign fixed by lambda_0(p0) = 1.
    std::array<Eigen::Vector3d, 3> grad = {nhat.cross(p2 - p1) / area2,
                                           nhat.cross(p0 - p2) / area2,
                                           nhat.cross(p1 - p0) / area2};
    if (std::abs(grad[0].dot(p0 - p1) - 1.0) > 1e-6) {
      for (auto& g : grad) g = -g;
    }
    const Complex w_eps = weights.at(mesh.tri_region[t]);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        A(tri[static_cast<size_t>(i)], tri[static_cast<size_t>(j)]) +=
            w_eps * area * grad[static_cast<size_t>(i)].dot(grad[static_cast<size_t>(j)]);
        // Exact P1 consistent mass on the flat triangle.
        B(tri[static_cast<size_t>(i)], tri[static_cast<size_t>(j)]) +=
            w_eps * area * ((i == j ? 2.0 : 1.0) / 12.0);
      }
    }
  }

  WeightedPencil pencil;
  pencil.kind = WeightedPencil::Kind::FullSphere;
  pencil.mode_m = -1;
  pencil.order = ElementOrder::P1;
  pencil.sph_mesh = mesh;
  pencil.A = std::move(A);
  pencil.B = std::move(B);
  return pencil;
}

WeightedPencil assemble_sphere(const SphereMesh& mesh, const Material& material) {
  RegionWeights w;
  w.minus = material.eps(Region::Minus);
  w.plus = material.eps(Region::Plus);
  return assemble_sphere_weights(mesh, w);
}

void eval_axisym_basis(const LatitudeMesh& mesh, ElementOrder order,
                       const Eigen::VectorXd& coeffs, double phi, double& value,
                       double& dvalue) {
  const int n_elem = static_cast<int>(mesh.nodes.size()) - 1;
  if (phi < mesh.nodes.front() - 1e-12 || phi > mesh.nodes.back() + 1e-12) {
    fail(Errc::PointOutsideChart, "latitude outside [-pi/2, pi/2]");
  }
  // Binary search for the containing element.
  int lo = 0, hi = n_elem - 1;
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (phi <= mesh.nodes[static_cast<size_t>(mid) + 1]) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  const int e = lo;
  const double a = mesh.nodes[static_cast<size_t>(e)];
  const double b = mesh.nodes[static_cast<size_t>(e) + 1];
  const double h = b - a;
  const double x = 2.0 * (phi - a) / h - 1.0;
  std::array<double, 3> N{}, dN{};
  int n_shape = 0;
  std::array<int, 3> dofs{};
  if (order == ElementOrder::P1) {
    shape_p1(x, N, dN, n_shape);
    dofs = {e, e + 1, 0};
  } else {
    shape_p2(x, N, dN, n_shape);
    dofs = {2 * e, 2 * e + 1, 2 * e + 2};
  }
  value = 0.0;
  dvalue = 0.0;
  for (int i = 0; i < n_shape; ++i) {
    value += N[static_cast<size_t>(i)] * coeffs[dofs[static_cast<size_t>(i)]];
    dvalue += dN[static_cast<size_t>(i)] * (2.0 / h) * coeffs[dofs[static_cast<size_t>(i)]];
  }
}

}  // namespace conetrap
