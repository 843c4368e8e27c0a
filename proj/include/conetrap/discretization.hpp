#pragma once

#include <Eigen/Dense>
#include <array>
#include <iosfwd>
#include <vector>

#include "conetrap/model.hpp"

namespace conetrap {

// 1D mesh of the latitude interval [-pi/2, pi/2] with a node placed exactly
// on the cap boundary; elements are labeled by the region they lie in.
struct LatitudeMesh {
  std::vector<double> nodes;           // ascending, nodes.front() = -pi/2
  int interface_index = -1;            // node index sitting at phi_interface
  std::vector<Region> element_region;  // size nodes.size() - 1
};

LatitudeMesh build_latitude_mesh(const TipGeometry& geometry, int n_elements);

// Labeled triangulation of the unit sphere. The interface polyline is
// resolved exactly: every triangle lies entirely in the closed region of its
// label, and interface_edges lists the edges on the boundary circle.
struct SphereMesh {
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Region> tri_region;  // size triangles.size()
  std::vector<std::array<int, 2>> interface_edges;
};

SphereMesh build_sphere_mesh(const TipGeometry& geometry, int refinement);

// ASCII exchange format: header "SPHEREMESH 1", then "v x y z" per vertex
// and "t i j k L" per triangle with 0-based indices and L in {0,1}, 0 = Minus.
SphereMesh read_sphere_mesh(std::istream& in);
void write_sphere_mesh(const SphereMesh& mesh, std::ostream& out);

int euler_characteristic(const SphereMesh& mesh);
double region_area(const SphereMesh& mesh, Region region);  // flat-triangle area

enum class ElementOrder { P1, P2 };

// The discrete pencil A x = mu B x of the weighted spherical eigenproblem.
// A is the eps-weighted stiffness form, B the eps-weighted mass form; both
// are complex symmetric (real symmetric at delta = 0).
struct WeightedPencil {
  enum class Kind { Axisym, FullSphere };
  Eigen::MatrixXcd A, B;
  Kind kind = Kind::Axisym;
  int mode_m = 0;                     // Axisym only
  ElementOrder order = ElementOrder::P2;
  bool pole_dirichlet = false;        // Axisym, m >= 1: endpoint dofs removed
  LatitudeMesh lat_mesh;              // populated for Axisym
  SphereMesh sph_mesh;                // populated for FullSphere
};

// Per-region complex weights; the material assemblies are the special case
// w_region = material.eps(region). Unit or indicator weights give the plain
// and region-restricted stiffness/mass forms used by slope and flux checks.
struct RegionWeights {
  Complex minus{1.0, 0.0};
  Complex plus{1.0, 0.0};
  Complex at(Region r) const { return r == Region::Minus ? minus : plus; }
};

WeightedPencil assemble_axisym(const LatitudeMesh& mesh, const Material& material,
                               AzimuthalMode mode, ElementOrder order = ElementOrder::P2);
WeightedPencil assemble_axisym_weights(const LatitudeMesh& mesh, const RegionWeights& weights,
                                       AzimuthalMode mode, ElementOrder order = ElementOrder::P2);

WeightedPencil assemble_sphere(const SphereMesh& mesh, const Material& material);
WeightedPencil assemble_sphere_weights(const SphereMesh& mesh, const RegionWeights& weights);

// Number of scalar dofs of the discretization before any pole elimination.
int axisym_dof_count(const LatitudeMesh& mesh, ElementOrder order);

// Evaluate the axisym FEM interpolant (and d/dphi) from a full-length dof
// vector at latitude phi.
void eval_axisym_basis(const LatitudeMesh& mesh, ElementOrder order,
                       const Eigen::VectorXd& coeffs, double phi, double& value,
                       double& dvalue);

// Evaluate the P1 interpolant of per-vertex values at a unit-sphere point.
double eval_sphere_p1(const SphereMesh& mesh, const Eigen::VectorXd& vertex_values,
                      const std::array<double, 3>& point);

// Variant also returning the tangential surface gradient in ambient
// coordinates (central-projection extension, homogeneous of degree zero).
double eval_sphere_p1(const SphereMesh& mesh, const Eigen::VectorXd& vertex_values,
                      const std::array<double, 3>& point, std::array<double, 3>* surface_grad);

// Dominant azimuthal order of a per-vertex eigenvector sampled on a
// latitude/longitude grid (power spectrum of the interpolant in theta).
// Returns (argmax m in [0, m_probe], power fraction of that m).
std::pair<int, double> dominant_azimuthal_order(const SphereMesh& mesh,
                                                const Eigen::VectorXcd& vertex_values,
                                                int m_probe = 8);

// Batch variant sharing one grid-point location cache across all vectors.
std::vector<std::pair<int, double>> dominant_azimuthal_orders(
    const SphereMesh& mesh, const std::vector<Eigen::VectorXcd>& vertex_values,
    int m_probe = 8);

}  // namespace conetrap
