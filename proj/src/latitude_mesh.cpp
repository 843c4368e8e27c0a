#include <algorithm>
#include <cmath>

#include "conetrap/discretization.hpp"

namespace conetrap {

LatitudeMesh build_latitude_mesh(const TipGeometry& geometry, int n_elements) {
  if (geometry.kind != GeometryKind::CircularCap) {
    fail(Errc::GeometryKindMismatch, "latitude meshes exist only for circular caps");
  }
  if (n_elements < 4) {
    fail(Errc::ConfigValidationError, "need at least 4 latitude elements");
  }
  const double lo = -M_PI / 2.0, hi = M_PI / 2.0;
  const double phi_int = geometry.phi_interface;

  // Split the target element count proportionally between the two sides so
  // the interface latitude is exactly a node and elements stay quasi-uniform.
  const double frac = (phi_int - lo) / (hi - lo);
  int k = static_cast<int>(std::lround(n_elements * frac));
  k = std::clamp(k, 1, n_elements - 1);

  LatitudeMesh mesh;
  mesh.nodes.reserve(static_cast<size_t>(n_elements) + 1);
  for (int i = 0; i <= k; ++i) {
    mesh.nodes.push_back(lo + (phi_int - lo) * static_cast<double>(i) / k);
  }
  mesh.nodes[static_cast<size_t>(k)] = phi_int;  // exact, no roundoff drift
  const int rest = n_elements - k;
  for (int i = 1; i <= rest; ++i) {
    mesh.nodes.push_back(phi_int + (hi - phi_int) * static_cast<double>(i) / rest);
  }
  mesh.nodes.back() = hi;
  mesh.interface_index = k;

  mesh.element_region.resize(static_cast<size_t>(n_elements));
  for (int e = 0; e < n_elements; ++e) {
    // The cap of half-angle alpha around the south pole (phi < phi_interface)
    // carries the positive permittivity; the complement is the metal side.
    mesh.element_region[static_cast<size_t>(e)] =
        (e < k) ? Region::Plus : Region::Minus;
  }
  return mesh;
}

int axisym_dof_count(const LatitudeMesh& mesh, ElementOrder order) {
  const int n = static_cast<int>(mesh.nodes.size()) - 1;
  return order == ElementOrder::P1 ? n + 1 : 2 * n + 1;
}

}  // namespace conetrap
