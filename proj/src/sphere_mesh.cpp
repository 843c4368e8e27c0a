#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "conetrap/discretization.hpp"

namespace conetrap {

namespace {

using Vec3 = std::array<double, 3>;

inline Vec3 normalized(const Vec3& v) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  return {v[0] / n, v[1] / n, v[2] / n};
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline double norm(const Vec3& v) {
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

inline Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * norm(cross(sub(b, a), sub(c, a)));
}

void make_icosahedron(std::vector<Vec3>& vertices, std::vector<std::array<int, 3>>& triangles) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  const std::array<Vec3, 12> raw = {{{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                                     {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                                     {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}}};
  vertices.clear();
  for (const auto& v : raw) vertices.push_back(normalized(v));
  triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
               {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
               {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
               {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
}

void subdivide(std::vector<Vec3>& vertices, std::vector<std::array<int, 3>>& triangles) {
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int i, int j) {
    const auto key = std::minmax(i, j);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const Vec3& a = vertices[static_cast<size_t>(i)];
    const Vec3& b = vertices[static_cast<size_t>(j)];
    vertices.push_back(normalized({a[0] + b[0], a[1] + b[1], a[2] + b[2]}));
    const int idx = static_cast<int>(vertices.size()) - 1;
    midpoint.emplace(key, idx);
    return idx;
  };
  std::vector<std::array<int, 3>> next;
  next.reserve(triangles.size() * 4);
  for (const auto& tri : triangles) {
    const int a = tri[0], b = tri[1], c = tri[2];
    const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
    next.push_back({a, ab, ca});
    next.push_back({ab, b, bc});
    next.push_back({ca, bc, c});
    next.push_back({ab, bc, ca});
  }
  triangles = std::move(next);
}

// Moves vertices of interface-straddling edges onto the boundary circle of
// latitude phi_int: for each straddling edge the endpoint nearer the circle
// is pulled along its meridian onto it. Repeats until no edge straddles.
void snap_interface(std::vector<Vec3>& vertices, const std::vector<std::array<int, 3>>& triangles,
                    double phi_int) {
  const double z_int = std::sin(phi_int);
  const double c_int = std::cos(phi_int);
  auto side = [&](const Vec3& v) -> int {
    if (std::abs(v[2] - z_int) <= 1e-12) return 0;
    return v[2] < z_int ? -1 : 1;
  };
  std::set<std::pair<int, int>> edges;
  for (const auto& tri : triangles) {
    for (int e = 0; e < 3; ++e) {
      edges.insert(std::minmax(tri[e], tri[(e + 1) % 3]));
    }
  }
  bool changed = true;
  int guard = 0;
  while (changed) {
    changed = false;
    if (++guard > 64) fail(Errc::MeshFileInvalid, "interface snapping failed to terminate");
    for (const auto& [i, j] : edges) {
      const Vec3& a = vertices[static_cast<size_t>(i)];
      const Vec3& b = vertices[static_cast<size_t>(j)];
      if (side(a) * side(b) >= 0) continue;
      const int k = (std::abs(a[2] - z_int) <= std::abs(b[2] - z_int)) ? i : j;
      Vec3& v = vertices[static_cast<size_t>(k)];
      const double theta = std::atan2(v[1], v[0]);
      v = {std::cos(theta) * c_int, std::sin(theta) * c_int, z_int};
      changed = true;
    }
  }
}

}  // namespace

SphereMesh build_sphere_mesh(const TipGeometry& geometry, int refinement) {
  if (refinement < 0) fail(Errc::ConfigValidationError, "refinement must be >= 0");
  if (geometry.kind == GeometryKind::GeneralRegion) {
    std::ifstream in(geometry.mesh_path);
    if (!in) fail(Errc::MeshFileInvalid, "cannot open mesh file " + geometry.mesh_path);
    return read_sphere_mesh(in);
  }
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  make_icosahedron(vertices, triangles);
  for (int level = 0; level < refinement; ++level) subdivide(vertices, triangles);

  const double phi_int = geometry.phi_interface;
  snap_interface(vertices, triangles, phi_int);

  SphereMesh mesh;
  mesh.vertices = std::move(vertices);
  mesh.triangles = std::move(triangles);
  mesh.tri_region.resize(mesh.triangles.size());
  const double z_int = std::sin(phi_int);
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec3& a = mesh.vertices[static_cast<size_t>(tri[0])];
    const Vec3& b = mesh.vertices[static_cast<size_t>(tri[1])];
    const Vec3& c = mesh.vertices[static_cast<size_t>(tri[2])];
    if (triangle_area(a, b, c) < 1e-14) {
      fail(Errc::DegenerateTriangle, "triangle " + std::to_string(t) + " collapsed");
    }
    const double zc = (a[2] + b[2] + c[2]) / 3.0;
    // The cap below the interface latitude is the Plus region.
    mesh.tri_region[t] = (zc < z_int) ? Region::Plus : Region::Minus;
  }

  // Interface edges: both endpoints on the circle and shared by triangles of
  // different labels.
  std::map<std::pair<int, int>, std::vector<size_t>> edge_tris;
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int e = 0; e < 3; ++e) {
      edge_tris[std::minmax(tri[e], tri[(e + 1) % 3])].push_back(t);
    }
  }
  for (const auto& [edge, tris] : edge_tris) {
    if (tris.size() == 2 && mesh.tri_region[tris[0]] != mesh.tri_region[tris[1]]) {
      mesh.interface_edges.push_back({edge.first, edge.second});
    }
  }
  return mesh;
}

SphereMesh read_sphere_mesh(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(Errc::MeshFileInvalid, "empty mesh file");
  {
    std::istringstream head(line);
    std::string magic;
    int version = 0;
    head >> magic >> version;
    if (magic != "SPHEREMESH" || version != 1) {
      fail(Errc::MeshFileInvalid, "expected header 'SPHEREMESH 1', got '" + line + "'");
    }
  }
  SphereMesh mesh;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;  // blank line
    if (tag == "#") continue;
    if (tag == "v") {
      Vec3 v{};
      if (!(ls >> v[0] >> v[1] >> v[2])) {
        fail(Errc::MeshFileInvalid, "bad vertex at line " + std::to_string(lineno));
      }
      if (std::abs(norm(v) - 1.0) > 1e-12) {
        fail(Errc::MeshFileInvalid,
             "vertex at line " + std::to_string(lineno) + " is not on the unit sphere");
      }
      mesh.vertices.push_back(v);
    } else if (tag == "t") {
      std::array<int, 3> tri{};
      int label = -1;
      if (!(ls >> tri[0] >> tri[1] >> tri[2] >> label) || (label != 0 && label != 1)) {
        fail(Errc::MeshFileInvalid, "bad triangle at line " + std::to_string(lineno));
      }
      for (int idx : tri) {
        if (idx < 0 || idx >= static_cast<int>(mesh.vertices.size())) {
          fail(Errc::MeshFileInvalid,
               "triangle index out of range at line " + std::to_string(lineno));
        }
      }
      mesh.triangles.push_back(tri);
      mesh.tri_region.push_back(label == 0 ? Region::Minus : Region::Plus);
    } else {
      fail(Errc::MeshFileInvalid, "unknown record '" + tag + "' at line " + std::to_string(lineno));
    }
  }
  if (mesh.triangles.empty()) fail(Errc::MeshFileInvalid, "mesh has no triangles");
  bool has_minus = false, has_plus = false;
  for (auto r : mesh.tri_region) (r == Region::Minus ? has_minus : has_plus) = true;
  if (!has_minus || !has_plus) {
    fail(Errc::MeshFileInvalid, "mesh must contain both region labels");
  }
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    if (triangle_area(mesh.vertices[static_cast<size_t>(tri[0])],
                      mesh.vertices[static_cast<size_t>(tri[1])],
                      mesh.vertices[static_cast<size_t>(tri[2])]) < 1e-14) {
      fail(Errc::DegenerateTriangle, "triangle " + std::to_string(t) + " collapsed");
    }
  }
  std::map<std::pair<int, int>, std::vector<size_t>> edge_tris;
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int e = 0; e < 3; ++e) {
      edge_tris[std::minmax(tri[e], tri[(e + 1) % 3])].push_back(t);
    }
  }
  for (const auto& [edge, tris] : edge_tris) {
    if (tris.size() == 2 && mesh.tri_region[tris[0]] != mesh.tri_region[tris[1]]) {
      mesh.interface_edges.push_back({edge.first, edge.second});
    }
  }
  return mesh;
}

void write_sphere_mesh(const SphereMesh& mesh, std::ostream& out) {
  out << "SPHEREMESH 1\n";
  out.precision(17);
  for (const auto& v : mesh.vertices) {
    out << "v " << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  }
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    out << "t " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << ' '
        << (mesh.tri_region[t] == Region::Minus ? 0 : 1) << '\n';
  }
}

int euler_characteristic(const SphereMesh& mesh) {
  std::set<std::pair<int, int>> edges;
  for (const auto& tri : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      edges.insert(std::minmax(tri[e], tri[(e + 1) % 3]));
    }
  }
  return static_cast<int>(mesh.vertices.size()) - static_cast<int>(edges.size()) +
         static_cast<int>(mesh.triangles.size());
}

double region_area(const SphereMesh& mesh, Region region) {
  double area = 0.0;
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (mesh.tri_region[t] != region) continue;
    const auto& tri = mesh.triangles[t];
    area += triangle_area(mesh.vertices[static_cast<size_t>(tri[0])],
                          mesh.vertices[static_cast<size_t>(tri[1])],
                          mesh.vertices[static_cast<size_t>(tri[2])]);
  }
  return area;
}

double eval_sphere_p1(const SphereMesh& mesh, const Eigen::VectorXd& vertex_values,
                      const std::array<double, 3>& point, std::array<double, 3>* surface_grad) {
  // Locate the triangle whose plane projection of the point has the best
  // (least negative) barycentric minimum, then interpolate linearly. The
  // interpolant f(p) = (v^T M^{-1} p) / (1^T M^{-1} p) is homogeneous of
  // degree zero, so its ambient gradient is automatically tangent to the
  // sphere at |p| = 1.
  double best_min = -1e30;
  double value = 0.0;
  Eigen::Matrix3d best_M = Eigen::Matrix3d::Identity();
  Eigen::Vector3d best_v = Eigen::Vector3d::Zero();
  double best_s = 1.0;
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec3& a = mesh.vertices[static_cast<size_t>(tri[0])];
    const Vec3& b = mesh.vertices[static_cast<size_t>(tri[1])];
    const Vec3& c = mesh.vertices[static_cast<size_t>(tri[2])];
    Eigen::Matrix3d M;
    M << a[0], b[0], c[0], a[1], b[1], c[1], a[2], b[2], c[2];
    const Eigen::Vector3d p(point[0], point[1], point[2]);
    Eigen::Vector3d lam = M.fullPivLu().solve(p);
    const double s = lam.sum();
    // s < 0 means the triangle is on the far side of the sphere (the ray
    // through the point meets its plane behind the origin); a containing
    // triangle always has s >= 1.
    if (s < 1e-12) continue;
    lam /= s;
    const double mn = lam.minCoeff();
    if (mn > best_min) {
      best_min = mn;
      value = lam[0] * vertex_values[tri[0]] + lam[1] * vertex_values[tri[1]] +
              lam[2] * vertex_values[tri[2]];
      if (surface_grad) {
        best_M = M;
        best_v = Eigen::Vector3d(vertex_values[tri[0]], vertex_values[tri[1]],
                                 vertex_values[tri[2]]);
        best_s = s;
      }
      if (mn >= -1e-12) break;
    }
  }
  if (surface_grad) {
    const Eigen::Vector3d g =
        best_M.transpose().fullPivLu().solve(best_v - value * Eigen::Vector3d::Ones()) / best_s;
    (*surface_grad)[0] = g[0];
    (*surface_grad)[1] = g[1];
    (*surface_grad)[2] = g[2];
  }
  return value;
}

double eval_sphere_p1(const SphereMesh& mesh, const Eigen::VectorXd& vertex_values,
                      const std::array<double, 3>& point) {
  return eval_sphere_p1(mesh, vertex_values, point, nullptr);
}

}  // namespace conetrap
