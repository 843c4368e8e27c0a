#include <cmath>
#include <limits>
#include <vector>

#include "conetrap/discretization.hpp"
#include "conetrap/types.hpp"

namespace conetrap {

namespace {

constexpr int kLatRings = 40;   // interior latitude rings
constexpr int kLonSamples = 64; // longitude samples per ring

// Central-projection location of one lat/lon grid point: the triangle whose
// barycentric expansion p = b0 v0 + b1 v1 + b2 v2 has the least-negative
// minimum coordinate, with b normalized to sum 1 for interpolation.
struct GridSample {
  int v0, v1, v2;
  double b0, b1, b2;
};

std::vector<GridSample> locate_grid(const SphereMesh& mesh) {
  const int ntri = static_cast<int>(mesh.triangles.size());
  std::vector<Eigen::Matrix3d> inv(ntri);
  std::vector<bool> invertible(ntri, true);
  for (int t = 0; t < ntri; ++t) {
    Eigen::Matrix3d M;
    for (int c = 0; c < 3; ++c) {
      const auto& v = mesh.vertices[mesh.triangles[t][c]];
      M.col(c) = Eigen::Vector3d(v[0], v[1], v[2]);
    }
    Eigen::FullPivLU<Eigen::Matrix3d> lu(M);
    if (lu.isInvertible()) {
      inv[t] = lu.inverse();
    } else {
      invertible[t] = false;
    }
  }

  std::vector<GridSample> samples;
  samples.reserve(kLatRings * kLonSamples);
  for (int j = 0; j < kLatRings; ++j) {
    const double lat = -M_PI / 2.0 + (j + 0.5) * M_PI / kLatRings;
    for (int i = 0; i < kLonSamples; ++i) {
      const double lon = 2.0 * M_PI * i / kLonSamples;
      const Eigen::Vector3d p(std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon),
                              std::sin(lat));
      int best_t = -1;
      double best_min = -std::numeric_limits<double>::infinity();
      Eigen::Vector3d best_b;
      for (int t = 0; t < ntri; ++t) {
        if (!invertible[t]) continue;
        const Eigen::Vector3d b = inv[t] * p;
        const double mn = b.minCoeff();
        if (mn > best_min) {
          best_min = mn;
          best_t = t;
          best_b = b;
          if (mn >= -1e-12) break;  // strictly inside (or on an edge)
        }
      }
      if (best_t < 0) fail(Errc::PointOutsideChart, "grid point not covered by the mesh");
      const double s = best_b.sum();
      GridSample g;
      g.v0 = mesh.triangles[best_t][0];
      g.v1 = mesh.triangles[best_t][1];
      g.v2 = mesh.triangles[best_t][2];
      g.b0 = best_b[0] / s;
      g.b1 = best_b[1] / s;
      g.b2 = best_b[2] / s;
      samples.push_back(g);
    }
  }
  return samples;
}

std::pair<int, double> classify(const std::vector<GridSample>& grid,
                                const Eigen::VectorXcd& values, int m_probe) {
  std::vector<double> power(m_probe + 1, 0.0);
  std::vector<Complex> ring(kLonSamples);
  for (int j = 0; j < kLatRings; ++j) {
    const double lat = -M_PI / 2.0 + (j + 0.5) * M_PI / kLatRings;
    const double weight = std::cos(lat);
    for (int i = 0; i < kLonSamples; ++i) {
      const GridSample& g = grid[j * kLonSamples + i];
      ring[i] = g.b0 * values[g.v0] + g.b1 * values[g.v1] + g.b2 * values[g.v2];
    }
    // Direct DFT of the ring; fold +-m together.
    for (int m = 0; m <= m_probe; ++m) {
      Complex cp = 0.0, cn = 0.0;
      for (int i = 0; i < kLonSamples; ++i) {
        const double ang = 2.0 * M_PI * m * i / kLonSamples;
        const Complex e(std::cos(ang), -std::sin(ang));
        cp += ring[i] * e;
        cn += ring[i] * std::conj(e);
      }
      cp /= static_cast<double>(kLonSamples);
      cn /= static_cast<double>(kLonSamples);
      double pw = std::norm(cp);
      if (m > 0) pw += std::norm(cn);
      power[m] += weight * pw;
    }
  }
  int best_m = 0;
  double total = 0.0;
  for (int m = 0; m <= m_probe; ++m) {
    total += power[m];
    if (power[m] > power[best_m]) best_m = m;
  }
  return {best_m, total > 0.0 ? power[best_m] / total : 0.0};
}

}  // namespace

std::vector<std::pair<int, double>> dominant_azimuthal_orders(
    const SphereMesh& mesh, const std::vector<Eigen::VectorXcd>& vertex_values, int m_probe) {
  const std::vector<GridSample> grid = locate_grid(mesh);
  std::vector<std::pair<int, double>> out;
  out.reserve(vertex_values.size());
  for (const auto& v : vertex_values) {
    if (v.size() != static_cast<Eigen::Index>(mesh.vertices.size())) {
      fail(Errc::ConfigValidationError, "vertex vector length does not match the mesh");
    }
    out.push_back(classify(grid, v, m_probe));
  }
  return out;
}

std::pair<int, double> dominant_azimuthal_order(const SphereMesh& mesh,
                                                const Eigen::VectorXcd& vertex_values,
                                                int m_probe) {
  return dominant_azimuthal_orders(mesh, {vertex_values}, m_probe).front();
}

}  // namespace conetrap
