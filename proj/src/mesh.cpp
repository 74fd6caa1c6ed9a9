#include "ensmhd/mesh.hpp"

#include "ensmhd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace ensmhd {

namespace {

long long edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<long long>(a) << 32) | static_cast<unsigned>(b);
}

// Boundary edges are the edges owned by a single triangle; the classifier
// assigns a tag from the edge midpoint.
std::vector<BoundaryEdge> extract_boundary(
    const Eigen::Matrix2Xd& vertices, const std::vector<std::array<int, 3>>& triangles,
    const std::function<BoundaryTag(const Eigen::Vector2d&)>& classify) {
  std::unordered_map<long long, std::pair<int, std::array<int, 2>>> count;
  for (const auto& tri : triangles) {
    for (int k = 0; k < 3; ++k) {
      const int a = tri[(k + 1) % 3];
      const int b = tri[(k + 2) % 3];
      auto& entry = count[edge_key(a, b)];
      ++entry.first;
      entry.second = {a, b};
    }
  }
  std::vector<BoundaryEdge> out;
  for (const auto& [key, entry] : count) {
    if (entry.first != 1) continue;
    const auto [a, b] = entry.second;
    const Eigen::Vector2d mid = 0.5 * (vertices.col(a) + vertices.col(b));
    out.push_back({{a, b}, classify(mid)});
  }
  std::sort(out.begin(), out.end(), [](const BoundaryEdge& l, const BoundaryEdge& r) {
    return l.vertices < r.vertices;
  });
  return out;
}

int segments_for(double length, double target_h) {
  return std::max(1, static_cast<int>(std::ceil(length / target_h - 1e-9)));
}

}  // namespace

std::string_view to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::wall: return "wall";
    case BoundaryTag::inflow: return "inflow";
    case BoundaryTag::outflow: return "outflow";
    case BoundaryTag::all: return "all";
  }
  return "unknown";
}

Mesh::Mesh(Eigen::Matrix2Xd vertices, std::vector<std::array<int, 3>> triangles,
           std::vector<BoundaryEdge> boundary_edges, bool barycentric)
    : vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      boundary_edges_(std::move(boundary_edges)),
      barycentric_(barycentric) {
  triangle_edges_.resize(triangles_.size());
  edge_lookup_.reserve(triangles_.size() * 2);
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int k = 0; k < 3; ++k) {
      const int a = tri[(k + 1) % 3];
      const int b = tri[(k + 2) % 3];
      auto [it, inserted] = edge_lookup_.try_emplace(edge_key(a, b), static_cast<int>(edges_.size()));
      if (inserted) edges_.push_back({std::min(a, b), std::max(a, b)});
      triangle_edges_[t][k] = it->second;
    }
    for (int k = 0; k < 3; ++k) {
      const double len = (vertex(tri[(k + 1) % 3]) - vertex(tri[k])).norm();
      h_max_ = std::max(h_max_, len);
    }
  }
}

double Mesh::signed_area(int t) const {
  const auto& tri = triangles_[t];
  const Eigen::Vector2d e1 = vertex(tri[1]) - vertex(tri[0]);
  const Eigen::Vector2d e2 = vertex(tri[2]) - vertex(tri[0]);
  return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

double Mesh::area() const {
  double sum = 0.0;
  for (int t = 0; t < triangle_count(); ++t) sum += signed_area(t);
  return sum;
}

int Mesh::find_edge(int a, int b) const {
  const auto it = edge_lookup_.find(edge_key(a, b));
  return it == edge_lookup_.end() ? -1 : it->second;
}

std::string Mesh::check_invariants() const {
  std::ostringstream err;
  for (int t = 0; t < triangle_count(); ++t) {
    for (int v : triangles_[t]) {
      if (v < 0 || v >= vertex_count()) {
        err << "triangle " << t << " references vertex " << v;
        return err.str();
      }
    }
    if (!(signed_area(t) > 0.0)) {
      err << "triangle " << t << " has nonpositive area " << signed_area(t);
      return err.str();
    }
  }
  std::vector<int> owners(edges_.size(), 0);
  for (const auto& te : triangle_edges_)
    for (int e : te) ++owners[e];
  std::vector<int> tagged(edges_.size(), 0);
  for (const auto& be : boundary_edges_) {
    const int e = find_edge(be.vertices[0], be.vertices[1]);
    if (e < 0) {
      err << "boundary edge (" << be.vertices[0] << "," << be.vertices[1] << ") is not a mesh edge";
      return err.str();
    }
    ++tagged[e];
  }
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (owners[e] < 1 || owners[e] > 2) {
      err << "edge " << e << " shared by " << owners[e] << " triangles";
      return err.str();
    }
    const int expected = owners[e] == 1 ? 1 : 0;
    if (tagged[e] != expected) {
      err << "edge " << e << " owned by " << owners[e] << " triangles carries " << tagged[e]
          << " boundary tags";
      return err.str();
    }
  }
  double h = 0.0;
  for (const auto& tri : triangles_)
    for (int k = 0; k < 3; ++k) h = std::max(h, (vertex(tri[(k + 1) % 3]) - vertex(tri[k])).norm());
  if (h != h_max_) {
    err << "h_max " << h_max_ << " differs from recomputed " << h;
    return err.str();
  }
  return {};
}

Mesh unit_square_mesh(int n) {
  if (n < 1) throw InvalidArgument("unit_square_mesh: n must be >= 1");
  const int np = n + 1;
  Eigen::Matrix2Xd vertices(2, np * np);
  for (int j = 0; j < np; ++j)
    for (int i = 0; i < np; ++i)
      vertices.col(j * np + i) << static_cast<double>(i) / n, static_cast<double>(j) / n;
  std::vector<std::array<int, 3>> triangles;
  triangles.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = j * np + i, v10 = v00 + 1, v01 = v00 + np, v11 = v01 + 1;
      triangles.push_back({v00, v10, v11});
      triangles.push_back({v00, v11, v01});
    }
  }
  auto boundary = extract_boundary(vertices, triangles, [](const Eigen::Vector2d&) { return BoundaryTag::all; });
  return Mesh(std::move(vertices), std::move(triangles), std::move(boundary));
}

Mesh barycentric_refine(const Mesh& mesh) {
  const int nv = mesh.vertex_count();
  const int nt = mesh.triangle_count();
  Eigen::Matrix2Xd vertices(2, nv + nt);
  vertices.leftCols(nv) = mesh.vertices();
  std::vector<std::array<int, 3>> triangles;
  triangles.reserve(3 * static_cast<std::size_t>(nt));
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles()[t];
    const int c = nv + t;
    vertices.col(c) = (mesh.vertex(tri[0]) + mesh.vertex(tri[1]) + mesh.vertex(tri[2])) / 3.0;
    triangles.push_back({tri[0], tri[1], c});
    triangles.push_back({tri[1], tri[2], c});
    triangles.push_back({tri[2], tri[0], c});
  }
  // Boundary edges are not split.
  return Mesh(std::move(vertices), std::move(triangles), mesh.boundary_edges(), true);
}

Mesh channel_step_mesh(double target_h) {
  if (!(target_h > 0.0) || target_h > 1.0 || !std::isfinite(target_h))
    throw InvalidArgument("channel_step_mesh: target_h must lie in (0, 1]");

  constexpr double length = 40.0, height = 10.0;
  constexpr double step_x0 = 5.0, step_x1 = 6.0, step_y1 = 1.0;

  auto breakpoints = [&](std::initializer_list<double> knots) {
    std::vector<double> pts{*knots.begin()};
    for (auto it = knots.begin(); std::next(it) != knots.end(); ++it) {
      const double a = *it, b = *std::next(it);
      const int k = segments_for(b - a, target_h);
      for (int i = 1; i <= k; ++i) pts.push_back(i == k ? b : a + (b - a) * i / k);
    }
    return pts;
  };
  const std::vector<double> xs = breakpoints({0.0, step_x0, step_x1, length});
  const std::vector<double> ys = breakpoints({0.0, step_y1, height});
  const int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size());

  auto inside_step = [&](double x, double y) { return x > step_x0 && x < step_x1 && y < step_y1; };

  std::vector<int> index(static_cast<std::size_t>(nx) * ny, -1);
  std::vector<Eigen::Vector2d> pts;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (!inside_step(xs[i], ys[j])) {
        index[j * nx + i] = static_cast<int>(pts.size());
        pts.emplace_back(xs[i], ys[j]);
      }
  Eigen::Matrix2Xd vertices(2, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t k = 0; k < pts.size(); ++k) vertices.col(static_cast<Eigen::Index>(k)) = pts[k];

  std::vector<std::array<int, 3>> triangles;
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const double cx = 0.5 * (xs[i] + xs[i + 1]), cy = 0.5 * (ys[j] + ys[j + 1]);
      if (inside_step(cx, cy)) continue;
      const int v00 = index[j * nx + i], v10 = index[j * nx + i + 1];
      const int v01 = index[(j + 1) * nx + i], v11 = index[(j + 1) * nx + i + 1];
      triangles.push_back({v00, v10, v11});
      triangles.push_back({v00, v11, v01});
    }
  }
  auto boundary = extract_boundary(vertices, triangles, [](const Eigen::Vector2d& mid) {
    if (mid.x() == 0.0) return BoundaryTag::inflow;
    if (mid.x() == length) return BoundaryTag::outflow;
    return BoundaryTag::wall;
  });
  return Mesh(std::move(vertices), std::move(triangles), std::move(boundary));
}

}  // namespace ensmhd
