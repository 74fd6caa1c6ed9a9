#pragma once

#include <Eigen/Core>

#include <array>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ensmhd {

enum class BoundaryTag : unsigned char { wall, inflow, outflow, all };

std::string_view to_string(BoundaryTag tag);

struct BoundaryEdge {
  std::array<int, 2> vertices;
  BoundaryTag tag;
};

/// Conforming triangulation of a polygonal 2D domain.
///
/// Triangles are stored counterclockwise. Edges are numbered once the mesh is
/// finalized; `triangle_edges[t][k]` is the edge opposite local vertex k.
class Mesh {
public:
  Mesh() = default;
  Mesh(Eigen::Matrix2Xd vertices, std::vector<std::array<int, 3>> triangles,
       std::vector<BoundaryEdge> boundary_edges, bool barycentric = false);

  const Eigen::Matrix2Xd& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }
  const std::vector<std::array<int, 2>>& edges() const { return edges_; }
  const std::vector<std::array<int, 3>>& triangle_edges() const { return triangle_edges_; }

  int vertex_count() const { return static_cast<int>(vertices_.cols()); }
  int triangle_count() const { return static_cast<int>(triangles_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  Eigen::Vector2d vertex(int i) const { return vertices_.col(i); }

  /// Maximum over triangles of the longest edge.
  double h_max() const { return h_max_; }
  /// True when produced by barycentric_refine (needed by discontinuous
  /// pressure spaces for inf-sup stability).
  bool barycentric() const { return barycentric_; }

  double signed_area(int t) const;
  double area() const;

  /// Index of the edge joining a and b, or -1.
  int find_edge(int a, int b) const;

  /// Empty string when every structural invariant holds, otherwise a
  /// description of the first violation.
  std::string check_invariants() const;

private:
  Eigen::Matrix2Xd vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<BoundaryEdge> boundary_edges_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::unordered_map<long long, int> edge_lookup_;
  double h_max_ = 0.0;
  bool barycentric_ = false;
};

/// n x n squares on (0,1)^2, each split bottom-left to top-right. All
/// boundary edges are tagged `all`.
Mesh unit_square_mesh(int n);

/// Replace every triangle by three triangles sharing its barycenter.
Mesh barycentric_refine(const Mesh& mesh);

/// ([0,40] x [0,10]) minus the step [5,6] x [0,1]: a 30 x 10 channel with a
/// 10 unit outflow extension. Tensor grid with lines through the step corners
/// and spacing at most target_h; inlet x=0 is `inflow`, x=40 is `outflow`,
/// everything else `wall`.
Mesh channel_step_mesh(double target_h);

}  // namespace ensmhd
