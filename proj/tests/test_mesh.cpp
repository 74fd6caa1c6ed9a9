#include "ensmhd/errors.hpp"
#include "ensmhd/mesh.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

using namespace ensmhd;

namespace {

bool has_vertex(const Mesh& mesh, double x, double y) {
  for (int i = 0; i < mesh.vertex_count(); ++i)
    if ((mesh.vertex(i) - Eigen::Vector2d(x, y)).norm() < 1e-12) return true;
  return false;
}

}  // namespace

TEST(UnitSquare, CountsAndArea) {
  const Mesh mesh = unit_square_mesh(4);
  EXPECT_EQ(mesh.triangle_count(), 32);
  EXPECT_EQ(mesh.vertex_count(), 25);
  EXPECT_EQ(mesh.edge_count(), 25 + 32 - 1);  // Euler: V - E + F = 1
  EXPECT_NEAR(mesh.area(), 1.0, 1e-14);
  EXPECT_NEAR(mesh.h_max(), std::sqrt(2.0) / 4.0, 1e-14);
  EXPECT_EQ(mesh.check_invariants(), "");
  EXPECT_FALSE(mesh.barycentric());
}

TEST(UnitSquare, CounterclockwiseTriangles) {
  const Mesh mesh = unit_square_mesh(3);
  for (int t = 0; t < mesh.triangle_count(); ++t) EXPECT_GT(mesh.signed_area(t), 0.0);
}

TEST(UnitSquare, RejectsNonPositiveSize) { EXPECT_THROW(unit_square_mesh(0), InvalidArgument); }

TEST(UnitSquare, BoundaryEdgesCoverPerimeter) {
  const Mesh mesh = unit_square_mesh(5);
  ASSERT_EQ(mesh.boundary_edges().size(), 20u);
  double length = 0.0;
  for (const auto& e : mesh.boundary_edges()) {
    EXPECT_EQ(e.tag, BoundaryTag::all);
    length += (mesh.vertex(e.vertices[0]) - mesh.vertex(e.vertices[1])).norm();
  }
  EXPECT_NEAR(length, 4.0, 1e-13);
}

TEST(Barycentric, TriplesTrianglesAndKeepsArea) {
  const Mesh coarse = unit_square_mesh(4);
  const Mesh fine = barycentric_refine(coarse);
  EXPECT_EQ(fine.triangle_count(), 96);
  EXPECT_EQ(fine.vertex_count(), 57);
  EXPECT_TRUE(fine.barycentric());
  EXPECT_NEAR(fine.area(), coarse.area(), 1e-14);
  EXPECT_EQ(fine.check_invariants(), "");
  EXPECT_EQ(fine.boundary_edges().size(), coarse.boundary_edges().size());
  for (int t = 0; t < fine.triangle_count(); ++t) EXPECT_GT(fine.signed_area(t), 0.0);
}

TEST(Barycentric, NewVertexIsCentroid) {
  const Mesh coarse = unit_square_mesh(1);
  const Mesh fine = barycentric_refine(coarse);
  for (int t = 0; t < coarse.triangle_count(); ++t) {
    const auto& tri = coarse.triangles()[t];
    const Eigen::Vector2d c = (coarse.vertex(tri[0]) + coarse.vertex(tri[1]) + coarse.vertex(tri[2])) / 3.0;
    EXPECT_TRUE(has_vertex(fine, c.x(), c.y()));
  }
}

TEST(Channel, GeometryAndInvariants) {
  for (double h : {1.0, 0.5, 0.85}) {
    const Mesh mesh = channel_step_mesh(h);
    EXPECT_EQ(mesh.check_invariants(), "") << "h = " << h;
    EXPECT_NEAR(mesh.area(), 399.0, 1e-10);
    EXPECT_LE(mesh.h_max(), std::sqrt(2.0) * h + 1e-12);
    EXPECT_TRUE(has_vertex(mesh, 5.0, 1.0));
    EXPECT_TRUE(has_vertex(mesh, 6.0, 1.0));
    EXPECT_TRUE(has_vertex(mesh, 5.0, 0.0));
    EXPECT_TRUE(has_vertex(mesh, 6.0, 0.0));
  }
}

TEST(Channel, EveryBoundaryEdgeHasOneTag) {
  const Mesh mesh = channel_step_mesh(0.5);
  std::set<std::pair<int, int>> seen;
  std::map<BoundaryTag, double> length;
  for (const auto& e : mesh.boundary_edges()) {
    const auto key = std::minmax(e.vertices[0], e.vertices[1]);
    EXPECT_TRUE(seen.insert(key).second) << "edge listed twice";
    const Eigen::Vector2d a = mesh.vertex(e.vertices[0]), b = mesh.vertex(e.vertices[1]);
    length[e.tag] += (a - b).norm();
    if (e.tag == BoundaryTag::inflow) {
      EXPECT_EQ(a.x(), 0.0);
      EXPECT_EQ(b.x(), 0.0);
    } else if (e.tag == BoundaryTag::outflow) {
      EXPECT_EQ(a.x(), 40.0);
      EXPECT_EQ(b.x(), 40.0);
    }
  }
  EXPECT_NEAR(length[BoundaryTag::inflow], 10.0, 1e-12);
  EXPECT_NEAR(length[BoundaryTag::outflow], 10.0, 1e-12);
  // Top and bottom walls plus the two vertical faces of the step.
  EXPECT_NEAR(length[BoundaryTag::wall], 80.0 + 2.0, 1e-12);
}

TEST(Channel, RefinementPreservesTags) {
  const Mesh coarse = channel_step_mesh(1.0);
  const Mesh fine = barycentric_refine(coarse);
  EXPECT_EQ(fine.check_invariants(), "");
  EXPECT_NEAR(fine.area(), 399.0, 1e-10);
  ASSERT_EQ(fine.boundary_edges().size(), coarse.boundary_edges().size());
  for (std::size_t k = 0; k < fine.boundary_edges().size(); ++k)
    EXPECT_EQ(fine.boundary_edges()[k].tag, coarse.boundary_edges()[k].tag);
}

TEST(Channel, RejectsBadSpacing) {
  EXPECT_THROW(channel_step_mesh(0.0), InvalidArgument);
  EXPECT_THROW(channel_step_mesh(1.5), InvalidArgument);
}

TEST(Edges, LookupIsSymmetric) {
  const Mesh mesh = unit_square_mesh(2);
  for (int e = 0; e < mesh.edge_count(); ++e) {
    const auto& ab = mesh.edges()[e];
    EXPECT_EQ(mesh.find_edge(ab[0], ab[1]), e);
    EXPECT_EQ(mesh.find_edge(ab[1], ab[0]), e);
  }
  EXPECT_EQ(mesh.find_edge(0, 8), -1);
}
