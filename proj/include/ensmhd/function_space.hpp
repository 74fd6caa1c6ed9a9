#pragma once

#include "ensmhd/mesh.hpp"

#include <Eigen/Core>

#include <map>
#include <memory>
#include <span>
#include <vector>

namespace ensmhd {

enum class Family {
  velocity_p2,        ///< continuous P2, two components, component-blocked dofs
  pressure_p1,        ///< continuous P1 (Taylor-Hood pressure)
  pressure_p1_disc,   ///< discontinuous P1 (Scott-Vogelius pressure)
};

/// Degrees of freedom of one finite-element family on a mesh.
///
/// Velocity dofs are blocked by component: dof `i` of the scalar P2 space is
/// the x component and `i + scalar_dof_count()` the y component. Scalar P2
/// dofs are numbered vertices first, then edges.
class FunctionSpace {
public:
  FunctionSpace(std::shared_ptr<const Mesh> mesh, Family family);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  Family family() const { return family_; }

  int dof_count() const { return dof_count_; }
  int components() const { return family_ == Family::velocity_p2 ? 2 : 1; }
  int scalar_dof_count() const { return dof_count_ / components(); }
  int local_size() const { return family_ == Family::velocity_p2 ? 6 : 3; }

  /// Scalar dofs of a cell in local basis order.
  std::span<const int> cell_dofs(int cell) const {
    return {cell_dofs_.data() + static_cast<std::size_t>(cell) * local_size(),
            static_cast<std::size_t>(local_size())};
  }

  /// Node of each scalar dof (for discontinuous families: the cell corner).
  const Eigen::Matrix2Xd& dof_coordinates() const { return dof_coordinates_; }

  /// Constrained dofs (all components) on edges carrying the tag. A dof shared
  /// by edges with different tags appears under each of them.
  const std::vector<int>& boundary_dofs(BoundaryTag tag) const;
  std::vector<BoundaryTag> boundary_tags() const;

private:
  std::shared_ptr<const Mesh> mesh_;
  Family family_;
  int dof_count_ = 0;
  std::vector<int> cell_dofs_;
  Eigen::Matrix2Xd dof_coordinates_;
  std::map<BoundaryTag, std::vector<int>> boundary_dofs_;
};

/// Build a space; the discontinuous pressure family requires a barycentrically
/// refined mesh and throws ConfigError otherwise.
std::shared_ptr<const FunctionSpace> build_space(std::shared_ptr<const Mesh> mesh, Family family);

/// Coefficient vector bound to a space.
struct FEField {
  std::shared_ptr<const FunctionSpace> space;
  Eigen::VectorXd values;

  FEField() = default;
  explicit FEField(std::shared_ptr<const FunctionSpace> s)
      : space(std::move(s)), values(Eigen::VectorXd::Zero(space->dof_count())) {}
  FEField(std::shared_ptr<const FunctionSpace> s, Eigen::VectorXd v);
};

}  // namespace ensmhd
