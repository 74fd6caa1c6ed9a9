#pragma once

#include "ensmhd/assembly.hpp"

#include <map>
#include <vector>

namespace ensmhd {

/// Boundary value function per tag.
using BoundaryData = std::map<BoundaryTag, VectorFunction>;

struct DirichletValues {
  std::vector<int> dofs;   // sorted, unique
  Eigen::VectorXd values;  // aligned with dofs
};

/// Evaluate boundary data at every constrained velocity dof at time t.
///
/// A dof on edges of several tags takes the value of the tag with the highest
/// priority: wall, then inflow, then outflow, then all. Throws ConfigError when
/// the space has dofs under a tag that `data` does not cover.
DirichletValues dirichlet_values(const FunctionSpace& velocity, const BoundaryData& data, double t);

/// Strong Dirichlet constraints by row and column elimination on a square
/// system whose leading unknowns are the velocity dofs.
class DirichletConstraint {
public:
  DirichletConstraint() = default;
  DirichletConstraint(std::vector<int> dofs, int dimension);

  const std::vector<int>& dofs() const { return dofs_; }
  int dimension() const { return static_cast<int>(mask_.size()); }
  bool constrained(int i) const { return mask_[static_cast<std::size_t>(i)] != 0; }

  /// Constrained rows and columns become identity; the removed columns
  /// (restricted to free rows) go to `lift` when non-null. Explicit zeros are
  /// kept, so equal input patterns give equal output patterns.
  SparseMatrix eliminate(const SparseMatrix& matrix, SparseMatrix* lift = nullptr) const;

  /// rhs - lift * g on free rows and the prescribed values on constrained rows.
  Eigen::VectorXd constrain_rhs(const SparseMatrix& lift, const Eigen::VectorXd& rhs,
                                const Eigen::VectorXd& values) const;

private:
  std::vector<int> dofs_;
  std::vector<char> mask_;
};

/// In-place elimination of matrix and right-hand side. Idempotent.
void apply_dirichlet(SparseMatrix& matrix, Eigen::VectorXd& rhs, const DirichletValues& bc);

}  // namespace ensmhd
