#include "ensmhd/dirichlet.hpp"

#include "ensmhd/errors.hpp"

#include <algorithm>

namespace ensmhd {

DirichletValues dirichlet_values(const FunctionSpace& velocity, const BoundaryData& data, double t) {
  if (velocity.family() != Family::velocity_p2)
    throw InvalidArgument("dirichlet_values: expects the P2 velocity space");
  const int scalar = velocity.scalar_dof_count();
  const auto& nodes = velocity.dof_coordinates();

  // Lowest priority first so higher priority tags overwrite shared dofs.
  std::map<int, double> value_of;
  for (BoundaryTag tag : {BoundaryTag::all, BoundaryTag::outflow, BoundaryTag::inflow, BoundaryTag::wall}) {
    const auto& dofs = velocity.boundary_dofs(tag);
    if (dofs.empty()) continue;
    const auto it = data.find(tag);
    if (it == data.end() || !it->second)
      throw ConfigError("no boundary value function for tag '" + std::string(to_string(tag)) + "'");
    for (int d : dofs) {
      const int node = d % scalar;
      const int comp = d / scalar;
      value_of[d] = it->second(nodes.col(node), t)(comp);
    }
  }
  DirichletValues out;
  out.dofs.reserve(value_of.size());
  out.values.resize(static_cast<Eigen::Index>(value_of.size()));
  Eigen::Index k = 0;
  for (const auto& [dof, value] : value_of) {
    out.dofs.push_back(dof);
    out.values(k++) = value;
  }
  return out;
}

DirichletConstraint::DirichletConstraint(std::vector<int> dofs, int dimension)
    : dofs_(std::move(dofs)), mask_(static_cast<std::size_t>(dimension), 0) {
  std::sort(dofs_.begin(), dofs_.end());
  dofs_.erase(std::unique(dofs_.begin(), dofs_.end()), dofs_.end());
  for (int d : dofs_) {
    if (d < 0 || d >= dimension) throw InvalidArgument("DirichletConstraint: dof out of range");
    mask_[static_cast<std::size_t>(d)] = 1;
  }
}

SparseMatrix DirichletConstraint::eliminate(const SparseMatrix& matrix, SparseMatrix* lift) const {
  if (matrix.rows() != dimension() || matrix.cols() != dimension())
    throw InvalidArgument("DirichletConstraint: matrix dimension mismatch");
  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> kept, lifted;
  kept.reserve(static_cast<std::size_t>(matrix.nonZeros()) + dofs_.size());
  for (int col = 0; col < matrix.outerSize(); ++col) {
    const bool ccol = constrained(col);
    for (SparseMatrix::InnerIterator it(matrix, col); it; ++it) {
      const int row = static_cast<int>(it.row());
      if (constrained(row)) continue;
      if (ccol)
        lifted.emplace_back(row, col, it.value());
      else
        kept.emplace_back(row, col, it.value());
    }
  }
  for (int d : dofs_) kept.emplace_back(d, d, 1.0);
  SparseMatrix out(matrix.rows(), matrix.cols());
  out.setFromTriplets(kept.begin(), kept.end());
  out.makeCompressed();
  if (lift) {
    *lift = SparseMatrix(matrix.rows(), matrix.cols());
    lift->setFromTriplets(lifted.begin(), lifted.end());
  }
  return out;
}

Eigen::VectorXd DirichletConstraint::constrain_rhs(const SparseMatrix& lift, const Eigen::VectorXd& rhs,
                                                   const Eigen::VectorXd& values) const {
  if (rhs.size() != dimension() || values.size() != static_cast<Eigen::Index>(dofs_.size()))
    throw InvalidArgument("DirichletConstraint: right-hand side size mismatch");
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dimension());
  for (std::size_t k = 0; k < dofs_.size(); ++k) g(dofs_[k]) = values(static_cast<Eigen::Index>(k));
  Eigen::VectorXd out = rhs - lift * g;
  for (std::size_t k = 0; k < dofs_.size(); ++k) out(dofs_[k]) = values(static_cast<Eigen::Index>(k));
  return out;
}

void apply_dirichlet(SparseMatrix& matrix, Eigen::VectorXd& rhs, const DirichletValues& bc) {
  const DirichletConstraint constraint(bc.dofs, static_cast<int>(matrix.rows()));
  SparseMatrix lift;
  matrix = constraint.eliminate(matrix, &lift);
  rhs = constraint.constrain_rhs(lift, rhs, bc.values);
}

}  // namespace ensmhd
