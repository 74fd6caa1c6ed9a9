#include "ensmhd/function_space.hpp"

#include "ensmhd/errors.hpp"

#include <algorithm>

namespace ensmhd {

FunctionSpace::FunctionSpace(std::shared_ptr<const Mesh> mesh, Family family)
    : mesh_(std::move(mesh)), family_(family) {
  const Mesh& m = *mesh_;
  const int nv = m.vertex_count(), nt = m.triangle_count(), ne = m.edge_count();
  cell_dofs_.resize(static_cast<std::size_t>(nt) * local_size());

  switch (family_) {
    case Family::velocity_p2: {
      const int scalar = nv + ne;
      dof_count_ = 2 * scalar;
      dof_coordinates_.resize(2, scalar);
      dof_coordinates_.leftCols(nv) = m.vertices();
      for (int e = 0; e < ne; ++e)
        dof_coordinates_.col(nv + e) = 0.5 * (m.vertex(m.edges()[e][0]) + m.vertex(m.edges()[e][1]));
      for (int t = 0; t < nt; ++t) {
        int* d = cell_dofs_.data() + 6 * t;
        for (int k = 0; k < 3; ++k) {
          d[k] = m.triangles()[t][k];
          d[3 + k] = nv + m.triangle_edges()[t][k];
        }
      }
      for (const auto& be : m.boundary_edges()) {
        auto& list = boundary_dofs_[be.tag];
        const int e = m.find_edge(be.vertices[0], be.vertices[1]);
        for (int s : {be.vertices[0], be.vertices[1], nv + e})
          for (int c = 0; c < 2; ++c) list.push_back(s + c * scalar);
      }
      for (auto& [tag, list] : boundary_dofs_) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
      }
      break;
    }
    case Family::pressure_p1: {
      dof_count_ = nv;
      dof_coordinates_ = m.vertices();
      for (int t = 0; t < nt; ++t)
        for (int k = 0; k < 3; ++k) cell_dofs_[3 * t + k] = m.triangles()[t][k];
      break;
    }
    case Family::pressure_p1_disc: {
      dof_count_ = 3 * nt;
      dof_coordinates_.resize(2, dof_count_);
      for (int t = 0; t < nt; ++t)
        for (int k = 0; k < 3; ++k) {
          cell_dofs_[3 * t + k] = 3 * t + k;
          dof_coordinates_.col(3 * t + k) = m.vertex(m.triangles()[t][k]);
        }
      break;
    }
  }
}

const std::vector<int>& FunctionSpace::boundary_dofs(BoundaryTag tag) const {
  static const std::vector<int> empty;
  const auto it = boundary_dofs_.find(tag);
  return it == boundary_dofs_.end() ? empty : it->second;
}

std::vector<BoundaryTag> FunctionSpace::boundary_tags() const {
  std::vector<BoundaryTag> tags;
  for (const auto& [tag, list] : boundary_dofs_) tags.push_back(tag);
  return tags;
}

std::shared_ptr<const FunctionSpace> build_space(std::shared_ptr<const Mesh> mesh, Family family) {
  if (!mesh) throw InvalidArgument("build_space: null mesh");
  if (family == Family::pressure_p1_disc && !mesh->barycentric())
    throw ConfigError("discontinuous P1 pressure requires a barycentrically refined mesh");
  return std::make_shared<const FunctionSpace>(std::move(mesh), family);
}

FEField::FEField(std::shared_ptr<const FunctionSpace> s, Eigen::VectorXd v)
    : space(std::move(s)), values(std::move(v)) {
  if (values.size() != space->dof_count())
    throw InvalidArgument("FEField: coefficient length does not match the space");
}

}  // namespace ensmhd
