#include "ensmhd/assembly.hpp"

#include "ensmhd/errors.hpp"

#include <cmath>

namespace ensmhd {

namespace {

using Triplet = Eigen::Triplet<double>;
using Local6 = Eigen::Matrix<double, 6, 6>;

void require_velocity(const FunctionSpace& space, const char* who) {
  if (space.family() != Family::velocity_p2)
    throw InvalidArgument(std::string(who) + ": expects the P2 velocity space");
}

void require_same_space(const FunctionSpace& space, const FEField& field, const char* who) {
  if (!field.space || field.space.get() != &space || field.values.size() != space.dof_count())
    throw InvalidArgument(std::string(who) + ": field does not live on the given space");
}

// Scatter a scalar 6x6 block into both velocity components.
void scatter_vector_block(const FunctionSpace& space, int cell, const Local6& local,
                          std::vector<Triplet>& out) {
  const auto dofs = space.cell_dofs(cell);
  const int offset = space.scalar_dof_count();
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        out.emplace_back(dofs[i] + c * offset, dofs[j] + c * offset, local(i, j));
}

SparseMatrix from_triplets(int rows, int cols, const std::vector<Triplet>& triplets) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

// Local coefficients of one component (x: c=0, y: c=1) of a velocity field.
Eigen::Matrix<double, 6, 1> local_component(const FEField& f, std::span<const int> dofs, int c) {
  const int offset = f.space->scalar_dof_count();
  Eigen::Matrix<double, 6, 1> out;
  for (int i = 0; i < 6; ++i) out(i) = f.values(dofs[i] + c * offset);
  return out;
}

const QuadratureRule<double>& rule4() {
  static const auto rule = quadrature_degree4<double>();
  return rule;
}

const QuadratureRule<double>& rule6() {
  static const auto rule = quadrature_degree6<double>();
  return rule;
}

}  // namespace

TriangleGeometry<double> triangle_geometry(const Mesh& mesh, int cell) {
  const auto& tri = mesh.triangles()[cell];
  Eigen::Matrix<double, 2, 3> corners;
  for (int k = 0; k < 3; ++k) corners.col(k) = mesh.vertex(tri[k]);
  return TriangleGeometry<double>(corners);
}

SparseMatrix assemble_mass(const FunctionSpace& velocity) {
  require_velocity(velocity, "assemble_mass");
  const auto& rule = rule4();
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(velocity.mesh().triangle_count()) * 72);
  for (int t = 0; t < velocity.mesh().triangle_count(); ++t) {
    const auto geo = triangle_geometry(velocity.mesh(), t);
    Local6 local = Local6::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto phi = p2_values(rule.points[q]);
      local.noalias() += (2.0 * geo.area * rule.weights[q]) * phi * phi.transpose();
    }
    scatter_vector_block(velocity, t, local, triplets);
  }
  return from_triplets(velocity.dof_count(), velocity.dof_count(), triplets);
}

SparseMatrix assemble_stiffness(const FunctionSpace& velocity) {
  require_velocity(velocity, "assemble_stiffness");
  const auto& rule = rule4();
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(velocity.mesh().triangle_count()) * 72);
  for (int t = 0; t < velocity.mesh().triangle_count(); ++t) {
    const auto geo = triangle_geometry(velocity.mesh(), t);
    Local6 local = Local6::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto g = p2_gradients(rule.points[q], geo.grad_lambda);
      local.noalias() += (2.0 * geo.area * rule.weights[q]) * g.transpose() * g;
    }
    scatter_vector_block(velocity, t, local, triplets);
  }
  return from_triplets(velocity.dof_count(), velocity.dof_count(), triplets);
}

SparseMatrix assemble_convection(const FunctionSpace& velocity, const FEField& advecting) {
  require_velocity(velocity, "assemble_convection");
  require_same_space(velocity, advecting, "assemble_convection");
  const auto& rule = rule6();
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(velocity.mesh().triangle_count()) * 72);
  for (int t = 0; t < velocity.mesh().triangle_count(); ++t) {
    const auto geo = triangle_geometry(velocity.mesh(), t);
    const auto dofs = velocity.cell_dofs(t);
    const auto ax = local_component(advecting, dofs, 0);
    const auto ay = local_component(advecting, dofs, 1);
    Local6 local = Local6::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto phi = p2_values(rule.points[q]);
      const auto g = p2_gradients(rule.points[q], geo.grad_lambda);
      const Eigen::Vector2d a(ax.dot(phi), ay.dot(phi));
      const double div_a = g.row(0).dot(ax) + g.row(1).dot(ay);
      const Eigen::Matrix<double, 1, 6> trial = a.transpose() * g + 0.5 * div_a * phi.transpose();
      local.noalias() += (2.0 * geo.area * rule.weights[q]) * phi * trial;
    }
    scatter_vector_block(velocity, t, local, triplets);
  }
  return from_triplets(velocity.dof_count(), velocity.dof_count(), triplets);
}

Eigen::VectorXd apply_convection(const FEField& advecting, const Eigen::VectorXd& u) {
  const FunctionSpace& velocity = *advecting.space;
  require_velocity(velocity, "apply_convection");
  if (u.size() != velocity.dof_count()) throw InvalidArgument("apply_convection: size mismatch");
  const auto& rule = rule6();
  const int offset = velocity.scalar_dof_count();
  const FEField field_u(advecting.space, u);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(velocity.dof_count());
  for (int t = 0; t < velocity.mesh().triangle_count(); ++t) {
    const auto geo = triangle_geometry(velocity.mesh(), t);
    const auto dofs = velocity.cell_dofs(t);
    const auto ax = local_component(advecting, dofs, 0);
    const auto ay = local_component(advecting, dofs, 1);
    const auto ux = local_component(field_u, dofs, 0);
    const auto uy = local_component(field_u, dofs, 1);
    Eigen::Matrix<double, 6, 1> rx = Eigen::Matrix<double, 6, 1>::Zero();
    Eigen::Matrix<double, 6, 1> ry = Eigen::Matrix<double, 6, 1>::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto phi = p2_values(rule.points[q]);
      const auto g = p2_gradients(rule.points[q], geo.grad_lambda);
      const Eigen::Vector2d a(ax.dot(phi), ay.dot(phi));
      const double div_a = g.row(0).dot(ax) + g.row(1).dot(ay);
      const Eigen::Vector2d grad_ux = g * ux;
      const Eigen::Vector2d grad_uy = g * uy;
      const double w = 2.0 * geo.area * rule.weights[q];
      rx.noalias() += w * (a.dot(grad_ux) + 0.5 * div_a * ux.dot(phi)) * phi;
      ry.noalias() += w * (a.dot(grad_uy) + 0.5 * div_a * uy.dot(phi)) * phi;
    }
    for (int i = 0; i < 6; ++i) {
      out(dofs[i]) += rx(i);
      out(dofs[i] + offset) += ry(i);
    }
  }
  return out;
}

SparseMatrix assemble_divergence(const FunctionSpace& velocity, const FunctionSpace& pressure) {
  require_velocity(velocity, "assemble_divergence");
  if (pressure.family() == Family::velocity_p2)
    throw InvalidArgument("assemble_divergence: second space must be a pressure space");
  if (&velocity.mesh() != &pressure.mesh())
    throw InvalidArgument("assemble_divergence: spaces live on different meshes");
  const auto& rule = rule4();
  const int offset = velocity.scalar_dof_count();
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(velocity.mesh().triangle_count()) * 36);
  for (int t = 0; t < velocity.mesh().triangle_count(); ++t) {
    const auto geo = triangle_geometry(velocity.mesh(), t);
    Eigen::Matrix<double, 3, 6> bx = Eigen::Matrix<double, 3, 6>::Zero();
    Eigen::Matrix<double, 3, 6> by = Eigen::Matrix<double, 3, 6>::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Eigen::Vector3d& psi = rule.points[q];
      const auto g = p2_gradients(rule.points[q], geo.grad_lambda);
      const double w = 2.0 * geo.area * rule.weights[q];
      bx.noalias() += w * psi * g.row(0);
      by.noalias() += w * psi * g.row(1);
    }
    const auto vd = velocity.cell_dofs(t);
    const auto pd = pressure.cell_dofs(t);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 6; ++j) {
        triplets.emplace_back(pd[i], vd[j], bx(i, j));
        triplets.emplace_back(pd[i], vd[j] + offset, by(i, j));
      }
  }
  return from_triplets(pressure.dof_count(), velocity.dof_count(), triplets);
}

Eigen::VectorXd pressure_mean_weights(const FunctionSpace& pressure) {
  if (pressure.family() == Family::velocity_p2)
    throw InvalidArgument("pressure_mean_weights: expects a pressure space");
  Eigen::VectorXd m = Eigen::VectorXd::Zero(pressure.dof_count());
  for (int t = 0; t < pressure.mesh().triangle_count(); ++t) {
    const double a = pressure.mesh().signed_area(t);
    for (int d : pressure.cell_dofs(t)) m(d) += a / 3.0;
  }
  return m;
}

Eigen::VectorXd assemble_load(const FunctionSpace& velocity, const VectorFunction& f, double t) {
  require_velocity(velocity, "assemble_load");
  const auto& rule = rule6();
  const int offset = velocity.scalar_dof_count();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(velocity.dof_count());
  for (int cell = 0; cell < velocity.mesh().triangle_count(); ++cell) {
    const auto geo = triangle_geometry(velocity.mesh(), cell);
    const auto dofs = velocity.cell_dofs(cell);
    Eigen::Matrix<double, 6, 2> local = Eigen::Matrix<double, 6, 2>::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Eigen::Vector2d val = f(geo.point(rule.points[q]), t);
      local.noalias() += (2.0 * geo.area * rule.weights[q]) * p2_values(rule.points[q]) * val.transpose();
    }
    for (int i = 0; i < 6; ++i) {
      out(dofs[i]) += local(i, 0);
      out(dofs[i] + offset) += local(i, 1);
    }
  }
  return out;
}

FEField interpolate(std::shared_ptr<const FunctionSpace> velocity, const VectorFunction& f, double t) {
  require_velocity(*velocity, "interpolate");
  FEField out(velocity);
  const int n = velocity->scalar_dof_count();
  const auto& nodes = velocity->dof_coordinates();
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d val = f(nodes.col(i), t);
    out.values(i) = val.x();
    out.values(i + n) = val.y();
  }
  return out;
}

FEField interpolate_scalar(std::shared_ptr<const FunctionSpace> pressure, const ScalarFunction& f, double t) {
  if (pressure->family() == Family::velocity_p2)
    throw InvalidArgument("interpolate_scalar: expects a pressure space");
  FEField out(pressure);
  const auto& nodes = pressure->dof_coordinates();
  for (int i = 0; i < pressure->dof_count(); ++i) out.values(i) = f(nodes.col(i), t);
  return out;
}

Eigen::Vector2d evaluate(const FEField& field, int cell, const Eigen::Vector3d& l) {
  const auto dofs = field.space->cell_dofs(cell);
  const auto phi = p2_values(l);
  return {local_component(field, dofs, 0).dot(phi), local_component(field, dofs, 1).dot(phi)};
}

Eigen::Matrix2d evaluate_gradient(const FEField& field, int cell, const Eigen::Vector3d& l) {
  const auto geo = triangle_geometry(field.space->mesh(), cell);
  const auto dofs = field.space->cell_dofs(cell);
  const auto g = p2_gradients(l, geo.grad_lambda);
  Eigen::Matrix2d out;
  out.row(0) = (g * local_component(field, dofs, 0)).transpose();
  out.row(1) = (g * local_component(field, dofs, 1)).transpose();
  return out;
}

namespace {

// Sum over cells and quadrature points of w * integrand(cell, point, x).
template <typename Integrand>
double integrate(const FunctionSpace& space, const QuadratureRule<double>& rule, Integrand&& integrand) {
  double sum = 0.0;
  for (int cell = 0; cell < space.mesh().triangle_count(); ++cell) {
    const auto geo = triangle_geometry(space.mesh(), cell);
    for (std::size_t q = 0; q < rule.size(); ++q)
      sum += 2.0 * geo.area * rule.weights[q] * integrand(cell, rule.points[q], geo.point(rule.points[q]));
  }
  return sum;
}

}  // namespace

double l2_norm(const FEField& f) {
  require_velocity(*f.space, "l2_norm");
  return std::sqrt(integrate(*f.space, rule4(), [&](int c, const Eigen::Vector3d& l, const Eigen::Vector2d&) {
    return evaluate(f, c, l).squaredNorm();
  }));
}

double h1_seminorm(const FEField& f) {
  require_velocity(*f.space, "h1_seminorm");
  return std::sqrt(integrate(*f.space, rule4(), [&](int c, const Eigen::Vector3d& l, const Eigen::Vector2d&) {
    return evaluate_gradient(f, c, l).squaredNorm();
  }));
}

double div_l2(const FEField& f) {
  require_velocity(*f.space, "div_l2");
  return std::sqrt(integrate(*f.space, rule4(), [&](int c, const Eigen::Vector3d& l, const Eigen::Vector2d&) {
    const double d = evaluate_gradient(f, c, l).trace();
    return d * d;
  }));
}

double l2_error(const FEField& f, const VectorFunction& exact, double t) {
  require_velocity(*f.space, "l2_error");
  return std::sqrt(integrate(*f.space, rule6(), [&](int c, const Eigen::Vector3d& l, const Eigen::Vector2d& x) {
    return (evaluate(f, c, l) - exact(x, t)).squaredNorm();
  }));
}

double h1_error(const FEField& f, const GradientFunction& exact_gradient, double t) {
  require_velocity(*f.space, "h1_error");
  return std::sqrt(integrate(*f.space, rule6(), [&](int c, const Eigen::Vector3d& l, const Eigen::Vector2d& x) {
    return (evaluate_gradient(f, c, l) - exact_gradient(x, t)).squaredNorm();
  }));
}

}  // namespace ensmhd
