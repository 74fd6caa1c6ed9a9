#pragma once

#include "ensmhd/function_space.hpp"
#include "ensmhd/reference_element.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>

namespace ensmhd {

using SparseMatrix = Eigen::SparseMatrix<double>;

using VectorFunction = std::function<Eigen::Vector2d(const Eigen::Vector2d&, double)>;
using ScalarFunction = std::function<double(const Eigen::Vector2d&, double)>;
/// Jacobian of a vector field, G(i, j) = d u_i / d x_j.
using GradientFunction = std::function<Eigen::Matrix2d(const Eigen::Vector2d&, double)>;

TriangleGeometry<double> triangle_geometry(const Mesh& mesh, int cell);

// Velocity-space operators. Every operator on the velocity space is assembled
// with the full local coupling of each component, so all of them share one
// sparsity pattern.

SparseMatrix assemble_mass(const FunctionSpace& velocity);
SparseMatrix assemble_stiffness(const FunctionSpace& velocity);

/// Skew-symmetrized convection b*(a, u, v) = (a.grad u, v) + 1/2 (div a u, v),
/// row = test function v, column = trial u. Integrated exactly (degree 5).
SparseMatrix assemble_convection(const FunctionSpace& velocity, const FEField& advecting);

/// Action of the convection operator: returns N(a) * u without forming N.
Eigen::VectorXd apply_convection(const FEField& advecting, const Eigen::VectorXd& u);

/// B(q, i) = (psi_q, div phi_i); rows are pressure dofs, columns velocity dofs.
SparseMatrix assemble_divergence(const FunctionSpace& velocity, const FunctionSpace& pressure);

/// Integrals of the pressure basis functions, i.e. the row enforcing mean zero.
Eigen::VectorXd pressure_mean_weights(const FunctionSpace& pressure);

/// Load vector (f, phi_i) with the degree-6 rule.
Eigen::VectorXd assemble_load(const FunctionSpace& velocity, const VectorFunction& f, double t);

/// Nodal interpolation (vertex and edge-midpoint values for P2).
FEField interpolate(std::shared_ptr<const FunctionSpace> velocity, const VectorFunction& f, double t);
FEField interpolate_scalar(std::shared_ptr<const FunctionSpace> pressure, const ScalarFunction& f, double t);

/// Value and Jacobian of a velocity field at barycentric point l of a cell.
Eigen::Vector2d evaluate(const FEField& field, int cell, const Eigen::Vector3d& l);
Eigen::Matrix2d evaluate_gradient(const FEField& field, int cell, const Eigen::Vector3d& l);

double l2_norm(const FEField& f);
double h1_seminorm(const FEField& f);
double div_l2(const FEField& f);

/// ||f - exact|| and ||grad(f - exact)|| with the degree-6 rule.
double l2_error(const FEField& f, const VectorFunction& exact, double t);
double h1_error(const FEField& f, const GradientFunction& exact_gradient, double t);

}  // namespace ensmhd
