#pragma once

#include "ensmhd/dirichlet.hpp"
#include "ensmhd/params.hpp"
#include "ensmhd/saddle.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace ensmhd {

// ---------------------------------------------------------------------------
// Elsasser variables

struct ElsasserFields {
  FEField v, w;
};

struct PrimitiveFields {
  FEField u, B;
};

/// v = u + sqrt(s) B, w = u - sqrt(s) B.
ElsasserFields elsasser_from_primitive(const FEField& u, const FEField& B, double s);

/// u = (v + w) / 2, B = (v - w) / (2 sqrt(s)).
PrimitiveFields primitive_from_elsasser(const FEField& v, const FEField& w, double s);

// ---------------------------------------------------------------------------
// Discretization shared by every member

enum class ElementPair { taylor_hood, scott_vogelius };

struct Discretization {
  std::shared_ptr<const Mesh> mesh;
  ElementPair pair = ElementPair::taylor_hood;
  std::shared_ptr<const FunctionSpace> velocity;
  std::shared_ptr<const FunctionSpace> pressure;
  SparseMatrix mass;
  SparseMatrix stiffness;
  SparseMatrix divergence;
  /// Integrals of the pressure basis; pressures are returned with zero mean.
  Eigen::VectorXd mean_weights;
  /// Every boundary velocity dof, indexed in the monolithic system.
  DirichletConstraint constraint;

  int system_dimension() const { return velocity->dof_count() + pressure->dof_count(); }
};

/// Scott-Vogelius needs a barycentrically refined mesh (ConfigError otherwise).
std::shared_ptr<const Discretization> make_discretization(std::shared_ptr<const Mesh> mesh, ElementPair pair);

// ---------------------------------------------------------------------------
// Ensemble state

enum class Variable { v, w };

/// J members at time levels n and n-1 plus the latest pressures.
struct EnsembleState {
  std::shared_ptr<const FunctionSpace> velocity;
  std::shared_ptr<const FunctionSpace> pressure;
  int step = 0;
  double time = 0.0;
  std::vector<Eigen::VectorXd> v, v_prev, w, w_prev;
  std::vector<Eigen::VectorXd> q, r;

  int members() const { return static_cast<int>(v.size()); }
  const std::vector<Eigen::VectorXd>& current(Variable x) const { return x == Variable::v ? v : w; }
  const std::vector<Eigen::VectorXd>& previous(Variable x) const { return x == Variable::v ? v_prev : w_prev; }
};

/// <u>^n = (1/J) sum_j (2 u_j^n - u_j^{n-1}).
FEField ensemble_mean(const EnsembleState& state, Variable x);

/// u_j'^n = 2 u_j^n - u_j^{n-1} - <u>^n (j is zero-based).
FEField fluctuation(const EnsembleState& state, int j, Variable x);

/// (1/J) sum_j u_j^n, the ensemble average compared against exact solutions.
FEField ensemble_average(const EnsembleState& state, Variable x);

/// dt * max_j {|grad v_j'|^2, |grad w_j'|^2} / (alpha h^2); +inf when alpha <= 0.
double stability_indicator(const EnsembleState& state, const SchemeParams& params, double h);

// ---------------------------------------------------------------------------
// Problem data and timestepping

/// Data of one ensemble member in Elsasser variables. Empty forcing means zero.
struct MemberData {
  VectorFunction v0, w0;
  VectorFunction f1, f2;
  BoundaryData v_boundary, w_boundary;
};

enum class SolveMode {
  shared,      ///< one factorization per subproblem, J right-hand sides
  per_member,  ///< reference mode: one factorization per member and subproblem
};

enum class InitialData {
  /// Discretely divergence-free H1 projection of the interpolant, with the
  /// boundary data at t = 0 imposed.
  projected,
  /// Plain nodal interpolant.
  interpolated,
};

struct StepperOptions {
  SolveMode mode = SolveMode::shared;
  InitialData initial = InitialData::projected;
  /// >= 2 solves the v and w subproblems concurrently.
  int threads = 1;
};

struct StepReport {
  int step = 0;
  double time = 0.0;
  double stability_indicator = 0.0;
  double max_grad_fluctuation_v = 0.0;
  double max_grad_fluctuation_w = 0.0;
  double max_residual_v = 0.0;
  double max_residual_w = 0.0;
  int factorizations = 0;
  double seconds = 0.0;
};

class EnsembleStepper {
public:
  EnsembleStepper(std::shared_ptr<const Discretization> disc, PhysicalParams phys, SchemeParams params,
                  std::vector<MemberData> members, StepperOptions options = {});
  ~EnsembleStepper();
  EnsembleStepper(const EnsembleStepper&) = delete;
  EnsembleStepper& operator=(const EnsembleStepper&) = delete;

  const Discretization& discretization() const { return *disc_; }
  const PhysicalParams& physical() const { return phys_; }
  const SchemeParams& params() const { return params_; }

  /// Initial data at n = 0 (both stored levels equal).
  EnsembleState initial_state() const;

  /// First step: linearized backward Euler with the plain ensemble mean
  /// advecting implicitly and fluctuations and cross-viscous terms lagged.
  StepReport bootstrap(EnsembleState& state);

  /// One BDF2 theta step from levels n, n-1 to n+1.
  StepReport advance(EnsembleState& state);

  int total_factorizations() const;

private:
  struct Solved {
    std::vector<Eigen::VectorXd> velocity, pressure;
    double max_residual = 0.0;
  };
  Solved solve_subproblem(Variable target, const EnsembleState& state, bool first_order,
                          SaddleFactorization& fac) const;
  StepReport step(EnsembleState& state, bool first_order);

  std::shared_ptr<const Discretization> disc_;
  PhysicalParams phys_;
  SchemeParams params_;
  std::vector<MemberData> members_;
  StepperOptions options_;
  std::unique_ptr<SaddleFactorization> fac_v_, fac_w_;
};

struct RunSummary {
  std::vector<StepReport> reports;
  EnsembleState final_state;
};

using StepObserver = std::function<void(const EnsembleState&, const StepReport&)>;

/// Bootstrap plus M-1 advances. The observer sees every level n >= 1. Step
/// failures are rethrown with the step index.
RunSummary run(EnsembleStepper& stepper, const StepObserver& observer = {});

/// Per-member energy functional of the stability estimate,
///   |v^n|^2 + |2v^n - v^{n-1}|^2 + |w^n|^2 + |2w^n - w^{n-1}|^2
///     + alpha dt sum_{k=2}^n (|grad v^k|^2 + |grad w^k|^2).
class EnergyMonitor {
public:
  EnergyMonitor(const Discretization& disc, const SchemeParams& params);
  /// Feed level n (called for increasing n); returns one value per member.
  std::vector<double> update(const EnsembleState& state);

private:
  const Discretization& disc_;
  SchemeParams params_;
  std::vector<double> dissipation_;
};

}  // namespace ensmhd
