#include "ensmhd/scheme.hpp"

#include "ensmhd/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <set>

namespace ensmhd {

// ---------------------------------------------------------------------------
// Parameters

void PhysicalParams::validate() const {
  if (!(nu > 0.0) || !(nu_m > 0.0) || !(s > 0.0))
    throw InvalidArgument("physical parameters nu, nu_m and s must be positive");
}

double select_theta(double nu, double nu_m) {
  if (!(nu > 0.0) || !(nu_m > 0.0)) throw InvalidArgument("select_theta: nu and nu_m must be positive");
  const double r = std::max(nu / nu_m, nu_m / nu);
  if (r <= 2.0) return 1.0;
  return 1.0 / (r - 1.0);
}

bool theta_admissible(double nu, double nu_m, double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) return false;
  constexpr double slack = 1e-12;
  const double ratio = nu / nu_m;
  const double lower = theta / (1.0 + theta);
  if (ratio < lower * (1.0 - slack)) return false;
  if (theta == 0.0) return true;
  const double upper = (1.0 + theta) / theta;
  return ratio <= upper * (1.0 + slack);
}

ViscousMargin viscous_margin(double nu, double nu_m, double theta) {
  ViscousMargin m;
  m.alpha = nu + nu_m - std::abs(nu - nu_m) * (1.0 + 2.0 * theta);
  if (std::abs(m.alpha) <= 1e-13 * (nu + nu_m)) m.alpha = 0.0;
  m.at_boundary = m.alpha <= 0.0;
  return m;
}

int SchemeParams::steps() const { return static_cast<int>(std::lround(end_time / dt)); }

SchemeParams make_scheme_params(const PhysicalParams& phys, double theta, double dt, double end_time, int members) {
  phys.validate();
  SchemeParams p;
  p.theta = theta < 0.0 ? select_theta(phys.nu, phys.nu_m) : theta;
  if (!(p.theta >= 0.0 && p.theta <= 1.0)) throw ConfigError("theta must lie in [0, 1]");
  if (!theta_admissible(phys.nu, phys.nu_m, p.theta))
    throw ConfigError("theta violates theta/(1+theta) <= nu/nu_m <= (1+theta)/theta");
  if (!(dt > 0.0) || !(end_time > 0.0)) throw ConfigError("dt and T must be positive");
  const double m = end_time / dt;
  const long steps = std::lround(m);
  if (steps < 2 || std::abs(m - static_cast<double>(steps)) > 1e-9 * m)
    throw ConfigError("T / dt must be an integer >= 2");
  if (members < 1) throw ConfigError("ensemble size J must be >= 1");
  p.dt = dt;
  p.end_time = end_time;
  p.members = members;
  p.margin = viscous_margin(phys.nu, phys.nu_m, p.theta);
  return p;
}

// ---------------------------------------------------------------------------
// Elsasser variables

namespace {

void require_same(const FEField& a, const FEField& b, const char* who) {
  if (!a.space || a.space != b.space || a.values.size() != b.values.size())
    throw InvalidArgument(std::string(who) + ": fields live on different spaces");
}

}  // namespace

ElsasserFields elsasser_from_primitive(const FEField& u, const FEField& B, double s) {
  require_same(u, B, "elsasser_from_primitive");
  if (!(s > 0.0)) throw InvalidArgument("elsasser_from_primitive: s must be positive");
  const double rs = std::sqrt(s);
  return {FEField(u.space, u.values + rs * B.values), FEField(u.space, u.values - rs * B.values)};
}

PrimitiveFields primitive_from_elsasser(const FEField& v, const FEField& w, double s) {
  require_same(v, w, "primitive_from_elsasser");
  if (!(s > 0.0)) throw InvalidArgument("primitive_from_elsasser: s must be positive");
  const double rs = std::sqrt(s);
  return {FEField(v.space, 0.5 * (v.values + w.values)), FEField(v.space, (v.values - w.values) / (2.0 * rs))};
}

// ---------------------------------------------------------------------------
// Discretization

std::shared_ptr<const Discretization> make_discretization(std::shared_ptr<const Mesh> mesh, ElementPair pair) {
  auto disc = std::make_shared<Discretization>();
  disc->mesh = mesh;
  disc->pair = pair;
  disc->velocity = build_space(mesh, Family::velocity_p2);
  disc->pressure =
      build_space(mesh, pair == ElementPair::scott_vogelius ? Family::pressure_p1_disc : Family::pressure_p1);
  disc->mass = assemble_mass(*disc->velocity);
  disc->stiffness = assemble_stiffness(*disc->velocity);
  disc->divergence = assemble_divergence(*disc->velocity, *disc->pressure);
  disc->mean_weights = pressure_mean_weights(*disc->pressure);
  std::vector<int> dofs;
  for (BoundaryTag tag : disc->velocity->boundary_tags()) {
    const auto& list = disc->velocity->boundary_dofs(tag);
    dofs.insert(dofs.end(), list.begin(), list.end());
  }
  disc->constraint = DirichletConstraint(std::move(dofs), disc->system_dimension());
  return disc;
}

// ---------------------------------------------------------------------------
// Means and fluctuations

namespace {

Eigen::VectorXd extrapolated(const EnsembleState& s, int j, Variable x) {
  return 2.0 * s.current(x)[j] - s.previous(x)[j];
}

// Mean written as e_1 + (1/J) sum (e_j - e_1): equal members give their
// common value exactly.
template <typename Member>
Eigen::VectorXd member_mean(int members, Member&& member) {
  const Eigen::VectorXd first = member(0);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(first.size());
  for (int j = 1; j < members; ++j) acc += member(j) - first;
  return first + acc / static_cast<double>(members);
}

void require_state(const EnsembleState& s) {
  if (s.members() < 1 || !s.velocity) throw InvalidArgument("ensemble state has no members");
}

double grad_norm_sq(const SparseMatrix& stiffness, const Eigen::VectorXd& u) { return u.dot(stiffness * u); }

}  // namespace

FEField ensemble_mean(const EnsembleState& state, Variable x) {
  require_state(state);
  return FEField(state.velocity, member_mean(state.members(), [&](int j) { return extrapolated(state, j, x); }));
}

FEField fluctuation(const EnsembleState& state, int j, Variable x) {
  require_state(state);
  if (j < 0 || j >= state.members()) throw InvalidArgument("fluctuation: member index out of range");
  return FEField(state.velocity, extrapolated(state, j, x) - ensemble_mean(state, x).values);
}

FEField ensemble_average(const EnsembleState& state, Variable x) {
  require_state(state);
  return FEField(state.velocity, member_mean(state.members(), [&](int j) { return state.current(x)[j]; }));
}

double stability_indicator(const EnsembleState& state, const SchemeParams& params, double h) {
  require_state(state);
  double worst = 0.0;
  for (Variable x : {Variable::v, Variable::w}) {
    const FEField mean = ensemble_mean(state, x);
    for (int j = 0; j < state.members(); ++j) {
      const FEField f(state.velocity, extrapolated(state, j, x) - mean.values);
      worst = std::max(worst, h1_seminorm(f) * h1_seminorm(f));
    }
  }
  if (params.margin.alpha <= 0.0) return std::numeric_limits<double>::infinity();
  return params.dt * worst / (params.margin.alpha * h * h);
}

// ---------------------------------------------------------------------------
// Stepper

EnsembleStepper::EnsembleStepper(std::shared_ptr<const Discretization> disc, PhysicalParams phys,
                                 SchemeParams params, std::vector<MemberData> members, StepperOptions options)
    : disc_(std::move(disc)),
      phys_(phys),
      params_(params),
      members_(std::move(members)),
      options_(options),
      fac_v_(std::make_unique<SaddleFactorization>()),
      fac_w_(std::make_unique<SaddleFactorization>()) {
  phys_.validate();
  if (static_cast<int>(members_.size()) != params_.members)
    throw InvalidArgument("EnsembleStepper: member data count differs from J");
  for (const auto& m : members_)
    if (!m.v0 || !m.w0) throw ConfigError("EnsembleStepper: every member needs initial v and w");
}

EnsembleStepper::~EnsembleStepper() = default;

int EnsembleStepper::total_factorizations() const {
  return fac_v_->numeric_factorizations() + fac_w_->numeric_factorizations();
}

EnsembleState EnsembleStepper::initial_state() const {
  EnsembleState s;
  s.velocity = disc_->velocity;
  s.pressure = disc_->pressure;
  for (const auto& m : members_) {
    s.v.push_back(interpolate(disc_->velocity, m.v0, 0.0).values);
    s.w.push_back(interpolate(disc_->velocity, m.w0, 0.0).values);
    s.q.push_back(Eigen::VectorXd::Zero(disc_->pressure->dof_count()));
    s.r.push_back(Eigen::VectorXd::Zero(disc_->pressure->dof_count()));
  }
  if (options_.initial == InitialData::projected) {
    // Find u_h with K u_h - B^T p = K I_h u and u_h = g(0) on the boundary.
    const Discretization& d = *disc_;
    const SaddleSystem sys = compose_system(d.stiffness, d.divergence, PressureGauge::pinned);
    SparseMatrix lift;
    const SparseMatrix matrix = d.constraint.eliminate(sys.matrix, &lift);
    const int nv = d.velocity->dof_count();
    const int members = static_cast<int>(members_.size());
    Eigen::MatrixXd rhs(sys.dimension(), 2 * members);
    for (int j = 0; j < members; ++j) {
      for (int k = 0; k < 2; ++k) {
        const Eigen::VectorXd& u = k == 0 ? s.v[j] : s.w[j];
        const BoundaryData& data = k == 0 ? members_[j].v_boundary : members_[j].w_boundary;
        Eigen::VectorXd b = Eigen::VectorXd::Zero(sys.dimension());
        b.head(nv) = d.stiffness * u;
        const DirichletValues bc = dirichlet_values(*d.velocity, data, 0.0);
        if (bc.dofs != d.constraint.dofs()) throw ConfigError("boundary data does not cover every boundary dof");
        rhs.col(2 * j + k) = d.constraint.constrain_rhs(lift, b, bc.values);
      }
    }
    SaddleFactorization fac;
    fac.factorize(matrix);
    const Eigen::MatrixXd x = fac.solve_multi(rhs);
    for (int j = 0; j < members; ++j) {
      s.v[j] = x.col(2 * j).head(nv);
      s.w[j] = x.col(2 * j + 1).head(nv);
    }
  }
  s.v_prev = s.v;
  s.w_prev = s.w;
  return s;
}

EnsembleStepper::Solved EnsembleStepper::solve_subproblem(Variable target, const EnsembleState& state,
                                                          bool first_order, SaddleFactorization& fac) const {
  const Discretization& d = *disc_;
  const Variable other = target == Variable::v ? Variable::w : Variable::v;
  const auto& self_now = state.current(target);
  const auto& self_prev = state.previous(target);
  const auto& other_now = state.current(other);
  const auto& other_prev = state.previous(other);
  const int members = state.members();
  const double dt = params_.dt;
  const double theta = params_.theta;
  const double t_next = (state.step + 1) * dt;
  const double nu_sum = 0.5 * (phys_.nu + phys_.nu_m);
  const double nu_diff = 0.5 * (phys_.nu - phys_.nu_m);

  const FEField mean = first_order ? ensemble_average(state, other) : ensemble_mean(state, other);
  const double c0 = first_order ? 1.0 / dt : 1.5 / dt;
  const SparseMatrix block = c0 * d.mass + nu_sum * d.stiffness + assemble_convection(*d.velocity, mean);
  const SaddleSystem sys = compose_system(block, d.divergence, PressureGauge::pinned);
  SparseMatrix lift;
  const SparseMatrix matrix = d.constraint.eliminate(sys.matrix, &lift);

  const int nv = d.velocity->dof_count();
  Eigen::MatrixXd rhs(sys.dimension(), members);
  for (int j = 0; j < members; ++j) {
    Eigen::VectorXd history, lagged, cross;
    if (first_order) {
      history = self_now[j] / dt;
      lagged = self_now[j];
      cross = other_now[j];
    } else {
      history = (4.0 * self_now[j] - self_prev[j]) / (2.0 * dt);
      lagged = 2.0 * self_now[j] - self_prev[j];
      cross = (1.0 + theta) * other_now[j] - theta * other_prev[j];
    }
    const Eigen::VectorXd other_level = first_order ? other_now[j] : Eigen::VectorXd(2.0 * other_now[j] - other_prev[j]);
    const FEField fluct(d.velocity, other_level - mean.values);

    Eigen::VectorXd b = Eigen::VectorXd::Zero(sys.dimension());
    b.head(nv) = d.mass * history - apply_convection(fluct, lagged) - nu_diff * (d.stiffness * cross);
    const auto& member = members_[static_cast<std::size_t>(j)];
    const VectorFunction& forcing = target == Variable::v ? member.f1 : member.f2;
    if (forcing) b.head(nv) += assemble_load(*d.velocity, forcing, t_next);

    const DirichletValues bc =
        dirichlet_values(*d.velocity, target == Variable::v ? member.v_boundary : member.w_boundary, t_next);
    if (bc.dofs != d.constraint.dofs())
      throw ConfigError("boundary data does not cover every boundary dof");
    rhs.col(j) = d.constraint.constrain_rhs(lift, b, bc.values);
  }

  Eigen::MatrixXd x(rhs.rows(), members);
  if (options_.mode == SolveMode::shared) {
    fac.factorize(matrix);
    x = fac.solve_multi(rhs);
  } else {
    for (int j = 0; j < members; ++j) {
      fac.factorize(matrix);
      x.col(j) = fac.solve(rhs.col(j));
    }
  }

  Solved out;
  const int np = d.pressure->dof_count();
  for (int j = 0; j < members; ++j) {
    out.velocity.push_back(x.col(j).head(nv));
    Eigen::VectorXd p = x.col(j).segment(nv, np);
    p.array() -= d.mean_weights.dot(p) / d.mean_weights.sum();
    out.pressure.push_back(std::move(p));
    out.max_residual = std::max(out.max_residual, relative_residual(matrix, x.col(j), rhs.col(j)));
  }
  return out;
}

StepReport EnsembleStepper::step(EnsembleState& state, bool first_order) {
  const auto start = std::chrono::steady_clock::now();
  StepReport rep;
  rep.step = state.step + 1;
  rep.time = rep.step * params_.dt;

  for (Variable x : {Variable::v, Variable::w}) {
    const FEField mean = first_order ? ensemble_average(state, x) : ensemble_mean(state, x);
    double worst = 0.0;
    for (int j = 0; j < state.members(); ++j) {
      const Eigen::VectorXd level = first_order ? state.current(x)[j] : extrapolated(state, j, x);
      worst = std::max(worst, grad_norm_sq(disc_->stiffness, level - mean.values));
    }
    (x == Variable::v ? rep.max_grad_fluctuation_v : rep.max_grad_fluctuation_w) = std::sqrt(worst);
  }
  const double h = disc_->mesh->h_max();
  const double worst_sq = std::max(rep.max_grad_fluctuation_v * rep.max_grad_fluctuation_v,
                                   rep.max_grad_fluctuation_w * rep.max_grad_fluctuation_w);
  rep.stability_indicator = params_.margin.alpha > 0.0
                                ? params_.dt * worst_sq / (params_.margin.alpha * h * h)
                                : std::numeric_limits<double>::infinity();

  const int before = total_factorizations();
  Solved sv, sw;
  if (options_.threads >= 2) {
    auto fut = std::async(std::launch::async,
                          [&] { return solve_subproblem(Variable::w, state, first_order, *fac_w_); });
    sv = solve_subproblem(Variable::v, state, first_order, *fac_v_);
    sw = fut.get();
  } else {
    // One factorization object serves both subproblems so they share the
    // symbolic analysis.
    sv = solve_subproblem(Variable::v, state, first_order, *fac_v_);
    sw = solve_subproblem(Variable::w, state, first_order, *fac_v_);
  }
  rep.factorizations = total_factorizations() - before;

  for (int j = 0; j < state.members(); ++j) {
    if (!sv.velocity[j].allFinite() || !sv.pressure[j].allFinite())
      throw DivergenceError(rep.step, "non-finite v solution for member " + std::to_string(j + 1));
    if (!sw.velocity[j].allFinite() || !sw.pressure[j].allFinite())
      throw DivergenceError(rep.step, "non-finite w solution for member " + std::to_string(j + 1));
  }
  rep.max_residual_v = sv.max_residual;
  rep.max_residual_w = sw.max_residual;

  state.v_prev = std::move(state.v);
  state.w_prev = std::move(state.w);
  state.v = std::move(sv.velocity);
  state.w = std::move(sw.velocity);
  state.q = std::move(sv.pressure);
  state.r = std::move(sw.pressure);
  state.step = rep.step;
  state.time = rep.time;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

StepReport EnsembleStepper::bootstrap(EnsembleState& state) {
  if (state.step != 0) throw InvalidArgument("bootstrap: state must be at n = 0");
  return step(state, true);
}

StepReport EnsembleStepper::advance(EnsembleState& state) {
  if (state.step < 1) throw InvalidArgument("advance: two time levels required (bootstrap first)");
  return step(state, false);
}

RunSummary run(EnsembleStepper& stepper, const StepObserver& observer) {
  RunSummary out;
  EnsembleState state = stepper.initial_state();
  const int steps = stepper.params().steps();
  for (int n = 0; n < steps; ++n) {
    StepReport rep;
    try {
      rep = n == 0 ? stepper.bootstrap(state) : stepper.advance(state);
    } catch (const FactorizationError& e) {
      throw FactorizationError("step " + std::to_string(n + 1) + ": " + e.what());
    }
    if (observer) observer(state, rep);
    out.reports.push_back(rep);
  }
  out.final_state = std::move(state);
  return out;
}

// ---------------------------------------------------------------------------
// Energy

EnergyMonitor::EnergyMonitor(const Discretization& disc, const SchemeParams& params)
    : disc_(disc), params_(params) {}

std::vector<double> EnergyMonitor::update(const EnsembleState& state) {
  if (dissipation_.empty()) dissipation_.assign(static_cast<std::size_t>(state.members()), 0.0);
  const SparseMatrix& M = disc_.mass;
  const SparseMatrix& K = disc_.stiffness;
  std::vector<double> out;
  for (int j = 0; j < state.members(); ++j) {
    const Eigen::VectorXd& v = state.v[j];
    const Eigen::VectorXd& w = state.w[j];
    const Eigen::VectorXd ev = 2.0 * v - state.v_prev[j];
    const Eigen::VectorXd ew = 2.0 * w - state.w_prev[j];
    if (state.step >= 2)
      dissipation_[j] += params_.margin.alpha * params_.dt * (v.dot(K * v) + w.dot(K * w));
    out.push_back(v.dot(M * v) + ev.dot(M * ev) + w.dot(M * w) + ew.dot(M * ew) + dissipation_[j]);
  }
  return out;
}

}  // namespace ensmhd
