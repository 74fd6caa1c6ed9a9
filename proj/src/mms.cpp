#include "ensmhd/mms.hpp"

#include "ensmhd/errors.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace ensmhd {

namespace manufactured {

namespace {
double big_e(double t) { return 1.0 + std::exp(t); }
}  // namespace

Eigen::Vector2d v(const Eigen::Vector2d& x, double t) {
  const double e = big_e(t);
  return {std::cos(x.y()) + e * std::sin(x.y()), std::sin(x.x()) + e * std::cos(x.x())};
}

Eigen::Vector2d w(const Eigen::Vector2d& x, double t) {
  const double e = big_e(t);
  return {std::cos(x.y()) - e * std::sin(x.y()), std::sin(x.x()) - e * std::cos(x.x())};
}

Eigen::Matrix2d grad_v(const Eigen::Vector2d& x, double t) {
  const double e = big_e(t);
  Eigen::Matrix2d g;
  g << 0.0, -std::sin(x.y()) + e * std::cos(x.y()),
       std::cos(x.x()) - e * std::sin(x.x()), 0.0;
  return g;
}

Eigen::Matrix2d grad_w(const Eigen::Vector2d& x, double t) {
  const double e = big_e(t);
  Eigen::Matrix2d g;
  g << 0.0, -std::sin(x.y()) - e * std::cos(x.y()),
       std::cos(x.x()) + e * std::sin(x.x()), 0.0;
  return g;
}

Eigen::Vector2d dv_dt(const Eigen::Vector2d& x, double t) {
  return std::exp(t) * Eigen::Vector2d(std::sin(x.y()), std::cos(x.x()));
}

Eigen::Vector2d dw_dt(const Eigen::Vector2d& x, double t) {
  return -std::exp(t) * Eigen::Vector2d(std::sin(x.y()), std::cos(x.x()));
}

Eigen::Vector2d laplacian_v(const Eigen::Vector2d& x, double t) {
  const double e = big_e(t);
  return {-std::cos(x.y()) - e * std::sin(x.y()), -std::sin(x.x()) - e * std::cos(x.x())};
}

Eigen::Vector2d laplacian_w(const Eigen::Vector2d& x, double t) {
  const double e = big_e(t);
  return {-std::cos(x.y()) + e * std::sin(x.y()), -std::sin(x.x()) + e * std::cos(x.x())};
}

double p(const Eigen::Vector2d& x, double t) { return std::sin(x.x() + x.y()) * big_e(t); }

Eigen::Vector2d grad_p(const Eigen::Vector2d& x, double t) {
  const double g = std::cos(x.x() + x.y()) * big_e(t);
  return {g, g};
}

}  // namespace manufactured

double member_scale(int j, double epsilon) {
  switch (j) {
    case 1: return 1.0 + epsilon;
    case 2: return 1.0 - epsilon;
    case 3: return 1.0 + 2.0 * epsilon;
    case 4: return 1.0 - 2.0 * epsilon;
    default: throw InvalidArgument("member index must lie in 1..4");
  }
}

MemberFields member_fields(int j, double epsilon) {
  const double a = member_scale(j, epsilon);
  return {
      [a](const Eigen::Vector2d& x, double t) -> Eigen::Vector2d { return a * manufactured::v(x, t); },
      [a](const Eigen::Vector2d& x, double t) -> Eigen::Vector2d { return a * manufactured::w(x, t); },
      [a](const Eigen::Vector2d& x, double t) -> Eigen::Matrix2d { return a * manufactured::grad_v(x, t); },
      [a](const Eigen::Vector2d& x, double t) -> Eigen::Matrix2d { return a * manufactured::grad_w(x, t); },
  };
}

MemberForcing member_forcing(int j, double epsilon, const PhysicalParams& phys) {
  const double a = member_scale(j, epsilon);
  const double nu_sum = 0.5 * (phys.nu + phys.nu_m);
  const double nu_diff = 0.5 * (phys.nu - phys.nu_m);
  // Both fields are eigenfunctions of the Laplacian (eigenvalue -1), and the
  // convective terms only involve dv1/dy, dv2/dx (resp. for w).
  auto f1 = [=](const Eigen::Vector2d& x, double t) -> Eigen::Vector2d {
    const double e = 1.0 + std::exp(t), et = std::exp(t);
    const double sx = std::sin(x.x()), cx = std::cos(x.x()), sy = std::sin(x.y()), cy = std::cos(x.y());
    const double v1 = cy + e * sy, v2 = sx + e * cx;
    const double w1 = cy - e * sy, w2 = sx - e * cx;
    const double gp = e * std::cos(x.x() + x.y());
    return {a * et * sy + a * a * w2 * (-sy + e * cy) + nu_sum * a * v1 + nu_diff * a * w1 + gp,
            a * et * cx + a * a * w1 * (cx - e * sx) + nu_sum * a * v2 + nu_diff * a * w2 + gp};
  };
  auto f2 = [=](const Eigen::Vector2d& x, double t) -> Eigen::Vector2d {
    const double e = 1.0 + std::exp(t), et = std::exp(t);
    const double sx = std::sin(x.x()), cx = std::cos(x.x()), sy = std::sin(x.y()), cy = std::cos(x.y());
    const double v1 = cy + e * sy, v2 = sx + e * cx;
    const double w1 = cy - e * sy, w2 = sx - e * cx;
    const double gp = e * std::cos(x.x() + x.y());
    return {-a * et * sy + a * a * v2 * (-sy - e * cy) + nu_sum * a * w1 + nu_diff * a * v1 + gp,
            -a * et * cx + a * a * v1 * (cx + e * sx) + nu_sum * a * w2 + nu_diff * a * v2 + gp};
  };
  return {f1, f2};
}

std::vector<MemberData> mms_members(int members, double epsilon, const PhysicalParams& phys) {
  if (members < 1 || members > 4) throw ConfigError("the MMS perturbation pattern supports 1..4 members");
  std::vector<MemberData> out;
  for (int j = 1; j <= members; ++j) {
    const MemberFields fields = member_fields(j, epsilon);
    const MemberForcing forcing = member_forcing(j, epsilon, phys);
    MemberData m;
    m.v0 = fields.v;
    m.w0 = fields.w;
    m.f1 = forcing.f1;
    m.f2 = forcing.f2;
    m.v_boundary[BoundaryTag::all] = fields.v;
    m.w_boundary[BoundaryTag::all] = fields.w;
    out.push_back(std::move(m));
  }
  return out;
}

void EnsembleErrorTracker::observe(const EnsembleState& state) {
  const FEField v = ensemble_average(state, Variable::v);
  const FEField w = ensemble_average(state, Variable::w);
  const double t = state.time;
  const double gv = h1_error(v, manufactured::grad_v, t);
  const double gw = h1_error(w, manufactured::grad_w, t);
  sum_v_ += dt_ * gv * gv;
  sum_w_ += dt_ * gw * gw;
  last_l2_v_ = l2_error(v, manufactured::v, t);
  last_l2_w_ = l2_error(w, manufactured::w, t);
}

EnsembleErrors EnsembleErrorTracker::errors() const {
  EnsembleErrors e;
  e.v = {last_l2_v_, std::sqrt(sum_v_)};
  e.w = {last_l2_w_, std::sqrt(sum_w_)};
  return e;
}

double observed_rate(double coarse, double fine) { return std::log2(coarse / fine); }

void RateTable::write_csv(std::ostream& out) const {
  out << "level,h,dt,error_v,rate_v,error_w,rate_w\n";
  const auto old_flags = out.flags();
  const auto old_prec = out.precision();
  out << std::setprecision(10);
  auto rate = [&](double r) {
    if (std::isnan(r)) return std::string();
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << r;
    return s.str();
  };
  for (const auto& r : rows) {
    out << r.level << ',' << std::scientific << r.h << ',' << r.dt << ',' << r.error_v << ','
        << rate(r.rate_v) << ',' << r.error_w << ',' << rate(r.rate_w) << '\n';
  }
  out.flags(old_flags);
  out.precision(old_prec);
}

std::shared_ptr<const Mesh> mms_mesh(int n, ElementPair pair) {
  Mesh mesh = unit_square_mesh(n);
  if (pair == ElementPair::scott_vogelius) mesh = barycentric_refine(mesh);
  return std::make_shared<const Mesh>(std::move(mesh));
}

EnsembleErrors run_mms_case(const MmsSetup& setup, int grid, double end_time, int steps,
                            const StepObserver& observer) {
  const auto disc = make_discretization(mms_mesh(grid, setup.pair), setup.pair);
  const SchemeParams params =
      make_scheme_params(setup.phys, setup.theta, end_time / steps, end_time, setup.members);
  StepperOptions options;
  options.threads = setup.threads;
  EnsembleStepper stepper(disc, setup.phys, params, mms_members(setup.members, setup.epsilon, setup.phys),
                          options);
  EnsembleErrorTracker tracker(params.dt);
  run(stepper, [&](const EnsembleState& s, const StepReport& r) {
    tracker.observe(s);
    if (observer) observer(s, r);
  });
  return tracker.errors();
}

namespace {

void append_row(RateTable& table, int level, double h, double dt, const EnsembleErrors& e) {
  RateRow row;
  row.level = level;
  row.h = h;
  row.dt = dt;
  row.error_v = e.v.norm_2_1;
  row.error_w = e.w.norm_2_1;
  if (!table.rows.empty()) {
    row.rate_v = observed_rate(table.rows.back().error_v, row.error_v);
    row.rate_w = observed_rate(table.rows.back().error_w, row.error_w);
  }
  table.rows.push_back(row);
}

}  // namespace

RateTable temporal_convergence_study(const MmsSetup& setup, int grid, double end_time,
                                     const std::vector<int>& step_levels,
                                     const std::function<StepObserver(int)>& observers) {
  if (step_levels.size() < 3) throw ConfigError("a convergence study needs at least 3 levels");
  for (std::size_t k = 1; k < step_levels.size(); ++k)
    if (step_levels[k] != 2 * step_levels[k - 1]) throw ConfigError("temporal levels must halve dt");
  RateTable table;
  for (std::size_t k = 0; k < step_levels.size(); ++k) {
    const int level = static_cast<int>(k);
    try {
      const auto e = run_mms_case(setup, grid, end_time, step_levels[k], observers ? observers(level) : StepObserver{});
      append_row(table, level, 1.0 / grid, end_time / step_levels[k], e);
    } catch (const DivergenceError& e) {
      table.failure = "level " + std::to_string(level) + ": " + e.what();
      break;
    } catch (const FactorizationError& e) {
      table.failure = "level " + std::to_string(level) + ": " + e.what();
      break;
    }
  }
  return table;
}

RateTable spatial_convergence_study(const MmsSetup& setup, const std::vector<int>& grids, double end_time,
                                    int steps, const std::function<StepObserver(int)>& observers) {
  if (grids.size() < 3) throw ConfigError("a convergence study needs at least 3 levels");
  for (std::size_t k = 1; k < grids.size(); ++k)
    if (grids[k] != 2 * grids[k - 1]) throw ConfigError("spatial levels must halve h");
  RateTable table;
  for (std::size_t k = 0; k < grids.size(); ++k) {
    const int level = static_cast<int>(k);
    try {
      const auto e = run_mms_case(setup, grids[k], end_time, steps, observers ? observers(level) : StepObserver{});
      append_row(table, level, 1.0 / grids[k], end_time / steps, e);
    } catch (const DivergenceError& e) {
      table.failure = "level " + std::to_string(level) + ": " + e.what();
      break;
    } catch (const FactorizationError& e) {
      table.failure = "level " + std::to_string(level) + ": " + e.what();
      break;
    }
  }
  return table;
}

}  // namespace ensmhd
