#pragma once

#include "ensmhd/scheme.hpp"

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace ensmhd {

/// Closed-form Elsasser solution on (0,1)^2 with E(t) = 1 + e^t:
///   v = (cos y + E sin y, sin x + E cos x),
///   w = (cos y - E sin y, sin x - E cos x),
///   p = sin(x + y) E,  lambda = 0 (so q = r = p).
namespace manufactured {

Eigen::Vector2d v(const Eigen::Vector2d& x, double t);
Eigen::Vector2d w(const Eigen::Vector2d& x, double t);
Eigen::Matrix2d grad_v(const Eigen::Vector2d& x, double t);
Eigen::Matrix2d grad_w(const Eigen::Vector2d& x, double t);
Eigen::Vector2d dv_dt(const Eigen::Vector2d& x, double t);
Eigen::Vector2d dw_dt(const Eigen::Vector2d& x, double t);
Eigen::Vector2d laplacian_v(const Eigen::Vector2d& x, double t);
Eigen::Vector2d laplacian_w(const Eigen::Vector2d& x, double t);
double p(const Eigen::Vector2d& x, double t);
Eigen::Vector2d grad_p(const Eigen::Vector2d& x, double t);

}  // namespace manufactured

/// Scale of member j (1-based): 1+eps, 1-eps, 1+2eps, 1-2eps. They average
/// to one, so the exact ensemble average is the unperturbed solution.
double member_scale(int j, double epsilon);

struct MemberFields {
  VectorFunction v, w;
  GradientFunction grad_v, grad_w;
};

MemberFields member_fields(int j, double epsilon);

struct MemberForcing {
  VectorFunction f1, f2;
};

/// Right-hand sides making member j an exact solution of the Elsasser
/// system, with the shared pressure q = r = p.
MemberForcing member_forcing(int j, double epsilon, const PhysicalParams& phys);

/// Data for members 1..J (J <= 4): perturbed initial values, forcing, and
/// time-dependent Dirichlet traces on the whole boundary.
std::vector<MemberData> mms_members(int members, double epsilon, const PhysicalParams& phys);

struct ErrorNorms {
  double final_l2 = 0.0;
  /// (dt sum_{n=1}^M |grad e^n|^2)^{1/2}
  double norm_2_1 = 0.0;
};

struct EnsembleErrors {
  ErrorNorms v, w;
};

/// Accumulates errors of the plain ensemble average against the unperturbed
/// solution; feed it every level n >= 1.
class EnsembleErrorTracker {
public:
  explicit EnsembleErrorTracker(double dt) : dt_(dt) {}
  void observe(const EnsembleState& state);
  EnsembleErrors errors() const;

private:
  double dt_;
  double sum_v_ = 0.0, sum_w_ = 0.0;
  double last_l2_v_ = 0.0, last_l2_w_ = 0.0;
};

/// log2(coarse / fine).
double observed_rate(double coarse, double fine);

struct RateRow {
  int level = 0;
  double h = 0.0;
  double dt = 0.0;
  double error_v = 0.0;
  double rate_v = std::numeric_limits<double>::quiet_NaN();
  double error_w = 0.0;
  double rate_w = std::numeric_limits<double>::quiet_NaN();
};

struct RateTable {
  std::vector<RateRow> rows;
  /// Empty on success; otherwise the failure that stopped the study.
  std::string failure;

  bool complete() const { return failure.empty(); }
  void write_csv(std::ostream& out) const;
};

struct MmsSetup {
  PhysicalParams phys{0.01, 0.001, 1.0};
  double theta = -1.0;  // negative: select automatically
  int members = 4;
  double epsilon = 0.01;
  ElementPair pair = ElementPair::taylor_hood;
  int threads = 1;
};

/// Mesh for grid parameter n (spacing 1/n), barycentrically refined for SV.
std::shared_ptr<const Mesh> mms_mesh(int n, ElementPair pair);

/// One MMS run; the observer (optional) sees every level.
EnsembleErrors run_mms_case(const MmsSetup& setup, int grid, double end_time, int steps,
                            const StepObserver& observer = {});

/// Fixed grid, dt = end_time / steps for each entry of step_levels.
RateTable temporal_convergence_study(const MmsSetup& setup, int grid, double end_time,
                                     const std::vector<int>& step_levels,
                                     const std::function<StepObserver(int level)>& observers = {});

/// Fixed dt = end_time / steps, grid parameter n for each entry of grids.
RateTable spatial_convergence_study(const MmsSetup& setup, const std::vector<int>& grids, double end_time,
                                    int steps, const std::function<StepObserver(int level)>& observers = {});

}  // namespace ensmhd
