#pragma once

namespace ensmhd {

/// Kinematic viscosity, magnetic diffusivity and coupling number.
struct PhysicalParams {
  double nu = 0.0;
  double nu_m = 0.0;
  double s = 1.0;

  void validate() const;
};

/// Largest theta in [0,1] with theta/(1+theta) <= nu/nu_m <= (1+theta)/theta:
/// min(1, 1/(r-1)) for r = max(nu/nu_m, nu_m/nu).
double select_theta(double nu, double nu_m);

/// The theta condition with the boundary allowed (relative slack 1e-12).
bool theta_admissible(double nu, double nu_m, double theta);

struct ViscousMargin {
  double alpha = 0.0;
  /// alpha <= 0: theta sits on (or outside) the admissible boundary and the
  /// alpha-scaled stability indicator is meaningless.
  bool at_boundary = false;
};

/// alpha = nu + nu_m - |nu - nu_m| (1 + 2 theta). Values within rounding of
/// zero are reported as exactly zero.
ViscousMargin viscous_margin(double nu, double nu_m, double theta);

struct SchemeParams {
  double theta = 1.0;
  double dt = 0.0;
  double end_time = 0.0;
  int members = 1;
  ViscousMargin margin;

  /// Number of steps M with M * dt = end_time.
  int steps() const;
};

/// Validate and bundle scheme parameters. A negative theta selects
/// automatically. Requires end_time / dt to be an integer >= 2.
SchemeParams make_scheme_params(const PhysicalParams& phys, double theta, double dt, double end_time, int members);

}  // namespace ensmhd
