#pragma once

#include "ensmhd/scheme.hpp"

#include <vector>

namespace ensmhd {

/// MHD flow over a unit step in a 40 x 10 channel (30 units plus a 10 unit
/// outflow extension). Inflow and outflow carry the parabolic velocity and
/// B = (0, 1); walls are no-slip with B = (0, 1).
struct ChannelConfig {
  PhysicalParams phys{0.001, 0.01, 0.001};
  double theta = -1.0;
  double dt = 1.0;
  double end_time = 40.0;
  double target_h = 0.85;
  std::vector<double> epsilons{0.1, 0.01, 0.001};
  int threads = 1;
};

/// u0 = (y (10 - y) / 25, 0).
Eigen::Vector2d channel_inflow_velocity(const Eigen::Vector2d& x);

/// Barycentrically refined channel mesh (Scott-Vogelius ready).
std::shared_ptr<const Mesh> channel_mesh(double target_h);

/// Member j (1-based) scales u0 and B0 in the initial data and in the
/// inflow/outflow data; walls are not perturbed.
MemberData channel_member(int j, double epsilon, double s);

struct ChannelRun {
  double epsilon = 0.0;
  int members = 0;
  /// Plain ensemble averages at T.
  FEField u, B;
  /// Largest div_l2 of the averaged u and B over all output steps.
  double max_div_u = 0.0;
  double max_div_B = 0.0;
  int steps = 0;
};

/// One ensemble run. epsilon = 0 with one member is the unperturbed flow.
ChannelRun run_channel(const std::shared_ptr<const Discretization>& disc, const ChannelConfig& config,
                       double epsilon, int members, const StepObserver& observer = {});

struct ChannelDeviation {
  double epsilon = 0.0;
  /// ||<u_h>(eps) - u_h(0)|| and the same for B, at T.
  double deviation_u = 0.0;
  double deviation_B = 0.0;
  double max_div_u = 0.0;
  double max_div_B = 0.0;
};

ChannelDeviation compare_to_reference(const ChannelRun& run, const ChannelRun& reference);

}  // namespace ensmhd
