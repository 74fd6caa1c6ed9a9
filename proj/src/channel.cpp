#include "ensmhd/channel.hpp"

#include "ensmhd/errors.hpp"
#include "ensmhd/mms.hpp"

#include <cmath>

namespace ensmhd {

Eigen::Vector2d channel_inflow_velocity(const Eigen::Vector2d& x) {
  return {x.y() * (10.0 - x.y()) / 25.0, 0.0};
}

std::shared_ptr<const Mesh> channel_mesh(double target_h) {
  return std::make_shared<const Mesh>(barycentric_refine(channel_step_mesh(target_h)));
}

MemberData channel_member(int j, double epsilon, double s) {
  const double a = member_scale(j, epsilon);
  const double rs = std::sqrt(s);
  const Eigen::Vector2d b0(0.0, 1.0);
  auto scaled = [a, rs, b0](double sign) {
    return [a, rs, b0, sign](const Eigen::Vector2d& x, double) -> Eigen::Vector2d {
      return a * (channel_inflow_velocity(x) + sign * rs * b0);
    };
  };
  auto wall = [rs, b0](double sign) {
    return [rs, b0, sign](const Eigen::Vector2d&, double) -> Eigen::Vector2d { return sign * rs * b0; };
  };
  MemberData m;
  m.v0 = scaled(1.0);
  m.w0 = scaled(-1.0);
  m.v_boundary = {{BoundaryTag::wall, wall(1.0)}, {BoundaryTag::inflow, scaled(1.0)}, {BoundaryTag::outflow, scaled(1.0)}};
  m.w_boundary = {{BoundaryTag::wall, wall(-1.0)}, {BoundaryTag::inflow, scaled(-1.0)}, {BoundaryTag::outflow, scaled(-1.0)}};
  return m;
}

ChannelRun run_channel(const std::shared_ptr<const Discretization>& disc, const ChannelConfig& config,
                       double epsilon, int members, const StepObserver& observer) {
  const SchemeParams params = make_scheme_params(config.phys, config.theta, config.dt, config.end_time, members);
  std::vector<MemberData> data;
  for (int j = 1; j <= members; ++j) data.push_back(channel_member(j, epsilon, config.phys.s));
  StepperOptions options;
  options.threads = config.threads;
  EnsembleStepper stepper(disc, config.phys, params, std::move(data), options);

  ChannelRun out;
  out.epsilon = epsilon;
  out.members = members;
  auto primitive = [&](const EnsembleState& s) {
    return primitive_from_elsasser(ensemble_average(s, Variable::v), ensemble_average(s, Variable::w),
                                   config.phys.s);
  };
  const RunSummary summary = run(stepper, [&](const EnsembleState& s, const StepReport& r) {
    const PrimitiveFields f = primitive(s);
    out.max_div_u = std::max(out.max_div_u, div_l2(f.u));
    out.max_div_B = std::max(out.max_div_B, div_l2(f.B));
    if (observer) observer(s, r);
  });
  const PrimitiveFields f = primitive(summary.final_state);
  out.u = f.u;
  out.B = f.B;
  out.steps = summary.final_state.step;
  return out;
}

ChannelDeviation compare_to_reference(const ChannelRun& run, const ChannelRun& reference) {
  if (run.u.space != reference.u.space) throw InvalidArgument("compare_to_reference: runs use different spaces");
  ChannelDeviation d;
  d.epsilon = run.epsilon;
  d.deviation_u = l2_norm(FEField(run.u.space, run.u.values - reference.u.values));
  d.deviation_B = l2_norm(FEField(run.B.space, run.B.values - reference.B.values));
  d.max_div_u = run.max_div_u;
  d.max_div_B = run.max_div_B;
  return d;
}

}  // namespace ensmhd
