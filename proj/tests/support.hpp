#pragma once

#include "ensmhd/mms.hpp"
#include "ensmhd/scheme.hpp"

#include <cmath>

namespace ensmhd::testing_support {

inline std::shared_ptr<const Discretization> square_disc(int n, ElementPair pair) {
  Mesh mesh = unit_square_mesh(n);
  if (pair == ElementPair::scott_vogelius) mesh = barycentric_refine(mesh);
  return make_discretization(std::make_shared<const Mesh>(std::move(mesh)), pair);
}

inline Eigen::Vector2d zero_field(const Eigen::Vector2d&, double) { return Eigen::Vector2d::Zero(); }

// Curls of stream functions vanishing with their gradients on the boundary of
// the unit square, so the fields are solenoidal and zero on the boundary.
inline Eigen::Vector2d swirl_v(const Eigen::Vector2d& x, double) {
  const double sx = std::sin(M_PI * x.x()), cx = std::cos(M_PI * x.x());
  const double sy = std::sin(M_PI * x.y()), cy = std::cos(M_PI * x.y());
  return {2.0 * M_PI * sx * sx * sy * cy, -2.0 * M_PI * sx * cx * sy * sy};
}

inline Eigen::Vector2d swirl_w(const Eigen::Vector2d& x, double) {
  const double sx = std::sin(2.0 * M_PI * x.x()), cx = std::cos(2.0 * M_PI * x.x());
  const double sy = std::sin(M_PI * x.y()), cy = std::cos(M_PI * x.y());
  return {M_PI * sx * sx * sy * cy, -2.0 * M_PI * sx * cx * sy * sy};
}

/// Unforced members with homogeneous Dirichlet data; member j scales the
/// initial fields by member_scale(j, epsilon).
inline std::vector<MemberData> decaying_members(int members, double epsilon) {
  std::vector<MemberData> out;
  for (int j = 1; j <= members; ++j) {
    const double a = member_scale(j, epsilon);
    MemberData m;
    m.v0 = [a](const Eigen::Vector2d& x, double t) { return Eigen::Vector2d(a * swirl_v(x, t)); };
    m.w0 = [a](const Eigen::Vector2d& x, double t) { return Eigen::Vector2d(a * swirl_w(x, t)); };
    m.v_boundary = {{BoundaryTag::all, zero_field}};
    m.w_boundary = {{BoundaryTag::all, zero_field}};
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace ensmhd::testing_support
