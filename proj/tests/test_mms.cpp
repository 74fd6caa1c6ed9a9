#include "ensmhd/errors.hpp"
#include "ensmhd/mms.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace ensmhd;
using Eigen::Matrix2d;
using Eigen::Vector2d;

namespace {

struct Sample {
  Vector2d x;
  double t;
};

std::vector<Sample> samples(int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Sample> out;
  for (int k = 0; k < count; ++k) out.push_back({Vector2d(u(rng), u(rng)), u(rng)});
  return out;
}

// Finite-difference derivatives of a vector field, step h.
Vector2d fd_dt(const VectorFunction& f, const Vector2d& x, double t, double h) {
  return (f(x, t + h) - f(x, t - h)) / (2.0 * h);
}

Matrix2d fd_grad(const VectorFunction& f, const Vector2d& x, double t, double h) {
  Matrix2d g;
  for (int d = 0; d < 2; ++d) {
    const Vector2d e = h * Vector2d::Unit(d);
    g.col(d) = (f(x + e, t) - f(x - e, t)) / (2.0 * h);
  }
  return g;
}

Vector2d fd_laplacian(const VectorFunction& f, const Vector2d& x, double t, double h) {
  Vector2d sum = -4.0 * f(x, t);
  for (int d = 0; d < 2; ++d) {
    const Vector2d e = h * Vector2d::Unit(d);
    sum += f(x + e, t) + f(x - e, t);
  }
  return sum / (h * h);
}

Vector2d fd_grad_scalar(const ScalarFunction& f, const Vector2d& x, double t, double h) {
  Vector2d g;
  for (int d = 0; d < 2; ++d) {
    const Vector2d e = h * Vector2d::Unit(d);
    g(d) = (f(x + e, t) - f(x - e, t)) / (2.0 * h);
  }
  return g;
}

const PhysicalParams kPhys{0.01, 0.001, 1.0};

}  // namespace

TEST(Members, ScaleFactors) {
  const double eps = 0.01;
  EXPECT_DOUBLE_EQ(member_scale(1, eps), 1.0 + eps);
  EXPECT_DOUBLE_EQ(member_scale(2, eps), 1.0 - eps);
  EXPECT_DOUBLE_EQ(member_scale(3, eps), 1.0 + 2.0 * eps);
  EXPECT_DOUBLE_EQ(member_scale(4, eps), 1.0 - 2.0 * eps);
  for (double e : {0.0, 0.001, 0.1, 0.37}) {
    double sum = 0.0;
    for (int j = 1; j <= 4; ++j) sum += member_scale(j, e);
    EXPECT_NEAR(sum / 4.0, 1.0, 1e-15);
  }
  EXPECT_THROW(member_scale(0, eps), InvalidArgument);
  EXPECT_THROW(member_scale(5, eps), InvalidArgument);
  EXPECT_THROW(mms_members(5, eps, kPhys), ConfigError);
  EXPECT_THROW(mms_members(0, eps, kPhys), ConfigError);
}

TEST(Members, AverageIsUnperturbedSolution) {
  for (const Sample& s : samples(20, 1)) {
    Vector2d v = Vector2d::Zero(), w = Vector2d::Zero();
    for (int j = 1; j <= 4; ++j) {
      v += member_fields(j, 0.1).v(s.x, s.t) / 4.0;
      w += member_fields(j, 0.1).w(s.x, s.t) / 4.0;
    }
    EXPECT_LE((v - manufactured::v(s.x, s.t)).norm(), 1e-14);
    EXPECT_LE((w - manufactured::w(s.x, s.t)).norm(), 1e-14);
  }
}

TEST(Members, ZeroEpsilonMakesMembersEqual) {
  const Sample s = samples(1, 2)[0];
  for (int j = 2; j <= 4; ++j) {
    EXPECT_EQ(member_fields(j, 0.0).v(s.x, s.t), member_fields(1, 0.0).v(s.x, s.t));
    EXPECT_EQ(member_forcing(j, 0.0, kPhys).f1(s.x, s.t), member_forcing(1, 0.0, kPhys).f1(s.x, s.t));
    EXPECT_EQ(member_forcing(j, 0.0, kPhys).f2(s.x, s.t), member_forcing(1, 0.0, kPhys).f2(s.x, s.t));
  }
}

TEST(Manufactured, BaseFieldsAreSolenoidal) {
  for (const Sample& s : samples(100, 3)) {
    EXPECT_LE(std::abs(manufactured::grad_v(s.x, s.t).trace()), 1e-12);
    EXPECT_LE(std::abs(manufactured::grad_w(s.x, s.t).trace()), 1e-12);
  }
}

TEST(Manufactured, DerivativesMatchFiniteDifferences) {
  const double h = 1e-5;
  for (const Sample& s : samples(50, 4)) {
    EXPECT_LE((manufactured::dv_dt(s.x, s.t) - fd_dt(manufactured::v, s.x, s.t, h)).norm(), 1e-6);
    EXPECT_LE((manufactured::dw_dt(s.x, s.t) - fd_dt(manufactured::w, s.x, s.t, h)).norm(), 1e-6);
    EXPECT_LE((manufactured::grad_v(s.x, s.t) - fd_grad(manufactured::v, s.x, s.t, h)).norm(), 1e-6);
    EXPECT_LE((manufactured::grad_w(s.x, s.t) - fd_grad(manufactured::w, s.x, s.t, h)).norm(), 1e-6);
    EXPECT_LE((manufactured::grad_p(s.x, s.t) - fd_grad_scalar(manufactured::p, s.x, s.t, h)).norm(), 1e-6);
    // Second differences lose about 1e-16 / h^2 to rounding.
    EXPECT_LE((manufactured::laplacian_v(s.x, s.t) - fd_laplacian(manufactured::v, s.x, s.t, 1e-4)).norm(), 1e-5);
  }
}

TEST(Forcing, ResidualOfElsasserSystemVanishes) {
  const double nu_sum = 0.5 * (kPhys.nu + kPhys.nu_m), nu_diff = 0.5 * (kPhys.nu - kPhys.nu_m);
  for (int j = 1; j <= 4; ++j) {
    const double a = member_scale(j, 0.01);
    const MemberForcing f = member_forcing(j, 0.01, kPhys);
    for (const Sample& s : samples(100, 10 + j)) {
      using namespace manufactured;
      const Vector2d vj = a * v(s.x, s.t), wj = a * w(s.x, s.t);
      const Vector2d r1 = a * dv_dt(s.x, s.t) + a * grad_v(s.x, s.t) * wj - nu_sum * a * laplacian_v(s.x, s.t) -
                          nu_diff * a * laplacian_w(s.x, s.t) + grad_p(s.x, s.t) - f.f1(s.x, s.t);
      const Vector2d r2 = a * dw_dt(s.x, s.t) + a * grad_w(s.x, s.t) * vj - nu_sum * a * laplacian_w(s.x, s.t) -
                          nu_diff * a * laplacian_v(s.x, s.t) + grad_p(s.x, s.t) - f.f2(s.x, s.t);
      EXPECT_LE(r1.norm(), 1e-12);
      EXPECT_LE(r2.norm(), 1e-12);
    }
  }
}

TEST(Forcing, FiniteDifferenceOracle) {
  const double h = 1e-5;
  const double nu_sum = 0.5 * (kPhys.nu + kPhys.nu_m), nu_diff = 0.5 * (kPhys.nu - kPhys.nu_m);
  for (int j = 1; j <= 4; ++j) {
    const MemberFields m = member_fields(j, 0.1);
    const MemberForcing f = member_forcing(j, 0.1, kPhys);
    for (const Sample& s : samples(100, 20 + j)) {
      const Vector2d v = m.v(s.x, s.t), w = m.w(s.x, s.t);
      const Vector2d gp = fd_grad_scalar(manufactured::p, s.x, s.t, h);
      const Vector2d lv = fd_laplacian(m.v, s.x, s.t, h), lw = fd_laplacian(m.w, s.x, s.t, h);
      const Vector2d f1 = fd_dt(m.v, s.x, s.t, h) + fd_grad(m.v, s.x, s.t, h) * w - nu_sum * lv - nu_diff * lw + gp;
      const Vector2d f2 = fd_dt(m.w, s.x, s.t, h) + fd_grad(m.w, s.x, s.t, h) * v - nu_sum * lw - nu_diff * lv + gp;
      EXPECT_LE((f1 - f.f1(s.x, s.t)).norm(), 1e-6);
      EXPECT_LE((f2 - f.f2(s.x, s.t)).norm(), 1e-6);
    }
  }
}

TEST(Errors, ExactInterpolantGivesInterpolationError) {
  auto mesh = mms_mesh(8, ElementPair::taylor_hood);
  auto v = build_space(mesh, Family::velocity_p2);
  EnsembleState s;
  s.velocity = v;
  s.step = 1;
  s.time = 0.3;
  for (int j = 1; j <= 4; ++j) {
    const MemberFields m = member_fields(j, 0.1);
    s.v.push_back(interpolate(v, m.v, s.time).values);
    s.w.push_back(interpolate(v, m.w, s.time).values);
  }
  s.v_prev = s.v;
  s.w_prev = s.w;
  EnsembleErrorTracker tracker(0.1);
  tracker.observe(s);
  const EnsembleErrors e = tracker.errors();
  EXPECT_NEAR(e.v.final_l2, l2_error(interpolate(v, manufactured::v, 0.3), manufactured::v, 0.3), 1e-14);
  EXPECT_LT(e.v.final_l2, 1e-4);
  EXPECT_LT(e.w.norm_2_1, 1e-2);
}

TEST(Errors, ZeroSolutionGivesNormOfExact) {
  auto v = build_space(mms_mesh(4, ElementPair::taylor_hood), Family::velocity_p2);
  EnsembleState s;
  s.velocity = v;
  s.step = 1;
  s.time = 0.5;
  s.v = s.v_prev = s.w = s.w_prev = {Eigen::VectorXd::Zero(v->dof_count())};
  EnsembleErrorTracker tracker(0.5);
  tracker.observe(s);
  const EnsembleErrors e = tracker.errors();
  const FEField zero(v);
  EXPECT_DOUBLE_EQ(e.v.final_l2, l2_error(zero, manufactured::v, 0.5));
  EXPECT_DOUBLE_EQ(e.w.norm_2_1, std::sqrt(0.5) * h1_error(zero, manufactured::grad_w, 0.5));
}

TEST(Rates, InvariantUnderScaling) {
  EXPECT_DOUBLE_EQ(observed_rate(4.0, 1.0), 2.0);
  for (double c : {1e-6, 0.3, 7.0, 1e5}) EXPECT_NEAR(observed_rate(c * 0.288, c * 0.0812), observed_rate(0.288, 0.0812), 1e-12);
}

TEST(Rates, StudyNeedsThreeDoublingLevels) {
  const MmsSetup setup;
  EXPECT_THROW(temporal_convergence_study(setup, 4, 1.0, {4, 8}), ConfigError);
  EXPECT_THROW(temporal_convergence_study(setup, 4, 1.0, {4, 8, 12}), ConfigError);
  EXPECT_THROW(spatial_convergence_study(setup, {2, 4, 6}, 0.01, 4), ConfigError);
}

TEST(Rates, CoarseTemporalStudyErrorsDecrease) {
  MmsSetup setup;
  setup.pair = ElementPair::scott_vogelius;
  const RateTable table = temporal_convergence_study(setup, 4, 0.5, {2, 4, 8});
  ASSERT_TRUE(table.complete()) << table.failure;
  ASSERT_EQ(table.rows.size(), 3u);
  EXPECT_TRUE(std::isnan(table.rows[0].rate_v));
  for (std::size_t k = 1; k < 3; ++k) {
    EXPECT_LT(table.rows[k].error_v, table.rows[k - 1].error_v);
    EXPECT_LT(table.rows[k].error_w, table.rows[k - 1].error_w);
    EXPECT_DOUBLE_EQ(table.rows[k].rate_v, observed_rate(table.rows[k - 1].error_v, table.rows[k].error_v));
  }
  std::ostringstream csv;
  table.write_csv(csv);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "level,h,dt,error_v,rate_v,error_w,rate_w");
}

TEST(Rates, SpatialStudyIsNearSecondOrder) {
  MmsSetup setup;
  setup.pair = ElementPair::scott_vogelius;
  const RateTable table = spatial_convergence_study(setup, {2, 4, 8}, 0.001, 8);
  ASSERT_TRUE(table.complete()) << table.failure;
  EXPECT_GT(table.rows[2].rate_v, 1.8);
  EXPECT_LT(table.rows[2].rate_v, 2.2);
}
