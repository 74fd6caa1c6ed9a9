#include "ensmhd/errors.hpp"
#include "ensmhd/mms.hpp"
#include "ensmhd/saddle.hpp"
#include "ensmhd/scheme.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <random>

using namespace ensmhd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

SparseMatrix sparse(const MatrixXd& dense) { return dense.sparseView(); }

std::shared_ptr<const Discretization> small_disc(ElementPair pair) {
  Mesh m = unit_square_mesh(pair == ElementPair::scott_vogelius ? 2 : 3);
  if (pair == ElementPair::scott_vogelius) m = barycentric_refine(m);
  return make_discretization(std::make_shared<const Mesh>(std::move(m)), pair);
}

// Oseen-type saddle matrix with boundary rows eliminated.
SparseMatrix oseen_matrix(const Discretization& d, PressureGauge gauge, bool convection) {
  SparseMatrix a = 20.0 * d.mass + 0.01 * d.stiffness;
  if (convection) a += assemble_convection(*d.velocity, interpolate(d.velocity, manufactured::w, 0.5));
  const SaddleSystem sys = compose_system(a, d.divergence, gauge, &d.mean_weights);
  DirichletConstraint bc(d.velocity->boundary_dofs(BoundaryTag::all), sys.dimension());
  return bc.eliminate(sys.matrix);
}

MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

}  // namespace

TEST(Factorization, IdentityReturnsRhs) {
  SparseMatrix eye(5, 5);
  eye.setIdentity();
  SaddleFactorization fac;
  fac.factorize(eye);
  const VectorXd b = VectorXd::LinSpaced(5, -2.0, 3.0);
  EXPECT_EQ(fac.solve(b), b);
}

TEST(Factorization, DiagonalExample) {
  MatrixXd a(2, 2);
  a << 2, 0, 0, 4;
  SaddleFactorization fac;
  fac.factorize(sparse(a));
  const VectorXd x = fac.solve(VectorXd((VectorXd(2) << 2, 8).finished()));
  EXPECT_DOUBLE_EQ(x(0), 1.0);
  EXPECT_DOUBLE_EQ(x(1), 2.0);
}

TEST(Factorization, SingularMatrixThrows) {
  MatrixXd a(3, 3);
  a << 1, 2, 3, 2, 4, 6, 0, 0, 1;
  SaddleFactorization fac;
  EXPECT_THROW(fac.factorize(sparse(a)), FactorizationError);
}

TEST(Factorization, DimensionMismatchThrows) {
  SparseMatrix eye(4, 4);
  eye.setIdentity();
  SaddleFactorization fac;
  fac.factorize(eye);
  EXPECT_THROW(fac.solve(VectorXd::Ones(3)), InvalidArgument);
  EXPECT_THROW(fac.solve_multi(MatrixXd::Ones(5, 2)), InvalidArgument);
}

class DenseOracle : public ::testing::TestWithParam<std::tuple<ElementPair, PressureGauge, bool>> {};

TEST_P(DenseOracle, SparseMatchesDense) {
  const auto [pair, gauge, convection] = GetParam();
  const auto d = small_disc(pair);
  const SparseMatrix a = oseen_matrix(*d, gauge, convection);
  ASSERT_LE(a.rows(), 200);
  const MatrixXd rhs = random_matrix(a.rows(), 3, 11);
  SaddleFactorization fac;
  fac.factorize(a);
  const MatrixXd x = fac.solve_multi(rhs);
  const MatrixXd oracle = MatrixXd(a).fullPivLu().solve(rhs);
  EXPECT_LE((x - oracle).norm(), 1e-10 * oracle.norm());
  for (int j = 0; j < 3; ++j) EXPECT_LE(relative_residual(a, x.col(j), rhs.col(j)), 1e-10);
}

TEST_P(DenseOracle, UnitColumnsReconstructInverse) {
  const auto [pair, gauge, convection] = GetParam();
  const auto d = small_disc(pair);
  const SparseMatrix a = oseen_matrix(*d, gauge, convection);
  const MatrixXd eye = MatrixXd::Identity(a.rows(), a.cols());
  SaddleFactorization fac;
  fac.factorize(a);
  const MatrixXd inv = fac.solve_multi(eye);
  EXPECT_LE((MatrixXd(a) * inv - eye).norm(), 1e-10 * std::sqrt(double(a.rows())));
  const MatrixXd oracle = MatrixXd(a).inverse();
  EXPECT_LE((inv - oracle).norm(), 1e-10 * oracle.norm());
}

INSTANTIATE_TEST_SUITE_P(
    SmallSystems, DenseOracle,
    ::testing::Combine(::testing::Values(ElementPair::taylor_hood, ElementPair::scott_vogelius),
                       ::testing::Values(PressureGauge::pinned, PressureGauge::mean_multiplier),
                       ::testing::Bool()));

TEST(SolveMulti, BitwiseEqualToSequentialSolves) {
  const auto d = small_disc(ElementPair::scott_vogelius);
  const SparseMatrix a = oseen_matrix(*d, PressureGauge::pinned, true);
  const MatrixXd rhs = random_matrix(a.rows(), 4, 3);
  SaddleFactorization fac;
  fac.factorize(a);
  const MatrixXd x = fac.solve_multi(rhs);
  for (int j = 0; j < 4; ++j) {
    const VectorXd xj = fac.solve(rhs.col(j));
    EXPECT_EQ(std::memcmp(xj.data(), x.col(j).data(), sizeof(double) * xj.size()), 0) << "column " << j;
  }
}

TEST(SolveMulti, EqualColumnsGiveEqualSolutions) {
  const auto d = small_disc(ElementPair::taylor_hood);
  const SparseMatrix a = oseen_matrix(*d, PressureGauge::pinned, false);
  const VectorXd b = random_matrix(a.rows(), 1, 5).col(0);
  SaddleFactorization fac;
  fac.factorize(a);
  const MatrixXd x = fac.solve_multi(b.replicate(1, 4));
  for (int j = 1; j < 4; ++j) EXPECT_EQ(x.col(j), x.col(0));
  EXPECT_EQ(fac.solve_multi(b).col(0), fac.solve(b));
}

TEST(Factorization, RefactorizationIsDeterministic) {
  const auto d = small_disc(ElementPair::scott_vogelius);
  const SparseMatrix a = oseen_matrix(*d, PressureGauge::pinned, true);
  const VectorXd b = random_matrix(a.rows(), 1, 9).col(0);
  SaddleFactorization fac;
  fac.factorize(a);
  const VectorXd x1 = fac.solve(b);
  fac.factorize(a);
  const VectorXd x2 = fac.solve(b);
  SaddleFactorization fresh;
  fresh.factorize(a);
  EXPECT_EQ(x1, x2);
  EXPECT_EQ(x1, fresh.solve(b));
  EXPECT_EQ(fac.numeric_factorizations(), 2);
  EXPECT_EQ(fac.symbolic_analyses(), 1);
}

TEST(Factorization, NewPatternTriggersNewAnalysis) {
  const auto d = small_disc(ElementPair::taylor_hood);
  SaddleFactorization fac;
  fac.factorize(oseen_matrix(*d, PressureGauge::pinned, false));
  fac.factorize(oseen_matrix(*d, PressureGauge::pinned, true));
  EXPECT_EQ(fac.symbolic_analyses(), 1);  // convection keeps the pattern
  fac.factorize(oseen_matrix(*d, PressureGauge::mean_multiplier, true));
  EXPECT_EQ(fac.symbolic_analyses(), 2);
}

TEST(Compose, StokesSystemIsSymmetric) {
  const auto d = small_disc(ElementPair::taylor_hood);
  for (PressureGauge g : {PressureGauge::none, PressureGauge::pinned, PressureGauge::mean_multiplier}) {
    const SparseMatrix m = compose_system(d->stiffness, d->divergence, g, &d->mean_weights).matrix;
    EXPECT_LE((SparseMatrix(m.transpose()) - m).norm(), 1e-14 * m.norm());
  }
}

TEST(Compose, ConvectionKeepsPattern) {
  const auto d = small_disc(ElementPair::taylor_hood);
  const SparseMatrix stokes = compose_system(d->stiffness, d->divergence).matrix;
  const SparseMatrix oseen =
      compose_system(d->stiffness + assemble_convection(*d->velocity, interpolate(d->velocity, manufactured::v, 0.0)),
                     d->divergence)
          .matrix;
  EXPECT_GT((SparseMatrix(oseen.transpose()) - oseen).norm(), 1e-3);
  ASSERT_EQ(stokes.nonZeros(), oseen.nonZeros());
  for (Eigen::Index k = 0; k < stokes.outerSize() + 1; ++k)
    EXPECT_EQ(stokes.outerIndexPtr()[k], oseen.outerIndexPtr()[k]);
  for (Eigen::Index k = 0; k < stokes.nonZeros(); ++k) EXPECT_EQ(stokes.innerIndexPtr()[k], oseen.innerIndexPtr()[k]);
}

TEST(Compose, EmptyPressureReducesToVelocityBlock) {
  const auto d = small_disc(ElementPair::taylor_hood);
  const SparseMatrix none(0, d->velocity->dof_count());
  const SaddleSystem sys = compose_system(d->stiffness, none);
  EXPECT_EQ(sys.dimension(), d->velocity->dof_count());
  EXPECT_EQ((sys.matrix - d->stiffness).norm(), 0.0);
}

TEST(Compose, DimensionMismatchThrows) {
  const auto d = small_disc(ElementPair::taylor_hood);
  const SparseMatrix wrong(3, 7);
  EXPECT_THROW(compose_system(d->stiffness, wrong), InvalidArgument);
  EXPECT_THROW(compose_system(d->stiffness, d->divergence, PressureGauge::mean_multiplier), InvalidArgument);
}

TEST(Compose, StokesResidualOnSquare) {
  const auto mesh = std::make_shared<const Mesh>(unit_square_mesh(4));
  const auto d = make_discretization(mesh, ElementPair::taylor_hood);
  const SaddleSystem sys = compose_system(d->stiffness, d->divergence, PressureGauge::pinned);
  SparseMatrix lift;
  const SparseMatrix a = d->constraint.eliminate(sys.matrix, &lift);
  VectorXd b = VectorXd::Zero(sys.dimension());
  b.head(d->velocity->dof_count()) = assemble_load(*d->velocity, manufactured::v, 0.2);
  const DirichletValues bc = dirichlet_values(*d->velocity, {{BoundaryTag::all, manufactured::v}}, 0.2);
  const VectorXd rhs = d->constraint.constrain_rhs(lift, b, bc.values);
  SaddleFactorization fac;
  fac.factorize(a);
  EXPECT_LE(relative_residual(a, fac.solve(rhs), rhs), 1e-10);
}

TEST(Bench, FactorizationCounts) {
  const auto d = small_disc(ElementPair::scott_vogelius);
  const SparseMatrix a = oseen_matrix(*d, PressureGauge::pinned, true);
  const BenchReport one = bench_shared_vs_naive(a, 1, 1);
  EXPECT_EQ(one.shared_factorizations, 1);
  EXPECT_EQ(one.naive_factorizations, 1);
  const BenchReport eight = bench_shared_vs_naive(a, 8, 2);
  EXPECT_EQ(eight.shared_factorizations, 1);
  EXPECT_EQ(eight.naive_factorizations, 8);
  EXPECT_DOUBLE_EQ(eight.naive_factor_bytes, 8.0 * eight.shared_factor_bytes);
  EXPECT_LE(eight.max_residual, 1e-10);
}
