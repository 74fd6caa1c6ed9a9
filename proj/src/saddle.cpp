#include "ensmhd/saddle.hpp"

#include "ensmhd/errors.hpp"

#include <unsupported/Eigen/SparseExtra>

#include <algorithm>
#include <chrono>
#include <limits>
#include <random>

namespace ensmhd {

SaddleSystem compose_system(const SparseMatrix& velocity_block, const SparseMatrix& divergence,
                            PressureGauge gauge, const Eigen::VectorXd* mean_weights) {
  const auto nv = static_cast<int>(velocity_block.rows());
  if (velocity_block.cols() != nv) throw InvalidArgument("compose_system: velocity block must be square");
  const auto np = static_cast<int>(divergence.rows());
  if (np > 0 && divergence.cols() != nv)
    throw InvalidArgument("compose_system: divergence block columns must match velocity dofs");
  if (gauge == PressureGauge::mean_multiplier && (!mean_weights || mean_weights->size() != np))
    throw InvalidArgument("compose_system: mean weights must match pressure dofs");

  SaddleSystem sys;
  sys.velocity_dofs = nv;
  sys.pressure_dofs = np;
  sys.gauge = np > 0 ? gauge : PressureGauge::none;
  const bool pinned = sys.gauge == PressureGauge::pinned;

  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(velocity_block.nonZeros() + 2 * divergence.nonZeros() + 2 * np + 1));
  for (int k = 0; k < velocity_block.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(velocity_block, k); it; ++it)
      triplets.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  if (np > 0) {
    for (int k = 0; k < divergence.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(divergence, k); it; ++it) {
        if (pinned && it.row() == 0) continue;
        const int p = nv + static_cast<int>(it.row());
        const int v = static_cast<int>(it.col());
        triplets.emplace_back(p, v, -it.value());
        triplets.emplace_back(v, p, -it.value());
      }
  }
  if (pinned) triplets.emplace_back(nv, nv, 1.0);
  if (sys.gauge == PressureGauge::mean_multiplier) {
    const int mu = nv + np;
    for (int q = 0; q < np; ++q) {
      triplets.emplace_back(nv + q, mu, (*mean_weights)(q));
      triplets.emplace_back(mu, nv + q, (*mean_weights)(q));
    }
  }
  sys.matrix.resize(sys.dimension(), sys.dimension());
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  sys.matrix.makeCompressed();
  return sys;
}

void SaddleFactorization::factorize(const SparseMatrix& matrix) {
  if (matrix.rows() != matrix.cols()) throw InvalidArgument("factorize: matrix must be square");
  SparseMatrix m = matrix;
  m.makeCompressed();
  const int n = static_cast<int>(m.cols());
  const bool same_pattern =
      ready_ && dimension_ == n && static_cast<std::size_t>(m.nonZeros()) == inner_.size() &&
      std::equal(outer_.begin(), outer_.end(), m.outerIndexPtr()) &&
      std::equal(inner_.begin(), inner_.end(), m.innerIndexPtr());
  if (!same_pattern) {
    lu_.analyzePattern(m);
    outer_.assign(m.outerIndexPtr(), m.outerIndexPtr() + n + 1);
    inner_.assign(m.innerIndexPtr(), m.innerIndexPtr() + m.nonZeros());
    dimension_ = n;
    ++symbolic_count_;
  }
  ready_ = false;
  lu_.factorize(m);
  ++numeric_count_;
  if (lu_.info() != Eigen::Success)
    throw FactorizationError("sparse LU failed: " + lu_.lastErrorMessage());
  ready_ = true;
}

Eigen::VectorXd SaddleFactorization::solve(const Eigen::VectorXd& rhs) const {
  if (!ready_) throw FactorizationError("solve called without a successful factorization");
  if (rhs.size() != dimension_) throw InvalidArgument("solve: right-hand side has wrong length");
  Eigen::VectorXd x = lu_.solve(rhs);
  return x;
}

Eigen::MatrixXd SaddleFactorization::solve_multi(const Eigen::MatrixXd& rhs) const {
  if (rhs.rows() != dimension_) throw InvalidArgument("solve_multi: right-hand side has wrong row count");
  Eigen::MatrixXd x(rhs.rows(), rhs.cols());
  for (Eigen::Index j = 0; j < rhs.cols(); ++j) x.col(j) = solve(rhs.col(j));
  return x;
}

Eigen::Index SaddleFactorization::factor_nonzeros() const { return ready_ ? lu_.nnzL() + lu_.nnzU() : 0; }

std::unique_ptr<SaddleFactorization> factorize(const SaddleSystem& system) {
  auto fac = std::make_unique<SaddleFactorization>();
  fac->factorize(system.matrix);
  return fac;
}

double relative_residual(const SparseMatrix& matrix, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double r = (matrix * x - b).norm();
  const double nb = b.norm();
  return nb > 0.0 ? r / nb : r;
}

BenchReport bench_shared_vs_naive(const SparseMatrix& matrix, int members, int repetitions) {
  if (members < 1 || repetitions < 1) throw InvalidArgument("bench_shared_vs_naive: members and repetitions must be >= 1");
  using clock = std::chrono::steady_clock;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::MatrixXd rhs(matrix.rows(), members);
  for (Eigen::Index i = 0; i < rhs.size(); ++i) rhs.data()[i] = dist(rng);

  BenchReport report;
  report.members = members;
  report.shared_seconds = std::numeric_limits<double>::infinity();
  report.naive_seconds = std::numeric_limits<double>::infinity();
  constexpr double bytes_per_entry = sizeof(double) + sizeof(int);

  for (int rep = 0; rep < repetitions; ++rep) {
    {
      const auto start = clock::now();
      SaddleFactorization fac;
      fac.factorize(matrix);
      const Eigen::MatrixXd x = fac.solve_multi(rhs);
      report.shared_seconds = std::min(report.shared_seconds, std::chrono::duration<double>(clock::now() - start).count());
      report.shared_factorizations = fac.numeric_factorizations();
      report.shared_factor_bytes = bytes_per_entry * static_cast<double>(fac.factor_nonzeros());
      for (int j = 0; j < members; ++j)
        report.max_residual = std::max(report.max_residual, relative_residual(matrix, x.col(j), rhs.col(j)));
    }
    {
      const auto start = clock::now();
      int count = 0;
      double bytes = 0.0;
      for (int j = 0; j < members; ++j) {
        SaddleFactorization fac;
        fac.factorize(matrix);
        const Eigen::VectorXd x = fac.solve(rhs.col(j));
        count += fac.numeric_factorizations();
        bytes += bytes_per_entry * static_cast<double>(fac.factor_nonzeros());
      }
      report.naive_seconds = std::min(report.naive_seconds, std::chrono::duration<double>(clock::now() - start).count());
      report.naive_factorizations = count;
      report.naive_factor_bytes = bytes;
    }
  }
  return report;
}

void write_matrix_market(const std::string& path, const SparseMatrix& matrix) {
  if (!Eigen::saveMarket(matrix, path)) throw ConfigError("cannot write matrix to " + path);
}

}  // namespace ensmhd
