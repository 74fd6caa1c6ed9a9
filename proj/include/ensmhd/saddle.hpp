#pragma once

#include "ensmhd/assembly.hpp"

#include <Eigen/SparseLU>

#include <memory>
#include <string>
#include <vector>

namespace ensmhd {

/// How the pressure constant is fixed when the velocity carries Dirichlet
/// data on the whole boundary.
enum class PressureGauge {
  none,
  /// Extra unknown enforcing (p, 1) = 0 through the weights m:
  ///     [  A   -B^T   0 ]
  ///     [ -B    0     m ]
  ///     [  0    m^T   0 ]
  mean_multiplier,
  /// The first pressure row and column are replaced by the identity, so
  /// p_0 = 0. Keeps the matrix free of dense rows.
  pinned,
};

/// Monolithic velocity-pressure system [A, -B^T; -B, 0] plus the gauge.
/// Velocity unknowns come first.
struct SaddleSystem {
  SparseMatrix matrix;
  int velocity_dofs = 0;
  int pressure_dofs = 0;
  PressureGauge gauge = PressureGauge::none;

  int dimension() const {
    return velocity_dofs + pressure_dofs + (gauge == PressureGauge::mean_multiplier ? 1 : 0);
  }
};

/// Assemble the monolithic matrix from blocks. `divergence` may have zero
/// rows (no pressure), in which case the system is A alone. The multiplier
/// gauge needs `mean_weights` (length = pressure dofs).
SaddleSystem compose_system(const SparseMatrix& velocity_block, const SparseMatrix& divergence,
                            PressureGauge gauge = PressureGauge::none,
                            const Eigen::VectorXd* mean_weights = nullptr);

/// Sparse LU with the symbolic analysis cached: refactorizing a matrix with
/// the same pattern only redoes the numeric phase.
class SaddleFactorization {
public:
  SaddleFactorization() = default;
  SaddleFactorization(const SaddleFactorization&) = delete;
  SaddleFactorization& operator=(const SaddleFactorization&) = delete;

  /// Throws FactorizationError (with the pivot diagnostic) on singular input.
  void factorize(const SparseMatrix& matrix);

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  /// One solve per column against the current factorization.
  Eigen::MatrixXd solve_multi(const Eigen::MatrixXd& rhs) const;

  Eigen::Index dimension() const { return dimension_; }
  int numeric_factorizations() const { return numeric_count_; }
  int symbolic_analyses() const { return symbolic_count_; }
  /// Stored entries of L and U.
  Eigen::Index factor_nonzeros() const;

private:
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<int> outer_, inner_;
  Eigen::Index dimension_ = 0;
  int numeric_count_ = 0;
  int symbolic_count_ = 0;
  bool ready_ = false;
};

std::unique_ptr<SaddleFactorization> factorize(const SaddleSystem& system);

/// ||A x - b|| / ||b|| (or ||A x|| when b = 0).
double relative_residual(const SparseMatrix& matrix, const Eigen::VectorXd& x, const Eigen::VectorXd& b);

struct BenchReport {
  int members = 0;
  int shared_factorizations = 0;
  int naive_factorizations = 0;
  double shared_seconds = 0.0;
  double naive_seconds = 0.0;
  /// Bytes held by factors: the shared path keeps one factorization, the
  /// naive path one per member.
  double shared_factor_bytes = 0.0;
  double naive_factor_bytes = 0.0;
  double max_residual = 0.0;
};

/// Time J right-hand sides solved against one factorization versus one
/// factorization per right-hand side. Times are per repetition (best of).
BenchReport bench_shared_vs_naive(const SparseMatrix& matrix, int members, int repetitions);

void write_matrix_market(const std::string& path, const SparseMatrix& matrix);

}  // namespace ensmhd
