#pragma once

#include <Eigen/Core>

#include "dml/error.hpp"

namespace dml {

/// Symmetric positive-semidefinite matrix A defining the squared distance
/// (x-y)^T A (x-y). Immutable; updates return new values.
///
/// Construction checks symmetry and finiteness (O(d^2)). Semidefiniteness is
/// maintained by construction in the update path and can be verified with
/// is_psd(), which does the O(d^3) eigenvalue check.
class MahalanobisMetric {
 public:
  /// Throws DimensionMismatch for non-square input, PsdViolation for
  /// asymmetric or non-finite entries.
  explicit MahalanobisMetric(Eigen::MatrixXd a);

  static MahalanobisMetric identity(Eigen::Index dim);

  Eigen::Index dim() const { return a_.rows(); }
  const Eigen::MatrixXd& matrix() const { return a_; }

 private:
  Eigen::MatrixXd a_;
};

/// Squared Mahalanobis distance (x-y)^T A (x-y). Symmetric in x and y;
/// negative rounding residue is clamped to zero.
double distance(const MahalanobisMetric& m,
                const Eigen::Ref<const Eigen::VectorXd>& x,
                const Eigen::Ref<const Eigen::VectorXd>& y);

/// LogDet divergence tr(A P^-1) - log det(A P^-1) - d. Zero iff A == P,
/// +infinity when A is singular. P must be strictly positive definite
/// (min eigenvalue > 1e-12 * trace), else SingularPrior.
///
/// Evaluated through a Cholesky factor L of P as sum(s - log s - 1) over the
/// eigenvalues s of the symmetrized L^-1 A L^-T, which keeps the result
/// nonnegative without forming P^-1.
double logdet_divergence(const MahalanobisMetric& a,
                         const MahalanobisMetric& prior);

/// A + beta * (A z)(A z)^T, the Bregman projection step applied to the
/// metric. Requires 1 + beta * z^T A z > 1e-12, which guarantees the result
/// stays positive semidefinite; throws PsdViolation otherwise.
MahalanobisMetric rank_one_update(const MahalanobisMetric& m,
                                  const Eigen::Ref<const Eigen::VectorXd>& z,
                                  double beta);

/// Eigenvalue check of the PSD invariant:
/// min eigenvalue >= -1e-8 * max(1, trace).
bool is_psd(const MahalanobisMetric& m);

}  // namespace dml
