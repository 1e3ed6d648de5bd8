#include "dml/metric.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <sstream>

namespace dml {

MahalanobisMetric::MahalanobisMetric(Eigen::MatrixXd a) : a_(std::move(a)) {
  if (a_.rows() != a_.cols() || a_.rows() < 1) {
    throw Error(Errc::dimension_mismatch, "metric matrix must be square");
  }
  if (!a_.allFinite()) {
    throw Error(Errc::psd_violation, "metric matrix has NaN/Inf entries");
  }
  for (Eigen::Index i = 0; i < a_.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < a_.cols(); ++j) {
      const double tol = 1e-12 * (1.0 + std::abs(a_(i, j)));
      if (std::abs(a_(i, j) - a_(j, i)) > tol) {
        std::ostringstream msg;
        msg << "metric matrix is not symmetric at (" << i << "," << j << ")";
        throw Error(Errc::psd_violation, msg.str());
      }
    }
  }
}

MahalanobisMetric MahalanobisMetric::identity(Eigen::Index dim) {
  return MahalanobisMetric(Eigen::MatrixXd::Identity(dim, dim));
}

double distance(const MahalanobisMetric& m,
                const Eigen::Ref<const Eigen::VectorXd>& x,
                const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (x.size() != m.dim() || y.size() != m.dim()) {
    throw Error(Errc::dimension_mismatch, "vector length does not match dim");
  }
  const Eigen::VectorXd z = x - y;
  const double value = z.dot(m.matrix() * z);
  return value < 0.0 ? 0.0 : value;
}

double logdet_divergence(const MahalanobisMetric& a,
                         const MahalanobisMetric& prior) {
  if (a.dim() != prior.dim()) {
    throw Error(Errc::dimension_mismatch, "metric dims differ");
  }
  const Eigen::Index d = prior.dim();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> prior_eig(
      prior.matrix(), Eigen::EigenvaluesOnly);
  const double prior_trace = prior.matrix().trace();
  if (prior_eig.eigenvalues().minCoeff() <= 1e-12 * prior_trace) {
    throw Error(Errc::singular_prior,
                "prior metric is not strictly positive definite");
  }

  Eigen::LLT<Eigen::MatrixXd> llt(prior.matrix());
  if (llt.info() != Eigen::Success) {
    throw Error(Errc::singular_prior, "Cholesky factorization of prior failed");
  }
  // Whitened S = L^-1 A L^-T has the eigenvalues of A P^-1.
  Eigen::MatrixXd s = llt.matrixL().solve(a.matrix());
  s = llt.matrixL().solve(s.transpose().eval());
  s = 0.5 * (s + s.transpose().eval());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> s_eig(s,
                                                       Eigen::EigenvaluesOnly);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double v = s_eig.eigenvalues()[i];
    if (v <= 0.0) return std::numeric_limits<double>::infinity();
    sum += v - std::log(v) - 1.0;
  }
  return sum < 0.0 ? 0.0 : sum;
}

MahalanobisMetric rank_one_update(const MahalanobisMetric& m,
                                  const Eigen::Ref<const Eigen::VectorXd>& z,
                                  double beta) {
  if (z.size() != m.dim()) {
    throw Error(Errc::dimension_mismatch, "vector length does not match dim");
  }
  const Eigen::VectorXd w = m.matrix() * z;
  const double quad = z.dot(w);
  if (1.0 + beta * quad <= 1e-12) {
    std::ostringstream msg;
    msg << "rank-one update would break semidefiniteness: 1 + beta*z'Az = "
        << 1.0 + beta * quad;
    throw Error(Errc::psd_violation, msg.str());
  }
  if (beta == 0.0) return m;
  Eigen::MatrixXd updated = m.matrix();
  updated.selfadjointView<Eigen::Lower>().rankUpdate(w, beta);
  updated.triangularView<Eigen::StrictlyUpper>() = updated.transpose();
  return MahalanobisMetric(std::move(updated));
}

bool is_psd(const MahalanobisMetric& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m.matrix(),
                                                     Eigen::EigenvaluesOnly);
  const double trace = m.matrix().trace();
  const double bound = -1e-8 * std::max(1.0, trace);
  return eig.eigenvalues().minCoeff() >= bound;
}

}  // namespace dml
