#include "gsure/linear_gaussian.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace gsure {

LinearGaussianModel::LinearGaussianModel(Matrix H, Matrix C)
    : H_(std::move(H)), C_(std::move(C)) {
  const auto n = H_.rows();
  const auto m = H_.cols();
  if (C_.rows() != n || C_.cols() != n)
    throw Error("invalid-argument", "C must be n x n");
  if ((C_ - C_.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * (1.0 + C_.cwiseAbs().maxCoeff()))
    throw Error("invalid-argument", "C must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> ces(C_);
  if (ces.eigenvalues().minCoeff() <= 0.0)
    throw Error("invalid-argument", "C must be positive definite");
  C_llt_.compute(C_);
  chol_C_ = C_llt_.matrixL();

  Q_ = H_.transpose() * C_llt_.solve(H_);
  Q_ = 0.5 * (Q_ + Q_.transpose());  // symmetrize roundoff

  Eigen::JacobiSVD<Matrix> svd(H_, Eigen::ComputeThinU | Eigen::ComputeThinV);
  singvals_ = svd.singularValues();
  const double smax = singvals_.size() ? singvals_[0] : 0.0;
  const double thr = 1e-10 * smax * static_cast<double>(std::max(n, m));
  rank_ = 0;
  for (Eigen::Index i = 0; i < singvals_.size(); ++i)
    if (singvals_[i] > thr) ++rank_;
  if (rank_ == 0) throw Error("invalid-argument", "H is numerically zero");

  V_ = svd.matrixV().leftCols(rank_);
  P_ = V_ * V_.transpose();

  // Q restricted to range(V) is SPD; invert there and lift back.
  const Matrix Qr = V_.transpose() * Q_ * V_;
  Eigen::LLT<Matrix> qr_llt(Qr);
  if (qr_llt.info() != Eigen::Success)
    throw Error("invalid-argument", "Gram matrix is singular on range(H^T)");
  const Matrix Qr_inv = qr_llt.solve(Matrix::Identity(rank_, rank_));
  Q_pinv_ = V_ * Qr_inv * V_.transpose();
  Q_pinv_ = 0.5 * (Q_pinv_ + Q_pinv_.transpose());
  trace_Q_pinv_ = Q_pinv_.trace();
}

Vector LinearGaussianModel::sufficient_statistic(const Vector& x) const {
  if (x.size() != H_.rows())
    throw Error("invalid-argument", "x has wrong length");
  return H_.transpose() * C_llt_.solve(x);
}

Vector LinearGaussianModel::ml_estimate(const Vector& x) const {
  return Q_pinv_ * sufficient_statistic(x);
}

RiskScore LinearGaussianModel::gaussian_sure(const EstimatorMap& est,
                                             const Vector& x) const {
  const Vector u = sufficient_statistic(x);
  const Vector h = est.apply(u);
  const Vector Ph = P_ * h;
  const double div = full_rank() ? est.div(u) : est.div_projected(u, P_);
  const double cross = -2.0 * h.dot(ml_from_statistic(u));
  return RiskScore::make(Ph.squaredNorm(), div, cross);
}

Vector LinearGaussianModel::sample(const Vector& theta, Rng& rng) const {
  if (theta.size() != H_.cols())
    throw Error("invalid-argument", "theta has wrong length");
  return H_ * theta + chol_C_ * rng.normal_vector(H_.rows());
}

ExponentialFamilyModel LinearGaussianModel::as_expfam() const {
  ExponentialFamilyModel fam;
  fam.ambient_dim = ambient_dim();
  fam.obs_dim = obs_dim();
  const Matrix Ht = H_.transpose();
  const Matrix Qp = Q_pinv_;
  // capture the cholesky solve by copying the factor
  Eigen::LLT<Matrix> llt = C_llt_;
  fam.suff_stat = [Ht, llt](const Vector& x) { return Ht * llt.solve(x); };
  fam.grad_log_q = [Qp](const Vector& u) { return Vector(-(Qp * u)); };
  if (!full_rank()) fam.subspace_basis = V_;
  return fam;
}

SimulatedModel LinearGaussianModel::as_simulated() const {
  SimulatedModel sim;
  sim.fam = as_expfam();
  const Matrix H = H_;
  const Matrix cholC = chol_C_;
  sim.sample = [H, cholC](const Vector& theta, Rng& rng) {
    return Vector(H * theta + cholC * rng.normal_vector(H.rows()));
  };
  if (!full_rank()) {
    sim.error_projection = P_;
    sim.projected = true;
  }
  return sim;
}

Vector blind_minimax(const LinearGaussianModel& model, const Vector& x,
                     bool positive_part) {
  const Vector ml = model.ml_estimate(x);
  const double s = ml.squaredNorm();
  if (s == 0.0) return Vector::Zero(ml.size());
  double alpha = 1.0 - model.trace_Q_pinv() / s;
  if (positive_part && alpha < 0.0) alpha = 0.0;
  return alpha * ml;
}

EstimatorMap blind_minimax_estimator(const LinearGaussianModel& model,
                                     bool positive_part) {
  const Matrix Qp = model.Q_pinv();
  const double T = model.trace_Q_pinv();
  EstimatorMap est;
  est.apply = [Qp, T, positive_part](const Vector& u) -> Vector {
    const Vector ml = Qp * u;
    const double s = ml.squaredNorm();
    if (s == 0.0) return Vector::Zero(ml.size());
    double alpha = 1.0 - T / s;
    if (positive_part && alpha < 0.0) alpha = 0.0;
    return alpha * ml;
  };
  // d/du [(1 - T/s) Qp u] = (1 - T/s) Qp + (2T/s^2) Qp u (Qp Qp u)^T
  est.divergence = [Qp, T, positive_part](const Vector& u) {
    const Vector ml = Qp * u;
    const double s = ml.squaredNorm();
    if (s == 0.0) return 0.0;
    const double alpha = 1.0 - T / s;
    if (positive_part && alpha < 0.0) return 0.0;
    return alpha * Qp.trace() + (2.0 * T / (s * s)) * ml.dot(Qp * ml);
  };
  est.projected_divergence = [est](const Vector& u, const Matrix& P) {
    // h(u) lies in range(Q_pinv) = range(V) and depends on u through
    // Q_pinv u only, so Tr(P dh/du) = Tr(dh/du) for P = V V^T.
    return est.divergence(u);
  };
  return est;
}

Vector diagonal_shrinkage(const Vector& x, const Vector& variances,
                          bool positive_part) {
  if (variances.size() != x.size())
    throw Error("invalid-argument", "variances must match x");
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (variances[i] < 0.0)
      throw Error("invalid-argument", "variances must be nonnegative");
    if (x[i] == 0.0) {
      out[i] = 0.0;
      continue;
    }
    double alpha = 1.0 - variances[i] / (x[i] * x[i]);
    if (positive_part && alpha < 0.0) alpha = 0.0;
    out[i] = alpha * x[i];
  }
  return out;
}

}  // namespace gsure
