#pragma once

#include "gsure/expfam.hpp"

namespace gsure {

/// The model x = H theta + w with w ~ N(0, C), C > 0.  Construction runs the
/// SVD of H once and caches everything the score identities need:
///   u = H^T C^-1 x          sufficient statistic
///   Q = H^T C^-1 H          Gram matrix
///   V                       orthonormal basis of range(H^T), m x r
///   P = V V^T               orthogonal projection onto range(H^T)
///   Q_pinv                  Moore-Penrose pseudo-inverse of Q
/// Singular values below 1e-10 * sigma_max * max(n, m) count as zero when
/// determining the numerical rank r.
class LinearGaussianModel {
 public:
  LinearGaussianModel(Matrix H, Matrix C);

  int obs_dim() const { return static_cast<int>(H_.rows()); }
  int ambient_dim() const { return static_cast<int>(H_.cols()); }
  int rank() const { return rank_; }
  bool full_rank() const { return rank_ == ambient_dim(); }

  const Matrix& H() const { return H_; }
  const Matrix& C() const { return C_; }
  const Matrix& Q() const { return Q_; }
  const Matrix& Q_pinv() const { return Q_pinv_; }
  const Matrix& basis() const { return V_; }       // V
  const Matrix& projection() const { return P_; }  // P = V V^T
  const Vector& singular_values() const { return singvals_; }
  double trace_Q_pinv() const { return trace_Q_pinv_; }

  /// u = H^T C^-1 x.
  Vector sufficient_statistic(const Vector& x) const;
  /// theta_ml = Q_pinv * u; lies in range(V).
  Vector ml_estimate(const Vector& x) const;
  Vector ml_from_statistic(const Vector& u) const { return Q_pinv_ * u; }
  /// d ln q(u)/du = -Q_pinv u = -theta_ml (ambient form).
  Vector grad_log_q(const Vector& u) const { return -(Q_pinv_ * u); }

  /// Risk score ||P h||^2 + 2(Tr(P dh/du) - h^T theta_ml); agrees with the
  /// generic projected score on this model.
  RiskScore gaussian_sure(const EstimatorMap& est, const Vector& x) const;

  /// Draw x = H theta + chol(C) z with z standard normal.
  Vector sample(const Vector& theta, Rng& rng) const;

  /// Apply C^-1 (via the cached Cholesky factor).
  Vector apply_Cinv(const Vector& v) const { return C_llt_.solve(v); }

  /// Exponential-family view of this model (basis attached only when the
  /// model is rank deficient).
  ExponentialFamilyModel as_expfam() const;
  /// Same plus the sampler, for Monte-Carlo validation.
  SimulatedModel as_simulated() const;

 private:
  Matrix H_, C_;
  Eigen::LLT<Matrix> C_llt_;
  Matrix chol_C_;  // lower factor for sampling
  Matrix Q_, Q_pinv_, V_, P_;
  Vector singvals_;
  int rank_ = 0;
  double trace_Q_pinv_ = 0.0;
};

/// Scaled-ML shrinkage alpha * theta_ml with
/// alpha = 1 - Tr(Q_pinv)/||theta_ml||^2, clamped at zero when
/// positive_part is set.  theta_ml = 0 returns the zero vector.
Vector blind_minimax(const LinearGaussianModel& model, const Vector& x,
                     bool positive_part);

/// Same map as an EstimatorMap over u, with the analytic divergence.
EstimatorMap blind_minimax_estimator(const LinearGaussianModel& model,
                                     bool positive_part);

/// Componentwise shrinkage [1 - var_i/x_i^2] x_i for the H = I,
/// C = diag(var) model; optional clamp of the gains at zero.
Vector diagonal_shrinkage(const Vector& x, const Vector& variances,
                          bool positive_part);

}  // namespace gsure
