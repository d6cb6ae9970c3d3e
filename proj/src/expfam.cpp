#include "gsure/expfam.hpp"

#include <cmath>

namespace gsure {

namespace {

double default_fd_step(const Vector& u) {
  return 1e-5 * (1.0 + u.cwiseAbs().maxCoeff());
}

double default_mc_step(const Vector& u) {
  return 1e-4 * (1.0 + u.cwiseAbs().maxCoeff());
}

bool is_identity(const Matrix& P, double tol = 1e-14) {
  if (P.rows() != P.cols()) return false;
  return (P - Matrix::Identity(P.rows(), P.cols())).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

Matrix ExponentialFamilyModel::projection() const {
  if (!subspace_basis) return Matrix::Identity(ambient_dim, ambient_dim);
  const Matrix& V = *subspace_basis;
  return V * V.transpose();
}

void ExponentialFamilyModel::check_in_subspace(const Vector& u) const {
  if (!subspace_basis) return;
  const Matrix& V = *subspace_basis;
  const Vector res = u - V * (V.transpose() * u);
  if (res.norm() > 1e-8 * (1.0 + u.norm()))
    throw Error("subspace-violation",
                "statistic has mass outside range(V): ||residual|| = " +
                    std::to_string(res.norm()));
}

void validate_model(const ExponentialFamilyModel& model) {
  if (model.ambient_dim <= 0 || model.obs_dim <= 0)
    throw Error("invalid-argument", "model dimensions must be positive");
  if (!model.suff_stat || !model.grad_log_q)
    throw Error("invalid-argument", "suff_stat and grad_log_q are required");
  if (model.subspace_basis) {
    const Matrix& V = *model.subspace_basis;
    if (V.rows() != model.ambient_dim || V.cols() < 1 ||
        V.cols() > model.ambient_dim)
      throw Error("invalid-argument", "subspace basis has wrong shape");
    const Matrix gram = V.transpose() * V;
    const double err =
        (gram - Matrix::Identity(V.cols(), V.cols())).cwiseAbs().maxCoeff();
    if (err > 1e-10)
      throw Error("invalid-argument",
                  "subspace basis is not orthonormal: max |V'V - I| = " +
                      std::to_string(err));
  }
}

double EstimatorMap::div_projected(const Vector& u, const Matrix& P) const {
  if (projected_divergence) return projected_divergence(u, P);
  if (is_identity(P)) return divergence(u);
  throw Error("invalid-argument",
              "estimator has no projected divergence backend and P != I");
}

double stein_cross_term(const ExponentialFamilyModel& model,
                        const EstimatorMap& est, const Vector& u) {
  model.check_in_subspace(u);
  const Vector g = model.grad_log_q(u);
  if (!all_finite(g))
    throw Error("model-singularity", "grad_log_q is not finite at u");
  return -est.div(u) - est.apply(u).dot(g);
}

RiskScore sure_score(const ExponentialFamilyModel& model,
                     const EstimatorMap& est, const Vector& u) {
  model.check_in_subspace(u);
  const Vector g = model.grad_log_q(u);
  if (!all_finite(g))
    throw Error("model-singularity", "grad_log_q is not finite at u");
  const Vector h = est.apply(u);
  return RiskScore::make(h.squaredNorm(), est.div(u), 2.0 * h.dot(g));
}

RiskScore projected_sure_score(const ExponentialFamilyModel& model,
                               const EstimatorMap& est, const Vector& u) {
  if (!model.has_subspace())
    throw Error("full-rank-model",
                "model has no subspace basis; use sure_score");
  model.check_in_subspace(u);
  const Vector g = model.grad_log_q(u);
  if (!all_finite(g))
    throw Error("model-singularity", "grad_log_q is not finite at u");
  const Matrix P = model.projection();
  const Vector h = est.apply(u);
  const Vector Ph = P * h;
  return RiskScore::make(Ph.squaredNorm(), est.div_projected(u, P),
                         2.0 * h.dot(g));
}

double fd_divergence(const std::function<Vector(const Vector&)>& est_apply,
                     const Vector& u, double step) {
  const double s = step > 0.0 ? step : default_fd_step(u);
  double acc = 0.0;
  Vector up = u, um = u;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    up[i] = u[i] + s;
    um[i] = u[i] - s;
    acc += (est_apply(up)[i] - est_apply(um)[i]) / (2.0 * s);
    up[i] = u[i];
    um[i] = u[i];
  }
  if (!std::isfinite(acc))
    throw Error("nondifferentiable-point",
                "finite-difference divergence is not finite");
  return acc;
}

double fd_divergence_projected(
    const std::function<Vector(const Vector&)>& est_apply, const Vector& u,
    const Matrix& P, double step) {
  const double s = step > 0.0 ? step : default_fd_step(u);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const Vector d = P.col(i);  // P e_i keeps u +- s*d inside the subspace
    const Vector diff = est_apply(u + s * d) - est_apply(u - s * d);
    acc += diff[i] / (2.0 * s);
  }
  if (!std::isfinite(acc))
    throw Error("nondifferentiable-point",
                "finite-difference divergence is not finite");
  return acc;
}

double mc_divergence(const std::function<Vector(const Vector&)>& est_apply,
                     const Vector& u, int probes, double step, Rng rng) {
  if (probes < 1) throw Error("invalid-argument", "probes must be >= 1");
  const double eps = step > 0.0 ? step : default_mc_step(u);
  const Vector h0 = est_apply(u);
  double acc = 0.0;
  for (int p = 0; p < probes; ++p) {
    const Vector b = rng.rademacher_vector(u.size());
    acc += b.dot(est_apply(u + eps * b) - h0) / eps;
  }
  const double out = acc / probes;
  if (!std::isfinite(out))
    throw Error("nondifferentiable-point",
                "Monte-Carlo divergence is not finite");
  return out;
}

double mc_divergence_projected(
    const std::function<Vector(const Vector&)>& est_apply, const Vector& u,
    const Matrix& P, int probes, double step, Rng rng) {
  if (probes < 1) throw Error("invalid-argument", "probes must be >= 1");
  const double eps = step > 0.0 ? step : default_mc_step(u);
  const Vector h0 = est_apply(u);
  double acc = 0.0;
  for (int p = 0; p < probes; ++p) {
    const Vector b = rng.rademacher_vector(u.size());
    const Vector d = P * b;
    acc += b.dot(est_apply(u + eps * d) - h0) / eps;
  }
  const double out = acc / probes;
  if (!std::isfinite(out))
    throw Error("nondifferentiable-point",
                "Monte-Carlo divergence is not finite");
  return out;
}

EstimatorMap make_fd_estimator(std::function<Vector(const Vector&)> apply,
                               double step) {
  EstimatorMap est;
  est.apply = apply;
  est.divergence = [apply, step](const Vector& u) {
    return fd_divergence(apply, u, step);
  };
  est.projected_divergence = [apply, step](const Vector& u, const Matrix& P) {
    return fd_divergence_projected(apply, u, P, step);
  };
  return est;
}

EstimatorMap make_mc_estimator(std::function<Vector(const Vector&)> apply,
                               int probes, double step, std::uint64_t seed) {
  EstimatorMap est;
  est.apply = apply;
  est.divergence = [apply, probes, step, seed](const Vector& u) {
    return mc_divergence(apply, u, probes, step, Rng(seed));
  };
  est.projected_divergence = [apply, probes, step, seed](const Vector& u,
                                                         const Matrix& P) {
    return mc_divergence_projected(apply, u, P, probes, step, Rng(seed));
  };
  return est;
}

UnbiasednessReport mc_unbiasedness_check(const SimulatedModel& model,
                                         const Vector& theta,
                                         const EstimatorMap& est, int trials,
                                         std::uint64_t seed) {
  if (trials < 1) throw Error("invalid-argument", "trials must be >= 1");
  validate_model(model.fam);

  const Matrix P = model.error_projection
                       ? *model.error_projection
                       : Matrix::Identity(theta.size(), theta.size());
  const Vector Pt = P * theta;
  const double constant = Pt.squaredNorm();

  const Rng root(seed);
  double sum_score = 0.0, sum_err = 0.0;
  double sum_diff = 0.0, sum_diff2 = 0.0;
  for (int t = 0; t < trials; ++t) {
    Rng trial_rng = root.child(static_cast<std::uint64_t>(t));
    const Vector x = model.sample(theta, trial_rng);
    const Vector u = model.fam.suff_stat(x);
    const RiskScore s = model.projected
                            ? projected_sure_score(model.fam, est, u)
                            : sure_score(model.fam, est, u);
    const Vector h = est.apply(u);
    const double err = (P * h - Pt).squaredNorm();
    const double diff = s.score + constant - err;
    sum_score += s.score;
    sum_err += err;
    sum_diff += diff;
    sum_diff2 += diff * diff;
  }

  UnbiasednessReport rep;
  rep.trials = trials;
  rep.underpowered = trials < 1000;
  rep.mean_score = sum_score / trials;
  rep.empirical_mse = sum_err / trials;
  rep.constant = constant;
  const double mean_diff = sum_diff / trials;
  const double var_diff =
      trials > 1 ? (sum_diff2 - trials * mean_diff * mean_diff) / (trials - 1)
                 : 0.0;
  rep.std_err = std::sqrt(std::max(var_diff, 0.0) / trials);
  rep.z = rep.std_err > 0.0 ? mean_diff / rep.std_err : 0.0;
  rep.pass = std::abs(rep.z) <= 4.0;
  return rep;
}

}  // namespace gsure
