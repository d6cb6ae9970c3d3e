#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "gsure/common.hpp"
#include "gsure/rng.hpp"

namespace gsure {

/// Observation model from a continuous exponential family, reduced to the
/// pieces the risk-score identities consume: the sufficient-statistic map
/// u = phi(x), the score gradient d ln q(u)/du expressed as an ambient
/// m-vector (for models whose statistic lives in a subspace this is
/// V * d ln q(u')/du', which is what the projected identity needs), and an
/// optional orthonormal basis V of that subspace.  Absent basis means the
/// statistic ranges over all of R^m.
struct ExponentialFamilyModel {
  int ambient_dim = 0;  // m
  int obs_dim = 0;      // n
  std::function<Vector(const Vector&)> suff_stat;
  std::function<Vector(const Vector&)> grad_log_q;
  std::optional<Matrix> subspace_basis;  // m x r, orthonormal columns

  bool has_subspace() const { return subspace_basis.has_value(); }
  /// VV^T, or identity when no basis is stored.
  Matrix projection() const;
  /// Throws "subspace-violation" when u has mass outside range(V).
  void check_in_subspace(const Vector& u) const;
};

/// Validates V^T V = I (1e-10) and dimensions; throws on violation.
void validate_model(const ExponentialFamilyModel& model);

/// An estimate h(u) bundled with divergence oracles.  `divergence` returns
/// Tr(dh/du); `projected_divergence` returns Tr(P dh/du) and falls back to
/// `divergence` when P = I.  Backends may be analytic closed forms, central
/// finite differences, or Monte-Carlo probes.
struct EstimatorMap {
  std::function<Vector(const Vector&)> apply;
  std::function<double(const Vector&)> divergence;
  std::function<double(const Vector&, const Matrix&)> projected_divergence;

  double div(const Vector& u) const { return divergence(u); }
  double div_projected(const Vector& u, const Matrix& P) const;
};

/// Risk-score value split into its three data-only terms.  The unknown
/// ||theta||^2 (||P theta||^2 in the projected case) is deliberately not
/// part of the score; estimator selection only ever compares differences.
struct RiskScore {
  double fidelity_term = 0.0;    // ||h(u)||^2 or ||P h(u)||^2
  double divergence_term = 0.0;  // Tr(dh/du) or Tr(P dh/du)
  double cross_term = 0.0;       // 2 h(u)^T grad_log_q(u)
  double score = 0.0;            // fidelity + 2*divergence + cross

  static RiskScore make(double fidelity, double divergence, double cross) {
    RiskScore s;
    s.fidelity_term = fidelity;
    s.divergence_term = divergence;
    s.cross_term = cross;
    s.score = fidelity + 2.0 * divergence + cross;
    return s;
  }
};

/// Unbiased estimate of E{h(u)^T theta}:  -Tr(dh/du) - h(u)^T dln q(u)/du.
double stein_cross_term(const ExponentialFamilyModel& model,
                        const EstimatorMap& est, const Vector& u);

/// Full-space risk score: ||h||^2 + 2 Tr(dh/du) + 2 h^T dln q/du.
/// Its expectation is MSE(h) - ||theta||^2.
RiskScore sure_score(const ExponentialFamilyModel& model,
                     const EstimatorMap& est, const Vector& u);

/// Subspace variant, unbiased for E||P h - P theta||^2 - ||P theta||^2.
/// Requires the model to carry a subspace basis ("full-rank-model" error
/// otherwise; use sure_score for full-rank models).
RiskScore projected_sure_score(const ExponentialFamilyModel& model,
                               const EstimatorMap& est, const Vector& u);

/// Central finite-difference estimate of Tr(dh/du).
/// step <= 0 selects the default 1e-5 * (1 + ||u||_inf).
double fd_divergence(const std::function<Vector(const Vector&)>& est_apply,
                     const Vector& u, double step = 0.0);

/// Same, but for the projected trace Tr(P dh/du): differences are taken
/// along the projected axes P e_i so evaluation never leaves the subspace.
double fd_divergence_projected(
    const std::function<Vector(const Vector&)>& est_apply, const Vector& u,
    const Matrix& P, double step = 0.0);

/// Monte-Carlo divergence: mean over probes b of b^T [h(u+eps b) - h(u)]/eps
/// with independent +-1 probe entries.  Deterministic given the rng seed.
/// step <= 0 selects the default 1e-4 * (1 + ||u||_inf).
double mc_divergence(const std::function<Vector(const Vector&)>& est_apply,
                     const Vector& u, int probes, double step, Rng rng);

/// Projected Monte-Carlo divergence (probes are projected by P first).
double mc_divergence_projected(
    const std::function<Vector(const Vector&)>& est_apply, const Vector& u,
    const Matrix& P, int probes, double step, Rng rng);

/// Builds an EstimatorMap whose divergence backends are finite differences.
EstimatorMap make_fd_estimator(std::function<Vector(const Vector&)> apply,
                               double step = 0.0);

/// Builds an EstimatorMap whose divergence backends are Monte-Carlo probes
/// with per-call child streams derived from `seed`.
EstimatorMap make_mc_estimator(std::function<Vector(const Vector&)> apply,
                               int probes, double step, std::uint64_t seed);

/// A model instantiation that can also simulate observations, which is what
/// the Monte-Carlo unbiasedness validation consumes.  `error_projection`
/// (identity when absent) defines the error metric ||P(h - theta)||^2.
struct SimulatedModel {
  ExponentialFamilyModel fam;
  std::function<Vector(const Vector& theta, Rng&)> sample;
  std::optional<Matrix> error_projection;
  bool projected = false;  // score via projected_sure_score
};

struct UnbiasednessReport {
  double mean_score = 0.0;    // mean SURE score over trials
  double empirical_mse = 0.0; // mean ||P(h - theta)||^2
  double constant = 0.0;      // ||P theta||^2 added back for the comparison
  double std_err = 0.0;       // paired standard error of score+const-err
  double z = 0.0;
  int trials = 0;
  bool pass = false;          // |z| <= 4
  bool underpowered = false;  // trials < 1000
};

/// Validates the risk identity numerically: over `trials` seeded draws,
/// compares mean(score) + ||P theta||^2 against the empirical MSE with a
/// paired z-statistic; passes when |z| <= 4.
UnbiasednessReport mc_unbiasedness_check(const SimulatedModel& model,
                                         const Vector& theta,
                                         const EstimatorMap& est, int trials,
                                         std::uint64_t seed);

}  // namespace gsure
