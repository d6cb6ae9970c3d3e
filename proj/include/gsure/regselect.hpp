#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "gsure/linear_gaussian.hpp"

namespace gsure {

enum class Penalty { SquaredL2, L1 };
enum class Selector { SURE, GCV, Discrepancy };

/// Geometric lambda grid [lo, hi] with roughly `points_per_decade` points
/// per decade (endpoints always included).
struct LambdaGrid {
  double lo = 1e-6;
  double hi = 1e+3;
  int points_per_decade = 10;

  std::vector<double> points() const;
  /// Default span [1e-6, 1e3] scaled by Tr(Q)/Tr(L^T L) so that the penalty
  /// and data terms balance near the middle of the grid.
  static LambdaGrid default_for(const Matrix& Q, const Matrix& L);
};

/// Penalized least-squares problem min (x-H t)' C^-1 (x-H t) + lambda pen(L t).
struct PenalizedProblem {
  std::shared_ptr<const LinearGaussianModel> model;
  Matrix L;
  Penalty penalty = Penalty::SquaredL2;
  LambdaGrid grid;

  PenalizedProblem(std::shared_ptr<const LinearGaussianModel> model_in,
                   Matrix L_in, Penalty penalty_in, LambdaGrid grid_in);
};

struct SelectionResult {
  double lambda_star = 0.0;
  Vector estimate;  // recomputed at lambda_star when a solver is available
  std::vector<std::pair<double, double>> score_curve;  // (lambda, score)
  Selector selector = Selector::SURE;
  bool boundary_solution = false;     // argmin at a grid endpoint
  bool unbracketed = false;           // discrepancy root not bracketed
  bool monotonicity_warning = false;  // residual not nondecreasing on grid
};

/// theta = (Q + lambda L^T L)^{-1} u via a dense factorization, with a
/// relative residual check (<= 1e-8) on the linear solve.
Vector tikhonov_solve(const PenalizedProblem& prob, const Vector& x,
                      double lambda);

/// G(lambda) = ||x - H theta||^2 / Tr^2(I - (Q+lambda L^T L)^{-1} Q).
double gcv_score(const PenalizedProblem& prob, const Vector& x, double lambda);

/// ||P theta||^2 + 2 Tr(P (Q+lambda L^T L)^{-1}) - 2 theta' theta_ml;
/// the divergence is the analytic trace of the linear smoother.
double sure_score_tikhonov(const PenalizedProblem& prob, const Vector& x,
                           double lambda);

/// The Tikhonov map at fixed lambda as an EstimatorMap over u with analytic
/// divergence backends.
EstimatorMap tikhonov_estimator(const PenalizedProblem& prob, double lambda);

struct GridScanResult {
  double lambda_star = 0.0;
  double score_star = 0.0;
  bool boundary = false;  // argmin at a grid endpoint (incl. monotone/flat)
  std::vector<std::pair<double, double>> curve;
};

/// Scan + golden-section refinement (on log lambda) shared by every
/// selector; endpoint argmins are returned unrefined with the flag set.
GridScanResult minimize_score_on_grid(
    const std::vector<double>& grid,
    const std::function<double(double)>& score_fn);

/// Coarse geometric-grid scan of score_fn followed by golden-section
/// refinement inside the bracketing interval.  An endpoint argmin is
/// returned as-is with the boundary flag set.  When `solver` is given the
/// estimate is recomputed from scratch at lambda_star.
SelectionResult select_lambda(
    const PenalizedProblem& prob, const Vector& x, Selector selector,
    const std::function<double(double)>& score_fn,
    const std::function<Vector(double)>& solver = nullptr);

/// Discrepancy principle: bisection on log lambda for
/// ||x - H theta(lambda)||^2 = n sigma2 (relative gap <= 1e-3).  A root that
/// is not bracketed by the grid yields the closest endpoint and the
/// `unbracketed` flag.
SelectionResult discrepancy_select(
    const PenalizedProblem& prob, const Vector& x,
    const std::function<Vector(double)>& solver, double sigma2);

/// Risk score of a black-box solver u -> theta(lambda) with the divergence
/// term estimated by Monte-Carlo probes re-running the solver on perturbed
/// statistics (probes are projected into range(V) for rank-deficient
/// models).  Deterministic given the rng state; pass the same rng per
/// lambda so the score stays smooth across a selection sweep.
double mc_sure_score_nonlinear(
    const PenalizedProblem& prob, const Vector& x,
    const std::function<Vector(const Vector&, double)>& solver, double lambda,
    int probes, Rng rng);

/// Tikhonov machinery for models diagonalized by an orthonormal basis
/// (H = E_out diag(d) E_in^T, C = sigma2 I), e.g. the separable circulant
/// blur.  All scores are exact coordinate sums, so image-sized problems
/// avoid dense m x m factorizations.  Coordinates with |d| below
/// 1e-10 * max|d| * N are outside the numerical range of H^T and are
/// excluded exactly as the dense model excludes them.
class SpectralTikhonov {
 public:
  SpectralTikhonov(Vector d, double sigma2);

  int size() const { return static_cast<int>(d_.size()); }
  int rank() const { return rank_; }

  /// Spectral coordinates of u = H^T x / sigma2 from those of x.
  Vector statistic(const Vector& x_spec) const;
  /// Tikhonov coefficients (Q + lambda I)^{-1} u in spectral coordinates.
  Vector tikhonov_coeffs(const Vector& x_spec, double lambda) const;
  double sure_score(const Vector& x_spec, double lambda) const;
  double gcv_score(const Vector& x_spec, double lambda) const;

 private:
  Vector d_;   // eigenvalues of H (zeroed below the rank threshold)
  Vector q_;   // d^2 / sigma2
  double sigma2_;
  int rank_ = 0;
};

}  // namespace gsure
