#pragma once

#include <array>
#include <vector>

#include "gsure/linear_gaussian.hpp"

namespace gsure {

/// Second-order difference operator: (m-2) x m rows with the (1, -2, 1)
/// stencil on the interior only; constants and linear ramps are in its
/// null space.
Matrix diff_op2(int m);

/// Warm-start state carried between related solves (e.g. neighbouring
/// lambdas on a grid).  Purely an accelerator: results stay within the
/// solver tolerance of a cold start.
struct WarmState {
  Vector z, w;
  double rho = 0.0;
};

struct SolverSettings {
  int max_iters = 50000;
  double rel_tol = 1e-8;   // target normalized KKT residual
  double rho0 = 1.0;       // initial ADMM penalty
  int check_interval = 50; // KKT / rho-rebalance cadence
  WarmState* warm = nullptr;
  /// When set, appends (iteration, objective, kkt_residual) at every check.
  std::vector<std::array<double, 3>>* iterate_log = nullptr;
};

/// Exact objective (x - H theta)' C^-1 (x - H theta) + lambda ||L theta||_1.
double objective_value(const LinearGaussianModel& model, const Matrix& L,
                       const Vector& x, double lambda, const Vector& theta);

/// Distance from -grad(smooth part) to lambda L' d||.||_1 evaluated at
/// L theta, normalized by (1 + ||grad smooth||).  Zero iff theta is optimal.
double kkt_residual(const LinearGaussianModel& model, const Matrix& L,
                    const Vector& x, double lambda, const Vector& theta);

/// Minimizes the l1-penalized criterion by ADMM on the split z = L theta
/// with deterministic zero initialization, residual-balanced penalty
/// updates, and the KKT residual as the stopping certificate.  Throws
/// "non-converged" (with the residual in the message) when max_iters is
/// reached above tolerance.
Vector solve_l1_pen(const LinearGaussianModel& model, const Matrix& L,
                    const Vector& x, double lambda,
                    const SolverSettings& settings = {});

/// Same solve parameterized directly by the sufficient statistic u, which
/// is what probe-based risk scores perturb.
Vector solve_l1_pen_from_statistic(const LinearGaussianModel& model,
                                   const Matrix& L, const Vector& u,
                                   double lambda,
                                   const SolverSettings& settings = {});

}  // namespace gsure
