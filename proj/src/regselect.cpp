#include "gsure/regselect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gsure {

namespace {

constexpr double kGoldenRatio = 0.6180339887498949;

// Golden-section minimization of f over [a, b]; returns the abscissa.
double golden_section(const std::function<double(double)>& f, double a,
                      double b, double rel_tol) {
  double x1 = b - kGoldenRatio * (b - a);
  double x2 = a + kGoldenRatio * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while ((b - a) > rel_tol * (std::abs(a) + std::abs(b)) * 0.5 + 1e-300) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGoldenRatio * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGoldenRatio * (b - a);
      f2 = f(x2);
    }
    if (b - a <= 0) break;
  }
  return 0.5 * (a + b);
}

Matrix regularized_matrix(const PenalizedProblem& prob, double lambda) {
  return prob.model->Q() + lambda * (prob.L.transpose() * prob.L);
}

}  // namespace

std::vector<double> LambdaGrid::points() const {
  if (!(lo > 0.0) || !(hi >= lo))
    throw Error("invalid-argument", "lambda grid needs 0 < lo <= hi");
  if (hi == lo) return {lo};
  const double decades = std::log10(hi / lo);
  const int segments =
      std::max(1, static_cast<int>(std::ceil(decades * points_per_decade)));
  std::vector<double> pts(segments + 1);
  for (int k = 0; k <= segments; ++k)
    pts[k] = lo * std::pow(hi / lo, static_cast<double>(k) / segments);
  pts.front() = lo;
  pts.back() = hi;
  return pts;
}

LambdaGrid LambdaGrid::default_for(const Matrix& Q, const Matrix& L) {
  const double tq = Q.trace();
  const double tl = (L.transpose() * L).trace();
  const double scale = (tq > 0 && tl > 0) ? tq / tl : 1.0;
  LambdaGrid g;
  g.lo = 1e-6 * scale;
  g.hi = 1e+3 * scale;
  return g;
}

PenalizedProblem::PenalizedProblem(
    std::shared_ptr<const LinearGaussianModel> model_in, Matrix L_in,
    Penalty penalty_in, LambdaGrid grid_in)
    : model(std::move(model_in)),
      L(std::move(L_in)),
      penalty(penalty_in),
      grid(grid_in) {
  if (!model) throw Error("invalid-argument", "problem needs a model");
  if (L.cols() != model->ambient_dim())
    throw Error("invalid-argument", "L must have m columns");
  if (!(grid.lo > 0.0))
    throw Error("invalid-argument", "lambda grid minimum must be positive");
  if (penalty == Penalty::SquaredL2) {
    // null(L) and null(H) must only share {0}: check solvability at lo.
    const Matrix A = model->Q() + grid.lo * (L.transpose() * L);
    Eigen::LDLT<Matrix> ldlt(A);
    const Vector probe = Vector::Ones(A.rows());
    const Vector sol = ldlt.solve(probe);
    if (ldlt.info() != Eigen::Success ||
        (A * sol - probe).norm() > 1e-6 * probe.norm())
      throw Error("degenerate-regularization",
                  "Q + lambda L^T L is singular at the grid minimum");
  }
}

Vector tikhonov_solve(const PenalizedProblem& prob, const Vector& x,
                      double lambda) {
  if (prob.penalty != Penalty::SquaredL2)
    throw Error("invalid-argument", "tikhonov_solve needs a squared-l2 penalty");
  if (lambda < 0.0) throw Error("invalid-argument", "lambda must be >= 0");
  const Vector u = prob.model->sufficient_statistic(x);
  const Matrix A = regularized_matrix(prob, lambda);
  Eigen::LDLT<Matrix> ldlt(A);
  const Vector theta = ldlt.solve(u);
  if (ldlt.info() != Eigen::Success ||
      (A * theta - u).norm() > 1e-8 * (1.0 + u.norm()))
    throw Error("degenerate-regularization",
                "regularized system is numerically singular at lambda = " +
                    std::to_string(lambda));
  return theta;
}

double gcv_score(const PenalizedProblem& prob, const Vector& x,
                 double lambda) {
  if (prob.penalty != Penalty::SquaredL2)
    throw Error("invalid-argument", "gcv_score needs a squared-l2 penalty");
  const Vector theta = tikhonov_solve(prob, x, lambda);
  const Matrix A = regularized_matrix(prob, lambda);
  const Matrix M = Eigen::LDLT<Matrix>(A).solve(prob.model->Q());
  const double trace = static_cast<double>(A.rows()) - M.trace();
  if (std::abs(trace) < 1e-12)
    throw Error("gcv-degenerate", "Tr(I - (Q+lambda L'L)^-1 Q) vanishes");
  const double resid = (x - prob.model->H() * theta).squaredNorm();
  return resid / (trace * trace);
}

double sure_score_tikhonov(const PenalizedProblem& prob, const Vector& x,
                           double lambda) {
  if (prob.penalty != Penalty::SquaredL2)
    throw Error("invalid-argument",
                "sure_score_tikhonov needs a squared-l2 penalty");
  const auto& model = *prob.model;
  const Vector u = model.sufficient_statistic(x);
  const Matrix A = regularized_matrix(prob, lambda);
  Eigen::LDLT<Matrix> ldlt(A);
  const Vector theta = ldlt.solve(u);
  if (ldlt.info() != Eigen::Success ||
      (A * theta - u).norm() > 1e-8 * (1.0 + u.norm()))
    throw Error("degenerate-regularization",
                "regularized system is numerically singular");
  const Matrix Ainv = ldlt.solve(Matrix::Identity(A.rows(), A.cols()));
  double trace_term;
  Vector Ptheta;
  if (model.full_rank()) {
    trace_term = Ainv.trace();
    Ptheta = theta;
  } else {
    trace_term = (model.projection().cwiseProduct(Ainv.transpose())).sum();
    Ptheta = model.projection() * theta;
  }
  const double cross = -2.0 * theta.dot(model.ml_from_statistic(u));
  return Ptheta.squaredNorm() + 2.0 * trace_term + cross;
}

EstimatorMap tikhonov_estimator(const PenalizedProblem& prob, double lambda) {
  const Matrix A = regularized_matrix(prob, lambda);
  Eigen::LDLT<Matrix> ldlt(A);
  const Matrix Ainv = ldlt.solve(Matrix::Identity(A.rows(), A.cols()));
  if (ldlt.info() != Eigen::Success)
    throw Error("degenerate-regularization",
                "regularized system is numerically singular");
  EstimatorMap est;
  est.apply = [Ainv](const Vector& u) { return Vector(Ainv * u); };
  const double trace = Ainv.trace();
  est.divergence = [trace](const Vector&) { return trace; };
  est.projected_divergence = [Ainv](const Vector&, const Matrix& P) {
    return (P.cwiseProduct(Ainv.transpose())).sum();
  };
  return est;
}

GridScanResult minimize_score_on_grid(
    const std::vector<double>& grid,
    const std::function<double(double)>& score_fn) {
  if (grid.empty()) throw Error("invalid-argument", "empty lambda grid");
  GridScanResult res;
  res.curve.reserve(grid.size());
  std::size_t best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = score_fn(grid[i]);
    res.curve.emplace_back(grid[i], s);
    if (s < best_score) {
      best_score = s;
      best = i;
    }
  }
  if (grid.size() < 3 || best == 0 || best + 1 == grid.size()) {
    res.boundary = true;
    res.lambda_star = grid[best];
    res.score_star = best_score;
  } else {
    // refine on log-lambda inside the bracketing interval
    const double la = std::log(grid[best - 1]);
    const double lb = std::log(grid[best + 1]);
    const double lstar = golden_section(
        [&](double l) { return score_fn(std::exp(l)); }, la, lb, 1e-7);
    res.lambda_star = std::exp(lstar);
    res.score_star = score_fn(res.lambda_star);
    if (res.score_star > best_score) {  // keep the grid point on a bad refine
      res.lambda_star = grid[best];
      res.score_star = best_score;
    }
    res.curve.emplace_back(res.lambda_star, res.score_star);
  }
  return res;
}

SelectionResult select_lambda(const PenalizedProblem& prob, const Vector&,
                              Selector selector,
                              const std::function<double(double)>& score_fn,
                              const std::function<Vector(double)>& solver) {
  SelectionResult res;
  res.selector = selector;
  const GridScanResult scan =
      minimize_score_on_grid(prob.grid.points(), score_fn);
  res.lambda_star = scan.lambda_star;
  res.score_curve = scan.curve;
  res.boundary_solution = scan.boundary;
  if (solver) res.estimate = solver(res.lambda_star);
  return res;
}

SelectionResult discrepancy_select(const PenalizedProblem& prob,
                                   const Vector& x,
                                   const std::function<Vector(double)>& solver,
                                   double sigma2) {
  SelectionResult res;
  res.selector = Selector::Discrepancy;
  const double target = static_cast<double>(x.size()) * sigma2;
  const auto residual = [&](double lambda) {
    return (x - prob.model->H() * solver(lambda)).squaredNorm();
  };
  const std::vector<double> grid = prob.grid.points();
  std::vector<double> resid(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    resid[i] = residual(grid[i]);
    res.score_curve.emplace_back(grid[i], resid[i]);
    if (i > 0 && resid[i] < resid[i - 1] - 1e-9 * (1.0 + resid[i - 1]))
      res.monotonicity_warning = true;
  }
  // largest bracketing interval: last sign change of resid - target
  std::ptrdiff_t bracket = -1;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if ((resid[i - 1] - target) * (resid[i] - target) <= 0.0)
      bracket = static_cast<std::ptrdiff_t>(i);
  if (bracket < 0) {
    res.unbracketed = true;
    const double d_front = std::abs(resid.front() - target);
    const double d_back = std::abs(resid.back() - target);
    res.lambda_star = d_front <= d_back ? grid.front() : grid.back();
    if (solver) res.estimate = solver(res.lambda_star);
    return res;
  }
  double la = std::log(grid[bracket - 1]);
  double lb = std::log(grid[bracket]);
  double ra = resid[bracket - 1] - target;
  double lambda_star = std::exp(0.5 * (la + lb));
  for (int it = 0; it < 200; ++it) {
    lambda_star = std::exp(0.5 * (la + lb));
    const double r = residual(lambda_star) - target;
    if (std::abs(r) <= 1e-3 * target) break;
    if ((r > 0) == (ra > 0)) {
      la = std::log(lambda_star);
      ra = r;
    } else {
      lb = std::log(lambda_star);
    }
    if (lb - la < 1e-14) break;
  }
  res.lambda_star = lambda_star;
  if (solver) res.estimate = solver(res.lambda_star);
  return res;
}

double mc_sure_score_nonlinear(
    const PenalizedProblem& prob, const Vector& x,
    const std::function<Vector(const Vector&, double)>& solver, double lambda,
    int probes, Rng rng) {
  if (probes < 1) throw Error("invalid-argument", "probes must be >= 1");
  const auto& model = *prob.model;
  const Vector u = model.sufficient_statistic(x);
  const Vector theta = solver(u, lambda);
  const double eps = 1e-4 * (1.0 + u.cwiseAbs().maxCoeff());
  const bool full = model.full_rank();
  double div = 0.0;
  for (int p = 0; p < probes; ++p) {
    const Vector b = rng.rademacher_vector(u.size());
    const Vector d = full ? b : Vector(model.projection() * b);
    Vector theta_p;
    try {
      theta_p = solver(u + eps * d, lambda);
    } catch (const Error& e) {
      throw Error("probe-failure", "solver failed on probe " +
                                       std::to_string(p) + ": " + e.what());
    }
    div += b.dot(theta_p - theta) / eps;
  }
  div /= probes;
  const Vector Ptheta = full ? theta : Vector(model.projection() * theta);
  const double cross = -2.0 * theta.dot(model.ml_from_statistic(u));
  return Ptheta.squaredNorm() + 2.0 * div + cross;
}

SpectralTikhonov::SpectralTikhonov(Vector d, double sigma2)
    : d_(std::move(d)), sigma2_(sigma2) {
  if (sigma2_ <= 0.0) throw Error("invalid-argument", "sigma2 must be > 0");
  const double dmax = d_.cwiseAbs().maxCoeff();
  const double thr = 1e-10 * dmax * static_cast<double>(d_.size());
  q_ = Vector::Zero(d_.size());
  for (Eigen::Index i = 0; i < d_.size(); ++i) {
    if (std::abs(d_[i]) > thr) {
      q_[i] = d_[i] * d_[i] / sigma2_;
      ++rank_;
    } else {
      d_[i] = 0.0;
    }
  }
}

Vector SpectralTikhonov::statistic(const Vector& x_spec) const {
  return (d_.array() * x_spec.array() / sigma2_).matrix();
}

Vector SpectralTikhonov::tikhonov_coeffs(const Vector& x_spec,
                                         double lambda) const {
  const Vector u = statistic(x_spec);
  Vector theta = Vector::Zero(d_.size());
  for (Eigen::Index i = 0; i < d_.size(); ++i)
    if (q_[i] > 0.0) theta[i] = u[i] / (q_[i] + lambda);
  return theta;
}

double SpectralTikhonov::sure_score(const Vector& x_spec,
                                    double lambda) const {
  const Vector u = statistic(x_spec);
  double fid = 0.0, trace = 0.0, cross = 0.0;
  for (Eigen::Index i = 0; i < d_.size(); ++i) {
    if (q_[i] <= 0.0) continue;
    const double th = u[i] / (q_[i] + lambda);
    fid += th * th;
    trace += 1.0 / (q_[i] + lambda);
    cross += th * (u[i] / q_[i]);
  }
  return fid + 2.0 * trace - 2.0 * cross;
}

double SpectralTikhonov::gcv_score(const Vector& x_spec,
                                   double lambda) const {
  const Vector u = statistic(x_spec);
  double resid = 0.0, trace = 0.0;
  for (Eigen::Index i = 0; i < d_.size(); ++i) {
    const double th = q_[i] > 0.0 ? u[i] / (q_[i] + lambda) : 0.0;
    const double r = x_spec[i] - d_[i] * th;
    resid += r * r;
    trace += q_[i] > 0.0 ? lambda / (q_[i] + lambda) : 1.0;
  }
  if (std::abs(trace) < 1e-12)
    throw Error("gcv-degenerate", "effective residual degrees vanish");
  return resid / (trace * trace);
}

}  // namespace gsure
