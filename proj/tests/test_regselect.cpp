#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "gsure/problems.hpp"
#include "gsure/regselect.hpp"
#include "gsure/sparse.hpp"

using namespace gsure;

namespace {

std::shared_ptr<const LinearGaussianModel> random_model(int n, int m,
                                                        std::uint64_t seed) {
  Rng rng(seed);
  Matrix H(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) H(i, j) = rng.normal();
  return std::make_shared<const LinearGaussianModel>(H,
                                                     Matrix::Identity(n, n));
}

PenalizedProblem identity_problem(int m) {
  auto model = std::make_shared<const LinearGaussianModel>(
      Matrix::Identity(m, m), Matrix::Identity(m, m));
  return PenalizedProblem(model, Matrix::Identity(m, m), Penalty::SquaredL2,
                          LambdaGrid{1e-4, 1e4, 10});
}

}  // namespace

TEST_CASE("lambda grid spans the requested decades") {
  LambdaGrid g{1e-2, 1e2, 10};
  const auto pts = g.points();
  CHECK(pts.front() == 1e-2);
  CHECK(pts.back() == 1e2);
  CHECK(pts.size() == 41);
  for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i] > pts[i - 1]);
  CHECK_THROWS_AS((LambdaGrid{0.0, 1.0, 10}).points(), Error);
}

TEST_CASE("tikhonov solve") {
  const int m = 4;
  auto prob = identity_problem(m);
  Rng rng(1);
  const Vector x = rng.normal_vector(m);

  // H = C = L = I: theta = x / (1 + lambda)
  for (double lam : {0.0, 0.5, 3.0}) {
    CHECK((tikhonov_solve(prob, x, lam) - x / (1.0 + lam)).norm() < 1e-12);
  }

  // lambda = 0 on a full-rank model reduces to ML
  auto model = random_model(6, 4, 2);
  PenalizedProblem p2(model, Matrix::Identity(4, 4), Penalty::SquaredL2,
                      LambdaGrid{1e-4, 1e2, 10});
  const Vector x6 = rng.normal_vector(6);
  CHECK((tikhonov_solve(p2, x6, 0.0) - model->ml_estimate(x6)).norm() < 1e-8);

  // the norm decreases monotonically toward zero on a lambda grid
  double prev = 1e300;
  for (double lam : {0.1, 1.0, 10.0, 100.0, 1e4, 1e6}) {
    const double cur = tikhonov_solve(p2, x6, lam).norm();
    CHECK(cur < prev + 1e-12);
    prev = cur;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("gcv is flat for the identity model") {
  const int m = 5;
  auto prob = identity_problem(m);
  Rng rng(3);
  const Vector x = rng.normal_vector(m);
  const double expected = x.squaredNorm() / (m * m);
  for (double lam : {0.1, 1.0, 7.0, 50.0})
    CHECK(gcv_score(prob, x, lam) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("gcv numerator vanishes on noiseless data as lambda -> 0") {
  auto model = random_model(6, 4, 4);
  PenalizedProblem prob(model, Matrix::Identity(4, 4), Penalty::SquaredL2,
                        LambdaGrid{1e-6, 1e2, 10});
  Vector theta(4);
  theta << 1, -1, 0.5, 2;
  const Vector x = model->H() * theta;
  const double g_small = gcv_score(prob, x, 1e-9);
  const double g_mid = gcv_score(prob, x, 1.0);
  CHECK(g_small < 1e-10);
  CHECK(g_mid > g_small);
}

TEST_CASE("gcv stays positive and finite across the grid on a blur model") {
  // small separable blur instance as a generic smoke check
  const SeparableBlur blur = blur_operator(gaussian_psf(5, 2.0), 8, 8);
  const SpectralTikhonov spec(blur.eigenvalues(), 0.01);
  Rng rng(5);
  const Matrix img = Matrix::NullaryExpr(8, 8, [&]() { return rng.uniform(); });
  const Matrix xs = blur.to_spectral(blur.apply(img));
  const Vector xspec = Eigen::Map<const Vector>(xs.data(), xs.size());
  for (double lam : LambdaGrid{1e-4, 1e4, 5}.points()) {
    const double g = spec.gcv_score(xspec, lam);
    CHECK(std::isfinite(g));
    CHECK(g >= 0.0);
  }
}

TEST_CASE("sure score for tikhonov: hand value at m = 1") {
  auto prob = identity_problem(1);
  Vector x(1);
  x << 2.0;
  CHECK(sure_score_tikhonov(prob, x, 1.0) == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("sure score for tikhonov matches the generic machinery") {
  auto model = random_model(6, 4, 6);
  PenalizedProblem prob(model, Matrix::Identity(4, 4), Penalty::SquaredL2,
                        LambdaGrid{1e-4, 1e2, 10});
  Rng rng(7);
  const Vector x = rng.normal_vector(6);
  for (double lam : {0.05, 0.7, 4.0}) {
    const EstimatorMap est = tikhonov_estimator(prob, lam);
    const double via_est = model->gaussian_sure(est, x).score;
    const double direct = sure_score_tikhonov(prob, x, lam);
    CHECK(direct == doctest::Approx(via_est).epsilon(1e-10));
  }
  // lambda = 0 on a full-rank model: 2 Tr(Q^-1) - ||ml||^2
  const Vector u = model->sufficient_statistic(x);
  const Vector ml = model->ml_from_statistic(u);
  CHECK(sure_score_tikhonov(prob, x, 0.0) ==
        doctest::Approx(2.0 * model->trace_Q_pinv() - ml.squaredNorm())
            .epsilon(1e-10));
}

TEST_CASE("sure score derivative matches finite differences in lambda") {
  auto model = random_model(7, 5, 8);
  PenalizedProblem prob(model, Matrix::Identity(5, 5), Penalty::SquaredL2,
                        LambdaGrid{1e-4, 1e2, 10});
  Rng rng(9);
  const Vector x = rng.normal_vector(7);
  const Vector u = model->sufficient_statistic(x);
  const Matrix LtL = Matrix::Identity(5, 5);
  const double lam = 0.8;

  const Matrix A = model->Q() + lam * LtL;
  const Matrix Ainv = A.ldlt().solve(Matrix::Identity(5, 5));
  const Vector theta = Ainv * u;
  const Vector dtheta = -(Ainv * theta);  // d theta / d lambda (L = I)
  const Vector ml = model->ml_from_statistic(u);
  const double analytic = 2.0 * theta.dot(dtheta)          // d ||theta||^2
                          - 2.0 * (Ainv * Ainv).trace()    // d 2 Tr(Ainv)
                          - 2.0 * dtheta.dot(ml);          // d cross
  const double h = 1e-5;
  const double fd = (sure_score_tikhonov(prob, x, lam + h) -
                     sure_score_tikhonov(prob, x, lam - h)) /
                    (2.0 * h);
  CHECK(fd == doctest::Approx(analytic).epsilon(1e-4));
}

TEST_CASE("tikhonov unbiasedness at fixed lambda") {
  auto model = random_model(6, 4, 10);
  PenalizedProblem prob(model, Matrix::Identity(4, 4), Penalty::SquaredL2,
                        LambdaGrid{1e-4, 1e2, 10});
  Vector theta(4);
  theta << 1.0, -0.5, 0.25, 0.75;
  const auto rep = mc_unbiasedness_check(model->as_simulated(), theta,
                                         tikhonov_estimator(prob, 1.0),
                                         100000, 2024);
  CHECK(rep.pass);
}

TEST_CASE("select_lambda: synthetic parabola recovers the analytic minimum") {
  auto prob = identity_problem(3);
  prob.grid = LambdaGrid{1e-3, 1e3, 10};
  const double target = 3.7;
  const auto parabola = [target](double lam) {
    return (lam - target) * (lam - target);
  };
  const SelectionResult res =
      select_lambda(prob, Vector::Zero(3), Selector::SURE, parabola);
  CHECK(!res.boundary_solution);
  CHECK(res.lambda_star == doctest::Approx(target).epsilon(1e-6));
}

TEST_CASE("select_lambda: flat curve lands on the boundary with a flag") {
  auto prob = identity_problem(4);
  Rng rng(11);
  const Vector x = rng.normal_vector(4);
  const SelectionResult res =
      select_lambda(prob, x, Selector::GCV,
                    [&](double lam) { return gcv_score(prob, x, lam); });
  CHECK(res.boundary_solution);
}

TEST_CASE("selector contract: estimate equals a fresh solve at lambda_star") {
  auto model = random_model(6, 4, 12);
  PenalizedProblem prob(model, Matrix::Identity(4, 4), Penalty::SquaredL2,
                        LambdaGrid{1e-3, 1e3, 10});
  Rng rng(13);
  Vector theta(4);
  theta << 2, 1, -1, 0.5;
  Vector x = model->H() * theta;
  for (int i = 0; i < 6; ++i) x[i] += 0.3 * rng.normal();
  const SelectionResult res = select_lambda(
      prob, x, Selector::SURE,
      [&](double lam) { return sure_score_tikhonov(prob, x, lam); },
      [&](double lam) { return tikhonov_solve(prob, x, lam); });
  CHECK((res.estimate - tikhonov_solve(prob, x, res.lambda_star)).norm() ==
        0.0);
}

TEST_CASE("sure-selected lambda is near the risk-oracle on a blur instance") {
  const int n = 16;
  const SeparableBlur blur = blur_operator(gaussian_psf(7, 4.0), n, n);
  const GrayImage img = synthetic_image("blobs", n);
  const double sigma = 0.05;
  const SpectralTikhonov spec(blur.eigenvalues(), sigma * sigma);
  const Matrix blurred = blur.apply(img.pixels);

  double worst_ratio = 1.0;
  for (std::uint64_t seed : {100ULL, 101ULL, 102ULL, 103ULL}) {
    const Eigen::Map<const Vector> bvec(blurred.data(), blurred.size());
    const Vector noisy = add_noise(Vector(bvec), sigma, seed);
    const Matrix xs =
        blur.to_spectral(Eigen::Map<const Matrix>(noisy.data(), n, n));
    const Vector xspec = Eigen::Map<const Vector>(xs.data(), xs.size());

    double trq = 0.0;
    const Vector d = blur.eigenvalues();
    for (int i = 0; i < d.size(); ++i) trq += d[i] * d[i] / (sigma * sigma);
    const auto grid = LambdaGrid{1e-6 * trq / (n * n), 1e3 * trq / (n * n), 10}
                          .points();
    const auto mse_at = [&](double lam) {
      const Vector coeffs = spec.tikhonov_coeffs(xspec, lam);
      const Matrix rest =
          blur.from_spectral(Eigen::Map<const Matrix>(coeffs.data(), n, n));
      return (rest - img.pixels).squaredNorm() / (n * n);
    };
    const GridScanResult scan = minimize_score_on_grid(
        grid, [&](double lam) { return spec.sure_score(xspec, lam); });
    double oracle = 1e300;
    for (double lam : grid) oracle = std::min(oracle, mse_at(lam));
    worst_ratio = std::max(worst_ratio, mse_at(scan.lambda_star) / oracle);
  }
  CHECK(worst_ratio <= 1.10);
}

TEST_CASE("spectral tikhonov agrees with the dense model on 16x16 images") {
  const int n = 16;
  const double sigma2 = 0.04;
  const SeparableBlur blur = blur_operator(gaussian_psf(5, 3.0), n, n);
  const Matrix Hdense = blur.dense_matrix();
  auto model = std::make_shared<const LinearGaussianModel>(
      Hdense, sigma2 * Matrix::Identity(n * n, n * n));
  PenalizedProblem prob(model, Matrix::Identity(n * n, n * n),
                        Penalty::SquaredL2, LambdaGrid{1e-3, 1e3, 10});
  const SpectralTikhonov spec(blur.eigenvalues(), sigma2);
  CHECK(spec.rank() == model->rank());

  Rng rng(14);
  const Vector x = rng.normal_vector(n * n);
  const Matrix xs =
      blur.to_spectral(Eigen::Map<const Matrix>(x.data(), n, n));
  const Vector xspec = Eigen::Map<const Vector>(xs.data(), xs.size());
  for (double lam : {0.05, 1.0, 20.0}) {
    const double dense_sure = sure_score_tikhonov(prob, x, lam);
    const double fast_sure = spec.sure_score(xspec, lam);
    CHECK(std::abs(fast_sure - dense_sure) <=
          1e-8 * (1.0 + std::abs(dense_sure)));
    const double dense_gcv = gcv_score(prob, x, lam);
    const double fast_gcv = spec.gcv_score(xspec, lam);
    CHECK(fast_gcv == doctest::Approx(dense_gcv).epsilon(1e-8));
    // the tikhonov coefficients agree after mapping back
    const Vector coef = spec.tikhonov_coeffs(xspec, lam);
    const Matrix back =
        blur.from_spectral(Eigen::Map<const Matrix>(coef.data(), n, n));
    const Vector theta = tikhonov_solve(prob, x, lam);
    CHECK((Eigen::Map<const Vector>(back.data(), back.size()) - theta)
              .cwiseAbs()
              .maxCoeff() < 1e-8);
  }
}

TEST_CASE("discrepancy principle") {
  const int m = 6;
  auto prob = identity_problem(m);
  prob.grid = LambdaGrid{1e-4, 1e4, 10};
  Rng rng(15);
  const Vector x = 2.0 * rng.normal_vector(m);
  const double sigma2 = 0.25;
  const auto solver = [&](double lam) {
    return tikhonov_solve(prob, x, lam);
  };

  // identity model: residual = (lambda/(1+lambda))^2 ||x||^2; closed root
  const double target = m * sigma2;
  const double ratio = std::sqrt(target / x.squaredNorm());
  const double root = ratio / (1.0 - ratio);
  const SelectionResult res = discrepancy_select(prob, x, solver, sigma2);
  CHECK(!res.unbracketed);
  CHECK(!res.monotonicity_warning);
  CHECK(res.lambda_star == doctest::Approx(root).epsilon(5e-3));
  CHECK((res.estimate - solver(res.lambda_star)).norm() == 0.0);

  // noiseless data with a residual that never reaches n sigma^2
  Vector clean = Vector::Ones(m) * 0.01;
  PenalizedProblem small = identity_problem(m);
  small.grid = LambdaGrid{1e-4, 1e-2, 10};  // residual stays tiny
  const auto solver2 = [&](double lam) {
    return tikhonov_solve(small, clean, lam);
  };
  const SelectionResult res2 =
      discrepancy_select(small, clean, solver2, 1.0);
  CHECK(res2.unbracketed);
}

TEST_CASE("monte-carlo sure for a black-box solver") {
  auto model = random_model(6, 4, 16);
  PenalizedProblem prob(model, Matrix::Identity(4, 4), Penalty::SquaredL2,
                        LambdaGrid{1e-3, 1e3, 10});
  Rng rng(17);
  const Vector x = rng.normal_vector(6);

  // the tikhonov map solved as a black box reproduces the analytic score
  const auto solver = [&](const Vector& u, double lam) {
    const Matrix A = model->Q() + lam * Matrix::Identity(4, 4);
    return Vector(A.ldlt().solve(u));
  };
  for (double lam : {0.2, 1.0, 5.0}) {
    const double mc = mc_sure_score_nonlinear(prob, x, solver, lam, 64,
                                              Rng(99));
    const double analytic = sure_score_tikhonov(prob, x, lam);
    CHECK(std::abs(mc - analytic) <= 0.03 * (1.0 + std::abs(analytic)));
  }

  // l1 with L = I: a huge lambda zeroes the estimate and the score
  const Matrix L = Matrix::Identity(4, 4);
  const auto l1_solver = [&](const Vector& u, double lam) {
    SolverSettings s;
    s.rel_tol = 1e-9;
    return solve_l1_pen_from_statistic(*model, L, u, lam, s);
  };
  const double lam_huge = 1e6;
  const double score =
      mc_sure_score_nonlinear(prob, x, l1_solver, lam_huge, 8, Rng(100));
  CHECK(std::abs(score) < 1e-8);
}

TEST_CASE("sure tracks the risk argmin for l1 on a well-posed instance") {
  // mildly conditioned full-rank instance with informative data
  auto model = random_model(12, 8, 18);
  const Matrix L = diff_op2(8);
  PenalizedProblem prob(model, L, Penalty::L1, LambdaGrid{0.05, 50.0, 6});
  Vector theta(8);
  theta << 0.0, 0.3, 0.9, 1.8, 2.4, 2.1, 1.0, 0.2;  // smooth profile
  Rng rng(19);
  Vector x = model->H() * theta;
  for (int i = 0; i < 12; ++i) x[i] += 0.4 * rng.normal();

  const auto solver = [&](const Vector& u, double lam) {
    SolverSettings s;
    s.rel_tol = 1e-8;
    return solve_l1_pen_from_statistic(*model, L, u, lam, s);
  };
  const auto grid = prob.grid.points();
  std::size_t best_score = 0, best_risk = 0;
  double score_min = 1e300, risk_min = 1e300;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s =
        mc_sure_score_nonlinear(prob, x, solver, grid[i], 16, Rng(55));
    const Vector est = solver(model->sufficient_statistic(x), grid[i]);
    const double risk = (est - theta).squaredNorm();
    if (s < score_min) {
      score_min = s;
      best_score = i;
    }
    if (risk < risk_min) {
      risk_min = risk;
      best_risk = i;
    }
  }
  CHECK(std::abs(static_cast<int>(best_score) - static_cast<int>(best_risk)) <=
        1);
}
