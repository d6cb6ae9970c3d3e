#include "gsure/experiments.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "gsure/linear_gaussian.hpp"
#include "gsure/regselect.hpp"
#include "gsure/sparse.hpp"
#include "gsure/wavelet.hpp"

namespace gsure {

namespace {

constexpr std::uint64_t kDefaultSeed = 20240901ULL;

std::string format_sigma(double s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", s);
  return buf;
}

std::string seed_range_string(std::uint64_t seed, long long trials) {
  return std::to_string(seed) + ".." + std::to_string(seed + trials - 1);
}

struct MeanAccumulator {
  double sum = 0.0, sum2 = 0.0;
  long long n = 0;
  void add(double v) {
    sum += v;
    sum2 += v * v;
    ++n;
  }
  double mean() const { return n ? sum / n : 0.0; }
  double std_err() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double var = (sum2 - n * m * m) / (n - 1);
    return std::sqrt(std::max(var, 0.0) / n);
  }
};

const std::set<std::string>& allowed_keys(const std::string& experiment) {
  static const std::map<std::string, std::set<std::string>> table = {
      {"verify-sure",
       {"experiment.name", "experiment.seed", "experiment.trials",
        "output.dir"}},
      {"deblur",
       {"experiment.name", "experiment.seed", "experiment.trials",
        "problem.size", "problem.psf_dim", "problem.psf_sd", "problem.sigmas",
        "problem.images", "select.points_per_decade", "select.lambda_lo_scale",
        "select.lambda_hi_scale", "output.dir"}},
      {"deconv",
       {"experiment.name", "experiment.seed", "experiment.trials", "problem.n",
        "problem.sigma", "problem.kappa", "select.lambda_lo",
        "select.lambda_hi", "select.points_per_decade", "select.probes",
        "solver.rel_tol", "solver.max_iters", "output.dir"}},
      {"denoise",
       {"experiment.name", "experiment.seed", "experiment.trials", "problem.n",
        "problem.sigma2", "problem.levels", "problem.filter",
        "problem.signals", "output.dir"}},
      {"table", {"experiment.name", "output.dir"}},
  };
  const auto it = table.find(experiment);
  if (it == table.end())
    throw Error("config-error", "unknown experiment: " + experiment);
  return it->second;
}

}  // namespace

std::string default_config_text(const std::string& experiment) {
  if (experiment == "verify-sure")
    return "[experiment]\n"
           "name = verify-sure\n"
           "seed = 20240901\n"
           "trials = 100000\n"
           "[output]\n"
           "dir = out\n";
  if (experiment == "deblur")
    return "[experiment]\n"
           "name = deblur\n"
           "seed = 20240901\n"
           "trials = 10\n"
           "[problem]\n"
           "size = 64\n"
           "psf_dim = 9\n"
           "psf_sd = 6\n"
           "sigmas = 0.01,0.05,0.1\n"
           "images = blobs,squares\n"
           "[select]\n"
           "points_per_decade = 10\n"
           "lambda_lo_scale = 1e-6\n"
           "lambda_hi_scale = 1e3\n"
           "[output]\n"
           "dir = out\n";
  if (experiment == "deconv")
    return "[experiment]\n"
           "name = deconv\n"
           "seed = 20240901\n"
           "trials = 25\n"
           "[problem]\n"
           "n = 80\n"
           "sigma = 1\n"
           "kappa = 1\n"
           "[select]\n"
           "lambda_lo = 1.0\n"
           "lambda_hi = 2000.0\n"
           "points_per_decade = 10\n"
           "probes = 2\n"
           "[solver]\n"
           "rel_tol = 1e-7\n"
           "max_iters = 40000\n"
           "[output]\n"
           "dir = out\n";
  if (experiment == "denoise")
    return "[experiment]\n"
           "name = denoise\n"
           "seed = 20240901\n"
           "trials = 25\n"
           "[problem]\n"
           "n = 2048\n"
           "sigma2 = 4\n"
           "levels = 5\n"
           "filter = daub8\n"
           "signals = Blocks,Bumps,HeaviSine,Doppler\n"
           "[output]\n"
           "dir = out\n";
  if (experiment == "table")
    return "[experiment]\nname = table\n[output]\ndir = out\n";
  throw Error("config-error", "unknown experiment: " + experiment);
}

Config resolve_config(
    const std::string& experiment, const std::string& config_path,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
  Config cfg = Config::parse_string(default_config_text(experiment));
  if (!config_path.empty()) {
    const Config user = Config::parse_file(config_path);
    user.validate_keys(allowed_keys(experiment));
    const std::string name = user.get_string("experiment.name", experiment);
    if (name != experiment)
      throw Error("config-error", "config is for experiment '" + name +
                                      "', expected '" + experiment + "'");
    for (const auto& [k, v] : user.entries()) cfg.set(k, v);
  }
  for (const auto& [k, v] : overrides) cfg.set(k, v);
  cfg.validate_keys(allowed_keys(experiment));
  return cfg;
}

// ---------------------------------------------------------------------------
// bundled verification pairs

namespace {

LinearGaussianModel make_iid_model(int m, double sigma) {
  return LinearGaussianModel(Matrix::Identity(m, m),
                             sigma * sigma * Matrix::Identity(m, m));
}

// estimators over u for the iid Gaussian model (u = x / sigma^2)
EstimatorMap iid_identity_estimator(int m, double sigma) {
  const double s2 = sigma * sigma;
  EstimatorMap est;
  est.apply = [s2](const Vector& u) { return Vector(s2 * u); };
  est.divergence = [m, s2](const Vector&) { return m * s2; };
  est.projected_divergence = [s2](const Vector&, const Matrix& P) {
    return s2 * P.trace();
  };
  return est;
}

EstimatorMap zero_estimator() {
  EstimatorMap est;
  est.apply = [](const Vector& u) { return Vector(Vector::Zero(u.size())); };
  est.divergence = [](const Vector&) { return 0.0; };
  est.projected_divergence = [](const Vector&, const Matrix&) { return 0.0; };
  return est;
}

// (1 - m sigma^2 / ||x||^2) x with d/dx trace m - m sigma^2 (m-2)/||x||^2
EstimatorMap iid_stein_estimator(int m, double sigma) {
  const double s2 = sigma * sigma;
  EstimatorMap est;
  est.apply = [m, s2](const Vector& u) -> Vector {
    const Vector x = s2 * u;
    const double n2 = x.squaredNorm();
    if (n2 == 0.0) return Vector::Zero(x.size());
    return (1.0 - m * s2 / n2) * x;
  };
  est.divergence = [m, s2](const Vector& u) {
    const Vector x = s2 * u;
    const double n2 = x.squaredNorm();
    if (n2 == 0.0) return 0.0;
    return s2 * (m - m * s2 * (m - 2) / n2);
  };
  est.projected_divergence = nullptr;
  return est;
}

EstimatorMap iid_soft_threshold_estimator(double t, double sigma) {
  const double s2 = sigma * sigma;
  EstimatorMap est;
  est.apply = [t, s2](const Vector& u) {
    return soft_threshold(Vector(s2 * u), t);
  };
  est.divergence = [t, s2](const Vector& u) {
    const Vector x = s2 * u;
    double count = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (std::abs(x[i]) >= t) count += 1.0;  // kink derivative from above
    return s2 * count;
  };
  est.projected_divergence = nullptr;
  return est;
}

EstimatorMap ml_estimator(const LinearGaussianModel& model) {
  const Matrix Qp = model.Q_pinv();
  const double tr = model.trace_Q_pinv();
  EstimatorMap est;
  est.apply = [Qp](const Vector& u) { return Vector(Qp * u); };
  est.divergence = [tr](const Vector&) { return tr; };
  est.projected_divergence = [Qp](const Vector&, const Matrix& P) {
    return (P.cwiseProduct(Qp.transpose())).sum();
  };
  return est;
}

Matrix seeded_matrix(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

SimulatedModel gamma_simulated_model(int shape_k) {
  SimulatedModel sim;
  sim.fam.ambient_dim = 1;
  sim.fam.obs_dim = 1;
  sim.fam.suff_stat = [](const Vector& x) { return x; };
  sim.fam.grad_log_q = [shape_k](const Vector& u) {
    Vector g(1);
    g[0] = (shape_k - 1.0) / u[0];
    return g;
  };
  sim.sample = [shape_k](const Vector& theta, Rng& rng) {
    Vector x(1);
    x[0] = rng.gamma_integer_shape(shape_k, -theta[0]);
    return x;
  };
  return sim;
}

}  // namespace

std::vector<BundledPair> bundled_verification_pairs() {
  std::vector<BundledPair> pairs;

  {  // iid Gaussian, m = 8, sigma = 1
    const int m = 8;
    const double sigma = 1.0;
    const LinearGaussianModel model = make_iid_model(m, sigma);
    Vector theta(m);
    theta << 1.0, 1.0, 0.5, 0.0, -0.5, -1.0, 2.0, 0.25;
    const auto add = [&](const std::string& name, EstimatorMap est) {
      pairs.push_back({"iid-gauss(m=8)", name, model.as_simulated(), theta,
                       std::move(est)});
    };
    add("identity", iid_identity_estimator(m, sigma));
    add("zero", zero_estimator());
    add("stein", iid_stein_estimator(m, sigma));
    add("soft-threshold(t=1)", iid_soft_threshold_estimator(1.0, sigma));
  }

  {  // full-rank 6 x 4 with a non-trivial diagonal covariance
    const Matrix H = seeded_matrix(6, 4, 11);
    Vector cdiag(6);
    cdiag << 0.5, 0.8, 1.0, 1.3, 1.7, 2.0;
    const Matrix C = cdiag.asDiagonal();
    const auto model = std::make_shared<const LinearGaussianModel>(H, C);
    Vector theta(4);
    theta << 1.0, -0.5, 0.25, 0.75;
    const auto add = [&](const std::string& name, EstimatorMap est) {
      pairs.push_back({"linear-gauss(6x4)", name, model->as_simulated(), theta,
                       std::move(est)});
    };
    add("ml", ml_estimator(*model));
    PenalizedProblem prob(model, Matrix::Identity(4, 4), Penalty::SquaredL2,
                          LambdaGrid{1e-3, 1e3, 10});
    add("tikhonov(lambda=1)", tikhonov_estimator(prob, 1.0));
    add("blind-minimax", blind_minimax_estimator(*model, false));
  }

  {  // rank-deficient 2 x 2 (rank 1)
    Matrix H(2, 2);
    H << 1.0, 1.0, 2.0, 2.0;
    const LinearGaussianModel model(H, Matrix::Identity(2, 2));
    Vector theta(2);
    theta << 1.0, 0.5;
    pairs.push_back({"rank-deficient(2x2,r=1)", "ml", model.as_simulated(),
                     theta, ml_estimator(model)});
  }

  {  // scalar gamma, known shape k = 2, natural parameter eta = -1
    SimulatedModel sim = gamma_simulated_model(2);
    Vector theta(1);
    theta << -1.0;
    EstimatorMap est;
    est.apply = [](const Vector& u) { return u; };
    est.divergence = [](const Vector&) { return 1.0; };
    est.projected_divergence = nullptr;
    pairs.push_back(
        {"scalar-gamma(k=2)", "identity", std::move(sim), theta, est});
  }

  return pairs;
}

VerifySureOutcome run_verify_sure(const Config& config) {
  const std::uint64_t seed = config.get_seed("experiment.seed", kDefaultSeed);
  const long long trials = config.get_int("experiment.trials", 100000);
  if (trials < 1) throw Error("config-error", "trials must be >= 1");

  VerifySureOutcome out;
  out.report = make_report("verify-sure", config);
  out.all_pass = true;
  auto pairs = bundled_verification_pairs();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& pair = pairs[i];
    const UnbiasednessReport rep = mc_unbiasedness_check(
        pair.sim, pair.theta, pair.est, static_cast<int>(trials),
        Rng(seed).child(1000 + i).next_u64());
    out.underpowered = out.underpowered || rep.underpowered;
    ReportRow row;
    row.method = pair.estimator_name;
    row.problem = pair.model_name;
    row.seed_range = seed_range_string(seed, trials);
    row.mean_mse = rep.empirical_mse;
    row.std_err = rep.std_err;
    row.reference = rep.mean_score + rep.constant;  // score-implied MSE
    out.report.rows.push_back(row);
    if (!rep.pass) {
      out.all_pass = false;
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%s x %s: |z| = %.2f > 4",
                    pair.model_name.c_str(), pair.estimator_name.c_str(),
                    std::abs(rep.z));
      out.failures.push_back(buf);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// deblurring

DeblurOutcome run_deblur(const Config& config) {
  const std::uint64_t seed = config.get_seed("experiment.seed", kDefaultSeed);
  const long long trials = config.get_int("experiment.trials", 10);
  const int size = static_cast<int>(config.get_int("problem.size", 64));
  const int psf_dim = static_cast<int>(config.get_int("problem.psf_dim", 9));
  const double psf_sd = config.get_double("problem.psf_sd", 6.0);
  const auto sigmas =
      config.get_double_list("problem.sigmas", {0.01, 0.05, 0.1});
  const auto images =
      config.get_string_list("problem.images", {"blobs", "squares"});
  const int ppd =
      static_cast<int>(config.get_int("select.points_per_decade", 10));
  const double lo_scale = config.get_double("select.lambda_lo_scale", 1e-6);
  const double hi_scale = config.get_double("select.lambda_hi_scale", 1e3);
  if (trials < 1) throw Error("config-error", "trials must be >= 1");

  DeblurOutcome out;
  out.report = make_report("deblur", config);

  const Matrix kernel = gaussian_psf(psf_dim, psf_sd);
  const SeparableBlur blur = blur_operator(kernel, size, size);
  const double npix = static_cast<double>(size) * size;

  std::uint64_t image_index = 0;
  for (const auto& image_name : images) {
    GrayImage img;
    if (image_name.size() > 4 &&
        image_name.substr(image_name.size() - 4) == ".pgm") {
      img = pgm_read(image_name);
      if (img.width != size || img.height != size)
        throw Error("invalid-argument",
                    "image size mismatch: expected " + std::to_string(size) +
                        "x" + std::to_string(size));
    } else {
      img = synthetic_image(image_name, size);
    }
    const Matrix clean = img.pixels;
    const Matrix blurred = blur.apply(clean);

    std::uint64_t sigma_index = 0;
    for (double sigma : sigmas) {
      const double sigma2_eff = sigma > 0.0 ? sigma * sigma : 1e-30;
      const SpectralTikhonov spec(blur.eigenvalues(), sigma2_eff);
      // lambda grid scaled by the mean spectral energy Tr(Q)/m
      double trq = 0.0;
      {
        const Vector d = blur.eigenvalues();
        for (Eigen::Index i = 0; i < d.size(); ++i)
          trq += d[i] * d[i] / sigma2_eff;
      }
      LambdaGrid grid{lo_scale * trq / npix, hi_scale * trq / npix, ppd};
      const auto grid_points = grid.points();

      MeanAccumulator mse_sure, mse_gcv;
      for (long long t = 0; t < trials; ++t) {
        const std::uint64_t noise_seed =
            Rng(seed).child(image_index).child(sigma_index).child(t).next_u64();
        Vector noisy_vec(static_cast<Eigen::Index>(npix));
        Eigen::Map<const Vector> clean_vec(blurred.data(), blurred.size());
        noisy_vec =
            add_noise(Vector(clean_vec), sigma, noise_seed);
        const Matrix noisy =
            Eigen::Map<const Matrix>(noisy_vec.data(), size, size);
        const Matrix xspec_m = blur.to_spectral(noisy);
        const Vector xspec =
            Eigen::Map<const Vector>(xspec_m.data(), xspec_m.size());

        const auto run_selector = [&](bool use_sure) {
          const GridScanResult scan = minimize_score_on_grid(
              grid_points, [&](double lam) {
                return use_sure ? spec.sure_score(xspec, lam)
                                : spec.gcv_score(xspec, lam);
              });
          out.any_boundary = out.any_boundary || scan.boundary;
          const Vector coeffs = spec.tikhonov_coeffs(xspec, scan.lambda_star);
          const Matrix rest = blur.from_spectral(
              Eigen::Map<const Matrix>(coeffs.data(), size, size));
          return rest;
        };
        const Matrix rest_sure = run_selector(true);
        const Matrix rest_gcv = run_selector(false);
        mse_sure.add((rest_sure - clean).squaredNorm() / npix);
        mse_gcv.add((rest_gcv - clean).squaredNorm() / npix);
        if (t == 0) {
          const auto clamp_img = [&](const Matrix& m) {
            GrayImage g;
            g.width = g.height = size;
            g.pixels = m;
            return g;
          };
          const std::string stem =
              "deblur_" + image_name + "_s" + format_sigma(sigma);
          out.images.emplace_back(stem + "_sure", clamp_img(rest_sure));
          out.images.emplace_back(stem + "_gcv", clamp_img(rest_gcv));
        }
      }
      const std::string problem =
          image_name + " s=" + format_sigma(sigma);
      ReportRow sure_row{"SURE", problem, seed_range_string(seed, trials),
                         mse_sure.mean(), mse_sure.std_err(), std::nullopt};
      ReportRow gcv_row{"GCV", problem, seed_range_string(seed, trials),
                        mse_gcv.mean(), mse_gcv.std_err(), std::nullopt};
      out.report.rows.push_back(sure_row);
      out.report.rows.push_back(gcv_row);
      ++sigma_index;
    }
    ++image_index;
  }
  return out;
}

// ---------------------------------------------------------------------------
// deconvolution

DeconvOutcome run_deconv(const Config& config) {
  const std::uint64_t seed = config.get_seed("experiment.seed", kDefaultSeed);
  const long long trials = config.get_int("experiment.trials", 25);
  const int n = static_cast<int>(config.get_int("problem.n", 80));
  const double sigma = config.get_double("problem.sigma", 1.0);
  const double kappa = config.get_double("problem.kappa", 1.0);
  const double lambda_lo = config.get_double("select.lambda_lo", 1.0);
  const double lambda_hi = config.get_double("select.lambda_hi", 2000.0);
  const int ppd =
      static_cast<int>(config.get_int("select.points_per_decade", 10));
  const int probes = static_cast<int>(config.get_int("select.probes", 2));
  const double rel_tol = config.get_double("solver.rel_tol", 1e-7);
  const int max_iters =
      static_cast<int>(config.get_int("solver.max_iters", 40000));
  if (trials < 1) throw Error("config-error", "trials must be >= 1");

  const TestProblem heat = heat_problem(n, kappa);
  const auto model = std::make_shared<const LinearGaussianModel>(
      heat.H, sigma > 0 ? Matrix(sigma * sigma * heat.C) : heat.C);
  const Matrix L = diff_op2(n);
  PenalizedProblem prob(model, L, Penalty::L1,
                        LambdaGrid{lambda_lo, lambda_hi, ppd});
  const auto grid_points = prob.grid.points();
  const Matrix& P = model->projection();
  const bool full = model->full_rank();

  DeconvOutcome out;
  out.report = make_report("deconv", config);
  MeanAccumulator mse_sure, mse_disc, mse_oracle;

  for (long long t = 0; t < trials; ++t) {
    const std::uint64_t noise_seed = Rng(seed).child(t).next_u64();
    const Vector x = add_noise(heat.H * heat.true_theta, sigma, noise_seed);
    const Vector u = model->sufficient_statistic(x);
    const Vector theta_ml = model->ml_from_statistic(u);

    // probe directions, fixed across lambda so the score stays smooth
    Rng probe_rng = Rng(noise_seed).child(777);
    std::vector<Vector> probe_dirs, probe_raw;
    for (int p = 0; p < probes; ++p) {
      const Vector b = probe_rng.rademacher_vector(n);
      probe_raw.push_back(b);
      probe_dirs.push_back(full ? b : Vector(P * b));
    }
    const double eps = 1e-4 * (1.0 + u.cwiseAbs().maxCoeff());

    // warm-start chains: one per probe plus the base path
    std::vector<WarmState> warm(probes + 1);
    const auto solve_at = [&](const Vector& uu, double lam,
                              WarmState* state) {
      SolverSettings settings;
      settings.rel_tol = rel_tol;
      settings.max_iters = max_iters;
      settings.warm = state;
      return solve_l1_pen_from_statistic(*model, L, uu, lam, settings);
    };

    std::map<double, double> mse_at_lambda;
    const auto sure_score_fn = [&](double lam) {
      const Vector theta = solve_at(u, lam, &warm[0]);
      mse_at_lambda[lam] =
          (theta - heat.true_theta).squaredNorm() / n;
      double div = 0.0;
      for (int p = 0; p < probes; ++p) {
        const Vector theta_p =
            solve_at(u + eps * probe_dirs[p], lam, &warm[p + 1]);
        div += probe_raw[p].dot(theta_p - theta) / eps;
      }
      div /= probes;
      const Vector Pth = full ? theta : Vector(P * theta);
      return Pth.squaredNorm() + 2.0 * div - 2.0 * theta.dot(theta_ml);
    };

    const GridScanResult sure_scan =
        minimize_score_on_grid(grid_points, sure_score_fn);
    const Vector theta_sure = solve_at(u, sure_scan.lambda_star, nullptr);
    mse_sure.add((theta_sure - heat.true_theta).squaredNorm() / n);

    WarmState disc_warm;
    const auto disc_solver = [&](double lam) {
      return solve_at(u, lam, &disc_warm);
    };
    const SelectionResult disc = discrepancy_select(
        prob, x, disc_solver, sigma * sigma);
    const Vector theta_disc = solve_at(u, disc.lambda_star, nullptr);
    mse_disc.add((theta_disc - heat.true_theta).squaredNorm() / n);

    double oracle = std::numeric_limits<double>::infinity();
    for (const auto& [lam, mse] : mse_at_lambda)
      oracle = std::min(oracle, mse);
    mse_oracle.add(oracle);

    if (t == 0) {
      out.sure_curve = sure_scan.curve;
      out.discrepancy_curve = disc.score_curve;
    }
  }

  const std::string problem = heat.name;
  const std::string range = seed_range_string(seed, trials);
  out.report.rows.push_back(
      {"SURE", problem, range, mse_sure.mean(), mse_sure.std_err(), 0.10});
  out.report.rows.push_back({"discrepancy", problem, range, mse_disc.mean(),
                             mse_disc.std_err(), 1.16});
  out.report.rows.push_back({"oracle-grid", problem, range, mse_oracle.mean(),
                             mse_oracle.std_err(), std::nullopt});
  return out;
}

// ---------------------------------------------------------------------------
// wavelet denoising

DenoiseOutcome run_denoise(const Config& config) {
  const std::uint64_t seed = config.get_seed("experiment.seed", kDefaultSeed);
  const long long trials = config.get_int("experiment.trials", 25);
  const int n = static_cast<int>(config.get_int("problem.n", 2048));
  const double sigma2 = config.get_double("problem.sigma2", 4.0);
  const int levels = static_cast<int>(config.get_int("problem.levels", 5));
  const std::string filter = config.get_string("problem.filter", "daub8");
  const auto signals = config.get_string_list(
      "problem.signals", {"Blocks", "Bumps", "HeaviSine", "Doppler"});
  if (trials < 1) throw Error("config-error", "trials must be >= 1");
  const double sigma = std::sqrt(sigma2);

  WaveletBasis basis;
  basis.levels = levels;
  if (filter == "daub8")
    basis.family = WaveletFamily::Daub8;
  else if (filter == "daub16")
    basis.family = WaveletFamily::Daub16;
  else
    throw Error("config-error", "unknown filter: " + filter);

  // published values for the classical four-signal experiment
  static const std::map<std::string, std::array<double, 4>> kRefs = {
      {"Original", {4.054, 4.072, 4.153, 3.945}},
      {"SureShrink", {0.744, 0.875, 0.205, 0.290}},
      {"RSure", {0.694, 0.816, 0.169, 0.273}},
      {"OracleShrink", {0.690, 0.828, 0.118, 0.283}},
      {"ScalarShrink", {1.043, 1.362, 0.161, 0.594}},
      {"SteinShrink", {1.681, 1.730, 1.508, 1.413}},
      {"SureShrink-hard", {1.902, 1.961, 0.988, 0.630}},
      {"RSure-hard", {1.560, 1.912, 0.766, 0.700}},
  };
  static const std::map<std::string, int> kRefCol = {
      {"blocks", 0}, {"bumps", 1}, {"heavisine", 2}, {"doppler", 3}};

  DenoiseOutcome out;
  out.soft_table = make_report("denoise-soft", config);
  out.sure_table = make_report("denoise-sure-schemes", config);
  out.hard_table = make_report("denoise-hard", config);

  const std::string range = seed_range_string(seed, trials);
  std::uint64_t signal_index = 0;
  for (const auto& signal_name : signals) {
    const Vector clean = dj_signal(signal_name, n);
    std::map<std::string, MeanAccumulator> acc;
    MeanAccumulator rsure_sure_diff;
    for (long long t = 0; t < trials; ++t) {
      const std::uint64_t noise_seed =
          Rng(seed).child(signal_index).child(t).next_u64();
      const Vector noisy = add_noise(clean, sigma, noise_seed);
      const auto mse = [&](const Vector& est) {
        return (est - clean).squaredNorm() / n;
      };
      acc["Original"].add(mse(noisy));

      DenoisePolicy per_level;
      DenoisePolicy pooled;
      pooled.per_level = false;
      DenoisePolicy oracle_policy;
      oracle_policy.clean = &clean;

      ShrinkageRule soft_rule{ShrinkKind::Soft, sigma, {}, true};
      const DenoiseResult sure_res = denoise(noisy, basis, soft_rule,
                                             per_level);
      acc["SureShrink"].add(mse(sure_res.output));

      ShrinkageRule rsure_rule{ShrinkKind::Rsure, sigma, {}, true};
      const DenoiseResult rsure_res =
          denoise(noisy, basis, rsure_rule, per_level);
      acc["RSure"].add(mse(rsure_res.output));
      rsure_sure_diff.add(mse(rsure_res.output) - mse(sure_res.output));

      ShrinkageRule oracle_rule{ShrinkKind::OracleSoft, sigma, {}, true};
      acc["OracleShrink"].add(
          mse(denoise(noisy, basis, oracle_rule, oracle_policy).output));

      ShrinkageRule scalar_rule{ShrinkKind::Scalar, sigma, {}, true};
      acc["ScalarShrink"].add(
          mse(denoise(noisy, basis, scalar_rule, per_level).output));

      // the global shrinkage over the full coefficient vector is the
      // primary variant; the details-only pools are reported next to it
      ShrinkageRule stein_rule{ShrinkKind::Stein, sigma, {}, true};
      DenoisePolicy pooled_all;
      pooled_all.per_level = false;
      pooled_all.include_approx = true;
      acc["SteinShrink"].add(
          mse(denoise(noisy, basis, stein_rule, pooled_all).output));
      acc["SteinShrink-details"].add(
          mse(denoise(noisy, basis, stein_rule, pooled).output));
      acc["SteinShrink-perlevel"].add(
          mse(denoise(noisy, basis, stein_rule, per_level).output));

      // hard thresholding at the thresholds the two selectors produced
      ShrinkageRule hard_sure{ShrinkKind::Hard, sigma, sure_res.level_params,
                              true};
      acc["SureShrink-hard"].add(
          mse(denoise(noisy, basis, hard_sure, per_level).output));
      std::vector<double> rsure_thresholds;
      for (double lam : rsure_res.level_params)
        rsure_thresholds.push_back(rsure_threshold(sigma2, lam));
      ShrinkageRule hard_rsure{ShrinkKind::Hard, sigma, rsure_thresholds,
                               true};
      acc["RSure-hard"].add(
          mse(denoise(noisy, basis, hard_rsure, per_level).output));
    }

    const auto ref_of = [&](const std::string& method) -> std::optional<double> {
      std::string key = signal_name;
      std::transform(key.begin(), key.end(), key.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      const auto col = kRefCol.find(key);
      const auto row = kRefs.find(method);
      if (col == kRefCol.end() || row == kRefs.end()) return std::nullopt;
      return row->second[col->second];
    };
    const auto push = [&](ExperimentReport& rep, const std::string& method,
                          const std::string& ref_key) {
      rep.rows.push_back({method, signal_name, range, acc[method].mean(),
                          acc[method].std_err(), ref_of(ref_key)});
    };
    push(out.soft_table, "Original", "Original");
    push(out.soft_table, "SureShrink", "SureShrink");
    push(out.soft_table, "RSure", "RSure");
    push(out.soft_table, "OracleShrink", "OracleShrink");
    push(out.sure_table, "ScalarShrink", "ScalarShrink");
    push(out.sure_table, "SteinShrink", "SteinShrink");
    push(out.sure_table, "SteinShrink-details", "");
    push(out.sure_table, "SteinShrink-perlevel", "");
    push(out.hard_table, "SureShrink-hard", "SureShrink-hard");
    push(out.hard_table, "RSure-hard", "RSure-hard");
    out.rsure_minus_sure.push_back(
        {signal_name, rsure_sure_diff.mean(), rsure_sure_diff.std_err()});
    ++signal_index;
  }
  return out;
}

}  // namespace gsure
