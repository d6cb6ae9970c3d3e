#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gsure/expfam.hpp"
#include "gsure/problems.hpp"
#include "gsure/rng.hpp"
#include "gsure/wavelet.hpp"

using namespace gsure;

namespace {

double sure_soft_score_brute(const Vector& c, double t, double s2) {
  const Vector h = soft_threshold(c, t);
  double cnt = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i)
    if (std::abs(c[i]) >= t) cnt += 1.0;
  return h.squaredNorm() + 2.0 * s2 * cnt - 2.0 * h.dot(c);
}

}  // namespace

TEST_CASE("perfect reconstruction and Parseval for both filters") {
  for (WaveletFamily fam : {WaveletFamily::Daub8, WaveletFamily::Daub16}) {
    WaveletBasis basis;
    basis.family = fam;
    basis.levels = 5;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(seed);
      const Vector x = rng.normal_vector(256);
      const WaveletCoeffs c = dwt(x, basis);
      const Vector back = idwt(c, basis);
      CHECK((back - x).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(std::abs(c.squared_norm() - x.squaredNorm()) <
            1e-8 * x.squaredNorm());
    }
  }
}

TEST_CASE("constant signals have vanishing detail coefficients") {
  WaveletBasis basis;
  basis.levels = 4;
  const Vector x = Vector::Constant(128, 3.25);
  const WaveletCoeffs c = dwt(x, basis);
  for (const auto& d : c.details)
    CHECK(d.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("length validation") {
  WaveletBasis basis;
  basis.levels = 5;
  CHECK_THROWS_WITH_AS(dwt(Vector::Zero(100), basis),
                       doctest::Contains("length-error"), Error);
  CHECK_THROWS_WITH_AS(dwt(Vector::Zero(16), basis),
                       doctest::Contains("length-error"), Error);
}

TEST_CASE("soft and hard thresholds") {
  Vector c(2);
  c << 3.0, -0.5;
  const Vector s = soft_threshold(c, 1.0);
  CHECK(s[0] == 2.0);
  CHECK(s[1] == 0.0);
  const Vector h = hard_threshold(c, 1.0);
  CHECK(h[0] == 3.0);
  CHECK(h[1] == 0.0);
  CHECK((soft_threshold(c, 0.0) - c).norm() == 0.0);
  CHECK((hard_threshold(c, 0.0) - c).norm() == 0.0);

  // brute scalar definition on random values
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double v = 3.0 * rng.normal();
    const double t = rng.uniform();
    Vector one(1);
    one << v;
    const double expect =
        (std::abs(v) > t) ? (v > 0 ? std::abs(v) - t : -(std::abs(v) - t))
                          : 0.0;
    CHECK(soft_threshold(one, t)[0] == doctest::Approx(expect).epsilon(1e-15));
  }

  // output norm is nonincreasing in t
  const Vector big = rng.normal_vector(64);
  double prev = soft_threshold(big, 0.0).norm();
  for (double t = 0.1; t < 3.0; t += 0.1) {
    const double cur = soft_threshold(big, t).norm();
    CHECK(cur <= prev + 1e-15);
    prev = cur;
  }
}

TEST_CASE("sure threshold selection") {
  // all coefficients far above the noise level: t* = 0
  Vector big(6);
  big << 30.0, -42.0, 25.0, 31.0, -28.0, 36.0;
  CHECK(sure_soft_select(big, 1.0, false) == 0.0);

  // n = 2: exhaustive candidates match a dense 1-D scan
  Vector two(2);
  two << 0.8, -1.7;
  const double t_sel = sure_soft_select(two, 1.0, false);
  double best_t = 0.0, best = 1e300;
  for (int k = 0; k <= 20000; ++k) {
    const double t = 2.0 * k / 20000.0;
    const double s = sure_soft_score_brute(two, t, 1.0);
    if (s < best - 1e-12) {
      best = s;
      best_t = t;
    }
  }
  CHECK(sure_soft_score_brute(two, t_sel, 1.0) <=
        sure_soft_score_brute(two, best_t, 1.0) + 1e-4);

  // pure noise: median selected threshold within 20% of the universal one
  const int n = 1024;
  const double sigma = 1.0;
  std::vector<double> ts;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const Vector noise = sigma * rng.normal_vector(n);
    ts.push_back(sure_soft_select(noise, sigma, true));
  }
  std::sort(ts.begin(), ts.end());
  const double median = ts[50];
  const double universal = sigma * std::sqrt(2.0 * std::log(double(n)));
  CHECK(std::abs(median - universal) <= 0.2 * universal);
}

TEST_CASE("rsure gains and threshold") {
  // lambda = 0 reduces to the componentwise quadratic-gain rule
  Rng rng(2);
  const Vector c = 2.0 * rng.normal_vector(32);
  const double s2 = 1.5;
  const RsureGains g0 = rsure_coeffs(c, s2, 0.0);
  for (int i = 0; i < 32; ++i) {
    const double expect =
        c[i] == 0.0 ? 0.0 : std::max(1.0 - s2 / (c[i] * c[i]), 0.0) * c[i];
    CHECK(g0.estimate[i] == doctest::Approx(expect).epsilon(1e-12));
    CHECK(g0.alpha[i] >= 0.0);
    CHECK(g0.alpha[i] < 1.0);
  }

  // scalar example: sigma2 = 1, lambda = 1, c = 2
  Vector one(1);
  one << 2.0;
  const RsureGains g = rsure_coeffs(one, 1.0, 1.0);
  CHECK(g.alpha[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(g.estimate[0] == doctest::Approx(0.5).epsilon(1e-12));

  // the scalar closed form beats a dense scan of the scalar objective
  {
    Rng r2(3);
    for (int trial = 0; trial < 200; ++trial) {
      const double x = 4.0 * r2.normal();
      const double sig2 = 0.2 + 2.0 * r2.uniform();
      const double lam = 2.0 * r2.uniform();
      const double a_closed =
          x == 0.0 ? 0.0
                   : std::max(0.0, 1.0 - (sig2 + lam * std::abs(x)) / (x * x));
      const auto obj = [&](double a) {
        return a * a * x * x + 2.0 * a * (sig2 - x * x) +
               lam * std::abs(a) * std::abs(x);
      };
      double best = 1e300, best_a = 0.0;
      for (int k = 0; k <= 20000; ++k) {
        const double a = 2.0 * k / 20000.0;
        if (obj(a) < best) {
          best = obj(a);
          best_a = a;
        }
      }
      CHECK(std::abs(a_closed - best_a) <= 1e-4 + 1e-12);
    }
  }

  CHECK(rsure_threshold(1.0, 0.0) == doctest::Approx(1.0));
  CHECK(rsure_threshold(4.0, 1.0) ==
        doctest::Approx(0.5 * (1.0 + std::sqrt(17.0))).epsilon(1e-12));
  // lambda -> infinity: t ~ lambda
  CHECK(rsure_threshold(1.0, 1e6) / 1e6 == doctest::Approx(1.0).epsilon(1e-5));

  // zero-set consistency is exact
  Rng r3(4);
  for (int trial = 0; trial < 2000; ++trial) {
    const double s2t = 0.1 + 3.0 * r3.uniform();
    const double lam = 3.0 * r3.uniform();
    const double t = rsure_threshold(s2t, lam);
    Vector v(1);
    v << (r3.uniform() < 0.5 ? t * (0.5 + r3.uniform()) : -t * (0.5 + r3.uniform()));
    const RsureGains gg = rsure_coeffs(v, s2t, lam);
    CHECK((gg.alpha[0] == 0.0) == (std::abs(v[0]) <= t));
  }
}

TEST_CASE("rsure score of lambda") {
  // everything below the threshold: zero estimate, zero score
  Vector small(4);
  small << 0.1, -0.2, 0.05, 0.15;
  CHECK(rsure_sure_of_lambda(small, 1.0, 1.0) == 0.0);

  // analytic divergence agrees with finite differences away from kinks
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const double s2 = 0.5 + rng.uniform();
    const double lam = rng.uniform();
    const double t = rsure_threshold(s2, lam);
    Vector c = 3.0 * rng.normal_vector(8);
    for (int i = 0; i < 8; ++i)  // keep everything off the kink
      if (std::abs(std::abs(c[i]) - t) < 0.05)
        c[i] += (c[i] >= 0 ? 0.2 : -0.2);
    const auto apply = [s2, lam](const Vector& v) {
      return rsure_coeffs(v, s2, lam).estimate;
    };
    double analytic = 0.0;
    for (int i = 0; i < 8; ++i)
      if (std::abs(c[i]) > t) analytic += 1.0 + s2 / (c[i] * c[i]);
    const double fd = fd_divergence(apply, c, 1e-6);
    CHECK(fd == doctest::Approx(analytic).epsilon(1e-6));
  }

  // score curve has no jumps much larger than the local secant slope
  Rng r2(6);
  const Vector c = 2.5 * r2.normal_vector(128);
  const double s2 = 1.0;
  const double lmax = c.cwiseAbs().maxCoeff();
  const int k = 400;
  std::vector<double> scores(k + 1);
  for (int i = 0; i <= k; ++i)
    scores[i] = rsure_sure_of_lambda(c, s2, lmax * i / k);
  double typical = 0.0;
  for (int i = 1; i <= k; ++i) typical += std::abs(scores[i] - scores[i - 1]);
  typical /= k;
  for (int i = 1; i <= k; ++i)
    CHECK(std::abs(scores[i] - scores[i - 1]) <= 10.0 * typical + 1e-9);
}

TEST_CASE("rsure lambda selection") {
  // strong clean signal: lambda* stays near zero
  Vector strong(8);
  strong << 50, -60, 45, 70, -55, 65, -48, 52;
  const RsureSelection sel = rsure_select_lambda(strong, 1.0);
  CHECK(sel.lambda_star < 1.0);

  // pure noise: the selected estimate is essentially zero
  Rng rng(7);
  const Vector noise = rng.normal_vector(512);
  const RsureSelection sel2 = rsure_select_lambda(noise, 1.0);
  CHECK(sel2.estimate.squaredNorm() <= 0.05 * noise.squaredNorm());

  // matches a dense grid scan within one refinement step
  const Vector mixed = [&] {
    Rng r(8);
    Vector v = r.normal_vector(256);
    for (int i = 0; i < 16; ++i) v[i * 16] += 8.0 * (i % 2 ? 1 : -1);
    return v;
  }();
  const RsureSelection sel3 = rsure_select_lambda(mixed, 1.0);
  const double lmax = mixed.cwiseAbs().maxCoeff();
  double best = 1e300, best_lam = 0.0;
  const int dense = 20000;
  for (int i = 0; i <= dense; ++i) {
    const double lam = lmax * i / dense;
    const double s = rsure_sure_of_lambda(mixed, 1.0, lam);
    if (s < best) {
      best = s;
      best_lam = lam;
    }
  }
  CHECK(rsure_sure_of_lambda(mixed, 1.0, sel3.lambda_star) <=
        best + 1e-6 * (1.0 + std::abs(best)) +
            0.05 * std::abs(best - rsure_sure_of_lambda(mixed, 1.0,
                                                        best_lam + lmax / 64)));
}

TEST_CASE("oracle soft threshold") {
  Vector c(5);
  c << 1.0, -2.0, 0.5, 3.0, -0.25;
  // theta = c: zero threshold is best
  CHECK(oracle_soft_select(c, c) == 0.0);
  // theta = 0: threshold clears everything
  CHECK(oracle_soft_select(c, Vector::Zero(5)) >= c.cwiseAbs().maxCoeff());

  // dense scan agreement
  Rng rng(9);
  const Vector cc = 2.0 * rng.normal_vector(64);
  Vector theta = cc;
  for (int i = 0; i < 64; ++i)
    if (std::abs(cc[i]) < 1.5) theta[i] = 0.0;
  const double t_sel = oracle_soft_select(cc, theta);
  const auto err = [&](double t) {
    return (soft_threshold(cc, t) - theta).squaredNorm();
  };
  double best = 1e300;
  for (int k = 0; k <= 40000; ++k) {
    best = std::min(best, err(cc.cwiseAbs().maxCoeff() * k / 40000.0));
  }
  CHECK(err(t_sel) <= best + 1e-6 * (1.0 + best));
}

TEST_CASE("noise sd estimate from the finest band") {
  Rng rng(10);
  WaveletBasis basis;
  basis.levels = 5;
  const Vector x = dj_signal("HeaviSine", 2048) + 2.0 * rng.normal_vector(2048);
  const WaveletCoeffs c = dwt(x, basis);
  CHECK(mad_sigma_estimate(c.details[0]) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("denoise: fixed zero thresholds reproduce the input") {
  Rng rng(11);
  const Vector x = rng.normal_vector(256);
  WaveletBasis basis;
  basis.levels = 4;
  ShrinkageRule rule{ShrinkKind::Soft, 1.0, {0, 0, 0, 0}, true};
  const DenoiseResult res = denoise(x, basis, rule, DenoisePolicy{});
  CHECK((res.output - x).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("denoise: noiseless smooth signal keeps its energy") {
  const int n = 1024;
  Vector sig(n);
  for (int i = 0; i < n; ++i)
    sig[i] = std::sin(2.0 * M_PI * i / n) + 0.4 * std::cos(6.0 * M_PI * i / n);
  WaveletBasis basis;
  basis.levels = 5;
  ShrinkageRule rule{ShrinkKind::Soft, 1e-4, {}, true};
  const DenoiseResult res = denoise(sig, basis, rule, DenoisePolicy{});
  const double mse = (res.output - sig).squaredNorm() / n;
  CHECK(mse <= 1e-4 * sig.squaredNorm() / n);
}

TEST_CASE("sure and risk argmins coincide for most seeds") {
  // statistical tracking check over a threshold grid
  const int n = 512;
  const double sigma = 1.0;
  int hits_soft = 0, hits_rsure = 0;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(3000 + trial);
    Vector theta = Vector::Zero(n);
    for (int i = 0; i < 24; ++i)
      theta[(i * 97) % n] = 6.0 * (i % 2 ? 1.0 : -1.0);
    Vector c = theta + sigma * rng.normal_vector(n);

    const int k = 32;
    const double tmax = c.cwiseAbs().maxCoeff();
    int best_sure = 0, best_risk = 0;
    double smin = 1e300, rmin = 1e300;
    for (int i = 0; i <= k; ++i) {
      const double t = tmax * i / k;
      const double s = sure_soft_score_brute(c, t, sigma * sigma);
      const double r = (soft_threshold(c, t) - theta).squaredNorm();
      if (s < smin) { smin = s; best_sure = i; }
      if (r < rmin) { rmin = r; best_risk = i; }
    }
    if (std::abs(best_sure - best_risk) <= 1) ++hits_soft;

    int best_sure2 = 0, best_risk2 = 0;
    double smin2 = 1e300, rmin2 = 1e300;
    for (int i = 0; i <= k; ++i) {
      const double lam = tmax * i / k;
      const double s = rsure_sure_of_lambda(c, sigma * sigma, lam);
      const double r =
          (rsure_coeffs(c, sigma * sigma, lam).estimate - theta).squaredNorm();
      if (s < smin2) { smin2 = s; best_sure2 = i; }
      if (r < rmin2) { rmin2 = r; best_risk2 = i; }
    }
    if (std::abs(best_sure2 - best_risk2) <= 1) ++hits_rsure;
  }
  CHECK(hits_soft >= 80);
  CHECK(hits_rsure >= 80);
}
