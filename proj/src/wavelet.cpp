#include "gsure/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gsure {

namespace {

// Orthonormal Daubechies scaling filters, sum = sqrt(2).
const std::vector<double> kDaub8 = {
    0.23037781330885523,  0.7148465705525415,   0.6308807679295904,
    -0.02798376941698385, -0.18703481171888114, 0.030841381835986965,
    0.032883011666982945, -0.010597401784997278};

const std::vector<double> kDaub16 = {
    0.05441584224308161,   0.3128715909144659,  0.6756307362980128,
    0.5853546836548691,    -0.015829105256023893, -0.2840155429624281,
    0.00047248457399797254, 0.128747426620186,   -0.01736930100202211,
    -0.04408825393106472,  0.013981027917015516, 0.008746094047015655,
    -0.00487035299301066,  -0.0003917403729959771, 0.0006754494059985568,
    -0.00011747678400228192};

bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

void analysis_step(const Vector& c, const std::vector<double>& h,
                   const std::vector<double>& g, Vector& a, Vector& d) {
  const Eigen::Index n = c.size();
  const Eigen::Index half = n / 2;
  const Eigen::Index L = static_cast<Eigen::Index>(h.size());
  a.resize(half);
  d.resize(half);
  for (Eigen::Index k = 0; k < half; ++k) {
    double sa = 0.0, sd = 0.0;
    for (Eigen::Index l = 0; l < L; ++l) {
      const double v = c[(2 * k + l) % n];
      sa += h[l] * v;
      sd += g[l] * v;
    }
    a[k] = sa;
    d[k] = sd;
  }
}

Vector synthesis_step(const Vector& a, const Vector& d,
                      const std::vector<double>& h,
                      const std::vector<double>& g) {
  const Eigen::Index half = a.size();
  const Eigen::Index n = 2 * half;
  const Eigen::Index L = static_cast<Eigen::Index>(h.size());
  Vector c = Vector::Zero(n);
  for (Eigen::Index k = 0; k < half; ++k) {
    for (Eigen::Index l = 0; l < L; ++l) {
      c[(2 * k + l) % n] += h[l] * a[k] + g[l] * d[k];
    }
  }
  return c;
}

double positive_part(double v) { return v > 0.0 ? v : 0.0; }

// Stein shrinkage [1 - k sigma^2/||d||^2]_+ d applied to one vector.
Vector stein_shrink(const Vector& d, double sigma2) {
  const double s = d.squaredNorm();
  if (s == 0.0) return d;
  const double alpha =
      positive_part(1.0 - static_cast<double>(d.size()) * sigma2 / s);
  return alpha * d;
}

double golden_min(const std::function<double(double)>& f, double a, double b,
                  double tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

const std::vector<double>& WaveletBasis::lowpass() const {
  return family == WaveletFamily::Daub8 ? kDaub8 : kDaub16;
}

std::vector<double> WaveletBasis::highpass() const {
  const auto& h = lowpass();
  const std::size_t L = h.size();
  std::vector<double> g(L);
  for (std::size_t l = 0; l < L; ++l)
    g[l] = (l % 2 == 0 ? 1.0 : -1.0) * h[L - 1 - l];
  return g;
}

double WaveletCoeffs::squared_norm() const {
  double s = approx.squaredNorm();
  for (const auto& d : details) s += d.squaredNorm();
  return s;
}

WaveletCoeffs dwt(const Vector& x, const WaveletBasis& basis) {
  if (!is_power_of_two(x.size()))
    throw Error("length-error", "signal length must be a power of two");
  if (basis.levels < 1 || (x.size() >> basis.levels) < 1)
    throw Error("length-error",
                "signal too short for the requested level count");
  const auto& h = basis.lowpass();
  const auto g = basis.highpass();
  WaveletCoeffs out;
  out.n_total = static_cast<int>(x.size());
  Vector a = x, next, d;
  for (int j = 0; j < basis.levels; ++j) {
    analysis_step(a, h, g, next, d);
    out.details.push_back(d);
    a = next;
  }
  out.approx = a;
  return out;
}

Vector idwt(const WaveletCoeffs& coeffs, const WaveletBasis& basis) {
  const auto& h = basis.lowpass();
  const auto g = basis.highpass();
  Vector c = coeffs.approx;
  for (auto it = coeffs.details.rbegin(); it != coeffs.details.rend(); ++it)
    c = synthesis_step(c, *it, h, g);
  return c;
}

Vector soft_threshold(const Vector& c, double t) {
  if (t < 0.0) throw Error("invalid-argument", "threshold must be >= 0");
  Vector out(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double a = std::abs(c[i]) - t;
    out[i] = a > 0.0 ? (c[i] > 0.0 ? a : -a) : 0.0;
  }
  return out;
}

Vector hard_threshold(const Vector& c, double t) {
  if (t < 0.0) throw Error("invalid-argument", "threshold must be >= 0");
  Vector out(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i)
    out[i] = std::abs(c[i]) > t ? c[i] : 0.0;
  return out;
}

double sure_soft_select(const Vector& c, double sigma, bool universal_cap) {
  if (sigma <= 0.0) throw Error("invalid-argument", "sigma must be > 0");
  const Eigen::Index n = c.size();
  if (n == 0) return 0.0;
  std::vector<double> a(n);
  for (Eigen::Index i = 0; i < n; ++i) a[i] = std::abs(c[i]);
  std::sort(a.begin(), a.end());
  // suffix sums of a^2
  std::vector<double> suf2(n + 1, 0.0);
  for (Eigen::Index i = n - 1; i >= 0; --i)
    suf2[i] = suf2[i + 1] + a[i] * a[i];
  const double s2 = sigma * sigma;
  // score(t) = -sum_{a>t} a^2 + t^2 #{a>t} + 2 sigma^2 #{a>=t}
  // (kink derivative taken from above, so ties at t count in the last term)
  const auto score_at = [&](double t) {
    const auto gt = std::upper_bound(a.begin(), a.end(), t) - a.begin();
    const auto ge = std::lower_bound(a.begin(), a.end(), t) - a.begin();
    const double cnt_gt = static_cast<double>(n - gt);
    const double cnt_ge = static_cast<double>(n - ge);
    return -suf2[gt] + t * t * cnt_gt + 2.0 * s2 * cnt_ge;
  };
  double best_t = 0.0;
  double best = score_at(0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i > 0 && a[i] == a[i - 1]) continue;
    const double s = score_at(a[i]);
    if (s < best) {
      best = s;
      best_t = a[i];
    }
  }
  if (universal_cap) {
    const double cap = sigma * std::sqrt(2.0 * std::log(static_cast<double>(n)));
    best_t = std::min(best_t, cap);
  }
  return best_t;
}

RsureGains rsure_coeffs(const Vector& c, double sigma2, double lambda) {
  if (sigma2 <= 0.0) throw Error("invalid-argument", "sigma2 must be > 0");
  if (lambda < 0.0) throw Error("invalid-argument", "lambda must be >= 0");
  const double t = rsure_threshold(sigma2, lambda);
  RsureGains out;
  out.alpha = Vector::Zero(c.size());
  out.estimate = Vector::Zero(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double ac = std::abs(c[i]);
    // zero set decided through the threshold so the two agree exactly
    if (ac <= t) continue;
    out.alpha[i] = 1.0 - (sigma2 + lambda * ac) / (c[i] * c[i]);
    out.estimate[i] = out.alpha[i] * c[i];
  }
  return out;
}

double rsure_threshold(double sigma2, double lambda) {
  if (sigma2 <= 0.0) throw Error("invalid-argument", "sigma2 must be > 0");
  if (lambda < 0.0) throw Error("invalid-argument", "lambda must be >= 0");
  return 0.5 * (lambda + std::sqrt(lambda * lambda + 4.0 * sigma2));
}

double rsure_sure_of_lambda(const Vector& c, double sigma2, double lambda) {
  const double t = rsure_threshold(sigma2, lambda);
  double fid = 0.0, div = 0.0, cross = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double ac = std::abs(c[i]);
    if (ac <= t) continue;
    const double h = c[i] - sigma2 / c[i] - (c[i] > 0.0 ? lambda : -lambda);
    fid += h * h;
    div += 1.0 + sigma2 / (c[i] * c[i]);
    cross += h * c[i];
  }
  return fid + 2.0 * sigma2 * div - 2.0 * cross;
}

RsureSelection rsure_select_lambda(const Vector& c, double sigma2) {
  RsureSelection sel;
  const double lmax = c.size() ? c.cwiseAbs().maxCoeff() : 0.0;
  if (lmax == 0.0) {
    sel.estimate = Vector::Zero(c.size());
    return sel;
  }
  const int grid_points = 65;
  double best = std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i < grid_points; ++i) {
    const double lam = lmax * static_cast<double>(i) / (grid_points - 1);
    const double s = rsure_sure_of_lambda(c, sigma2, lam);
    if (s < best) {
      best = s;
      best_i = i;
    }
  }
  const double h = lmax / (grid_points - 1);
  const double lo = std::max(0.0, (best_i - 1) * h);
  const double hi = std::min(lmax, (best_i + 1) * h);
  sel.lambda_star = golden_min(
      [&](double lam) { return rsure_sure_of_lambda(c, sigma2, lam); }, lo, hi,
      1e-6 * lmax);
  // the score is flat above the last |c|; prefer the grid point on ties
  if (rsure_sure_of_lambda(c, sigma2, sel.lambda_star) >= best)
    sel.lambda_star = best_i * h;
  sel.estimate = rsure_coeffs(c, sigma2, sel.lambda_star).estimate;
  return sel;
}

double oracle_soft_select(const Vector& c, const Vector& true_theta) {
  if (c.size() != true_theta.size())
    throw Error("invalid-argument", "coefficient vectors must match");
  const Eigen::Index n = c.size();
  if (n == 0) return 0.0;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    return std::abs(c[i]) < std::abs(c[j]);
  });
  std::vector<double> a(n), st(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    a[k] = std::abs(c[order[k]]);
    const double s = c[order[k]] > 0.0 ? 1.0 : (c[order[k]] < 0.0 ? -1.0 : 0.0);
    st[k] = s * true_theta[order[k]];
  }
  // suffix sums over a > t of: a^2, a, s*theta, a*s*theta
  std::vector<double> S2(n + 1, 0.0), S1(n + 1, 0.0), ST(n + 1, 0.0),
      SAT(n + 1, 0.0);
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    S2[k] = S2[k + 1] + a[k] * a[k];
    S1[k] = S1[k + 1] + a[k];
    ST[k] = ST[k + 1] + st[k];
    SAT[k] = SAT[k + 1] + a[k] * st[k];
  }
  const auto err_at = [&](double t) {
    const auto gt = std::upper_bound(a.begin(), a.end(), t) - a.begin();
    const double cnt = static_cast<double>(n - gt);
    // sum_{a>t} (a-t)^2 - 2(a-t) s theta   (+ sum theta^2, constant)
    return S2[gt] - 2.0 * t * S1[gt] + t * t * cnt - 2.0 * SAT[gt] +
           2.0 * t * ST[gt];
  };
  double best_t = 0.0, best = err_at(0.0);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (k > 0 && a[k] == a[k - 1]) continue;
    const double e = err_at(a[k]);
    if (e < best) {
      best = e;
      best_t = a[k];
    }
  }
  return best_t;
}

double mad_sigma_estimate(const Vector& detail) {
  if (detail.size() == 0) throw Error("invalid-argument", "empty band");
  std::vector<double> a(detail.size());
  for (Eigen::Index i = 0; i < detail.size(); ++i) a[i] = std::abs(detail[i]);
  std::nth_element(a.begin(), a.begin() + a.size() / 2, a.end());
  double med = a[a.size() / 2];
  if (a.size() % 2 == 0) {
    const double lo = *std::max_element(a.begin(), a.begin() + a.size() / 2);
    med = 0.5 * (med + lo);
  }
  return med / 0.6744897501960817;
}

namespace {

// Shrink one pooled vector according to the rule; returns the parameter used.
double shrink_vector(Vector& band, const ShrinkageRule& rule,
                     const Vector* clean_band, double fixed_param,
                     bool has_fixed) {
  const double s2 = rule.sigma * rule.sigma;
  switch (rule.kind) {
    case ShrinkKind::Soft: {
      const double t = has_fixed
                           ? fixed_param
                           : sure_soft_select(band, rule.sigma,
                                              rule.universal_cap);
      band = soft_threshold(band, t);
      return t;
    }
    case ShrinkKind::Hard: {
      const double t = has_fixed
                           ? fixed_param
                           : sure_soft_select(band, rule.sigma,
                                              rule.universal_cap);
      band = hard_threshold(band, t);
      return t;
    }
    case ShrinkKind::Rsure: {
      double lam;
      if (has_fixed) {
        lam = fixed_param;
        band = rsure_coeffs(band, s2, lam).estimate;
      } else {
        RsureSelection sel = rsure_select_lambda(band, s2);
        lam = sel.lambda_star;
        band = sel.estimate;
      }
      return lam;
    }
    case ShrinkKind::Scalar: {
      for (Eigen::Index i = 0; i < band.size(); ++i) {
        if (band[i] == 0.0) continue;
        band[i] *= positive_part(1.0 - s2 / (band[i] * band[i]));
      }
      return 0.0;
    }
    case ShrinkKind::Stein: {
      const double s = band.squaredNorm();
      const double alpha =
          s == 0.0 ? 1.0
                   : positive_part(1.0 -
                                   static_cast<double>(band.size()) * s2 / s);
      band = stein_shrink(band, s2);
      return alpha;
    }
    case ShrinkKind::OracleSoft: {
      if (!clean_band)
        throw Error("invalid-argument",
                    "oracle rule needs the clean signal in the policy");
      const double t = has_fixed ? fixed_param
                                 : oracle_soft_select(band, *clean_band);
      band = soft_threshold(band, t);
      return t;
    }
  }
  throw Error("invalid-argument", "unknown shrinkage kind");
}

}  // namespace

DenoiseResult denoise(const Vector& signal, const WaveletBasis& basis,
                      const ShrinkageRule& rule, const DenoisePolicy& policy) {
  if (rule.sigma <= 0.0) throw Error("invalid-argument", "sigma must be > 0");
  for (double p : rule.level_params)
    if (p < 0.0)
      throw Error("invalid-argument", "rule parameters must be nonnegative");
  WaveletCoeffs coeffs = dwt(signal, basis);
  WaveletCoeffs clean_coeffs;
  const bool need_clean = rule.kind == ShrinkKind::OracleSoft;
  if (need_clean) {
    if (!policy.clean)
      throw Error("invalid-argument", "oracle rule needs policy.clean");
    clean_coeffs = dwt(*policy.clean, basis);
  }
  if (!rule.level_params.empty() &&
      rule.level_params.size() != coeffs.details.size())
    throw Error("invalid-argument",
                "level_params must match the number of detail levels");

  DenoiseResult res;
  if (policy.per_level) {
    for (std::size_t j = 0; j < coeffs.details.size(); ++j) {
      const bool has_fixed = !rule.level_params.empty();
      const double fixed = has_fixed ? rule.level_params[j] : 0.0;
      const Vector* clean_band =
          need_clean ? &clean_coeffs.details[j] : nullptr;
      res.level_params.push_back(shrink_vector(coeffs.details[j], rule,
                                               clean_band, fixed, has_fixed));
    }
  } else {
    // pool the detail coefficients (and optionally the approximation band)
    // into one vector, shrink once, scatter back
    Eigen::Index total = policy.include_approx ? coeffs.approx.size() : 0;
    for (const auto& d : coeffs.details) total += d.size();
    Vector pooled(total), clean_pooled(need_clean ? total : 0);
    Eigen::Index off = 0;
    for (std::size_t j = 0; j < coeffs.details.size(); ++j) {
      pooled.segment(off, coeffs.details[j].size()) = coeffs.details[j];
      if (need_clean)
        clean_pooled.segment(off, coeffs.details[j].size()) =
            clean_coeffs.details[j];
      off += coeffs.details[j].size();
    }
    if (policy.include_approx) {
      pooled.segment(off, coeffs.approx.size()) = coeffs.approx;
      if (need_clean)
        clean_pooled.segment(off, coeffs.approx.size()) = clean_coeffs.approx;
    }
    const bool has_fixed = !rule.level_params.empty();
    const double fixed = has_fixed ? rule.level_params[0] : 0.0;
    const double param = shrink_vector(
        pooled, rule, need_clean ? &clean_pooled : nullptr, fixed, has_fixed);
    off = 0;
    for (auto& d : coeffs.details) {
      d = pooled.segment(off, d.size());
      off += d.size();
      res.level_params.push_back(param);
    }
    if (policy.include_approx)
      coeffs.approx = pooled.segment(off, coeffs.approx.size());
  }
  res.output = idwt(coeffs, basis);
  return res;
}

}  // namespace gsure
