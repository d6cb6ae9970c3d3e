#pragma once

#include <string>
#include <vector>

#include "gsure/common.hpp"

namespace gsure {

/// Orthonormal Daubechies filter banks with periodic boundary handling.
/// Daub8 is the 8-tap filter (4 vanishing moments); Daub16 (16 taps,
/// 8 vanishing moments) is kept for sensitivity runs.
enum class WaveletFamily { Daub8, Daub16 };

struct WaveletBasis {
  WaveletFamily family = WaveletFamily::Daub8;
  int levels = 5;

  const std::vector<double>& lowpass() const;
  std::vector<double> highpass() const;  // g[l] = (-1)^l h[L-1-l]
};

/// Multilevel decomposition: detail bands ordered finest to coarsest.
struct WaveletCoeffs {
  Vector approx;
  std::vector<Vector> details;
  int n_total = 0;

  double squared_norm() const;
};

/// Periodic orthonormal analysis; signal length must be a power of two
/// with at least `levels` halvings ("length-error" otherwise).
WaveletCoeffs dwt(const Vector& x, const WaveletBasis& basis);
Vector idwt(const WaveletCoeffs& coeffs, const WaveletBasis& basis);

Vector soft_threshold(const Vector& c, double t);
Vector hard_threshold(const Vector& c, double t);

/// SURE-minimizing soft threshold over the candidate set {0} U {|c_i|},
/// evaluated in closed form after sorting.  With `universal_cap` the result
/// is clamped at sigma*sqrt(2 ln n).
double sure_soft_select(const Vector& c, double sigma,
                        bool universal_cap = true);

/// Gains alpha_i = [1 - (sigma2 + lambda |c_i|)/c_i^2]_+ and the shrunk
/// coefficients alpha .* c.  c_i = 0 maps to alpha_i = 0.
struct RsureGains {
  Vector alpha;
  Vector estimate;
};
RsureGains rsure_coeffs(const Vector& c, double sigma2, double lambda);

/// Largest |c| still fully suppressed: t = (lambda + sqrt(lambda^2 +
/// 4 sigma2))/2; alpha_i = 0 exactly iff |c_i| <= t.
double rsure_threshold(double sigma2, double lambda);

/// Risk score of the shrinkage map at this lambda (iid Gaussian model,
/// analytic divergence sum_{|c_i|>t} (1 + sigma2/c_i^2)).
double rsure_sure_of_lambda(const Vector& c, double sigma2, double lambda);

struct RsureSelection {
  double lambda_star = 0.0;
  Vector estimate;
};
/// Grid + golden-section minimization of the score over [0, max|c_i|].
RsureSelection rsure_select_lambda(const Vector& c, double sigma2);

/// Soft threshold minimizing ||psi_t(c) - theta||^2 over {0} U {|c_i|}
/// (simulation benchmark; requires the true coefficients).
double oracle_soft_select(const Vector& c, const Vector& true_theta);

/// Median-absolute-deviation noise estimate from a detail band (utility;
/// experiments take sigma as a known input).
double mad_sigma_estimate(const Vector& detail);

enum class ShrinkKind { Soft, Hard, Rsure, Scalar, Stein, OracleSoft };

struct ShrinkageRule {
  ShrinkKind kind = ShrinkKind::Soft;
  double sigma = 1.0;
  /// Fixed per-level parameters (t or lambda, finest to coarsest); empty
  /// means the rule selects its own parameters from the data.
  std::vector<double> level_params;
  bool universal_cap = true;  // soft-threshold selection cap
};

struct DenoisePolicy {
  /// Parameters selected per detail level (default) or once for all detail
  /// coefficients pooled into a single vector.
  bool per_level = true;
  /// Pooled mode only: also pull the approximation band into the pooled
  /// vector (whole-coefficient shrinkage; the one exception to the
  /// approx-band-untouched rule).
  bool include_approx = false;
  /// Clean signal for oracle rules (simulation only).
  const Vector* clean = nullptr;
};

struct DenoiseResult {
  Vector output;
  /// Parameter used per detail level (threshold t, lambda, or gain alpha,
  /// depending on the rule); finest to coarsest.
  std::vector<double> level_params;
};

/// dwt -> shrink detail bands per the rule/policy (approximation band is
/// never touched) -> idwt.
DenoiseResult denoise(const Vector& signal, const WaveletBasis& basis,
                      const ShrinkageRule& rule, const DenoisePolicy& policy);

}  // namespace gsure
