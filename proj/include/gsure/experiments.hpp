#pragma once

#include <string>
#include <vector>

#include "gsure/config.hpp"
#include "gsure/expfam.hpp"
#include "gsure/problems.hpp"
#include "gsure/report.hpp"

namespace gsure {

/// Built-in config for a command; the CLI starts from this and applies the
/// user's file plus flag overrides.
std::string default_config_text(const std::string& experiment);

/// Merges defaults <- file <- overrides and rejects unknown keys.
Config resolve_config(const std::string& experiment,
                      const std::string& config_path,
                      const std::vector<std::pair<std::string, std::string>>&
                          overrides = {});

/// One (model, estimator) pair of the bundled verification suite.
struct BundledPair {
  std::string model_name;
  std::string estimator_name;
  SimulatedModel sim;
  Vector theta;
  EstimatorMap est;
};
std::vector<BundledPair> bundled_verification_pairs();

struct VerifySureOutcome {
  ExperimentReport report;
  bool all_pass = false;
  bool underpowered = false;
  std::vector<std::string> failures;  // "model x estimator: z=..."
};
VerifySureOutcome run_verify_sure(const Config& config);

struct DeblurOutcome {
  ExperimentReport report;
  /// Restored images from the first seed, keyed by file stem
  /// ("deblur_blobs_s0.05_sure" ...).
  std::vector<std::pair<std::string, GrayImage>> images;
  bool any_boundary = false;
};
DeblurOutcome run_deblur(const Config& config);

struct DeconvOutcome {
  ExperimentReport report;
  /// Score curves from the first seed, ready for score_curve_csv.
  std::vector<std::pair<double, double>> sure_curve;
  std::vector<std::pair<double, double>> discrepancy_curve;
};
DeconvOutcome run_deconv(const Config& config);

struct PairedDiff {
  std::string problem;
  double mean = 0.0;    // mean per-seed difference
  double std_err = 0.0; // paired standard error of the difference
};

struct DenoiseOutcome {
  ExperimentReport soft_table;   // Original / SureShrink / RSure / Oracle
  ExperimentReport sure_table;   // ScalarShrink / SteinShrink variants
  ExperimentReport hard_table;   // hard thresholding at selected thresholds
  /// Per-signal paired statistics of (RSure - SureShrink) MSE.
  std::vector<PairedDiff> rsure_minus_sure;
};
DenoiseOutcome run_denoise(const Config& config);

}  // namespace gsure
