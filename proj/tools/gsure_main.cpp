#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "gsure/experiments.hpp"
#include "gsure/linear_gaussian.hpp"
#include "gsure/report.hpp"

namespace fs = std::filesystem;
using namespace gsure;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  long long seed = -1;
  long long trials = -1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Config file (key = value)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", out_dir, "Output directory");
    cmd->add_option("--seed", seed, "Master seed override");
    cmd->add_option("--trials", trials, "Trial count override");
  }

  std::vector<std::pair<std::string, std::string>> overrides() const {
    std::vector<std::pair<std::string, std::string>> out;
    if (!out_dir.empty()) out.emplace_back("output.dir", out_dir);
    if (seed >= 0) out.emplace_back("experiment.seed", std::to_string(seed));
    if (trials >= 0)
      out.emplace_back("experiment.trials", std::to_string(trials));
    return out;
  }
};

std::string ensure_out_dir(const Config& cfg) {
  const std::string dir = cfg.get_string("output.dir", "out");
  fs::create_directories(dir);
  return dir;
}

int run_verify_sure_cmd(const CommonFlags& flags) {
  const Config cfg =
      resolve_config("verify-sure", flags.config_path, flags.overrides());
  const long long trials = cfg.get_int("experiment.trials", 100000);
  if (trials < 1000)
    std::cerr << "warning: underpowered run (trials = " << trials
              << " < 1000); pass/fail decisions are unreliable\n";
  const VerifySureOutcome out = run_verify_sure(cfg);
  const std::string dir = ensure_out_dir(cfg);
  write_text_file(dir + "/verify_sure.csv", out.report.to_csv());
  std::cout << render_table(out.report);
  std::cout << "(mean empirical MSE per pair; ref column = risk-score "
               "estimate of the same MSE)\n";
  if (!out.all_pass) {
    for (const auto& f : out.failures)
      std::cerr << "FAIL " << f << "\n";
    return 1;
  }
  std::cout << "all " << out.report.rows.size()
            << " model/estimator pairs pass (|z| <= 4)\n";
  return 0;
}

int run_deblur_cmd(const CommonFlags& flags) {
  const Config cfg =
      resolve_config("deblur", flags.config_path, flags.overrides());
  const DeblurOutcome out = run_deblur(cfg);
  const std::string dir = ensure_out_dir(cfg);
  write_text_file(dir + "/deblur.csv", out.report.to_csv());
  for (const auto& [stem, img] : out.images)
    pgm_write(img, dir + "/" + stem + ".pgm");
  std::cout << render_table(out.report);
  if (out.any_boundary)
    std::cerr << "warning: boundary-solution selections occurred "
                 "(lambda at a grid endpoint)\n";
  return 0;
}

int run_deconv_cmd(const CommonFlags& flags) {
  const Config cfg =
      resolve_config("deconv", flags.config_path, flags.overrides());
  const DeconvOutcome out = run_deconv(cfg);
  const std::string dir = ensure_out_dir(cfg);
  write_text_file(dir + "/deconv.csv", out.report.to_csv());
  write_text_file(dir + "/deconv_score_curve_sure.csv",
                  score_curve_csv(out.sure_curve, "SURE"));
  write_text_file(dir + "/deconv_residual_curve_discrepancy.csv",
                  score_curve_csv(out.discrepancy_curve, "discrepancy"));
  std::cout << render_table(out.report);
  return 0;
}

int run_denoise_cmd(const CommonFlags& flags) {
  const Config cfg =
      resolve_config("denoise", flags.config_path, flags.overrides());
  const DenoiseOutcome out = run_denoise(cfg);
  const std::string dir = ensure_out_dir(cfg);
  write_text_file(dir + "/denoise_soft.csv", out.soft_table.to_csv());
  write_text_file(dir + "/denoise_sure_schemes.csv", out.sure_table.to_csv());
  write_text_file(dir + "/denoise_hard.csv", out.hard_table.to_csv());
  std::cout << "soft denoising schemes\n"
            << render_table(out.soft_table) << "\n";
  std::cout << "risk-score shrinkage schemes\n"
            << render_table(out.sure_table) << "\n";
  std::cout << "hard thresholding at the selected thresholds\n"
            << render_table(out.hard_table);
  return 0;
}

int run_table_cmd(const std::vector<std::string>& paths,
                  const std::string& out_dir) {
  std::vector<ExperimentReport> reports;
  for (const auto& p : paths) reports.push_back(ExperimentReport::from_csv_file(p));
  const ExperimentReport merged = merge_reports(reports);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_text_file(out_dir + "/merged.csv", merged.to_csv());
  }
  std::cout << render_table(merged);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-score driven estimator selection experiments"};
  app.require_subcommand(1);

  CommonFlags verify_flags, deblur_flags, deconv_flags, denoise_flags;
  auto* verify = app.add_subcommand(
      "verify-sure", "Monte-Carlo validation of risk-score unbiasedness");
  verify_flags.attach(verify);
  auto* deblur = app.add_subcommand(
      "deblur", "Tikhonov image deblurring: SURE vs GCV selection");
  deblur_flags.attach(deblur);
  auto* deconv = app.add_subcommand(
      "deconv", "l1-penalized deconvolution: SURE vs discrepancy selection");
  deconv_flags.attach(deconv);
  auto* denoise = app.add_subcommand(
      "denoise", "Wavelet denoising suite (soft/hard/shrinkage rules)");
  denoise_flags.attach(denoise);

  std::vector<std::string> table_paths;
  std::string table_out;
  auto* table =
      app.add_subcommand("table", "Merge report CSVs and render a table");
  table->add_option("paths", table_paths, "Report CSV files")
      ->required()
      ->check(CLI::ExistingFile);
  table->add_option("--out", table_out, "Output directory for merged.csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) return run_verify_sure_cmd(verify_flags);
    if (deblur->parsed()) return run_deblur_cmd(deblur_flags);
    if (deconv->parsed()) return run_deconv_cmd(deconv_flags);
    if (denoise->parsed()) return run_denoise_cmd(denoise_flags);
    if (table->parsed()) return run_table_cmd(table_paths, table_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.kind() == "config-error" || e.kind() == "io-error" ||
        e.kind() == "table-schema" || e.kind() == "table-conflict")
      return 2;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
