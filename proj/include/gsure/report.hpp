#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gsure/config.hpp"

namespace gsure {

/// Fixed 12-significant-digit formatting shared by every CSV writer, so
/// identical runs produce identical bytes.
std::string format_double(double v);

struct ReportRow {
  std::string method;
  std::string problem;
  std::string seed_range;  // e.g. "1000..1024"
  double mean_mse = 0.0;
  double std_err = 0.0;
  std::optional<double> reference;  // published value when one exists
};

/// Named result table with a provenance block (config echo, config hash,
/// code version) so every row is reproducible from (config, seed).
struct ExperimentReport {
  std::string experiment;
  std::vector<ReportRow> rows;
  std::string config_echo;
  std::uint64_t config_hash = 0;
  std::string version;

  std::string to_csv() const;
  static ExperimentReport from_csv_text(const std::string& text);
  static ExperimentReport from_csv_file(const std::string& path);
};

ExperimentReport make_report(const std::string& experiment,
                             const Config& config);

/// Union of the input reports; conflicting duplicate (method, problem) rows
/// with differing values raise "table-conflict".
ExperimentReport merge_reports(const std::vector<ExperimentReport>& reports);

/// Aligned text table, one problem per column, one method per row, with a
/// reference column when any row carries one.
std::string render_table(const ExperimentReport& report);

/// Score-curve CSV: header "lambda,score,selector".
std::string score_curve_csv(
    const std::vector<std::pair<double, double>>& curve,
    const std::string& selector);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace gsure
