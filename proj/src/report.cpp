#include "gsure/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace gsure {

std::string format_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

ExperimentReport make_report(const std::string& experiment,
                             const Config& config) {
  ExperimentReport rep;
  rep.experiment = experiment;
  rep.config_echo = config.canonical_text();
  rep.config_hash = config.hash();
  rep.version = GSURE_VERSION;
  return rep;
}

std::string ExperimentReport::to_csv() const {
  std::string out;
  out += "# experiment = " + experiment + "\n";
  out += "# version = " + version + "\n";
  char hash_buf[32];
  std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                static_cast<unsigned long long>(config_hash));
  out += "# config_hash = " + std::string(hash_buf) + "\n";
  std::istringstream echo(config_echo);
  std::string line;
  while (std::getline(echo, line)) out += "# config: " + line + "\n";
  out += "method,problem,seed_range,mean_mse,std_err,reference\n";
  for (const auto& row : rows) {
    out += row.method + "," + row.problem + "," + row.seed_range + "," +
           format_double(row.mean_mse) + "," + format_double(row.std_err) +
           "," + (row.reference ? format_double(*row.reference) : "") + "\n";
  }
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

ExperimentReport ExperimentReport::from_csv_text(const std::string& text) {
  ExperimentReport rep;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto strip = [&](const std::string& prefix) -> std::optional<std::string> {
        if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
        return std::nullopt;
      };
      if (auto v = strip("# experiment = ")) rep.experiment = *v;
      else if (auto v2 = strip("# version = ")) rep.version = *v2;
      else if (auto v3 = strip("# config_hash = "))
        rep.config_hash = std::stoull(*v3, nullptr, 16);
      else if (auto v4 = strip("# config: "))
        rep.config_echo += *v4 + "\n";
      continue;
    }
    if (!header_seen) {
      if (line != "method,problem,seed_range,mean_mse,std_err,reference")
        throw Error("table-schema", "unexpected report header: " + line);
      header_seen = true;
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != 6)
      throw Error("table-schema", "bad report row: " + line);
    ReportRow row;
    row.method = fields[0];
    row.problem = fields[1];
    row.seed_range = fields[2];
    row.mean_mse = std::stod(fields[3]);
    row.std_err = std::stod(fields[4]);
    if (!fields[5].empty()) row.reference = std::stod(fields[5]);
    rep.rows.push_back(row);
  }
  if (!header_seen) throw Error("table-schema", "report has no header row");
  return rep;
}

ExperimentReport ExperimentReport::from_csv_file(const std::string& path) {
  return from_csv_text(read_text_file(path));
}

ExperimentReport merge_reports(const std::vector<ExperimentReport>& reports) {
  if (reports.empty()) throw Error("table-schema", "nothing to merge");
  ExperimentReport out = reports.front();
  std::map<std::pair<std::string, std::string>, ReportRow> seen;
  out.rows.clear();
  for (const auto& rep : reports) {
    for (const auto& row : rep.rows) {
      const auto key = std::make_pair(row.method, row.problem);
      const auto it = seen.find(key);
      if (it != seen.end()) {
        const ReportRow& prev = it->second;
        if (prev.seed_range != row.seed_range ||
            prev.mean_mse != row.mean_mse || prev.std_err != row.std_err)
          throw Error("table-conflict",
                      "conflicting duplicate row for method=" + row.method +
                          " problem=" + row.problem);
        continue;  // identical duplicate collapses
      }
      seen.emplace(key, row);
      out.rows.push_back(row);
    }
  }
  if (reports.size() > 1) out.experiment = "merged";
  return out;
}

std::string render_table(const ExperimentReport& report) {
  // column per problem, row per method, preserving first-seen order
  std::vector<std::string> methods, problems;
  std::map<std::pair<std::string, std::string>, const ReportRow*> cell;
  bool any_ref = false;
  for (const auto& row : report.rows) {
    if (std::find(methods.begin(), methods.end(), row.method) == methods.end())
      methods.push_back(row.method);
    if (std::find(problems.begin(), problems.end(), row.problem) ==
        problems.end())
      problems.push_back(row.problem);
    cell[{row.method, row.problem}] = &row;
    if (row.reference) any_ref = true;
  }
  const auto fmt_cell = [&](const ReportRow* row) -> std::string {
    if (!row) return "-";
    char buf[96];
    if (row->reference)
      std::snprintf(buf, sizeof(buf), "%.4g (ref %.4g)", row->mean_mse,
                    *row->reference);
    else
      std::snprintf(buf, sizeof(buf), "%.4g", row->mean_mse);
    return buf;
  };
  std::vector<std::size_t> widths(problems.size() + 1, 0);
  widths[0] = std::string("method").size();
  for (const auto& m : methods) widths[0] = std::max(widths[0], m.size());
  for (std::size_t c = 0; c < problems.size(); ++c) {
    widths[c + 1] = problems[c].size();
    for (const auto& m : methods)
      widths[c + 1] = std::max(
          widths[c + 1],
          fmt_cell(cell.count({m, problems[c]}) ? cell[{m, problems[c]}]
                                                : nullptr)
              .size());
  }
  std::string out;
  const auto pad = [](const std::string& s, std::size_t w) {
    return s + std::string(w > s.size() ? w - s.size() : 0, ' ');
  };
  out += pad("method", widths[0]);
  for (std::size_t c = 0; c < problems.size(); ++c)
    out += "  " + pad(problems[c], widths[c + 1]);
  out += "\n";
  for (const auto& m : methods) {
    out += pad(m, widths[0]);
    for (std::size_t c = 0; c < problems.size(); ++c) {
      const auto it = cell.find({m, problems[c]});
      out += "  " + pad(fmt_cell(it == cell.end() ? nullptr : it->second),
                        widths[c + 1]);
    }
    out += "\n";
  }
  if (any_ref)
    out += "(ref = published values for the matching experiment)\n";
  return out;
}

std::string score_curve_csv(
    const std::vector<std::pair<double, double>>& curve,
    const std::string& selector) {
  std::string out = "lambda,score,selector\n";
  for (const auto& [lam, score] : curve)
    out += format_double(lam) + "," + format_double(score) + "," + selector +
           "\n";
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io-error", "cannot write " + path);
  out << text;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io-error", "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace gsure
