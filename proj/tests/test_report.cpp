#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gsure/experiments.hpp"
#include "gsure/report.hpp"

using namespace gsure;

TEST_CASE("config parsing: sections, comments, trimming") {
  const Config cfg = Config::parse_string(
      "# leading comment\n"
      "[experiment]\n"
      "name = denoise   # trailing comment\n"
      "seed = 42\n"
      "\n"
      "[problem]\n"
      "sigma2 = 4.0\n"
      "signals = Blocks, Bumps\n");
  CHECK(cfg.get_string("experiment.name", "") == "denoise");
  CHECK(cfg.get_seed("experiment.seed", 0) == 42);
  CHECK(cfg.get_double("problem.sigma2", 0.0) == 4.0);
  const auto sig = cfg.get_string_list("problem.signals", {});
  REQUIRE(sig.size() == 2);
  CHECK(sig[0] == "Blocks");
  CHECK(sig[1] == "Bumps");
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(Config::parse_string("[oops\nk = v\n"), Error);
  CHECK_THROWS_AS(Config::parse_string("novalue\n"), Error);
  CHECK_THROWS_AS(Config::parse_string("a = 1\na = 2\n"), Error);
  const Config cfg = Config::parse_string("[x]\nk = notanumber\n");
  CHECK_THROWS_AS(cfg.get_double("x.k", 0.0), Error);
  CHECK_THROWS_WITH_AS(cfg.validate_keys({"x.other"}),
                       doctest::Contains("unknown config key"), Error);
}

TEST_CASE("config canonical text and hash are stable") {
  const Config a = Config::parse_string("[b]\nz = 2\n[a]\ny = 1\n");
  const Config b = Config::parse_string("[a]\ny = 1\n[b]\nz = 2\n");
  CHECK(a.canonical_text() == b.canonical_text());
  CHECK(a.hash() == b.hash());
  CHECK(fnv1a64("a = 1\n") == 0x58ac462f1a79636eULL);
}

TEST_CASE("resolve_config applies defaults, file, then overrides") {
  const Config dflt = resolve_config("denoise", "");
  CHECK(dflt.get_int("experiment.trials", 0) == 25);
  const Config overridden =
      resolve_config("denoise", "", {{"experiment.trials", "3"}});
  CHECK(overridden.get_int("experiment.trials", 0) == 3);
  CHECK_THROWS_AS(resolve_config("bogus", ""), Error);
}

TEST_CASE("report CSV round trip") {
  Config cfg = Config::parse_string("[experiment]\nname = t\nseed = 9\n");
  ExperimentReport rep = make_report("t", cfg);
  rep.rows.push_back({"m1", "p1", "9..10", 1.25, 0.01, 4.054});
  rep.rows.push_back({"m2", "p1", "9..10", 2.5, 0.02, std::nullopt});
  const std::string csv = rep.to_csv();
  const ExperimentReport back = ExperimentReport::from_csv_text(csv);
  CHECK(back.experiment == "t");
  CHECK(back.config_hash == rep.config_hash);
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows[0].method == "m1");
  CHECK(back.rows[0].mean_mse == 1.25);
  CHECK(back.rows[0].reference.has_value());
  CHECK(!back.rows[1].reference.has_value());
  // identical runs produce identical bytes
  CHECK(csv == rep.to_csv());
}

TEST_CASE("merging reports") {
  Config cfg = Config::parse_string("[experiment]\nname = t\n");
  ExperimentReport a = make_report("t", cfg);
  a.rows.push_back({"m1", "p1", "0..4", 1.0, 0.1, std::nullopt});
  ExperimentReport b = make_report("t", cfg);
  b.rows.push_back({"m2", "p1", "0..4", 2.0, 0.1, std::nullopt});

  // disjoint methods: union
  const ExperimentReport u = merge_reports({a, b});
  CHECK(u.rows.size() == 2);

  // identical duplicate collapses
  const ExperimentReport same = merge_reports({a, a});
  CHECK(same.rows.size() == 1);

  // conflicting duplicate errors out
  ExperimentReport c = a;
  c.rows[0].mean_mse = 9.0;
  CHECK_THROWS_WITH_AS(merge_reports({a, c}),
                       doctest::Contains("conflicting"), Error);
}

TEST_CASE("table rendering aligns methods by problem") {
  Config cfg = Config::parse_string("[experiment]\nname = t\n");
  ExperimentReport rep = make_report("t", cfg);
  rep.rows.push_back({"SURE", "heat(80)", "0..4", 0.5, 0.01, 0.10});
  rep.rows.push_back({"discrepancy", "heat(80)", "0..4", 1.5, 0.02, 1.16});
  const std::string table = render_table(rep);
  CHECK(table.find("SURE") != std::string::npos);
  CHECK(table.find("heat(80)") != std::string::npos);
  CHECK(table.find("ref") != std::string::npos);
}

TEST_CASE("score curve CSV format") {
  const std::string csv =
      score_curve_csv({{0.1, -2.0}, {1.0, 3.5}}, "SURE");
  CHECK(csv == "lambda,score,selector\n0.1,-2,SURE\n1,3.5,SURE\n");
}

TEST_CASE("format_double uses 12 significant digits") {
  CHECK(format_double(1.0 / 3.0) == "0.333333333333");
  CHECK(format_double(2.0) == "2");
}
