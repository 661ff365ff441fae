#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "zdlab/error.hpp"
#include "zdlab/experiment.hpp"

using namespace zdlab;
using nlohmann::json;

namespace {

json small_config() {
  return json::parse(R"({
    "topology": {"type": "star", "n": 20, "seed": 4},
    "k_range": {"k_min": 1, "k_max": 3},
    "ga": {"population_size": 20, "generations": 15},
    "repetitions": 2,
    "seed": 11
  })");
}

std::string rows_csv(const SweepResult& r) {
  std::ostringstream os;
  write_rows_csv(os, r.rows);
  return os.str();
}

std::string summary_csv(const SweepResult& r) {
  std::ostringstream os;
  write_summary_csv(os, r.summary);
  return os.str();
}

}  // namespace

TEST_CASE("config defaults and round trip") {
  const auto cfg = parse_config(small_config());
  REQUIRE(cfg.topology);
  CHECK(cfg.topology->type == Topology::Star);
  CHECK(cfg.topology->n == 20);
  CHECK(cfg.k_range.values() == std::vector<std::size_t>{1, 2, 3});
  CHECK(cfg.ga.population_size == 20);
  CHECK(cfg.ga.tournament_size == 3);
  CHECK(cfg.scale.a == 2.0);
  CHECK(cfg.ratio_mode == RatioMode::Expected);
  CHECK(cfg.repetitions == 2);
  CHECK_FALSE(cfg.record_timing);
  const auto again = parse_config(to_json(cfg));
  CHECK(to_json(again) == to_json(cfg));
}

TEST_CASE("config is strict") {
  const auto with = [](const char* path, json value) {
    json j = small_config();
    j[json::json_pointer(path)] = value;
    return j;
  };
  CHECK_THROWS_AS(parse_config(with("/bogus", 1)), ConfigError);
  CHECK_THROWS_AS(parse_config(with("/topology/radius", 1)), ConfigError);
  CHECK_THROWS_AS(parse_config(with("/ga/mutation", 0.1)), ConfigError);
  CHECK_THROWS_AS(parse_config(with("/topology/n", "twenty")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("/topology/n", -3)), ConfigError);
  CHECK_THROWS_AS(parse_config(with("/topology/type", "grid")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("/scale", json{{"a", 2}, {"k", 1.5}, {"b", 3}})),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(with("/ratio", json{{"mode", "exact"}})), ConfigError);
  CHECK_THROWS_AS(parse_config(with("/trace", json{{"path", "x"}})), ConfigError);
  json neither = small_config();
  neither.erase("topology");
  CHECK_THROWS_AS(parse_config(neither), ConfigError);
  CHECK_THROWS_AS(parse_config(json::array()), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("semantic validation") {
  auto cfg = parse_config(small_config());
  CHECK_NOTHROW(validate(cfg));
  cfg.k_range.k_max = 20;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = parse_config(small_config());
  cfg.k_range.k_min = 0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = parse_config(small_config());
  cfg.scale = PayoffScale{0.0, 1, 0.5};
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = parse_config(small_config());
  cfg.ga.crossover_rate = 2.0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = parse_config(small_config());
  cfg.repetitions = 0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("sweep is reproducible byte for byte") {
  const auto cfg = parse_config(small_config());
  const auto a = run_sweep(cfg);
  const auto b = run_sweep(cfg);
  CHECK(a.rows.size() == 6);
  CHECK(a.summary.size() == 3);
  CHECK(rows_csv(a) == rows_csv(b));
  CHECK(summary_csv(a) == summary_csv(b));
  for (const auto& row : a.rows) {
    CHECK(row.mean_regular_coop == doctest::Approx(0.7310585786300049));
    CHECK(row.zd_set.front() == 0);
    CHECK_FALSE(row.monte_carlo_ratio.has_value());
    CHECK_FALSE(row.wall_ms.has_value());
    CHECK(row.graph_mean_degree == doctest::Approx(1.9));
  }
  CHECK(a.rows[0].zd_mean_degree == 19.0);
  CHECK(a.rows[0].zd_mean_betweenness == doctest::Approx(171.0));  // C(19, 2)
  const std::string csv = rows_csv(a);
  CHECK(csv.rfind(std::string(kCsvSchema) + "\n", 0) == 0);
  CHECK(csv.find("\n1,0,11,") != std::string::npos);
}

TEST_CASE("monte carlo sweep and timing columns") {
  json j = small_config();
  j["ratio"] = {{"mode", "monte_carlo"}, {"rounds", 2000}};
  j["record_timing"] = true;
  const auto res = run_sweep(parse_config(j));
  for (const auto& row : res.rows) {
    REQUIRE(row.monte_carlo_ratio.has_value());
    CHECK(std::abs(*row.monte_carlo_ratio - row.expected_ratio) < 0.05);
    CHECK(row.wall_ms.has_value());
  }
  CHECK(res.summary.front().monte_carlo_ratio_mean.has_value());
}

TEST_CASE("trace-driven sweep") {
  const auto dir = std::filesystem::temp_directory_path() / "zdlab_test_trace";
  std::filesystem::create_directories(dir);
  const auto path = dir / "contacts.txt";
  {
    std::ofstream out(path);
    out << "# a star of contacts\n";
    for (int i = 1; i <= 9; ++i) out << "hub n" << i << " 0 1\n";
  }
  json j = small_config();
  j.erase("topology");
  j["trace"] = {{"path", path.string()}};
  const auto res = run_sweep(parse_config(j));
  CHECK(res.rows.front().zd_set == std::vector<NodeId>{0});
  std::filesystem::remove_all(dir);
}

TEST_CASE("summary statistics") {
  std::vector<SweepRow> rows(3);
  const double objs[] = {1.0, 2.0, 4.0};
  for (int i = 0; i < 3; ++i) {
    rows[i].K = 2;
    rows[i].objective = objs[i];
  }
  const auto s = summarize(rows);
  REQUIRE(s.size() == 1);
  CHECK(s[0].objective_mean == doctest::Approx(7.0 / 3.0));
  CHECK(s[0].objective_sd == doctest::Approx(std::sqrt(7.0 / 3.0)));
  CHECK(s[0].repetitions == 3);
}

TEST_CASE("output helpers") {
  CHECK(summary_path("out/run.csv") == "out/run.summary.csv");
  CHECK(summary_path("run") == "run.summary.csv");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0 / 3.0) == "0.333333333333");
}

TEST_CASE("synthesis report") {
  SynthesisRequest req;
  req.shape = {3, 2, 2, 9};
  req.l = 3.0;
  req.phi = 1.0 / 6.0;
  req.outsiders = parse_outsiders(req.shape, json::parse(R"({
    "followers": [{"owner": 2, "probs": [0.1, 0.5, 0.9]}]})"));
  const auto report = run_synthesis(req);
  CHECK(report["pi_outsiders"].get<double>() == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(report["pi_alliance"].get<double>() == doctest::Approx(58.0 / 19.0).epsilon(1e-10));
  CHECK(report["residual"].get<double>() <= 1e-8);
  CHECK(report["f"]["ccc"].get<double>() == doctest::Approx(-6));
  CHECK(report["l_range"][1].get<double>() == doctest::Approx(7));
  CHECK(report["strategy"].size() == 2 * 2 * 2);

  req.outsiders.reset();
  req.phi.reset();
  req.seed = 5;
  CHECK(run_synthesis(req)["residual"].get<double>() <= 1e-8);
  req.l = 7.5;
  CHECK_THROWS_AS(run_synthesis(req), InfeasibleError);
  req.l = 3.0;
  req.shape = {3, 2, 1, 9};
  CHECK_THROWS_AS(run_synthesis(req), InfeasibleError);
}

TEST_CASE("outsider profiles") {
  const GameShape shape{4, 3, 2, 11};
  const auto prof = parse_outsiders(shape, json::parse(R"({
    "leaders": [{"owner": 2, "fill": 0.25}],
    "followers": [{"owner": 3, "probs": [0, 0.2, 0.4, 1]}]})"));
  REQUIRE(prof.leaders.size() == 1);
  CHECK(prof.leaders[0].prob(Action::Cooperate, 1, 0) == 0.25);
  json table = json::array();
  for (int i = 0; i < 12; ++i) table.push_back(i / 12.0);
  const auto tabled = parse_outsiders(
      shape, json{{"leaders", json::array({json{{"owner", 2}, {"table", table}}})}});
  CHECK(tabled.leaders[0].prob(Action::Defect, 0, 1) == doctest::Approx(1.0 / 12.0));
  CHECK(tabled.leaders[0].prob(Action::Cooperate, 2, 1) == doctest::Approx(11.0 / 12.0));
  CHECK_THROWS_AS(parse_outsiders(shape, json::parse(R"({"leaders": [{"owner": 0}]})")),
                  ConfigError);
  CHECK_THROWS_AS(parse_outsiders(shape, json::parse(R"({"leaders": [{"owner": 2, "fill": 2}]})")),
                  ConfigError);
  CHECK_THROWS_AS(parse_outsiders(shape, json::parse(R"({"extra": []})")), ConfigError);
  std::mt19937_64 rng(1);
  const auto rnd = random_outsiders(shape, rng);
  CHECK(rnd.leaders.size() == 1);
  CHECK(rnd.followers.size() == 1);
}
