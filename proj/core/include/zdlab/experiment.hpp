#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "zdlab/alliance.hpp"
#include "zdlab/deploy.hpp"
#include "zdlab/field.hpp"
#include "zdlab/graph.hpp"

namespace zdlab {

inline constexpr const char* kCsvSchema = "# zdlab-v1";

struct TopologySpec {
  Topology type = Topology::Mesh;
  std::size_t n = 80;
  std::uint64_t seed = 1;
  std::optional<double> density;
};

struct TraceSpec {
  std::string path;
  std::size_t min_contacts = 1;
};

struct KRange {
  std::size_t k_min = 1;
  std::size_t k_max = 10;
  std::size_t step = 1;

  std::vector<std::size_t> values() const;
};

struct ExperimentConfig {
  std::optional<TopologySpec> topology;
  std::optional<TraceSpec> trace;
  PayoffScale scale;
  KRange k_range;
  GAConfig ga;
  RatioMode ratio_mode = RatioMode::Expected;
  long rounds = 100'000;
  std::size_t repetitions = 30;
  std::uint64_t seed = 1;
  std::string output;
  // wall_ms is left blank unless enabled so reruns stay byte-identical.
  bool record_timing = false;
};

// Strict parse: unknown keys, wrong types and out-of-range values raise
// ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

struct SweepRow {
  std::size_t K = 0;
  std::size_t repetition = 0;
  std::uint64_t seed = 0;
  double objective = 0.0;
  double mean_regular_coop = 0.0;
  double expected_ratio = 0.0;
  std::optional<double> monte_carlo_ratio;
  std::vector<NodeId> zd_set;
  double zd_mean_degree = 0.0;
  double zd_mean_betweenness = 0.0;
  double graph_mean_degree = 0.0;
  double graph_mean_betweenness = 0.0;
  std::optional<double> wall_ms;
};

struct SweepSummary {
  std::size_t K = 0;
  std::size_t repetitions = 0;
  double objective_mean = 0.0, objective_sd = 0.0;
  double mean_regular_coop_mean = 0.0, mean_regular_coop_sd = 0.0;
  double expected_ratio_mean = 0.0, expected_ratio_sd = 0.0;
  std::optional<double> monte_carlo_ratio_mean, monte_carlo_ratio_sd;
  double zd_mean_degree_mean = 0.0;
  double zd_mean_betweenness_mean = 0.0;
  double graph_mean_degree_mean = 0.0;
  double graph_mean_betweenness_mean = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepSummary> summary;
};

// Builds the graph for one repetition: random topologies are reseeded with
// topology.seed + repetition.
std::shared_ptr<const Graph> build_graph(const ExperimentConfig& cfg, std::size_t repetition);

void validate(const ExperimentConfig& cfg);

// For each K and repetition: optimize the placement, evaluate the field and
// record the row; then aggregate per K.
SweepResult run_sweep(const ExperimentConfig& cfg);

std::vector<SweepSummary> summarize(const std::vector<SweepRow>& rows);

void write_rows_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<SweepSummary>& summary);
// "<stem>.summary.csv" next to a "<stem>.csv" output path.
std::string summary_path(const std::string& output);

// Outsiders with every probability drawn uniformly from [0, 1].
OutsiderProfile random_outsiders(const GameShape& shape, std::mt19937_64& rng);

// {"leaders": [{"owner": i, "table": [...]}|{"owner": i, "fill": p}],
//  "followers": [{"owner": j, "probs": [...]}]}
OutsiderProfile parse_outsiders(const GameShape& shape, const nlohmann::json& j);

struct SynthesisRequest {
  GameShape shape;
  double chi = 0.0;
  double l = 0.0;
  std::optional<double> phi;
  std::optional<OutsiderProfile> outsiders;
  std::uint64_t seed = 1;
};

// Synthesizes the alliance strategy and verifies it against the supplied (or
// seeded random) outsiders. Throws InfeasibleError for inadmissible shapes or
// infeasible (chi, l).
nlohmann::json run_synthesis(const SynthesisRequest& req);

std::string format_double(double x);

}  // namespace zdlab
