#include "zdlab/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

#include "zdlab/error.hpp"

namespace zdlab {

using nlohmann::json;

std::vector<std::size_t> KRange::values() const {
  std::vector<std::size_t> out;
  for (std::size_t k = k_min; k <= k_max; k += step) out.push_back(k);
  return out;
}

namespace {

void reject_unknown(const json& j, const std::string& where, std::set<std::string> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw ConfigError(where + ": unknown field '" + key + "'");
}

template <typename T>
T get(const json& j, const std::string& where, const std::string& key) {
  if (!j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": field '" + key + "' has the wrong type");
  }
}

template <typename T>
T get_or(const json& j, const std::string& where, const std::string& key, T fallback) {
  return j.contains(key) ? get<T>(j, where, key) : fallback;
}

std::size_t get_count(const json& j, const std::string& where, const std::string& key,
                      std::optional<std::size_t> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(where + ": missing field '" + key + "'");
  }
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ConfigError(where + ": field '" + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Sample standard deviation; 0 for fewer than two values.
double sd_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  reject_unknown(j, "config",
                 {"topology", "trace", "scale", "k_range", "ga", "ratio", "repetitions", "seed",
                  "output", "record_timing"});
  ExperimentConfig cfg;
  if (j.contains("topology") == j.contains("trace"))
    throw ConfigError("config: exactly one of 'topology' or 'trace' is required");

  if (j.contains("topology")) {
    const json& t = j.at("topology");
    reject_unknown(t, "topology", {"type", "n", "seed", "density"});
    TopologySpec spec;
    try {
      spec.type = parse_topology(get<std::string>(t, "topology", "type"));
    } catch (const DomainError& e) {
      throw ConfigError(std::string("topology: ") + e.what());
    }
    spec.n = get_count(t, "topology", "n");
    spec.seed = get_count(t, "topology", "seed", 1);
    if (t.contains("density")) spec.density = get<double>(t, "topology", "density");
    cfg.topology = spec;
  } else {
    const json& t = j.at("trace");
    reject_unknown(t, "trace", {"path", "min_contacts"});
    cfg.trace = TraceSpec{get<std::string>(t, "trace", "path"),
                          get_count(t, "trace", "min_contacts", 1)};
  }

  if (j.contains("scale")) {
    const json& s = j.at("scale");
    reject_unknown(s, "scale", {"a", "k", "b"});
    cfg.scale.a = get<double>(s, "scale", "a");
    cfg.scale.k = static_cast<int>(get_count(s, "scale", "k"));
    cfg.scale.b = get<double>(s, "scale", "b");
  }
  if (j.contains("k_range")) {
    const json& k = j.at("k_range");
    reject_unknown(k, "k_range", {"k_min", "k_max", "step"});
    cfg.k_range.k_min = get_count(k, "k_range", "k_min");
    cfg.k_range.k_max = get_count(k, "k_range", "k_max");
    cfg.k_range.step = get_count(k, "k_range", "step", 1);
  }
  if (j.contains("ga")) {
    const json& g = j.at("ga");
    reject_unknown(g, "ga",
                   {"population_size", "generations", "tournament_size", "crossover_rate",
                    "mutation_rate", "elitism_count"});
    GAConfig d;
    cfg.ga.population_size = get_count(g, "ga", "population_size", d.population_size);
    cfg.ga.generations = get_count(g, "ga", "generations", d.generations);
    cfg.ga.tournament_size = get_count(g, "ga", "tournament_size", d.tournament_size);
    cfg.ga.crossover_rate = get_or<double>(g, "ga", "crossover_rate", d.crossover_rate);
    if (g.contains("mutation_rate") && !g.at("mutation_rate").is_null())
      cfg.ga.mutation_rate = get<double>(g, "ga", "mutation_rate");
    cfg.ga.elitism_count = get_count(g, "ga", "elitism_count", d.elitism_count);
  }
  if (j.contains("ratio")) {
    const json& r = j.at("ratio");
    reject_unknown(r, "ratio", {"mode", "rounds"});
    const auto mode = get_or<std::string>(r, "ratio", "mode", "expected");
    if (mode == "expected")
      cfg.ratio_mode = RatioMode::Expected;
    else if (mode == "monte_carlo")
      cfg.ratio_mode = RatioMode::MonteCarlo;
    else
      throw ConfigError("ratio: mode must be 'expected' or 'monte_carlo'");
    cfg.rounds = static_cast<long>(get_count(r, "ratio", "rounds", 100'000));
  }
  cfg.repetitions = get_count(j, "config", "repetitions", 30);
  cfg.seed = get_count(j, "config", "seed", 1);
  cfg.output = get_or<std::string>(j, "config", "output", "");
  cfg.record_timing = get_or<bool>(j, "config", "record_timing", false);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  if (cfg.topology) {
    j["topology"] = {{"type", to_string(cfg.topology->type)},
                     {"n", cfg.topology->n},
                     {"seed", cfg.topology->seed}};
    if (cfg.topology->density) j["topology"]["density"] = *cfg.topology->density;
  }
  if (cfg.trace) j["trace"] = {{"path", cfg.trace->path}, {"min_contacts", cfg.trace->min_contacts}};
  j["scale"] = {{"a", cfg.scale.a}, {"k", cfg.scale.k}, {"b", cfg.scale.b}};
  j["k_range"] = {{"k_min", cfg.k_range.k_min},
                  {"k_max", cfg.k_range.k_max},
                  {"step", cfg.k_range.step}};
  j["ga"] = {{"population_size", cfg.ga.population_size},
             {"generations", cfg.ga.generations},
             {"tournament_size", cfg.ga.tournament_size},
             {"crossover_rate", cfg.ga.crossover_rate},
             {"elitism_count", cfg.ga.elitism_count}};
  if (cfg.ga.mutation_rate) j["ga"]["mutation_rate"] = *cfg.ga.mutation_rate;
  j["ratio"] = {{"mode", cfg.ratio_mode == RatioMode::Expected ? "expected" : "monte_carlo"},
                {"rounds", cfg.rounds}};
  j["repetitions"] = cfg.repetitions;
  j["seed"] = cfg.seed;
  j["output"] = cfg.output;
  j["record_timing"] = cfg.record_timing;
  return j;
}

std::shared_ptr<const Graph> build_graph(const ExperimentConfig& cfg, std::size_t repetition) {
  if (cfg.topology) {
    const auto& t = *cfg.topology;
    return std::make_shared<const Graph>(generate(t.type, t.n, t.seed + repetition, t.density));
  }
  std::ifstream in(cfg.trace->path);
  if (!in) throw ConfigError("cannot open trace '" + cfg.trace->path + "'");
  return std::make_shared<const Graph>(
      ingest_trace(parse_trace(in), cfg.trace->min_contacts).graph);
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.topology.has_value() == cfg.trace.has_value())
    throw ConfigError("config: exactly one of 'topology' or 'trace' is required");
  try {
    cfg.scale.validate();
    cfg.ga.validate();
    if (cfg.topology && cfg.topology->density &&
        !(*cfg.topology->density > 0.0 && *cfg.topology->density <= 1.0))
      throw DomainError("mesh density must lie in (0, 1]");
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (cfg.k_range.step < 1) throw ConfigError("k_range: step must be >= 1");
  if (cfg.k_range.k_min < 1 || cfg.k_range.k_min > cfg.k_range.k_max)
    throw ConfigError("k_range: need 1 <= k_min <= k_max");
  if (cfg.repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (cfg.ratio_mode == RatioMode::MonteCarlo && cfg.rounds < 1)
    throw ConfigError("ratio: rounds must be >= 1");
  if (cfg.topology) {
    const std::size_t V = cfg.topology->n;
    if (cfg.k_range.k_max >= V) throw ConfigError("k_range: k_max must be < V");
    if (!cfg.scale.dilemma_for_all(static_cast<int>(V)))
      throw ConfigError("scale: r(n) <= 1 for some game size; no social dilemma");
  } else if (!cfg.scale.dilemma_for_all(2)) {
    throw ConfigError("scale: r(2) <= 1; no social dilemma");
  }
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
  validate(cfg);
  SweepResult res;
  for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
    const auto graph = build_graph(cfg, rep);
    const std::size_t V = graph->node_count();
    if (cfg.k_range.k_max >= V) throw ConfigError("k_range: k_max must be < V");
    if (!cfg.scale.dilemma_for_all(static_cast<int>(V)))
      throw ConfigError("scale: r(n) <= 1 for some game size; no social dilemma");
    const auto bc = betweenness(*graph);
    const DegreeStats deg = degree_stats(*graph);
    const double graph_bc = std::accumulate(bc.begin(), bc.end(), 0.0) / static_cast<double>(V);
    const std::uint64_t rep_seed = cfg.seed + rep;

    for (std::size_t K : cfg.k_range.values()) {
      const auto t0 = std::chrono::steady_clock::now();
      GAConfig ga = cfg.ga;
      ga.seed = rep_seed * 1'000'003ULL + K;
      const OptimizeResult opt = optimize_ga(graph, K, cfg.scale, ga);
      const FieldResult field = evaluate(opt.deployment);

      SweepRow row;
      row.K = K;
      row.repetition = rep;
      row.seed = rep_seed;
      row.objective = field.objective;
      row.mean_regular_coop = field.mean_regular;
      row.expected_ratio = cooperator_ratio(opt.deployment, RatioMode::Expected);
      if (cfg.ratio_mode == RatioMode::MonteCarlo)
        row.monte_carlo_ratio =
            cooperator_ratio(opt.deployment, RatioMode::MonteCarlo, cfg.rounds, ga.seed);
      row.zd_set = opt.deployment.zd_set;
      for (NodeId v : row.zd_set) {
        row.zd_mean_degree += static_cast<double>(deg.degrees[v]);
        row.zd_mean_betweenness += bc[v];
      }
      row.zd_mean_degree /= static_cast<double>(K);
      row.zd_mean_betweenness /= static_cast<double>(K);
      row.graph_mean_degree = deg.mean;
      row.graph_mean_betweenness = graph_bc;
      if (cfg.record_timing)
        row.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
      res.rows.push_back(std::move(row));
    }
  }
  res.summary = summarize(res.rows);
  return res;
}

std::vector<SweepSummary> summarize(const std::vector<SweepRow>& rows) {
  std::map<std::size_t, std::vector<const SweepRow*>> byK;
  for (const auto& r : rows) byK[r.K].push_back(&r);
  std::vector<SweepSummary> out;
  for (const auto& [K, group] : byK) {
    const auto collect = [&](auto member) {
      std::vector<double> xs;
      for (const SweepRow* r : group) xs.push_back(member(*r));
      return xs;
    };
    SweepSummary s;
    s.K = K;
    s.repetitions = group.size();
    const auto obj = collect([](const SweepRow& r) { return r.objective; });
    const auto coop = collect([](const SweepRow& r) { return r.mean_regular_coop; });
    const auto ratio = collect([](const SweepRow& r) { return r.expected_ratio; });
    s.objective_mean = mean_of(obj);
    s.objective_sd = sd_of(obj);
    s.mean_regular_coop_mean = mean_of(coop);
    s.mean_regular_coop_sd = sd_of(coop);
    s.expected_ratio_mean = mean_of(ratio);
    s.expected_ratio_sd = sd_of(ratio);
    if (group.front()->monte_carlo_ratio) {
      const auto mc = collect([](const SweepRow& r) { return r.monte_carlo_ratio.value_or(0.0); });
      s.monte_carlo_ratio_mean = mean_of(mc);
      s.monte_carlo_ratio_sd = sd_of(mc);
    }
    s.zd_mean_degree_mean = mean_of(collect([](const SweepRow& r) { return r.zd_mean_degree; }));
    s.zd_mean_betweenness_mean =
        mean_of(collect([](const SweepRow& r) { return r.zd_mean_betweenness; }));
    s.graph_mean_degree_mean =
        mean_of(collect([](const SweepRow& r) { return r.graph_mean_degree; }));
    s.graph_mean_betweenness_mean =
        mean_of(collect([](const SweepRow& r) { return r.graph_mean_betweenness; }));
    out.push_back(s);
  }
  return out;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

namespace {

std::string opt_field(const std::optional<double>& x) { return x ? format_double(*x) : ""; }

}  // namespace

void write_rows_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kCsvSchema << '\n'
      << "K,repetition,seed,objective,mean_regular_coop,expected_ratio,monte_carlo_ratio,"
         "zd_set,zd_mean_degree,zd_mean_betweenness,graph_mean_degree,"
         "graph_mean_betweenness,wall_ms\n";
  for (const auto& r : rows) {
    std::string zd;
    for (std::size_t i = 0; i < r.zd_set.size(); ++i) {
      if (i) zd += ';';
      zd += std::to_string(r.zd_set[i]);
    }
    out << r.K << ',' << r.repetition << ',' << r.seed << ',' << format_double(r.objective)
        << ',' << format_double(r.mean_regular_coop) << ',' << format_double(r.expected_ratio)
        << ',' << opt_field(r.monte_carlo_ratio) << ',' << zd << ','
        << format_double(r.zd_mean_degree) << ',' << format_double(r.zd_mean_betweenness)
        << ',' << format_double(r.graph_mean_degree) << ','
        << format_double(r.graph_mean_betweenness) << ',' << opt_field(r.wall_ms) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SweepSummary>& summary) {
  out << kCsvSchema << '\n'
      << "K,repetitions,objective_mean,objective_sd,mean_regular_coop_mean,"
         "mean_regular_coop_sd,expected_ratio_mean,expected_ratio_sd,"
         "monte_carlo_ratio_mean,monte_carlo_ratio_sd,zd_mean_degree_mean,"
         "zd_mean_betweenness_mean,graph_mean_degree_mean,graph_mean_betweenness_mean\n";
  for (const auto& s : summary) {
    out << s.K << ',' << s.repetitions << ',' << format_double(s.objective_mean) << ','
        << format_double(s.objective_sd) << ',' << format_double(s.mean_regular_coop_mean)
        << ',' << format_double(s.mean_regular_coop_sd) << ','
        << format_double(s.expected_ratio_mean) << ',' << format_double(s.expected_ratio_sd)
        << ',' << opt_field(s.monte_carlo_ratio_mean) << ',' << opt_field(s.monte_carlo_ratio_sd)
        << ',' << format_double(s.zd_mean_degree_mean) << ','
        << format_double(s.zd_mean_betweenness_mean) << ','
        << format_double(s.graph_mean_degree_mean) << ','
        << format_double(s.graph_mean_betweenness_mean) << '\n';
  }
}

std::string summary_path(const std::string& output) {
  const std::string ext = ".csv";
  if (output.size() >= ext.size() && output.compare(output.size() - ext.size(), ext.size(), ext) == 0)
    return output.substr(0, output.size() - ext.size()) + ".summary.csv";
  return output + ".summary.csv";
}

OutsiderProfile random_outsiders(const GameShape& shape, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  OutsiderProfile prof = uniform_outsiders(shape, 0.0);
  for (auto& ls : prof.leaders)
    for (int s = 0; s < 2; ++s)
      for (int x = 0; x < shape.nL; ++x)
        for (int y = 0; y <= shape.followers(); ++y)
          ls.set(static_cast<Action>(s), x, y, unit(rng));
  for (auto& fs : prof.followers) {
    std::vector<double> probs(static_cast<std::size_t>(shape.nL) + 1);
    for (double& p : probs) p = unit(rng);
    fs = FollowerStrategy(fs.owner(), std::move(probs));
  }
  return prof;
}

OutsiderProfile parse_outsiders(const GameShape& shape, const json& j) {
  reject_unknown(j, "outsiders", {"leaders", "followers"});
  OutsiderProfile prof;
  try {
    for (const auto& e : j.value("leaders", json::array())) {
      reject_unknown(e, "outsiders.leaders[]", {"owner", "table", "fill"});
      const int owner = get<int>(e, "outsiders.leaders[]", "owner");
      if (owner < shape.nA || owner >= shape.nL)
        throw ConfigError("outsiders: leader owner must be a non-alliance leader");
      LeaderStrategy ls(owner, shape.nL, shape.followers(),
                        get_or<double>(e, "outsiders.leaders[]", "fill", 0.5));
      if (e.contains("table")) {
        const auto table = get<std::vector<double>>(e, "outsiders.leaders[]", "table");
        if (table.size() != ls.table().size())
          throw ConfigError("outsiders: leader table needs " +
                            std::to_string(ls.table().size()) + " entries ordered (s, x, y)");
        std::size_t i = 0;
        for (int s = 0; s < 2; ++s)
          for (int x = 0; x < shape.nL; ++x)
            for (int y = 0; y <= shape.followers(); ++y)
              ls.set(static_cast<Action>(s), x, y, table[i++]);
      }
      ls.validate();
      prof.leaders.push_back(std::move(ls));
    }
    for (const auto& e : j.value("followers", json::array())) {
      reject_unknown(e, "outsiders.followers[]", {"owner", "probs"});
      prof.followers.emplace_back(get<int>(e, "outsiders.followers[]", "owner"),
                                  get<std::vector<double>>(e, "outsiders.followers[]", "probs"));
    }
  } catch (const ConstructionError& e) {
    throw ConfigError(std::string("outsiders: ") + e.what());
  }
  return prof;
}

json run_synthesis(const SynthesisRequest& req) {
  const GameShape& shape = req.shape;
  shape.validate();
  if (!alliance_admissible(shape)) {
    throw InfeasibleError("alliance of " + std::to_string(shape.nA) + " in a game of " +
                          std::to_string(shape.N) + " with r=" + format_double(shape.r) +
                          " lacks control power");
  }
  const Interval l_range = feasible_l_range(req.chi, shape);
  const PayoffVectors g = payoff_vectors(shape);
  const SynthesisResult res = synthesize({req.chi, req.l, req.phi, shape}, g);

  OutsiderProfile outsiders;
  if (req.outsiders) {
    outsiders = *req.outsiders;
  } else {
    std::mt19937_64 rng(req.seed);
    outsiders = random_outsiders(shape, rng);
  }
  const EnforcementReport rep = verify_enforcement(res, outsiders, req.chi, req.l);

  json out;
  out["shape"] = {{"N", shape.N}, {"nL", shape.nL}, {"nA", shape.nA}, {"r", shape.r}};
  out["chi"] = req.chi;
  out["l"] = req.l;
  out["l_range"] = {l_range.lo, l_range.hi};
  json f = json::object();
  for (State s = 0; s < shape.state_count(); ++s) f[state_label(s, shape.N)] = res.f[s];
  out["f"] = f;
  json unison = json::array();
  for (const auto& e : res.unison)
    unison.push_back({{"s", e.s == Action::Cooperate ? "c" : "d"}, {"b", e.b}, {"f", e.f}, {"p", e.p}});
  out["unison"] = unison;
  out["phi_interval"] = {res.phi_interval.lo, res.phi_interval.hi};
  out["phi"] = res.phi;
  json table = json::array();
  for (int s = 0; s < 2; ++s)
    for (int x = 0; x < shape.nL; ++x)
      for (int y = 0; y <= shape.followers(); ++y)
        table.push_back({{"s", s ? "c" : "d"},
                         {"x", x},
                         {"y", y},
                         {"p", res.strategy.prob(static_cast<Action>(s), x, y)}});
  out["strategy"] = table;
  out["certificate"] = res.certificate;
  out["pi_alliance"] = rep.pi_alliance;
  out["pi_outsiders"] = rep.pi_outsiders;
  out["residual"] = rep.residual;
  return out;
}

}  // namespace zdlab
