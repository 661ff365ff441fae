// zdlab: command-line driver for ZD alliance synthesis, incentive-field
// evaluation, placement optimization and topology sweeps.
//
// Exit codes: 0 success, 2 configuration error, 3 infeasible request.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "zdlab/alliance.hpp"
#include "zdlab/deploy.hpp"
#include "zdlab/error.hpp"
#include "zdlab/experiment.hpp"
#include "zdlab/field.hpp"
#include "zdlab/graph.hpp"

namespace {

using nlohmann::json;
using namespace zdlab;

constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

struct GraphArgs {
  std::string graph_path;
  std::string topology;
  std::size_t n = 80;
  std::uint64_t seed = 1;
  std::optional<double> density;
};

void add_graph_args(CLI::App* cmd, GraphArgs& a) {
  auto* file = cmd->add_option("--graph", a.graph_path, "graph file ('V <count>' + edge lines)");
  auto* topo = cmd->add_option("--topology", a.topology, "star|ring|tree|mesh")
                   ->check(CLI::IsMember({"star", "ring", "tree", "mesh"}));
  file->excludes(topo);
  cmd->add_option("--n", a.n, "node count for --topology");
  cmd->add_option("--density", a.density, "mesh edge probability");
  cmd->add_option("--seed", a.seed, "random seed");
}

std::shared_ptr<const Graph> load_graph(const GraphArgs& a) {
  if (!a.graph_path.empty()) {
    std::ifstream in(a.graph_path);
    if (!in) throw ConfigError("cannot open graph '" + a.graph_path + "'");
    return std::make_shared<const Graph>(read_graph(in));
  }
  if (a.topology.empty()) throw ConfigError("either --graph or --topology is required");
  return std::make_shared<const Graph>(generate(parse_topology(a.topology), a.n, a.seed, a.density));
}

struct ScaleArgs {
  PayoffScale scale;
};

void add_scale_args(CLI::App* cmd, ScaleArgs& s) {
  cmd->add_option("--scale-a", s.scale.a, "r(n) = a n^k + b: coefficient a")->capture_default_str();
  cmd->add_option("--scale-k", s.scale.k, "exponent k (1 or 2)")->capture_default_str();
  cmd->add_option("--scale-b", s.scale.b, "offset b")->capture_default_str();
}

struct GaArgs {
  GAConfig cfg;
};

void add_ga_args(CLI::App* cmd, GaArgs& g) {
  cmd->add_option("--population", g.cfg.population_size)->capture_default_str();
  cmd->add_option("--generations", g.cfg.generations)->capture_default_str();
  cmd->add_option("--tournament", g.cfg.tournament_size)->capture_default_str();
  cmd->add_option("--crossover-rate", g.cfg.crossover_rate)->capture_default_str();
  cmd->add_option("--mutation-rate", g.cfg.mutation_rate, "per-gene rate (default 1/V)");
  cmd->add_option("--elitism", g.cfg.elitism_count)->capture_default_str();
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw ConfigError("cannot write '" + path + "'");
  return file;
}

std::vector<NodeId> parse_id_list(const std::string& text) {
  std::vector<NodeId> ids;
  std::string tok;
  std::istringstream is(text);
  while (std::getline(is, tok, ',')) {
    if (tok.empty()) continue;
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      ids.push_back(static_cast<NodeId>(v));
    } catch (const std::exception&) {
      throw ConfigError("bad node id '" + tok + "' in --zd");
    }
  }
  return ids;
}

json field_json(const Deployment& dep, const FieldResult& res) {
  json nodes = json::array();
  for (NodeId v = 0; v < res.nodes.size(); ++v) {
    const auto& nf = res.nodes[v];
    nodes.push_back({{"id", v},
                     {"zd", nf.is_zd},
                     {"zd_neighbors", nf.zd_neighbors},
                     {"has_regular_neighbors", nf.has_regular_neighbors},
                     {"delta", nf.delta},
                     {"q", nf.q}});
  }
  return {{"zd_set", dep.zd_set},
          {"objective", res.objective},
          {"mean_regular", res.mean_regular},
          {"expected_ratio", cooperator_ratio(dep, RatioMode::Expected)},
          {"nodes", nodes}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zdlab: zero-determinant alliances and incentive placement"};
  app.require_subcommand(1);

  // topo
  GraphArgs topo_args;
  std::string topo_out;
  auto* topo = app.add_subcommand("topo", "generate a topology and write a graph file");
  topo->add_option("--topology", topo_args.topology, "star|ring|tree|mesh")
      ->required()
      ->check(CLI::IsMember({"star", "ring", "tree", "mesh"}));
  topo->add_option("--n", topo_args.n, "node count")->capture_default_str();
  topo->add_option("--density", topo_args.density, "mesh edge probability");
  topo->add_option("--seed", topo_args.seed, "random seed")->capture_default_str();
  topo->add_option("--out", topo_out, "output path (stdout when omitted)");

  // ingest
  std::string trace_path, ingest_out, labels_out;
  std::size_t min_contacts = 1;
  auto* ingest = app.add_subcommand("ingest", "build a graph file from a contact trace");
  ingest->add_option("--trace", trace_path, "trace file")->required();
  ingest->add_option("--min-contacts", min_contacts)->capture_default_str();
  ingest->add_option("--out", ingest_out, "graph output path (stdout when omitted)");
  ingest->add_option("--labels", labels_out, "write 'id label' lines here");
  std::uint64_t unused_seed = 0;
  ingest->add_option("--seed", unused_seed, "accepted for uniformity; ingestion is deterministic");

  // synth / verify share their arguments.
  SynthesisRequest sreq;
  sreq.shape = GameShape{3, 2, 2, 9.0};
  std::string outsiders_path;
  double phi = 0.0;
  const auto add_synth_args = [&](CLI::App* cmd) {
    cmd->add_option("--N", sreq.shape.N, "players in the game")->capture_default_str();
    cmd->add_option("--nL", sreq.shape.nL, "leaders")->capture_default_str();
    cmd->add_option("--nA", sreq.shape.nA, "alliance members")->capture_default_str();
    cmd->add_option("--r", sreq.shape.r, "payoff scale r")->capture_default_str();
    cmd->add_option("--chi", sreq.chi, "slope chi in [0, 1)")->capture_default_str();
    cmd->add_option("--l", sreq.l, "enforced baseline l")->required();
    cmd->add_option("--phi", phi, "strategy scaling (midpoint of feasible interval by default)");
    cmd->add_option("--outsiders", outsiders_path, "JSON outsider strategies");
    cmd->add_option("--seed", sreq.seed, "seed for random outsiders")->capture_default_str();
  };
  auto* synth = app.add_subcommand("synth", "synthesize a ZD alliance strategy (JSON report)");
  add_synth_args(synth);
  auto* verify = app.add_subcommand("verify", "enforcement residual against outsiders");
  add_synth_args(verify);

  // field
  GraphArgs field_graph;
  ScaleArgs field_scale;
  std::string zd_list, ratio_mode = "expected";
  long rounds = 100'000;
  auto* field = app.add_subcommand("field", "evaluate one deployment");
  add_graph_args(field, field_graph);
  add_scale_args(field, field_scale);
  field->add_option("--zd", zd_list, "comma-separated ZD node ids")->required();
  field->add_option("--mode", ratio_mode, "cooperator ratio mode")
      ->check(CLI::IsMember({"expected", "monte_carlo"}));
  field->add_option("--rounds", rounds)->capture_default_str();

  // opt
  GraphArgs opt_graph;
  ScaleArgs opt_scale;
  GaArgs opt_ga;
  std::size_t opt_K = 1;
  std::string method = "ga";
  std::uint64_t cap = kDefaultExhaustiveCap;
  auto* opt = app.add_subcommand("opt", "optimize the placement of K ZD players");
  add_graph_args(opt, opt_graph);
  add_scale_args(opt, opt_scale);
  add_ga_args(opt, opt_ga);
  opt->add_option("--K", opt_K, "number of ZD players")->required();
  opt->add_option("--method", method)->check(CLI::IsMember({"ga", "exhaustive"}))->capture_default_str();
  opt->add_option("--cap", cap, "subset budget for --method exhaustive")->capture_default_str();

  // sweep
  std::string config_path, output_override;
  auto* sweep = app.add_subcommand("sweep", "run a configured K sweep and write CSV");
  sweep->add_option("--config", config_path, "JSON experiment config")->required();
  sweep->add_option("--output", output_override, "override the config's output path");
  std::optional<std::uint64_t> sweep_seed;
  sweep->add_option("--seed", sweep_seed, "override the config's base seed");

  // metrics
  GraphArgs metrics_graph;
  std::string metrics_out;
  auto* metrics = app.add_subcommand("metrics", "per-node degree and betweenness (CSV)");
  add_graph_args(metrics, metrics_graph);
  metrics->add_option("--out", metrics_out, "output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*topo) {
      const Graph g = generate(parse_topology(topo_args.topology), topo_args.n, topo_args.seed,
                               topo_args.density);
      std::ofstream file;
      write_graph(open_output(topo_out, file), g);
    } else if (*ingest) {
      std::ifstream in(trace_path);
      if (!in) throw ConfigError("cannot open trace '" + trace_path + "'");
      const IngestedGraph ig = ingest_trace(parse_trace(in), min_contacts);
      std::ofstream file;
      write_graph(open_output(ingest_out, file), ig.graph);
      if (!labels_out.empty()) {
        std::ofstream lab(labels_out);
        if (!lab) throw ConfigError("cannot write '" + labels_out + "'");
        for (std::size_t i = 0; i < ig.labels.size(); ++i) lab << i << ' ' << ig.labels[i] << '\n';
      }
    } else if (*synth || *verify) {
      if (synth->count("--phi") || verify->count("--phi")) sreq.phi = phi;
      if (!outsiders_path.empty()) {
        std::ifstream in(outsiders_path);
        if (!in) throw ConfigError("cannot open outsiders '" + outsiders_path + "'");
        json j;
        try {
          in >> j;
        } catch (const json::exception& e) {
          throw ConfigError(std::string("outsiders file is not valid JSON: ") + e.what());
        }
        sreq.outsiders = parse_outsiders(sreq.shape, j);
      }
      const json report = run_synthesis(sreq);
      if (*synth) {
        std::cout << report.dump(2) << '\n';
      } else {
        std::cout << json{{"residual", report["residual"]},
                          {"pi_alliance", report["pi_alliance"]},
                          {"pi_outsiders", report["pi_outsiders"]}}
                         .dump(2)
                  << '\n';
      }
    } else if (*field) {
      field_scale.scale.validate();
      Deployment dep{load_graph(field_graph), parse_id_list(zd_list), field_scale.scale};
      std::sort(dep.zd_set.begin(), dep.zd_set.end());
      const FieldResult res = evaluate(dep);
      json out = field_json(dep, res);
      if (ratio_mode == "monte_carlo")
        out["monte_carlo_ratio"] =
            cooperator_ratio(dep, RatioMode::MonteCarlo, rounds, field_graph.seed);
      std::cout << out.dump(2) << '\n';
    } else if (*opt) {
      const auto g = load_graph(opt_graph);
      OptimizeResult res;
      if (method == "exhaustive") {
        res = optimize_exhaustive(g, opt_K, opt_scale.scale, cap);
      } else {
        opt_ga.cfg.seed = opt_graph.seed;
        res = optimize_ga(g, opt_K, opt_scale.scale, opt_ga.cfg);
      }
      json out = field_json(res.deployment, evaluate(res.deployment));
      out["method"] = method;
      out["K"] = opt_K;
      if (!res.history.empty()) out["history"] = res.history;
      std::cout << out.dump(2) << '\n';
    } else if (*sweep) {
      ExperimentConfig cfg = load_config(config_path);
      if (!output_override.empty()) cfg.output = output_override;
      if (sweep_seed) cfg.seed = *sweep_seed;
      if (cfg.output.empty()) throw ConfigError("sweep: no output path configured");
      const SweepResult res = run_sweep(cfg);
      {
        std::ofstream out(cfg.output);
        if (!out) throw ConfigError("cannot write '" + cfg.output + "'");
        write_rows_csv(out, res.rows);
      }
      const std::string spath = summary_path(cfg.output);
      std::ofstream sout(spath);
      if (!sout) throw ConfigError("cannot write '" + spath + "'");
      write_summary_csv(sout, res.summary);
      for (const auto& s : res.summary)
        std::cerr << "K=" << s.K << " mean_regular_coop=" << format_double(s.mean_regular_coop_mean)
                  << " sd=" << format_double(s.mean_regular_coop_sd) << '\n';
    } else if (*metrics) {
      const auto g = load_graph(metrics_graph);
      const DegreeStats deg = degree_stats(*g);
      const auto bc = betweenness(*g);
      std::ofstream file;
      std::ostream& out = open_output(metrics_out, file);
      out << kCsvSchema << "\nnode,degree,betweenness\n";
      double bc_sum = 0.0;
      for (NodeId v = 0; v < g->node_count(); ++v) {
        out << v << ',' << deg.degrees[v] << ',' << format_double(bc[v]) << '\n';
        bc_sum += bc[v];
      }
      std::cerr << "V=" << g->node_count() << " E=" << g->edge_count()
                << " mean_degree=" << format_double(deg.mean) << " mean_betweenness="
                << format_double(g->node_count() ? bc_sum / static_cast<double>(g->node_count()) : 0.0)
                << '\n';
    }
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const RefusalError& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ConstructionError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
