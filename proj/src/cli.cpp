#include "ftm/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "ftm/analytics.hpp"
#include "ftm/errors.hpp"
#include "ftm/generator.hpp"
#include "ftm/growth.hpp"
#include "ftm/io.hpp"
#include "ftm/statfit.hpp"

namespace ftm::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PatetoFlags {
  double a = 3.0;
  double w0 = 1.0;
  int d = 3;
};

struct RuleFlags {
  std::string variant = "undirected";
  double alpha = 1.0;
  double beta = 1.0;
  std::string h = "identity";
};

void add_pareto_flags(CLI::App* app, PatetoFlags& f) {
  app->add_option("--a", f.a, "Pareto shape a")->capture_default_str();
  app->add_option("--w0", f.w0, "Pareto scale w0")->capture_default_str();
  app->add_option("--d", f.d, "ambient dimension")->capture_default_str();
}

void add_rule_flags(CLI::App* app, RuleFlags& f) {
  app->add_option("--variant", f.variant, "edge rule")
      ->check(CLI::IsMember({"undirected", "directed", "linkfn"}))
      ->capture_default_str();
  app->add_option("--alpha", f.alpha, "source weight exponent")->capture_default_str();
  app->add_option("--beta", f.beta, "target weight exponent")->capture_default_str();
  app->add_option("--h", f.h, "link function: identity | exp | oddpow:m:c | evenpow:m")
      ->capture_default_str();
}

EdgeRule make_rule(const RuleFlags& f, double theta) {
  switch (parse_variant(f.variant)) {
    case Variant::Undirected: return EdgeRule::undirected(theta);
    case Variant::Directed: return EdgeRule::directed(theta, f.alpha, f.beta);
    case Variant::LinkFunction:
      return EdgeRule::link_function(theta, f.alpha, f.beta, LinkFn::parse(f.h));
  }
  return EdgeRule::undirected(theta);
}

json config_json(const ModelConfig& c) {
  json j;
  j["n"] = c.n;
  j["d"] = c.d;
  j["a"] = c.pareto.a();
  j["w0"] = c.pareto.w0();
  j["variant"] = to_string(c.rule.variant);
  j["theta"] = c.rule.theta;
  j["alpha"] = c.rule.alpha;
  j["beta"] = c.rule.beta;
  j["h"] = c.rule.h.to_string();
  j["seed"] = c.seed;
  return j;
}

ModelConfig config_from_json(const json& j) {
  try {
    ModelConfig c;
    c.n = j.at("n").get<std::uint64_t>();
    c.d = j.at("d").get<int>();
    c.pareto = ParetoParams(j.at("a").get<double>(), j.at("w0").get<double>());
    RuleFlags rf{j.at("variant").get<std::string>(), j.at("alpha").get<double>(),
                 j.at("beta").get<double>(), j.at("h").get<std::string>()};
    c.rule = make_rule(rf, j.at("theta").get<double>());
    c.seed = j.at("seed").get<std::uint64_t>();
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ParseError(std::string("manifest config: ") + e.what());
  }
}

std::uint64_t max_edges_from_env() {
  const char* v = std::getenv("FTM_MAX_EDGES");
  if (v == nullptr || *v == '\0') return GenerateOptions{}.max_edges;
  const std::string s(v);
  if (s.find_first_not_of("0123456789") != std::string::npos)
    throw DomainError("FTM_MAX_EDGES must be a non-negative integer (got '" + s + "')");
  return std::stoull(s);
}

std::string num(double x) { return io::format_double(x); }

json output_entry(const fs::path& dir, const std::string& name, const std::string& content) {
  const auto digest = io::write_file(dir / name, content);
  return json{{"file", name}, {"sha256", digest}, {"bytes", content.size()}};
}

void write_manifest(const fs::path& dir, json manifest) {
  manifest["tool"] = "ftm";
  manifest["version"] = kToolVersion;
  io::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

// ---------------------------------------------------------------- generate

struct GenerateFlags {
  std::uint64_t n = 0;
  PatetoFlags pareto;
  RuleFlags rule;
  double theta = 0.0;
  double target_edges = 0.0;
  std::string schedule;
  double D = 1.0;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  unsigned workers = 0;
  std::string from_manifest;
  CLI::Option* theta_opt = nullptr;
  CLI::Option* target_opt = nullptr;
  CLI::Option* schedule_opt = nullptr;
  CLI::Option* n_opt = nullptr;
};

void setup_generate(CLI::App* app, GenerateFlags& f) {
  f.n_opt = app->add_option("--n", f.n, "node count");
  add_pareto_flags(app, f.pareto);
  add_rule_flags(app, f.rule);
  f.theta_opt = app->add_option("--theta", f.theta, "threshold");
  f.target_opt = app->add_option("--target-edges", f.target_edges,
                                 "calibrate theta so the expected edge (arc) count hits this");
  f.schedule_opt = app->add_option("--schedule", f.schedule, "threshold schedule")
                       ->check(CLI::IsMember({"powerlaw"}));
  app->add_option("--D", f.D, "schedule constant: theta = D n^(1/a)")->capture_default_str();
  app->add_option("--seed", f.seed, "64-bit seed")->capture_default_str();
  app->add_option("--out-dir", f.out_dir, "output directory")->capture_default_str();
  app->add_option("--workers", f.workers, "worker threads (0 = all)")->capture_default_str();
  app->add_option("--from-manifest", f.from_manifest,
                  "regenerate from the config recorded in a manifest.json");
}

int cmd_generate(const GenerateFlags& f, std::ostream& out) {
  ModelConfig config;
  std::string theta_source;
  std::optional<double> target;
  if (!f.from_manifest.empty()) {
    const auto manifest = json::parse(io::read_file(f.from_manifest), nullptr, false);
    if (manifest.is_discarded()) throw ParseError("manifest is not valid JSON");
    config = config_from_json(manifest.value("config", json::object()));
    theta_source = "manifest";
  } else {
    const int sources = static_cast<int>(f.theta_opt->count() > 0) +
                        static_cast<int>(f.target_opt->count() > 0) +
                        static_cast<int>(f.schedule_opt->count() > 0);
    if (sources != 1)
      throw UsageError("generate needs exactly one of --theta, --target-edges, --schedule powerlaw");
    if (f.n_opt->count() == 0) throw UsageError("generate needs --n");
    config.n = f.n;
    config.d = f.pareto.d;
    config.pareto = ParetoParams(f.pareto.a, f.pareto.w0);
    config.seed = f.seed;
    double theta = 0.0;
    if (f.theta_opt->count() > 0) {
      theta = f.theta;
      theta_source = "explicit";
    } else if (f.target_opt->count() > 0) {
      target = f.target_edges;
      const auto probe = make_rule(f.rule, 0.0);
      config.rule = probe;
      config.require_analytic();
      if (probe.variant == Variant::Undirected) {
        theta = analytics::calibrate_theta(config.n, config.pareto, f.target_edges);
      } else if (probe.variant == Variant::Directed) {
        theta = analytics::calibrate_theta_directed(config.n, config.pareto, probe.alpha,
                                                    probe.beta, f.target_edges);
      } else {
        throw UnsupportedError("--target-edges is not available for the link-function variant");
      }
      theta_source = "calibrated";
    } else {
      theta = analytics::theta_powerlaw_schedule(static_cast<double>(config.n), f.D, config.pareto.a());
      theta_source = "schedule:powerlaw";
    }
    config.rule = make_rule(f.rule, theta);
  }
  config.validate();

  GenerateOptions options;
  options.workers = f.workers;
  options.max_edges = max_edges_from_env();
  const auto graph = generate(config, options);

  std::ostringstream nodes;
  io::write_nodes_tsv(nodes, graph.nodes);
  std::ostringstream edges;
  io::write_edges_tsv(edges, graph.edges);
  const fs::path dir(f.out_dir);
  fs::create_directories(dir);

  json manifest;
  manifest["command"] = "generate";
  manifest["config"] = config_json(config);
  manifest["theta_used"] = config.rule.theta;
  manifest["theta_source"] = theta_source;
  if (target) manifest["target_edges"] = *target;
  manifest["outputs"] = json::array({output_entry(dir, "nodes.tsv", nodes.str()),
                                     output_entry(dir, "edges.tsv", edges.str())});
  manifest["stats"] = {{"nodes", graph.nodes.size()},
                       {"edges", graph.edges.size()},
                       {"candidate_pairs", graph.stats.candidate_pairs},
                       {"workers", graph.stats.workers}};
  manifest["timing"] = {{"wall_seconds", graph.stats.wall_seconds}};
  if (config.d == 3 && config.rule.variant == Variant::Undirected && config.n >= 2) {
    manifest["expected_edges"] = analytics::expected_edges(config.n, config.pareto, config.rule.theta);
    manifest["sd_edges"] = std::sqrt(analytics::variance_edges(config.n, config.pareto, config.rule.theta));
  }
  write_manifest(dir, manifest);

  out << "nodes " << graph.nodes.size() << "\nedges " << graph.edges.size() << "\ntheta "
      << num(config.rule.theta) << "\n";
  if (manifest.contains("expected_edges"))
    out << "expected_edges " << num(manifest["expected_edges"].get<double>()) << "\nsd_edges "
        << num(manifest["sd_edges"].get<double>()) << "\n";
  out << "wrote " << (dir / "nodes.tsv").string() << ", " << (dir / "edges.tsv").string() << ", "
      << (dir / "manifest.json").string() << "\n";
  return 0;
}

// ------------------------------------------------------------------ oracle

struct OracleFlags {
  PatetoFlags pareto;
  double theta = 0.0;
  double w = 0.0;
  std::uint64_t n = 0;
  double D = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  std::string h = "identity";
};

int cmd_oracle(const std::string& op, const OracleFlags& f, std::ostream& out) {
  ModelConfig probe;
  probe.d = f.pareto.d;
  probe.pareto = ParetoParams(f.pareto.a, f.pareto.w0);
  probe.require_analytic();
  const auto& p = probe.pareto;

  json params{{"a", p.a()}, {"w0", p.w0()}};
  double value = 0.0;
  if (op == "pe") {
    value = analytics::p_edge(p, f.theta);
    params["theta"] = f.theta;
  } else if (op == "pew") {
    value = analytics::p_edge_given_weight(f.w, p, f.theta);
    params["theta"] = f.theta;
    params["w"] = f.w;
  } else if (op == "pwedge") {
    value = analytics::p_wedge(p, f.theta);
    params["theta"] = f.theta;
  } else if (op == "var") {
    value = analytics::variance_edges(f.n, p, f.theta);
    params["theta"] = f.theta;
    params["n"] = f.n;
  } else if (op == "em") {
    value = analytics::expected_edges(f.n, p, f.theta);
    params["theta"] = f.theta;
    params["n"] = f.n;
  } else if (op == "em-linlog") {
    value = analytics::expected_edges_linlog(f.n, f.D, p);
    params["n"] = f.n;
    params["D"] = f.D;
    params["theta"] = analytics::theta_powerlaw_schedule(static_cast<double>(f.n), f.D, p.a());
  } else if (op == "pew-directed") {
    value = analytics::p_edge_given_weight_directed(f.w, p, f.theta, f.alpha, f.beta);
    params.update({{"theta", f.theta}, {"w", f.w}, {"alpha", f.alpha}, {"beta", f.beta}});
  } else if (op == "pew-linkfn") {
    const auto h = LinkFn::parse(f.h);
    value = analytics::p_edge_given_weight_linkfn(f.w, p, f.theta, f.alpha, f.beta, h);
    params.update(
        {{"theta", f.theta}, {"w", f.w}, {"alpha", f.alpha}, {"beta", f.beta}, {"h", h.to_string()}});
  } else {
    throw UsageError("unknown oracle '" + op + "'");
  }
  out << num(value) << "\n";
  out << json{{"op", op}, {"params", params}, {"value", value}}.dump() << "\n";
  return 0;
}

// --------------------------------------------------------------- calibrate

struct CalibrateFlags {
  std::uint64_t n = 0;
  PatetoFlags pareto;
  RuleFlags rule;
  double target = 0.0;
  std::string out_dir;
};

int cmd_calibrate(const CalibrateFlags& f, std::ostream& out) {
  ModelConfig config;
  config.n = f.n;
  config.d = f.pareto.d;
  config.pareto = ParetoParams(f.pareto.a, f.pareto.w0);
  config.rule = make_rule(f.rule, 0.0);
  config.require_analytic();
  double theta = 0.0;
  double achieved = 0.0;
  if (config.rule.variant == Variant::Undirected) {
    theta = analytics::calibrate_theta(f.n, config.pareto, f.target);
    achieved = analytics::expected_edges(f.n, config.pareto, theta);
  } else if (config.rule.variant == Variant::Directed) {
    theta = analytics::calibrate_theta_directed(f.n, config.pareto, config.rule.alpha,
                                                config.rule.beta, f.target);
    achieved = analytics::expected_arcs(f.n, config.pareto, theta, config.rule.alpha, config.rule.beta);
  } else {
    throw UnsupportedError("calibration is not available for the link-function variant");
  }
  config.rule.theta = theta;
  out << "theta " << num(theta) << "\nexpected_edges " << num(achieved) << "\n";
  json result{{"command", "calibrate"},
              {"config", config_json(config)},
              {"target_edges", f.target},
              {"theta_used", theta},
              {"expected_edges", achieved}};
  out << result.dump() << "\n";
  if (!f.out_dir.empty()) {
    fs::create_directories(f.out_dir);
    result["outputs"] = json::array();
    write_manifest(f.out_dir, result);
  }
  return 0;
}

// ----------------------------------------------------------------- analyze

struct AnalyzeFlags {
  std::string edges;
  std::string degrees;
  bool directed = false;
  std::uint64_t n = 0;
  std::uint64_t x_min = 0;
  std::uint64_t bootstrap = 0;
  std::uint64_t seed = 0;
  std::uint64_t min_tail = 50;
  std::string out_dir;
  unsigned workers = 0;
};

json fit_json(const statfit::FitResult& r) {
  json j{{"alpha_hat", r.alpha_hat},
         {"x_min", r.x_min},
         {"ks_stat", r.ks_stat},
         {"n_tail", r.n_tail},
         {"n_samples", r.n_samples},
         {"n_zero", r.n_zero},
         {"alpha_continuous", r.alpha_continuous},
         {"x_min_scanned", r.x_min_scanned}};
  if (r.p_value) j["p_value"] = *r.p_value;
  if (r.p_std_error) j["p_std_error"] = *r.p_std_error;
  return j;
}

std::string ccdf_csv(const statfit::CcdfSeries& series) {
  std::ostringstream s;
  s << "k,ccdf\n";
  for (const auto& p : series) s << p.k << ',' << num(p.fraction) << '\n';
  return s.str();
}

int cmd_analyze(const AnalyzeFlags& f, std::ostream& out) {
  if (f.edges.empty() == f.degrees.empty())
    throw UsageError("analyze needs exactly one of --edges or --degrees");
  if (!f.degrees.empty() && f.directed)
    throw UsageError("--directed applies to edge lists only");

  std::vector<std::pair<std::string, std::vector<std::uint64_t>>> sets;
  if (!f.edges.empty()) {
    std::ifstream in(f.edges);
    if (!in) throw ParseError("cannot open " + f.edges);
    const auto edges = io::read_edges_tsv(in);
    std::uint64_t n = f.n;
    for (const auto& e : edges) n = std::max<std::uint64_t>(n, std::max(e.src, e.dst) + std::uint64_t{1});
    auto ds = degree_sequence(n, edges, f.directed);
    if (f.directed) {
      sets.emplace_back("out", std::move(ds.out_degrees));
      sets.emplace_back("in", std::move(ds.in_degrees));
    } else {
      sets.emplace_back("degree", std::move(ds.degrees));
    }
  } else {
    std::ifstream in(f.degrees);
    if (!in) throw ParseError("cannot open " + f.degrees);
    sets.emplace_back("degree", io::read_degrees(in));
  }

  statfit::FitOptions options;
  options.min_tail = f.min_tail;
  if (f.x_min > 0) options.x_min = f.x_min;

  json report = json::object();
  json outputs = json::array();
  for (const auto& [name, degrees] : sets) {
    auto fit = statfit::fit_degrees(degrees, options);
    if (f.bootstrap > 0) {
      const auto boot = statfit::gof_pvalue(degrees, fit, f.bootstrap, f.seed, f.workers);
      fit.p_value = boot.p_value;
      fit.p_std_error = boot.std_error;
    }
    auto j = fit_json(fit);
    if (f.bootstrap > 0) j["bootstrap_replicates"] = f.bootstrap;
    try {
      j["ccdf_slope_10_100"] = statfit::ccdf_loglog_slope(degrees, 10, 100);
    } catch (const DomainError&) {
    }
    report[name] = j;
    if (!f.out_dir.empty()) {
      const std::string file = sets.size() == 1 ? "ccdf.csv" : "ccdf_" + name + ".csv";
      outputs.push_back(output_entry(f.out_dir, file, ccdf_csv(statfit::ccdf(degrees))));
    }
  }
  if (!f.out_dir.empty()) {
    outputs.push_back(output_entry(f.out_dir, "fit.json", report.dump(2) + "\n"));
    write_manifest(f.out_dir, json{{"command", "analyze"},
                                   {"input", f.edges.empty() ? f.degrees : f.edges},
                                   {"outputs", outputs},
                                   {"seed", f.seed},
                                   {"bootstrap", f.bootstrap}});
  }
  out << report.dump(2) << "\n";
  return 0;
}

// ------------------------------------------------------------------ growth

struct GrowthFlags {
  std::string schedule = "powerlaw";
  double D = 1.0;
  std::string r_form = "linear";
  double r_coef = 1.0;
  double theta = 0.0;
  PatetoFlags pareto;
  std::vector<std::uint64_t> ns;
  std::uint64_t seeds = 10;
  std::uint64_t seed = 1;
  std::string out_dir;
  bool fit = false;
  unsigned workers = 0;
  std::string in;
};

json growth_fit_json(const growth::GrowthFit& g) {
  return json{{"c1", g.c1}, {"c2", g.c2}, {"residual", g.residual}};
}

json growth_fits(std::span<const growth::GrowthRecord> points) {
  return json{{"natural", growth_fit_json(growth::fit_growth_curve(points, growth::LogBase::Natural))},
              {"log10", growth_fit_json(growth::fit_growth_curve(points, growth::LogBase::Ten))},
              {"points", points.size()}};
}

int cmd_growth_fit(const GrowthFlags& f, std::ostream& out) {
  if (f.in.empty()) throw UsageError("growth fit needs --in");
  const auto series = growth::ingest_edge_count_series(f.in);
  out << growth_fits(series.records).dump(2) << "\n";
  return 0;
}

int cmd_growth(const GrowthFlags& f, std::ostream& out) {
  if (f.ns.empty()) throw UsageError("growth needs --ns");
  if (f.seeds == 0) throw UsageError("--seeds must be >= 1");
  ModelConfig base;
  base.d = f.pareto.d;
  base.pareto = ParetoParams(f.pareto.a, f.pareto.w0);
  base.rule = EdgeRule::undirected(0.0);

  analytics::GrowthSchedule schedule = analytics::GrowthSchedule::fixed(0.0);
  if (f.schedule == "powerlaw") {
    schedule = analytics::GrowthSchedule::power_law(f.D);
  } else if (f.schedule == "target") {
    const double c = f.r_coef;
    if (f.r_form == "linear") {
      schedule = analytics::GrowthSchedule::calibrated_target([c](double n) { return c * n; },
                                                              "R(n)=" + num(c) + "*n");
    } else {
      schedule = analytics::GrowthSchedule::calibrated_target(
          [c](double n) { return c * n * std::log(n); }, "R(n)=" + num(c) + "*n*ln(n)");
    }
  } else {
    schedule = analytics::GrowthSchedule::fixed(f.theta);
  }

  std::vector<std::uint64_t> seeds(f.seeds);
  for (std::uint64_t i = 0; i < f.seeds; ++i) seeds[i] = f.seed + i;
  growth::SweepOptions options;
  options.workers = f.workers;
  options.max_edges = max_edges_from_env();
  const auto ensemble = growth::run_growth_sweep(schedule, f.ns, base, seeds, options);

  std::ostringstream csv;
  csv << "seed,n,m,em,var,theta,m_over_em,z\n";
  for (const auto& s : ensemble) {
    for (const auto& r : s.records) {
      const double sd = std::sqrt(*r.var);
      csv << s.seed << ',' << r.n << ',' << num(r.m) << ',' << num(*r.em) << ',' << num(*r.var)
          << ',' << num(*r.theta) << ',' << num(r.m / *r.em) << ','
          << num(sd > 0.0 ? (r.m - *r.em) / sd : 0.0) << '\n';
    }
  }
  out << "# schedule " << schedule.label() << "\n" << csv.str();

  json outputs = json::array();
  if (!f.out_dir.empty()) {
    outputs.push_back(output_entry(f.out_dir, "growth.csv", csv.str()));
    for (const auto& s : ensemble) {
      std::ostringstream one;
      growth::write_series_csv(one, s);
      outputs.push_back(output_entry(f.out_dir, "series_seed" + std::to_string(s.seed) + ".csv", one.str()));
    }
  }

  if (ensemble.size() >= 20) {
    const auto rows = growth::concentration_report(ensemble);
    std::ostringstream conc;
    conc << "n,seeds,em,mean_m,sample_var,predicted_var,ratio,median_rel_dev,flagged\n";
    for (const auto& r : rows)
      conc << r.n << ',' << r.seeds << ',' << num(r.em) << ',' << num(r.mean_m) << ','
           << num(r.sample_var) << ',' << num(r.predicted_var) << ',' << num(r.ratio) << ','
           << num(r.median_rel_dev) << ',' << (r.flagged ? 1 : 0) << '\n';
    out << "# concentration\n" << conc.str();
    if (!f.out_dir.empty()) outputs.push_back(output_entry(f.out_dir, "concentration.csv", conc.str()));
  }

  if (f.fit) {
    std::vector<growth::GrowthRecord> means;
    for (std::size_t i = 0; i < f.ns.size(); ++i) {
      growth::GrowthRecord r;
      r.n = f.ns[i];
      for (const auto& s : ensemble) r.m += s.records[i].m;
      r.m /= static_cast<double>(ensemble.size());
      means.push_back(r);
    }
    const auto fits = growth_fits(means);
    out << "# fit\n" << fits.dump(2) << "\n";
    if (!f.out_dir.empty()) outputs.push_back(output_entry(f.out_dir, "growth_fit.json", fits.dump(2) + "\n"));
  }

  if (!f.out_dir.empty())
    write_manifest(f.out_dir, json{{"command", "growth"},
                                   {"schedule", schedule.label()},
                                   {"a", base.pareto.a()},
                                   {"w0", base.pareto.w0()},
                                   {"ns", f.ns},
                                   {"seeds", seeds},
                                   {"outputs", outputs},
                                   {"log", "natural"}});
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Factorization threshold network generator and analysis toolkit", "ftm"};
  // -h stays free so the link function can be spelled --h
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  GenerateFlags gen;
  auto* generate_cmd = app.add_subcommand("generate", "generate a graph");
  setup_generate(generate_cmd, gen);

  OracleFlags oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "evaluate closed-form probabilities");
  oracle_cmd->require_subcommand(1);
  const std::vector<std::pair<std::string, std::string>> ops{
      {"pe", "edge probability for a random pair"},
      {"pew", "edge probability given one weight (--w)"},
      {"pwedge", "probability a centre links to two random leaves"},
      {"var", "variance of the edge count (--n)"},
      {"em", "expected edge count (--n)"},
      {"em-linlog", "exact E M under theta = D n^(1/a) (--n, --D)"},
      {"pew-directed", "directed arc probability given the source weight"},
      {"pew-linkfn", "link-function edge probability given one weight"}};
  std::vector<CLI::App*> op_cmds;
  for (const auto& [op, help] : ops) {
    auto* sub = oracle_cmd->add_subcommand(op, help);
    add_pareto_flags(sub, oracle.pareto);
    sub->add_option("--theta", oracle.theta, "threshold");
    sub->add_option("--w", oracle.w, "node weight");
    sub->add_option("--n", oracle.n, "node count");
    sub->add_option("--D", oracle.D, "schedule constant");
    sub->add_option("--alpha", oracle.alpha, "source exponent");
    sub->add_option("--beta", oracle.beta, "target exponent");
    sub->add_option("--h", oracle.h, "link function");
    op_cmds.push_back(sub);
  }

  CalibrateFlags cal;
  auto* calibrate_cmd = app.add_subcommand("calibrate", "solve theta for an expected edge count");
  calibrate_cmd->add_option("--n", cal.n, "node count")->required();
  add_pareto_flags(calibrate_cmd, cal.pareto);
  add_rule_flags(calibrate_cmd, cal.rule);
  calibrate_cmd->add_option("--target-edges", cal.target, "expected edge (arc) count")->required();
  calibrate_cmd->add_option("--out-dir", cal.out_dir, "write manifest.json here");

  AnalyzeFlags an;
  auto* analyze_cmd = app.add_subcommand("analyze", "fit degree distributions");
  analyze_cmd->add_option("--edges", an.edges, "edge list TSV");
  analyze_cmd->add_option("--degrees", an.degrees, "degree file (one per line)");
  analyze_cmd->add_flag("--directed", an.directed, "fit out- and in-degrees separately");
  analyze_cmd->add_option("--n", an.n, "node count (default: max id + 1)");
  analyze_cmd->add_option("--x-min", an.x_min, "fixed x_min (default: scan)");
  analyze_cmd->add_option("--min-tail", an.min_tail, "minimum tail size")->capture_default_str();
  analyze_cmd->add_option("--bootstrap", an.bootstrap, "bootstrap replicates (0 = skip)")
      ->capture_default_str();
  analyze_cmd->add_option("--seed", an.seed, "bootstrap seed")->capture_default_str();
  analyze_cmd->add_option("--out-dir", an.out_dir, "write fit.json and CCDF CSV here");
  analyze_cmd->add_option("--workers", an.workers, "worker threads (0 = all)");

  GrowthFlags gr;
  auto* growth_cmd = app.add_subcommand("growth", "edge-growth sweeps and curve fits");
  growth_cmd->require_subcommand(0, 1);
  growth_cmd->add_option("--schedule", gr.schedule, "threshold schedule")
      ->check(CLI::IsMember({"powerlaw", "target", "fixed"}))
      ->capture_default_str();
  growth_cmd->add_option("--D", gr.D, "theta = D n^(1/a)")->capture_default_str();
  growth_cmd->add_option("--R-form", gr.r_form, "target form: linear (c n) or nlogn (c n ln n)")
      ->check(CLI::IsMember({"linear", "nlogn"}))
      ->capture_default_str();
  growth_cmd->add_option("--R-coef", gr.r_coef, "target coefficient c")->capture_default_str();
  growth_cmd->add_option("--theta", gr.theta, "threshold for --schedule fixed");
  add_pareto_flags(growth_cmd, gr.pareto);
  growth_cmd->add_option("--ns", gr.ns, "comma-separated node counts")->delimiter(',');
  growth_cmd->add_option("--seeds", gr.seeds, "number of seeds")->capture_default_str();
  growth_cmd->add_option("--seed", gr.seed, "first seed")->capture_default_str();
  growth_cmd->add_option("--out-dir", gr.out_dir, "write CSV outputs and manifest here");
  growth_cmd->add_flag("--fit", gr.fit, "fit c1 n ln n + c2 n to the per-n mean edge counts");
  growth_cmd->add_option("--workers", gr.workers, "worker threads (0 = all)");
  auto* growth_fit_cmd = growth_cmd->add_subcommand("fit", "fit a growth curve to a series CSV");
  growth_fit_cmd->add_option("--in", gr.in, "series CSV (header n,m[,em,var,theta])")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (generate_cmd->parsed()) return cmd_generate(gen, out);
    if (oracle_cmd->parsed()) {
      for (std::size_t i = 0; i < ops.size(); ++i)
        if (op_cmds[i]->parsed()) return cmd_oracle(ops[i].first, oracle, out);
    }
    if (calibrate_cmd->parsed()) return cmd_calibrate(cal, out);
    if (analyze_cmd->parsed()) return cmd_analyze(an, out);
    if (growth_cmd->parsed()) {
      if (growth_fit_cmd->parsed()) return cmd_growth_fit(gr, out);
      return cmd_growth(gr, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  } catch (const FeasibilityError& e) {
    err << "infeasible: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("ftm");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace ftm::cli
