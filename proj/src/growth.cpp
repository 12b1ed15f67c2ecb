#include "ftm/growth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ftm/errors.hpp"
#include "ftm/generator.hpp"
#include "ftm/parallel.hpp"

namespace ftm::growth {

void GrowthSeries::validate() const {
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (i > 0 && r.n <= records[i - 1].n)
      throw ValidationError("series n values must be strictly increasing (n=" +
                            std::to_string(r.n) + " after n=" + std::to_string(records[i - 1].n) +
                            ")");
    if (!(r.m >= 0.0)) throw ValidationError("edge count m must be >= 0");
    if (r.em && !(*r.em > 0.0)) throw ValidationError("expected edge count must be > 0");
  }
}

std::vector<GrowthSeries> run_growth_sweep(const analytics::GrowthSchedule& schedule,
                                           std::span<const std::uint64_t> ns,
                                           const ModelConfig& base,
                                           std::span<const std::uint64_t> seeds,
                                           const SweepOptions& options) {
  base.require_analytic();
  if (base.rule.variant != Variant::Undirected)
    throw UnsupportedError("growth sweeps use the undirected rule");
  if (ns.empty()) throw DomainError("sweep needs at least one n");
  for (std::size_t i = 1; i < ns.size(); ++i)
    if (ns[i] <= ns[i - 1]) throw DomainError("sweep n values must be strictly increasing");

  // Thresholds and moments first, so infeasibility surfaces before any work.
  std::vector<GrowthRecord> expected(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    schedule.validate_at(ns[i], base.pareto);
    const double theta = schedule.theta(ns[i], base.pareto);
    expected[i].n = ns[i];
    expected[i].theta = theta;
    expected[i].em = analytics::expected_edges(ns[i], base.pareto, theta);
    expected[i].var = ns[i] >= 2 ? analytics::variance_edges(ns[i], base.pareto, theta) : 0.0;
  }

  std::vector<GrowthSeries> out(seeds.size());
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    out[s].seed = seeds[s];
    out[s].records = expected;
  }
  const std::size_t cells = ns.size() * seeds.size();
  parallel_for(cells, options.workers, [&](std::size_t cell) {
    const std::size_t s = cell / ns.size();
    const std::size_t i = cell % ns.size();
    ModelConfig config = base;
    config.n = ns[i];
    config.seed = seeds[s];
    config.rule.theta = *expected[i].theta;
    const auto g = generate(config, GenerateOptions{1, options.max_edges});
    out[s].records[i].m = static_cast<double>(g.edges.size());
  });
  return out;
}

std::vector<ConcentrationRow> concentration_report(std::span<const GrowthSeries> ensemble,
                                                   std::size_t min_seeds) {
  if (ensemble.size() < min_seeds)
    throw ValidationError("concentration report needs at least " + std::to_string(min_seeds) +
                          " seeds (got " + std::to_string(ensemble.size()) + ")");
  const auto& first = ensemble.front().records;
  std::vector<ConcentrationRow> rows;
  for (std::size_t i = 0; i < first.size(); ++i) {
    ConcentrationRow row;
    row.n = first[i].n;
    row.seeds = ensemble.size();
    if (!first[i].em || !first[i].var)
      throw ValidationError("series records need em and var for a concentration report");
    row.em = *first[i].em;
    row.predicted_var = *first[i].var;
    std::vector<double> ms;
    std::vector<double> devs;
    for (const auto& series : ensemble) {
      if (series.records.size() != first.size() || series.records[i].n != row.n)
        throw ValidationError("ensemble series do not share the same n grid");
      ms.push_back(series.records[i].m);
      devs.push_back(std::abs(series.records[i].m - row.em) / row.em);
    }
    const auto k = static_cast<double>(ms.size());
    double mean = 0.0;
    for (double m : ms) mean += m;
    mean /= k;
    double ss = 0.0;
    for (double m : ms) ss += (m - mean) * (m - mean);
    row.mean_m = mean;
    row.sample_var = ss / (k - 1.0);
    row.ratio = row.predicted_var > 0.0 ? row.sample_var / row.predicted_var
                                        : (row.sample_var == 0.0 ? 1.0 : INFINITY);
    std::sort(devs.begin(), devs.end());
    const std::size_t h = devs.size() / 2;
    row.median_rel_dev = devs.size() % 2 ? devs[h] : 0.5 * (devs[h - 1] + devs[h]);
    row.flagged = !(row.ratio >= kVarianceRatioLow && row.ratio <= kVarianceRatioHigh);
    rows.push_back(row);
  }
  return rows;
}

GrowthFit fit_growth_curve(std::span<const GrowthRecord> points, LogBase base) {
  std::vector<std::uint64_t> distinct;
  for (const auto& p : points) distinct.push_back(p.n);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3)
    throw DomainError("growth-curve fit needs at least 3 distinct n values (got " +
                      std::to_string(distinct.size()) + ")");

  const double log_scale = base == LogBase::Natural ? 1.0 : 1.0 / std::log(10.0);
  auto f1 = [&](double n) { return n * std::log(n) * log_scale; };

  // Columns are scaled to unit norm before forming the normal equations.
  double s1 = 0.0;
  double s2 = 0.0;
  for (const auto& p : points) {
    const auto n = static_cast<double>(p.n);
    s1 += f1(n) * f1(n);
    s2 += n * n;
  }
  s1 = std::sqrt(s1);
  s2 = std::sqrt(s2);
  double a11 = 0.0;
  double a12 = 0.0;
  double a22 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  for (const auto& p : points) {
    const auto n = static_cast<double>(p.n);
    const double x1 = f1(n) / s1;
    const double x2 = n / s2;
    a11 += x1 * x1;
    a12 += x1 * x2;
    a22 += x2 * x2;
    b1 += x1 * p.m;
    b2 += x2 * p.m;
  }
  const double det = a11 * a22 - a12 * a12;
  if (!(det > 1e-14)) throw DomainError("growth-curve design is rank deficient");
  GrowthFit fit;
  fit.base = base;
  fit.c1 = (b1 * a22 - b2 * a12) / det / s1;
  fit.c2 = (a11 * b2 - a12 * b1) / det / s2;
  double rss = 0.0;
  for (const auto& p : points) {
    const auto n = static_cast<double>(p.n);
    const double r = p.m - fit.c1 * f1(n) - fit.c2 * n;
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / static_cast<double>(points.size()));
  return fit;
}

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, std::size_t line, const std::string& column) {
  const auto s = trim(field);
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (s.empty() || pos != s.size() || !std::isfinite(v))
    throw ParseError("column '" + column + "': not a number: '" + s + "'", line);
  return v;
}

}  // namespace

void write_series_csv(std::ostream& out, const GrowthSeries& series) {
  const bool full = !series.records.empty() &&
                    std::all_of(series.records.begin(), series.records.end(), [](const auto& r) {
                      return r.em && r.var && r.theta;
                    });
  out << "# provenance=" << (series.provenance == Provenance::Generated ? "generated" : "ingested")
      << " seed=" << series.seed << " log=natural\n";
  out << (full ? "n,m,em,var,theta\n" : "n,m\n");
  for (const auto& r : series.records) {
    out << r.n << ',' << num(r.m);
    if (full) out << ',' << num(*r.em) << ',' << num(*r.var) << ',' << num(*r.theta);
    out << '\n';
  }
}

GrowthSeries read_series_csv(std::istream& in) {
  GrowthSeries series;
  series.provenance = Provenance::Ingested;
  std::vector<std::string> columns;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto text = trim(raw);
    if (text.empty() || text.front() == '#') continue;
    const auto fields = split_csv(text);
    if (columns.empty()) {
      for (const auto& f : fields) columns.push_back(trim(f));
      const bool ok = columns.size() >= 2 && columns[0] == "n" && columns[1] == "m";
      if (!ok) throw ParseError("expected header 'n,m[,em,var,theta]'", line);
      for (std::size_t c = 2; c < columns.size(); ++c)
        if (columns[c] != "em" && columns[c] != "var" && columns[c] != "theta")
          throw ParseError("unknown column '" + columns[c] + "'", line);
      continue;
    }
    if (fields.size() != columns.size())
      throw ParseError("expected " + std::to_string(columns.size()) + " fields, got " +
                       std::to_string(fields.size()),
                       line);
    GrowthRecord r;
    const double n = parse_number(fields[0], line, "n");
    if (!(n >= 1.0) || n != std::floor(n) || n > 1.8e19)
      throw ParseError("column 'n': not a positive integer", line);
    r.n = static_cast<std::uint64_t>(n);
    r.m = parse_number(fields[1], line, "m");
    for (std::size_t c = 2; c < columns.size(); ++c) {
      const double v = parse_number(fields[c], line, columns[c]);
      if (columns[c] == "em") r.em = v;
      if (columns[c] == "var") r.var = v;
      if (columns[c] == "theta") r.theta = v;
    }
    if (!series.records.empty() && r.n <= series.records.back().n)
      throw ValidationError("line " + std::to_string(line) + ": n values must be strictly increasing");
    if (r.m < 0.0) throw ValidationError("line " + std::to_string(line) + ": m must be >= 0");
    series.records.push_back(r);
  }
  if (columns.empty()) throw ParseError("empty series file");
  if (series.records.empty()) throw ParseError("series file has a header but no data rows");
  series.validate();
  return series;
}

GrowthSeries ingest_edge_count_series(const std::filesystem::path& path, const std::string& format) {
  if (format != "csv") throw ParseError("unsupported series format '" + format + "'");
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_series_csv(in);
}

}  // namespace ftm::growth
