#include "ftm/statfit.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ftm/errors.hpp"
#include "ftm/parallel.hpp"
#include "ftm/zeta.hpp"

namespace ftm::statfit {

CcdfSeries ccdf(std::span<const std::uint64_t> degrees) {
  if (degrees.empty()) throw DomainError("CCDF of an empty sample");
  std::vector<std::uint64_t> sorted(degrees.begin(), degrees.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  CcdfSeries out;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    out.push_back({sorted[i], static_cast<double>(sorted.size() - i) / n});
    i = j;
  }
  return out;
}

double ccdf_at(std::span<const std::uint64_t> degrees, std::uint64_t k) {
  if (degrees.empty()) throw DomainError("CCDF of an empty sample");
  const auto count = std::count_if(degrees.begin(), degrees.end(),
                                   [k](std::uint64_t x) { return x >= k; });
  return static_cast<double>(count) / static_cast<double>(degrees.size());
}

double ccdf_loglog_slope(std::span<const std::uint64_t> degrees, std::uint64_t k_lo,
                         std::uint64_t k_hi) {
  if (k_lo < 1 || k_hi <= k_lo) throw DomainError("slope needs 1 <= k_lo < k_hi");
  const double lo = ccdf_at(degrees, k_lo);
  const double hi = ccdf_at(degrees, k_hi);
  if (lo <= 0.0 || hi <= 0.0) throw DomainError("CCDF vanishes inside the slope window");
  return std::log(hi / lo) / std::log(static_cast<double>(k_hi) / static_cast<double>(k_lo));
}

namespace {

// Distinct sorted values with suffix statistics, shared by every x_min
// candidate.
struct Prepared {
  std::vector<std::uint64_t> values;
  std::vector<std::uint64_t> tail_count;  // samples >= values[i]; one extra 0 slot
  std::vector<double> tail_log;           // sum of ln(x) over samples >= values[i]
  std::vector<double> log_value;
  std::uint64_t total = 0;
};

Prepared prepare(std::span<const std::uint64_t> samples) {
  if (samples.empty()) throw FitError("no samples to fit");
  std::vector<std::uint64_t> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == 0) throw DomainError("power-law samples must be positive");
  Prepared p;
  p.total = sorted.size();
  std::vector<std::uint64_t> counts;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    p.values.push_back(sorted[i]);
    counts.push_back(j - i);
    i = j;
  }
  const std::size_t m = p.values.size();
  p.log_value.resize(m);
  p.tail_count.assign(m + 1, 0);
  p.tail_log.assign(m + 1, 0.0);
  for (std::size_t i = m; i-- > 0;) {
    p.log_value[i] = std::log(static_cast<double>(p.values[i]));
    p.tail_count[i] = p.tail_count[i + 1] + counts[i];
    p.tail_log[i] = p.tail_log[i + 1] + static_cast<double>(counts[i]) * p.log_value[i];
  }
  return p;
}

constexpr double kAlphaMin = 1.0 + 1e-9;
constexpr double kAlphaMax = 50.0;

double mle_alpha(double n_tail, double sum_log, std::uint64_t x_min) {
  const double q = static_cast<double>(x_min);
  auto nll = [&](double a) { return n_tail * std::log(hurwitz_zeta(a, q)) + a * sum_log; };
  const auto best = boost::math::tools::brent_find_minima(nll, kAlphaMin, kAlphaMax, 30);
  if (best.first > kAlphaMax - 1e-3)
    throw FitDegenerateError("power-law exponent diverges; tail is too concentrated at x_min");
  return best.first;
}

// Exact sup over integers x >= x_min of |S(x) - P(X <= x)|, where the tail
// starts at values[first]. Between consecutive sample values S is flat and
// P rises, so checking x = v and x = v - 1 for each distinct v suffices.
// zeta(alpha, .) is carried downward by adding the skipped terms, with a
// fresh evaluation across long gaps.
double ks_tail(const Prepared& p, std::size_t first, double alpha, std::uint64_t x_min) {
  const double n_tail = static_cast<double>(p.tail_count[first]);
  const double norm = hurwitz_zeta(alpha, static_cast<double>(x_min));
  const std::size_t last = p.values.size() - 1;
  double zeta_above = hurwitz_zeta(alpha, static_cast<double>(p.values[last]) + 1.0);
  double d = 0.0;
  for (std::size_t j = last + 1; j-- > first;) {
    const std::uint64_t v = p.values[j];
    const double s_at = (n_tail - static_cast<double>(p.tail_count[j + 1])) / n_tail;
    d = std::max(d, std::abs(s_at - (1.0 - zeta_above / norm)));
    const double zeta_at = zeta_above + std::exp(-alpha * p.log_value[j]);
    if (v > x_min) {
      const double s_below = (n_tail - static_cast<double>(p.tail_count[j])) / n_tail;
      d = std::max(d, std::abs(s_below - (1.0 - zeta_at / norm)));
    }
    if (j == first) break;
    const std::uint64_t next = p.values[j - 1];
    const std::uint64_t gap = v - next - 1;
    if (gap <= 64) {
      zeta_above = zeta_at;
      for (std::uint64_t k = next + 1; k < v; ++k)
        zeta_above += std::pow(static_cast<double>(k), -alpha);
    } else {
      zeta_above = hurwitz_zeta(alpha, static_cast<double>(next) + 1.0);
    }
  }
  return std::min(1.0, d);
}

FitResult fit_at(const Prepared& p, std::size_t first, std::uint64_t x_min) {
  const std::uint64_t n_tail = p.tail_count[first];
  if (first + 1 >= p.values.size())
    throw FitDegenerateError("all tail samples are equal (" + std::to_string(p.values[first]) + ")");
  FitResult r;
  r.x_min = x_min;
  r.n_tail = n_tail;
  r.n_samples = p.total;
  r.alpha_hat = mle_alpha(static_cast<double>(n_tail), p.tail_log[first], x_min);
  r.ks_stat = ks_tail(p, first, r.alpha_hat, x_min);
  const double shifted = std::log(static_cast<double>(x_min) - 0.5);
  r.alpha_continuous =
      1.0 + static_cast<double>(n_tail) /
                (p.tail_log[first] - static_cast<double>(n_tail) * shifted);
  return r;
}

}  // namespace

FitResult fit_powerlaw_discrete(std::span<const std::uint64_t> samples, const FitOptions& options) {
  const auto p = prepare(samples);
  if (p.values.size() == 1)
    throw FitDegenerateError("all samples are equal (" + std::to_string(p.values[0]) + ")");

  if (options.x_min) {
    const std::uint64_t x_min = *options.x_min;
    if (x_min < 1) throw DomainError("x_min must be >= 1");
    const auto first = static_cast<std::size_t>(
        std::lower_bound(p.values.begin(), p.values.end(), x_min) - p.values.begin());
    if (first >= p.values.size() || p.tail_count[first] < options.min_tail)
      throw FitError("too few samples >= x_min=" + std::to_string(x_min) + " (need " +
                     std::to_string(options.min_tail) + ")");
    return fit_at(p, first, x_min);
  }

  std::optional<FitResult> best;
  for (std::size_t i = 0; i + 1 < p.values.size(); ++i) {
    if (p.tail_count[i] < options.min_tail) break;
    FitResult r;
    try {
      r = fit_at(p, i, p.values[i]);
    } catch (const FitDegenerateError&) {
      continue;
    }
    if (!best || r.ks_stat < best->ks_stat) best = r;
  }
  if (!best)
    throw FitError("too few tail samples: no x_min candidate leaves " +
                   std::to_string(options.min_tail) + " samples over two distinct values");
  best->x_min_scanned = true;
  return *best;
}

FitResult fit_degrees(std::span<const std::uint64_t> degrees, const FitOptions& options) {
  std::vector<std::uint64_t> positive;
  positive.reserve(degrees.size());
  for (auto k : degrees)
    if (k > 0) positive.push_back(k);
  auto r = fit_powerlaw_discrete(positive, options);
  r.n_zero = degrees.size() - positive.size();
  return r;
}

double ks_distance(std::span<const std::uint64_t> samples, double alpha, std::uint64_t x_min) {
  if (!(alpha > 1.0)) throw DomainError("power-law exponent must be > 1");
  if (x_min < 1) throw DomainError("x_min must be >= 1");
  const auto p = prepare(samples);
  const auto first = static_cast<std::size_t>(
      std::lower_bound(p.values.begin(), p.values.end(), x_min) - p.values.begin());
  if (first >= p.values.size()) throw FitError("no samples >= x_min");
  return ks_tail(p, first, alpha, x_min);
}

namespace {
constexpr std::size_t kTableSize = std::size_t{1} << 18;
constexpr std::uint64_t kSampleCap = std::uint64_t{1} << 62;
}  // namespace

DiscretePowerLaw::DiscretePowerLaw(double alpha, std::uint64_t x_min)
    : alpha_(alpha), x_min_(x_min) {
  if (!(alpha > 1.0)) throw DomainError("power-law exponent must be > 1");
  if (x_min < 1) throw DomainError("x_min must be >= 1");
  norm_ = hurwitz_zeta(alpha, static_cast<double>(x_min));
  table_.resize(kTableSize);
  const std::uint64_t top = x_min + kTableSize - 1;
  double tail = hurwitz_zeta(alpha, static_cast<double>(top) + 1.0);
  for (std::size_t i = kTableSize; i-- > 0;) {
    table_[i] = tail / norm_;
    tail += std::pow(static_cast<double>(x_min + i), -alpha);
  }
}

double DiscretePowerLaw::pmf(std::uint64_t k) const {
  if (k < x_min_) return 0.0;
  return std::pow(static_cast<double>(k), -alpha_) / norm_;
}

double DiscretePowerLaw::sf(std::uint64_t k) const {
  if (k < x_min_) return 1.0;
  const std::uint64_t i = k - x_min_;
  if (i < table_.size()) return table_[i];
  return hurwitz_zeta(alpha_, static_cast<double>(k) + 1.0) / norm_;
}

std::uint64_t DiscretePowerLaw::sample(RngStream& stream) const {
  const double v = 1.0 - stream.uniform();  // in (0, 1]
  // smallest k with P(X > k) <= v
  const auto it = std::partition_point(table_.begin(), table_.end(),
                                       [v](double s) { return s > v; });
  if (it != table_.end()) return x_min_ + static_cast<std::uint64_t>(it - table_.begin());
  std::uint64_t lo = x_min_ + table_.size() - 1;  // sf(lo) > v
  std::uint64_t hi = lo;
  do {
    lo = hi;
    hi = hi >= kSampleCap / 2 ? kSampleCap : 2 * hi;
  } while (hi < kSampleCap && sf(hi) > v);
  if (sf(hi) > v) return hi;
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (sf(mid) > v) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

BootstrapResult gof_pvalue(std::span<const std::uint64_t> samples, const FitResult& fit,
                           std::uint64_t n_bootstrap, std::uint64_t seed, unsigned workers) {
  if (n_bootstrap < 100) throw DomainError("bootstrap needs at least 100 replicates");
  if (!(fit.alpha_hat > 1.0) || fit.x_min < 1) throw DomainError("invalid fit result");
  std::vector<std::uint64_t> positive;
  std::vector<std::uint64_t> body;
  for (auto x : samples) {
    if (x == 0) continue;
    positive.push_back(x);
    if (x < fit.x_min) body.push_back(x);
  }
  const std::size_t n = positive.size();
  if (n == 0) throw FitError("no positive samples");
  const double p_tail = static_cast<double>(n - body.size()) / static_cast<double>(n);
  const DiscretePowerLaw law(fit.alpha_hat, fit.x_min);

  FitOptions options;
  if (!fit.x_min_scanned) options.x_min = fit.x_min;

  std::vector<signed char> outcome(n_bootstrap, -1);
  parallel_for(n_bootstrap, workers, [&](std::size_t r) {
    auto stream = RngStream::substream(seed, StreamDomain::Bootstrap, r);
    std::vector<std::uint64_t> synthetic(n);
    for (auto& x : synthetic) {
      if (body.empty() || stream.uniform() < p_tail) {
        x = law.sample(stream);
      } else {
        x = body[static_cast<std::size_t>(stream.uniform() * static_cast<double>(body.size()))];
      }
    }
    try {
      outcome[r] = fit_powerlaw_discrete(synthetic, options).ks_stat >= fit.ks_stat ? 1 : 0;
    } catch (const FitError&) {
      outcome[r] = -1;
    }
  });

  BootstrapResult result;
  std::uint64_t exceed = 0;
  for (auto o : outcome) {
    if (o < 0) {
      ++result.failed;
    } else {
      ++result.replicates;
      exceed += static_cast<std::uint64_t>(o);
    }
  }
  if (result.replicates == 0) throw FitError("every bootstrap replicate failed to fit");
  const auto reps = static_cast<double>(result.replicates);
  result.p_value = static_cast<double>(exceed) / reps;
  result.std_error = std::sqrt(result.p_value * (1.0 - result.p_value) / reps);
  return result;
}

namespace {

constexpr std::uint64_t kMcChunk = std::uint64_t{1} << 16;

struct Draw {
  double w;
  double x[3];
};

inline void draw_direction(RngStream& s, double* x) { sample_direction(s, 3, {x, 3}); }

inline Draw draw_node(RngStream& s, const ParetoParams& pareto) {
  Draw d{};
  d.w = sample_weight(s, pareto);
  draw_direction(s, d.x);
  return d;
}

inline bool arc(const Draw& u, const Draw& v, const EdgeRule& rule) {
  return edge_exists(u.w, {u.x, 3}, v.w, {v.x, 3}, rule);
}

}  // namespace

McEstimate mc_estimate(const McQuery& query, const ModelConfig& config, std::uint64_t trials,
                       std::uint64_t seed, unsigned workers) {
  config.require_analytic();
  if (trials < 10'000) throw DomainError("Monte-Carlo estimates need at least 10^4 trials");
  const auto& rule = config.rule;
  switch (query.kind) {
    case McKind::Edge: break;
    case McKind::EdgeGivenWeight:
      if (rule.variant == Variant::Directed)
        throw UnsupportedError("edge_given_weight with the directed rule; use directed_edge_given_weight");
      break;
    case McKind::DirectedEdgeGivenWeight:
      if (!rule.is_directed())
        throw UnsupportedError("directed_edge_given_weight needs a directed or link-function rule");
      break;
    case McKind::Wedge:
      if (rule.variant != Variant::Undirected)
        throw UnsupportedError("wedge estimates are defined for the undirected rule only");
      break;
  }
  const bool given_weight =
      query.kind == McKind::EdgeGivenWeight || query.kind == McKind::DirectedEdgeGivenWeight;
  if (given_weight && !(query.weight >= config.pareto.w0()))
    throw DomainError("conditioning weight must be >= w0");

  const std::uint64_t chunks = (trials + kMcChunk - 1) / kMcChunk;
  std::vector<std::uint64_t> hits(chunks, 0);
  parallel_for(chunks, workers, [&](std::size_t c) {
    auto s = RngStream::substream(seed, StreamDomain::MonteCarlo, c);
    const std::uint64_t count = std::min(kMcChunk, trials - c * kMcChunk);
    std::uint64_t local = 0;
    for (std::uint64_t t = 0; t < count; ++t) {
      switch (query.kind) {
        case McKind::Edge: {
          const Draw u = draw_node(s, config.pareto);
          const Draw v = draw_node(s, config.pareto);
          local += arc(u, v, rule);
          break;
        }
        case McKind::EdgeGivenWeight:
        case McKind::DirectedEdgeGivenWeight: {
          Draw u{};
          u.w = query.weight;
          draw_direction(s, u.x);
          const Draw v = draw_node(s, config.pareto);
          local += arc(u, v, rule);
          break;
        }
        case McKind::Wedge: {
          const Draw c0 = draw_node(s, config.pareto);
          const Draw y = draw_node(s, config.pareto);
          const Draw z = draw_node(s, config.pareto);
          local += arc(c0, y, rule) && arc(c0, z, rule);
          break;
        }
      }
    }
    hits[c] = local;
  });

  McEstimate est;
  est.trials = trials;
  for (auto h : hits) est.successes += h;
  est.estimate = static_cast<double>(est.successes) / static_cast<double>(trials);
  est.std_error = std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(trials));
  return est;
}

}  // namespace ftm::statfit
