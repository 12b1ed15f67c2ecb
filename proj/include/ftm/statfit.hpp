#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ftm/model.hpp"
#include "ftm/rng.hpp"

namespace ftm::statfit {

struct CcdfPoint {
  std::uint64_t k = 0;
  double fraction = 0.0;  // fraction of samples with value >= k

  friend bool operator==(const CcdfPoint&, const CcdfPoint&) = default;
};
using CcdfSeries = std::vector<CcdfPoint>;

// Exact empirical CCDF over the distinct values present.
CcdfSeries ccdf(std::span<const std::uint64_t> degrees);

// Fraction of samples >= k (for any k, not only listed points).
double ccdf_at(std::span<const std::uint64_t> degrees, std::uint64_t k);

// Slope of log CCDF against log k between k_lo and k_hi.
double ccdf_loglog_slope(std::span<const std::uint64_t> degrees, std::uint64_t k_lo,
                         std::uint64_t k_hi);

struct FitResult {
  double alpha_hat = 0.0;
  std::uint64_t x_min = 1;
  double ks_stat = 0.0;
  std::optional<double> p_value;
  std::optional<double> p_std_error;
  std::uint64_t n_tail = 0;
  std::uint64_t n_samples = 0;  // positive samples considered
  std::uint64_t n_zero = 0;     // zero samples excluded before fitting
  // 1 + n / sum ln(x / (x_min - 1/2)), reported for comparison only.
  double alpha_continuous = 0.0;
  bool x_min_scanned = false;
};

struct FitOptions {
  std::optional<std::uint64_t> x_min;
  // x_min candidates must leave at least this many samples in the tail.
  std::uint64_t min_tail = 50;
};

// Discrete power-law MLE with Hurwitz-zeta normalization. Without a fixed
// x_min, scans candidate x_min values and keeps the one with the smallest
// KS distance. Samples must be positive.
FitResult fit_powerlaw_discrete(std::span<const std::uint64_t> samples,
                                const FitOptions& options = {});

// Drops zero degrees (recorded in n_zero) and fits the rest.
FitResult fit_degrees(std::span<const std::uint64_t> degrees, const FitOptions& options = {});

// KS distance between the samples' tail (>= x_min) and the discrete power
// law (alpha, x_min), taken over all integers >= x_min.
double ks_distance(std::span<const std::uint64_t> samples, double alpha, std::uint64_t x_min);

// Discrete power law P(X = k) = k^-alpha / zeta(alpha, x_min), k >= x_min.
class DiscretePowerLaw {
 public:
  DiscretePowerLaw(double alpha, std::uint64_t x_min);

  double alpha() const noexcept { return alpha_; }
  std::uint64_t x_min() const noexcept { return x_min_; }

  double pmf(std::uint64_t k) const;
  // P(X > k)
  double sf(std::uint64_t k) const;
  double cdf(std::uint64_t k) const { return 1.0 - sf(k); }

  // Exact inverse-CDF draw.
  std::uint64_t sample(RngStream& stream) const;

 private:
  double alpha_;
  std::uint64_t x_min_;
  double norm_;
  // table_[i] = P(X > x_min + i)
  std::vector<double> table_;
};

struct BootstrapResult {
  double p_value = 0.0;
  double std_error = 0.0;
  std::uint64_t replicates = 0;
  std::uint64_t failed = 0;  // synthetic sets that could not be fitted
};

// Semi-parametric bootstrap: synthetic sets keep the empirical body below
// x_min and redraw the tail from the fitted law; p is the fraction of
// synthetic KS distances >= the observed one. Replicate r uses substream
// (seed, r), so the result does not depend on `workers`.
BootstrapResult gof_pvalue(std::span<const std::uint64_t> samples, const FitResult& fit,
                           std::uint64_t n_bootstrap, std::uint64_t seed, unsigned workers = 0);

enum class McKind { Edge, EdgeGivenWeight, Wedge, DirectedEdgeGivenWeight };

struct McQuery {
  McKind kind = McKind::Edge;
  double weight = 0.0;  // for the *GivenWeight kinds
};

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
};

// Bernoulli Monte-Carlo estimate of an edge-event probability, drawing
// fresh random nodes per trial and applying the exact predicate of
// config.rule. Requires d = 3 and trials >= 10^4.
McEstimate mc_estimate(const McQuery& query, const ModelConfig& config, std::uint64_t trials,
                       std::uint64_t seed, unsigned workers = 0);

}  // namespace ftm::statfit
