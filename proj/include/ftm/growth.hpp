#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ftm/analytics.hpp"
#include "ftm/model.hpp"

namespace ftm::growth {

enum class Provenance { Generated, Ingested };

struct GrowthRecord {
  std::uint64_t n = 0;
  double m = 0.0;  // observed edges
  std::optional<double> em;
  std::optional<double> var;
  std::optional<double> theta;

  friend bool operator==(const GrowthRecord&, const GrowthRecord&) = default;
};

struct GrowthSeries {
  std::vector<GrowthRecord> records;
  Provenance provenance = Provenance::Generated;
  std::uint64_t seed = 0;

  // n strictly increasing, m >= 0, em > 0 where present.
  void validate() const;
};

struct SweepOptions {
  unsigned workers = 0;
  std::uint64_t max_edges = 100'000'000;
};

// One series per seed: at every n the graph is regenerated from scratch at
// theta(n), so node i keeps its latent vector across the sweep.
std::vector<GrowthSeries> run_growth_sweep(const analytics::GrowthSchedule& schedule,
                                           std::span<const std::uint64_t> ns,
                                           const ModelConfig& base,
                                           std::span<const std::uint64_t> seeds,
                                           const SweepOptions& options = {});

struct ConcentrationRow {
  std::uint64_t n = 0;
  std::size_t seeds = 0;
  double em = 0.0;
  double mean_m = 0.0;
  double sample_var = 0.0;
  double predicted_var = 0.0;
  double ratio = 0.0;             // sample_var / predicted_var
  double median_rel_dev = 0.0;    // median of |m - em| / em
  bool flagged = false;           // ratio outside [0.5, 2]
};

inline constexpr double kVarianceRatioLow = 0.5;
inline constexpr double kVarianceRatioHigh = 2.0;

// Requires at least `min_seeds` series sharing the same n grid, each with
// em and var recorded.
std::vector<ConcentrationRow> concentration_report(std::span<const GrowthSeries> ensemble,
                                                   std::size_t min_seeds = 20);

enum class LogBase { Natural, Ten };

struct GrowthFit {
  double c1 = 0.0;  // coefficient of n log n
  double c2 = 0.0;  // coefficient of n
  double residual = 0.0;  // RMS
  LogBase base = LogBase::Natural;
};

// Least squares m ~ c1 n log n + c2 n over the two basis functions.
GrowthFit fit_growth_curve(std::span<const GrowthRecord> points, LogBase base = LogBase::Natural);

void write_series_csv(std::ostream& out, const GrowthSeries& series);
GrowthSeries read_series_csv(std::istream& in);
// format: "csv" is the only supported format.
GrowthSeries ingest_edge_count_series(const std::filesystem::path& path,
                                      const std::string& format = "csv");

}  // namespace ftm::growth
