#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ftm/analytics.hpp"
#include "ftm/errors.hpp"
#include "ftm/rng.hpp"
#include "ftm/statfit.hpp"
#include "ftm/zeta.hpp"
#include "support.hpp"

using namespace ftm;
using namespace ftm::statfit;

namespace {

std::vector<std::uint64_t> draw(const DiscretePowerLaw& law, std::size_t n, std::uint64_t seed) {
  auto stream = RngStream::substream(seed, StreamDomain::Synthetic, 0);
  std::vector<std::uint64_t> out(n);
  for (auto& x : out) x = law.sample(stream);
  return out;
}

}  // namespace

TEST_CASE("ccdf examples") {
  const std::vector<std::uint64_t> ones = {1, 1, 1};
  CHECK(ccdf(ones) == CcdfSeries{{1, 1.0}});
  const std::vector<std::uint64_t> v = {1, 2, 4};
  const auto s = ccdf(v);
  REQUIRE(s.size() == 3);
  CHECK(s[0] == CcdfPoint{1, 1.0});
  CHECK(s[1].k == 2);
  CHECK(s[1].fraction == doctest::Approx(2.0 / 3.0));
  CHECK(s[2].fraction == doctest::Approx(1.0 / 3.0));
  CHECK(ccdf_at(v, 3) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(ccdf(std::vector<std::uint64_t>{}), DomainError);

  const auto big = draw(DiscretePowerLaw(2.2, 1), 5000, 4);
  const auto series = ccdf(big);
  CHECK(series.front().fraction == 1.0);
  for (std::size_t i = 1; i < series.size(); ++i) {
    CHECK(series[i].k > series[i - 1].k);
    CHECK(series[i].fraction < series[i - 1].fraction);
    CHECK(series[i].fraction == doctest::Approx(ccdf_at(big, series[i].k)));
  }
}

TEST_CASE("discrete power law distribution") {
  const DiscretePowerLaw law(2.5, 3);
  CHECK(law.pmf(2) == 0.0);
  CHECK(law.pmf(3) == doctest::Approx(std::pow(3.0, -2.5) / hurwitz_zeta(2.5, 3.0)));
  CHECK(law.sf(2) == doctest::Approx(1.0));
  double acc = 0.0;
  for (std::uint64_t k = 3; k < 50; ++k) {
    acc += law.pmf(k);
    CHECK(law.cdf(k) == doctest::Approx(acc).epsilon(1e-12));
  }
  // far beyond the lookup table
  CHECK(law.sf(10'000'000) == doctest::Approx(hurwitz_zeta(2.5, 10'000'001.0) / hurwitz_zeta(2.5, 3.0)));

  const auto xs = draw(law, 200'000, 8);
  std::vector<double> freq(6, 0.0);
  for (auto x : xs) {
    REQUIRE(x >= 3);
    if (x < 9) freq[x - 3] += 1.0;
  }
  for (std::uint64_t k = 3; k < 9; ++k) {
    const double p = law.pmf(k);
    CHECK(std::abs(freq[k - 3] / xs.size() - p) <= 3.0 * test::binomial_sigma(p, xs.size()));
  }
  // the heavy tail must be reachable, with the right frequency
  const double far = static_cast<double>(std::count_if(xs.begin(), xs.end(), [](auto x) { return x >= 1'000; }));
  const double p_far = law.sf(999);
  CHECK(far > 0.0);
  CHECK(std::abs(far / xs.size() - p_far) <= 3.0 * test::binomial_sigma(p_far, xs.size()));
}

TEST_CASE("fit recovers the exponent of exact power-law samples") {
  const auto xs = draw(DiscretePowerLaw(2.5, 1), 100'000, 1);
  FitOptions fixed;
  fixed.x_min = 1;
  const auto f = fit_powerlaw_discrete(xs, fixed);
  CHECK(std::abs(f.alpha_hat - 2.5) <= 0.02);
  CHECK(f.n_tail == 100'000);
  CHECK_FALSE(f.x_min_scanned);

  for (double alpha : {1.5, 2.0, 2.5, 3.0}) {
    const auto ys = draw(DiscretePowerLaw(alpha, 5), 100'000, 7);
    const auto g = fit_powerlaw_discrete(ys);
    CHECK_MESSAGE(std::abs(g.alpha_hat - alpha) <= 0.05, "alpha=" << alpha << " got " << g.alpha_hat);
    CHECK(g.x_min_scanned);
    CHECK(g.ks_stat >= 0.0);
    CHECK(g.ks_stat <= 1.0);
    CHECK(std::abs(g.alpha_continuous - alpha) <= 0.2);
  }
}

TEST_CASE("fit on a body plus tail finds the tail") {
  // geometric body below 20, power law from 20 up
  const auto tail = draw(DiscretePowerLaw(2.3, 20), 20'000, 3);
  std::vector<std::uint64_t> xs(tail.begin(), tail.end());
  RngStream s(5);
  std::geometric_distribution<int> geo(0.3);
  for (int i = 0; i < 20'000; ++i) xs.push_back(1 + std::min(18, geo(s)));
  const auto f = fit_powerlaw_discrete(xs);
  CHECK(f.x_min >= 15);
  CHECK(f.x_min <= 25);
  CHECK(std::abs(f.alpha_hat - 2.3) <= 0.1);
}

TEST_CASE("fit errors") {
  const std::vector<std::uint64_t> sevens(500, 7);
  CHECK_THROWS_AS(fit_powerlaw_discrete(sevens), FitDegenerateError);
  const std::vector<std::uint64_t> few = {1, 2, 3, 4, 5};
  CHECK_THROWS_AS(fit_powerlaw_discrete(few), FitError);
  std::vector<std::uint64_t> with_zero(100, 1);
  with_zero[3] = 0;
  CHECK_THROWS_AS(fit_powerlaw_discrete(with_zero), DomainError);

  auto degrees = draw(DiscretePowerLaw(2.0, 1), 1000, 2);
  degrees.insert(degrees.end(), 37, 0);
  const auto f = fit_degrees(degrees);
  CHECK(f.n_zero == 37);
  CHECK(f.n_samples == 1000);
}

TEST_CASE("ks distance") {
  const auto xs = draw(DiscretePowerLaw(2.0, 1), 50'000, 9);
  CHECK(ks_distance(xs, 2.0, 1) < 0.01);
  CHECK(ks_distance(xs, 3.0, 1) > 0.1);
  const std::vector<std::uint64_t> one = {1};
  CHECK(ks_distance(one, 2.0, 1) == doctest::Approx(1.0 - 1.0 / riemann_zeta(2.0)));
}

TEST_CASE("bootstrap accepts samples from the fitted law") {
  int accepted = 0;
  constexpr int kRepeats = 40;
  for (int r = 0; r < kRepeats; ++r) {
    const auto xs = draw(DiscretePowerLaw(2.2, 2), 3000, 1000 + r);
    const auto f = fit_powerlaw_discrete(xs);
    const auto b = gof_pvalue(xs, f, 100, r);
    CHECK(b.p_value >= 0.0);
    CHECK(b.p_value <= 1.0);
    accepted += b.p_value > 0.05 ? 1 : 0;
  }
  CHECK(accepted >= 36);
}

TEST_CASE("bootstrap rejects geometric samples") {
  RngStream s(77);
  std::geometric_distribution<int> geo(0.1);
  std::vector<std::uint64_t> xs(100'000);
  for (auto& x : xs) x = 1 + static_cast<std::uint64_t>(geo(s));
  const auto f = fit_powerlaw_discrete(xs);
  const auto b = gof_pvalue(xs, f, 100, 5);
  CHECK(b.p_value < 0.05);
  CHECK(b.replicates + b.failed == 100);
}

TEST_CASE("bootstrap is worker-count independent") {
  const auto xs = draw(DiscretePowerLaw(2.0, 1), 2000, 6);
  const auto f = fit_powerlaw_discrete(xs);
  const auto a = gof_pvalue(xs, f, 100, 3, 1);
  const auto b = gof_pvalue(xs, f, 100, 3, 4);
  CHECK(a.p_value == b.p_value);
  CHECK(a.std_error == doctest::Approx(std::sqrt(a.p_value * (1 - a.p_value) / a.replicates)));
  CHECK_THROWS_AS(gof_pvalue(xs, f, 99, 3), DomainError);
}

TEST_CASE("monte-carlo estimator") {
  ModelConfig c;
  c.rule = EdgeRule::undirected(0.0);
  const auto half = mc_estimate({McKind::Edge, 0.0}, c, 100'000, 1);
  CHECK(std::abs(half.estimate - 0.5) <= 3.0 * half.std_error);
  CHECK(half.trials == 100'000);
  CHECK(half.std_error == doctest::Approx(std::sqrt(half.estimate * (1 - half.estimate) / 1e5)));

  c.rule = EdgeRule::undirected(10.0);
  const auto a = mc_estimate({McKind::Edge, 0.0}, c, 200'000, 4, 1);
  const auto b = mc_estimate({McKind::Edge, 0.0}, c, 200'000, 4, 3);
  CHECK(a.successes == b.successes);

  CHECK_THROWS_AS(mc_estimate({McKind::Edge, 0.0}, c, 100, 1), DomainError);
  CHECK_THROWS_AS(mc_estimate({McKind::DirectedEdgeGivenWeight, 2.0}, c, 10'000, 1), UnsupportedError);
  CHECK_THROWS_AS(mc_estimate({McKind::EdgeGivenWeight, 0.5}, c, 10'000, 1), DomainError);
  c.rule = EdgeRule::directed(10.0, 1.0, 2.0);
  CHECK_THROWS_AS(mc_estimate({McKind::EdgeGivenWeight, 2.0}, c, 10'000, 1), UnsupportedError);
  CHECK_THROWS_AS(mc_estimate({McKind::Wedge, 0.0}, c, 10'000, 1), UnsupportedError);
  c.d = 4;
  CHECK_THROWS_AS(mc_estimate({McKind::Edge, 0.0}, c, 10'000, 1), UnsupportedError);
}

TEST_CASE("directed weighted probability against Monte-Carlo") {
  ModelConfig c;
  c.rule = EdgeRule::directed(10.0, 1.0, 2.0);
  const auto e = mc_estimate({McKind::DirectedEdgeGivenWeight, 2.0}, c, 1'000'000, 12);
  const double p = analytics::p_edge_given_weight_directed(2.0, c.pareto, 10.0, 1.0, 2.0);
  CHECK(std::abs(e.estimate - p) <= 3.0 * test::binomial_sigma(p, 1e6));
}
