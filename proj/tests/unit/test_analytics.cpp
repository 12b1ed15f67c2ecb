#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "ftm/analytics.hpp"
#include "ftm/errors.hpp"
#include "ftm/generator.hpp"
#include "ftm/statfit.hpp"
#include "support.hpp"

using namespace ftm;
using namespace ftm::analytics;
using ftm::test::rel_diff;

namespace {

// Adaptive Simpson; the callers split at known kinks so the integrand is
// smooth on each piece.
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
               double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  // the floor stops refinement once the estimate is at rounding level
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * std::max(tol, 1e-14 * std::abs(left + right)))
    return left + right + (left + right - whole) / 15.0;
  return simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

// Composite adaptive Simpson over panels no wider than 0.5 between the cuts;
// the absolute tolerance comes from a coarse first pass.
double integrate(const std::function<double(double)>& f, std::vector<double> cuts, double rel_tol = 1e-11) {
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> knots;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double len = cuts[i + 1] - cuts[i];
    if (!(len > 0.0)) continue;
    const int pieces = static_cast<int>(std::ceil(len / 0.5));
    for (int k = 0; k < pieces; ++k) knots.push_back(cuts[i] + len * k / pieces);
  }
  knots.push_back(cuts.back());

  struct Panel {
    double a, b, fa, fm, fb, whole;
  };
  std::vector<Panel> panels;
  double coarse = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    Panel p{knots[i], knots[i + 1], f(knots[i]), f(0.5 * (knots[i] + knots[i + 1])), f(knots[i + 1]), 0.0};
    p.whole = (p.b - p.a) / 6.0 * (p.fa + 4.0 * p.fm + p.fb);
    coarse += std::abs(p.whole);
    panels.push_back(p);
  }
  const double span = knots.back() - knots.front();
  double total = 0.0;
  for (const auto& p : panels) {
    const double tol = rel_tol * coarse * (p.b - p.a) / span + 1e-300;
    total += simpson(f, p.a, p.b, p.fa, p.fm, p.fb, p.whole, tol, 40);
  }
  return total;
}

double cap(double t) { return t >= 1.0 ? 0.0 : (t <= -1.0 ? 1.0 : 0.5 * (1.0 - t)); }

// Integrals over a Pareto weight are taken in x = ln(w/w0), where the
// density is a e^{-a x}; the integrand is smooth apart from the listed
// kinks and negligible past x = 40/a.
double pareto_integral(const ParetoParams& p, const std::function<double(double)>& g_of_w,
                       std::vector<double> kink_weights) {
  const double x_end = 40.0 / p.a();
  std::vector<double> cuts = {0.0, x_end};
  for (double wk : kink_weights) {
    const double x = std::log(wk / p.w0());
    if (x > 0.0 && x < x_end) cuts.push_back(x);
  }
  return integrate([&](double x) { return p.a() * std::exp(-p.a() * x) * g_of_w(p.w0() * std::exp(x)); },
                   cuts);
}

// P(edge | w) by direct integration over the partner weight.
double pew_integral(double w, const ParetoParams& p, double theta, double alpha, double beta) {
  const double wk = std::pow(theta / std::pow(w, alpha), 1.0 / beta);
  return pareto_integral(
      p, [&](double v) { return cap(theta / (std::pow(w, alpha) * std::pow(v, beta))); }, {wk});
}

double pe_integral(const ParetoParams& p, double theta) {
  return pareto_integral(p, [&](double w) { return pew_integral(w, p, theta, 1, 1); }, {theta / p.w0()});
}

double pwedge_integral(const ParetoParams& p, double theta) {
  return pareto_integral(
      p,
      [&](double w) {
        const double q = pew_integral(w, p, theta, 1, 1);
        return q * q;
      },
      {theta / p.w0()});
}

const ParetoParams kP3(3.0, 1.0);

}  // namespace

TEST_CASE("weighted edge probability examples") {
  for (double w : {1.0, 5.0, 1e4}) CHECK(p_edge_given_weight(w, kP3, 0.0) == 0.5);
  CHECK(p_edge_given_weight(2.0, kP3, 10.0) == doctest::Approx(0.001).epsilon(1e-13));
  CHECK(p_edge_given_weight(20.0, kP3, 10.0) == doctest::Approx(0.3125).epsilon(1e-13));
  CHECK(p_edge_given_weight(10.0, kP3, 10.0) == doctest::Approx(0.125).epsilon(1e-13));
  CHECK_THROWS_AS(p_edge_given_weight(0.5, kP3, 1.0), DomainError);
  CHECK_THROWS_AS(p_edge_given_weight(2.0, kP3, -1.0), DomainError);
}

TEST_CASE("closed forms match direct integration") {
  const std::vector<ParetoParams> params = {ParetoParams(3.0, 1.0), ParetoParams(2.2, 0.7),
                                            ParetoParams(1.5, 2.0)};
  for (const auto& p : params) {
    const double w0sq = p.w0() * p.w0();
    for (double t : {0.1, 0.5, 0.95, 1.0, 1.7, 10.0, 66.9}) {
      const double theta = t * w0sq;
      for (double wr : {1.0, 1.3, 4.0, 25.0})
        CHECK(p_edge_given_weight(wr * p.w0(), p, theta) ==
              doctest::Approx(pew_integral(wr * p.w0(), p, theta, 1, 1)).epsilon(1e-9));
      CHECK(p_edge(p, theta) == doctest::Approx(pe_integral(p, theta)).epsilon(1e-9));
      CHECK(p_wedge(p, theta) == doctest::Approx(pwedge_integral(p, theta)).epsilon(1e-9));
    }
  }
}

TEST_CASE("edge and wedge probability examples") {
  CHECK(p_edge(kP3, 0.0) == 0.5);
  CHECK(p_edge(kP3, 10.0) == doctest::Approx(1.08222e-3).epsilon(1e-5));
  CHECK(p_edge(kP3, 1.0) == doctest::Approx(0.21875).epsilon(1e-14));
  CHECK(p_wedge(kP3, 0.0) == 0.25);
  CHECK(p_wedge(kP3, 0.5) == doctest::Approx(0.1304688).epsilon(1e-6));
  CHECK(p_wedge(kP3, 10.0) == doctest::Approx(6.873e-5).epsilon(1e-3));
  CHECK(expected_edges(1, kP3, 3.0) == 0.0);
  CHECK(expected_edges(2, kP3, 0.0) == 0.5);
  CHECK(expected_edges(300'000, kP3, 66.9) == doctest::Approx(2.693e5).epsilon(2e-3));
}

TEST_CASE("variance examples") {
  CHECK(variance_edges(3, kP3, 0.0) == doctest::Approx(0.75).epsilon(1e-15));
  for (double theta : {0.3, 4.0, 40.0}) {
    const double pe = p_edge(kP3, theta);
    CHECK(variance_edges(2, kP3, theta) == doctest::Approx(pe * (1.0 - pe)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(variance_edges(1, kP3, 1.0), DomainError);
}

TEST_CASE("variance against a seed ensemble") {
  // The wedge term dominates at these sizes; counting each unordered pair of
  // adjacent edges once would halve it and put the ratio near 1.9.
  for (auto [n, theta] : std::vector<std::pair<std::uint64_t, double>>{{100, 10.0}, {60, 2.0}}) {
    ModelConfig c;
    c.n = n;
    c.rule = EdgeRule::undirected(theta);
    GenerateOptions o;
    o.workers = 1;
    constexpr int kSeeds = 20'000;
    double s1 = 0.0;
    double s2 = 0.0;
    for (int s = 1; s <= kSeeds; ++s) {
      c.seed = s;
      const auto m = static_cast<double>(generate(c, o).edges.size());
      s1 += m;
      s2 += m * m;
    }
    const double mean = s1 / kSeeds;
    const double var = (s2 - kSeeds * mean * mean) / (kSeeds - 1);
    const double ratio = var / variance_edges(n, kP3, theta);
    CHECK_MESSAGE(ratio >= 0.85, "n=" << n << " ratio " << ratio);
    CHECK_MESSAGE(ratio <= 1.15, "n=" << n << " ratio " << ratio);
  }
}

TEST_CASE("branch continuity") {
  for (double a : {0.7, 1.0, 2.0, 3.0, 5.5}) {
    for (double w0 : {0.5, 1.0, 3.0}) {
      const ParetoParams p(a, w0);
      const double b = w0 * w0;
      const double lo = std::nextafter(b, 0.0);
      CHECK(std::abs(p_edge(p, lo) - p_edge(p, b)) <= 1e-12);
      CHECK(std::abs(p_wedge(p, lo) - p_wedge(p, b)) <= 1e-12);
      for (double theta : {2.0 * b, 10.0 * b}) {
        const double wb = theta / w0;
        CHECK(std::abs(p_edge_given_weight(wb, p, theta) -
                       p_edge_given_weight(std::nextafter(wb, 0.0), p, theta)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("monotonicity and correlation positivity") {
  for (double a : {1.0, 2.0, 3.0}) {
    const ParetoParams p(a, 1.0);
    double last_pe = 1.0;
    double last_pw = 1.0;
    double last_pew = 1.0;
    for (double theta = 0.0; theta <= 200.0; theta = theta * 1.3 + 0.05) {
      const double pe = p_edge(p, theta);
      const double pw = p_wedge(p, theta);
      const double pew = p_edge_given_weight(3.0, p, theta);
      CHECK(pe < last_pe);
      CHECK(pw < last_pw);
      CHECK(pew < last_pew);
      CHECK(pw >= pe * pe);
      last_pe = pe;
      last_pw = pw;
      last_pew = pew;
      double prev = 0.0;
      for (double w = 1.0; w < 1e4; w *= 1.7) {
        const double v = p_edge_given_weight(w, p, theta);
        CHECK(v >= prev);
        CHECK(v <= 0.5);
        prev = v;
      }
    }
  }
}

TEST_CASE("calibration") {
  // closed-form branch: P_e = 1/4 at theta = 8/9 for a = 3, w0 = 1
  const std::uint64_t n = 100;
  const double pairs = n * (n - 1) / 2.0;
  CHECK(calibrate_theta(n, kP3, 0.25 * pairs) == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
  CHECK(p_edge(kP3, 8.0 / 9.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(calibrate_theta(n, kP3, 1237.5) == doctest::Approx(8.0 / 9.0).epsilon(1e-12));

  const double target = expected_edges(1000, kP3, 10.0);
  CHECK(std::abs(calibrate_theta(1000, kP3, target) - 10.0) <= 1e-9);

  CHECK(calibrate_theta(n, kP3, 0.5 * pairs * (1.0 - 1e-12)) < 1e-9);

  CHECK_THROWS_AS(calibrate_theta(1000, kP3, 300'000.0), FeasibilityError);
  CHECK_THROWS_AS(calibrate_theta(1000, kP3, 0.0), FeasibilityError);
  CHECK_THROWS_AS(calibrate_theta(1000, kP3, 1000.0 * 999.0 / 4.0), FeasibilityError);

  for (double pe = 1e-6; pe < 0.49; pe *= 1.9) {
    const double theta = calibrate_theta(n, kP3, pe * pairs);
    CHECK(rel_diff(p_edge(kP3, theta), pe) <= 1e-9);
  }
}

TEST_CASE("calibrated theta outgrows n^(1/a) for linear targets") {
  double last = 0.0;
  for (std::uint64_t n : {1'000ULL, 10'000ULL, 100'000ULL, 1'000'000ULL}) {
    const double ratio = calibrate_theta(n, kP3, static_cast<double>(n)) / std::cbrt(static_cast<double>(n));
    CHECK(ratio > last);
    last = ratio;
  }
}

TEST_CASE("power-law schedule and the linearithmic formula") {
  CHECK(theta_powerlaw_schedule(8, 1.0, 3.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(theta_powerlaw_schedule(3e5, 1.0, 3.0) == doctest::Approx(66.943).epsilon(1e-5));
  CHECK(theta_powerlaw_schedule(10, 2.0, 1.0) == doctest::Approx(20.0).epsilon(1e-15));

  CHECK(expected_edges_linlog(300'000, 1.0, kP3) == doctest::Approx(2.6928e5).epsilon(1e-4));
  for (double a : {1.5, 2.0, 3.0, 4.5}) {
    for (double D : {0.5, 1.0, 3.0}) {
      for (double w0 : {0.8, 1.0, 1.5}) {
        const ParetoParams p(a, w0);
        for (std::uint64_t n : {1'000ULL, 50'000ULL, 2'000'000ULL}) {
          if (D * std::pow(static_cast<double>(n), 1.0 / a) < w0 * w0) continue;
          const double general = expected_edges(n, p, theta_powerlaw_schedule(n, D, a));
          CHECK(rel_diff(expected_edges_linlog(n, D, p), general) <= 1e-12);
        }
      }
    }
  }
  CHECK_THROWS_AS(expected_edges_linlog(10, 0.1, kP3), DomainError);
  CHECK(linlog_leading_coefficient(1.0, kP3) == doctest::Approx(1.0 / 16.0));
  const double n = 1e8;
  CHECK(rel_diff(expected_edges_linlog(100'000'000, 1.0, kP3) / (n * std::log(n)), 1.0 / 16.0) <= 0.15);
}

TEST_CASE("directed weighted probability") {
  CHECK(p_edge_given_weight_directed(2.0, kP3, 10.0, 1.0, 2.0) == doctest::Approx(0.017889).epsilon(1e-4));
  for (double theta : {0.0, 0.4, 1.0, 7.0, 50.0})
    for (double w : {1.0, 2.0, 6.9, 7.0, 7.1, 100.0})
      CHECK(p_edge_given_weight_directed(w, kP3, theta, 1.0, 1.0) ==
            doctest::Approx(p_edge_given_weight(w, kP3, theta)).epsilon(1e-14));

  const std::vector<std::pair<double, double>> exps = {{1.0, 2.0}, {2.0, 1.0}, {0.5, 1.5}, {1.7, 0.8}};
  for (const auto& [al, be] : exps) {
    for (double theta : {0.5, 3.0, 25.0}) {
      const double ws = directed_branch_boundary(kP3, theta, al, be);
      CHECK(ws == doctest::Approx(std::pow(theta, 1.0 / al)));
      if (ws > 1.0) {
        CHECK(std::abs(p_edge_given_weight_directed(ws, kP3, theta, al, be) -
                       p_edge_given_weight_directed(std::nextafter(ws, 0.0), kP3, theta, al, be)) <= 1e-12);
      }
      for (double w : {1.0, 1.5, 3.0, 20.0})
        CHECK(p_edge_given_weight_directed(w, kP3, theta, al, be) ==
              doctest::Approx(pew_integral(w, kP3, theta, al, be)).epsilon(1e-9));
    }
  }
}

TEST_CASE("directed pair probability and arc calibration") {
  for (double theta : {0.3, 1.0, 4.0, 30.0}) {
    // swapping the exponents swaps the roles of the two random endpoints
    CHECK(p_edge_directed(kP3, theta, 1.0, 2.0) ==
          doctest::Approx(p_edge_directed(kP3, theta, 2.0, 1.0)).epsilon(1e-10));
    CHECK(p_edge_directed(kP3, theta, 1.0, 1.0) == doctest::Approx(p_edge(kP3, theta)).epsilon(1e-12));
    const double ws = directed_branch_boundary(kP3, theta, 1.0, 2.0);
    const double direct =
        pareto_integral(kP3, [&](double w) { return pew_integral(w, kP3, theta, 1.0, 2.0); }, {ws});
    CHECK(p_edge_directed(kP3, theta, 1.0, 2.0) == doctest::Approx(direct).epsilon(1e-9));
  }
  const double theta = calibrate_theta_directed(300'000, kP3, 1.0, 2.0, 3e5);
  CHECK(rel_diff(expected_arcs(300'000, kP3, theta, 1.0, 2.0), 3e5) <= 1e-10);
  CHECK_THROWS_AS(calibrate_theta_directed(100, kP3, 1.0, 2.0, 100.0 * 99.0 / 2.0), FeasibilityError);
}

TEST_CASE("link-function probability") {
  const std::vector<std::pair<double, double>> exps = {{1.0, 1.0}, {1.0, 2.0}, {2.0, 0.5}};
  for (const auto& [al, be] : exps)
    for (double theta : {0.2, 1.0, 10.0})
      for (double w : {1.0, 2.5, 40.0})
        CHECK(std::abs(p_edge_given_weight_linkfn(w, kP3, theta, al, be, LinkFn::identity()) -
                       p_edge_given_weight_directed(w, kP3, theta, al, be)) <= 1e-8);

  // h(t) = t^3 + 0.5 has r < 0 < q; h(t) = exp(t) has r > 0.
  for (const auto& h : {LinkFn::odd_power_plus_c(1, 0.5), LinkFn::exp()}) {
    double last = 1.0;
    for (double theta : {0.1, 1.0, 10.0, 1e3, 1e6}) {
      const double v = p_edge_given_weight_linkfn(2.0, kP3, theta, 1.0, 1.0, h);
      CHECK(v <= last);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      last = v;
    }
    CHECK(last < 1e-12);
  }
  // exp is positive everywhere, so a small enough threshold links every pair
  CHECK(p_edge_given_weight_linkfn(1.0, kP3, 0.2, 1.0, 1.0, LinkFn::exp()) == doctest::Approx(1.0));
  CHECK_THROWS_AS(p_edge_given_weight_linkfn(2.0, kP3, 1.0, 1.0, 1.0, LinkFn::even_power(1)),
                  UnsupportedError);
}

TEST_CASE("link-function probability against Monte-Carlo") {
  ModelConfig c;
  c.rule = EdgeRule::link_function(10.0, 1.0, 1.0, LinkFn::exp());
  const auto mc = statfit::mc_estimate({statfit::McKind::DirectedEdgeGivenWeight, 2.0}, c, 2'000'000, 17);
  const double exact = p_edge_given_weight_linkfn(2.0, kP3, 10.0, 1.0, 1.0, LinkFn::exp());
  CHECK(std::abs(mc.estimate - exact) <= 3.0 * mc.std_error);
}

TEST_CASE("closed forms against Monte-Carlo") {
  ModelConfig c;
  const std::uint64_t trials = 1'000'000;
  for (double theta : {0.0, 0.5, 2.0, 10.0}) {
    c.rule = EdgeRule::undirected(theta);
    const auto e = statfit::mc_estimate({statfit::McKind::Edge, 0.0}, c, trials, 1);
    const auto pe = p_edge(kP3, theta);
    CHECK(std::abs(e.estimate - pe) <= 3.0 * std::max(e.std_error, ftm::test::binomial_sigma(pe, trials)));
    const auto wg = statfit::mc_estimate({statfit::McKind::Wedge, 0.0}, c, trials, 2);
    const auto pw = p_wedge(kP3, theta);
    CHECK(std::abs(wg.estimate - pw) <= 3.0 * ftm::test::binomial_sigma(pw, trials));
    const auto ew = statfit::mc_estimate({statfit::McKind::EdgeGivenWeight, 2.0}, c, trials, 3);
    const auto pew = p_edge_given_weight(2.0, kP3, theta);
    CHECK(std::abs(ew.estimate - pew) <= 3.0 * ftm::test::binomial_sigma(pew, trials));
  }
}

TEST_CASE("degree pmf reference") {
  CHECK(degree_pmf_reference(1, 2.0) == doctest::Approx(6.0 / (std::numbers::pi * std::numbers::pi)).epsilon(1e-14));
  CHECK(degree_pmf_reference(1'000'000, 1.5) > 0.0);
  CHECK_THROWS_AS(degree_pmf_reference(1, 1.0), DomainError);
  CHECK_THROWS_AS(degree_pmf_reference(0, 2.0), DomainError);

  // exponent 3: tail past N is below 1 / (2 N^2)
  double sum = 0.0;
  for (std::uint64_t k = 1; k <= 100'000; ++k) sum += degree_pmf_reference(k, 3.0);
  CHECK(std::abs(sum - 1.0) <= 1e-8);
  // exponent 2: tail past N lies in [1/(N+1), 1/N] / zeta(2)
  const std::uint64_t N = 1'000'000;
  double s2 = 0.0;
  for (std::uint64_t k = N; k >= 1; --k) s2 += degree_pmf_reference(k, 2.0);
  const double z2 = std::numbers::pi * std::numbers::pi / 6.0;
  CHECK(std::abs(s2 + 1.0 / (N + 0.5) / z2 - 1.0) <= 1e-8);
}

TEST_CASE("growth schedules") {
  const auto pl = GrowthSchedule::power_law(1.0);
  CHECK(pl.theta(8, kP3) == doctest::Approx(2.0));
  const auto target = GrowthSchedule::calibrated_target([](double n) { return 5.0 * n; }, "5n");
  const double th = target.theta(10'000, kP3);
  CHECK(rel_diff(expected_edges(10'000, kP3, th), 5e4) <= 1e-10);
  CHECK(GrowthSchedule::fixed(3.5).theta(100, kP3) == 3.5);
  const auto dense = GrowthSchedule::calibrated_target([](double n) { return n * n; }, "n^2");
  CHECK_THROWS_AS(dense.validate_at(100, kP3), FeasibilityError);
  CHECK_THROWS_AS(GrowthSchedule::power_law(0.01).validate_at(10, kP3), DomainError);
}
