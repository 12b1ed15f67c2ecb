#include "ftm/analytics.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "ftm/errors.hpp"
#include "ftm/zeta.hpp"

namespace ftm::analytics {

namespace {

void check_theta(double theta) {
  if (!(theta >= 0.0) || !std::isfinite(theta))
    throw DomainError("threshold theta must be finite and >= 0");
}

void check_weight(double w, const ParetoParams& pareto) {
  if (!(w >= pareto.w0()) || !std::isfinite(w))
    throw DomainError("weight w must be finite and >= w0");
}

void check_exponents(double alpha, double beta) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be positive");
}

double pair_count(std::uint64_t n) {
  const auto nd = static_cast<double>(n);
  return nd * (nd - 1.0) / 2.0;
}

std::string fmt(double x) {
  std::ostringstream out;
  out.precision(10);
  out << x;
  return out.str();
}

// Root of a strictly decreasing f with f(lo) >= target, expanding hi
// geometrically until f(hi) < target.
template <class F>
double invert_decreasing(F&& f, double target, double lo) {
  double hi = std::max(2.0 * lo, 1.0);
  int expansions = 0;
  while (f(hi) >= target) {
    lo = hi;
    hi *= 2.0;
    if (++expansions > 4000 || !std::isfinite(hi))
      throw NumericError("threshold bracket expansion did not terminate");
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) >= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // lo satisfies f >= target, hi does not; pick the closer one.
  return std::abs(f(lo) - target) <= std::abs(f(hi) - target) ? lo : hi;
}

void check_relative(double achieved, double target, double tol, const char* what) {
  if (std::abs(achieved - target) > tol * target)
    throw NumericError(std::string(what) + ": calibration missed target (achieved " +
                       fmt(achieved) + ", target " + fmt(target) + ")");
}

}  // namespace

double p_edge_given_weight(double w, const ParetoParams& pareto, double theta) {
  check_theta(theta);
  check_weight(w, pareto);
  const double a = pareto.a();
  const double w0 = pareto.w0();
  if (theta == 0.0) return 0.5;
  if (w > theta / w0) return 0.5 * (1.0 - a * theta / (w * (a + 1.0) * w0));
  return 0.5 * std::pow(w * w0 / theta, a) / (a + 1.0);
}

double p_edge(const ParetoParams& pareto, double theta) {
  check_theta(theta);
  const double a = pareto.a();
  const double w0sq = pareto.w0() * pareto.w0();
  const double k = a * a / ((a + 1.0) * (a + 1.0));
  if (theta < w0sq) return 0.5 - 0.5 * k * theta / w0sq;
  const double r = std::pow(w0sq / theta, a);
  return 0.5 * r * (a * std::log(theta / w0sq) / (a + 1.0) - k + 1.0);
}

double expected_edges(std::uint64_t n, const ParetoParams& pareto, double theta) {
  if (n < 1) throw DomainError("node count n must be >= 1");
  return pair_count(n) * p_edge(pareto, theta);
}

double p_wedge(const ParetoParams& pareto, double theta) {
  check_theta(theta);
  const double a = pareto.a();
  const double w0sq = pareto.w0() * pareto.w0();
  const double a1sq = (a + 1.0) * (a + 1.0);
  if (theta < w0sq) {
    const double t = theta / w0sq;
    return 0.25 - 0.5 * a * a * t / a1sq + 0.25 * a * a * a * t * t / (a1sq * (a + 2.0));
  }
  const double r = std::pow(w0sq / theta, a);
  return 0.25 * (r - r * r) / a1sq +
         0.25 * r * (1.0 - 2.0 * a * a / a1sq + a * a * a / (a1sq * (a + 2.0)));
}

double variance_edges(std::uint64_t n, const ParetoParams& pareto, double theta) {
  if (n < 2) throw DomainError("variance of the edge count requires n >= 2");
  const double pe = p_edge(pareto, theta);
  const double pw = p_wedge(pareto, theta);
  const auto nd = static_cast<double>(n);
  // n (n-1)(n-2) ordered (centre, leaf, leaf) triples: each unordered pair of
  // edges sharing a node enters the covariance sum twice.
  return pair_count(n) * pe * (1.0 - pe) + nd * (nd - 1.0) * (nd - 2.0) * (pw - pe * pe);
}

double calibrate_theta(std::uint64_t n, const ParetoParams& pareto, double target_edges) {
  if (n < 2) throw FeasibilityError("calibration needs n >= 2");
  const double pairs = pair_count(n);
  if (!(target_edges > 0.0) || !(target_edges < pairs / 2.0) || !std::isfinite(target_edges))
    throw FeasibilityError("infeasible edge target " + fmt(target_edges) + " for n=" +
                           std::to_string(n) +
                           ": any threshold gives 0 < E M < n(n-1)/4 = " + fmt(pairs / 2.0));
  const double p = target_edges / pairs;
  const double a = pareto.a();
  const double w0sq = pareto.w0() * pareto.w0();
  const double k = a * a / ((a + 1.0) * (a + 1.0));
  double theta = 0.0;
  if (p >= p_edge(pareto, w0sq)) {
    theta = std::min(w0sq, (0.5 - p) * 2.0 * w0sq / k);
  } else {
    theta = invert_decreasing([&](double t) { return p_edge(pareto, t); }, p, w0sq);
  }
  check_relative(expected_edges(n, pareto, theta), target_edges, 1e-10, "calibrate_theta");
  return theta;
}

double theta_powerlaw_schedule(double n, double D, double a) {
  if (!(D > 0.0)) throw DomainError("schedule constant D must be positive");
  if (!(n >= 1.0)) throw DomainError("node count n must be >= 1");
  if (!(a > 0.0)) throw DomainError("Pareto shape a must be positive");
  return D * std::pow(n, 1.0 / a);
}

double expected_edges_linlog(std::uint64_t n, double D, const ParetoParams& pareto) {
  if (!(D > 0.0)) throw DomainError("schedule constant D must be positive");
  const double a = pareto.a();
  const double w0 = pareto.w0();
  const auto nd = static_cast<double>(n);
  const double n_min = std::pow(w0, 2.0 * a) / std::pow(D, a);
  if (n < 1 || nd < n_min)
    throw DomainError("n=" + std::to_string(n) + " is below the linearithmic validity region n >= " +
                      fmt(n_min));
  const double a1 = a + 1.0;
  return (nd - 1.0) * std::pow(w0, 2.0 * a) / (4.0 * std::pow(D, a)) *
         (std::log(nd) / a1 - a * a / (a1 * a1) + 1.0 +
          a * (std::log(D) - 2.0 * std::log(w0)) / a1);
}

double linlog_leading_coefficient(double D, const ParetoParams& pareto) {
  const double a = pareto.a();
  return std::pow(pareto.w0(), 2.0 * a) / (4.0 * std::pow(D, a) * (a + 1.0));
}

double directed_branch_boundary(const ParetoParams& pareto, double theta, double alpha,
                                double beta) {
  check_theta(theta);
  check_exponents(alpha, beta);
  return std::pow(theta / std::pow(pareto.w0(), beta), 1.0 / alpha);
}

double p_edge_given_weight_directed(double w, const ParetoParams& pareto, double theta,
                                    double alpha, double beta) {
  check_weight(w, pareto);
  const double wstar = directed_branch_boundary(pareto, theta, alpha, beta);
  const double a = pareto.a();
  if (theta == 0.0) return 0.5;
  if (w > wstar)
    return 0.5 * (1.0 - a * theta / (std::pow(w, alpha) * (a + beta) * std::pow(pareto.w0(), beta)));
  // w^(a alpha/beta) w0^a / theta^(a/beta) == (w / w*)^(a alpha / beta)
  return 0.5 * beta / (a + beta) * std::pow(w / wstar, a * alpha / beta);
}

double p_edge_directed(const ParetoParams& pareto, double theta, double alpha, double beta) {
  const double wstar = directed_branch_boundary(pareto, theta, alpha, beta);
  if (theta == 0.0) return 0.5;
  const double a = pareto.a();
  const double w0 = pareto.w0();
  const double upper_factor = 1.0 - a * a / ((a + beta) * (a + alpha));
  if (wstar <= w0) {
    return 0.5 - 0.5 * a * a * theta / ((a + beta) * (a + alpha) * std::pow(w0, alpha + beta));
  }
  const double rho = w0 / wstar;
  const double log_rho = std::log(rho);
  const double gamma = a * alpha / beta;
  const double c = 0.5 * beta / (a + beta);
  const double rho_a = std::pow(rho, a);
  // integral of (w/w*)^gamma against the Pareto density on [w0, w*]
  const double shape = gamma - a;
  const double ratio = std::abs(shape) < 1e-300 ? -log_rho : -std::expm1(shape * log_rho) / shape;
  const double lower = a * c * rho_a * ratio;
  const double upper = 0.5 * rho_a * upper_factor;
  return lower + upper;
}

double expected_arcs(std::uint64_t n, const ParetoParams& pareto, double theta, double alpha,
                     double beta) {
  if (n < 1) throw DomainError("node count n must be >= 1");
  return 2.0 * pair_count(n) * p_edge_directed(pareto, theta, alpha, beta);
}

double calibrate_theta_directed(std::uint64_t n, const ParetoParams& pareto, double alpha,
                                double beta, double target_arcs) {
  check_exponents(alpha, beta);
  if (n < 2) throw FeasibilityError("calibration needs n >= 2");
  const double arcs = 2.0 * pair_count(n);
  if (!(target_arcs > 0.0) || !(target_arcs < arcs / 2.0) || !std::isfinite(target_arcs))
    throw FeasibilityError("infeasible arc target " + fmt(target_arcs) + " for n=" +
                           std::to_string(n) + ": any threshold gives 0 < E M < n(n-1)/2 = " +
                           fmt(arcs / 2.0));
  const double p = target_arcs / arcs;
  const double a = pareto.a();
  const double boundary = std::pow(pareto.w0(), alpha + beta);
  const double k = a * a / ((a + beta) * (a + alpha));
  double theta = 0.0;
  if (p >= p_edge_directed(pareto, boundary, alpha, beta)) {
    theta = std::min(boundary, (0.5 - p) * 2.0 * boundary / k);
  } else {
    theta = invert_decreasing([&](double t) { return p_edge_directed(pareto, t, alpha, beta); },
                              p, boundary);
  }
  check_relative(expected_arcs(n, pareto, theta, alpha, beta), target_arcs, 1e-10,
                 "calibrate_theta_directed");
  return theta;
}

double p_edge_given_weight_linkfn(double w, const ParetoParams& pareto, double theta,
                                  double alpha, double beta, const LinkFn& h) {
  check_theta(theta);
  check_weight(w, pareto);
  check_exponents(alpha, beta);
  if (!h.strictly_increasing())
    throw UnsupportedError("analytics need a strictly increasing link function (got " +
                           h.to_string() + ")");
  const double r = h.min_value();
  const double q = h.max_value();
  // Fraction of the sphere where h(cos) >= t.
  auto cap = [&](double t) {
    if (t > q) return 0.0;
    if (t <= r) return 1.0;
    return 0.5 * (1.0 - h.inverse(t));
  };
  // With u = (w0/w')^a the Pareto outer integral becomes the uniform
  // measure on (0, 1] and the cap argument is scale * u^(beta/a). A second
  // substitution s = u^(beta/a) makes that argument linear, scale * s, with
  // measure k s^(k-1) ds for k = a/beta.
  const double a = pareto.a();
  const double scale = theta / (std::pow(w, alpha) * std::pow(pareto.w0(), beta));
  if (scale == 0.0) return cap(0.0);
  const double k = a / beta;

  // Panel breaks where scale * s crosses r, q and h(0); h' may vanish at
  // h(0) (odd powers), which tanh-sinh treats as an endpoint singularity.
  std::vector<double> knots{0.0, 1.0};
  for (double level : {r, q, h(0.0)}) {
    const double s_level = level / scale;
    if (s_level > 0.0 && s_level < 1.0) knots.push_back(s_level);
  }
  std::sort(knots.begin(), knots.end());

  thread_local boost::math::quadrature::tanh_sinh<double> quad(15);
  double total = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double lo = knots[i];
    const double hi = knots[i + 1];
    if (hi <= lo) continue;
    const double t_mid = scale * 0.5 * (lo + hi);
    if (t_mid > q || t_mid <= r) {
      total += cap(t_mid) * (std::pow(hi, k) - std::pow(lo, k));
      continue;
    }
    double panel_error = 0.0;
    total += quad.integrate(
        [&](double s) { return s <= 0.0 ? 0.0 : cap(scale * s) * k * std::pow(s, k - 1.0); }, lo, hi,
        1e-13, &panel_error);
    error += panel_error;
  }
  if (error > 1e-8 * std::abs(total) && error > 1e-15)
    throw NumericError("link-function quadrature did not reach relative tolerance 1e-8 (estimate " + fmt(total) + ", error " + fmt(error) + ", w=" + fmt(w) + ", theta=" + fmt(theta) + ")");
  return total;
}

double degree_pmf_reference(std::uint64_t k, double exponent) {
  if (k < 1) throw DomainError("degree k must be >= 1");
  if (!(exponent > 1.0)) throw DomainError("power-law exponent must be > 1");
  return std::pow(static_cast<double>(k), -exponent) / riemann_zeta(exponent);
}

GrowthSchedule GrowthSchedule::power_law(double D) {
  if (!(D > 0.0) || !std::isfinite(D)) throw DomainError("schedule constant D must be positive");
  GrowthSchedule s;
  s.kind_ = Kind::PowerLaw;
  s.value_ = D;
  s.label_ = "powerlaw(D=" + fmt(D) + ")";
  return s;
}

GrowthSchedule GrowthSchedule::calibrated_target(std::function<double(double)> target,
                                                 std::string label) {
  if (!target) throw DomainError("calibrated schedule needs a target function");
  GrowthSchedule s;
  s.kind_ = Kind::CalibratedTarget;
  s.target_ = std::move(target);
  s.label_ = std::move(label);
  return s;
}

GrowthSchedule GrowthSchedule::fixed(double theta) {
  check_theta(theta);
  GrowthSchedule s;
  s.kind_ = Kind::Fixed;
  s.value_ = theta;
  s.label_ = "fixed(theta=" + fmt(theta) + ")";
  return s;
}

double GrowthSchedule::theta(std::uint64_t n, const ParetoParams& pareto) const {
  switch (kind_) {
    case Kind::PowerLaw: return theta_powerlaw_schedule(static_cast<double>(n), value_, pareto.a());
    case Kind::CalibratedTarget:
      return calibrate_theta(n, pareto, target_(static_cast<double>(n)));
    case Kind::Fixed: return value_;
  }
  return value_;
}

void GrowthSchedule::validate_at(std::uint64_t n, const ParetoParams& pareto) const {
  if (kind_ == Kind::PowerLaw) {
    const double n_min = std::pow(pareto.w0(), 2.0 * pareto.a()) / std::pow(value_, pareto.a());
    if (static_cast<double>(n) < n_min)
      throw DomainError("n=" + std::to_string(n) +
                        " is below the power-law schedule validity region n >= " + fmt(n_min));
  } else if (kind_ == Kind::CalibratedTarget) {
    (void)theta(n, pareto);
  }
}

}  // namespace ftm::analytics
