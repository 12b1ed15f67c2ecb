#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "ftm/model.hpp"

// Closed-form probabilities, moments and threshold schedules for the d = 3
// model. Callers holding a full ModelConfig should call
// ModelConfig::require_analytic() first; these functions only see the
// parameters they need.
namespace ftm::analytics {

// Probability that a node of weight w links to a random node.
double p_edge_given_weight(double w, const ParetoParams& pareto, double theta);

// Edge probability for a random pair.
double p_edge(const ParetoParams& pareto, double theta);

// n(n-1)/2 * p_edge
double expected_edges(std::uint64_t n, const ParetoParams& pareto, double theta);

// Probability that a random centre node links to two independent random
// leaves.
double p_wedge(const ParetoParams& pareto, double theta);

// Var(M) = C(n,2) Pe(1-Pe) + n (n-1)(n-2) (P_wedge - Pe^2). Requires n >= 2.
double variance_edges(std::uint64_t n, const ParetoParams& pareto, double theta);

// Threshold at which expected_edges(n, theta) equals target_edges. Throws
// FeasibilityError unless 0 < target_edges < n(n-1)/4.
double calibrate_theta(std::uint64_t n, const ParetoParams& pareto, double target_edges);

// D * n^(1/a)
double theta_powerlaw_schedule(double n, double D, double a);

// Exact E M(n) under theta(n) = D n^(1/a); valid for n >= w0^(2a) / D^a.
double expected_edges_linlog(std::uint64_t n, double D, const ParetoParams& pareto);

// Leading coefficient of expected_edges_linlog in n ln n:
// w0^(2a) / (4 D^a (a+1)).
double linlog_leading_coefficient(double D, const ParetoParams& pareto);

// Directed variant: probability that a node of weight w (source exponent
// alpha) has an arc to a random node (target exponent beta). Branches at
// w* = (theta / w0^beta)^(1/alpha).
double p_edge_given_weight_directed(double w, const ParetoParams& pareto, double theta,
                                    double alpha, double beta);
double directed_branch_boundary(const ParetoParams& pareto, double theta, double alpha,
                                double beta);

// Arc probability for a random ordered pair, and n(n-1) times it.
double p_edge_directed(const ParetoParams& pareto, double theta, double alpha, double beta);
double expected_arcs(std::uint64_t n, const ParetoParams& pareto, double theta, double alpha,
                     double beta);
// Inverse of expected_arcs in theta. Feasible for 0 < target < n(n-1)/2.
double calibrate_theta_directed(std::uint64_t n, const ParetoParams& pareto, double alpha,
                                double beta, double target_arcs);

// Link-function variant, by adaptive quadrature over the partner weight.
// Only strictly increasing h are supported.
double p_edge_given_weight_linkfn(double w, const ParetoParams& pareto, double theta,
                                  double alpha, double beta, const LinkFn& h);

// k^-exponent / zeta(exponent)
double degree_pmf_reference(std::uint64_t k, double exponent);

// Threshold as a function of network size.
class GrowthSchedule {
 public:
  enum class Kind { PowerLaw, CalibratedTarget, Fixed };

  // theta(n) = D n^(1/a)
  static GrowthSchedule power_law(double D);
  // theta(n) solves E M(n) = R(n)
  static GrowthSchedule calibrated_target(std::function<double(double)> target,
                                          std::string label);
  static GrowthSchedule fixed(double theta);

  Kind kind() const noexcept { return kind_; }
  double D() const noexcept { return value_; }
  const std::string& label() const noexcept { return label_; }

  double theta(std::uint64_t n, const ParetoParams& pareto) const;
  // Throws when theta(n) is undefined or infeasible at n.
  void validate_at(std::uint64_t n, const ParetoParams& pareto) const;

 private:
  Kind kind_ = Kind::Fixed;
  double value_ = 0.0;
  std::function<double(double)> target_;
  std::string label_;
};

}  // namespace ftm::analytics
