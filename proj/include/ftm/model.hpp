#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ftm/rng.hpp"

namespace ftm {

// Pareto(a, w0): density a/w0 * (w0/w)^(a+1) on [w0, inf).
class ParetoParams {
 public:
  ParetoParams(double a, double w0);

  double a() const noexcept { return a_; }
  double w0() const noexcept { return w0_; }

  // P(W > t).
  double survival(double t) const noexcept;

 private:
  double a_;
  double w0_;
};

struct Node {
  std::uint64_t id = 0;
  double weight = 0.0;
  std::vector<double> direction;

  // weight * direction
  std::vector<double> latent() const;
};

// Transform applied to the direction dot product in the link-function
// variant. Defined on [-1, 1].
class LinkFn {
 public:
  enum class Kind { Identity, Exp, OddPowerPlusC, EvenPower };

  LinkFn() = default;
  static LinkFn identity() { return LinkFn(Kind::Identity, 0, 0.0); }
  static LinkFn exp() { return LinkFn(Kind::Exp, 0, 0.0); }
  // t^(2m+1) + c
  static LinkFn odd_power_plus_c(int m, double c);
  // t^(2m)
  static LinkFn even_power(int m);

  // Accepts identity | exp | oddpow:m:c | evenpow:m.
  static LinkFn parse(const std::string& text);
  std::string to_string() const;

  Kind kind() const noexcept { return kind_; }
  int m() const noexcept { return m_; }
  double c() const noexcept { return c_; }

  double operator()(double t) const noexcept;

  bool strictly_increasing() const noexcept { return kind_ != Kind::EvenPower; }

  // Range bounds over [-1, 1].
  double min_value() const noexcept;
  double max_value() const noexcept;

  // h^{-1}(y) for y in [h(-1), h(1)], by bisection to 1e-12.
  // Throws UnsupportedError for non-monotone kinds and DomainError outside
  // the range.
  double inverse(double y) const;

  friend bool operator==(const LinkFn&, const LinkFn&) = default;

 private:
  LinkFn(Kind kind, int m, double c) : kind_(kind), m_(m), c_(c) {}

  Kind kind_ = Kind::Identity;
  int m_ = 0;
  double c_ = 0.0;
};

enum class Variant { Undirected, Directed, LinkFunction };

std::string to_string(Variant v);
Variant parse_variant(const std::string& text);

struct EdgeRule {
  Variant variant = Variant::Undirected;
  double theta = 0.0;
  double alpha = 1.0;
  double beta = 1.0;
  LinkFn h;

  static EdgeRule undirected(double theta);
  static EdgeRule directed(double theta, double alpha, double beta);
  static EdgeRule link_function(double theta, double alpha, double beta, LinkFn h);

  bool is_directed() const noexcept { return variant != Variant::Undirected; }

  // Throws DomainError when theta < 0 or alpha/beta <= 0.
  void validate() const;
};

struct ModelConfig {
  std::uint64_t n = 1;
  int d = 3;
  ParetoParams pareto{3.0, 1.0};
  EdgeRule rule;
  std::uint64_t seed = 0;

  void validate() const;
  // Analytic operations are only defined for d = 3.
  void require_analytic() const;
};

// Inverse-CDF transform of u in [0, 1).
double pareto_from_uniform(double u, const ParetoParams& pareto) noexcept;

double sample_weight(RngStream& stream, const ParetoParams& pareto);

// Uniform point on S^{d-1}. For d = 3: z ~ U[-1,1], azimuth ~ U[0, 2pi).
// Otherwise a normalized vector of standard normals.
void sample_direction(RngStream& stream, int d, std::span<double> out);
std::vector<double> sample_direction(RngStream& stream, int d);

// Node `id` drawn from its own substream of `seed`, so it does not depend
// on how many other nodes exist.
Node sample_node(std::uint64_t seed, std::uint64_t id, int d, const ParetoParams& pareto);

double dot(std::span<const double> x, std::span<const double> y);

// Core comparison shared by every variant: `scale` is wu^alpha * wv^beta
// (wu * wv for the undirected rule) and `cosine` the direction dot product.
inline bool edge_condition(double scale, double cosine, const EdgeRule& rule) noexcept {
  const double lhs = rule.variant == Variant::LinkFunction ? scale * rule.h(cosine) : scale * cosine;
  return lhs >= rule.theta;
}

// Arc u -> v for the directed variants (u carries alpha, v carries beta).
bool edge_exists(double wu, std::span<const double> xu, double wv, std::span<const double> xv,
                 const EdgeRule& rule);
bool edge_exists(const Node& u, const Node& v, const EdgeRule& rule);

}  // namespace ftm
