#include "ftm/model.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "ftm/errors.hpp"

namespace ftm {

ParetoParams::ParetoParams(double a, double w0) : a_(a), w0_(w0) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("Pareto shape a must be positive");
  if (!(w0 > 0.0) || !std::isfinite(w0)) throw DomainError("Pareto scale w0 must be positive");
}

double ParetoParams::survival(double t) const noexcept {
  if (t <= w0_) return 1.0;
  return std::pow(w0_ / t, a_);
}

std::vector<double> Node::latent() const {
  std::vector<double> v(direction);
  for (auto& x : v) x *= weight;
  return v;
}

LinkFn LinkFn::odd_power_plus_c(int m, double c) {
  if (m < 1) throw DomainError("oddpow exponent parameter m must be a positive integer");
  if (!std::isfinite(c)) throw DomainError("oddpow offset c must be finite");
  return LinkFn(Kind::OddPowerPlusC, m, c);
}

LinkFn LinkFn::even_power(int m) {
  if (m < 1) throw DomainError("evenpow exponent parameter m must be a positive integer");
  return LinkFn(Kind::EvenPower, m, 0.0);
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

int parse_int(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size()) throw DomainError("invalid " + what + ": '" + s + "'");
  return v;
}

double parse_double(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size()) throw DomainError("invalid " + what + ": '" + s + "'");
  return v;
}

double ipow(double t, int e) noexcept {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= t;
  return r;
}

}  // namespace

LinkFn LinkFn::parse(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.empty()) throw DomainError("empty link function");
  const auto& name = parts[0];
  if (name == "identity" && parts.size() == 1) return identity();
  if (name == "exp" && parts.size() == 1) return exp();
  if (name == "oddpow" && parts.size() == 3)
    return odd_power_plus_c(parse_int(parts[1], "oddpow m"), parse_double(parts[2], "oddpow c"));
  if (name == "evenpow" && parts.size() == 2) return even_power(parse_int(parts[1], "evenpow m"));
  throw DomainError("unknown link function '" + text +
                    "' (expected identity | exp | oddpow:m:c | evenpow:m)");
}

std::string LinkFn::to_string() const {
  std::ostringstream out;
  out.precision(17);
  switch (kind_) {
    case Kind::Identity: return "identity";
    case Kind::Exp: return "exp";
    case Kind::OddPowerPlusC: out << "oddpow:" << m_ << ':' << c_; return out.str();
    case Kind::EvenPower: out << "evenpow:" << m_; return out.str();
  }
  return "identity";
}

double LinkFn::operator()(double t) const noexcept {
  switch (kind_) {
    case Kind::Identity: return t;
    case Kind::Exp: return std::exp(t);
    case Kind::OddPowerPlusC: return ipow(t, 2 * m_ + 1) + c_;
    case Kind::EvenPower: return ipow(t, 2 * m_);
  }
  return t;
}

double LinkFn::min_value() const noexcept {
  return kind_ == Kind::EvenPower ? 0.0 : (*this)(-1.0);
}

double LinkFn::max_value() const noexcept { return (*this)(1.0); }

double LinkFn::inverse(double y) const {
  if (!strictly_increasing())
    throw UnsupportedError("link function " + to_string() + " is not strictly increasing");
  const double lo_val = min_value();
  const double hi_val = max_value();
  if (!(y >= lo_val && y <= hi_val)) throw DomainError("link function inverse outside [h(-1), h(1)]");
  double lo = -1.0;
  double hi = 1.0;
  // Runs to full double resolution, well past the 1e-12 requirement.
  for (;;) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if ((*this)(mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Undirected: return "undirected";
    case Variant::Directed: return "directed";
    case Variant::LinkFunction: return "linkfn";
  }
  return "undirected";
}

Variant parse_variant(const std::string& text) {
  if (text == "undirected") return Variant::Undirected;
  if (text == "directed") return Variant::Directed;
  if (text == "linkfn") return Variant::LinkFunction;
  throw DomainError("unknown variant '" + text + "'");
}

EdgeRule EdgeRule::undirected(double theta) {
  EdgeRule r;
  r.theta = theta;
  r.validate();
  return r;
}

EdgeRule EdgeRule::directed(double theta, double alpha, double beta) {
  EdgeRule r;
  r.variant = Variant::Directed;
  r.theta = theta;
  r.alpha = alpha;
  r.beta = beta;
  r.validate();
  return r;
}

EdgeRule EdgeRule::link_function(double theta, double alpha, double beta, LinkFn h) {
  EdgeRule r;
  r.variant = Variant::LinkFunction;
  r.theta = theta;
  r.alpha = alpha;
  r.beta = beta;
  r.h = h;
  r.validate();
  return r;
}

void EdgeRule::validate() const {
  if (!(theta >= 0.0) || !std::isfinite(theta))
    throw DomainError("threshold theta must be finite and >= 0");
  if (variant != Variant::Undirected) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be positive");
  }
}

void ModelConfig::validate() const {
  if (n < 1) throw DomainError("node count n must be >= 1");
  if (d < 2) throw DomainError("invalid dimension d=" + std::to_string(d) + " (need d >= 2)");
  rule.validate();
}

void ModelConfig::require_analytic() const {
  validate();
  if (d != 3)
    throw UnsupportedError("analytic formulas are only available for d = 3 (got d=" +
                           std::to_string(d) + ")");
}

double pareto_from_uniform(double u, const ParetoParams& pareto) noexcept {
  return pareto.w0() * std::pow(1.0 - u, -1.0 / pareto.a());
}

double sample_weight(RngStream& stream, const ParetoParams& pareto) {
  return pareto_from_uniform(stream.uniform(), pareto);
}

void sample_direction(RngStream& stream, int d, std::span<double> out) {
  if (d < 2) throw DomainError("invalid dimension d=" + std::to_string(d) + " (need d >= 2)");
  if (out.size() != static_cast<std::size_t>(d)) throw DomainError("direction buffer size != d");
  if (d == 3) {
    const double z = 2.0 * stream.uniform() - 1.0;
    const double phi = 2.0 * std::numbers::pi * stream.uniform();
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    out[0] = r * std::cos(phi);
    out[1] = r * std::sin(phi);
    out[2] = z;
    return;
  }
  std::normal_distribution<double> normal;
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (auto& x : out) {
      x = normal(stream);
      norm2 += x * x;
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& x : out) x *= inv;
}

std::vector<double> sample_direction(RngStream& stream, int d) {
  if (d < 2) throw DomainError("invalid dimension d=" + std::to_string(d) + " (need d >= 2)");
  std::vector<double> x(static_cast<std::size_t>(d));
  sample_direction(stream, d, x);
  return x;
}

Node sample_node(std::uint64_t seed, std::uint64_t id, int d, const ParetoParams& pareto) {
  auto stream = RngStream::substream(seed, StreamDomain::Node, id);
  Node node;
  node.id = id;
  node.weight = sample_weight(stream, pareto);
  node.direction = sample_direction(stream, d);
  return node;
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("direction dimension mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s;
}

bool edge_exists(double wu, std::span<const double> xu, double wv, std::span<const double> xv,
                 const EdgeRule& rule) {
  const double cosine = dot(xu, xv);
  const double scale = rule.variant == Variant::Undirected
                           ? wu * wv
                           : std::pow(wu, rule.alpha) * std::pow(wv, rule.beta);
  return edge_condition(scale, cosine, rule);
}

bool edge_exists(const Node& u, const Node& v, const EdgeRule& rule) {
  return edge_exists(u.weight, u.direction, v.weight, v.direction, rule);
}

}  // namespace ftm
