#include "bergman/weights.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <unordered_map>

#include "bergman/errors.hpp"

namespace bergman {

EggNode EggNode::make_leaf(std::string coordinate, double power) {
  EggNode n;
  n.leaf = true;
  n.coordinate = std::move(coordinate);
  n.power = power;
  return n;
}

EggNode EggNode::make_group(double exponent, std::vector<EggNode> children) {
  EggNode n;
  n.exponent = exponent;
  n.children = std::move(children);
  return n;
}

namespace {

void collect(const EggNode& node, int level, std::vector<double>& powers, std::vector<std::string>& labels,
             int& depth) {
  if (node.leaf) {
    if (!(node.power > 0.0) || !std::isfinite(node.power)) throw InputError("leaf power must be a positive real");
    if (node.coordinate.empty()) throw InputError("leaf needs a coordinate label");
    for (const auto& l : labels)
      if (l == node.coordinate) throw InputError("duplicate coordinate label '" + node.coordinate + "'");
    powers.push_back(node.power);
    labels.push_back(node.coordinate);
    depth = std::max(depth, level);
    return;
  }
  if (!(node.exponent > 0.0) || !std::isfinite(node.exponent))
    throw InputError("node exponent must be a positive real");
  if (level > 0 && node.children.empty()) throw InputError("internal node without children");
  for (const auto& c : node.children) collect(c, level + 1, powers, labels, depth);
}

// Returns false when the subtree has no leaf left.
bool strip(EggNode& node, const std::vector<bool>& drop, std::size_t& next_leaf) {
  if (node.leaf) return !drop[next_leaf++];
  std::vector<EggNode> kept;
  for (auto& c : node.children)
    if (strip(c, drop, next_leaf)) kept.push_back(std::move(c));
  node.children = std::move(kept);
  return !node.children.empty();
}

}  // namespace

EggDomain::EggDomain(EggNode root) : root_(std::move(root)) {
  if (root_.leaf) throw InputError("domain root must be an internal node");
  if (root_.exponent != 1.0) throw InputError("domain root exponent must be 1");
  collect(root_, 0, leaf_powers_, labels_, depth_);
}

EggDomain EggDomain::egg(std::span<const double> p) {
  std::vector<EggNode> leaves;
  for (std::size_t j = 0; j < p.size(); ++j) leaves.push_back(EggNode::make_leaf("z" + std::to_string(j + 1), 2.0 * p[j]));
  return EggDomain(EggNode::make_group(1.0, std::move(leaves)));
}

EggDomain EggDomain::ball(std::size_t m) {
  std::vector<double> p(m, 1.0);
  return egg(p);
}

EggDomain EggDomain::generalized(const std::vector<std::pair<std::vector<double>, double>>& groups) {
  std::vector<EggNode> kids;
  int label = 1;
  for (const auto& [p, e] : groups) {
    std::vector<EggNode> leaves;
    for (double pj : p) leaves.push_back(EggNode::make_leaf("z" + std::to_string(label++), 2.0 * pj));
    kids.push_back(EggNode::make_group(e, std::move(leaves)));
  }
  return EggDomain(EggNode::make_group(1.0, std::move(kids)));
}

namespace {

double eval_node(const EggNode& node, std::span<const double> t, std::size_t& next) {
  if (node.leaf) return t[next++];
  double sum = 0.0;
  for (const auto& c : node.children) sum += eval_node(c, t, next);
  return node.exponent == 1.0 ? sum : std::pow(sum, node.exponent);
}

}  // namespace

double EggDomain::defining_sum(std::span<const double> leaf_terms) const {
  if (leaf_terms.size() != dimension()) throw InputError("defining_sum: dimension mismatch");
  std::size_t next = 0;
  return eval_node(root_, leaf_terms, next);
}

EggDomain EggDomain::without_coordinates(const Shuffle& removed) const {
  std::vector<bool> drop(dimension(), false);
  for (int c : removed.coordinates()) {
    if (c >= static_cast<int>(dimension())) throw InputError("without_coordinates: coordinate out of range");
    drop[static_cast<std::size_t>(c)] = true;
  }
  EggNode root = root_;
  std::size_t next = 0;
  strip(root, drop, next);
  return EggDomain(std::move(root));
}

// ---------------------------------------------------------------------------

double log_multibeta(std::span<const double> args) {
  double sum = 0.0, acc = 0.0;
  for (double x : args) {
    if (!(x > 0.0)) throw DomainError("multi-variable Beta needs positive arguments");
    acc += std::lgamma(x);
    sum += x;
  }
  if (args.empty()) return 0.0;
  return acc - std::lgamma(sum);
}

namespace {

struct Radial {
  double log_factor = 0.0;
  double kappa = 0.0;
};

// Non-root nodes: radial exponent and accumulated log factor.
Radial radial(const EggNode& node, const MultiIndex& alpha, std::size_t& next) {
  if (node.leaf) {
    const double p = node.power / 2.0;
    const int a = alpha[next++];
    return {-std::log(node.power), (a + 1) / p};
  }
  Radial out;
  double lg = 0.0;
  for (const auto& c : node.children) {
    const Radial r = radial(c, alpha, next);
    out.log_factor += r.log_factor;
    out.kappa += r.kappa;
    lg += std::lgamma(r.kappa);
  }
  if (node.children.size() > 1) out.log_factor += lg - std::lgamma(out.kappa);
  out.log_factor -= std::log(node.exponent);
  out.kappa /= node.exponent;
  return out;
}

}  // namespace

struct WeightFunction::Cache {
  std::shared_mutex mutex;
  std::unordered_map<MultiIndex, double, MultiIndexHash> table;
  static constexpr std::size_t kMaxEntries = 1u << 22;
};

WeightFunction::WeightFunction(EggDomain domain, double s, bool memoize)
    : domain_(std::make_shared<const EggDomain>(std::move(domain))), s_(s) {
  if (!(s > -1.0) || !std::isfinite(s)) throw DomainError("weight exponent must satisfy s > -1");
  if (memoize) cache_ = std::make_shared<Cache>();
}

double WeightFunction::compute_log_omega(const MultiIndex& alpha) const {
  const EggNode& root = domain_->root();
  const std::size_t m = domain_->dimension();
  if (m == 0) return 0.0;  // a point: the space is C with |1| = 1

  // Root: the Beta factor's Gamma(sum kappa) cancels against the radial
  // integral, leaving prod Gamma(kappa_c) Gamma(s+1) / Gamma(kappa + s + 1).
  std::size_t next = 0;
  double log_factor = 0.0, kappa = 0.0, lg = 0.0;
  for (const auto& c : root.children) {
    const Radial r = radial(c, alpha, next);
    log_factor += r.log_factor;
    kappa += r.kappa;
    lg += std::lgamma(r.kappa);
  }
  constexpr double kLog2Pi = 1.8378770664093454836;  // log(2 pi)
  return static_cast<double>(m) * kLog2Pi + log_factor + lg + std::lgamma(s_ + 1.0) - std::lgamma(kappa + s_ + 1.0);
}

double WeightFunction::log_omega(const MultiIndex& alpha) const {
  if (alpha.size() != domain_->dimension()) throw InputError("omega: multi-index length differs from domain dimension");
  if (!cache_) return compute_log_omega(alpha);
  {
    std::shared_lock lock(cache_->mutex);
    if (auto it = cache_->table.find(alpha); it != cache_->table.end()) return it->second;
  }
  const double v = compute_log_omega(alpha);
  std::unique_lock lock(cache_->mutex);
  if (cache_->table.size() >= Cache::kMaxEntries) cache_->table.clear();
  cache_->table.emplace(alpha, v);
  return v;
}

double WeightFunction::omega(const MultiIndex& alpha) const { return std::exp(log_omega(alpha)); }

double WeightFunction::ratio(const MultiIndex& num, const MultiIndex& den) const {
  return std::exp(log_omega(num) - log_omega(den));
}

double omega(const WeightFunction& w, const MultiIndex& alpha) { return w.omega(alpha); }

// ---------------------------------------------------------------------------

IsometryFactor isometry_factor(const EggDomain& domain, const Shuffle& shuffle, const MultiIndex& i) {
  if (domain.depth() > 1) throw InputError("isometry_factor: depth-1 domains only");
  if (i.size() != shuffle.size()) throw InputError("isometry_factor: exponent list must match the shuffle");
  if (!shuffle.empty() && shuffle[shuffle.size() - 1] >= static_cast<int>(domain.dimension()))
    throw InputError("isometry_factor: shuffle coordinate out of range");
  const auto powers = domain.leaf_powers();
  double s = 0.0, log_c = 0.0;
  for (std::size_t l = 0; l < shuffle.size(); ++l) {
    const double p = powers[static_cast<std::size_t>(shuffle[l])] / 2.0;
    const double a = (i[l] + 1) / p;
    s += a;
    log_c += std::lgamma(a) - std::log(p);
  }
  log_c += static_cast<double>(shuffle.size()) * std::log(std::numbers::pi) - std::lgamma(s + 1.0);
  return {std::exp(log_c), s};
}

double isometry_residual(const EggDomain& domain, const Shuffle& shuffle, const MultiIndex& n) {
  if (n.size() != domain.dimension()) throw InputError("isometry_residual: dimension mismatch");
  std::vector<int> on, off;
  for (std::size_t c = 0; c < n.size(); ++c) (shuffle.contains(static_cast<int>(c)) ? on : off).push_back(n[c]);
  const MultiIndex i(on), rest(off);
  const IsometryFactor f = isometry_factor(domain, shuffle, i);
  const WeightFunction full(domain, 0.0, false);
  const WeightFunction slice(domain.without_coordinates(shuffle), f.slice_weight, false);
  const double lhs = full.log_omega(n);
  const double rhs = std::log(f.constant) + slice.log_omega(rest);
  return std::abs(std::expm1(rhs - lhs));
}

}  // namespace bergman
