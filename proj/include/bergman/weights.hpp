#pragma once

// Monomial norms ||z^alpha||^2 on nested egg domains
//
//   ( ... (|z_1|^{2p_1} + |z_2|^{2p_2})^{a} + |z_3|^{2p_3} + ... ) < 1
//
// in the plain (s = 0) and weighted (s > -1, weight (1 - F)^s) Bergman
// spaces, where F is the nested power sum defining the domain.
//
// The closed form is a recursion over the domain tree. A leaf with power
// 2p and exponent alpha contributes the radial exponent (alpha + 1)/p and the
// factor 1/(2p). An internal node with exponent e and children c contributes
//
//   kappa = (sum_c kappa_c) / e,   factor = B(kappa_c ...) / e,
//
// where B is the multi-variable Beta function. At the root (e = 1),
//
//   omega = (2 pi)^m * prod(factors) * Gamma(kappa) Gamma(s + 1) / Gamma(kappa + s + 1).
//
// Everything is evaluated in log space.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bergman/lattice.hpp"

namespace bergman {

/// One node of a nested egg domain. Leaves carry a coordinate label and the
/// power 2p of |z|; internal nodes carry the exponent applied to the sum of
/// their children's terms.
struct EggNode {
  std::string coordinate;  // leaves only
  double power = 0.0;      // leaves only: 2p > 0
  double exponent = 1.0;   // internal only: e > 0
  std::vector<EggNode> children;
  bool leaf = false;

  static EggNode make_leaf(std::string coordinate, double power);
  static EggNode make_group(double exponent, std::vector<EggNode> children);
};

class EggDomain {
 public:
  /// Root must be an internal node with exponent 1.
  explicit EggDomain(EggNode root);

  /// {sum_j |z_j|^{2 p_j} < 1}; coordinates named z1..zm.
  static EggDomain egg(std::span<const double> p);
  /// Unit ball in C^m.
  static EggDomain ball(std::size_t m);
  /// {(sum |z|^{2p})^{a} + (sum |w|^{2q})^{b} + ... < 1}; groups given as
  /// (p-vector, outer exponent).
  static EggDomain generalized(const std::vector<std::pair<std::vector<double>, double>>& groups);

  const EggNode& root() const { return root_; }
  /// Number of leaves; leaves are numbered in depth-first order.
  std::size_t dimension() const { return leaf_powers_.size(); }
  /// Longest root-to-leaf path, counted in edges.
  int depth() const { return depth_; }
  std::span<const double> leaf_powers() const { return leaf_powers_; }
  std::span<const std::string> labels() const { return labels_; }

  /// F evaluated at the leaf terms t_j = |z_j|^{2p_j}.
  double defining_sum(std::span<const double> leaf_terms) const;

  /// Leaf-restricted subdomain {z in Omega : z_j = 0 for j in shuffle}.
  /// Internal nodes left without leaves are dropped.
  EggDomain without_coordinates(const Shuffle& removed) const;

 private:
  EggNode root_;
  std::vector<double> leaf_powers_;
  std::vector<std::string> labels_;
  int depth_ = 0;
};

/// log( prod Gamma(x_j) / Gamma(sum x_j) ); DomainError if any x_j <= 0.
double log_multibeta(std::span<const double> args);

/// alpha -> ||z^alpha||^2 in L^2_{a,s}(Omega). Copies share a thread-safe
/// memo table.
class WeightFunction {
 public:
  explicit WeightFunction(EggDomain domain, double s = 0.0, bool memoize = true);

  const EggDomain& domain() const { return *domain_; }
  double weight_exponent() const { return s_; }
  std::size_t dimension() const { return domain_->dimension(); }

  double log_omega(const MultiIndex& alpha) const;
  double omega(const MultiIndex& alpha) const;
  /// omega(num) / omega(den), formed in log space.
  double ratio(const MultiIndex& num, const MultiIndex& den) const;

 private:
  struct Cache;
  double compute_log_omega(const MultiIndex& alpha) const;

  std::shared_ptr<const EggDomain> domain_;
  double s_ = 0.0;
  std::shared_ptr<Cache> cache_;
};

double omega(const WeightFunction& w, const MultiIndex& alpha);

struct IsometryFactor {
  /// omega(Omega_1, 0, n) = constant * omega(Omega_{1,j}, slice_weight, n')
  double constant = 0.0;
  double slice_weight = 0.0;
};

/// Norm factor of the slice map onto the weighted Bergman space of the
/// subdomain where the shuffle coordinates vanish. `i` lists the exponents
/// of the shuffle coordinates (length = shuffle size). Depth-1 domains only.
///
///   constant     = pi^q prod Gamma((i_l+1)/p_{j_l}) / ( prod p_{j_l} Gamma(s + 1) )
///   slice_weight = s = sum (i_l+1)/p_{j_l}
///
/// The derivative map X -> c * d^i X / dz^i |slice is isometric for
/// c^2 = constant / (i!)^2.
IsometryFactor isometry_factor(const EggDomain& domain, const Shuffle& shuffle, const MultiIndex& i);

/// Relative residual of the slice identity for one lattice point n:
/// |omega(n) - constant * omega_slice(n')| / omega(n).
double isometry_residual(const EggDomain& domain, const Shuffle& shuffle, const MultiIndex& n);

// ---------------------------------------------------------------------------
// Monte-Carlo oracle

struct OracleOptions {
  /// Radial shells used for stratifying the inner radial variable.
  int strata = 64;
  /// The direction proposal is Dirichlet(flatten * a + (1 - flatten)),
  /// a_j = (alpha_j + 1)/p_j. Must stay in (0, 1) for finite variance.
  double flatten = 0.75;
};

struct OracleEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

/// Monte-Carlo estimate of the integral of |z^alpha|^2 (1 - F)^s over the
/// domain. After polar coordinates in each variable and t_j = |z_j|^{2p_j},
/// points t = r w are sampled with w on the unit simplex (Dirichlet
/// proposal) and r below the boundary radius R(w), found by root finding on
/// F(r w) = 1. Deterministic for a given seed.
OracleEstimate oracle_norm(const EggDomain& domain, double s, const MultiIndex& alpha,
                           std::size_t budget, std::uint64_t seed, const OracleOptions& options = {});

}  // namespace bergman
