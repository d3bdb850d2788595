#pragma once

// Region-constrained weighted shifts in the orthonormal monomial basis
// e_n = z^n / sqrt(omega(n)), their commutators, and decay / Schatten
// diagnostics on degree truncations |n| <= N.

#include <map>
#include <optional>
#include <vector>

#include "bergman/lattice.hpp"
#include "bergman/weights.hpp"

namespace bergman {

/// T_{z_i} compressed to the span of {e_n : n in region}:
///   e_n -> sqrt(omega(n + e_i)/omega(n)) e_{n + e_i}  if n + e_i in region, else 0.
class ShiftOperator {
 public:
  ShiftOperator(std::size_t coordinate, LatticeRegion region, WeightFunction weights);

  std::size_t coordinate() const { return coord_; }
  const LatticeRegion& region() const { return region_; }
  const WeightFunction& weights() const { return weights_; }

  /// Matrix entry <T e_{n+e_i}, ...>; zero when n or n + e_i leaves the region.
  double amplitude_or_zero(const MultiIndex& n) const;

 private:
  std::size_t coord_;
  LatticeRegion region_;
  WeightFunction weights_;
};

/// InputError if n is not in the operator's region.
double shift_amplitude(const ShiftOperator& op, const MultiIndex& n);

/// Eigenvalue of [T_i, T_i^*] at e_n: omega(n)/omega(n - e_i) (if n - e_i is
/// in the region, else 0) minus omega(n + e_i)/omega(n) (if n + e_i is in the
/// region, else 0).
double self_commutator_diagonal(std::size_t i, const LatticeRegion& region, const WeightFunction& w,
                                const MultiIndex& n);

/// [T_i, T_k^*] e_n = value * e_target with target = n + e_i - e_k.
struct CommutatorEntry {
  MultiIndex source;
  MultiIndex target;
  double value = 0.0;
};

/// The single possibly-nonzero entry in column n, or nullopt when the column
/// vanishes identically (target outside the lattice or region).
std::optional<CommutatorEntry> commutator_entry(std::size_t i, std::size_t k, const LatticeRegion& region,
                                                const WeightFunction& w, const MultiIndex& n);

/// All nonzero entries over region points with |n| <= degree_cap, grlex in n.
std::vector<CommutatorEntry> commutator_entries(std::size_t i, std::size_t k, const LatticeRegion& region,
                                                const WeightFunction& w, int degree_cap);

/// Squared amplitude of [M_{z_i}, P_box] at e_n, where n sits on the box's
/// face n[i] = bound(i): omega(n + e_i)/omega(n). InputError if i is not
/// constrained by the box or n[i] differs from the bound.
double projection_commutator_rho(const Box& box, const WeightFunction& w, std::size_t i, const MultiIndex& n);

// ---------------------------------------------------------------------------

struct ScanOptions {
  /// Window w of the tail increment S_p(N) - S_p(N - w).
  int increment_window = 5;
  /// A p-sum is declared convergent when the ratio of tail increments at N
  /// and N/2 is below this (2^{-1} is the borderline for a shell sum ~ d^{-1}).
  double convergence_ratio = 0.5;
  /// Half-width reported around the bracketed critical exponent.
  double min_uncertainty = 0.2;
  /// Keep per-point entries in the report (CSV output).
  bool keep_entries = false;
  /// Only diagonal commutators [T_i, T_i^*].
  bool diagonal_only = false;
  /// Worker threads for shell-parallel evaluation (0 = hardware).
  unsigned threads = 1;
};

struct PairScan {
  std::size_t i = 0, k = 0;
  std::vector<CommutatorEntry> entries;  // only when keep_entries
  /// shell_sup[d] = sup |entry| over region points with |n| = d.
  std::vector<double> shell_sup;
  /// shell_power_sums[g][d] = sum over |n| = d of |entry|^{p_grid[g]}.
  std::vector<std::vector<double>> shell_power_sums;
};

struct DecayFit {
  /// Least-squares slope of log(shell sup) against log d over the last third
  /// of shells with a nonzero supremum (NaN when fewer than 3 such shells).
  double exponent = 0.0;
  /// Last third of shells nonincreasing, and strictly decreasing wherever
  /// positive.
  bool monotone_tail = false;
  /// Suprema beyond some shell all vanish.
  bool finite_rank = false;
  bool decay_observed = false;
};

struct CriticalExponent {
  /// Interpolated crossing of the tail-increment ratio with the threshold.
  double estimate = 0.0;
  double uncertainty = 0.0;
  /// Largest grid p judged divergent and smallest judged convergent.
  std::optional<double> bracket_low, bracket_high;
  /// Same crossing read off a log-log regression of the shell sums.
  double regression_estimate = 0.0;
  /// Per grid point.
  std::vector<double> increment_ratio;
  std::vector<double> regression_slope;
  std::vector<bool> convergent;
};

struct SpectralScanReport {
  std::size_t dimension = 0;
  int degree_cap = 0;
  std::vector<double> p_grid;
  std::vector<PairScan> pairs;
  /// max over pairs of shell_sup.
  std::vector<double> shell_sup;
  DecayFit decay;
  /// Per pair and overall (max over pairs); only filled by schatten_scan.
  std::vector<CriticalExponent> pair_critical;
  CriticalExponent critical;

  /// S_p(N) for a pair and grid index; partial sums are the running totals
  /// of shell_power_sums.
  std::vector<double> partial_sums(std::size_t pair, std::size_t grid_index) const;
};

/// Shell suprema of all commutators [T_i, T_k^*] (or only i = k). cap >= 5.
SpectralScanReport essential_normality_scan(const LatticeRegion& region, const WeightFunction& w, int degree_cap,
                                            const ScanOptions& options = {});

/// Schatten p-sums over a p-grid and the critical exponent. cap >= 20.
SpectralScanReport schatten_scan(const LatticeRegion& region, const WeightFunction& w,
                                 const std::vector<double>& p_grid, int degree_cap, const ScanOptions& options = {});

/// Exposed for testing: decay fit of a shell-supremum table.
DecayFit fit_decay(const std::vector<double>& shell_sup);

/// Exposed for testing: critical exponent from per-shell power sums.
CriticalExponent estimate_critical_exponent(const std::vector<double>& p_grid,
                                            const std::vector<std::vector<double>>& shell_power_sums,
                                            const ScanOptions& options);

}  // namespace bergman
