#include "bergman/operators.hpp"

#include <cmath>
#include <limits>

#include "bergman/errors.hpp"
#include "bergman/parallel.hpp"

namespace bergman {

namespace {

void check_coordinate(std::size_t i, std::size_t m) {
  if (i >= m) throw InputError("coordinate index out of range");
}

void check_dims(const LatticeRegion& region, const WeightFunction& w) {
  if (region.dimension() != w.dimension()) throw InputError("region and weights differ in dimension");
}

// Amplitude of T_i at n on the region; 0 when n or n + e_i is outside.
double amp(std::size_t i, const LatticeRegion& region, const WeightFunction& w, const MultiIndex& n) {
  if (!region.contains(n)) return 0.0;
  MultiIndex up = n.raised(i);
  if (!region.contains(up)) return 0.0;
  return std::sqrt(w.ratio(up, n));
}

}  // namespace

ShiftOperator::ShiftOperator(std::size_t coordinate, LatticeRegion region, WeightFunction weights)
    : coord_(coordinate), region_(std::move(region)), weights_(std::move(weights)) {
  check_dims(region_, weights_);
  check_coordinate(coord_, region_.dimension());
}

double ShiftOperator::amplitude_or_zero(const MultiIndex& n) const { return amp(coord_, region_, weights_, n); }

double shift_amplitude(const ShiftOperator& op, const MultiIndex& n) {
  if (!op.region().contains(n)) throw InputError("shift_amplitude: " + n.to_string() + " is outside the region");
  return op.amplitude_or_zero(n);
}

double self_commutator_diagonal(std::size_t i, const LatticeRegion& region, const WeightFunction& w,
                                const MultiIndex& n) {
  check_dims(region, w);
  check_coordinate(i, region.dimension());
  if (!region.contains(n)) throw InputError("self_commutator_diagonal: " + n.to_string() + " is outside the region");
  double lower = 0.0, upper = 0.0;
  if (auto down = n.lowered(i); down && region.contains(*down)) lower = w.ratio(n, *down);
  if (MultiIndex up = n.raised(i); region.contains(up)) upper = w.ratio(up, n);
  return lower - upper;
}

std::optional<CommutatorEntry> commutator_entry(std::size_t i, std::size_t k, const LatticeRegion& region,
                                                const WeightFunction& w, const MultiIndex& n) {
  if (!region.contains(n)) return std::nullopt;
  if (i == k) return CommutatorEntry{n, n, self_commutator_diagonal(i, region, w, n)};
  // [T_i, T_k^*] e_n = (T_i T_k^* - T_k^* T_i) e_n, both terms land on n + e_i - e_k.
  auto down = n.lowered(k);
  if (!down) return std::nullopt;
  MultiIndex target = down->raised(i);
  if (!region.contains(target)) return std::nullopt;
  // T_k^* e_n = amp_k(n - e_k) e_{n-e_k}, then T_i.
  const double first = amp(k, region, w, *down) * amp(i, region, w, *down);
  // T_i e_n = amp_i(n) e_{n+e_i}, then T_k^*.
  const double second = amp(i, region, w, n) * amp(k, region, w, target);
  return CommutatorEntry{n, std::move(target), first - second};
}

std::vector<CommutatorEntry> commutator_entries(std::size_t i, std::size_t k, const LatticeRegion& region,
                                                const WeightFunction& w, int degree_cap) {
  check_dims(region, w);
  check_coordinate(i, region.dimension());
  check_coordinate(k, region.dimension());
  std::vector<CommutatorEntry> out;
  for (const auto& n : enumerate_region(region, degree_cap)) {
    auto e = commutator_entry(i, k, region, w, n);
    if (e && e->value != 0.0) out.push_back(std::move(*e));
  }
  return out;
}

double projection_commutator_rho(const Box& box, const WeightFunction& w, std::size_t i, const MultiIndex& n) {
  if (box.dimension() != w.dimension() || n.size() != box.dimension())
    throw InputError("projection_commutator_rho: dimension mismatch");
  auto bound = box.bound_for(static_cast<int>(i));
  if (!bound) throw InputError("projection_commutator_rho: coordinate is not constrained by the box");
  if (n[i] != *bound) throw InputError("projection_commutator_rho: n must lie on the box face n[i] = bound");
  if (!box.contains(n)) throw InputError("projection_commutator_rho: n is outside the box");
  return w.ratio(n.raised(i), n);
}

// ---------------------------------------------------------------------------

std::vector<double> SpectralScanReport::partial_sums(std::size_t pair, std::size_t grid_index) const {
  const auto& shells = pairs.at(pair).shell_power_sums.at(grid_index);
  std::vector<double> out(shells.size());
  double acc = 0.0;
  for (std::size_t d = 0; d < shells.size(); ++d) out[d] = acc += shells[d];
  return out;
}

namespace {

double regression_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 3) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct ShellResult {
  std::vector<double> sup;                       // per pair
  std::vector<std::vector<double>> power_sums;  // per pair, per grid
  std::vector<std::vector<CommutatorEntry>> entries;
};

SpectralScanReport run_scan(const LatticeRegion& region, const WeightFunction& w, const std::vector<double>& p_grid,
                            int degree_cap, const ScanOptions& options) {
  check_dims(region, w);
  const std::size_t m = region.dimension();
  SpectralScanReport report;
  report.dimension = m;
  report.degree_cap = degree_cap;
  report.p_grid = p_grid;

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k)
      if (i == k || !options.diagonal_only) pairs.emplace_back(i, k);

  const auto shells = static_cast<std::size_t>(degree_cap) + 1;
  std::vector<ShellResult> results(shells);
  detail::parallel_for(shells, options.threads, [&](std::size_t d) {
    ShellResult& r = results[d];
    r.sup.assign(pairs.size(), 0.0);
    r.power_sums.assign(pairs.size(), std::vector<double>(p_grid.size(), 0.0));
    r.entries.resize(pairs.size());
    for (const auto& n : enumerate_shell(m, static_cast<int>(d))) {
      if (!region.contains(n)) continue;
      for (std::size_t q = 0; q < pairs.size(); ++q) {
        auto e = commutator_entry(pairs[q].first, pairs[q].second, region, w, n);
        if (!e || e->value == 0.0) continue;
        const double mag = std::abs(e->value);
        r.sup[q] = std::max(r.sup[q], mag);
        for (std::size_t g = 0; g < p_grid.size(); ++g) r.power_sums[q][g] += std::pow(mag, p_grid[g]);
        if (options.keep_entries) r.entries[q].push_back(std::move(*e));
      }
    }
  });

  report.shell_sup.assign(shells, 0.0);
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    PairScan ps;
    ps.i = pairs[q].first;
    ps.k = pairs[q].second;
    ps.shell_sup.resize(shells);
    ps.shell_power_sums.assign(p_grid.size(), std::vector<double>(shells, 0.0));
    for (std::size_t d = 0; d < shells; ++d) {
      ps.shell_sup[d] = results[d].sup[q];
      report.shell_sup[d] = std::max(report.shell_sup[d], ps.shell_sup[d]);
      for (std::size_t g = 0; g < p_grid.size(); ++g) ps.shell_power_sums[g][d] = results[d].power_sums[q][g];
      if (options.keep_entries)
        ps.entries.insert(ps.entries.end(), results[d].entries[q].begin(), results[d].entries[q].end());
    }
    report.pairs.push_back(std::move(ps));
  }
  report.decay = fit_decay(report.shell_sup);
  return report;
}

}  // namespace

DecayFit fit_decay(const std::vector<double>& sup) {
  DecayFit fit;
  const std::size_t n = sup.size();
  if (n == 0) return fit;
  const std::size_t start = (2 * n) / 3;
  fit.monotone_tail = true;
  for (std::size_t d = start; d + 1 < n; ++d) {
    if (sup[d + 1] > sup[d] || (sup[d] > 0.0 && !(sup[d + 1] < sup[d]))) fit.monotone_tail = false;
  }
  std::size_t last_nonzero = n;
  for (std::size_t d = n; d-- > 0;)
    if (sup[d] > 0.0) {
      last_nonzero = d;
      break;
    }
  fit.finite_rank = last_nonzero == n || last_nonzero + 1 < n;
  std::vector<double> x, y;
  for (std::size_t d = std::max<std::size_t>(start, 1); d < n; ++d)
    if (sup[d] > 0.0) {
      x.push_back(std::log(static_cast<double>(d)));
      y.push_back(std::log(sup[d]));
    }
  fit.exponent = regression_slope(x, y);
  fit.decay_observed = fit.monotone_tail && (fit.finite_rank || fit.exponent < 0.0);
  return fit;
}

CriticalExponent estimate_critical_exponent(const std::vector<double>& p_grid,
                                            const std::vector<std::vector<double>>& shell_power_sums,
                                            const ScanOptions& options) {
  CriticalExponent ce;
  const std::size_t G = p_grid.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  ce.estimate = ce.regression_estimate = nan;
  if (G == 0) return ce;
  const int N = static_cast<int>(shell_power_sums[0].size()) - 1;
  const int win = options.increment_window;
  const int half = N / 2;
  if (half - win < 0) throw InputError("degree cap too small for the tail-increment test");

  ce.increment_ratio.resize(G);
  ce.regression_slope.resize(G);
  ce.convergent.resize(G);
  for (std::size_t g = 0; g < G; ++g) {
    const auto& sh = shell_power_sums[g];
    // S(N) - S(N - win) is the sum of the last `win` shells.
    auto increment = [&](int upto) {
      double s = 0.0;
      for (int d = upto - win + 1; d <= upto; ++d) s += sh[static_cast<std::size_t>(d)];
      return s;
    };
    const double late = increment(N), early = increment(half);
    ce.increment_ratio[g] = early > 0.0 ? late / early : 0.0;
    ce.convergent[g] = ce.increment_ratio[g] < options.convergence_ratio;

    std::vector<double> x, y;
    for (int d = std::max(half, 1); d <= N; ++d)
      if (sh[static_cast<std::size_t>(d)] > 0.0) {
        x.push_back(std::log(static_cast<double>(d)));
        y.push_back(std::log(sh[static_cast<std::size_t>(d)]));
      }
    ce.regression_slope[g] = x.size() >= 3 ? regression_slope(x, y) : -std::numeric_limits<double>::infinity();
  }

  // Smallest grid index from which every larger p is convergent.
  std::size_t first = G;
  while (first > 0 && ce.convergent[first - 1]) --first;
  if (first < G) ce.bracket_high = p_grid[first];
  if (first > 0) ce.bracket_low = p_grid[first - 1];

  const double log_thr = std::log(options.convergence_ratio);
  if (ce.bracket_low && ce.bracket_high) {
    const double y_lo = std::log(ce.increment_ratio[first - 1]) - log_thr;
    const double y_hi = ce.increment_ratio[first] > 0.0 ? std::log(ce.increment_ratio[first]) - log_thr : -1e300;
    const double t = std::isfinite(y_lo) && y_hi > -1e299 ? y_lo / (y_lo - y_hi) : 0.5;
    ce.estimate = *ce.bracket_low + (*ce.bracket_high - *ce.bracket_low) * std::clamp(t, 0.0, 1.0);
    ce.uncertainty = std::max(options.min_uncertainty, (*ce.bracket_high - *ce.bracket_low) / 2.0);
  } else if (ce.bracket_high) {
    ce.estimate = *ce.bracket_high;  // convergent on the whole grid: upper bound only
    ce.uncertainty = std::numeric_limits<double>::infinity();
  } else {
    ce.estimate = std::numeric_limits<double>::infinity();  // divergent on the whole grid
    ce.uncertainty = std::numeric_limits<double>::infinity();
  }

  // Regression: slope of the shell sums crosses -1.
  std::size_t rfirst = G;
  while (rfirst > 0 && ce.regression_slope[rfirst - 1] < -1.0) --rfirst;
  if (rfirst > 0 && rfirst < G) {
    const double s0 = ce.regression_slope[rfirst - 1] + 1.0, s1 = ce.regression_slope[rfirst] + 1.0;
    const double t = std::isfinite(s1) ? s0 / (s0 - s1) : 0.5;
    ce.regression_estimate = p_grid[rfirst - 1] + (p_grid[rfirst] - p_grid[rfirst - 1]) * std::clamp(t, 0.0, 1.0);
  }
  return ce;
}

SpectralScanReport essential_normality_scan(const LatticeRegion& region, const WeightFunction& w, int degree_cap,
                                            const ScanOptions& options) {
  if (degree_cap < 5) throw InputError("essential_normality_scan: degree cap must be at least 5");
  return run_scan(region, w, {}, degree_cap, options);
}

SpectralScanReport schatten_scan(const LatticeRegion& region, const WeightFunction& w,
                                 const std::vector<double>& p_grid, int degree_cap, const ScanOptions& options) {
  if (degree_cap < 20) throw InputError("schatten_scan: degree cap must be at least 20");
  if (p_grid.empty()) throw InputError("schatten_scan: empty p grid");
  for (std::size_t g = 0; g < p_grid.size(); ++g) {
    if (!(p_grid[g] > 0.0)) throw InputError("schatten_scan: p grid must be positive");
    if (g && !(p_grid[g] > p_grid[g - 1])) throw InputError("schatten_scan: p grid must be increasing");
  }
  SpectralScanReport report = run_scan(region, w, p_grid, degree_cap, options);
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t worst_pair = 0;
  for (std::size_t q = 0; q < report.pairs.size(); ++q) {
    report.pair_critical.push_back(estimate_critical_exponent(p_grid, report.pairs[q].shell_power_sums, options));
    const double e = report.pair_critical.back().estimate;
    if (!(e <= worst)) {  // NaN-safe: first finite or larger wins
      worst = e;
      worst_pair = q;
    }
  }
  // All commutators are in S_p only when each is: the binding pair decides.
  if (!report.pair_critical.empty()) report.critical = report.pair_critical[worst_pair];
  return report;
}

}  // namespace bergman
