#include "bergman/resolution.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <mutex>

#include "bergman/integer_rank.hpp"
#include "bergman/parallel.hpp"

namespace bergman {

namespace {

using Mask = std::uint64_t;

__int128 binomial128(std::size_t n, std::size_t r) {
  if (r > n) return 0;
  __int128 c = 1;
  for (std::size_t q = 1; q <= r; ++q) c = c * static_cast<__int128>(n - r + q) / static_cast<__int128>(q);
  return c;
}

std::uint64_t binomial(std::size_t n, std::size_t r) {
  const __int128 c = binomial128(n, r);
  return c > static_cast<__int128>(std::numeric_limits<std::uint64_t>::max())
             ? std::numeric_limits<std::uint64_t>::max()
             : static_cast<std::uint64_t>(c);
}

// All r-element masks over `bits` bits in increasing numeric order, which is
// colex order of the subsets.
std::vector<Mask> masks_of_size(std::size_t bits, std::size_t r) {
  std::vector<Mask> out;
  if (r > bits) return out;
  if (r == 0) return {0};
  const Mask end = bits == 64 ? 0 : (Mask{1} << bits);
  Mask x = (r == 64) ? ~Mask{0} : (Mask{1} << r) - 1;
  while (true) {
    out.push_back(x);
    const Mask c = x & (~x + 1);
    const Mask y = x + c;
    if (y == 0) break;
    x = (((x ^ y) >> 2) / c) | y;
    if (end && x >= end) break;
  }
  return out;
}

LabelSet labels_of(Mask mask, const LabelSet& alphabet) {
  LabelSet out;
  for (std::size_t b = 0; b < alphabet.size(); ++b)
    if (mask >> b & 1) out.push_back(alphabet[b]);
  return out;
}

int mask_sign(Mask I, int s) { return std::popcount(I & ((Mask{1} << s) - 1)) % 2 ? -1 : 1; }

// Position of a q-subset in colex order.
std::uint64_t colex_rank(Mask mask) {
  std::uint64_t r = 0;
  std::size_t i = 0;
  while (mask) {
    const int c = std::countr_zero(mask);
    r += binomial(static_cast<std::size_t>(c), i + 1);
    ++i;
    mask &= mask - 1;
  }
  return r;
}

std::vector<std::uint64_t> compute_simplex_ranks(std::size_t j) {
  std::vector<std::uint64_t> ranks(j + 1, 0);
  for (std::size_t q = 0; q < j; ++q) {
    // Columns without label 0 first: each meets the row I + {0} with sign +1,
    // and rows containing 0 sort last, so those columns pivot immediately.
    const std::int64_t offset = static_cast<std::int64_t>(binomial(j, q + 1));
    std::vector<SparseIntColumn> columns;
    std::vector<SparseIntColumn> with_zero;
    for (Mask I : masks_of_size(j, q)) {
      SparseIntColumn col;
      for (std::size_t s = 0; s < j; ++s) {
        if (I >> s & 1) continue;
        const Mask R = I | (Mask{1} << s);
        const std::int64_t key = static_cast<std::int64_t>(colex_rank(R)) + ((R & 1) ? offset : 0);
        col.emplace_back(key, mask_sign(I, static_cast<int>(s)));
      }
      std::sort(col.begin(), col.end());
      ((I & 1) ? with_zero : columns).push_back(std::move(col));
    }
    for (auto& c : with_zero) columns.push_back(std::move(c));
    ranks[q] = integer_rank(std::move(columns));
  }
  return ranks;
}

// Psi_{q+1} Psi_q e_I = 0 for all I on j labels; `sign(I, s)` on local bits.
template <typename Sign>
bool simplex_is_chain_complex(std::size_t j, Sign&& sign) {
  for (std::size_t q = 0; q + 2 <= j; ++q)
    for (Mask I : masks_of_size(j, q))
      for (std::size_t s = 0; s < j; ++s) {
        if (I >> s & 1) continue;
        for (std::size_t t = s + 1; t < j; ++t) {
          if (I >> t & 1) continue;
          const Mask Is = I | (Mask{1} << s), It = I | (Mask{1} << t);
          const int via_s = sign(I, static_cast<int>(s)) * sign(Is, static_cast<int>(t));
          const int via_t = sign(I, static_cast<int>(t)) * sign(It, static_cast<int>(s));
          if (via_s + via_t != 0) return false;
        }
      }
  return true;
}

std::mutex g_cache_mutex;
std::map<std::size_t, std::vector<std::uint64_t>> g_rank_cache;
std::map<std::size_t, bool> g_chain_cache;

bool default_chain_holds(std::size_t j) {
  std::lock_guard lock(g_cache_mutex);
  auto it = g_chain_cache.find(j);
  if (it == g_chain_cache.end()) it = g_chain_cache.emplace(j, simplex_is_chain_complex(j, mask_sign)).first;
  return it->second;
}

}  // namespace

bool colex_less(const LabelSet& a, const LabelSet& b) {
  return std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend());
}

int psi_sign(const LabelSet& I, int s) {
  const auto below = std::lower_bound(I.begin(), I.end(), s) - I.begin();
  return below % 2 ? -1 : 1;
}

Resolution::Resolution(BoxCover cover, std::size_t materialize_limit) : cover_(std::move(cover)) {
  const std::size_t k = cover_.size();
  if (k > materialize_limit || k >= 63) return;
  LabelSet all(k);
  for (std::size_t i = 0; i < k; ++i) all[i] = static_cast<int>(i);
  labels_.resize(k + 1);
  boxes_.resize(k + 1);
  for (std::size_t q = 0; q <= k; ++q)
    for (Mask m : masks_of_size(k, q)) {
      labels_[q].push_back(labels_of(m, all));
      boxes_[q].push_back(summand_box(labels_[q].back()));
    }
}

const std::vector<LabelSet>& Resolution::level_labels(std::size_t q) const {
  if (!levels_materialized()) throw InputError("resolution levels are not materialized for this cover size");
  if (q >= labels_.size()) throw InputError("level out of range");
  return labels_[q];
}

const std::vector<Box>& Resolution::level_boxes(std::size_t q) const {
  if (!levels_materialized()) throw InputError("resolution levels are not materialized for this cover size");
  if (q >= boxes_.size()) throw InputError("level out of range");
  return boxes_[q];
}

std::uint64_t Resolution::summand_count(std::size_t q) const { return binomial(length(), q); }

Box Resolution::summand_box(const LabelSet& I) const {
  std::vector<Box> parts;
  for (int i : I) {
    if (i < 0 || static_cast<std::size_t>(i) >= length()) throw InputError("label out of range");
    parts.push_back(cover_[static_cast<std::size_t>(i)]);
  }
  return box_intersect(parts, dimension());
}

LabelSet Resolution::labels_containing(const MultiIndex& n) const {
  LabelSet out;
  for (std::size_t i = 0; i < length(); ++i)
    if (cover_[i].contains(n)) out.push_back(static_cast<int>(i));
  return out;
}

Resolution build_resolution(const BoxCover& cover) {
  if (cover.empty()) throw InputError("build_resolution: empty cover");
  return Resolution(cover);
}

// ---------------------------------------------------------------------------

const std::vector<std::uint64_t>& simplex_complex_ranks(std::size_t j) {
  if (j > 40) throw InputError("simplex_complex_ranks: too many labels");
  std::lock_guard lock(g_cache_mutex);
  auto it = g_rank_cache.find(j);
  if (it == g_rank_cache.end()) it = g_rank_cache.emplace(j, compute_simplex_ranks(j)).first;
  return it->second;
}

ChainComplexReport check_chain_complex(const Resolution& res, int degree_cap, const VerifyOptions& options,
                                       const SignRule& sign) {
  if (degree_cap < 0) throw InputError("degree cap must be nonnegative");
  const auto points = enumerate_lattice(res.dimension(), degree_cap);
  enum class Verdict { ok, fail, unverified };
  std::vector<Verdict> verdicts(points.size());
  detail::parallel_for(points.size(), options.threads, [&](std::size_t idx) {
    const LabelSet L = res.labels_containing(points[idx]);
    if (L.size() > options.max_labels) {
      verdicts[idx] = Verdict::unverified;
      return;
    }
    bool holds;
    if (!sign) {
      // psi_sign only sees the relative order of labels, which the
      // order-preserving map S(n) -> {0..j-1} keeps: one check per j.
      holds = default_chain_holds(L.size());
    } else {
      holds = simplex_is_chain_complex(L.size(), [&](Mask I, int s) {
        return sign(labels_of(I, L), L[static_cast<std::size_t>(s)]);
      });
    }
    verdicts[idx] = holds ? Verdict::ok : Verdict::fail;
  });
  ChainComplexReport report;
  report.points = points.size();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (verdicts[i] == Verdict::fail) {
      ++report.failures;
      report.failed_points.push_back(points[i]);
    } else if (verdicts[i] == Verdict::unverified) {
      ++report.unverified;
      report.unverified_points.push_back(points[i]);
    }
  }
  report.holds = report.failures == 0 && report.unverified == 0;
  return report;
}

bool verify_chain_complex(const Resolution& res, int degree_cap) {
  return check_chain_complex(res, degree_cap).holds;
}

ExactnessReport verify_exactness_pointwise(const Resolution& res, const MonomialIdeal& ideal, int degree_cap,
                                           const VerifyOptions& options) {
  if (degree_cap < 0) throw InputError("degree cap must be nonnegative");
  if (ideal.dimension() != res.dimension()) throw InputError("ideal and cover differ in dimension");
  const auto points = enumerate_lattice(res.dimension(), degree_cap);
  std::vector<PointExactness> verdicts(points.size());
  detail::parallel_for(points.size(), options.threads, [&](std::size_t idx) {
    PointExactness& v = verdicts[idx];
    v.point = points[idx];
    v.labels = res.labels_containing(v.point);
    const std::size_t j = v.labels.size();
    if (j > options.max_labels) return;
    v.verified = true;
    // Ranks depend on j alone, for the same reason as in check_chain_complex.
    v.ranks = simplex_complex_ranks(j);
    for (std::size_t q = 0; q <= j; ++q) v.dims.push_back(binomial(j, q));
    bool homology_vanishes = true;
    for (std::size_t q = 1; q <= j; ++q)
      if (v.dims[q] != v.ranks[q] + v.ranks[q - 1]) homology_vanishes = false;
    const bool kernel_full = v.ranks[0] == 0;  // A_0 has one basis vector at n
    v.kernel_matches_ideal = kernel_full == ideal.contains(v.point);
    v.exact = homology_vanishes && v.kernel_matches_ideal;
  });
  ExactnessReport report;
  report.points = points.size();
  for (auto& v : verdicts) {
    if (!v.verified) ++report.unverified;
    else if (!v.exact) ++report.failures;
    if (options.keep_all_points || !v.verified || !v.exact) report.details.push_back(std::move(v));
  }
  report.exact = report.failures == 0 && report.unverified == 0;
  return report;
}

// ---------------------------------------------------------------------------

ShiftAmplitude normalized_shift(const WeightFunction& w) {
  return [w](const Box&, std::size_t i, const MultiIndex& n) { return std::sqrt(w.ratio(n.raised(i), n)); };
}

namespace {

CoefficientVector<double> apply_shift(const Resolution& res, const CoefficientVector<double>& x, std::size_t i,
                                      const ShiftAmplitude& amplitude) {
  CoefficientVector<double> y;
  y.level = x.level;
  for (const auto& [key, v] : x.amplitudes) {
    const auto& [I, n] = key;
    const Box box = res.summand_box(I);
    MultiIndex up = n.raised(i);
    if (!box.contains(up)) continue;
    y.add(I, up, amplitude(box, i, n) * v);
  }
  return y;
}

}  // namespace

ModuleMapReport check_module_map(const Resolution& res, std::size_t q, int degree_cap, const ShiftAmplitude& source,
                                 const ShiftAmplitude& target, const VerifyOptions& options, double tolerance) {
  if (degree_cap < 0) throw InputError("degree cap must be nonnegative");
  if (q >= res.length()) throw InputError("check_module_map: level out of range");
  const std::size_t m = res.dimension();
  const auto points = enumerate_lattice(m, degree_cap);
  struct Slot {
    double defect = 0.0;
    std::size_t checked = 0;
    bool unverified = false;
  };
  std::vector<Slot> slots(points.size());
  detail::parallel_for(points.size(), options.threads, [&](std::size_t idx) {
    const MultiIndex& n = points[idx];
    const LabelSet L = res.labels_containing(n);
    Slot& slot = slots[idx];
    if (L.size() > options.max_labels) {
      slot.unverified = true;
      return;
    }
    // Basis vectors e_{I,n} exist exactly for I inside S(n).
    for (Mask mask : masks_of_size(L.size(), q)) {
      CoefficientVector<double> e;
      e.level = q;
      e.add(labels_of(mask, L), n, 1.0);
      const auto image = psi_apply(res, q, e);
      for (std::size_t i = 0; i < m; ++i) {
        const auto lhs = psi_apply(res, q, apply_shift(res, e, i, source));
        const auto rhs = apply_shift(res, image, i, target);
        for (const auto& [key, v] : lhs.amplitudes)
          slot.defect = std::max(slot.defect, std::abs(v - rhs.at(key.first, key.second)));
        for (const auto& [key, v] : rhs.amplitudes)
          slot.defect = std::max(slot.defect, std::abs(v - lhs.at(key.first, key.second)));
        ++slot.checked;
      }
    }
  });
  ModuleMapReport report;
  for (const auto& s : slots) {
    report.max_defect = std::max(report.max_defect, s.defect);
    report.vectors_checked += s.checked;
    report.unverified_points += s.unverified ? 1 : 0;
  }
  report.holds = report.unverified_points == 0 && report.max_defect <= tolerance;
  return report;
}

bool verify_module_map(const Resolution& res, const WeightFunction& w, std::size_t q, int degree_cap) {
  if (w.dimension() != res.dimension()) throw InputError("weights and cover differ in dimension");
  const auto amp = normalized_shift(w);
  return check_module_map(res, q, degree_cap, amp, amp).holds;
}

PointDifferential point_differential(const Resolution& res, std::size_t q, const MultiIndex& n) {
  const LabelSet L = res.labels_containing(n);
  if (L.size() > 30) throw InputError("point_differential: too many labels at this point");
  PointDifferential d;
  for (Mask c : masks_of_size(L.size(), q)) d.cols.push_back(labels_of(c, L));
  for (Mask r : masks_of_size(L.size(), q + 1)) d.rows.push_back(labels_of(r, L));
  d.entries.assign(d.rows.size(), std::vector<int>(d.cols.size(), 0));
  for (std::size_t c = 0; c < d.cols.size(); ++c)
    for (int s : L) {
      if (std::binary_search(d.cols[c].begin(), d.cols[c].end(), s)) continue;
      LabelSet J = d.cols[c];
      J.insert(std::lower_bound(J.begin(), J.end(), s), s);
      const auto r = std::lower_bound(d.rows.begin(), d.rows.end(), J, colex_less) - d.rows.begin();
      d.entries[static_cast<std::size_t>(r)][c] = psi_sign(d.cols[c], s);
    }
  return d;
}

std::int64_t euler_indicator(const Resolution& res, const MultiIndex& n) {
  const std::size_t j = res.labels_containing(n).size();
  __int128 total = 0;
  for (std::size_t q = 1; q <= j; ++q) total += (q % 2 ? 1 : -1) * binomial128(j, q);
  return static_cast<std::int64_t>(total);
}

}  // namespace bergman
