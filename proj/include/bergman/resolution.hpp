#pragma once

// The complex 0 -> closure(I) -> A_0 -> A_1 -> ... -> A_k -> 0 built from a
// box cover B_0..B_{k-1} of C(I). A_q is the sum over q-element label sets
// I of the box space on B_I = intersection of the B_i, i in I; A_0 is the
// full lattice (label set {}). Psi_q adds one label s to I with sign
// (-1)^{#{i in I : i < s}} and keeps only coefficients that lie in the
// smaller box.
//
// In the coefficient of a fixed lattice point n only labels in
// S(n) = {i : n in B_i} survive, so every check runs point by point on the
// augmented cochain complex of the simplex on S(n).

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bergman/errors.hpp"
#include "bergman/lattice.hpp"
#include "bergman/weights.hpp"

namespace bergman {

/// Strictly increasing box labels (0-based).
using LabelSet = std::vector<int>;

/// Colex: compare largest elements first.
bool colex_less(const LabelSet& a, const LabelSet& b);

/// (-1)^{#{i in I : i < s}}.
int psi_sign(const LabelSet& I, int s);

class Resolution {
 public:
  /// Levels are stored explicitly only for k <= materialize_limit; larger
  /// covers are handled point by point.
  explicit Resolution(BoxCover cover, std::size_t materialize_limit = 16);

  const BoxCover& cover() const { return cover_; }
  std::size_t dimension() const { return cover_.dimension(); }
  std::size_t length() const { return cover_.size(); }

  bool levels_materialized() const { return !labels_.empty(); }
  /// Label sets of level q (0..k) in colex order, and their boxes.
  const std::vector<LabelSet>& level_labels(std::size_t q) const;
  const std::vector<Box>& level_boxes(std::size_t q) const;
  /// C(k, q), saturating at UINT64_MAX.
  std::uint64_t summand_count(std::size_t q) const;

  /// B_I (the full box for I = {}).
  Box summand_box(const LabelSet& I) const;
  /// S(n).
  LabelSet labels_containing(const MultiIndex& n) const;

 private:
  BoxCover cover_;
  std::vector<std::vector<LabelSet>> labels_;
  std::vector<std::vector<Box>> boxes_;
};

/// InputError on an empty cover.
Resolution build_resolution(const BoxCover& cover);

template <typename Scalar>
struct CoefficientVector {
  std::size_t level = 0;
  std::map<std::pair<LabelSet, MultiIndex>, Scalar> amplitudes;

  void add(const LabelSet& I, const MultiIndex& n, Scalar v) {
    auto [it, fresh] = amplitudes.try_emplace({I, n}, v);
    if (!fresh) it->second += v;
  }
  Scalar at(const LabelSet& I, const MultiIndex& n) const {
    auto it = amplitudes.find({I, n});
    return it == amplitudes.end() ? Scalar{} : it->second;
  }
};

/// Psi_q x for x at level q, 0 <= q < k. Zero amplitudes are dropped from
/// the result.
template <typename Scalar>
CoefficientVector<Scalar> psi_apply(const Resolution& res, std::size_t q, const CoefficientVector<Scalar>& x) {
  if (q >= res.length()) throw InputError("psi_apply: level out of range");
  if (x.level != q) throw InputError("psi_apply: vector is not at the requested level");
  CoefficientVector<Scalar> y;
  y.level = q + 1;
  const auto k = static_cast<int>(res.length());
  for (const auto& [key, v] : x.amplitudes) {
    const auto& [I, n] = key;
    if (I.size() != q) throw InputError("psi_apply: label set size differs from the level");
    if (!res.summand_box(I).contains(n)) throw InputError("psi_apply: amplitude outside its summand box");
    for (int s = 0; s < k; ++s) {
      if (std::binary_search(I.begin(), I.end(), s)) continue;
      if (!res.cover()[static_cast<std::size_t>(s)].contains(n)) continue;
      LabelSet J = I;
      J.insert(std::lower_bound(J.begin(), J.end(), s), s);
      y.add(J, n, static_cast<Scalar>(psi_sign(I, s)) * v);
    }
  }
  std::erase_if(y.amplitudes, [](const auto& e) { return e.second == Scalar{}; });
  return y;
}

struct VerifyOptions {
  /// Points with |S(n)| above this are reported as unverified: their
  /// coefficient complex has 2^|S(n)| basis vectors.
  std::size_t max_labels = 20;
  unsigned threads = 1;
  /// Keep a verdict for every point, not only failures and unverified ones.
  bool keep_all_points = false;
};

/// Sign of adding s to I; the default is psi_sign.
using SignRule = std::function<int(const LabelSet& I, int s)>;

struct ChainComplexReport {
  bool holds = false;
  std::size_t points = 0;
  std::size_t unverified = 0;
  std::size_t failures = 0;
  std::vector<MultiIndex> failed_points;
  std::vector<MultiIndex> unverified_points;
};

/// Psi_{q+1} Psi_q e_{I,n} = 0 in integer arithmetic for every basis vector
/// with |n| <= cap and every q. A non-default sign rule is a fault-injection
/// hook.
ChainComplexReport check_chain_complex(const Resolution& res, int degree_cap, const VerifyOptions& options = {},
                                       const SignRule& sign = {});
bool verify_chain_complex(const Resolution& res, int degree_cap);

struct PointExactness {
  MultiIndex point;
  LabelSet labels;  // S(n)
  bool verified = false;
  bool exact = false;
  /// Kernel of Psi_0 at n is full iff z^n is in the ideal.
  bool kernel_matches_ideal = false;
  std::vector<std::uint64_t> dims;  // level q, q = 0..|S(n)|
  std::vector<std::uint64_t> ranks;  // rank of Psi_q at n
};

struct ExactnessReport {
  bool exact = false;
  std::size_t points = 0;
  std::size_t unverified = 0;
  std::size_t failures = 0;
  std::vector<PointExactness> details;  // grlex in n
};

ExactnessReport verify_exactness_pointwise(const Resolution& res, const MonomialIdeal& ideal, int degree_cap,
                                           const VerifyOptions& options = {});

/// Exact integer ranks of the coefficient complex on j labels: entry q is the
/// rank of Psi_q (q = 0..j). Cached per j for the process lifetime.
const std::vector<std::uint64_t>& simplex_complex_ranks(std::size_t j);

/// Weight of T_i on the summand box B at n; the shift itself is applied only
/// when n + e_i stays in B.
using ShiftAmplitude = std::function<double(const Box& summand, std::size_t i, const MultiIndex& n)>;

/// sqrt(omega(n + e_i)/omega(n)).
ShiftAmplitude normalized_shift(const WeightFunction& w);

struct ModuleMapReport {
  bool holds = false;
  double max_defect = 0.0;
  std::size_t vectors_checked = 0;
  std::size_t unverified_points = 0;
};

/// max over coordinates i and basis vectors e_{I,n} (|I| = q, |n| <= cap) of
/// |Psi_q(T_i e) - T_i(Psi_q e)|, where T_i uses `source` on A_q and `target`
/// on A_{q+1}. Unequal amplitude rules are a fault-injection hook.
ModuleMapReport check_module_map(const Resolution& res, std::size_t q, int degree_cap, const ShiftAmplitude& source,
                                 const ShiftAmplitude& target, const VerifyOptions& options = {},
                                 double tolerance = 1e-12);
bool verify_module_map(const Resolution& res, const WeightFunction& w, std::size_t q, int degree_cap);

/// Integer matrix of Psi_q restricted to the coefficient of n: rows are the
/// (q+1)-subsets of S(n), columns the q-subsets, both colex.
struct PointDifferential {
  std::vector<LabelSet> rows, cols;
  std::vector<std::vector<int>> entries;  // entries[row][col]
};
PointDifferential point_differential(const Resolution& res, std::size_t q, const MultiIndex& n);

/// sum_{q >= 1} (-1)^{q-1} #{I : |I| = q, n in B_I}.
std::int64_t euler_indicator(const Resolution& res, const MultiIndex& n);

}  // namespace bergman
