#include "bergman/lattice.hpp"

#include <algorithm>
#include <numeric>

#include "bergman/errors.hpp"

namespace bergman {

MultiIndex::MultiIndex(std::vector<int> exponents) : exps_(std::move(exponents)) {
  for (int e : exps_)
    if (e < 0) throw InputError("multi-index entries must be nonnegative");
}

MultiIndex MultiIndex::unit(std::size_t m, std::size_t i) {
  if (i >= m) throw InputError("unit vector coordinate out of range");
  std::vector<int> v(m, 0);
  v[i] = 1;
  return MultiIndex(std::move(v));
}

int MultiIndex::degree() const { return std::accumulate(exps_.begin(), exps_.end(), 0); }

MultiIndex MultiIndex::raised(std::size_t i) const {
  MultiIndex r = *this;
  ++r.exps_.at(i);
  return r;
}

std::optional<MultiIndex> MultiIndex::lowered(std::size_t i) const {
  if (exps_.at(i) == 0) return std::nullopt;
  MultiIndex r = *this;
  --r.exps_[i];
  return r;
}

MultiIndex MultiIndex::with(std::size_t i, int value) const {
  if (value < 0) throw InputError("multi-index entries must be nonnegative");
  MultiIndex r = *this;
  r.exps_.at(i) = value;
  return r;
}

bool MultiIndex::divides(const MultiIndex& other) const {
  if (other.size() != size()) throw InputError("multi-index dimension mismatch");
  for (std::size_t i = 0; i < exps_.size(); ++i)
    if (exps_[i] > other.exps_[i]) return false;
  return true;
}

std::string MultiIndex::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(exps_[i]);
  }
  return s + ")";
}

bool grlex_less(const MultiIndex& a, const MultiIndex& b) {
  const int da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  return a < b;
}

std::size_t MultiIndexHash::operator()(const MultiIndex& n) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (int e : n.exponents()) {
    h ^= static_cast<std::size_t>(e) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

// ---------------------------------------------------------------------------

Shuffle::Shuffle(std::vector<int> coordinates) : coords_(std::move(coordinates)) {
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (coords_[i] < 0) throw InputError("shuffle entries must be nonnegative");
    if (i && coords_[i] <= coords_[i - 1]) throw InputError("shuffle must be strictly increasing");
  }
}

bool Shuffle::contains(int coordinate) const {
  return std::binary_search(coords_.begin(), coords_.end(), coordinate);
}

std::optional<std::size_t> Shuffle::position(int coordinate) const {
  auto it = std::lower_bound(coords_.begin(), coords_.end(), coordinate);
  if (it == coords_.end() || *it != coordinate) return std::nullopt;
  return static_cast<std::size_t>(it - coords_.begin());
}

// ---------------------------------------------------------------------------

Box::Box(std::size_t dimension, Shuffle shuffle, std::vector<int> bounds)
    : dim_(dimension), shuffle_(std::move(shuffle)), bounds_(std::move(bounds)) {
  if (shuffle_.size() != bounds_.size()) throw InputError("box: shuffle and bounds differ in length");
  if (!shuffle_.empty() && shuffle_[shuffle_.size() - 1] >= static_cast<int>(dim_))
    throw InputError("box: constrained coordinate out of range");
  for (int b : bounds_)
    if (b < 0) throw InputError("box: bounds must be nonnegative");
}

std::optional<int> Box::bound_for(int coordinate) const {
  if (auto pos = shuffle_.position(coordinate)) return bounds_[*pos];
  return std::nullopt;
}

bool Box::contains(const MultiIndex& n) const {
  if (n.size() != dim_) throw InputError("box: dimension mismatch");
  for (std::size_t i = 0; i < bounds_.size(); ++i)
    if (n[static_cast<std::size_t>(shuffle_[i])] > bounds_[i]) return false;
  return true;
}

bool Box::is_subset_of(const Box& other) const {
  if (other.dim_ != dim_) throw InputError("box: dimension mismatch");
  // Every constraint of other must be implied by a tighter one here.
  for (std::size_t i = 0; i < other.bounds_.size(); ++i) {
    auto mine = bound_for(other.shuffle_[i]);
    if (!mine || *mine > other.bounds_[i]) return false;
  }
  return true;
}

std::string Box::to_string() const {
  std::string s = "{";
  for (std::size_t i = 0; i < bounds_.size(); ++i) {
    if (i) s += ", ";
    s += "n" + std::to_string(shuffle_[i] + 1) + "<=" + std::to_string(bounds_[i]);
  }
  return s + "}";
}

// ---------------------------------------------------------------------------

MonomialIdeal::MonomialIdeal(std::size_t dimension, std::vector<MultiIndex> generators)
    : dim_(dimension) {
  for (auto& g : generators) {
    if (g.size() != dim_) throw InputError("ideal generator has wrong length");
    if (std::find(gens_.begin(), gens_.end(), g) == gens_.end()) gens_.push_back(std::move(g));
  }
}

bool MonomialIdeal::is_unit() const {
  return std::any_of(gens_.begin(), gens_.end(), [](const MultiIndex& g) { return g.degree() == 0; });
}

bool MonomialIdeal::contains(const MultiIndex& n) const {
  if (n.size() != dim_) throw InputError("ideal membership: dimension mismatch");
  return std::any_of(gens_.begin(), gens_.end(), [&](const MultiIndex& g) { return g.divides(n); });
}

MonomialIdeal MonomialIdeal::minimized() const {
  std::vector<MultiIndex> kept;
  for (std::size_t i = 0; i < gens_.size(); ++i) {
    bool redundant = false;
    for (std::size_t j = 0; j < gens_.size() && !redundant; ++j)
      redundant = j != i && gens_[j].divides(gens_[i]);
    if (!redundant) kept.push_back(gens_[i]);
  }
  return MonomialIdeal(dim_, std::move(kept));
}

bool MonomialIdeal::is_minimal() const { return minimized().generators().size() == gens_.size(); }

bool ideal_contains(const MonomialIdeal& ideal, const MultiIndex& n) { return ideal.contains(n); }

// ---------------------------------------------------------------------------

BoxCover::BoxCover(std::size_t dimension, std::vector<Box> boxes)
    : dim_(dimension), boxes_(std::move(boxes)) {
  for (const auto& b : boxes_)
    if (b.dimension() != dim_) throw InputError("cover: box dimension mismatch");
}

bool BoxCover::contains(const MultiIndex& n) const {
  return std::any_of(boxes_.begin(), boxes_.end(), [&](const Box& b) { return b.contains(n); });
}

LatticeRegion::LatticeRegion(MonomialIdeal ideal) : ideal_(std::move(ideal)) {}

LatticeRegion LatticeRegion::from_box(const Box& box) {
  std::vector<MultiIndex> gens;
  const auto m = box.dimension();
  for (std::size_t i = 0; i < box.shuffle().size(); ++i)
    gens.push_back(MultiIndex::zero(m).with(static_cast<std::size_t>(box.shuffle()[i]), box.bounds()[i] + 1));
  return LatticeRegion(MonomialIdeal(m, std::move(gens)));
}

// ---------------------------------------------------------------------------

BoxCover complement_cover(const MonomialIdeal& ideal, std::size_t max_tuples) {
  const MonomialIdeal min = ideal.minimized();
  const std::size_t m = min.dimension();
  const auto gens = min.generators();
  const std::size_t l = gens.size();
  if (min.is_unit()) return BoxCover(m, {});
  if (m == 0) return BoxCover(m, {Box::full(0)});

  std::size_t tuples = 1;
  for (std::size_t i = 0; i < l; ++i) {
    if (tuples > max_tuples / m) throw InputError("complement_cover: too many generator tuples");
    tuples *= m;
  }

  std::vector<Box> boxes;
  std::vector<std::size_t> s(l, 0);  // odometer over {0..m-1}^l
  constexpr int kUnset = -1;
  std::vector<int> bound(m);
  for (std::size_t t = 0; t < tuples; ++t) {
    std::fill(bound.begin(), bound.end(), kUnset);
    bool empty = false;
    for (std::size_t i = 0; i < l && !empty; ++i) {
      const int b = gens[i][s[i]] - 1;
      if (b < 0) {
        empty = true;
      } else if (bound[s[i]] == kUnset || b < bound[s[i]]) {
        bound[s[i]] = b;
      }
    }
    if (!empty) {
      std::vector<int> coords, bounds;
      for (std::size_t j = 0; j < m; ++j)
        if (bound[j] != kUnset) {
          coords.push_back(static_cast<int>(j));
          bounds.push_back(bound[j]);
        }
      Box box(m, Shuffle(std::move(coords)), std::move(bounds));
      if (std::find(boxes.begin(), boxes.end(), box) == boxes.end()) boxes.push_back(std::move(box));
    }
    for (std::size_t i = 0; i < l; ++i) {
      if (++s[i] < m) break;
      s[i] = 0;
    }
  }
  return BoxCover(m, std::move(boxes));
}

BoxCover prune_cover(const BoxCover& cover) {
  const auto boxes = cover.boxes();
  std::vector<Box> kept;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    bool redundant = false;
    for (std::size_t j = 0; j < boxes.size() && !redundant; ++j) {
      if (j == i || !boxes[i].is_subset_of(boxes[j])) continue;
      // Of two equal boxes keep the earlier one.
      redundant = !(boxes[j].is_subset_of(boxes[i])) || j < i;
    }
    if (!redundant) kept.push_back(boxes[i]);
  }
  return BoxCover(cover.dimension(), std::move(kept));
}

Box box_intersect(const Box& a, const Box& b) {
  if (a.dimension() != b.dimension()) throw InputError("box_intersect: dimension mismatch");
  std::vector<int> coords, bounds;
  const auto ca = a.shuffle().coordinates(), cb = b.shuffle().coordinates();
  std::size_t i = 0, j = 0;
  while (i < ca.size() || j < cb.size()) {
    if (j == cb.size() || (i < ca.size() && ca[i] < cb[j])) {
      coords.push_back(ca[i]);
      bounds.push_back(a.bounds()[i++]);
    } else if (i == ca.size() || cb[j] < ca[i]) {
      coords.push_back(cb[j]);
      bounds.push_back(b.bounds()[j++]);
    } else {
      coords.push_back(ca[i]);
      bounds.push_back(std::min(a.bounds()[i++], b.bounds()[j++]));
    }
  }
  return Box(a.dimension(), Shuffle(std::move(coords)), std::move(bounds));
}

Box box_intersect(std::span<const Box> boxes, std::size_t dimension) {
  Box acc = Box::full(dimension);
  for (const auto& b : boxes) acc = box_intersect(acc, b);
  return acc;
}

// ---------------------------------------------------------------------------

namespace {

void compositions(std::size_t pos, int remaining, std::vector<int>& cur, std::vector<MultiIndex>& out) {
  if (pos + 1 == cur.size()) {
    cur[pos] = remaining;
    out.emplace_back(cur);
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    cur[pos] = v;
    compositions(pos + 1, remaining - v, cur, out);
  }
}

}  // namespace

std::vector<MultiIndex> enumerate_shell(std::size_t dimension, int degree) {
  std::vector<MultiIndex> out;
  if (degree < 0) return out;
  if (dimension == 0) {
    if (degree == 0) out.emplace_back(std::vector<int>{});
    return out;
  }
  std::vector<int> cur(dimension, 0);
  compositions(0, degree, cur, out);
  return out;
}

std::vector<MultiIndex> enumerate_lattice(std::size_t dimension, int degree_cap) {
  if (degree_cap < 0) throw InputError("degree cap must be nonnegative");
  std::vector<MultiIndex> out;
  for (int d = 0; d <= degree_cap; ++d) {
    auto shell = enumerate_shell(dimension, d);
    out.insert(out.end(), std::make_move_iterator(shell.begin()), std::make_move_iterator(shell.end()));
  }
  return out;
}

std::vector<MultiIndex> enumerate_region(const LatticeRegion& region, int degree_cap) {
  auto all = enumerate_lattice(region.dimension(), degree_cap);
  std::vector<MultiIndex> out;
  for (auto& n : all)
    if (region.contains(n)) out.push_back(std::move(n));
  return out;
}

}  // namespace bergman
