#pragma once

// Multi-indices, monomial ideals and boxes in N^m.
//
// Coordinates are 0-based everywhere in the API. Only the textual forms
// produced by to_string() and the report writers are 1-based.

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bergman {

class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> exponents);
  MultiIndex(std::initializer_list<int> exponents)
      : MultiIndex(std::vector<int>(exponents)) {}

  static MultiIndex zero(std::size_t m) { return MultiIndex(std::vector<int>(m, 0)); }
  static MultiIndex unit(std::size_t m, std::size_t i);

  std::size_t size() const { return exps_.size(); }
  int operator[](std::size_t i) const { return exps_[i]; }
  std::span<const int> exponents() const { return exps_; }
  int degree() const;

  /// n + e_i
  MultiIndex raised(std::size_t i) const;
  /// n - e_i, or nullopt when n[i] == 0.
  std::optional<MultiIndex> lowered(std::size_t i) const;
  MultiIndex with(std::size_t i, int value) const;

  /// Componentwise <=, i.e. z^this divides z^other.
  bool divides(const MultiIndex& other) const;

  /// "(1,0,2)"
  std::string to_string() const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  /// Lexicographic.
  friend auto operator<=>(const MultiIndex& a, const MultiIndex& b) { return a.exps_ <=> b.exps_; }

 private:
  std::vector<int> exps_;
};

/// Graded lexicographic order: total degree first, then lexicographic.
bool grlex_less(const MultiIndex& a, const MultiIndex& b);

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& n) const noexcept;
};

/// Strictly increasing list of coordinates (0-based). Empty is allowed.
class Shuffle {
 public:
  Shuffle() = default;
  explicit Shuffle(std::vector<int> coordinates);
  Shuffle(std::initializer_list<int> coordinates) : Shuffle(std::vector<int>(coordinates)) {}

  std::size_t size() const { return coords_.size(); }
  bool empty() const { return coords_.empty(); }
  int operator[](std::size_t i) const { return coords_[i]; }
  std::span<const int> coordinates() const { return coords_; }
  bool contains(int coordinate) const;
  /// Position of coordinate in the shuffle, or nullopt.
  std::optional<std::size_t> position(int coordinate) const;

  friend bool operator==(const Shuffle&, const Shuffle&) = default;
  friend auto operator<=>(const Shuffle&, const Shuffle&) = default;

 private:
  std::vector<int> coords_;
};

/// The box {n in N^m : n[shuffle[i]] <= bounds[i]}.
class Box {
 public:
  Box(std::size_t dimension, Shuffle shuffle, std::vector<int> bounds);
  /// Box without constrained coordinates (the whole lattice).
  static Box full(std::size_t dimension) { return Box(dimension, Shuffle{}, {}); }

  std::size_t dimension() const { return dim_; }
  const Shuffle& shuffle() const { return shuffle_; }
  std::span<const int> bounds() const { return bounds_; }
  std::optional<int> bound_for(int coordinate) const;

  bool contains(const MultiIndex& n) const;
  /// True when every lattice point of *this lies in other.
  bool is_subset_of(const Box& other) const;
  /// Finite iff every coordinate is constrained.
  bool is_finite() const { return shuffle_.size() == dim_; }

  /// "{n1<=0, n3<=2}" (1-based); the full box prints as "{}".
  std::string to_string() const;

  friend bool operator==(const Box&, const Box&) = default;

 private:
  std::size_t dim_ = 0;
  Shuffle shuffle_;
  std::vector<int> bounds_;
};

class MonomialIdeal {
 public:
  /// Duplicated generators are dropped; lengths must all equal m.
  MonomialIdeal(std::size_t dimension, std::vector<MultiIndex> generators);
  static MonomialIdeal zero(std::size_t dimension) { return MonomialIdeal(dimension, {}); }

  std::size_t dimension() const { return dim_; }
  std::span<const MultiIndex> generators() const { return gens_; }
  bool empty() const { return gens_.empty(); }
  /// Contains the constant monomial 1.
  bool is_unit() const;

  bool contains(const MultiIndex& n) const;
  /// Drops every generator divisible by another generator.
  MonomialIdeal minimized() const;
  bool is_minimal() const;

 private:
  std::size_t dim_ = 0;
  std::vector<MultiIndex> gens_;
};

bool ideal_contains(const MonomialIdeal& ideal, const MultiIndex& n);

class BoxCover {
 public:
  BoxCover(std::size_t dimension, std::vector<Box> boxes);

  std::size_t dimension() const { return dim_; }
  std::span<const Box> boxes() const { return boxes_; }
  std::size_t size() const { return boxes_.size(); }
  bool empty() const { return boxes_.empty(); }
  const Box& operator[](std::size_t i) const { return boxes_[i]; }

  bool contains(const MultiIndex& n) const;

 private:
  std::size_t dim_ = 0;
  std::vector<Box> boxes_;
};

/// Complement C(J) of a monomial ideal J. The empty ideal gives the whole
/// lattice; a box is the complement of the ideal of pure powers
/// z_j^{b_j + 1}.
class LatticeRegion {
 public:
  explicit LatticeRegion(MonomialIdeal ideal);
  static LatticeRegion full(std::size_t dimension) { return LatticeRegion(MonomialIdeal::zero(dimension)); }
  static LatticeRegion from_box(const Box& box);
  static LatticeRegion complement_of(const MonomialIdeal& ideal) { return LatticeRegion(ideal); }

  std::size_t dimension() const { return ideal_.dimension(); }
  const MonomialIdeal& ideal() const { return ideal_; }
  bool contains(const MultiIndex& n) const { return !ideal_.contains(n); }
  bool is_full() const { return ideal_.empty(); }

 private:
  MonomialIdeal ideal_;
};

/// One box per tuple s in {1..m}^l (l = number of generators of the
/// minimized ideal), deduplicated, in order of first appearance. Tuples that
/// would need a negative bound are skipped. Throws InputError if the tuple
/// count exceeds max_tuples.
BoxCover complement_cover(const MonomialIdeal& ideal, std::size_t max_tuples = 50'000'000);

/// Removes boxes contained in another box of the cover (the first of two
/// equal boxes is kept).
BoxCover prune_cover(const BoxCover& cover);

/// Intersection; the empty list gives the full box.
Box box_intersect(std::span<const Box> boxes, std::size_t dimension);
Box box_intersect(const Box& a, const Box& b);

/// All n in N^m with |n| <= degree_cap, grlex order.
std::vector<MultiIndex> enumerate_lattice(std::size_t dimension, int degree_cap);
/// All n with |n| == degree, lexicographic order.
std::vector<MultiIndex> enumerate_shell(std::size_t dimension, int degree);
/// Points of the region with |n| <= degree_cap, grlex order.
std::vector<MultiIndex> enumerate_region(const LatticeRegion& region, int degree_cap);

}  // namespace bergman
