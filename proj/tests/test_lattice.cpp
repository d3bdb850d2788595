#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "bergman/errors.hpp"
#include "bergman/lattice.hpp"
#include "support.hpp"

using namespace bergman;

namespace {

std::vector<std::string> box_strings(const BoxCover& c) {
  std::vector<std::string> out;
  for (const auto& b : c.boxes()) out.push_back(b.to_string());
  return out;
}

std::size_t choose(std::size_t n, std::size_t k) {
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("multi-index basics") {
  const MultiIndex n{1, 0, 2};
  CHECK(n.degree() == 3);
  CHECK(n.to_string() == "(1,0,2)");
  CHECK(n.raised(1) == MultiIndex{1, 1, 2});
  CHECK(n.lowered(0) == MultiIndex{0, 0, 2});
  CHECK_FALSE(n.lowered(1).has_value());
  CHECK(MultiIndex{1, 0, 1}.divides(n));
  CHECK_FALSE(MultiIndex{0, 1, 0}.divides(n));
  CHECK_THROWS_AS(MultiIndex({1, -1}), InputError);
  CHECK(grlex_less(MultiIndex{2, 0}, MultiIndex{0, 3}));
  CHECK(grlex_less(MultiIndex{0, 2}, MultiIndex{1, 1}));
}

TEST_CASE("shuffles and boxes") {
  CHECK_THROWS_AS(Shuffle({1, 1}), InputError);
  CHECK_THROWS_AS(Shuffle({2, 0}), InputError);
  const Box b(3, Shuffle{0, 2}, {0, 2});
  CHECK(b.to_string() == "{n1<=0, n3<=2}");
  CHECK(b.contains(MultiIndex{0, 9, 2}));
  CHECK_FALSE(b.contains(MultiIndex{1, 0, 0}));
  CHECK(Box::full(2).to_string() == "{}");
  CHECK(b.is_subset_of(Box(3, Shuffle{0}, {0})));
  CHECK_FALSE(Box(3, Shuffle{0}, {0}).is_subset_of(b));
}

TEST_CASE("ideal membership") {
  const MonomialIdeal I(2, {MultiIndex{1, 1}});
  CHECK(ideal_contains(I, MultiIndex{2, 3}));
  CHECK_FALSE(ideal_contains(I, MultiIndex{0, 3}));
  CHECK_FALSE(ideal_contains(MonomialIdeal::zero(2), MultiIndex{0, 0}));
  CHECK(MonomialIdeal(2, {MultiIndex{0, 0}}).is_unit());
  const MonomialIdeal J(2, {MultiIndex{1, 1}, MultiIndex{2, 1}, MultiIndex{1, 1}});
  CHECK(J.generators().size() == 2);
  CHECK(J.minimized().generators().size() == 1);
  CHECK_THROWS_AS(MonomialIdeal(2, {MultiIndex{1, 1, 0}}), InputError);
}

TEST_CASE("enumeration") {
  const auto all = enumerate_lattice(2, 1);
  REQUIRE(all.size() == 3);
  CHECK(all[0] == MultiIndex{0, 0});
  CHECK(all[1] == MultiIndex{0, 1});
  CHECK(all[2] == MultiIndex{1, 0});

  const auto region = enumerate_region(LatticeRegion(MonomialIdeal(2, {MultiIndex{1, 1}})), 2);
  const std::vector<MultiIndex> expected{{0, 0}, {0, 1}, {1, 0}, {0, 2}, {2, 0}};
  CHECK(region == expected);

  CHECK(enumerate_region(LatticeRegion(MonomialIdeal(2, {MultiIndex{0, 0}})), 5).empty());

  for (std::size_t m = 1; m <= 4; ++m)
    for (int d = 0; d <= 6; ++d) CHECK(enumerate_shell(m, d).size() == choose(d + m - 1, m - 1));

  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    const auto I = testing::random_ideal(rng);
    const auto pts = enumerate_region(LatticeRegion(I), 8);
    CHECK(std::is_sorted(pts.begin(), pts.end(), grlex_less));
    CHECK(std::adjacent_find(pts.begin(), pts.end()) == pts.end());
    std::size_t inside = 0;
    for (const auto& n : enumerate_lattice(I.dimension(), 8)) inside += !I.contains(n);
    CHECK(pts.size() == inside);
    for (const auto& n : pts) CHECK_FALSE(I.contains(n));
  }
}

TEST_CASE("complement cover examples") {
  CHECK(box_strings(complement_cover(MonomialIdeal(2, {MultiIndex{1, 1}}))) ==
        std::vector<std::string>{"{n1<=0}", "{n2<=0}"});
  CHECK(box_strings(complement_cover(MonomialIdeal(2, {MultiIndex{2, 0}, MultiIndex{0, 1}}))) ==
        std::vector<std::string>{"{n1<=1, n2<=0}"});
  CHECK(box_strings(complement_cover(MonomialIdeal(3, {MultiIndex{1, 0, 0}}))) ==
        std::vector<std::string>{"{n1<=0}"});
  CHECK(complement_cover(MonomialIdeal(2, {MultiIndex{0, 0}})).empty());
  CHECK(box_strings(complement_cover(MonomialIdeal::zero(2))) == std::vector<std::string>{"{}"});
}

TEST_CASE("prune cover examples") {
  const BoxCover c(2, {Box(2, Shuffle{0}, {0}), Box(2, Shuffle{0, 1}, {0, 3})});
  CHECK(box_strings(prune_cover(c)) == std::vector<std::string>{"{n1<=0}"});
  const BoxCover d(2, {Box(2, Shuffle{0}, {0}), Box(2, Shuffle{1}, {0})});
  CHECK(box_strings(prune_cover(d)) == box_strings(d));
  const BoxCover e(2, {Box(2, Shuffle{1}, {2}), Box(2, Shuffle{1}, {2})});
  CHECK(prune_cover(e).size() == 1);

  const MonomialIdeal I(2, {MultiIndex{1, 1}, MultiIndex{2, 0}});
  const auto raw = complement_cover(I), pruned = prune_cover(raw);
  for (const auto& n : enumerate_lattice(2, 12)) CHECK(raw.contains(n) == pruned.contains(n));
}

TEST_CASE("cover matches divisibility on random ideals") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 40; ++t) {
    const auto I = testing::random_ideal(rng);
    const auto raw = complement_cover(I);
    const auto pruned = prune_cover(raw);
    CHECK(pruned.size() <= raw.size());
    for (const auto& n : enumerate_lattice(I.dimension(), 10)) {
      CHECK(raw.contains(n) == !ideal_contains(I, n));
      CHECK(pruned.contains(n) == raw.contains(n));
    }
  }
}

TEST_CASE("box intersection is set intersection") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const std::size_t m = 1 + rng() % 4;
    auto random_box = [&] {
      std::vector<int> coords, bounds;
      for (std::size_t c = 0; c < m; ++c)
        if (rng() % 2) {
          coords.push_back(static_cast<int>(c));
          bounds.push_back(static_cast<int>(rng() % 4));
        }
      return Box(m, Shuffle(coords), bounds);
    };
    const Box a = random_box(), b = random_box(), c = random_box();
    const std::vector<Box> abc{a, b, c};
    const Box ab = box_intersect(a, b), all = box_intersect(abc, m);
    for (const auto& n : enumerate_lattice(m, 6)) {
      CHECK(ab.contains(n) == (a.contains(n) && b.contains(n)));
      CHECK(all.contains(n) == (a.contains(n) && b.contains(n) && c.contains(n)));
    }
  }
  CHECK(box_intersect(std::vector<Box>{}, 3) == Box::full(3));
}

TEST_CASE("box regions") {
  const Box b(2, Shuffle{0, 1}, {1, 2});
  const auto region = LatticeRegion::from_box(b);
  for (const auto& n : enumerate_lattice(2, 8)) CHECK(region.contains(n) == b.contains(n));
  CHECK(LatticeRegion::full(3).is_full());
}
