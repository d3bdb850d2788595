#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <unordered_map>

#include "bergman/errors.hpp"
#include "bergman/operators.hpp"
#include "support.hpp"

using namespace bergman;

namespace {

struct Dense {
  std::vector<MultiIndex> basis;
  std::unordered_map<MultiIndex, Eigen::Index, MultiIndexHash> index;
};

// Region points with |n| <= cap + 1; interior columns are |n| <= cap.
Dense dense_basis(const LatticeRegion& region, int cap) {
  Dense d;
  d.basis = enumerate_region(region, cap + 1);
  for (std::size_t i = 0; i < d.basis.size(); ++i) d.index.emplace(d.basis[i], static_cast<Eigen::Index>(i));
  return d;
}

Eigen::MatrixXd dense_shift(const Dense& d, const WeightFunction& w, std::size_t i) {
  const auto n = static_cast<Eigen::Index>(d.basis.size());
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t c = 0; c < d.basis.size(); ++c) {
    const auto up = d.basis[c].raised(i);
    auto it = d.index.find(up);
    if (it == d.index.end()) continue;
    T(it->second, static_cast<Eigen::Index>(c)) = std::sqrt(w.omega(up) / w.omega(d.basis[c]));
  }
  return T;
}

// Largest deviation between commutator_entries and the dense commutator on
// interior columns.
double commutator_mismatch(const LatticeRegion& region, const WeightFunction& w, int cap) {
  const std::size_t m = region.dimension();
  const Dense d = dense_basis(region, cap);
  std::vector<Eigen::MatrixXd> T;
  for (std::size_t i = 0; i < m; ++i) T.push_back(dense_shift(d, w, i));
  double worst = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k) {
      Eigen::MatrixXd C = T[i] * T[k].transpose() - T[k].transpose() * T[i];
      for (const auto& e : commutator_entries(i, k, region, w, cap)) {
        const auto c = d.index.at(e.source);
        auto r = d.index.find(e.target);
        REQUIRE(r != d.index.end());
        worst = std::max(worst, std::abs(C(r->second, c) - e.value));
        C(r->second, c) = 0.0;
      }
      for (std::size_t c = 0; c < d.basis.size(); ++c)
        if (d.basis[c].degree() <= cap)
          worst = std::max(worst, C.col(static_cast<Eigen::Index>(c)).cwiseAbs().maxCoeff());
    }
  return worst;
}

}  // namespace

TEST_CASE("shift amplitude examples") {
  const WeightFunction disc(EggDomain::ball(1));
  CHECK(shift_amplitude(ShiftOperator(0, LatticeRegion::full(1), disc), MultiIndex{0}) ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  const WeightFunction ball(EggDomain::ball(2));
  const auto box = LatticeRegion::from_box(Box(2, Shuffle{0}, {0}));
  CHECK(shift_amplitude(ShiftOperator(0, box, ball), MultiIndex{0, 3}) == 0.0);
  CHECK(shift_amplitude(ShiftOperator(1, LatticeRegion::full(2), ball), MultiIndex{1, 1}) ==
        doctest::Approx(std::sqrt(0.4)).epsilon(1e-14));
  CHECK_THROWS_AS(shift_amplitude(ShiftOperator(0, box, ball), MultiIndex{1, 0}), InputError);
  CHECK_THROWS_AS(ShiftOperator(2, box, ball), InputError);
}

TEST_CASE("self-commutator diagonal") {
  const WeightFunction disc(EggDomain::ball(1));
  const auto full = LatticeRegion::full(1);
  CHECK(self_commutator_diagonal(0, full, disc, MultiIndex{0}) == doctest::Approx(-0.5).epsilon(1e-14));
  for (int n = 0; n < 30; ++n)
    CHECK(self_commutator_diagonal(0, full, disc, MultiIndex{n}) ==
          doctest::Approx(-1.0 / ((n + 1.0) * (n + 2.0))).epsilon(1e-12));
  // At the top of a box only the lower term survives.
  const auto box = LatticeRegion::from_box(Box(1, Shuffle{0}, {3}));
  CHECK(self_commutator_diagonal(0, box, disc, MultiIndex{3}) == doctest::Approx(disc.ratio(MultiIndex{3}, MultiIndex{2})));
  const auto point = LatticeRegion::from_box(Box(1, Shuffle{0}, {0}));
  CHECK(self_commutator_diagonal(0, point, disc, MultiIndex{0}) == 0.0);
  CHECK_THROWS_AS(self_commutator_diagonal(0, box, disc, MultiIndex{4}), InputError);
}

TEST_CASE("diagonal commutator table equals the diagonal formula") {
  const double p[] = {1.5, 0.7};
  const WeightFunction w(EggDomain::egg(p), 0.4);
  const LatticeRegion region(MonomialIdeal(2, {MultiIndex{2, 3}}));
  for (std::size_t i = 0; i < 2; ++i) {
    for (const auto& e : commutator_entries(i, i, region, w, 10)) {
      CHECK(e.source == e.target);
      CHECK(e.value == self_commutator_diagonal(i, region, w, e.source));
    }
  }
}

TEST_CASE("cross commutators vanish across the region boundary") {
  const WeightFunction w(EggDomain::ball(2));
  const LatticeRegion region(MonomialIdeal(2, {MultiIndex{1, 1}}));
  for (const auto& e : commutator_entries(0, 1, region, w, 10)) {
    CHECK(region.contains(e.source));
    CHECK(region.contains(e.target));
  }
}

TEST_CASE("dense oracle: ball m=2, cap 6") {
  const WeightFunction w(EggDomain::ball(2));
  CHECK(commutator_mismatch(LatticeRegion::full(2), w, 6) <= 1e-12);
}

TEST_CASE("dense oracle on random regions") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 12; ++t) {
    const std::size_t m = 1 + t % 3;
    const WeightFunction w(testing::random_nested(rng, m, 2), 0.5 * (t % 3));
    CHECK(commutator_mismatch(LatticeRegion::full(m), w, 8) <= 1e-12);
    std::vector<int> coords, bounds;
    for (std::size_t c = 0; c < m; ++c)
      if (rng() % 2 || coords.empty()) {
        coords.push_back(static_cast<int>(c));
        bounds.push_back(static_cast<int>(rng() % 4));
      }
    CHECK(commutator_mismatch(LatticeRegion::from_box(Box(m, Shuffle(coords), bounds)), w, 8) <= 1e-12);
    auto I = testing::random_ideal(rng, m, 3, 4);
    while (I.dimension() != m) I = testing::random_ideal(rng, m, 3, 4);
    CHECK(commutator_mismatch(LatticeRegion(I), w, 8) <= 1e-12);
  }
}

TEST_CASE("compression identity") {
  std::mt19937_64 rng(37);
  for (int t = 0; t < 8; ++t) {
    const auto I = testing::random_ideal(rng, 3, 3, 4);
    const std::size_t m = I.dimension();
    const WeightFunction w(testing::random_egg(rng, m));
    const LatticeRegion region(I);
    const Dense full = dense_basis(LatticeRegion::full(m), 7);
    Eigen::VectorXd P(static_cast<Eigen::Index>(full.basis.size()));
    for (std::size_t c = 0; c < full.basis.size(); ++c) P(static_cast<Eigen::Index>(c)) = region.contains(full.basis[c]);
    for (std::size_t i = 0; i < m; ++i) {
      const Eigen::MatrixXd M = dense_shift(full, w, i);
      const Eigen::MatrixXd compressed = P.asDiagonal() * M * P.asDiagonal();
      const ShiftOperator T(i, region, w);
      double worst = 0.0;
      for (std::size_t c = 0; c < full.basis.size(); ++c) {
        const auto& n = full.basis[c];
        if (!region.contains(n) || n.degree() > 7) continue;
        const auto up = full.index.find(n.raised(i));
        REQUIRE(up != full.index.end());
        worst = std::max(worst, std::abs(compressed(up->second, static_cast<Eigen::Index>(c)) - T.amplitude_or_zero(n)));
      }
      CHECK(worst <= 1e-13);
    }
  }
}

TEST_CASE("projection commutator ratio") {
  const WeightFunction w(EggDomain::ball(2));
  const Box box(2, Shuffle{0}, {0});
  CHECK(projection_commutator_rho(box, w, 0, MultiIndex{0, 0}) == doctest::Approx(1.0 / 3).epsilon(1e-14));
  double prev = 1.0;
  for (int n = 0; n < 40; ++n) {
    const double r = projection_commutator_rho(box, w, 0, MultiIndex{0, n});
    CHECK(r == doctest::Approx(1.0 / (n + 3)).epsilon(1e-12));
    CHECK(r < prev);
    prev = r;
  }
  CHECK_THROWS_AS(projection_commutator_rho(box, w, 1, MultiIndex{0, 0}), InputError);
  CHECK_THROWS_AS(projection_commutator_rho(box, w, 0, MultiIndex{1, 0}), InputError);

  // Squared norm of (M P - P M) e_n on the dense truncation.
  const Dense full = dense_basis(LatticeRegion::full(2), 10);
  const Eigen::MatrixXd M = dense_shift(full, w, 0);
  Eigen::VectorXd P(static_cast<Eigen::Index>(full.basis.size()));
  for (std::size_t c = 0; c < full.basis.size(); ++c) P(static_cast<Eigen::Index>(c)) = box.contains(full.basis[c]);
  const Eigen::MatrixXd K = M * P.asDiagonal() - P.asDiagonal() * M;
  for (int n = 0; n <= 9; ++n) {
    const auto c = full.index.at(MultiIndex{0, n});
    CHECK(K.col(c).squaredNorm() == doctest::Approx(projection_commutator_rho(box, w, 0, MultiIndex{0, n})));
  }

  // Any depth-1 domain, box with a free coordinate: monotone decay along the face.
  std::mt19937_64 rng(41);
  for (int t = 0; t < 10; ++t) {
    const WeightFunction v(testing::random_egg(rng, 3));
    const Box b(3, Shuffle{1}, {static_cast<int>(rng() % 3)});
    double last = INFINITY;
    for (int d = 0; d < 60; ++d) {
      const double r = projection_commutator_rho(b, v, 1, MultiIndex{d / 2, b.bounds()[0], d - d / 2});
      CHECK(r < last);
      last = r;
    }
  }
  // m = 1: the face is a single point.
  const WeightFunction disc(EggDomain::ball(1));
  CHECK(projection_commutator_rho(Box(1, Shuffle{0}, {2}), disc, 0, MultiIndex{2}) == doctest::Approx(0.75));
}

TEST_CASE("shell decay examples") {
  ScanOptions opts;
  const auto ball = essential_normality_scan(LatticeRegion::full(2), WeightFunction(EggDomain::ball(2)), 60, opts);
  CHECK(ball.decay.decay_observed);
  CHECK(ball.decay.exponent == doctest::Approx(-1.0).epsilon(0.2));
  CHECK(std::abs(ball.decay.exponent + 1.0) <= 0.2);

  const auto disc = essential_normality_scan(LatticeRegion::full(1), WeightFunction(EggDomain::ball(1)), 60, opts);
  for (std::size_t d = 0; d < disc.shell_sup.size(); ++d)
    CHECK(disc.shell_sup[d] == doctest::Approx(1.0 / ((d + 1.0) * (d + 2.0))).epsilon(1e-12));
  CHECK(std::abs(disc.decay.exponent + 2.0) <= 0.2);

  const auto finite = essential_normality_scan(LatticeRegion::from_box(Box(2, Shuffle{0, 1}, {2, 3})),
                                               WeightFunction(EggDomain::ball(2)), 20, opts);
  for (std::size_t d = 6; d < finite.shell_sup.size(); ++d) CHECK(finite.shell_sup[d] == 0.0);
  CHECK(finite.decay.finite_rank);
  CHECK(finite.decay.decay_observed);
  CHECK_THROWS_AS(essential_normality_scan(LatticeRegion::full(1), WeightFunction(EggDomain::ball(1)), 4), InputError);
}

TEST_CASE("fit_decay flags") {
  CHECK(fit_decay({4, 3, 2, 1, 0.5, 0.25}).monotone_tail);
  CHECK_FALSE(fit_decay({4, 3, 2, 1, 0.5, 0.6}).monotone_tail);
  CHECK_FALSE(fit_decay({4, 3, 2, 1, 0.5, 0.5}).monotone_tail);
  const auto z = fit_decay({1, 1, 0, 0, 0, 0});
  CHECK(z.finite_rank);
  CHECK(z.decay_observed);
}

TEST_CASE("schatten scan examples") {
  ScanOptions opts;
  opts.diagonal_only = true;
  const auto grid = [](double a, double b, double h) {
    std::vector<double> g;
    for (int i = 0; a + i * h <= b + 1e-9; ++i) g.push_back(a + i * h);
    return g;
  };
  const auto ball = schatten_scan(LatticeRegion::full(2), WeightFunction(EggDomain::ball(2)), grid(1, 4, 0.1), 200, opts);
  CHECK(std::abs(ball.critical.estimate - 2.0) <= 0.2);
  CHECK(ball.critical.uncertainty >= 0.2);
  for (std::size_t q = 0; q < ball.pairs.size(); ++q)
    for (std::size_t g = 0; g < grid(1, 4, 0.1).size(); ++g) {
      const auto s = ball.partial_sums(q, g);
      CHECK(std::is_sorted(s.begin(), s.end()));
    }

  const double p[] = {3.0, 1.0};
  const auto egg = schatten_scan(LatticeRegion::full(2), WeightFunction(EggDomain::egg(p)), grid(1, 5, 0.1), 200, opts);
  CHECK(std::abs(egg.critical.estimate - 3.0) <= 0.3);

  const auto g = grid(0.2, 1.0, 0.05);
  const auto disc = schatten_scan(LatticeRegion::full(1), WeightFunction(EggDomain::ball(1)), g, 200, opts);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::abs(g[i] - 0.6) < 1e-9) CHECK(disc.critical.convergent[i]);
    if (std::abs(g[i] - 0.4) < 1e-9) CHECK_FALSE(disc.critical.convergent[i]);
  }
  CHECK(std::abs(disc.critical.estimate - 0.5) <= 0.1);

  CHECK_THROWS_AS(schatten_scan(LatticeRegion::full(1), WeightFunction(EggDomain::ball(1)), g, 19, opts), InputError);
  CHECK_THROWS_AS(schatten_scan(LatticeRegion::full(1), WeightFunction(EggDomain::ball(1)), {2.0, 1.0}, 40, opts),
                  InputError);
}

TEST_CASE("critical exponent on synthetic shells") {
  // Shell sums d^{-p/2}: convergent iff p > 2.
  std::vector<double> grid;
  for (double p = 1.0; p <= 4.0 + 1e-9; p += 0.25) grid.push_back(p);
  std::vector<std::vector<double>> shells(grid.size(), std::vector<double>(301));
  for (std::size_t g = 0; g < grid.size(); ++g)
    for (std::size_t d = 0; d <= 300; ++d) shells[g][d] = std::pow(d + 1.0, -grid[g] / 2);
  const auto ce = estimate_critical_exponent(grid, shells, ScanOptions{});
  CHECK(std::abs(ce.estimate - 2.0) <= 0.2);
  CHECK(std::abs(ce.regression_estimate - 2.0) <= 0.2);
  REQUIRE(ce.bracket_low);
  REQUIRE(ce.bracket_high);
  CHECK(*ce.bracket_low < *ce.bracket_high);
}

TEST_CASE("scans do not depend on the thread count") {
  const double p[] = {2.0, 1.0, 1.5};
  const WeightFunction w(EggDomain::egg(p));
  const LatticeRegion region(MonomialIdeal(3, {MultiIndex{2, 1, 0}, MultiIndex{0, 0, 4}}));
  ScanOptions one, four;
  one.keep_entries = four.keep_entries = true;
  four.threads = 4;
  const std::vector<double> grid{1.0, 2.0, 3.0};
  const auto a = schatten_scan(region, w, grid, 30, one);
  const auto b = schatten_scan(region, w, grid, 30, four);
  CHECK(a.shell_sup == b.shell_sup);
  for (std::size_t q = 0; q < a.pairs.size(); ++q) {
    CHECK(a.pairs[q].shell_power_sums == b.pairs[q].shell_power_sums);
    REQUIRE(a.pairs[q].entries.size() == b.pairs[q].entries.size());
    for (std::size_t e = 0; e < a.pairs[q].entries.size(); ++e) CHECK(a.pairs[q].entries[e].value == b.pairs[q].entries[e].value);
  }
}
