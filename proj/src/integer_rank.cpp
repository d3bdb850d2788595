#include "bergman/integer_rank.hpp"

#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace bergman {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("integer_rank: int64 overflow");
  return r;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw std::overflow_error("integer_rank: int64 overflow");
  return r;
}

// out = x * c - y * p, merged by row.
void combine(std::int64_t x, const SparseIntColumn& c, std::int64_t y, const SparseIntColumn& p,
             SparseIntColumn& out) {
  out.clear();
  std::size_t i = 0, j = 0;
  while (i < c.size() || j < p.size()) {
    if (j == p.size() || (i < c.size() && c[i].first < p[j].first)) {
      out.emplace_back(c[i].first, checked_mul(x, c[i].second));
      ++i;
    } else if (i == c.size() || p[j].first < c[i].first) {
      out.emplace_back(p[j].first, checked_sub(0, checked_mul(y, p[j].second)));
      ++j;
    } else {
      const std::int64_t v = checked_sub(checked_mul(x, c[i].second), checked_mul(y, p[j].second));
      if (v != 0) out.emplace_back(c[i].first, v);
      ++i;
      ++j;
    }
  }
}

void make_primitive(SparseIntColumn& c) {
  std::int64_t g = 0;
  for (const auto& [r, v] : c) {
    g = std::gcd(g, v);
    if (g == 1) return;
  }
  if (g > 1)
    for (auto& [r, v] : c) v /= g;
}

}  // namespace

std::size_t integer_rank(std::vector<SparseIntColumn> columns) {
  std::vector<SparseIntColumn> reduced;
  std::unordered_map<std::int64_t, std::size_t> pivot_of_row;
  SparseIntColumn scratch;
  for (auto& col : columns) {
    std::erase_if(col, [](const auto& e) { return e.second == 0; });
    for (std::size_t i = 1; i < col.size(); ++i)
      if (!(col[i - 1].first < col[i].first)) throw std::invalid_argument("integer_rank: rows must increase");
    while (!col.empty()) {
      const auto it = pivot_of_row.find(col.back().first);
      if (it == pivot_of_row.end()) {
        make_primitive(col);
        pivot_of_row.emplace(col.back().first, reduced.size());
        reduced.push_back(std::move(col));
        break;
      }
      const SparseIntColumn& p = reduced[it->second];
      const std::int64_t a = col.back().second, b = p.back().second;
      const std::int64_t g = std::gcd(a, b);
      combine(b / g, col, a / g, p, scratch);
      std::swap(col, scratch);
      make_primitive(col);
    }
  }
  return reduced.size();
}

}  // namespace bergman
