#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace bergman {

/// (row, value) pairs with strictly increasing rows; zero values are ignored.
using SparseIntColumn = std::vector<std::pair<std::int64_t, std::int64_t>>;

/// Exact rank of an integer matrix given by its columns, using fraction-free
/// column reduction with the largest row index as pivot. Columns are
/// processed in the given order, which only affects speed. Entries are kept
/// primitive (divided by their gcd); std::overflow_error if an intermediate
/// value leaves int64.
std::size_t integer_rank(std::vector<SparseIntColumn> columns);

}  // namespace bergman
