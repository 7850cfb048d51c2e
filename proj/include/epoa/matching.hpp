#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace epoa {

struct Matching {
  double weight = 0.0;
  std::vector<std::optional<std::size_t>> row_to_col;
};

// Maximum-weight matching of rows to columns for a rectangular matrix of
// non-negative weights (Hungarian method on the zero-padded square matrix).
// Rows matched only to padding come back unmatched.
Matching max_weight_matching(const std::vector<std::vector<double>>& weights);

}  // namespace epoa
