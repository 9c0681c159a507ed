#pragma once

// Combinatorial oracle for multidegrees of generic complete intersections,
// independent of the tracker: expand prod_i (sum_j d_ij T_j) deleting every
// monomial with a T_j power above n_j. The surviving coefficient of
// T^(n - e) is the expected witness count at slice type e.

#include <map>
#include <vector>

#include "mregen/witness.hpp"

namespace oracle {

using Exponent = std::vector<int>;

inline std::map<Exponent, long> truncated_product(
    const std::vector<std::vector<int>>& degree_rows, const std::vector<int>& ambient_dims) {
  const std::size_t k = ambient_dims.size();
  std::map<Exponent, long> acc{{Exponent(k, 0), 1}};
  for (const auto& row : degree_rows) {
    std::map<Exponent, long> next;
    for (const auto& [expo, coeff] : acc) {
      for (std::size_t j = 0; j < k; ++j) {
        if (row[j] == 0) continue;
        Exponent e = expo;
        if (++e[j] > ambient_dims[j]) continue;
        next[e] += coeff * row[j];
      }
    }
    acc = std::move(next);
  }
  return acc;
}

// The table the oracle predicts, in the same shape multidegree_table emits.
inline std::vector<mregen::MultidegreeRow> expected_rows(
    const std::vector<std::vector<int>>& degree_rows, const std::vector<int>& ambient_dims) {
  std::vector<mregen::MultidegreeRow> rows;
  for (const auto& [expo, coeff] : truncated_product(degree_rows, ambient_dims)) {
    if (coeff == 0) continue;
    mregen::SliceType e(ambient_dims.size());
    for (std::size_t j = 0; j < ambient_dims.size(); ++j) e[j] = ambient_dims[j] - expo[j];
    rows.push_back({coeff, e});
  }
  std::sort(rows.begin(), rows.end(),
            [](const mregen::MultidegreeRow& a, const mregen::MultidegreeRow& b) {
              return a.e > b.e;
            });
  return rows;
}

inline bool tables_match(const mregen::MultidegreeTable& got,
                         const std::vector<mregen::MultidegreeRow>& want) {
  if (got.rows.size() != want.size()) return false;
  for (std::size_t i = 0; i < want.size(); ++i)
    if (got.rows[i].count != want[i].count || got.rows[i].e != want[i].e) return false;
  return true;
}

}  // namespace oracle
