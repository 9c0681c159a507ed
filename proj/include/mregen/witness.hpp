#pragma once

#include <cstdint>

#include "mregen/tracker.hpp"

namespace mregen {

// How many generic linear forms the slice draws from each projective group;
// entries sum to the dimension being witnessed.
using SliceType = std::vector<int>;

struct SliceLinear {
  int group_index = 0;
  Polynomial linear;
};

struct Slice {
  std::vector<SliceLinear> linears;

  SliceType type(const VariableGroups& groups) const;
  // Index of the last-added linear in `group`, or -1.
  int last_in_group(int group) const;
};

struct PointMeta {
  std::uint64_t point_id = 0;
  std::uint64_t parent_id = 0;
  int var_group = 1;     // 1-based branch group
  int regen_linear = 1;  // 1-based copy index within the branch
};

// One node of the regeneration tree: the first `prefix_count` system
// polynomials imposed, sliced by `slice`, witnessed by `points`.
struct WitnessNode {
  int prefix_count = 0;
  Slice slice;
  std::vector<MultiprojectivePoint> points;
  std::vector<PointMeta> meta;

  int depth() const { return prefix_count - 1; }  // root is -1, not persisted
};

struct MultidegreeRow {
  long count = 0;
  SliceType e;
};

struct MultidegreeTable {
  std::vector<MultidegreeRow> rows;  // descending lexicographic in e
  std::vector<int> ambient_dims;     // n_j per group, for monomial rendering
};

// All e with sum(e) = dim and 0 <= e_j <= n_j, in the order that puts larger
// leading entries first.
std::vector<SliceType> valid_slice_types(const VariableGroups& groups, int dim);

Slice make_slice(const SliceType& e, const VariableGroups& groups, Rng& rng);

// Witness of the full ambient product: slice of type (n_1,...,n_k), one point
// from a dense linear solve, nothing imposed yet.
WitnessNode root_witness(const VariableGroups& groups, Rng& rng,
                         const TrackSettings& settings);

// Aggregate leaf point counts per slice type.
MultidegreeTable multidegree_table(const std::vector<WitnessNode>& leaves,
                                   const VariableGroups& groups);

// The monomial a row maps to: count * prod_j T_j^(n_j - e_j).
std::string monomial_string(const MultidegreeRow& row, const std::vector<int>& ambient_dims);

}  // namespace mregen
