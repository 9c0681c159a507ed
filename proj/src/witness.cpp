#include "mregen/witness.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace mregen {

SliceType Slice::type(const VariableGroups& groups) const {
  SliceType e(groups.group_count(), 0);
  for (const auto& sl : linears) ++e[sl.group_index];
  return e;
}

int Slice::last_in_group(int group) const {
  for (int i = static_cast<int>(linears.size()) - 1; i >= 0; --i)
    if (linears[i].group_index == group) return i;
  return -1;
}

namespace {

void enumerate_types(const VariableGroups& groups, int j, int remaining,
                     SliceType& cur, std::vector<SliceType>& out) {
  if (j == groups.group_count()) {
    if (remaining == 0) out.push_back(cur);
    return;
  }
  const int cap = std::min(groups.proj_dim(j), remaining);
  for (int e = cap; e >= 0; --e) {
    cur[j] = e;
    enumerate_types(groups, j + 1, remaining - e, cur, out);
  }
  cur[j] = 0;
}

}  // namespace

std::vector<SliceType> valid_slice_types(const VariableGroups& groups, int dim) {
  std::vector<SliceType> out;
  if (dim < 0) return out;
  SliceType cur(groups.group_count(), 0);
  enumerate_types(groups, 0, dim, cur, out);
  return out;
}

Slice make_slice(const SliceType& e, const VariableGroups& groups, Rng& rng) {
  Slice slice;
  for (int j = 0; j < groups.group_count(); ++j)
    for (int s = 0; s < e[j]; ++s)
      slice.linears.push_back({j, random_linear(j, groups, rng)});
  return slice;
}

WitnessNode root_witness(const VariableGroups& groups, Rng& rng,
                         const TrackSettings& settings) {
  if (!groups.all_projective())
    throw std::invalid_argument("root witness needs projective variable groups");
  SliceType full(groups.group_count());
  for (int j = 0; j < groups.group_count(); ++j) full[j] = groups.proj_dim(j);

  for (int attempt = 0; attempt < 3; ++attempt) {
    Slice slice = make_slice(full, groups, rng);
    PatchSet patches = draw_patches(groups, rng);
    const int n = groups.total_vars();
    Matrix A = Matrix::Zero(n, n);
    Vector b = Vector::Zero(n);
    Vector zero = Vector::Zero(n);
    int row = 0;
    for (const auto& sl : slice.linears) A.row(row++) = sl.linear.gradient(zero);
    for (const auto& patch : patches) {
      A.row(row).segment(groups.group_offset(patch.group_index), patch.coeffs.size()) =
          patch.coeffs.transpose();
      b[row] = Complex{1.0, 0.0};
      ++row;
    }
    auto x = lu_solve(A, b);
    if (!x) continue;  // resample the slice
    WitnessNode node;
    node.prefix_count = 0;
    node.slice = std::move(slice);
    node.points.push_back(canonical_normalize(unflatten(*x, groups), groups));
    node.meta.push_back({});
    (void)settings;
    return node;
  }
  throw std::runtime_error("root witness: singular linear system after 3 resamples");
}

MultidegreeTable multidegree_table(const std::vector<WitnessNode>& leaves,
                                   const VariableGroups& groups) {
  if (!leaves.empty()) {
    const int prefix = leaves.front().prefix_count;
    for (const auto& node : leaves)
      if (node.prefix_count != prefix)
        throw std::invalid_argument("leaves are at different depths");
  }
  std::map<SliceType, long> counts;
  for (const auto& node : leaves)
    counts[node.slice.type(groups)] += static_cast<long>(node.points.size());

  MultidegreeTable table;
  for (int j = 0; j < groups.group_count(); ++j)
    table.ambient_dims.push_back(groups.proj_dim(j));
  for (const auto& [e, c] : counts)
    if (c > 0) table.rows.push_back({c, e});
  std::sort(table.rows.begin(), table.rows.end(),
            [](const MultidegreeRow& a, const MultidegreeRow& b) { return a.e > b.e; });
  return table;
}

std::string monomial_string(const MultidegreeRow& row, const std::vector<int>& ambient_dims) {
  std::ostringstream out;
  out << row.count;
  for (std::size_t j = 0; j < ambient_dims.size(); ++j) {
    const int p = ambient_dims[j] - row.e[j];
    if (p == 0) continue;
    out << "*T_" << j;
    if (p > 1) out << "^" << p;
  }
  return out.str();
}

}  // namespace mregen
