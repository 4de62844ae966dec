#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "simplex.hpp"

// Graph Laplacian assembly by the recursive block/merge construction: d
// disjoint copies of the level m-1 matrix, then one row/column fusion per
// connection pair. All entries stay exact integers (degree diagonal, -1 off
// diagonal); time-scale constants enter only in the stepper.

namespace fractal_heat {

struct SparseLaplacian {
  int d = 3;
  int m = 0;
  index_t n = 0;
  std::vector<index_t> row_ptr;       // size n+1
  std::vector<index_t> col_idx;       // sorted within each row
  std::vector<std::int64_t> values;   // degree on diagonal, -1 off diagonal
  std::vector<index_t> boundary_ids;  // 0-based rows of P_0..P_{d-1}; empty once restricted
};

namespace detail {

inline SparseLaplacian csr_from_adjacency(int d, int m,
                                          const std::vector<std::vector<index_t>>& nbr,
                                          std::vector<index_t> boundary_ids) {
  SparseLaplacian L;
  L.d = d;
  L.m = m;
  L.n = static_cast<index_t>(nbr.size());
  L.boundary_ids = std::move(boundary_ids);
  L.row_ptr.assign(static_cast<std::size_t>(L.n) + 1, 0);
  for (index_t i = 0; i < L.n; ++i)
    L.row_ptr[static_cast<std::size_t>(i) + 1] =
        L.row_ptr[static_cast<std::size_t>(i)] +
        static_cast<index_t>(nbr[static_cast<std::size_t>(i)].size()) + 1;
  L.col_idx.resize(static_cast<std::size_t>(L.row_ptr.back()));
  L.values.resize(L.col_idx.size());
  for (index_t i = 0; i < L.n; ++i) {
    std::vector<index_t> row = nbr[static_cast<std::size_t>(i)];
    row.push_back(i);
    std::sort(row.begin(), row.end());
    const std::size_t base = static_cast<std::size_t>(L.row_ptr[static_cast<std::size_t>(i)]);
    for (std::size_t k = 0; k < row.size(); ++k) {
      L.col_idx[base + k] = row[k];
      L.values[base + k] =
          row[k] == i ? static_cast<std::int64_t>(nbr[static_cast<std::size_t>(i)].size()) : -1;
    }
  }
  return L;
}

}  // namespace detail

// Construction-order assembly. Invariants of the fusion step are enforced
// loudly: a connection pair must be non-adjacent with disjoint neighborhoods
// (the two copies share exactly one physical point), and global corners are
// never fused away.
inline SparseLaplacian assemble_laplacian(const SimplexSpec& spec) {
  validate_family(spec.d);
  validate_depth(spec.m);
  const int d = spec.d;
  std::vector<std::vector<index_t>> nbr(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (j != i) nbr[static_cast<std::size_t>(i)].push_back(j);
  std::vector<index_t> bnd(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) bnd[static_cast<std::size_t>(i)] = i;

  for (int level = 1; level <= spec.m; ++level) {
    const index_t n1 = static_cast<index_t>(nbr.size());
    std::vector<std::vector<index_t>> pre(static_cast<std::size_t>(d) * static_cast<std::size_t>(n1));
    for (int copy = 0; copy < d; ++copy) {
      const index_t off = static_cast<index_t>(copy) * n1;
      for (index_t i = 0; i < n1; ++i) {
        auto& row = pre[static_cast<std::size_t>(off + i)];
        row.reserve(nbr[static_cast<std::size_t>(i)].size());
        for (index_t w : nbr[static_cast<std::size_t>(i)]) row.push_back(w + off);
      }
    }
    const MergePlan plan = merge_plan(d, level);
    // Group the pre-merge rows that land on each post-merge slot (the keep
    // vertex plus every drop fused into it) and relabel columns.
    std::vector<std::vector<index_t>> members(plan.new_to_old.size());
    for (std::size_t s = 0; s < plan.new_to_old.size(); ++s) members[s] = {plan.new_to_old[s]};
    for (const auto& p : plan.pairs)
      members[static_cast<std::size_t>(plan.old_to_new[static_cast<std::size_t>(p.drop - 1)])]
          .push_back(p.drop - 1);
    std::vector<std::vector<index_t>> post(plan.new_to_old.size());
    for (std::size_t s = 0; s < post.size(); ++s) {
      auto& row = post[s];
      for (index_t member : members[s])
        for (index_t w : pre[static_cast<std::size_t>(member)])
          row.push_back(plan.old_to_new[static_cast<std::size_t>(w)]);
      std::sort(row.begin(), row.end());
      for (std::size_t k = 0; k < row.size(); ++k) {
        if (row[k] == static_cast<index_t>(s))
          throw numerical_error("fusion produced a self edge at level " + std::to_string(level));
        if (k > 0 && row[k] == row[k - 1])
          throw numerical_error("fused vertices share a neighbor at level " +
                                std::to_string(level));
      }
    }
    std::vector<index_t> bnd_next(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      const index_t pre_idx = static_cast<index_t>(i) * n1 + bnd[static_cast<std::size_t>(i)];
      const index_t slot = plan.old_to_new[static_cast<std::size_t>(pre_idx)];
      if (plan.new_to_old[static_cast<std::size_t>(slot)] != pre_idx)
        throw numerical_error("global corner was fused away at level " + std::to_string(level));
      bnd_next[static_cast<std::size_t>(i)] = slot;
    }
    nbr = std::move(post);
    bnd = std::move(bnd_next);
  }
  return detail::csr_from_adjacency(d, spec.m, nbr, std::move(bnd));
}

// Symmetric permutation of rows/columns: map[i] = new index of old row i.
inline SparseLaplacian permute_laplacian(const SparseLaplacian& L, const std::vector<index_t>& map) {
  if (static_cast<index_t>(map.size()) != L.n) throw argument_error("permutation size mismatch");
  std::vector<std::vector<index_t>> nbr(static_cast<std::size_t>(L.n));
  std::vector<std::int64_t> diag(static_cast<std::size_t>(L.n), 0);
  for (index_t i = 0; i < L.n; ++i) {
    const index_t ni = map[static_cast<std::size_t>(i)];
    for (index_t k = L.row_ptr[static_cast<std::size_t>(i)]; k < L.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      const index_t j = L.col_idx[static_cast<std::size_t>(k)];
      if (j == i)
        diag[static_cast<std::size_t>(ni)] = L.values[static_cast<std::size_t>(k)];
      else
        nbr[static_cast<std::size_t>(ni)].push_back(map[static_cast<std::size_t>(j)]);
    }
  }
  std::vector<index_t> bnd(L.boundary_ids.size());
  for (std::size_t i = 0; i < bnd.size(); ++i)
    bnd[i] = map[static_cast<std::size_t>(L.boundary_ids[i])];
  SparseLaplacian out = detail::csr_from_adjacency(L.d, L.m, nbr, std::move(bnd));
  for (index_t i = 0; i < out.n; ++i) {
    // degree is permutation invariant; keep the check loud
    const index_t deg = out.row_ptr[static_cast<std::size_t>(i) + 1] -
                        out.row_ptr[static_cast<std::size_t>(i)] - 1;
    if (diag[static_cast<std::size_t>(i)] != deg)
      throw numerical_error("permutation changed a vertex degree");
  }
  return out;
}

// Canonical numbering: interior vertices first (construction order preserved
// among them), the d boundary corners last as P_0..P_{d-1}.
inline SparseLaplacian to_canonical(const SparseLaplacian& L) {
  return permute_laplacian(L, canonical_map(L.n, L.boundary_ids));
}

inline SparseLaplacian assemble_canonical(const SimplexSpec& spec) {
  return to_canonical(assemble_laplacian(spec));
}

inline bool is_canonical_order(const SparseLaplacian& L) {
  if (static_cast<index_t>(L.boundary_ids.size()) != L.d) return false;
  for (int i = 0; i < L.d; ++i)
    if (L.boundary_ids[static_cast<std::size_t>(i)] != L.n - L.d + i) return false;
  return true;
}

// Dirichlet restriction: drop boundary rows/columns. With canonical order the
// result is exactly the leading principal (n-d) x (n-d) block; diagonal
// degrees are kept, which is what grounding at the boundary means.
inline SparseLaplacian dirichlet_restrict(const SparseLaplacian& L) {
  if (!is_canonical_order(L))
    throw argument_error("dirichlet_restrict expects canonical (boundary-last) order");
  const index_t n_int = L.n - L.d;
  SparseLaplacian R;
  R.d = L.d;
  R.m = L.m;
  R.n = n_int;
  R.row_ptr.assign(static_cast<std::size_t>(n_int) + 1, 0);
  for (index_t i = 0; i < n_int; ++i) {
    index_t cnt = 0;
    for (index_t k = L.row_ptr[static_cast<std::size_t>(i)]; k < L.row_ptr[static_cast<std::size_t>(i) + 1]; ++k)
      if (L.col_idx[static_cast<std::size_t>(k)] < n_int) ++cnt;
    R.row_ptr[static_cast<std::size_t>(i) + 1] = R.row_ptr[static_cast<std::size_t>(i)] + cnt;
  }
  R.col_idx.resize(static_cast<std::size_t>(R.row_ptr.back()));
  R.values.resize(R.col_idx.size());
  index_t w = 0;
  for (index_t i = 0; i < n_int; ++i)
    for (index_t k = L.row_ptr[static_cast<std::size_t>(i)]; k < L.row_ptr[static_cast<std::size_t>(i) + 1]; ++k)
      if (L.col_idx[static_cast<std::size_t>(k)] < n_int) {
        R.col_idx[static_cast<std::size_t>(w)] = L.col_idx[static_cast<std::size_t>(k)];
        R.values[static_cast<std::size_t>(w)] = L.values[static_cast<std::size_t>(k)];
        ++w;
      }
  return R;
}

inline std::int64_t laplacian_entry(const SparseLaplacian& L, index_t i, index_t j) {
  if (i < 0 || i >= L.n || j < 0 || j >= L.n) throw argument_error("entry index out of range");
  const auto* first = L.col_idx.data() + L.row_ptr[static_cast<std::size_t>(i)];
  const auto* last = L.col_idx.data() + L.row_ptr[static_cast<std::size_t>(i) + 1];
  const auto* it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0;
  return L.values[static_cast<std::size_t>(L.row_ptr[static_cast<std::size_t>(i)] + (it - first))];
}

inline std::vector<std::vector<std::int64_t>> to_dense(const SparseLaplacian& L) {
  std::vector<std::vector<std::int64_t>> A(
      static_cast<std::size_t>(L.n), std::vector<std::int64_t>(static_cast<std::size_t>(L.n), 0));
  for (index_t i = 0; i < L.n; ++i)
    for (index_t k = L.row_ptr[static_cast<std::size_t>(i)]; k < L.row_ptr[static_cast<std::size_t>(i) + 1]; ++k)
      A[static_cast<std::size_t>(i)][static_cast<std::size_t>(L.col_idx[static_cast<std::size_t>(k)])] =
          L.values[static_cast<std::size_t>(k)];
  return A;
}

// Canonical-order coordinates matching assemble_canonical's numbering.
inline VertexSet canonical_coordinates(const SimplexSpec& spec) {
  VertexSet vs = vertex_coordinates(spec);
  const std::vector<index_t> map = canonical_map(static_cast<index_t>(vs.coords.size()), vs.boundary_ids);
  VertexSet out;
  out.d = vs.d;
  out.m = vs.m;
  out.coords.resize(vs.coords.size());
  for (std::size_t i = 0; i < vs.coords.size(); ++i)
    out.coords[static_cast<std::size_t>(map[i])] = vs.coords[i];
  out.boundary_ids.resize(static_cast<std::size_t>(vs.d));
  for (int i = 0; i < vs.d; ++i)
    out.boundary_ids[static_cast<std::size_t>(i)] =
        static_cast<index_t>(vs.coords.size()) - vs.d + i;
  return out;
}

}  // namespace fractal_heat
