#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

// Topology of the Sierpinski simplex family: d midpoint contractions toward
// the corners of a regular (d-1)-simplex. d=3 is the gasket, d=4 the
// tetrahedron. Everything downstream (assembly, stepping, experiments) is
// derived from the counting and index recurrences in this header.

namespace fractal_heat {

using index_t = std::int64_t;

struct SimplexSpec {
  int d = 3;
  int m = 0;
};

inline void validate_family(int d) {
  if (d != 3 && d != 4)
    throw argument_error("unsupported family d=" + std::to_string(d) +
                         "; supported: 3 (gasket), 4 (tetrahedron)");
}

inline void validate_depth(int m) {
  if (m < 0) throw argument_error("depth m must be >= 0, got " + std::to_string(m));
}

namespace detail {
inline index_t checked_mul(index_t a, index_t b) {
  index_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw argument_error("vertex_count overflow");
  return out;
}
}  // namespace detail

// N_m = (d^{m+1} + d)/2, closed form of the counting proposition.
inline index_t vertex_count(int d, int m) {
  if (d < 2) throw argument_error("vertex_count requires d >= 2, got " + std::to_string(d));
  validate_depth(m);
  index_t p = d;
  for (int k = 0; k < m; ++k) p = detail::checked_mul(p, d);
  return (p + d) / 2;
}

// Companion recursion N_m = d*N_{m-1} - d(d-1)/2, N_0 = d.
inline index_t vertex_count_recursive(int d, int m) {
  if (d < 2) throw argument_error("vertex_count requires d >= 2, got " + std::to_string(d));
  validate_depth(m);
  index_t n = d;
  const index_t shared = static_cast<index_t>(d) * (d - 1) / 2;
  for (int k = 1; k <= m; ++k) n = detail::checked_mul(n, d) - shared;
  return n;
}

// N_k extended by the recurrence seed N_{-1} = 3 used inside I2.
inline index_t count_or_seed(int d, int k) {
  return k < 0 ? 3 : vertex_count(d, k);
}

// I2(0) = 0, I2(m) = I2(m-1) + N_{m-2} - 1. Values for levels 0..m.
inline std::vector<index_t> offset_sequence_i2(int d, int m) {
  validate_family(d);
  validate_depth(m);
  std::vector<index_t> i2(static_cast<std::size_t>(m) + 1, 0);
  for (int k = 1; k <= m; ++k)
    i2[static_cast<std::size_t>(k)] = i2[static_cast<std::size_t>(k) - 1] + count_or_seed(d, k - 2) - 1;
  return i2;
}

// Tetrahedron only: I3(1) = 3, I3(m) = I3(m-1) + 2*N_{m-2} - 3. Index 0 unused.
inline std::vector<index_t> offset_sequence_i3(int d, int m) {
  if (d != 4) throw argument_error("I3 is defined only for d=4");
  if (m < 1) throw argument_error("I3 starts at m=1");
  std::vector<index_t> i3(static_cast<std::size_t>(m) + 1, 0);
  i3[1] = 3;
  for (int k = 2; k <= m; ++k)
    i3[static_cast<std::size_t>(k)] = i3[static_cast<std::size_t>(k) - 1] + 2 * count_or_seed(d, k - 2) - 3;
  return i3;
}

// Pre-merge global index (1-based) of corner c of copy n in the concatenated
// d-copy numbering at level m.
inline index_t corner_index(int d, int n, int m, int c) {
  validate_family(d);
  if (m < 1) throw argument_error("corner_index requires m >= 1");
  if (n < 1 || n > d) throw argument_error("copy index n out of range 1..d");
  if (c < 1 || c > d) throw argument_error("corner index c out of range 1..d");
  const index_t block = static_cast<index_t>(n - 1) * vertex_count(d, m - 1);
  if (c == 1) return 1 + block;
  if (c == d) return static_cast<index_t>(n) * vertex_count(d, m - 1);
  if (c == 2) return offset_sequence_i2(d, m)[static_cast<std::size_t>(m)] + block;
  return offset_sequence_i3(d, m)[static_cast<std::size_t>(m)] + block;  // c == 3, d == 4
}

// One fusion: row/column `drop` is summed into `keep`, then deleted.
struct MergePair {
  index_t keep = 0;  // 1-based pre-merge indices
  index_t drop = 0;
};

// The d(d-1)/2 connection pairs at level m, ordered by (j, i) with i < j:
// copies (i,j) fuse at the midpoint of edge P_{i-1}P_{j-1}; the instance kept
// is corner j of copy i, the deleted one corner i of copy j.
inline std::vector<MergePair> merge_pairs(int d, int m) {
  validate_family(d);
  if (m < 1) throw argument_error("merge_pairs requires m >= 1");
  std::vector<MergePair> out;
  out.reserve(static_cast<std::size_t>(d) * (d - 1) / 2);
  for (int j = 2; j <= d; ++j)
    for (int i = 1; i < j; ++i)
      out.push_back({corner_index(d, i, m, j), corner_index(d, j, m, i)});
  return out;
}

// Consolidation map for one level step: both the matrix assembly and the
// coordinate replay consume the same plan, so there is a single authoritative
// numbering.
struct MergePlan {
  std::vector<MergePair> pairs;     // 1-based
  std::vector<index_t> old_to_new;  // 0-based; dropped indices point at their keep partner
  std::vector<index_t> new_to_old;  // 0-based surviving pre-merge index per post-merge slot
};

inline MergePlan merge_plan(int d, int m) {
  MergePlan plan;
  plan.pairs = merge_pairs(d, m);
  const index_t n_pre = static_cast<index_t>(d) * vertex_count(d, m - 1);
  std::vector<char> dropped(static_cast<std::size_t>(n_pre), 0);
  for (const auto& p : plan.pairs) {
    if (p.keep < 1 || p.keep > n_pre || p.drop < 1 || p.drop > n_pre || p.keep == p.drop)
      throw numerical_error("merge_plan: pair out of range");
    if (dropped[static_cast<std::size_t>(p.drop - 1)])
      throw numerical_error("merge_plan: index dropped twice");
    dropped[static_cast<std::size_t>(p.drop - 1)] = 1;
  }
  plan.old_to_new.assign(static_cast<std::size_t>(n_pre), -1);
  plan.new_to_old.reserve(static_cast<std::size_t>(vertex_count(d, m)));
  for (index_t i = 0; i < n_pre; ++i) {
    if (dropped[static_cast<std::size_t>(i)]) continue;
    plan.old_to_new[static_cast<std::size_t>(i)] = static_cast<index_t>(plan.new_to_old.size());
    plan.new_to_old.push_back(i);
  }
  for (const auto& p : plan.pairs)
    plan.old_to_new[static_cast<std::size_t>(p.drop - 1)] =
        plan.old_to_new[static_cast<std::size_t>(p.keep - 1)];
  if (static_cast<index_t>(plan.new_to_old.size()) != vertex_count(d, m))
    throw numerical_error("merge_plan: post-merge count mismatch");
  return plan;
}

using Point = std::array<double, 3>;

// Canonical corner coordinates (unit edge): equilateral triangle for the
// gasket, regular tetrahedron for d=4. Used for output and oracles only;
// matrix values never depend on them.
inline std::vector<Point> corner_points(int d) {
  validate_family(d);
  const double s3 = std::sqrt(3.0);
  if (d == 3) return {{{0.0, 0.0, 0.0}}, {{1.0, 0.0, 0.0}}, {{0.5, s3 / 2.0, 0.0}}};
  return {{{0.0, 0.0, 0.0}},
          {{1.0, 0.0, 0.0}},
          {{0.5, s3 / 2.0, 0.0}},
          {{0.5, s3 / 6.0, std::sqrt(6.0) / 3.0}}};
}

inline double point_distance(const Point& a, const Point& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

struct VertexSet {
  int d = 3;
  int m = 0;
  std::vector<Point> coords;          // construction (post-merge) order
  std::vector<index_t> boundary_ids;  // 0-based construction indices of P_0..P_{d-1}
};

// Replays the copy-concatenation + merge-deletion permutation on coordinates,
// so vertex i here is vertex i of the assembled matrix at every level.
inline VertexSet vertex_coordinates(const SimplexSpec& spec) {
  validate_family(spec.d);
  validate_depth(spec.m);
  const auto P = corner_points(spec.d);
  VertexSet vs;
  vs.d = spec.d;
  vs.m = spec.m;
  vs.coords = P;
  vs.boundary_ids.resize(static_cast<std::size_t>(spec.d));
  for (int i = 0; i < spec.d; ++i) vs.boundary_ids[static_cast<std::size_t>(i)] = i;
  for (int level = 1; level <= spec.m; ++level) {
    const index_t n1 = vertex_count(spec.d, level - 1);
    std::vector<Point> pre;
    pre.reserve(static_cast<std::size_t>(spec.d) * static_cast<std::size_t>(n1));
    for (int copy = 0; copy < spec.d; ++copy)
      for (const auto& q : vs.coords)
        pre.push_back({(q[0] + P[static_cast<std::size_t>(copy)][0]) / 2.0,
                       (q[1] + P[static_cast<std::size_t>(copy)][1]) / 2.0,
                       (q[2] + P[static_cast<std::size_t>(copy)][2]) / 2.0});
    const MergePlan plan = merge_plan(spec.d, level);
    const double tol = 1e-9 * std::ldexp(1.0, -level);  // distinct points are >= 2^-level apart
    for (const auto& pr : plan.pairs) {
      const auto& a = pre[static_cast<std::size_t>(pr.keep - 1)];
      const auto& b = pre[static_cast<std::size_t>(pr.drop - 1)];
      if (point_distance(a, b) > tol)
        throw numerical_error("merge pair does not coincide geometrically at level " +
                              std::to_string(level));
    }
    std::vector<Point> post(plan.new_to_old.size());
    for (std::size_t i = 0; i < plan.new_to_old.size(); ++i)
      post[i] = pre[static_cast<std::size_t>(plan.new_to_old[i])];
    std::vector<index_t> bnd(static_cast<std::size_t>(spec.d));
    for (int i = 0; i < spec.d; ++i) {
      // P_{i-1} is the fixed point of f_i: corner i of copy i, never a merge target.
      const index_t pre_idx =
          static_cast<index_t>(i) * n1 + vs.boundary_ids[static_cast<std::size_t>(i)];
      for (const auto& pr : plan.pairs)
        if (pr.keep - 1 == pre_idx || pr.drop - 1 == pre_idx)
          throw numerical_error("fusion pair touches a global corner");
      bnd[static_cast<std::size_t>(i)] = plan.old_to_new[static_cast<std::size_t>(pre_idx)];
    }
    vs.coords = std::move(post);
    vs.boundary_ids = std::move(bnd);
  }
  return vs;
}

// Construction order -> canonical order (interior first in construction
// order, boundary corners last as P_0..P_{d-1}). All user-facing vertex ids
// are canonical and 1-based.
inline std::vector<index_t> canonical_map(index_t n, const std::vector<index_t>& boundary_ids) {
  std::vector<char> is_boundary(static_cast<std::size_t>(n), 0);
  for (index_t b : boundary_ids) {
    if (b < 0 || b >= n) throw argument_error("boundary id out of range");
    is_boundary[static_cast<std::size_t>(b)] = 1;
  }
  std::vector<index_t> map(static_cast<std::size_t>(n), -1);
  index_t next = 0;
  for (index_t i = 0; i < n; ++i)
    if (!is_boundary[static_cast<std::size_t>(i)]) map[static_cast<std::size_t>(i)] = next++;
  for (index_t b : boundary_ids) map[static_cast<std::size_t>(b)] = next++;
  return map;
}

inline std::vector<index_t> invert_permutation(const std::vector<index_t>& p) {
  std::vector<index_t> inv(p.size(), -1);
  for (std::size_t i = 0; i < p.size(); ++i) inv[static_cast<std::size_t>(p[i])] = static_cast<index_t>(i);
  return inv;
}

// Test oracle independent of the recurrences: enumerate all length-m IFS
// words, deduplicate cell corners, and link every pair inside a cell.
struct GeometricAdjacency {
  index_t n = 0;
  std::vector<Point> coords;                        // first-seen dedup order
  std::vector<std::pair<index_t, index_t>> edges;   // a < b, sorted
};

inline GeometricAdjacency geometric_adjacency(const SimplexSpec& spec) {
  validate_family(spec.d);
  validate_depth(spec.m);
  if (spec.m > 10) throw argument_error("geometric_adjacency capped at m <= 10");
  const auto P = corner_points(spec.d);
  GeometricAdjacency g;
  // Quantization step 2^-(m+12) sits far below the 2^-m vertex separation and
  // far above accumulated rounding, so keys are collision-free and stable.
  const double scale = std::ldexp(1.0, spec.m + 12);
  std::map<std::array<long long, 3>, index_t> seen;
  auto vertex_id = [&](const Point& p) {
    const std::array<long long, 3> key = {std::llround(p[0] * scale), std::llround(p[1] * scale),
                                          std::llround(p[2] * scale)};
    auto it = seen.find(key);
    if (it != seen.end()) return it->second;
    const index_t id = static_cast<index_t>(g.coords.size());
    seen.emplace(key, id);
    g.coords.push_back(p);
    return id;
  };
  std::vector<std::pair<index_t, index_t>> edges;
  std::vector<Point> cell = P;
  auto emit_cell = [&](const std::vector<Point>& pts) {
    std::vector<index_t> ids(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) ids[i] = vertex_id(pts[i]);
    for (std::size_t a = 0; a < ids.size(); ++a)
      for (std::size_t b = a + 1; b < ids.size(); ++b)
        edges.emplace_back(std::min(ids[a], ids[b]), std::max(ids[a], ids[b]));
  };
  // Depth-first over words w: cell = f_{w_1}(...f_{w_m}(V_0)).
  auto walk = [&](auto&& self, const std::vector<Point>& pts, int depth) -> void {
    if (depth == spec.m) {
      emit_cell(pts);
      return;
    }
    for (int i = 0; i < spec.d; ++i) {
      std::vector<Point> next(pts.size());
      for (std::size_t k = 0; k < pts.size(); ++k)
        next[k] = {(pts[k][0] + P[static_cast<std::size_t>(i)][0]) / 2.0,
                   (pts[k][1] + P[static_cast<std::size_t>(i)][1]) / 2.0,
                   (pts[k][2] + P[static_cast<std::size_t>(i)][2]) / 2.0};
      self(self, next, depth + 1);
    }
  };
  walk(walk, cell, 0);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  g.n = static_cast<index_t>(g.coords.size());
  g.edges = std::move(edges);
  return g;
}

}  // namespace fractal_heat
