#include <doctest.h>

#include <array>
#include <cmath>
#include <set>
#include <vector>

#include <fractal_heat/laplacian.hpp>

using namespace fractal_heat;

namespace {

using EdgeKey = std::array<long long, 6>;

EdgeKey edge_key(const Point& a, const Point& b, double scale) {
  std::array<long long, 3> ka{std::llround(a[0] * scale), std::llround(a[1] * scale),
                              std::llround(a[2] * scale)};
  std::array<long long, 3> kb{std::llround(b[0] * scale), std::llround(b[1] * scale),
                              std::llround(b[2] * scale)};
  if (kb < ka) std::swap(ka, kb);
  return {ka[0], ka[1], ka[2], kb[0], kb[1], kb[2]};
}

std::multiset<EdgeKey> laplacian_edge_keys(const SparseLaplacian& L, const VertexSet& vs,
                                           double scale) {
  std::multiset<EdgeKey> keys;
  for (index_t i = 0; i < L.n; ++i)
    for (index_t k = L.row_ptr[static_cast<std::size_t>(i)];
         k < L.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      const index_t j = L.col_idx[static_cast<std::size_t>(k)];
      if (j <= i) continue;
      CHECK(L.values[static_cast<std::size_t>(k)] == -1);
      keys.insert(edge_key(vs.coords[static_cast<std::size_t>(i)],
                           vs.coords[static_cast<std::size_t>(j)], scale));
    }
  return keys;
}

}  // namespace

TEST_CASE("level-0 Laplacian is the complete-graph Laplacian") {
  for (int d : {3, 4}) {
    const auto L = assemble_laplacian({d, 0});
    const auto A = to_dense(L);
    for (index_t i = 0; i < L.n; ++i)
      for (index_t j = 0; j < L.n; ++j)
        CHECK(A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ==
              (i == j ? d - 1 : -1));
    CHECK(dirichlet_restrict(to_canonical(L)).n == 0);
  }
}

TEST_CASE("level-1 gasket: restricted matrix is 5I - J") {
  const auto L = assemble_canonical({3, 1});
  CHECK(L.n == 6);
  CHECK(is_canonical_order(L));
  const auto R = dirichlet_restrict(L);
  REQUIRE(R.n == 3);
  const auto A = to_dense(R);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(A[i][j] == (i == j ? 4 : -1));
  // boundary corners keep degree 2
  for (index_t b = 3; b < 6; ++b) CHECK(laplacian_entry(L, b, b) == 2);
}

TEST_CASE("level-1 tetrahedron: restricted matrix is the octahedron Laplacian") {
  const auto L = assemble_canonical({4, 1});
  CHECK(L.n == 10);
  const auto R = dirichlet_restrict(L);
  REQUIRE(R.n == 6);
  const auto A = to_dense(R);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(A[i][i] == 6);
    int minus = 0, zero = 0;
    for (std::size_t j = 0; j < 6; ++j) {
      if (j == i) continue;
      if (A[i][j] == -1) ++minus;
      if (A[i][j] == 0) ++zero;
    }
    CHECK(minus == 4);  // adjacent to all midpoints except the antipodal one
    CHECK(zero == 1);
  }
}

TEST_CASE("full Laplacian rows sum to zero; restricted rows do not all") {
  for (int d : {3, 4})
    for (int m = 0; m <= 3; ++m) {
      const auto L = assemble_canonical({d, m});
      const auto A = to_dense(L);
      for (const auto& row : A) {
        std::int64_t s = 0;
        for (std::int64_t v : row) s += v;
        CHECK(s == 0);
      }
      if (m >= 1) {
        const auto R = dirichlet_restrict(L);
        const auto B = to_dense(R);
        std::int64_t total = 0;
        for (const auto& row : B)
          for (std::int64_t v : row) total += v;
        // total excess = number of interior-boundary edges: d corners of degree d-1
        CHECK(total == d * (d - 1));
      }
    }
}

TEST_CASE("assembled Laplacian equals the geometric-adjacency oracle") {
  for (int d : {3, 4})
    for (int m = 0; m <= 2; ++m) {
      const auto L = assemble_laplacian({d, m});
      const VertexSet vs = vertex_coordinates({d, m});
      const GeometricAdjacency g = geometric_adjacency({d, m});
      REQUIRE(L.n == g.n);
      const double scale = std::ldexp(1.0, m + 12);
      const auto lhs = laplacian_edge_keys(L, vs, scale);
      std::multiset<EdgeKey> rhs;
      for (const auto& e : g.edges)
        rhs.insert(edge_key(g.coords[static_cast<std::size_t>(e.first)],
                            g.coords[static_cast<std::size_t>(e.second)], scale));
      CHECK(lhs == rhs);
    }
}

TEST_CASE("canonical permutation preserves the matrix up to reordering") {
  const auto L = assemble_laplacian({3, 2});
  const auto C = to_canonical(L);
  CHECK(C.boundary_ids == std::vector<index_t>{12, 13, 14});
  // symmetric, same value multiset
  for (index_t i = 0; i < C.n; ++i)
    for (index_t k = C.row_ptr[static_cast<std::size_t>(i)];
         k < C.row_ptr[static_cast<std::size_t>(i) + 1]; ++k)
      CHECK(laplacian_entry(C, C.col_idx[static_cast<std::size_t>(k)], i) ==
            C.values[static_cast<std::size_t>(k)]);
  std::multiset<std::int64_t> dl, dc;
  for (index_t i = 0; i < L.n; ++i) dl.insert(laplacian_entry(L, i, i));
  for (index_t i = 0; i < C.n; ++i) dc.insert(laplacian_entry(C, i, i));
  CHECK(dl == dc);
}

TEST_CASE("dirichlet_restrict validates canonical order") {
  const auto L = assemble_laplacian({3, 2});  // construction order: corners not last
  CHECK_THROWS_AS(dirichlet_restrict(L), argument_error);
  const auto R = dirichlet_restrict(to_canonical(L));
  CHECK(R.n == 12);
  CHECK(R.boundary_ids.empty());
  // degrees on the diagonal survive the restriction (grounded boundary)
  for (index_t i = 0; i < R.n; ++i) CHECK(laplacian_entry(R, i, i) == 4);
}

TEST_CASE("canonical coordinates align with canonical matrix numbering") {
  const SimplexSpec spec{3, 2};
  const VertexSet vs = canonical_coordinates(spec);
  CHECK(vs.boundary_ids == std::vector<index_t>{12, 13, 14});
  const auto P = corner_points(3);
  for (int i = 0; i < 3; ++i)
    CHECK(point_distance(vs.coords[static_cast<std::size_t>(12 + i)],
                         P[static_cast<std::size_t>(i)]) == 0.0);
}
