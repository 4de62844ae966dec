#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "laplacian.hpp"

// Spectral decimation machinery: the quadratic Phi(x) = x(d+2-x), its inverse
// branches, the generated Dirichlet spectrum, the eigenvalue bound 2d, and the
// CFL step bound derived from it. Plus a dense eigensolver used as the
// verification oracle.

namespace fractal_heat {

inline double phi_forward(int d, double x) {
  validate_family(d);
  return x * (static_cast<double>(d) + 2.0 - x);
}

enum class Branch { minus, plus };

// phi_-/phi_+ : the two solutions of Phi(y) = x, defined for x <= (d+2)^2/4.
inline double phi_inverse(int d, double x, Branch b) {
  validate_family(d);
  const double p = static_cast<double>(d) + 2.0;
  double disc = p * p - 4.0 * x;
  if (disc < 0.0) {
    if (disc < -1e-9 * p * p)
      throw argument_error("phi_inverse: x exceeds the branch domain (d+2)^2/4");
    disc = 0.0;
  }
  const double s = std::sqrt(disc);
  return b == Branch::minus ? (p - s) / 2.0 : (p + s) / 2.0;
}

// Sharp family bound 0 <= lambda <= 2d on the restricted spectrum.
inline double spectral_bound(int d) {
  validate_family(d);
  return 2.0 * d;
}

namespace detail {
inline std::int64_t ipow(std::int64_t base, int e) {
  std::int64_t p = 1;
  for (int k = 0; k < e; ++k) p = checked_mul(p, base);
  return p;
}
}  // namespace detail

// c_m = (d/2)(d+2)^m, the renormalization factor of the graph Laplacian.
inline double time_scale(int d, int m) {
  validate_family(d);
  validate_depth(m);
  return static_cast<double>(detail::ipow(d + 2, m)) * static_cast<double>(d) / 2.0;
}

// h_max = 2/(d^2 (d+2)^m): for h <= h_max every explicit amplification factor
// gamma = 1 - h c_m lambda satisfies |gamma| <= 1 on lambda in [0, 2d].
inline double cfl_max_step(int d, int m) {
  if (d < 2) throw argument_error("cfl_max_step requires d >= 2");
  validate_depth(m);
  return 2.0 / (static_cast<double>(d) * static_cast<double>(d) *
                static_cast<double>(detail::ipow(d + 2, m)));
}

// Smallest Dirichlet eigenvalue at level m along the decimation orbit:
// phi_-^(m-1)(2). Sets the slowest decay rate exp(-c_m lambda_min t).
inline double lambda_min_decimated(int d, int m) {
  validate_family(d);
  if (m < 1) throw argument_error("lambda_min_decimated requires m >= 1");
  double x = 2.0;
  for (int k = 1; k < m; ++k) x = phi_inverse(d, x, Branch::minus);
  return x;
}

// Values-only decimation spectrum: seeds 2 and d+2 enter at level 1; 2d enters
// at level 2 for the gasket and level 1 for the tetrahedron (its level-1
// restricted spectrum already contains 8 = 2d). Each seed entering at level j
// is closed under words of inverse branches of length up to m-j, intersected
// with [0, 2d] and deduplicated at 1e-10.
inline std::vector<double> decimation_spectrum(int d, int m) {
  validate_family(d);
  if (m < 1) throw argument_error("decimation_spectrum requires m >= 1");
  struct Seed {
    double value;
    int entry;
  };
  const Seed seeds[3] = {{2.0, 1},
                         {static_cast<double>(d) + 2.0, 1},
                         {2.0 * static_cast<double>(d), d == 3 ? 2 : 1}};
  std::vector<double> vals;
  auto add = [&](double v) {
    if (v < -1e-10 || v > 2.0 * d + 1e-10) return;
    for (double u : vals)
      if (std::abs(u - v) < 1e-10) return;
    vals.push_back(v);
  };
  for (const Seed& s : seeds) {
    if (s.entry > m) continue;
    std::vector<double> layer = {s.value};
    add(s.value);
    for (int k = 0; k < m - s.entry; ++k) {
      std::vector<double> next;
      next.reserve(2 * layer.size());
      for (double x : layer)
        for (Branch b : {Branch::minus, Branch::plus}) {
          const double y = phi_inverse(d, x, b);
          next.push_back(y);
          add(y);
        }
      layer = std::move(next);
    }
  }
  std::sort(vals.begin(), vals.end());
  return vals;
}

// Dense symmetric eigensolve of a restricted Laplacian; the oracle against
// which the decimation set is checked. Ascending, with multiplicity.
inline std::vector<double> direct_spectrum(const SparseLaplacian& L) {
  if (!L.boundary_ids.empty())
    throw argument_error("direct_spectrum expects a restricted (boundary-free) matrix");
  if (L.n > 2000)
    throw argument_error("direct_spectrum dense cap is 2000, got n=" + std::to_string(L.n) +
                         "; use the decimation spectrum instead");
  if (L.n == 0) return {};
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(L.n, L.n);
  for (index_t i = 0; i < L.n; ++i)
    for (index_t k = L.row_ptr[static_cast<std::size_t>(i)];
         k < L.row_ptr[static_cast<std::size_t>(i) + 1]; ++k)
      A(i, L.col_idx[static_cast<std::size_t>(k)]) =
          static_cast<double>(L.values[static_cast<std::size_t>(k)]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw numerical_error("dense eigensolve failed to converge");
  std::vector<double> out(static_cast<std::size_t>(L.n));
  for (index_t i = 0; i < L.n; ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  std::sort(out.begin(), out.end());
  return out;
}

// Cluster a sorted eigenvalue list into (representative, multiplicity) pairs;
// the representative is the first member of each cluster.
inline std::vector<std::pair<double, index_t>> group_eigenvalues(const std::vector<double>& vals,
                                                                 double tol = 1e-8) {
  std::vector<std::pair<double, index_t>> out;
  for (double v : vals) {
    if (!out.empty() && v - out.back().first < tol &&
        v - out.back().first > -tol)
      ++out.back().second;
    else
      out.emplace_back(v, 1);
  }
  return out;
}

// Containment check: every direct eigenvalue must be within tol of some
// generated value. Returns the worst distance observed.
struct ContainmentReport {
  bool contained = false;
  double max_distance = 0.0;
  index_t n_direct = 0;
  index_t n_decimation = 0;
};

inline ContainmentReport check_containment(const std::vector<double>& direct,
                                           const std::vector<double>& decimated,
                                           double tol = 1e-8) {
  ContainmentReport rep;
  rep.n_direct = static_cast<index_t>(direct.size());
  rep.n_decimation = static_cast<index_t>(decimated.size());
  rep.contained = true;
  for (double lam : direct) {
    double best = std::numeric_limits<double>::infinity();
    for (double v : decimated) best = std::min(best, std::abs(lam - v));
    rep.max_distance = std::max(rep.max_distance, best);
    if (best > tol) rep.contained = false;
  }
  return rep;
}

}  // namespace fractal_heat
