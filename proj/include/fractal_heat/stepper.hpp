#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "spectral.hpp"

// Time integration of du/dt = -c_m L u on the interior vertices: explicit
// Euler u <- (I - h c_m L) u and implicit Euler (I + h c_m L) u_next = u
// solved by conjugate gradient. Dirichlet values live outside the state
// vector and are identically zero.

namespace fractal_heat {

struct StateVector {
  int d = 3;
  int m = 0;
  double t = 0.0;
  std::vector<double> values;  // interior vertices, canonical order
};

enum class SchemeKind { explicit_euler, implicit_euler };
enum class CflPolicy { enforce, warn, ignore };

struct SchemeConfig {
  SchemeKind kind = SchemeKind::explicit_euler;
  double T = 1.0;
  index_t steps = 1;  // N; N = 0 means "initial state only"
  double cg_rel_tol = 1e-10;
  index_t cg_max_iter_factor = 10;  // iteration cap = factor * dimension
  CflPolicy cfl_policy = CflPolicy::enforce;
  double h() const { return steps > 0 ? T / static_cast<double>(steps) : 0.0; }
};

inline void validate_scheme_config(const SchemeConfig& c) {
  if (!(c.T > 0.0)) throw argument_error("horizon T must be > 0");
  if (c.steps < 0) throw argument_error("step count must be >= 0");
  if (!(c.cg_rel_tol > 0.0 && c.cg_rel_tol <= 1e-3))
    throw argument_error("cg_rel_tol must lie in (0, 1e-3]");
  if (c.cg_max_iter_factor < 1) throw argument_error("cg_max_iter_factor must be >= 1");
}

// Spike initial condition: 1 at one interior vertex, 0 elsewhere. Vertex ids
// are canonical and 1-based; interior ids are 1..N_m-d, the d boundary
// corners come after and are rejected (Dirichlet forces 0 there).
inline StateVector spike_initial(const SimplexSpec& spec, index_t vertex_id) {
  validate_family(spec.d);
  validate_depth(spec.m);
  const index_t n = vertex_count(spec.d, spec.m);
  const index_t n_int = n - spec.d;
  if (vertex_id < 1 || vertex_id > n)
    throw argument_error("vertex id " + std::to_string(vertex_id) + " out of range 1.." +
                         std::to_string(n));
  if (vertex_id > n_int)
    throw argument_error("vertex id " + std::to_string(vertex_id) +
                         " is a boundary corner; the Dirichlet condition forces 0 there");
  StateVector u;
  u.d = spec.d;
  u.m = spec.m;
  u.t = 0.0;
  u.values.assign(static_cast<std::size_t>(n_int), 0.0);
  u.values[static_cast<std::size_t>(vertex_id - 1)] = 1.0;
  return u;
}

// A = I - h c_m L and A~ = I + h c_m L, applied matrix-free.
struct SchemeMatrixView {
  const SparseLaplacian* laplacian = nullptr;  // restricted, canonical interior order
  double c = 0.0;                              // c_m
  double h = 0.0;
};

inline SchemeMatrixView scheme_view(const SparseLaplacian& restricted, double h) {
  if (!restricted.boundary_ids.empty())
    throw argument_error("scheme_view expects the restricted Laplacian");
  SchemeMatrixView v;
  v.laplacian = &restricted;
  v.c = time_scale(restricted.d, restricted.m);
  v.h = h;
  return v;
}

inline void laplacian_apply(const SparseLaplacian& L, const double* x, double* y) {
  for (index_t i = 0; i < L.n; ++i) {
    double acc = 0.0;
    for (index_t k = L.row_ptr[static_cast<std::size_t>(i)];
         k < L.row_ptr[static_cast<std::size_t>(i) + 1]; ++k)
      acc += static_cast<double>(L.values[static_cast<std::size_t>(k)]) *
             x[L.col_idx[static_cast<std::size_t>(k)]];
    y[i] = acc;
  }
}

namespace detail {
inline void check_dims(const StateVector& u, const SchemeMatrixView& v) {
  if (v.laplacian == nullptr) throw argument_error("scheme view has no matrix");
  if (static_cast<index_t>(u.values.size()) != v.laplacian->n ||
      u.d != v.laplacian->d || u.m != v.laplacian->m)
    throw argument_error("state/matrix dimension mismatch");
}
}  // namespace detail

// u <- u - h c (L u); scratch is reused so repeated calls do not allocate.
inline void explicit_step_inplace(StateVector& u, const SchemeMatrixView& v,
                                  std::vector<double>& scratch) {
  detail::check_dims(u, v);
  scratch.resize(u.values.size());
  laplacian_apply(*v.laplacian, u.values.data(), scratch.data());
  const double a = v.h * v.c;
  for (std::size_t i = 0; i < u.values.size(); ++i) u.values[i] -= a * scratch[i];
  u.t += v.h;
}

inline StateVector explicit_step(const StateVector& u, const SchemeMatrixView& v) {
  StateVector out = u;
  std::vector<double> scratch;
  explicit_step_inplace(out, v, scratch);
  return out;
}

struct CgResult {
  index_t iterations = 0;
  double rel_residual = 0.0;
};

struct CgWorkspace {
  std::vector<double> r, p, ap;
};

// Conjugate gradient for (I + h c L) x = b: warm start x = b, stop when
// ||r||_2 <= rel_tol ||b||_2. Sequential, hence bitwise deterministic.
inline CgResult cg_solve(const SchemeMatrixView& v, const std::vector<double>& b,
                         std::vector<double>& x, CgWorkspace& w, double rel_tol,
                         index_t max_iter) {
  const std::size_t n = b.size();
  const double a = v.h * v.c;
  auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
    out.resize(n);
    laplacian_apply(*v.laplacian, in.data(), out.data());
    for (std::size_t i = 0; i < n; ++i) out[i] = in[i] + a * out[i];
  };
  auto dot = [](const std::vector<double>& u1, const std::vector<double>& u2) {
    double s = 0.0;
    for (std::size_t i = 0; i < u1.size(); ++i) s += u1[i] * u2[i];
    return s;
  };
  double bnorm2 = dot(b, b);
  if (bnorm2 == 0.0) {
    x.assign(n, 0.0);
    return {0, 0.0};
  }
  x = b;
  apply(x, w.r);
  for (std::size_t i = 0; i < n; ++i) w.r[i] = b[i] - w.r[i];
  w.p = w.r;
  double rs = dot(w.r, w.r);
  const double stop2 = rel_tol * rel_tol * bnorm2;
  index_t it = 0;
  while (rs > stop2) {
    if (it >= max_iter)
      throw numerical_error("conjugate gradient failed to converge in " + std::to_string(max_iter) +
                            " iterations (relative residual " +
                            std::to_string(std::sqrt(rs / bnorm2)) + ")");
    apply(w.p, w.ap);
    const double pap = dot(w.p, w.ap);
    if (!(pap > 0.0)) throw numerical_error("conjugate gradient hit a non-positive curvature");
    const double alpha = rs / pap;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * w.p[i];
      w.r[i] -= alpha * w.ap[i];
    }
    const double rs_next = dot(w.r, w.r);
    const double beta = rs_next / rs;
    rs = rs_next;
    for (std::size_t i = 0; i < n; ++i) w.p[i] = w.r[i] + beta * w.p[i];
    ++it;
  }
  return {it, std::sqrt(rs / bnorm2)};
}

inline CgResult implicit_step_inplace(StateVector& u, const SchemeMatrixView& v, CgWorkspace& w,
                                      std::vector<double>& x, double rel_tol, index_t max_iter) {
  detail::check_dims(u, v);
  const CgResult res = cg_solve(v, u.values, x, w, rel_tol, max_iter);
  u.values.swap(x);
  u.t += v.h;
  return res;
}

inline StateVector implicit_step(const StateVector& u, const SchemeMatrixView& v,
                                 double rel_tol = 1e-10, index_t max_iter_factor = 10) {
  StateVector out = u;
  CgWorkspace w;
  std::vector<double> x;
  implicit_step_inplace(out, v, w, x, rel_tol,
                        max_iter_factor * std::max<index_t>(1, static_cast<index_t>(u.values.size())));
  return out;
}

struct CflCheck {
  bool satisfied = false;
  double h_max = 0.0;
};

inline CflCheck check_cfl(double h, int d, int m) {
  if (!(h > 0.0)) throw argument_error("check_cfl requires h > 0");
  const double hm = cfl_max_step(d, m);
  return {h <= hm * (1.0 + 1e-12), hm};
}

// (d^{-m} sum u_i^2)^{1/2}; the trajectory norm ||.||_{2,inf} is the max of
// this over recorded steps.
inline double norm_2_scaled(const StateVector& u) {
  double s = 0.0;
  for (double v : u.values) s += v * v;
  return std::sqrt(s / static_cast<double>(detail::ipow(u.d, u.m)));
}

inline double norm_sup(const StateVector& u) {
  double s = 0.0;
  for (double v : u.values) s = std::max(s, std::abs(v));
  return s;
}

struct Snapshot {
  index_t step = 0;
  double t = 0.0;
  std::vector<double> values;
};

struct TrajectoryRecord {
  SimplexSpec spec;
  SchemeConfig config;
  bool cfl_checked = false;  // true iff explicit with steps > 0
  CflCheck cfl;
  bool cfl_warned = false;
  std::vector<index_t> probe_ids;    // canonical, 1-based; boundary ids give 0 columns
  std::vector<double> probe_values;  // row-major, (steps+1) x probe_ids.size()
  std::vector<Snapshot> snapshots;   // steps k = 0 mod sample_every, plus the final step
  StateVector final_state;
  double norm_2_inf = 0.0;  // max over steps 0..N of norm_2_scaled
  index_t cg_iterations_max = 0;
  double cg_rel_residual_max = 0.0;
};

// Full integration loop. Probes are recorded at every step k = 0..N; full
// snapshots at k = 0 mod sample_every and always at k = N. Non-finite values
// abort with the offending step index. Under cfl_policy = enforce an explicit
// run violating the CFL bound is rejected before any stepping.
inline TrajectoryRecord simulate(const SparseLaplacian& restricted, const SchemeConfig& config,
                                 const StateVector& init, const std::vector<index_t>& probes,
                                 index_t sample_every) {
  validate_scheme_config(config);
  if (!restricted.boundary_ids.empty())
    throw argument_error("simulate expects the restricted Laplacian");
  if (static_cast<index_t>(init.values.size()) != restricted.n || init.d != restricted.d ||
      init.m != restricted.m)
    throw argument_error("initial state does not match the matrix dimensions");
  if (sample_every < 1) throw argument_error("sample_every must be >= 1");
  const index_t n_total = vertex_count(restricted.d, restricted.m);
  for (index_t id : probes)
    if (id < 1 || id > n_total)
      throw argument_error("probe id " + std::to_string(id) + " out of range 1.." +
                           std::to_string(n_total));

  TrajectoryRecord rec;
  rec.spec = {restricted.d, restricted.m};
  rec.config = config;
  rec.probe_ids = probes;
  const double h = config.h();
  if (config.kind == SchemeKind::explicit_euler && config.steps > 0) {
    rec.cfl_checked = true;
    rec.cfl = check_cfl(h, restricted.d, restricted.m);
    if (!rec.cfl.satisfied) {
      if (config.cfl_policy == CflPolicy::enforce)
        throw numerical_error("explicit scheme violates the CFL bound: h=" + std::to_string(h) +
                              " > h_max=" + std::to_string(rec.cfl.h_max) +
                              " (raise steps, lower T, or pass cfl policy warn/ignore)");
      if (config.cfl_policy == CflPolicy::warn) rec.cfl_warned = true;
    }
  }

  StateVector u = init;
  u.t = 0.0;
  const SchemeMatrixView view = scheme_view(restricted, h);
  std::vector<double> scratch;
  CgWorkspace cg;
  std::vector<double> cg_x;
  const index_t cg_cap = config.cg_max_iter_factor * std::max<index_t>(1, restricted.n);
  rec.probe_values.reserve(static_cast<std::size_t>(config.steps + 1) * probes.size());

  auto record_probes = [&](const StateVector& s) {
    for (index_t id : probes)
      rec.probe_values.push_back(id <= restricted.n ? s.values[static_cast<std::size_t>(id - 1)]
                                                    : 0.0);
  };
  auto record_snapshot = [&](index_t k, const StateVector& s) {
    rec.snapshots.push_back({k, s.t, s.values});
  };

  record_probes(u);
  record_snapshot(0, u);
  rec.norm_2_inf = norm_2_scaled(u);
  for (index_t k = 1; k <= config.steps; ++k) {
    if (config.kind == SchemeKind::explicit_euler) {
      explicit_step_inplace(u, view, scratch);
    } else {
      const CgResult res = implicit_step_inplace(u, view, cg, cg_x, config.cg_rel_tol, cg_cap);
      rec.cg_iterations_max = std::max(rec.cg_iterations_max, res.iterations);
      rec.cg_rel_residual_max = std::max(rec.cg_rel_residual_max, res.rel_residual);
    }
    u.t = static_cast<double>(k) * h;  // exact k*h, no accumulation drift
    for (double val : u.values)
      if (!std::isfinite(val))
        throw numerical_error("non-finite state value at step " + std::to_string(k) +
                              " (instability)");
    record_probes(u);
    rec.norm_2_inf = std::max(rec.norm_2_inf, norm_2_scaled(u));
    if (k % sample_every == 0 || k == config.steps) record_snapshot(k, u);
  }
  rec.final_state = std::move(u);
  return rec;
}

inline TrajectoryRecord simulate(const SimplexSpec& spec, const SchemeConfig& config,
                                 const StateVector& init, const std::vector<index_t>& probes,
                                 index_t sample_every) {
  const SparseLaplacian R = dirichlet_restrict(assemble_canonical(spec));
  return simulate(R, config, init, probes, sample_every);
}

}  // namespace fractal_heat
