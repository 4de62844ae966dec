#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stepper.hpp"
#include "threads.hpp"

// Reproduction harness: vertex identification across levels, the refinement
// consistency study, the CFL stability demonstration, and the log-log
// power-law fit of the temperature decay.

namespace fractal_heat {

// Identifies each canonical level-m_from vertex with the canonical level-m_to
// vertex at the same coordinates (V_m is nested in V_{m'}). 0-based on both
// sides. Failure modes are internal consistency errors and must never occur.
inline std::vector<index_t> restriction_map(int d, int m_from, int m_to) {
  validate_family(d);
  validate_depth(m_from);
  if (m_to < m_from) throw argument_error("restriction_map requires m_to >= m_from");
  const VertexSet coarse = canonical_coordinates({d, m_from});
  const VertexSet fine = canonical_coordinates({d, m_to});
  const double scale = std::ldexp(1.0, m_to + 12);
  auto key_of = [&](const Point& p) {
    return std::array<long long, 3>{std::llround(p[0] * scale), std::llround(p[1] * scale),
                                    std::llround(p[2] * scale)};
  };
  std::map<std::array<long long, 3>, index_t> lookup;
  for (std::size_t i = 0; i < fine.coords.size(); ++i)
    if (!lookup.emplace(key_of(fine.coords[i]), static_cast<index_t>(i)).second)
      throw numerical_error("restriction_map: duplicate fine vertex key");
  std::vector<index_t> out(coarse.coords.size(), -1);
  std::vector<char> used(fine.coords.size(), 0);
  for (std::size_t j = 0; j < coarse.coords.size(); ++j) {
    const auto it = lookup.find(key_of(coarse.coords[j]));
    if (it == lookup.end())
      throw numerical_error("restriction_map: unmatched vertex " + std::to_string(j + 1) +
                            " between levels " + std::to_string(m_from) + " and " +
                            std::to_string(m_to));
    if (point_distance(coarse.coords[j], fine.coords[static_cast<std::size_t>(it->second)]) > 1e-9)
      throw numerical_error("restriction_map: coordinate mismatch beyond 1e-9");
    if (used[static_cast<std::size_t>(it->second)])
      throw numerical_error("restriction_map: map is not injective");
    used[static_cast<std::size_t>(it->second)] = 1;
    out[j] = it->second;
  }
  // canonical order puts corners last in the same P_0..P_{d-1} order at every level
  for (int i = 0; i < d; ++i)
    if (out[coarse.coords.size() - static_cast<std::size_t>(d) + static_cast<std::size_t>(i)] !=
        static_cast<index_t>(fine.coords.size()) - d + i)
      throw numerical_error("restriction_map: boundary flag not preserved");
  return out;
}

inline std::vector<index_t> restriction_map(int d, int m) { return restriction_map(d, m, m + 1); }

struct RefinementReport {
  int m_coarse = 0;
  int m_fine = 0;
  index_t init_vertex_coarse = 0;  // canonical 1-based at m_coarse
  double h_coarse = 0.0;
  double h_fine = 0.0;
  index_t steps_coarse = 0;
  index_t steps_fine = 0;
  double error = 0.0;  // max over shared sample times of the level-m_coarse scaled l2 difference
};

// Compares one level pair on the same physical problem: the spike vertex is
// carried to the fine level through the restriction map, both runs use step
// sizes at half the CFL bound of their level with h_coarse an integer
// multiple of h_fine, and the fine solution is restricted back for the
// difference norm. m_fine == m_coarse is allowed (identity map, error 0).
inline RefinementReport refinement_pair(int d, int m_coarse, int m_fine, double T, SchemeKind kind,
                                        index_t init_vertex) {
  validate_family(d);
  if (m_coarse < 1) throw argument_error("refinement_pair requires m >= 1");
  if (m_fine != m_coarse && m_fine != m_coarse + 1)
    throw argument_error("refinement_pair compares a level with itself or its successor");
  if (!(T > 0.0)) throw argument_error("horizon T must be > 0");

  RefinementReport rep;
  rep.m_coarse = m_coarse;
  rep.m_fine = m_fine;
  rep.init_vertex_coarse = init_vertex;
  rep.steps_coarse = static_cast<index_t>(std::ceil(T / (0.5 * cfl_max_step(d, m_coarse))));
  rep.h_coarse = T / static_cast<double>(rep.steps_coarse);
  const index_t r = std::max<index_t>(
      1, static_cast<index_t>(std::ceil(rep.h_coarse / (0.5 * cfl_max_step(d, m_fine)))));
  rep.steps_fine = rep.steps_coarse * r;
  rep.h_fine = T / static_cast<double>(rep.steps_fine);

  std::vector<index_t> map;
  if (m_fine == m_coarse) {
    map.resize(static_cast<std::size_t>(vertex_count(d, m_coarse)));
    for (std::size_t i = 0; i < map.size(); ++i) map[i] = static_cast<index_t>(i);
  } else {
    map = restriction_map(d, m_coarse, m_fine);
  }

  const StateVector init_c = spike_initial({d, m_coarse}, init_vertex);
  const StateVector init_f =
      spike_initial({d, m_fine}, map[static_cast<std::size_t>(init_vertex - 1)] + 1);

  SchemeConfig cfg_c;
  cfg_c.kind = kind;
  cfg_c.T = T;
  cfg_c.steps = rep.steps_coarse;
  SchemeConfig cfg_f = cfg_c;
  cfg_f.steps = rep.steps_fine;

  const SparseLaplacian Rc = dirichlet_restrict(assemble_canonical({d, m_coarse}));
  const SparseLaplacian Rf =
      m_fine == m_coarse ? Rc : dirichlet_restrict(assemble_canonical({d, m_fine}));
  const TrajectoryRecord rec_c = simulate(Rc, cfg_c, init_c, {}, 1);
  const TrajectoryRecord rec_f = simulate(Rf, cfg_f, init_f, {}, r);
  if (rec_c.snapshots.size() != rec_f.snapshots.size())
    throw numerical_error("refinement_pair: snapshot alignment failed");

  const double cells = static_cast<double>(detail::ipow(d, m_coarse));
  for (std::size_t s = 0; s < rec_c.snapshots.size(); ++s) {
    const auto& uc = rec_c.snapshots[s].values;
    const auto& uf = rec_f.snapshots[s].values;
    double acc = 0.0;
    for (std::size_t j = 0; j < uc.size(); ++j) {
      const double diff = uc[j] - uf[static_cast<std::size_t>(map[j])];
      acc += diff * diff;
    }
    rep.error = std::max(rep.error, std::sqrt(acc / cells));
  }
  return rep;
}

// Pairs (m, m+1) for m = m_low .. m_high-1, all spiking the same physical
// point: canonical interior vertex init_vertex of the coarsest level,
// transported upward through the restriction maps. Cells run in parallel and
// are merged in parameter order.
inline std::vector<RefinementReport> refinement_study(int d, int m_low, int m_high, double T,
                                                      SchemeKind kind, index_t init_vertex = 1) {
  validate_family(d);
  if (m_low < 1) throw argument_error("refinement_study requires m_low >= 1");
  if (m_high <= m_low)
    throw argument_error("m range must span at least two levels (m_low < m_high)");
  std::vector<index_t> init_at(static_cast<std::size_t>(m_high - m_low), 0);
  init_at[0] = init_vertex;
  for (int k = 1; k < m_high - m_low; ++k) {
    const std::vector<index_t> map = restriction_map(d, m_low + k - 1);
    init_at[static_cast<std::size_t>(k)] =
        map[static_cast<std::size_t>(init_at[static_cast<std::size_t>(k) - 1] - 1)] + 1;
  }
  std::vector<RefinementReport> out(static_cast<std::size_t>(m_high - m_low));
  parallel_cells(m_high - m_low, [&](std::int64_t i) {
    out[static_cast<std::size_t>(i)] =
        refinement_pair(d, m_low + static_cast<int>(i), m_low + static_cast<int>(i) + 1, T, kind,
                        init_at[static_cast<std::size_t>(i)]);
  });
  return out;
}

enum class CflClass { stable, divergent, inconclusive };

inline const char* cfl_class_name(CflClass c) {
  switch (c) {
    case CflClass::stable:
      return "stable";
    case CflClass::divergent:
      return "divergent";
    default:
      return "inconclusive";
  }
}

struct CflDemoRow {
  double factor = 0.0;
  double h = 0.0;
  CflClass classification = CflClass::inconclusive;
  index_t divergence_step = -1;  // -1 when the norm never crossed the threshold
  index_t steps_run = 0;
  double initial_norm = 0.0;
  double final_norm = 0.0;
};

// Raw explicit spike runs at h = factor * h_max, deliberately ignoring the
// CFL policy. stable: scaled l2 norm non-increasing at every step (1e-12
// relative slack); divergent: norm exceeded 1e6 x initial (step recorded).
inline std::vector<CflDemoRow> cfl_demo(int d, int m, const std::vector<double>& factors,
                                        index_t steps = 10000, index_t init_vertex = 1) {
  validate_family(d);
  validate_depth(m);
  if (steps < 1) throw argument_error("cfl_demo requires steps >= 1");
  for (double f : factors)
    if (!(f > 0.0)) throw argument_error("CFL factors must be > 0");
  const SparseLaplacian R = dirichlet_restrict(assemble_canonical({d, m}));
  const double h_max = cfl_max_step(d, m);
  std::vector<CflDemoRow> rows(factors.size());
  parallel_cells(static_cast<std::int64_t>(factors.size()), [&](std::int64_t idx) {
    CflDemoRow row;
    row.factor = factors[static_cast<std::size_t>(idx)];
    row.h = row.factor * h_max;
    StateVector u = spike_initial({d, m}, init_vertex);
    const SchemeMatrixView view = scheme_view(R, row.h);
    std::vector<double> scratch;
    row.initial_norm = norm_2_scaled(u);
    double prev = row.initial_norm;
    double last = prev;
    bool monotone = true;
    for (index_t k = 1; k <= steps; ++k) {
      explicit_step_inplace(u, view, scratch);
      const double nk = norm_2_scaled(u);
      last = nk;
      row.steps_run = k;
      if (!std::isfinite(nk) || nk > 1e6 * row.initial_norm) {
        row.classification = CflClass::divergent;
        row.divergence_step = k;
        break;
      }
      if (nk > prev * (1.0 + 1e-12)) monotone = false;
      prev = nk;
    }
    row.final_norm = last;
    if (row.divergence_step < 0) row.classification = monotone ? CflClass::stable : CflClass::inconclusive;
    rows[static_cast<std::size_t>(idx)] = row;
  });
  return rows;
}

struct FitWindow {
  double t_min = 0.0;
  double t_max = 0.0;
};

// Default regression window: [10h, min(T/2, 1/(c_m lambda_min))]. The lower
// end drops the initial transient; the upper end stops where the slowest
// Dirichlet mode exp(-c_m lambda_min t) flattens the log-log curve into the
// exponential tail.
inline FitWindow default_fit_window(int d, int m, double T, double h) {
  if (!(T > 0.0) || !(h > 0.0)) throw argument_error("default_fit_window requires T, h > 0");
  FitWindow w;
  w.t_min = 10.0 * h;
  w.t_max = std::min(T / 2.0, 1.0 / (time_scale(d, m) * lambda_min_decimated(d, m)));
  if (!(w.t_min < w.t_max))
    throw argument_error("empty default fit window: 10h = " + std::to_string(w.t_min) +
                         " >= t_max = " + std::to_string(w.t_max) +
                         " (increase steps or the horizon)");
  return w;
}

// Log-uniform thinning: indices of the samples nearest to a geometric grid
// between the first and last time, ascending and deduplicated.
inline std::vector<std::size_t> log_thin_indices(const std::vector<double>& t, std::size_t cap) {
  if (cap < 2) throw argument_error("thinning cap must be >= 2");
  if (t.size() <= cap) {
    std::vector<std::size_t> all(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) all[i] = i;
    return all;
  }
  if (!(t.front() > 0.0)) throw argument_error("log thinning requires positive times");
  const double l0 = std::log(t.front());
  const double l1 = std::log(t.back());
  std::vector<std::size_t> out;
  out.reserve(cap);
  for (std::size_t j = 0; j < cap; ++j) {
    const double g =
        std::exp(l0 + (l1 - l0) * static_cast<double>(j) / static_cast<double>(cap - 1));
    const auto it = std::lower_bound(t.begin(), t.end(), g);
    std::size_t i = static_cast<std::size_t>(it - t.begin());
    if (i == t.size()) i = t.size() - 1;
    if (i > 0 && g - t[i - 1] <= t[i] - g) i = i - 1;
    if (out.empty() || i > out.back()) out.push_back(i);
  }
  return out;
}

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  index_t sample_count = 0;
};

// Ordinary least squares on (ln t, ln u) over the window, thinned to at most
// 2000 log-uniform samples.
inline FitResult power_law_fit(const std::vector<double>& t, const std::vector<double>& u,
                               const FitWindow& window) {
  if (t.size() != u.size()) throw argument_error("time/value series length mismatch");
  if (!(window.t_min > 0.0) || !(window.t_max > window.t_min))
    throw argument_error("fit window must satisfy 0 < t_min < t_max");
  std::vector<double> ts, us;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < window.t_min || t[i] > window.t_max) continue;
    if (!(u[i] > 0.0))
      throw argument_error("non-positive sample u(" + std::to_string(t[i]) +
                           ") inside the fit window");
    ts.push_back(t[i]);
    us.push_back(u[i]);
  }
  if (ts.size() < 10)
    throw argument_error("too few samples in the fit window (" + std::to_string(ts.size()) +
                         " < 10)");
  const std::vector<std::size_t> pick = log_thin_indices(ts, 2000);
  const std::size_t n = pick.size();
  double sx = 0.0, sy = 0.0;
  std::vector<double> xs(n), ys(n);
  for (std::size_t k = 0; k < n; ++k) {
    xs[k] = std::log(ts[pick[k]]);
    ys[k] = std::log(us[pick[k]]);
    sx += xs[k];
    sy += ys[k];
  }
  const double xbar = sx / static_cast<double>(n);
  const double ybar = sy / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxx += (xs[k] - xbar) * (xs[k] - xbar);
    sxy += (xs[k] - xbar) * (ys[k] - ybar);
    syy += (ys[k] - ybar) * (ys[k] - ybar);
  }
  if (!(sxx > 0.0)) throw argument_error("degenerate fit window: all times coincide");
  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  double ss_res = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double e = ys[k] - (fit.intercept + fit.slope * xs[k]);
    ss_res += e * e;
  }
  fit.r_squared = syy == 0.0 ? 1.0 : std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  fit.t_min = window.t_min;
  fit.t_max = window.t_max;
  fit.sample_count = static_cast<index_t>(n);
  return fit;
}

// Extracts one probe column of a trajectory as (t, u) series.
inline void probe_series(const TrajectoryRecord& rec, std::size_t probe_index,
                         std::vector<double>& t, std::vector<double>& u) {
  const std::size_t np = rec.probe_ids.size();
  if (probe_index >= np) throw argument_error("probe index out of range");
  const std::size_t rows = rec.probe_values.size() / np;
  const double h = rec.config.h();
  t.resize(rows);
  u.resize(rows);
  for (std::size_t k = 0; k < rows; ++k) {
    t[k] = static_cast<double>(k) * h;
    u[k] = rec.probe_values[k * np + probe_index];
  }
}

}  // namespace fractal_heat
