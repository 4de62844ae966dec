#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <fractal_heat/fractal_heat.hpp>

// Acceptance gate: ten criteria, one line each, all of them run even after a
// failure. Exit code 0 only when every criterion passes. argv[1] names the
// CLI binary for the determinism criterion (defaults to ./fractal_heat next
// to this binary).

namespace {

using namespace fractal_heat;
namespace fs = std::filesystem;

struct Criterion {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& msg) {
    if (ok && !cond) {
      ok = false;
      detail = msg;
    }
  }
};

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// 1. Closed-form and recursive vertex counts agree; N_6 = 1095 for the gasket.
void criterion_counts(Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int d = 2; d <= 6; ++d)
    for (int m = 0; m <= 12; ++m)
      c.require(vertex_count(d, m) == vertex_count_recursive(d, m),
                "closed form vs recursion mismatch at d=" + std::to_string(d) +
                    " m=" + std::to_string(m));
  c.require(vertex_count(3, 6) == 1095, "N_6(gasket) != 1095");
  const double ms = ms_since(t0);
  c.require(ms < 1.0, "runtime " + std::to_string(ms) + " ms >= 1 ms");
}

// 2. Recursive assembly equals the IFS-enumeration oracle entry for entry
// under the coordinate-matching permutation, exact integers.
void criterion_assembly(Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int d : {3, 4})
    for (int m = 0; m <= 4; ++m) {
      const SparseLaplacian L = assemble_laplacian({d, m});
      const VertexSet vs = vertex_coordinates({d, m});
      const GeometricAdjacency g = geometric_adjacency({d, m});
      c.require(L.n == g.n, "vertex count mismatch at d=" + std::to_string(d) +
                                " m=" + std::to_string(m));
      if (L.n != g.n) return;
      const double scale = std::ldexp(1.0, m + 12);
      std::map<std::array<long long, 3>, index_t> lookup;
      for (std::size_t i = 0; i < g.coords.size(); ++i)
        lookup.emplace(std::array<long long, 3>{std::llround(g.coords[i][0] * scale),
                                                std::llround(g.coords[i][1] * scale),
                                                std::llround(g.coords[i][2] * scale)},
                       static_cast<index_t>(i));
      std::vector<index_t> perm(static_cast<std::size_t>(L.n), -1);
      for (std::size_t i = 0; i < vs.coords.size(); ++i) {
        const auto it = lookup.find(std::array<long long, 3>{
            std::llround(vs.coords[i][0] * scale), std::llround(vs.coords[i][1] * scale),
            std::llround(vs.coords[i][2] * scale)});
        c.require(it != lookup.end(), "assembled vertex missing from the oracle at d=" +
                                          std::to_string(d) + " m=" + std::to_string(m));
        if (it == lookup.end()) return;
        perm[i] = it->second;
      }
      std::vector<std::vector<index_t>> nbr(static_cast<std::size_t>(g.n));
      for (const auto& e : g.edges) {
        nbr[static_cast<std::size_t>(e.first)].push_back(e.second);
        nbr[static_cast<std::size_t>(e.second)].push_back(e.first);
      }
      const SparseLaplacian Lo = detail::csr_from_adjacency(d, m, nbr, {});
      const SparseLaplacian Lp = permute_laplacian(L, perm);
      c.require(Lp.row_ptr == Lo.row_ptr && Lp.col_idx == Lo.col_idx && Lp.values == Lo.values,
                "matrix mismatch at d=" + std::to_string(d) + " m=" + std::to_string(m));
    }
  const double ms = ms_since(t0);
  c.require(ms < 5000.0, "runtime " + std::to_string(ms) + " ms >= 5 s");
}

// 3. Level-1 restricted spectra: {2, 5, 5} and {2, 6, 6, 6, 8, 8}.
void criterion_level1_spectra(Criterion& c) {
  const auto g = direct_spectrum(dirichlet_restrict(assemble_canonical({3, 1})));
  const double gasket_tol = 1e-12;
  c.require(g.size() == 3, "gasket level-1 spectrum size != 3");
  if (g.size() == 3) {
    const double want[3] = {2.0, 5.0, 5.0};
    for (int i = 0; i < 3; ++i)
      c.require(std::fabs(g[static_cast<std::size_t>(i)] - want[i]) <= gasket_tol,
                "gasket eigenvalue " + std::to_string(i) + " off by more than 1e-12");
  }
  const auto t = direct_spectrum(dirichlet_restrict(assemble_canonical({4, 1})));
  const double tetra_tol = 1e-9;
  c.require(t.size() == 6, "tetrahedron level-1 spectrum size != 6");
  if (t.size() == 6) {
    const double want[6] = {2.0, 6.0, 6.0, 6.0, 8.0, 8.0};
    for (int i = 0; i < 6; ++i)
      c.require(std::fabs(t[static_cast<std::size_t>(i)] - want[i]) <= tetra_tol,
                "tetrahedron eigenvalue " + std::to_string(i) + " off by more than 1e-9");
  }
}

// 4. Every direct eigenvalue at d=3, m in {2,3} sits within 1e-8 of the
// decimation set and inside (0, 2d].
void criterion_containment(Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int m : {2, 3}) {
    const auto direct = direct_spectrum(dirichlet_restrict(assemble_canonical({3, m})));
    const auto dec = decimation_spectrum(3, m);
    const auto rep = check_containment(direct, dec, 1e-8);
    c.require(rep.contained, "containment failed at m=" + std::to_string(m) +
                                 " (max distance " + std::to_string(rep.max_distance) + ")");
    for (double v : direct) {
      c.require(v > 0.0, "non-positive eigenvalue at m=" + std::to_string(m));
      c.require(v <= 6.0 + 1e-9, "eigenvalue above 2d at m=" + std::to_string(m));
    }
  }
  const double ms = ms_since(t0);
  c.require(ms < 30000.0, "runtime " + std::to_string(ms) + " ms >= 30 s");
}

// 5. Explicit spike runs at d=3, m=3: stable at 0.5 and 1.0 x h_max
// (non-increasing scaled l2 norm, 1e-12 relative slack), divergent past 1e6 x
// initial norm at 4 x h_max, within 1e4 steps.
void criterion_cfl_boundary(Criterion& c) {
  const auto rows = cfl_demo(3, 3, {0.5, 1.0, 4.0}, 10000);
  c.require(rows.size() == 3, "expected three factors");
  if (rows.size() != 3) return;
  c.require(rows[0].classification == CflClass::stable, "factor 0.5 not stable");
  c.require(rows[1].classification == CflClass::stable, "factor 1.0 not stable");
  c.require(rows[2].classification == CflClass::divergent, "factor 4.0 not divergent");
  c.require(rows[2].divergence_step >= 1 && rows[2].divergence_step <= 10000,
            "divergence step outside 1..10000");
}

// 6. Implicit scheme: sup norm non-increasing at every step for d in {3,4},
// m in {1..4}, h in {1e-3, 1e-1, 1}; CG reaches 1e-10 relative residual in at
// most 10 x dimension iterations. Slack 1e-8 covers the CG tolerance.
void criterion_implicit_stability(Criterion& c) {
  for (int d : {3, 4})
    for (int m = 1; m <= 4; ++m)
      for (double h : {1e-3, 1e-1, 1.0}) {
        const SimplexSpec spec{d, m};
        const auto R = dirichlet_restrict(assemble_canonical(spec));
        SchemeConfig cfg;
        cfg.kind = SchemeKind::implicit_euler;
        cfg.steps = 50;
        cfg.T = h * static_cast<double>(cfg.steps);
        const std::string where = "d=" + std::to_string(d) + " m=" + std::to_string(m) +
                                  " h=" + std::to_string(h);
        TrajectoryRecord rec;
        try {
          rec = simulate(R, cfg, spike_initial(spec, 1), {}, 1);
        } catch (const std::exception& e) {
          c.require(false, where + ": " + e.what());
          continue;
        }
        c.require(rec.cg_iterations_max <= 10 * R.n, where + ": CG iteration cap exceeded");
        c.require(rec.cg_rel_residual_max <= 1e-10, where + ": CG residual above 1e-10");
        auto sup = [](const std::vector<double>& v) {
          double s = 0.0;
          for (double x : v) s = std::max(s, std::fabs(x));
          return s;
        };
        double prev = sup(rec.snapshots.front().values);
        for (std::size_t s = 1; s < rec.snapshots.size(); ++s) {
          const double cur = sup(rec.snapshots[s].values);
          c.require(cur <= prev * (1.0 + 1e-8), where + ": sup norm grew at step " +
                                                    std::to_string(rec.snapshots[s].step));
          prev = cur;
        }
      }
}

// 7. Richardson check at d=3, m=3, T = 10 x h_max: halving h halves the
// successive-run difference within 2 +- 25%, for both schemes.
void criterion_convergence_in_h(Criterion& c) {
  const SimplexSpec spec{3, 3};
  const auto R = dirichlet_restrict(assemble_canonical(spec));
  const double T = 10.0 * cfl_max_step(3, 3);
  const auto init = spike_initial(spec, 1);
  for (SchemeKind kind : {SchemeKind::explicit_euler, SchemeKind::implicit_euler}) {
    std::array<StateVector, 3> finals;
    int slot = 0;
    for (index_t steps : {160, 320, 640}) {
      SchemeConfig cfg;
      cfg.kind = kind;
      cfg.T = T;
      cfg.steps = steps;
      finals[static_cast<std::size_t>(slot++)] =
          simulate(R, cfg, init, {}, steps).final_state;
    }
    auto diff_norm = [&](const StateVector& a, const StateVector& b) {
      StateVector diff = a;
      for (std::size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= b.values[i];
      return norm_2_scaled(diff);
    };
    const double e1 = diff_norm(finals[0], finals[1]);
    const double e2 = diff_norm(finals[1], finals[2]);
    const char* name = kind == SchemeKind::explicit_euler ? "explicit" : "implicit";
    c.require(e2 > 0.0, std::string(name) + ": zero fine-grid difference");
    if (e2 > 0.0) {
      const double ratio = e1 / e2;
      c.require(ratio >= 1.5 && ratio <= 2.5,
                std::string(name) + ": error ratio " + std::to_string(ratio) +
                    " outside [1.5, 2.5]");
    }
  }
}

// 8. Refinement differences strictly decrease across level pairs (2,3), (3,4),
// (4,5) for the transported spike problem, T = 0.05.
void criterion_refinement(Criterion& c) {
  const auto reps = refinement_study(3, 2, 5, 0.05, SchemeKind::explicit_euler);
  c.require(reps.size() == 3, "expected three level pairs");
  if (reps.size() != 3) return;
  for (const auto& r : reps)
    c.require(r.error > 0.0, "zero difference at pair (" + std::to_string(r.m_coarse) + "," +
                                 std::to_string(r.m_fine) + ")");
  c.require(reps[1].error < reps[0].error, "error did not decrease from (2,3) to (3,4)");
  c.require(reps[2].error < reps[1].error, "error did not decrease from (3,4) to (4,5)");
}

// 9. Full-scale decay run: gasket, m=6, explicit, T=1, N=2e5, spike at
// canonical vertex 1, probe there; fitted log-log slope negative with
// magnitude in [1.2, 1.8] and r^2 >= 0.98 on the default window.
void criterion_power_law(Criterion& c) {
  const SimplexSpec spec{3, 6};
  SchemeConfig cfg;
  cfg.kind = SchemeKind::explicit_euler;
  cfg.T = 1.0;
  cfg.steps = 200000;
  const auto rec = simulate(spec, cfg, spike_initial(spec, 1), {1}, cfg.steps);
  std::vector<double> t, u;
  probe_series(rec, 0, t, u);
  const FitResult fit = power_law_fit(t, u, default_fit_window(3, 6, cfg.T, cfg.h()));
  c.require(fit.slope < 0.0, "slope not negative");
  c.require(-fit.slope >= 1.2 && -fit.slope <= 1.8,
            "slope magnitude " + std::to_string(-fit.slope) + " outside [1.2, 1.8]");
  c.require(fit.r_squared >= 0.98,
            "r^2 " + std::to_string(fit.r_squared) + " below 0.98");
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    files[fs::relative(entry.path(), root).generic_string()] = buf.str();
  }
  return files;
}

// 10. Two identical CLI invocations produce byte-identical output trees.
void criterion_determinism(Criterion& c, const fs::path& cli) {
  c.require(fs::exists(cli), "CLI binary not found at " + cli.string());
  if (!fs::exists(cli)) return;
  const fs::path out = fs::temp_directory_path() / "fractal_heat_acceptance_determinism";
  const std::string cmd = "\"" + cli.string() +
                          "\" simulate --d 3 --m 2 --scheme implicit --T 0.001 --steps 40"
                          " --probe 1,2 --sample-every 10 --out \"" +
                          out.string() + "\" >/dev/null 2>&1";
  fs::remove_all(out);
  c.require(std::system(cmd.c_str()) == 0, "first invocation failed");
  const auto first = read_tree(out);
  c.require(first.size() >= 5, "first invocation wrote fewer files than expected");
  fs::remove_all(out);
  c.require(std::system(cmd.c_str()) == 0, "second invocation failed");
  const auto second = read_tree(out);
  fs::remove_all(out);
  c.require(first == second, "outputs differ between identical invocations");
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path cli = argc > 1 ? fs::path(argv[1])
                                : fs::path(argv[0]).parent_path() / "fractal_heat";
  struct Entry {
    const char* title;
    void (*fn)(Criterion&);
  };
  const Entry entries[] = {
      {"vertex counting closed form vs recursion", criterion_counts},
      {"assembly matches the geometric oracle", criterion_assembly},
      {"level-1 spectra", criterion_level1_spectra},
      {"spectral decimation containment", criterion_containment},
      {"CFL stability boundary", criterion_cfl_boundary},
      {"implicit unconditional stability", criterion_implicit_stability},
      {"first-order convergence in h", criterion_convergence_in_h},
      {"refinement consistency across levels", criterion_refinement},
      {"temperature decay power law", criterion_power_law},
  };
  int failures = 0;
  int number = 0;
  auto report = [&](const char* title, const Criterion& c) {
    ++number;
    if (c.ok) {
      std::cout << "[PASS] criterion " << number << ": " << title << "\n";
    } else {
      ++failures;
      std::cout << "[FAIL] criterion " << number << ": " << title << " -- " << c.detail << "\n";
    }
  };
  for (const auto& entry : entries) {
    Criterion c;
    try {
      entry.fn(c);
    } catch (const std::exception& e) {
      c.require(false, std::string("unexpected exception: ") + e.what());
    }
    report(entry.title, c);
  }
  {
    Criterion c;
    try {
      criterion_determinism(c, cli);
    } catch (const std::exception& e) {
      c.require(false, std::string("unexpected exception: ") + e.what());
    }
    report("CLI determinism", c);
  }
  if (failures == 0) {
    std::cout << "all 10 criteria passed\n";
  } else {
    std::cout << failures << " of 10 criteria failed\n";
  }
  return failures == 0 ? 0 : 1;
}
