// Command-line front end: laplacian | spectrum | simulate | fit | converge | cfl.
// Flags mirror flat `key = value` config files (flags win); every run writes
// its resolved configuration next to its outputs.

#include <CLI11.hpp>

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <fractal_heat/fractal_heat.hpp>

namespace fh = fractal_heat;
namespace fs = std::filesystem;

using KvList = std::vector<std::pair<std::string, std::string>>;

namespace {

std::int64_t to_int(const std::string& key, const std::string& s) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0' || errno != 0)
    throw fh::argument_error("invalid integer for '" + key + "': '" + s + "'");
  return v;
}

double to_double(const std::string& key, const std::string& s) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || errno != 0 || !std::isfinite(v))
    throw fh::argument_error("invalid number for '" + key + "': '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

std::vector<std::int64_t> to_int_list(const std::string& key, const std::string& s) {
  std::vector<std::int64_t> out;
  for (const auto& p : split(s, ',')) out.push_back(to_int(key, p));
  return out;
}

std::vector<double> to_double_list(const std::string& key, const std::string& s) {
  std::vector<double> out;
  for (const auto& p : split(s, ',')) out.push_back(to_double(key, p));
  return out;
}

std::pair<std::int64_t, std::int64_t> to_range(const std::string& key, const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() != 2) throw fh::argument_error("'" + key + "' expects the form a:b, got '" + s + "'");
  return {to_int(key, parts[0]), to_int(key, parts[1])};
}

std::pair<double, double> to_window(const std::string& key, const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() != 2)
    throw fh::argument_error("'" + key + "' expects the form tmin:tmax, got '" + s + "'");
  return {to_double(key, parts[0]), to_double(key, parts[1])};
}

fh::SchemeKind parse_scheme(const std::string& s) {
  if (s == "explicit") return fh::SchemeKind::explicit_euler;
  if (s == "implicit") return fh::SchemeKind::implicit_euler;
  throw fh::argument_error("unknown scheme '" + s + "'; expected explicit|implicit");
}

const char* scheme_name(fh::SchemeKind k) {
  return k == fh::SchemeKind::explicit_euler ? "explicit" : "implicit";
}

fh::CflPolicy parse_policy(const std::string& s) {
  if (s == "enforce") return fh::CflPolicy::enforce;
  if (s == "warn") return fh::CflPolicy::warn;
  if (s == "ignore") return fh::CflPolicy::ignore;
  throw fh::argument_error("unknown cfl policy '" + s + "'; expected enforce|warn|ignore");
}

const char* policy_name(fh::CflPolicy p) {
  switch (p) {
    case fh::CflPolicy::enforce:
      return "enforce";
    case fh::CflPolicy::warn:
      return "warn";
    default:
      return "ignore";
  }
}

enum class SpectrumMode { direct, decimation, both };

SpectrumMode parse_mode(const std::string& s) {
  if (s == "direct") return SpectrumMode::direct;
  if (s == "decimation") return SpectrumMode::decimation;
  if (s == "both") return SpectrumMode::both;
  throw fh::argument_error("unknown mode '" + s + "'; expected direct|decimation|both");
}

const char* mode_name(SpectrumMode m) {
  switch (m) {
    case SpectrumMode::direct:
      return "direct";
    case SpectrumMode::decimation:
      return "decimation";
    default:
      return "both";
  }
}

template <typename T>
std::string join_list(const std::vector<T>& xs, std::string (*fmt)(const T&)) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += fmt(xs[i]);
  }
  return out;
}

std::string fmt_int(const std::int64_t& v) { return std::to_string(v); }
std::string fmt_dbl(const double& v) { return fh::fmt17(v); }

// Resolution order per parameter: command-line flag, then config file, then
// the subcommand default. Config keys match flag names without the dashes.
class ParamResolver {
 public:
  explicit ParamResolver(const std::string& config_path) {
    if (config_path.empty()) return;
    std::ifstream f(config_path, std::ios::binary);
    if (!f) throw fh::io_error("cannot read config file: " + config_path);
    std::stringstream ss;
    ss << f.rdbuf();
    for (auto& kv : fh::parse_config(ss.str()))
      file_.emplace(std::move(kv.first), std::move(kv.second));
  }

  template <typename T, typename ParseFn>
  T get(const CLI::Option* opt, const T& flag_value, const std::string& key, ParseFn&& parse,
        const std::optional<T>& fallback) {
    touched_.insert(key);
    if (opt != nullptr && opt->count() > 0) return flag_value;
    const auto it = file_.find(key);
    if (it != file_.end()) return parse(key, it->second);
    if (fallback.has_value()) return *fallback;
    throw fh::argument_error("missing required parameter --" + key);
  }

  bool provided(const CLI::Option* opt, const std::string& key) const {
    return (opt != nullptr && opt->count() > 0) || file_.count(key) > 0;
  }

  void reject_unknown() const {
    for (const auto& kv : file_)
      if (!touched_.count(kv.first))
        throw fh::argument_error("config key '" + kv.first +
                                 "' is not used by this subcommand");
  }

 private:
  std::map<std::string, std::string> file_;
  std::set<std::string> touched_;
};

void write_outputs(const fs::path& out, const std::vector<std::pair<std::string, std::string>>& files) {
  fh::ensure_directory(out);
  for (const auto& f : files) {
    const fs::path p = out / f.first;
    if (p.has_parent_path()) fh::ensure_directory(p.parent_path());
    fh::write_text_file(p, f.second);
  }
}

struct CliOpts {
  std::string config_path;
  std::int64_t d = 3;
  std::int64_t m = 0;
  std::string scheme = "explicit";
  double T = 1.0;
  std::int64_t steps = 0;
  std::int64_t init_vertex = 1;
  std::vector<std::int64_t> probes;
  std::int64_t sample_every = 0;
  std::string cfl_policy = "enforce";
  std::string mode = "both";
  std::vector<double> factors;
  std::string m_range;
  std::string window;
  std::string out = "out";

  CLI::Option* o_d = nullptr;
  CLI::Option* o_m = nullptr;
  CLI::Option* o_scheme = nullptr;
  CLI::Option* o_T = nullptr;
  CLI::Option* o_steps = nullptr;
  CLI::Option* o_init = nullptr;
  CLI::Option* o_probe = nullptr;
  CLI::Option* o_sample = nullptr;
  CLI::Option* o_policy = nullptr;
  CLI::Option* o_mode = nullptr;
  CLI::Option* o_factors = nullptr;
  CLI::Option* o_mrange = nullptr;
  CLI::Option* o_window = nullptr;
  CLI::Option* o_out = nullptr;
};

void add_common(CLI::App* sub, CliOpts& o, bool with_m) {
  o.o_d = sub->add_option("--d", o.d, "family: 3 (gasket) or 4 (tetrahedron)");
  if (with_m) o.o_m = sub->add_option("--m", o.m, "recursion depth");
  o.o_out = sub->add_option("--out", o.out, "output directory");
  sub->add_option("--config", o.config_path, "flat key = value config file (flags override)");
}

int run_laplacian(CliOpts& o) {
  ParamResolver r(o.config_path);
  const int d = static_cast<int>(r.get<std::int64_t>(o.o_d, o.d, "d", to_int, std::int64_t{3}));
  const int m = static_cast<int>(r.get<std::int64_t>(o.o_m, o.m, "m", to_int, std::nullopt));
  const std::string out = r.get<std::string>(
      o.o_out, o.out, "out", [](const std::string&, const std::string& s) { return s; },
      std::string("out"));
  r.reject_unknown();

  const fh::SimplexSpec spec{d, m};
  const fh::SparseLaplacian L = fh::assemble_canonical(spec);
  const fh::SparseLaplacian R = fh::dirichlet_restrict(L);
  const fh::VertexSet V = fh::canonical_coordinates(spec);
  if (R.n == 0) std::cerr << "warning: restricted matrix is empty (0x0); all level-" << m
                          << " vertices are boundary corners\n";

  const KvList cfg = {{"command", "laplacian"},
                      {"d", std::to_string(d)},
                      {"m", std::to_string(m)},
                      {"out", out}};
  write_outputs(out, {{"config.txt", fh::serialize_config(cfg)},
                      {"matrix_full.mtx", fh::mtx_string(L)},
                      {"matrix_restricted.mtx", fh::mtx_string(R)},
                      {"vertices.csv", fh::vertices_csv(V)}});
  std::cout << "laplacian d=" << d << " m=" << m << ": n=" << L.n << " interior=" << R.n
            << " -> " << out << "\n";
  return 0;
}

int run_spectrum(CliOpts& o) {
  ParamResolver r(o.config_path);
  const int d = static_cast<int>(r.get<std::int64_t>(o.o_d, o.d, "d", to_int, std::int64_t{3}));
  const int m = static_cast<int>(r.get<std::int64_t>(o.o_m, o.m, "m", to_int, std::nullopt));
  const SpectrumMode mode = parse_mode(r.get<std::string>(
      o.o_mode, o.mode, "mode", [](const std::string&, const std::string& s) { return s; },
      std::string("both")));
  const std::string out = r.get<std::string>(
      o.o_out, o.out, "out", [](const std::string&, const std::string& s) { return s; },
      std::string("out"));
  r.reject_unknown();

  fh::validate_family(d);
  if (m < 1) throw fh::argument_error("spectrum requires m >= 1");
  const fh::index_t n_int = fh::vertex_count(d, m) - d;
  if (mode != SpectrumMode::decimation && n_int > 2000)
    throw fh::argument_error("level m=" + std::to_string(m) + " has " + std::to_string(n_int) +
                             " interior vertices, above the dense eigensolve cap of 2000; use "
                             "--mode decimation");

  std::vector<std::pair<double, fh::index_t>> groups;
  std::vector<double> direct;
  if (mode != SpectrumMode::decimation) {
    direct = fh::direct_spectrum(fh::dirichlet_restrict(fh::assemble_canonical({d, m})));
    groups = fh::group_eigenvalues(direct);
  }
  std::vector<double> decimated;
  if (mode != SpectrumMode::direct) decimated = fh::decimation_spectrum(d, m);

  const KvList cfg = {{"command", "spectrum"},
                      {"d", std::to_string(d)},
                      {"m", std::to_string(m)},
                      {"mode", mode_name(mode)},
                      {"out", out}};
  std::vector<std::pair<std::string, std::string>> files = {
      {"config.txt", fh::serialize_config(cfg)},
      {"spectrum.csv", fh::spectrum_csv(m, groups, decimated, mode != SpectrumMode::decimation,
                                        mode != SpectrumMode::direct)}};
  bool contained = true;
  if (mode == SpectrumMode::both) {
    const fh::ContainmentReport rep = fh::check_containment(direct, decimated, 1e-8);
    contained = rep.contained;
    files.emplace_back("report.csv", fh::containment_report_csv(m, rep));
  }
  write_outputs(out, files);
  std::cout << "spectrum d=" << d << " m=" << m << " mode=" << mode_name(mode);
  if (mode == SpectrumMode::both) std::cout << " containment=" << (contained ? "pass" : "FAIL");
  std::cout << " -> " << out << "\n";
  if (!contained)
    throw fh::numerical_error("decimation containment check failed at d=" + std::to_string(d) +
                              " m=" + std::to_string(m));
  return 0;
}

struct SimResolved {
  int d = 3;
  int m = 0;
  fh::SchemeConfig scheme;
  std::int64_t init_vertex = 1;
  std::vector<fh::index_t> probes;
  std::int64_t sample_every = 1;
  std::string out;
};

SimResolved resolve_simulation(CliOpts& o, ParamResolver& r) {
  SimResolved s;
  s.d = static_cast<int>(r.get<std::int64_t>(o.o_d, o.d, "d", to_int, std::int64_t{3}));
  fh::validate_family(s.d);
  // defaults reproduce the full-scale runs: gasket m=6 N=2e5, tetrahedron m=5 N=1e5
  s.m = static_cast<int>(
      r.get<std::int64_t>(o.o_m, o.m, "m", to_int, std::int64_t{s.d == 3 ? 6 : 5}));
  s.scheme.kind = parse_scheme(r.get<std::string>(
      o.o_scheme, o.scheme, "scheme", [](const std::string&, const std::string& v) { return v; },
      std::string("explicit")));
  s.scheme.T = r.get<double>(o.o_T, o.T, "T", to_double, 1.0);
  s.scheme.steps = r.get<std::int64_t>(o.o_steps, o.steps, "steps", to_int,
                                       std::int64_t{s.d == 3 ? 200000 : 100000});
  s.scheme.cfl_policy = parse_policy(r.get<std::string>(
      o.o_policy, o.cfl_policy, "cfl-policy",
      [](const std::string&, const std::string& v) { return v; }, std::string("enforce")));
  s.init_vertex = r.get<std::int64_t>(o.o_init, o.init_vertex, "init-vertex", to_int,
                                      std::int64_t{1});
  const std::vector<std::int64_t> probes =
      r.get<std::vector<std::int64_t>>(o.o_probe, o.probes, "probe", to_int_list,
                                       std::vector<std::int64_t>{s.init_vertex});
  s.probes.assign(probes.begin(), probes.end());
  s.sample_every = r.get<std::int64_t>(o.o_sample, o.sample_every, "sample-every", to_int,
                                       std::int64_t{std::max<std::int64_t>(s.scheme.steps, 1)});
  s.out = r.get<std::string>(
      o.o_out, o.out, "out", [](const std::string&, const std::string& v) { return v; },
      std::string("out"));
  return s;
}

KvList simulation_config_kv(const char* command, const SimResolved& s) {
  return {{"command", command},
          {"d", std::to_string(s.d)},
          {"m", std::to_string(s.m)},
          {"scheme", scheme_name(s.scheme.kind)},
          {"T", fh::fmt17(s.scheme.T)},
          {"steps", std::to_string(s.scheme.steps)},
          {"init-vertex", std::to_string(s.init_vertex)},
          {"probe", join_list(std::vector<std::int64_t>(s.probes.begin(), s.probes.end()), fmt_int)},
          {"sample-every", std::to_string(s.sample_every)},
          {"cfl-policy", policy_name(s.scheme.cfl_policy)},
          {"out", s.out}};
}

fh::TrajectoryRecord run_trajectory(const SimResolved& s) {
  const fh::SimplexSpec spec{s.d, s.m};
  const fh::SparseLaplacian R = fh::dirichlet_restrict(fh::assemble_canonical(spec));
  const fh::StateVector init = fh::spike_initial(spec, s.init_vertex);
  const fh::TrajectoryRecord rec = fh::simulate(R, s.scheme, init, s.probes, s.sample_every);
  if (rec.cfl_warned)
    std::cerr << "warning: explicit step h=" << fh::fmt17(s.scheme.h())
              << " violates the CFL bound h_max=" << fh::fmt17(rec.cfl.h_max) << "\n";
  return rec;
}

void write_trajectory(const SimResolved& s, const fh::TrajectoryRecord& rec, const KvList& cfg,
                      std::vector<std::pair<std::string, std::string>> extra_files) {
  const fh::index_t n_total = fh::vertex_count(s.d, s.m);
  std::vector<std::pair<std::string, std::string>> files = {
      {"config.txt", fh::serialize_config(cfg)},
      {"vertices.csv", fh::vertices_csv(fh::canonical_coordinates({s.d, s.m}))},
      {"probes.csv", fh::probes_csv(rec)}};
  for (const auto& snap : rec.snapshots)
    files.emplace_back("snapshots/step_" + std::to_string(snap.step) + ".csv",
                       fh::snapshot_csv(snap, n_total));
  for (auto& f : extra_files) files.emplace_back(std::move(f));
  write_outputs(s.out, files);
}

int run_simulate(CliOpts& o) {
  ParamResolver r(o.config_path);
  const SimResolved s = resolve_simulation(o, r);
  r.reject_unknown();
  const fh::TrajectoryRecord rec = run_trajectory(s);
  write_trajectory(s, rec, simulation_config_kv("simulate", s),
                   {{"report.csv", fh::simulate_report_csv(rec)}});
  std::cout << "simulate d=" << s.d << " m=" << s.m << " scheme=" << scheme_name(s.scheme.kind)
            << " steps=" << s.scheme.steps << " norm_2_inf=" << fh::fmt17(rec.norm_2_inf)
            << " -> " << s.out << "\n";
  return 0;
}

int run_fit(CliOpts& o) {
  ParamResolver r(o.config_path);
  SimResolved s = resolve_simulation(o, r);
  const bool window_given = r.provided(o.o_window, "window");
  std::pair<double, double> win{0.0, 0.0};
  if (window_given)
    win = to_window("window", r.get<std::string>(
                                  o.o_window, o.window, "window",
                                  [](const std::string&, const std::string& v) { return v; },
                                  std::string()));
  r.reject_unknown();

  const fh::TrajectoryRecord rec = run_trajectory(s);
  fh::FitWindow window;
  if (window_given) {
    window.t_min = win.first;
    window.t_max = win.second;
  } else {
    window = fh::default_fit_window(s.d, s.m, s.scheme.T, s.scheme.h());
  }
  std::vector<double> t, u;
  fh::probe_series(rec, 0, t, u);
  const fh::FitResult fit = fh::power_law_fit(t, u, window);

  KvList cfg = simulation_config_kv("fit", s);
  cfg.emplace_back("window", fh::fmt17(window.t_min) + ":" + fh::fmt17(window.t_max));
  write_trajectory(s, rec, cfg, {{"report.csv", fh::fit_report_csv(fit)}});
  std::cout << "fit d=" << s.d << " m=" << s.m << " slope=" << fh::fmt17(fit.slope)
            << " intercept=" << fh::fmt17(fit.intercept) << " r2=" << fh::fmt17(fit.r_squared)
            << " window=[" << fh::fmt17(window.t_min) << ", " << fh::fmt17(window.t_max)
            << "] samples=" << fit.sample_count << " -> " << s.out << "\n";
  return 0;
}

int run_converge(CliOpts& o) {
  ParamResolver r(o.config_path);
  const int d = static_cast<int>(r.get<std::int64_t>(o.o_d, o.d, "d", to_int, std::int64_t{3}));
  const std::string range_text = r.get<std::string>(
      o.o_mrange, o.m_range, "m-range", [](const std::string&, const std::string& v) { return v; },
      std::string("2:4"));
  const auto range = to_range("m-range", range_text);
  const double T = r.get<double>(o.o_T, o.T, "T", to_double, 0.05);
  const fh::SchemeKind kind = parse_scheme(r.get<std::string>(
      o.o_scheme, o.scheme, "scheme", [](const std::string&, const std::string& v) { return v; },
      std::string("explicit")));
  const std::int64_t init =
      r.get<std::int64_t>(o.o_init, o.init_vertex, "init-vertex", to_int, std::int64_t{1});
  const std::string out = r.get<std::string>(
      o.o_out, o.out, "out", [](const std::string&, const std::string& v) { return v; },
      std::string("out"));
  r.reject_unknown();

  const auto reports = fh::refinement_study(d, static_cast<int>(range.first),
                                            static_cast<int>(range.second), T, kind, init);
  const KvList cfg = {{"command", "converge"},
                      {"d", std::to_string(d)},
                      {"m-range", std::to_string(range.first) + ":" + std::to_string(range.second)},
                      {"scheme", scheme_name(kind)},
                      {"T", fh::fmt17(T)},
                      {"init-vertex", std::to_string(init)},
                      {"out", out}};
  write_outputs(out, {{"config.txt", fh::serialize_config(cfg)},
                      {"report.csv", fh::converge_report_csv(reports)}});
  std::cout << "converge d=" << d << " m-range=" << range.first << ":" << range.second;
  for (const auto& rep : reports)
    std::cout << " (" << rep.m_coarse << "," << rep.m_fine << ")=" << fh::fmt17(rep.error);
  std::cout << " -> " << out << "\n";
  return 0;
}

int run_cfl(CliOpts& o) {
  ParamResolver r(o.config_path);
  const int d = static_cast<int>(r.get<std::int64_t>(o.o_d, o.d, "d", to_int, std::int64_t{3}));
  const int m = static_cast<int>(r.get<std::int64_t>(o.o_m, o.m, "m", to_int, std::int64_t{3}));
  const std::vector<double> factors =
      r.get<std::vector<double>>(o.o_factors, o.factors, "factors", to_double_list,
                                 std::vector<double>{0.5, 1.0, 4.0});
  const std::int64_t steps =
      r.get<std::int64_t>(o.o_steps, o.steps, "steps", to_int, std::int64_t{10000});
  const std::int64_t init =
      r.get<std::int64_t>(o.o_init, o.init_vertex, "init-vertex", to_int, std::int64_t{1});
  const std::string out = r.get<std::string>(
      o.o_out, o.out, "out", [](const std::string&, const std::string& v) { return v; },
      std::string("out"));
  r.reject_unknown();

  const auto rows = fh::cfl_demo(d, m, factors, steps, init);
  const KvList cfg = {{"command", "cfl"},
                      {"d", std::to_string(d)},
                      {"m", std::to_string(m)},
                      {"factors", join_list(factors, fmt_dbl)},
                      {"steps", std::to_string(steps)},
                      {"init-vertex", std::to_string(init)},
                      {"out", out}};
  write_outputs(out, {{"config.txt", fh::serialize_config(cfg)},
                      {"report.csv", fh::cfl_report_csv(rows)}});
  std::cout << "cfl d=" << d << " m=" << m;
  for (const auto& row : rows)
    std::cout << " " << fh::fmt17(row.factor) << "->" << fh::cfl_class_name(row.classification);
  std::cout << " -> " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heat equation on Sierpinski simplices: Laplacian assembly, Euler time stepping, "
               "spectral decimation, and reproduction experiments"};
  app.require_subcommand(1);

  CliOpts lap, spec, sim, fit, conv, cfl;

  CLI::App* c_lap = app.add_subcommand("laplacian", "Assemble and export the graph Laplacian");
  add_common(c_lap, lap, true);

  CLI::App* c_spec = app.add_subcommand("spectrum", "Direct and decimation-generated spectra");
  add_common(c_spec, spec, true);
  spec.o_mode = c_spec->add_option("--mode", spec.mode, "direct|decimation|both");

  CLI::App* c_sim = app.add_subcommand("simulate", "Run the heat scheme and export trajectories");
  add_common(c_sim, sim, true);
  sim.o_scheme = c_sim->add_option("--scheme", sim.scheme, "explicit|implicit");
  sim.o_T = c_sim->add_option("--T", sim.T, "time horizon");
  sim.o_steps = c_sim->add_option("--steps", sim.steps, "number of time steps N (h = T/N)");
  sim.o_init = c_sim->add_option("--init-vertex", sim.init_vertex, "interior vertex of the unit spike");
  sim.o_probe = c_sim->add_option("--probe", sim.probes, "probe vertex ids")->delimiter(',');
  sim.o_sample = c_sim->add_option("--sample-every", sim.sample_every, "snapshot cadence in steps");
  sim.o_policy = c_sim->add_option("--cfl-policy", sim.cfl_policy, "enforce|warn|ignore");

  CLI::App* c_fit = app.add_subcommand("fit", "Simulate and fit the probe decay power law");
  add_common(c_fit, fit, true);
  fit.o_scheme = c_fit->add_option("--scheme", fit.scheme, "explicit|implicit");
  fit.o_T = c_fit->add_option("--T", fit.T, "time horizon");
  fit.o_steps = c_fit->add_option("--steps", fit.steps, "number of time steps N (h = T/N)");
  fit.o_init = c_fit->add_option("--init-vertex", fit.init_vertex, "interior vertex of the unit spike");
  fit.o_probe = c_fit->add_option("--probe", fit.probes, "probe vertex ids (first is fitted)")->delimiter(',');
  fit.o_sample = c_fit->add_option("--sample-every", fit.sample_every, "snapshot cadence in steps");
  fit.o_policy = c_fit->add_option("--cfl-policy", fit.cfl_policy, "enforce|warn|ignore");
  fit.o_window = c_fit->add_option("--window", fit.window, "fit window tmin:tmax (default: auto)");

  CLI::App* c_conv = app.add_subcommand("converge", "Refinement consistency study across levels");
  add_common(c_conv, conv, false);
  conv.o_mrange = c_conv->add_option("--m-range", conv.m_range, "level range a:b, pairs (a,a+1)..(b-1,b)");
  conv.o_T = c_conv->add_option("--T", conv.T, "time horizon");
  conv.o_scheme = c_conv->add_option("--scheme", conv.scheme, "explicit|implicit");
  conv.o_init = c_conv->add_option("--init-vertex", conv.init_vertex,
                                   "spike vertex at the coarsest level");

  CLI::App* c_cfl = app.add_subcommand("cfl", "Stability demonstration around the CFL bound");
  add_common(c_cfl, cfl, true);
  cfl.o_factors = c_cfl->add_option("--factors", cfl.factors, "h/h_max ratios")->delimiter(',');
  cfl.o_steps = c_cfl->add_option("--steps", cfl.steps, "maximum steps per factor");
  cfl.o_init = c_cfl->add_option("--init-vertex", cfl.init_vertex, "spike vertex");

  try {
    app.parse(argc, argv);
    if (c_lap->parsed()) return run_laplacian(lap);
    if (c_spec->parsed()) return run_spectrum(spec);
    if (c_sim->parsed()) return run_simulate(sim);
    if (c_fit->parsed()) return run_fit(fit);
    if (c_conv->parsed()) return run_converge(conv);
    if (c_cfl->parsed()) return run_cfl(cfl);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const fh::argument_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fh::numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const fh::io_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  }
}
