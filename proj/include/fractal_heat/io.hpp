#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "experiments.hpp"

// File formats. Everything is produced as a string with LF endings and floats
// printed as %.17g (round-trip exact), then written in binary mode, so
// identical inputs yield byte-identical files.

namespace fractal_heat {

inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw io_error("cannot open for writing: " + path.string());
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  f.flush();
  if (!f) throw io_error("write failed: " + path.string());
}

inline void ensure_directory(const std::filesystem::path& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw io_error("cannot create directory " + path.string() + ": " + ec.message());
}

// Matrix Market coordinate form, integer symmetric: lower triangle (row >=
// col), 1-based, row-major.
inline std::string mtx_string(const SparseLaplacian& L) {
  std::string out = "%%MatrixMarket matrix coordinate integer symmetric\n";
  index_t nnz_lower = 0;
  for (index_t i = 0; i < L.n; ++i)
    for (index_t k = L.row_ptr[static_cast<std::size_t>(i)];
         k < L.row_ptr[static_cast<std::size_t>(i) + 1]; ++k)
      if (L.col_idx[static_cast<std::size_t>(k)] <= i) ++nnz_lower;
  out += std::to_string(L.n) + " " + std::to_string(L.n) + " " + std::to_string(nnz_lower) + "\n";
  for (index_t i = 0; i < L.n; ++i)
    for (index_t k = L.row_ptr[static_cast<std::size_t>(i)];
         k < L.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
      const index_t j = L.col_idx[static_cast<std::size_t>(k)];
      if (j > i) continue;
      out += std::to_string(i + 1) + " " + std::to_string(j + 1) + " " +
             std::to_string(L.values[static_cast<std::size_t>(k)]) + "\n";
    }
  return out;
}

// id,x,y,z,boundary over canonical 1-based ids (z = 0 for the gasket).
inline std::string vertices_csv(const VertexSet& canonical) {
  const std::size_t n = canonical.coords.size();
  const std::size_t n_int = n - static_cast<std::size_t>(canonical.d);
  std::string out = "id,x,y,z,boundary\n";
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = canonical.coords[i];
    out += std::to_string(i + 1) + "," + fmt17(p[0]) + "," + fmt17(p[1]) + "," + fmt17(p[2]) +
           "," + (i >= n_int ? "1" : "0") + "\n";
  }
  return out;
}

// step,time,vertex_<id>,... — one row per step 0..N.
inline std::string probes_csv(const TrajectoryRecord& rec) {
  std::string out = "step,time";
  for (index_t id : rec.probe_ids) out += ",vertex_" + std::to_string(id);
  out += "\n";
  const std::size_t np = rec.probe_ids.size();
  const std::size_t rows = static_cast<std::size_t>(rec.config.steps) + 1;
  const double h = rec.config.h();
  for (std::size_t k = 0; k < rows; ++k) {
    out += std::to_string(k) + "," + fmt17(static_cast<double>(k) * h);
    for (std::size_t p = 0; p < np; ++p) out += "," + fmt17(rec.probe_values[k * np + p]);
    out += "\n";
  }
  return out;
}

// step,time,index,value over all canonical ids; the trailing d boundary
// entries are identically 0 under the Dirichlet condition.
inline std::string snapshot_csv(const Snapshot& snap, index_t n_total) {
  std::string out = "step,time,index,value\n";
  const std::string prefix = std::to_string(snap.step) + "," + fmt17(snap.t) + ",";
  for (index_t i = 0; i < n_total; ++i)
    out += prefix + std::to_string(i + 1) + "," +
           (i < static_cast<index_t>(snap.values.size())
                ? fmt17(snap.values[static_cast<std::size_t>(i)])
                : "0") +
           "\n";
  return out;
}

// level,value,multiplicity — multiplicity is blank for decimation-generated
// values (values-only set).
inline std::string spectrum_csv(int level, const std::vector<std::pair<double, index_t>>& direct_groups,
                                const std::vector<double>& decimated, bool include_direct,
                                bool include_decimation) {
  std::string out = "level,value,multiplicity\n";
  if (include_direct)
    for (const auto& g : direct_groups)
      out += std::to_string(level) + "," + fmt17(g.first) + "," + std::to_string(g.second) + "\n";
  if (include_decimation)
    for (double v : decimated) out += std::to_string(level) + "," + fmt17(v) + ",\n";
  return out;
}

inline std::string containment_report_csv(int level, const ContainmentReport& rep) {
  std::string out = "level,contained,max_distance,n_direct,n_decimation\n";
  out += std::to_string(level) + "," + (rep.contained ? "1" : "0") + "," +
         fmt17(rep.max_distance) + "," + std::to_string(rep.n_direct) + "," +
         std::to_string(rep.n_decimation) + "\n";
  return out;
}

inline std::string simulate_report_csv(const TrajectoryRecord& rec) {
  std::string out =
      "d,m,scheme,T,steps,h,norm_2_inf,cfl_checked,cfl_satisfied,cfl_h_max,cg_iterations_max,"
      "cg_rel_residual_max\n";
  out += std::to_string(rec.spec.d) + "," + std::to_string(rec.spec.m) + "," +
         (rec.config.kind == SchemeKind::explicit_euler ? "explicit" : "implicit") + "," +
         fmt17(rec.config.T) + "," + std::to_string(rec.config.steps) + "," +
         fmt17(rec.config.h()) + "," + fmt17(rec.norm_2_inf) + "," +
         (rec.cfl_checked ? "1" : "0") + "," +
         (rec.cfl_checked ? (rec.cfl.satisfied ? "1" : "0") : "") + "," +
         (rec.cfl_checked ? fmt17(rec.cfl.h_max) : "") + "," +
         std::to_string(rec.cg_iterations_max) + "," + fmt17(rec.cg_rel_residual_max) + "\n";
  return out;
}

inline std::string fit_report_csv(const FitResult& fit) {
  std::string out = "slope,intercept,r_squared,t_min,t_max,sample_count\n";
  out += fmt17(fit.slope) + "," + fmt17(fit.intercept) + "," + fmt17(fit.r_squared) + "," +
         fmt17(fit.t_min) + "," + fmt17(fit.t_max) + "," + std::to_string(fit.sample_count) + "\n";
  return out;
}

inline std::string converge_report_csv(const std::vector<RefinementReport>& reports) {
  std::string out = "m_coarse,m_fine,init_vertex,h_coarse,h_fine,steps_coarse,steps_fine,error\n";
  for (const auto& r : reports)
    out += std::to_string(r.m_coarse) + "," + std::to_string(r.m_fine) + "," +
           std::to_string(r.init_vertex_coarse) + "," + fmt17(r.h_coarse) + "," +
           fmt17(r.h_fine) + "," + std::to_string(r.steps_coarse) + "," +
           std::to_string(r.steps_fine) + "," + fmt17(r.error) + "\n";
  return out;
}

inline std::string cfl_report_csv(const std::vector<CflDemoRow>& rows) {
  std::string out =
      "factor,h,classification,divergence_step,steps_run,initial_norm,final_norm\n";
  for (const auto& r : rows)
    out += fmt17(r.factor) + "," + fmt17(r.h) + "," + cfl_class_name(r.classification) + "," +
           std::to_string(r.divergence_step) + "," + std::to_string(r.steps_run) + "," +
           fmt17(r.initial_norm) + "," + fmt17(r.final_norm) + "\n";
  return out;
}

// Flat key = value configuration text. Blank lines and lines starting with
// '#' are ignored; keys may appear once.
inline std::vector<std::pair<std::string, std::string>> parse_config(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  auto trim = [](std::string s) {
    const char* ws = " \t\r";
    const auto a = s.find_first_not_of(ws);
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(ws);
    return s.substr(a, b - a + 1);
  };
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string line =
        trim(text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos));
    ++line_no;
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw argument_error("config line " + std::to_string(line_no) + " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw argument_error("config line " + std::to_string(line_no) + " has an empty key");
    for (const auto& kv : out)
      if (kv.first == key)
        throw argument_error("config key '" + key + "' appears more than once");
    out.emplace_back(key, value);
  }
  return out;
}

inline std::string serialize_config(const std::vector<std::pair<std::string, std::string>>& kv) {
  std::string out;
  for (const auto& p : kv) out += p.first + " = " + p.second + "\n";
  return out;
}

}  // namespace fractal_heat
