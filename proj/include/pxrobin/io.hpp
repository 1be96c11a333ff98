#pragma once
/// @brief Flat-file export: solution and trace CSV, canonical JSON.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pxrobin/critical_point.hpp"
#include "pxrobin/error.hpp"
#include "pxrobin/fem.hpp"

namespace pxrobin {

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

inline void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

/// Header `x,y,u`, one row per vertex, 17 significant digits.
inline void write_solution_csv(const DiscreteFunction& u, std::ostream& os) {
  os << "x,y,u\n";
  const auto& V = u.mesh->vertices();
  for (std::size_t i = 0; i < V.size(); ++i)
    os << format_g17(V[i].x) << ',' << format_g17(V[i].y) << ',' << format_g17(u.values[static_cast<Eigen::Index>(i)])
       << '\n';
}

inline void export_solution_csv(const DiscreteFunction& u, const std::filesystem::path& path) {
  auto out = open_output(path);
  write_solution_csv(u, out);
  finish(out, path);
}

/// Reads the `u` column of a solution CSV back onto a mesh, checking that the
/// coordinates match the mesh vertices exactly.
inline DiscreteFunction import_solution_csv(std::shared_ptr<const Mesh> mesh, std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "x,y,u") throw IoError("solution CSV: missing header 'x,y,u'");
  NodalVector v(static_cast<Eigen::Index>(mesh->num_vertices()));
  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (row >= mesh->num_vertices()) throw IoError("solution CSV: more rows than vertices");
    double x, y, u;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &x, &y, &u) != 3) throw IoError("solution CSV: bad row " + line);
    const Point2& P = mesh->vertices()[row];
    if (x != P.x || y != P.y) throw IoError("solution CSV: coordinates do not match the mesh at row " + std::to_string(row));
    v[static_cast<Eigen::Index>(row++)] = u;
  }
  if (row != mesh->num_vertices()) throw IoError("solution CSV: fewer rows than vertices");
  return {std::move(mesh), std::move(v)};
}

/// Header `iter,J,residual,beta_norm`.
inline void write_trace_csv(const std::vector<TraceEntry>& trace, std::ostream& os) {
  os << "iter,J,residual,beta_norm\n";
  for (std::size_t i = 0; i < trace.size(); ++i)
    os << i << ',' << format_g17(trace[i].J) << ',' << format_g17(trace[i].residual) << ','
       << format_g17(trace[i].beta_norm) << '\n';
}

inline void export_trace_csv(const std::vector<TraceEntry>& trace, const std::filesystem::path& path) {
  auto out = open_output(path);
  write_trace_csv(trace, out);
  finish(out, path);
}

inline void export_mesh_csv(const Mesh& mesh, const std::filesystem::path& path) {
  auto out = open_output(path);
  write_mesh_csv(mesh, out);
  finish(out, path);
}

/// Canonical JSON text: keys sorted (nlohmann objects are ordered maps),
/// floats in shortest round-trip form, two-space indent, trailing newline.
inline std::string canonical_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline void export_report_json(const nlohmann::json& report, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << canonical_json(report);
  finish(out, path);
}

}  // namespace pxrobin
