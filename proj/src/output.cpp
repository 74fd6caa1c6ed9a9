#include "ensmhd/output.hpp"

#include "ensmhd/errors.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace ensmhd {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10e", value);
  return buf;
}

void write_vtk(std::ostream& out, const Mesh& mesh, const std::vector<NamedField>& vectors,
               const std::vector<NamedField>& scalars) {
  const int nv = mesh.vertex_count();
  const int nt = mesh.triangle_count();
  out << "# vtk DataFile Version 3.0\nens-mhd\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " double\n";
  for (int i = 0; i < nv; ++i) {
    const auto& p = mesh.vertex(i);
    out << format_number(p.x()) << ' ' << format_number(p.y()) << " 0\n";
  }
  out << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << nt << '\n';
  for (int k = 0; k < nt; ++k) out << "5\n";

  std::vector<NamedField> cell_scalars, point_scalars;
  for (const auto& s : scalars) {
    if (!s.field || s.field->space->family() == Family::velocity_p2)
      throw InvalidArgument("write_vtk: scalar output expects a pressure field");
    (s.field->space->family() == Family::pressure_p1_disc ? cell_scalars : point_scalars).push_back(s);
  }

  if (!vectors.empty() || !point_scalars.empty()) out << "POINT_DATA " << nv << '\n';
  for (const auto& v : vectors) {
    if (!v.field || v.field->space->family() != Family::velocity_p2)
      throw InvalidArgument("write_vtk: vector output expects a velocity field");
    const int n = v.field->space->scalar_dof_count();
    out << "VECTORS " << v.name << " double\n";
    // Scalar numbering starts with the mesh vertices.
    for (int i = 0; i < nv; ++i)
      out << format_number(v.field->values(i)) << ' ' << format_number(v.field->values(n + i)) << " 0\n";
  }
  for (const auto& s : point_scalars) {
    out << "SCALARS " << s.name << " double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < nv; ++i) out << format_number(s.field->values(i)) << '\n';
  }
  if (!cell_scalars.empty()) out << "CELL_DATA " << nt << '\n';
  for (const auto& s : cell_scalars) {
    out << "SCALARS " << s.name << " double 1\nLOOKUP_TABLE default\n";
    for (int k = 0; k < nt; ++k) {
      double sum = 0.0;
      for (int d : s.field->space->cell_dofs(k)) sum += s.field->values(d);
      out << format_number(sum / 3.0) << '\n';
    }
  }
}

StepLog::StepLog(std::ostream& out) : out_(out) {
  out_ << "step,time,stability_indicator,max_grad_fluctuation_v,max_grad_fluctuation_w,"
          "l2_mean_v,l2_mean_w,residual_v,residual_w,factorizations\n";
}

void StepLog::record(const EnsembleState& state, const StepReport& r) {
  out_ << r.step << ',' << format_number(r.time) << ',' << format_number(r.stability_indicator) << ','
       << format_number(r.max_grad_fluctuation_v) << ',' << format_number(r.max_grad_fluctuation_w) << ','
       << format_number(l2_norm(ensemble_average(state, Variable::v))) << ','
       << format_number(l2_norm(ensemble_average(state, Variable::w))) << ','
       << format_number(r.max_residual_v) << ',' << format_number(r.max_residual_w) << ','
       << r.factorizations << '\n';
}

void Manifest::add(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }

void Manifest::add(const std::string& key, double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  entries_.emplace_back(key, buf);
}

void Manifest::add(const std::string& key, int value) { entries_.emplace_back(key, std::to_string(value)); }

void Manifest::write(std::ostream& out) const {
  for (const auto& [k, v] : entries_) out << k << " = " << v << '\n';
}

}  // namespace ensmhd
