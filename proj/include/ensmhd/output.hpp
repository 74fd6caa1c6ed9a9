#pragma once

#include "ensmhd/scheme.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace ensmhd {

/// Fixed scientific formatting used by every CSV writer.
std::string format_number(double value);

struct NamedField {
  std::string name;
  const FEField* field = nullptr;
};

/// Legacy ASCII VTK of the mesh with vertex values of P2 vector fields and
/// pressures (continuous: point data; discontinuous: cell averages).
void write_vtk(std::ostream& out, const Mesh& mesh, const std::vector<NamedField>& vectors,
               const std::vector<NamedField>& scalars = {});

/// Per-step log: one row per StepReport plus L2 norms of the averages.
class StepLog {
public:
  explicit StepLog(std::ostream& out);
  void record(const EnsembleState& state, const StepReport& report);

private:
  std::ostream& out_;
};

/// Plain-text "key = value" lines in insertion order.
class Manifest {
public:
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double value);
  void add(const std::string& key, int value);
  void write(std::ostream& out) const;

private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace ensmhd
