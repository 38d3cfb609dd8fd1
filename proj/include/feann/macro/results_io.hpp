#pragma once

#include "feann/macro/solver.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace feann {

inline constexpr int kResultsFormatVersion = 1;

struct MacroResults {
  std::string geometry;
  MacroMesh mesh;  // nodes and elements only
  MacroState state;
};

/// Plain text results:
///   # feann-results 1
///   geometry <name>
///   nodes <N>, then N lines "x y z"
///   elements <E>, then E lines of 8 node indices
///   steps <goal> <count>, then per step:
///     step <k> <t>
///     u: N lines "u1 u2 u3"
///     F: 8E lines of 9 row-major components (element-major, then Gauss point)
///     P: 8E lines likewise
/// Doubles are written in shortest round-trip form.
void write_results(std::ostream& out, const MacroResults& r);
/// Throws FormatVersionMismatch or CorruptRecord (with line number).
MacroResults read_results(std::istream& in);
void save_results(const MacroResults& r, const std::string& path);
MacroResults load_results(const std::string& path);

/// Legacy VTK unstructured grids, one file "<stem>_<k>.vtk" per stored step,
/// with point vector "displacement" and cell fields "F", "P" (averages over
/// the element's Gauss points) and "det_F". Returns the written paths.
std::vector<std::string> write_vtk_series(const MacroResults& r, const std::string& stem);

}  // namespace feann
