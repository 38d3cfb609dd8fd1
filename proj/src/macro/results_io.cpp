#include "feann/macro/results_io.hpp"

#include "feann/errors.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace feann {

void write_results(std::ostream& out, const MacroResults& r) {
  const auto& m = r.mesh;
  const auto& s = r.state;
  out << "# feann-results " << kResultsFormatVersion << "\n";
  out << "geometry " << (r.geometry.empty() ? "custom" : r.geometry) << "\n";
  out << "nodes " << m.node_count() << "\n";
  for (const auto& x : m.nodes) out << format_double(x[0]) << ' ' << format_double(x[1]) << ' ' << format_double(x[2]) << "\n";
  out << "elements " << m.element_count() << "\n";
  for (const auto& e : m.elements) {
    for (int a = 0; a < 8; ++a) out << (a ? " " : "") << e[a];
    out << "\n";
  }
  out << "steps " << s.t_goal << ' ' << s.times.size() << "\n";
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    out << "step " << k << ' ' << format_double(s.times[k]) << "\n";
    for (int n = 0; n < m.node_count(); ++n)
      out << format_double(s.displacements[k][3 * n]) << ' ' << format_double(s.displacements[k][3 * n + 1]) << ' '
          << format_double(s.displacements[k][3 * n + 2]) << "\n";
    for (const auto& F : s.point_F[k]) out << format_tensor(F) << "\n";
    for (const auto& P : s.point_P[k]) out << format_tensor(P) << "\n";
  }
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::string next() {
    std::string line;
    if (!std::getline(in_, line)) throw CorruptRecord(line_ + 1, "unexpected end of file");
    ++line_;
    return line;
  }
  std::vector<std::string> tokens(std::size_t expected) {
    std::istringstream ss(next());
    std::vector<std::string> t;
    for (std::string w; ss >> w;) t.push_back(w);
    if (t.size() != expected)
      throw CorruptRecord(line_, "expected " + std::to_string(expected) + " fields, found " + std::to_string(t.size()));
    return t;
  }
  std::vector<std::string> keyed(const std::string& key, std::size_t expected) {
    auto t = tokens(expected);
    if (t[0] != key) throw CorruptRecord(line_, "expected '" + key + "'");
    return t;
  }
  long integer(const std::string& s) {
    try {
      std::size_t pos = 0;
      const long v = std::stol(s, &pos);
      if (pos != s.size() || v < 0) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw CorruptRecord(line_, "bad integer '" + s + "'");
    }
  }
  double real(const std::string& s) {
    try {
      return parse_double(s);
    } catch (const FormatError&) {
      throw CorruptRecord(line_, "bad number '" + s + "'");
    }
  }
  Tensor2 tensor() {
    const auto t = tokens(9);
    Tensor2 m;
    for (int k = 0; k < 9; ++k) m(k / 3, k % 3) = real(t[k]);
    return m;
  }
  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

}  // namespace

MacroResults read_results(std::istream& in) {
  LineReader rd(in);
  {
    const auto head = rd.tokens(3);
    if (head[0] != "#" || head[1] != "feann-results") throw CorruptRecord(1, "missing results header");
    const long v = rd.integer(head[2]);
    if (v != kResultsFormatVersion) throw FormatVersionMismatch("results", static_cast<int>(v), kResultsFormatVersion);
  }
  MacroResults r;
  r.geometry = rd.keyed("geometry", 2)[1];
  const long nn = rd.integer(rd.keyed("nodes", 2)[1]);
  for (long n = 0; n < nn; ++n) {
    const auto t = rd.tokens(3);
    r.mesh.nodes.emplace_back(rd.real(t[0]), rd.real(t[1]), rd.real(t[2]));
  }
  const long ne = rd.integer(rd.keyed("elements", 2)[1]);
  for (long e = 0; e < ne; ++e) {
    const auto t = rd.tokens(8);
    HexConnectivity c;
    for (int a = 0; a < 8; ++a) {
      c[a] = static_cast<int>(rd.integer(t[a]));
      if (c[a] >= nn) throw CorruptRecord(rd.line(), "node index out of range");
    }
    r.mesh.elements.push_back(c);
  }
  const auto st = rd.keyed("steps", 3);
  r.state.t_goal = static_cast<int>(rd.integer(st[1]));
  const long count = rd.integer(st[2]);
  for (long k = 0; k < count; ++k) {
    const auto h = rd.keyed("step", 3);
    if (rd.integer(h[1]) != k) throw CorruptRecord(rd.line(), "steps out of order");
    r.state.times.push_back(rd.real(h[2]));
    Eigen::VectorXd u(3 * nn);
    for (long n = 0; n < nn; ++n) {
      const auto t = rd.tokens(3);
      for (int c = 0; c < 3; ++c) u[3 * n + c] = rd.real(t[c]);
    }
    r.state.displacements.push_back(u);
    r.state.point_F.emplace_back();
    r.state.point_P.emplace_back();
    for (long p = 0; p < 8 * ne; ++p) r.state.point_F.back().push_back(rd.tensor());
    for (long p = 0; p < 8 * ne; ++p) r.state.point_P.back().push_back(rd.tensor());
    r.state.residual_history.emplace_back();
  }
  return r;
}

void save_results(const MacroResults& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write results file '" + path + "'");
  write_results(out, r);
  if (!out) throw FormatError("failed writing results file '" + path + "'");
}

MacroResults load_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read results file '" + path + "'");
  return read_results(in);
}

std::vector<std::string> write_vtk_series(const MacroResults& r, const std::string& stem) {
  static constexpr int vtk_order[8] = {0, 1, 3, 2, 4, 5, 7, 6};
  const auto& m = r.mesh;
  std::vector<std::string> files;
  for (std::size_t k = 0; k < r.state.times.size(); ++k) {
    std::ostringstream name;
    name << stem << '_' << std::setw(3) << std::setfill('0') << k << ".vtk";
    std::ofstream out(name.str());
    if (!out) throw FormatError("cannot write '" + name.str() + "'");
    out << "# vtk DataFile Version 3.0\n" << r.geometry << " t = " << r.state.times[k] << "\nASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\nPOINTS " << m.node_count() << " double\n";
    for (const auto& x : m.nodes) out << x[0] << ' ' << x[1] << ' ' << x[2] << "\n";
    out << "CELLS " << m.element_count() << ' ' << 9 * m.element_count() << "\n";
    for (const auto& e : m.elements) {
      out << 8;
      for (int a : vtk_order) out << ' ' << e[a];
      out << "\n";
    }
    out << "CELL_TYPES " << m.element_count() << "\n";
    for (int e = 0; e < m.element_count(); ++e) out << "12\n";
    out << "POINT_DATA " << m.node_count() << "\nVECTORS displacement double\n";
    const auto& u = r.state.displacements[k];
    for (int n = 0; n < m.node_count(); ++n) out << u[3 * n] << ' ' << u[3 * n + 1] << ' ' << u[3 * n + 2] << "\n";
    out << "CELL_DATA " << m.element_count() << "\n";
    auto cell_average = [&](const std::vector<Tensor2>& field, int e) {
      Tensor2 a = Tensor2::Zero();
      for (int q = 0; q < kHexQuadraturePoints; ++q) a += field[e * kHexQuadraturePoints + q];
      return Tensor2(a / kHexQuadraturePoints);
    };
    for (const char* label : {"F", "P"}) {
      const auto& field = label[0] == 'F' ? r.state.point_F[k] : r.state.point_P[k];
      out << "TENSORS " << label << " double\n";
      for (int e = 0; e < m.element_count(); ++e) {
        const Tensor2 a = cell_average(field, e);
        for (int i = 0; i < 3; ++i) out << a(i, 0) << ' ' << a(i, 1) << ' ' << a(i, 2) << "\n";
      }
    }
    out << "SCALARS det_F double 1\nLOOKUP_TABLE default\n";
    for (int e = 0; e < m.element_count(); ++e) out << cell_average(r.state.point_F[k], e).determinant() << "\n";
    if (!out) throw FormatError("failed writing '" + name.str() + "'");
    files.push_back(name.str());
  }
  return files;
}

}  // namespace feann
