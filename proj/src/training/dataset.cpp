#include "feann/training/dataset.hpp"

#include "feann/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace feann {

const char* to_string(TupleSource s) {
  switch (s) {
    case TupleSource::initial:
      return "initial";
    case TupleSource::mined:
      return "mined";
    case TupleSource::macro:
      return "macro";
  }
  return "initial";
}

TupleSource tuple_source_from_string(const std::string& s) {
  if (s == "initial") return TupleSource::initial;
  if (s == "mined") return TupleSource::mined;
  if (s == "macro") return TupleSource::macro;
  throw FormatError("unknown tuple source '" + s + "'");
}

namespace knowledge_base {

namespace {

int parse_int(const std::string& token) {
  int value = 0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end) throw FormatError("expected integer, got '" + token + "'");
  return value;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

}  // namespace

void write(std::ostream& out, const DataSet& D) {
  out << "# feann-dataset " << kDatasetFormatVersion << '\n';
  out << "# iteration " << D.iteration << '\n';
  out << "# path_id step t F11 F12 F13 F21 F22 F23 F31 F32 F33 P11 P12 P13 P21 P22 P23 P31 P32 P33 source iteration\n";
  for (const auto& d : D.tuples) {
    out << d.path_id << ' ' << d.step << ' ' << format_double(d.t) << ' ' << format_tensor(d.F) << ' '
        << format_tensor(d.P) << ' ' << to_string(d.source) << ' ' << d.iteration << '\n';
  }
}

DataSet read(std::istream& in) {
  DataSet D;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    try {
      if (tokens[0][0] == '#') {
        const std::string key = tokens[0] == "#" && tokens.size() > 1 ? tokens[1] : tokens[0].substr(1);
        const std::size_t arg = tokens[0] == "#" ? 2 : 1;
        if (key == "feann-dataset" && tokens.size() > arg) {
          const int version = parse_int(tokens[arg]);
          if (version != kDatasetFormatVersion) throw FormatVersionMismatch("dataset", version, kDatasetFormatVersion);
        } else if (key == "iteration" && tokens.size() > arg) {
          D.iteration = parse_int(tokens[arg]);
        }
        continue;
      }
      if (tokens.size() != 23) throw FormatError("expected 23 fields, found " + std::to_string(tokens.size()));
      DataTuple d;
      d.path_id = parse_int(tokens[0]);
      d.step = parse_int(tokens[1]);
      d.t = parse_double(tokens[2]);
      for (int k = 0; k < 9; ++k) {
        d.F(k / 3, k % 3) = parse_double(tokens[3 + k]);
        d.P(k / 3, k % 3) = parse_double(tokens[12 + k]);
      }
      d.source = tuple_source_from_string(tokens[21]);
      d.iteration = parse_int(tokens[22]);
      if (!d.F.allFinite() || !d.P.allFinite() || !std::isfinite(d.t)) throw FormatError("non-finite value");
      if (!(d.F.determinant() > 0.0)) throw FormatError("deformation gradient with non-positive determinant");
      D.tuples.push_back(d);
    } catch (const FormatVersionMismatch&) {
      throw;
    } catch (const FormatError& e) {
      throw CorruptRecord(lineno, e.what());
    }
  }
  return D;
}

void save(const DataSet& D, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  write(out, D);
  if (!out) throw FormatError("failed writing '" + path + "'");
}

DataSet load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return read(in);
}

}  // namespace knowledge_base
}  // namespace feann
