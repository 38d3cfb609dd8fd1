#pragma once

#include "feann/kinematics/tensor.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace feann {

inline constexpr int kDatasetFormatVersion = 1;

enum class TupleSource { initial, mined, macro };

const char* to_string(TupleSource s);
TupleSource tuple_source_from_string(const std::string& s);

/// One (F, P) pair in the RVE frame with its provenance.
struct DataTuple {
  Tensor2 F = Tensor2::Identity();
  Tensor2 P = Tensor2::Zero();  // kPa
  int path_id = 0;
  int step = 0;
  double t = 0.0;
  TupleSource source = TupleSource::initial;
  int iteration = 0;

  friend bool operator==(const DataTuple&, const DataTuple&) = default;
};

struct DataSet {
  std::vector<DataTuple> tuples;
  int iteration = 0;

  std::size_t size() const { return tuples.size(); }
  bool empty() const { return tuples.empty(); }
  void append(const DataSet& other) { tuples.insert(tuples.end(), other.tuples.begin(), other.tuples.end()); }
};

/// Line-delimited text records:
///   path_id step t F11..F33 P11..P33 source iteration
/// preceded by "# feann-dataset <version>" and "# iteration <i>" headers.
/// Lines starting with '#' may appear anywhere; IO never filters.
namespace knowledge_base {

void write(std::ostream& out, const DataSet& D);
/// Throws FormatVersionMismatch or CorruptRecord (1-based line numbers).
DataSet read(std::istream& in);
void save(const DataSet& D, const std::string& path);
DataSet load(const std::string& path);

}  // namespace knowledge_base
}  // namespace feann
