#pragma once

#include "feann/constitutive/oracle.hpp"
#include "feann/homogenization/voxel_rve.hpp"
#include "feann/training/training.hpp"

#include <iosfwd>
#include <string>

namespace feann {

enum class OracleBackend { analytic, voxel };

const char* to_string(OracleBackend b);
OracleBackend oracle_backend_from_string(const std::string& s);

struct LoopConfig {
  // [material]
  OgdenParameters matrix = OgdenParameters::matrix_defaults();
  OgdenParameters fiber = OgdenParameters::fiber_defaults();
  // [oracle]
  OracleBackend backend = OracleBackend::analytic;
  double c_f = 450.0;
  Vector3 A_rve = Vector3::UnitZ();
  int voxel_n = 4;
  double voxel_fiber_fraction = 0.3;
  std::uint64_t voxel_seed = 1;
  // [network] and [training]
  TrainingConfig training;
  // [loop]
  double eps_detect = 0.05;
  double eps_filter = 0.01;
  int n_max = 20;
  int max_inner_repeats = 5;
  int initial_steps = 20;
  std::uint64_t seed = 1;
  int threads = 1;
  // [geometry]
  std::string geometry = "cuboid-hole";
  int resolution = 2;
  int macro_steps = 0;  // 0 keeps the geometry's default

  /// Throws InvalidParameters unless 0 < eps_filter < eps_detect < 1,
  /// n_max >= 1 and the nested parameter sets are valid.
  void validate() const;
  OracleParameters oracle() const;
  VoxelRVE voxel_rve() const;
  /// Training settings for one train call: fiber direction and threads
  /// follow the loop, the seed is offset per loop iteration and inner repeat.
  TrainingConfig training_for(int iteration, int repeat) const;
};

/// INI text with sections [material], [oracle], [network], [training],
/// [loop] and [geometry]; missing keys keep their defaults, unknown keys
/// are rejected. Throws FormatError or InvalidParameters.
LoopConfig parse_config(std::istream& in);
LoopConfig load_config(const std::string& path);
/// Every key with its current value, in the format parse_config reads.
std::string write_config(const LoopConfig& cfg);

}  // namespace feann
