#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace feann {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonPositiveJacobian : public Error {
 public:
  explicit NonPositiveJacobian(double det)
      : Error("deformation gradient has non-positive determinant " + std::to_string(det)), det_(det) {}
  double det() const { return det_; }

 private:
  double det_;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class NonFiniteValue : public Error {
 public:
  using Error::Error;
};

class InvalidParameters : public Error {
 public:
  using Error::Error;
};

class NewtonDivergence : public Error {
 public:
  NewtonDivergence(const std::string& where, int step, double residual)
      : Error(where + ": Newton iteration diverged at step " + std::to_string(step) +
              " (residual " + std::to_string(residual) + ")"),
        step_(step),
        residual_(residual) {}
  int step() const { return step_; }
  double residual() const { return residual_; }

 private:
  int step_;
  double residual_;
};

class NonPeriodicMesh : public Error {
 public:
  using Error::Error;
};

class ZeroMean : public Error {
 public:
  ZeroMean() : Error("chi-square test undefined for zero sample mean") {}
};

class EmptyDataSet : public Error {
 public:
  EmptyDataSet() : Error("data set is empty") {}
};

class NoFeasibleRestart : public Error {
 public:
  NoFeasibleRestart() : Error("no training restart satisfied the growth constraint") {}
};

class UnknownGeometry : public Error {
 public:
  explicit UnknownGeometry(const std::string& name) : Error("unknown geometry '" + name + "'") {}
};

class FirstStepDivergence : public Error {
 public:
  FirstStepDivergence() : Error("macroscopic solve failed in the first load step") {}
};

class MaxIterationsExceeded : public Error {
 public:
  explicit MaxIterationsExceeded(int n_max)
      : Error("mining loop reached n_max = " + std::to_string(n_max) + " with new data still appearing") {}
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class FormatVersionMismatch : public FormatError {
 public:
  FormatVersionMismatch(const std::string& what_kind, int found, int expected)
      : FormatError(what_kind + " format version " + std::to_string(found) + " (expected " +
                    std::to_string(expected) + ")") {}
};

class CorruptRecord : public FormatError {
 public:
  CorruptRecord(std::size_t line, const std::string& reason)
      : FormatError("corrupt record at line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace feann
