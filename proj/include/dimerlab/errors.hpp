#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace dimerlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a mathematical operation (e.g. a kernel at zero separation).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Requested operation is not defined for the given model or geometry.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A problem dimension exceeds a configured cap. `dimension` is the offending size.
class CapacityError : public Error {
 public:
  CapacityError(const std::string& what, std::size_t dimension, std::size_t cap)
      : Error(what + " (dimension " + std::to_string(dimension) + " exceeds cap " +
              std::to_string(cap) + ")"),
        dimension_(dimension),
        cap_(cap) {}

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t dimension_;
  std::size_t cap_;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual = -1.0)
      : Error(what), residual_(residual) {}
  /// Residual reached before giving up, negative when not applicable.
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// More than one steady state. `candidates` spans the detected null space.
class MultiplicityError : public SolverError {
 public:
  MultiplicityError(const std::string& what, std::vector<Eigen::MatrixXcd> candidates)
      : SolverError(what), candidates_(std::move(candidates)) {}
  const std::vector<Eigen::MatrixXcd>& candidates() const noexcept { return candidates_; }

 private:
  std::vector<Eigen::MatrixXcd> candidates_;
};

}  // namespace dimerlab
