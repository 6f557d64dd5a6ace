#pragma once

#include <stdexcept>
#include <string>

namespace swe {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration, file contents, or argument combination.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The scheme produced a non-finite value or could not find an admissible
/// timestep. Carries the step and rank where it happened when known.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what, long step = -1, int rank = -1)
      : Error(decorate(what, step, rank)), step_(step), rank_(rank) {}

  long step() const { return step_; }
  int rank() const { return rank_; }

 private:
  static std::string decorate(const std::string& what, long step, int rank) {
    if (step < 0 && rank < 0) return what;
    return what + " (step " + std::to_string(step) + ", rank " + std::to_string(rank) + ")";
  }

  long step_;
  int rank_;
};

/// Message fabric failure: timeout waiting for a peer or an aborted run.
class CommunicationError : public Error {
 public:
  using Error::Error;
};

}  // namespace swe
