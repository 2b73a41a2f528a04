#pragma once

#include <stdexcept>
#include <string>

namespace orbitgrasp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// J W J^T too ill-conditioned to invert.
class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

// A simulation had to stop: non-finite state, pendulum gimbal lock, solver failure.
class SimulationAbort : public Error {
 public:
  SimulationAbort(double time, const std::string& cause)
      : Error("t=" + std::to_string(time) + ": " + cause), time_(time), cause_(cause) {}
  double time() const { return time_; }
  const std::string& cause() const { return cause_; }

 private:
  double time_;
  std::string cause_;
};

}  // namespace orbitgrasp
