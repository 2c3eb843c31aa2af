#pragma once

#include <cstdio>

#include <stdexcept>
#include <string>

namespace loggrowth {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unknown ids, bad parameters, violated preconditions.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Evaluation point outside the support of a density.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature failed to reach its tolerance.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double achieved)
      : Error(what + " (achieved error estimate " + format(achieved) + ")"),
        achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  static std::string format(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
  }
  double achieved_;
};

/// Pole at (or numerically at) a support endpoint, or a vanishing Newton slope.
class IllConditionedError : public Error {
 public:
  using Error::Error;
};

class RootNotFoundError : public Error {
 public:
  using Error::Error;
};

/// The regularized first-order condition has no sign change on the basin.
class PersistenceError : public Error {
 public:
  using Error::Error;
};

class DegenerateKdeError : public Error {
 public:
  using Error::Error;
};

class PhaseFailureError : public Error {
 public:
  PhaseFailureError(const std::string& what, double final_K)
      : Error(what), final_K_(final_K) {}
  double final_K() const noexcept { return final_K_; }

 private:
  double final_K_;
};

}  // namespace loggrowth
