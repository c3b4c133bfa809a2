#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hfuv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user input: configs, kernel specs, plans. The CLI maps these to exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class SimulationError : public Error {
 public:
  SimulationError(const std::string& what, std::size_t interval)
      : Error(what + " (interval " + std::to_string(interval) + ")"), interval_(interval) {}
  std::size_t interval() const noexcept { return interval_; }

 private:
  std::size_t interval_;
};

// Enumeration or nested-loop work would exceed a fixed budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : Error(what + " (achieved error " + std::to_string(achieved) + ")"), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace hfuv
