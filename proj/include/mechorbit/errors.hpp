#pragma once

#include <stdexcept>
#include <string>

namespace mechorbit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression, preset or metric (non-SPD, singular, bad parameters).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Run-config syntax or semantic error. `where()` is "line:col" or a field path.
class ConfigError : public Error {
 public:
  ConfigError(std::string where, const std::string& what)
      : Error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

/// Failure inside a solver stage; `stage()` names the pipeline step.
class SolverError : public Error {
 public:
  SolverError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace mechorbit
