#pragma once

#include <stdexcept>
#include <string>

namespace steel {

/// Root of every error the library throws. The CLI maps each subclass to an exit code.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// File missing, unreadable, malformed or unsupported.
class IoError : public Error {
public:
  using Error::Error;
};

/// A configuration value outside its domain, or an unknown key.
class ConfigError : public Error {
public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

/// An operation was called with inputs outside its contract.
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// The histogram carries no detectable intensity mode.
class NoStructureError : public Error {
public:
  NoStructureError() : Error("no structure in histogram") {}
};

}  // namespace steel
