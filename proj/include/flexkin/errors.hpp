#pragma once

#include <stdexcept>
#include <string>

namespace flexkin {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violated by a caller (length mismatch, bad range, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// The gravity reference vanished (both effective accelerations ~0).
class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

/// A non-finite value reached a recursive estimator.
class PropagationError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  IoError(const std::string& what, const std::string& path)
      : Error(what + ": " + path), path_(path) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Invalid configuration; `field` is the dotted path of the offending key.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(field) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// A pipeline stage could not run (usually a missing upstream artifact).
class PipelineError : public Error {
 public:
  using Error::Error;
};

}  // namespace flexkin
