// Error types shared across the toolkit. Every failure mode raised by the
// library derives from vsd::Error; the CLI maps the three families onto
// process exit codes (parse = 2, geometry = 3, constraint = 4).
#pragma once

#include <stdexcept>
#include <string>

namespace vsd {

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A file could not be parsed. Carries the offending file and 1-based line
// (line 0 when the error is not tied to a specific line).
class ParseError : public Error {
public:
  ParseError(std::string file, long line, const std::string& msg)
      : Error(format(file, line, msg)), file_(std::move(file)), line_(line) {}

  const std::string& file() const { return file_; }
  long line() const { return line_; }

private:
  static std::string format(const std::string& file, long line,
                            const std::string& msg) {
    if (line > 0)
      return file + ":" + std::to_string(line) + ": " + msg;
    return file + ": " + msg;
  }

  std::string file_;
  long line_;
};

class GeometryError : public Error {
public:
  using Error::Error;
};

// Camera center lies on the head plane, or the induced homography is singular.
class DegenerateCamera : public GeometryError {
public:
  using GeometryError::GeometryError;
};

// Homogeneous normalization hit |w| below the guard threshold.
class PointAtInfinity : public GeometryError {
public:
  using GeometryError::GeometryError;
};

class ConstraintError : public Error {
public:
  using Error::Error;
};

class WrongSpace : public ConstraintError {
public:
  using ConstraintError::ConstraintError;
};

class OutOfGrid : public ConstraintError {
public:
  using ConstraintError::ConstraintError;
};

class DimMismatch : public ConstraintError {
public:
  using ConstraintError::ConstraintError;
};

class NotNormalized : public ConstraintError {
public:
  using ConstraintError::ConstraintError;
};

class OutOfRange : public ConstraintError {
public:
  using ConstraintError::ConstraintError;
};

class BelowMinimum : public ConstraintError {
public:
  using ConstraintError::ConstraintError;
};

class EmptySet : public ConstraintError {
public:
  using ConstraintError::ConstraintError;
};

class LengthMismatch : public ConstraintError {
public:
  using ConstraintError::ConstraintError;
};

// Scene generation exhausted its rejection-sampling budget.
class Infeasible : public ConstraintError {
public:
  using ConstraintError::ConstraintError;
};

class InvalidConfig : public ConstraintError {
public:
  using ConstraintError::ConstraintError;
};

}  // namespace vsd
