#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace ellipsefit {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// Canonical form: a >= b > 0 and theta in [0, pi). Construct arbitrary
// parameter 5-tuples through canonicalize() to get a valid instance.
struct GeometricEllipse {
  double xc = 0.0;
  double yc = 0.0;
  double a = 1.0;   // semi-major length
  double b = 1.0;   // semi-minor length
  double theta = 0.0;

  // Distance from the center to either focus, sqrt(a^2 - b^2).
  double focal_distance() const {
    const double f2 = a * a - b * b;
    return f2 > 0.0 ? std::sqrt(f2) : 0.0;
  }
};

// General conic A x^2 + B xy + C y^2 + D x + E y + F = 0. The coefficient
// vector is scale-equivalent; normalized() fixes unit L2 norm with the first
// nonzero of (A, B, C) positive.
struct AlgebraicConic {
  double A = 0.0, B = 0.0, C = 0.0, D = 0.0, E = 0.0, F = 0.0;
};

enum class ConicClass { Ellipse, Hyperbola, Parabola, Degenerate };

// Coordinates in the translated/rotated ellipse-aligned frame.
struct EllipseFramePoint {
  double X = 0.0;
  double Y = 0.0;
};

// --- error types -----------------------------------------------------------

class NotAnEllipse : public std::runtime_error {
public:
  explicit NotAnEllipse(const std::string& what) : std::runtime_error(what) {}
};

class InvalidAxes : public std::runtime_error {
public:
  explicit InvalidAxes(const std::string& what) : std::runtime_error(what) {}
};

class DegenerateInput : public std::runtime_error {
public:
  explicit DegenerateInput(const std::string& what) : std::runtime_error(what) {}
};

class InsufficientPoints : public std::runtime_error {
public:
  explicit InsufficientPoints(const std::string& what) : std::runtime_error(what) {}
};

class InitializationFailed : public std::runtime_error {
public:
  explicit InitializationFailed(const std::string& what) : std::runtime_error(what) {}
};

class NumericalFailure : public std::runtime_error {
public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

class EmptyResult : public std::runtime_error {
public:
  explicit EmptyResult(const std::string& what) : std::runtime_error(what) {}
};

class EmptyInput : public std::runtime_error {
public:
  explicit EmptyInput(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, long line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"),
        line_number(line) {}
  long line_number;
};

}  // namespace ellipsefit
