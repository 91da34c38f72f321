#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ellipsefit/types.hpp"

namespace ellipsefit {

// Levenberg-Marquardt controls. Defaults follow the benchmark configuration:
// lambda = 0.5, increment 10, decrement 3, at most 50 iterations.
struct LMConfig {
  double lambda0 = 0.5;
  double nu0 = 10.0;
  double gamma = 3.0;
  int max_iters = 50;
  double rel_tol = 1e-12;
};

enum class FitStatus { Converged, MaxIters, InitialWasOptimal };

struct FitResult {
  GeometricEllipse ellipse;
  int iterations = 0;
  double final_sd = 0.0;  // sum of squared confocal distances at the solution
  FitStatus status = FitStatus::Converged;
  // Accepted objective values, starting with the initial estimate. The
  // sequence is non-increasing by construction.
  std::vector<double> sd_history;
};

// Direct ellipse-specific least squares via the partitioned design matrix.
// Always returns an ellipse. Throws InsufficientPoints (< 6 points) or
// DegenerateInput (collinear/coincident data, no admissible eigenvector).
GeometricEllipse fit_halir(std::span<const Point2> points);

// Gradient-normalized algebraic fit. The result is a conic and is not
// guaranteed to be an ellipse; callers must check classify_conic.
AlgebraicConic fit_taubin(std::span<const Point2> points);

// Minimize the sum of squared confocal hyperbola distances. Starts from
// `init` when given, otherwise from fit_halir.
FitResult fit_confocal_lm(std::span<const Point2> points, const LMConfig& config = {},
                          const std::optional<GeometricEllipse>& init = std::nullopt);

// Three-parameter reduction (f = 0, theta = 0, a = b): exact geometric circle
// fit with a closed-form algebraic initializer.
FitResult fit_circle_lm(std::span<const Point2> points, const LMConfig& config = {});

}  // namespace ellipsefit
