#pragma once

#include "ellipsefit/types.hpp"

namespace ellipsefit {

// Scale to unit L2 norm with the first nonzero of (A, B, C) positive.
AlgebraicConic normalized(const AlgebraicConic& tau);

// Expand the geometric form into algebraic coefficients (normalized).
AlgebraicConic geometric_to_algebraic(const GeometricEllipse& rho);

// Invert geometric_to_algebraic. Throws NotAnEllipse when the conic does not
// classify as an ellipse.
GeometricEllipse algebraic_to_geometric(const AlgebraicConic& tau);

// Classification from the 3x3 determinant and the discriminant B^2 - 4AC,
// with a relative floating point band around the exact-zero conditions.
ConicClass classify_conic(const AlgebraicConic& tau);

// Reduce an arbitrary parameter tuple to canonical form: a >= b (swapping
// axes rotates theta by pi/2), theta wrapped into [0, pi), and theta = 0 for
// numerically circular inputs. Throws InvalidAxes for non-positive axes.
GeometricEllipse canonicalize(double xc, double yc, double a, double b, double theta);
GeometricEllipse canonicalize(const GeometricEllipse& rho);

// Translate/rotate into the ellipse-aligned frame and back.
EllipseFramePoint to_ellipse_frame(const GeometricEllipse& rho, Point2 p);
Point2 from_ellipse_frame(const GeometricEllipse& rho, EllipseFramePoint q);

}  // namespace ellipsefit
