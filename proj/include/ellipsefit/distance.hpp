#pragma once

#include <array>
#include <optional>

#include "ellipsefit/types.hpp"

namespace ellipsefit {

// Signed distance components in the ellipse frame and their L2 norm.
struct DistanceVec {
  double dx = 0.0;    // |X| - |X_I|
  double dy = 0.0;    // |Y| - |Y_I|
  double norm = 0.0;  // hypot(dx, dy)
};

// First-quadrant magnitudes of the orthogonal intersecting point between the
// ellipse and the confocal hyperbola through the query point.
struct ContactPoint {
  double X = 0.0;  // in [0, a]
  double Y = 0.0;  // in [0, b]
};

// dD/d(xc, yc, a, b, theta).
struct JacobianRow {
  std::array<double, 5> d{};
};

// Exact orthogonal projection. contact is in the ellipse frame (signed, same
// quadrant as the query point).
struct ProjectionResult {
  Point2 contact;
  double distance = 0.0;
  bool inside = false;
};

// tau . (x^2, xy, y^2, x, y, 1)
double algebraic_distance(const AlgebraicConic& tau, Point2 p);

// d_alg / |grad d_alg|; empty where the gradient vanishes (e.g. at the
// center of the conic, where the value diverges).
std::optional<double> sampson_distance(const AlgebraicConic& tau, Point2 p);

// Contact point from the rearranged, circle-safe closed form, with the
// axis special cases handled explicitly.
ContactPoint confocal_contact_point(const GeometricEllipse& rho, EllipseFramePoint q);

// Closed-form confocal hyperbola distance of a world point to the ellipse.
DistanceVec confocal_distance(const GeometricEllipse& rho, Point2 p);

// Analytic gradient of the confocal distance norm, finite for every input
// (axis and on-curve singular cases take dedicated branches).
JacobianRow confocal_jacobian(const GeometricEllipse& rho, Point2 p);

// Ground-truth geometric projection via safeguarded Newton on the scalar
// orthogonality equation; monotone on its bracket, so convergence is
// guaranteed. Independent of the confocal code path.
ProjectionResult project_point_oracle(const GeometricEllipse& rho, Point2 p);

// Oracle contact mapped back to world coordinates.
Point2 project_point_world(const GeometricEllipse& rho, Point2 p);

}  // namespace ellipsefit
