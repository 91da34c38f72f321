#include "ellipsefit/conic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ellipsefit {

namespace {

constexpr double kPi = std::numbers::pi;

// Relative band treating exact-zero classification conditions in floats.
constexpr double kClassifyEps = 1e-12;

double max_abs_coeff(const AlgebraicConic& t) {
  return std::max({std::abs(t.A), std::abs(t.B), std::abs(t.C), std::abs(t.D), std::abs(t.E),
                   std::abs(t.F)});
}

}  // namespace

AlgebraicConic normalized(const AlgebraicConic& tau) {
  const double n2 = tau.A * tau.A + tau.B * tau.B + tau.C * tau.C + tau.D * tau.D +
                    tau.E * tau.E + tau.F * tau.F;
  if (!(n2 > 0.0) || !std::isfinite(n2)) {
    throw DegenerateInput("conic coefficients are all zero or not finite");
  }
  double s = 1.0 / std::sqrt(n2);
  const double lead = tau.A != 0.0 ? tau.A : (tau.B != 0.0 ? tau.B : tau.C);
  if (lead < 0.0) s = -s;
  return {tau.A * s, tau.B * s, tau.C * s, tau.D * s, tau.E * s, tau.F * s};
}

AlgebraicConic geometric_to_algebraic(const GeometricEllipse& rho) {
  const double c = std::cos(rho.theta);
  const double s = std::sin(rho.theta);
  const double a2 = rho.a * rho.a;
  const double b2 = rho.b * rho.b;

  const double A = b2 * c * c + a2 * s * s;
  const double B = 2.0 * c * s * (b2 - a2);
  const double C = b2 * s * s + a2 * c * c;
  const double D = -2.0 * A * rho.xc - B * rho.yc;
  const double E = -B * rho.xc - 2.0 * C * rho.yc;
  const double F = A * rho.xc * rho.xc + B * rho.xc * rho.yc + C * rho.yc * rho.yc - a2 * b2;
  return normalized({A, B, C, D, E, F});
}

ConicClass classify_conic(const AlgebraicConic& tau) {
  const double scale = max_abs_coeff(tau);
  if (!(scale > 0.0)) return ConicClass::Degenerate;

  // det of [[A, B/2, D/2], [B/2, C, E/2], [D/2, E/2, F]]
  const double hb = tau.B / 2.0, hd = tau.D / 2.0, he = tau.E / 2.0;
  const double det = tau.A * (tau.C * tau.F - he * he) - hb * (hb * tau.F - he * hd) +
                     hd * (hb * he - tau.C * hd);
  const double disc = tau.B * tau.B - 4.0 * tau.A * tau.C;

  if (std::abs(det) < kClassifyEps * scale * scale * scale) return ConicClass::Degenerate;
  if (std::abs(disc) < kClassifyEps * scale * scale) return ConicClass::Parabola;
  return disc < 0.0 ? ConicClass::Ellipse : ConicClass::Hyperbola;
}

GeometricEllipse canonicalize(double xc, double yc, double a, double b, double theta) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw InvalidAxes("axis lengths must be positive and finite");
  }
  if (a < b) {
    std::swap(a, b);
    theta += kPi / 2.0;
  }
  theta = std::fmod(theta, kPi);
  if (theta < 0.0) theta += kPi;
  if (theta >= kPi) theta = 0.0;  // fmod roundoff at the boundary
  if (a - b < 1e-12 * a) theta = 0.0;  // rotation is unidentifiable for circles
  return {xc, yc, a, b, theta};
}

GeometricEllipse canonicalize(const GeometricEllipse& rho) {
  return canonicalize(rho.xc, rho.yc, rho.a, rho.b, rho.theta);
}

GeometricEllipse algebraic_to_geometric(const AlgebraicConic& tau_in) {
  const AlgebraicConic tau = normalized(tau_in);
  if (classify_conic(tau) != ConicClass::Ellipse) {
    throw NotAnEllipse("conic does not classify as an ellipse");
  }

  // Center from grad d_alg = 0.
  const double det2 = 4.0 * tau.A * tau.C - tau.B * tau.B;
  const double xc = (tau.B * tau.E - 2.0 * tau.C * tau.D) / det2;
  const double yc = (tau.B * tau.D - 2.0 * tau.A * tau.E) / det2;

  // Constant term of the conic re-centered at (xc, yc).
  const double fc = tau.A * xc * xc + tau.B * xc * yc + tau.C * yc * yc + tau.D * xc +
                    tau.E * yc + tau.F;

  // Principal axis rotation, then axis lengths from the diagonalized form.
  double theta0 = 0.5 * std::atan2(tau.B, tau.A - tau.C);
  const double c0 = std::cos(theta0);
  const double s0 = std::sin(theta0);
  const double ap = tau.A * c0 * c0 + tau.B * c0 * s0 + tau.C * s0 * s0;
  const double cp = tau.A * s0 * s0 - tau.B * c0 * s0 + tau.C * c0 * c0;
  const double ra = -fc / ap;
  const double rb = -fc / cp;
  if (!(ra > 0.0) || !(rb > 0.0)) {
    throw NotAnEllipse("conic is numerically degenerate");
  }
  return canonicalize(xc, yc, std::sqrt(ra), std::sqrt(rb), theta0);
}

EllipseFramePoint to_ellipse_frame(const GeometricEllipse& rho, Point2 p) {
  const double c = std::cos(rho.theta);
  const double s = std::sin(rho.theta);
  const double dx = p.x - rho.xc;
  const double dy = p.y - rho.yc;
  return {dx * c + dy * s, -dx * s + dy * c};
}

Point2 from_ellipse_frame(const GeometricEllipse& rho, EllipseFramePoint q) {
  const double c = std::cos(rho.theta);
  const double s = std::sin(rho.theta);
  return {rho.xc + q.X * c - q.Y * s, rho.yc + q.X * s + q.Y * c};
}

}  // namespace ellipsefit
