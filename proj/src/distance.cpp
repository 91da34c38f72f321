#include "ellipsefit/distance.hpp"

#include <algorithm>
#include <cmath>

#include "ellipsefit/conic.hpp"

namespace ellipsefit {

namespace {

constexpr double kSqrtHalf = 0.70710678118654752440;

// Relative band treating a frame coordinate as exactly on an axis.
constexpr double kAxisBand = 1e-12;
// Relative band detecting a contact at the major vertex (|X_I| = a).
constexpr double kVertexBand = 1e-10;

inline double sq(double v) { return v * v; }

enum class Branch {
  MinorAxis,    // X = 0: contact (0, b)
  MajorVertex,  // Y = 0 and |X| >= f: contact (a, 0)
  General,
};

struct ContactEval {
  double Xa = 0.0, Ya = 0.0;  // |X|, |Y|
  double XI = 0.0, YI = 0.0;
  Branch branch = Branch::General;
  // cached intermediates of the general form (for the Jacobian)
  double T = 0.0, sqrt_delta = 0.0, G = 0.0;
};

ContactEval eval_contact(const GeometricEllipse& rho, double X, double Y) {
  ContactEval ev;
  ev.Xa = std::abs(X);
  ev.Ya = std::abs(Y);
  const double a = rho.a, b = rho.b;
  const double f2 = std::max(a * a - b * b, 0.0);
  const double f = std::sqrt(f2);
  const double tol = kAxisBand * a;

  if (ev.Xa <= tol) {
    ev.branch = Branch::MinorAxis;
    ev.XI = 0.0;
    ev.YI = b;
    return ev;
  }
  if (ev.Ya <= tol && ev.Xa >= f) {
    ev.branch = Branch::MajorVertex;
    ev.XI = a;
    ev.YI = 0.0;
    return ev;
  }

  // Rearranged circle-safe form. The discriminant T^2 - 4 X^2 f^2 factors as
  // ((|X|-f)^2 + Y^2) ((|X|+f)^2 + Y^2), which is exactly nonnegative.
  ev.T = ev.Xa * ev.Xa + ev.Ya * ev.Ya + f2;
  const double dm = sq(ev.Xa - f) + ev.Ya * ev.Ya;
  const double dp = sq(ev.Xa + f) + ev.Ya * ev.Ya;
  ev.sqrt_delta = std::sqrt(dm) * std::sqrt(dp);
  ev.G = 0.5 * (ev.T + ev.sqrt_delta);
  const double denom = std::sqrt(ev.G);
  ev.XI = std::min(a * ev.Xa / denom, a);
  ev.YI = (b / a) * std::sqrt(std::max(a * a - ev.XI * ev.XI, 0.0));
  return ev;
}

}  // namespace

double algebraic_distance(const AlgebraicConic& tau, Point2 p) {
  return tau.A * p.x * p.x + tau.B * p.x * p.y + tau.C * p.y * p.y + tau.D * p.x +
         tau.E * p.y + tau.F;
}

std::optional<double> sampson_distance(const AlgebraicConic& tau, Point2 p) {
  const double gx = 2.0 * tau.A * p.x + tau.B * p.y + tau.D;
  const double gy = tau.B * p.x + 2.0 * tau.C * p.y + tau.E;
  const double gn = std::hypot(gx, gy);
  if (gn < 1e-14) return std::nullopt;  // diverges toward the conic center
  return algebraic_distance(tau, p) / gn;
}

ContactPoint confocal_contact_point(const GeometricEllipse& rho, EllipseFramePoint q) {
  const ContactEval ev = eval_contact(rho, q.X, q.Y);
  return {ev.XI, ev.YI};
}

DistanceVec confocal_distance(const GeometricEllipse& rho, Point2 p) {
  const EllipseFramePoint q = to_ellipse_frame(rho, p);
  const ContactEval ev = eval_contact(rho, q.X, q.Y);
  DistanceVec d;
  d.dx = ev.Xa - ev.XI;
  d.dy = ev.Ya - ev.YI;
  d.norm = std::hypot(d.dx, d.dy);
  return d;
}

JacobianRow confocal_jacobian(const GeometricEllipse& rho, Point2 p) {
  const double a = rho.a, b = rho.b;
  const double C = std::cos(rho.theta);
  const double S = std::sin(rho.theta);
  const double dx = p.x - rho.xc;
  const double dy = p.y - rho.yc;
  const double X = dx * C + dy * S;
  const double Y = -dx * S + dy * C;
  const double sx = X > 0.0 ? 1.0 : (X < 0.0 ? -1.0 : 0.0);
  const double sy = Y > 0.0 ? 1.0 : (Y < 0.0 ? -1.0 : 0.0);

  const ContactEval ev = eval_contact(rho, X, Y);
  const double dhx = ev.Xa - ev.XI;
  const double dhy = ev.Ya - ev.YI;

  // Rows of (dD_hX/drho, dD_hY/drho); order (xc, yc, a, b, theta).
  std::array<double, 5> rx{}, ry{};
  if (ev.branch == Branch::MinorAxis) {
    ry = {sy * S, -sy * C, 0.0, -1.0, -sy * X};
  } else if (ev.branch == Branch::MajorVertex || ev.XI >= a * (1.0 - kVertexBand)) {
    rx = {-sx * C, -sx * S, -1.0, 0.0, sx * Y};
  } else {
    const std::array<double, 5> dX = {-C, -S, 0.0, 0.0, Y};
    const std::array<double, 5> dY = {S, -C, 0.0, 0.0, -X};
    const double f2 = std::max(a * a - b * b, 0.0);
    const double sd = ev.sqrt_delta;
    const double G = ev.G;
    const double denom = std::sqrt(G);
    const double g32 = G * denom;
    const double L = ev.XI / a;
    const double sq1mL2 = std::sqrt(std::max(1.0 - L * L, 0.0));

    for (int k = 0; k < 5; ++k) {
      const double dXk = dX[k];
      const double dYk = dY[k];
      const double dXa = sx * dXk;
      const double dYa = sy * dYk;
      const double da = k == 2 ? 1.0 : 0.0;
      const double db = k == 3 ? 1.0 : 0.0;
      const double dT = 2.0 * X * dXk + 2.0 * Y * dYk + 2.0 * a * da - 2.0 * b * db;
      const double dDelta =
          2.0 * ev.T * dT - 8.0 * X * X * (a * da - b * db) - 8.0 * f2 * X * dXk;
      // d(1/sqrt(G)) = -(2 sqrt(Delta) dT + dDelta) / (8 sqrt(Delta) G^{3/2})
      const double W = (2.0 * sd * dT + dDelta) / (8.0 * sd * g32);
      const double dXI = (dXa * a + da * ev.Xa) / denom - a * ev.Xa * W;
      const double dL = dXa / denom - ev.Xa * W;
      const double dYI = db * sq1mL2 - b * L * dL / sq1mL2;
      rx[k] = dXa - dXI;
      ry[k] = dYa - dYI;
    }
  }

  // Combine the component gradients into dD_h/drho. On the curve (and more
  // generally for equal components) the norm is not differentiable; the
  // diagonal limit sqrt(2)/2 (rx + ry) is used there.
  JacobianRow row;
  const double norm = std::hypot(dhx, dhy);
  if (norm <= kAxisBand * std::max(1.0, a)) {
    for (int k = 0; k < 5; ++k) row.d[k] = kSqrtHalf * (rx[k] + ry[k]);
  } else if (std::abs(dhx - dhy) <= 1e-14 * std::max(std::abs(dhx), std::abs(dhy))) {
    const double sgn = dhx > 0.0 ? 1.0 : -1.0;
    for (int k = 0; k < 5; ++k) row.d[k] = sgn * kSqrtHalf * (rx[k] + ry[k]);
  } else {
    for (int k = 0; k < 5; ++k) row.d[k] = (dhx * rx[k] + dhy * ry[k]) / norm;
  }
  return row;
}

ProjectionResult project_point_oracle(const GeometricEllipse& rho, Point2 p) {
  const double a = rho.a, b = rho.b;
  const EllipseFramePoint q = to_ellipse_frame(rho, p);
  const double Xa = std::abs(q.X);
  const double Ya = std::abs(q.Y);
  const double sx = q.X >= 0.0 ? 1.0 : -1.0;
  const double sy = q.Y >= 0.0 ? 1.0 : -1.0;
  const double tol = kAxisBand * a;
  const double f2 = std::max(a * a - b * b, 0.0);

  ProjectionResult out;
  out.inside = sq(q.X / a) + sq(q.Y / b) < 1.0;

  if (Xa <= tol) {
    // Minor axis (including the center): the nearest point is the co-vertex.
    out.contact = {0.0, sy * b};
    out.distance = std::abs(Ya - b);
    return out;
  }
  if (Ya <= tol) {
    const double xcrit = f2 / a;  // evolute cusp abscissa
    if (Xa >= xcrit) {
      out.contact = {sx * a, 0.0};
      out.distance = std::abs(Xa - a);
      return out;
    }
    const double u = a * a * Xa / f2;
    const double v = b * std::sqrt(std::max(1.0 - sq(u / a), 0.0));
    out.contact = {sx * u, sy * v};
    out.distance = std::hypot(Xa - u, v);
    return out;
  }

  // Lagrange scalar equation: phi(t) = (a X/(t+a^2))^2 + (b Y/(t+b^2))^2 - 1
  // is convex and strictly decreasing on (-b^2, inf) with a sign change in
  // [t_lo, t_hi], so Newton from the left edge converges monotonically.
  const double ax = a * Xa;
  const double by = b * Ya;
  const double a2 = a * a, b2 = b * b;
  double t_lo = -b2 + by;
  double t_hi = -b2 + std::hypot(ax, by);
  const auto phi = [&](double t, double& dphi) {
    const double pa = ax / (t + a2);
    const double pb = by / (t + b2);
    dphi = -2.0 * (pa * pa / (t + a2) + pb * pb / (t + b2));
    return pa * pa + pb * pb - 1.0;
  };

  double t = t_lo;
  for (int it = 0; it < 200; ++it) {
    double dv;
    const double v = phi(t, dv);
    if (std::abs(v) <= 1e-14) break;
    double tn = t - v / dv;
    if (!(tn > t_lo) || !(tn < t_hi) || !std::isfinite(tn)) tn = 0.5 * (t + t_hi);
    if (v > 0.0) t_lo = std::max(t_lo, t); else t_hi = std::min(t_hi, t);
    if (std::abs(tn - t) <= 1e-15 * (std::abs(tn) + b2)) { t = tn; break; }
    t = tn;
  }

  const double u = std::min(a2 * Xa / (t + a2), a);
  const double v = std::min(b2 * Ya / (t + b2), b);
  out.contact = {sx * u, sy * v};
  out.distance = std::hypot(Xa - u, Ya - v);
  return out;
}

Point2 project_point_world(const GeometricEllipse& rho, Point2 p) {
  const ProjectionResult pr = project_point_oracle(rho, p);
  return from_ellipse_frame(rho, {pr.contact.x, pr.contact.y});
}

}  // namespace ellipsefit
