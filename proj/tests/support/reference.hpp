#pragma once

// Test-only reference implementations, kept independent of the library code
// paths they are used to check.

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "ellipsefit/conic.hpp"
#include "ellipsefit/distance.hpp"
#include "ellipsefit/types.hpp"

namespace ellipsefit::testref {

// Minimum distance from a frame point to the ellipse boundary by dense
// parametric sampling followed by golden-section refinement around the best
// sample. Independent of the root-finding projection path.
inline double dense_sample_distance(const GeometricEllipse& rho, EllipseFramePoint q,
                                    int samples = 1000000) {
  const double a = rho.a, b = rho.b;
  const auto dist = [&](double u) {
    return std::hypot(a * std::cos(u) - q.X, b * std::sin(u) - q.Y);
  };
  const double step = 2.0 * std::numbers::pi / samples;
  double best_u = 0.0;
  double best = dist(0.0);
  for (int i = 1; i < samples; ++i) {
    const double u = i * step;
    const double d = dist(u);
    if (d < best) {
      best = d;
      best_u = u;
    }
  }
  // Golden-section refinement on the bracketing interval.
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = best_u - step, hi = best_u + step;
  double c = hi - gr * (hi - lo);
  double d = lo + gr * (hi - lo);
  double fc = dist(c), fd = dist(d);
  for (int it = 0; it < 200; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = dist(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = dist(d);
    }
  }
  return std::min(fc, fd);
}

// Central finite differences of the confocal distance norm, absolute step.
inline std::array<double, 5> confocal_fd_gradient(const GeometricEllipse& rho, Point2 p,
                                                  double h = 1e-6) {
  const auto eval = [&](int k, double dh) {
    GeometricEllipse r = rho;
    switch (k) {
      case 0: r.xc += dh; break;
      case 1: r.yc += dh; break;
      case 2: r.a += dh; break;
      case 3: r.b += dh; break;
      case 4: r.theta += dh; break;
    }
    return confocal_distance(r, p).norm;
  };
  std::array<double, 5> g{};
  for (int k = 0; k < 5; ++k) g[k] = (eval(k, h) - eval(k, -h)) / (2.0 * h);
  return g;
}

// Deviation of the displacement from the ellipse normal direction at the
// contact: |(p - contact) . unit tangent|.
inline double orthogonality_residual(const GeometricEllipse& rho, EllipseFramePoint q,
                                     const ProjectionResult& pr) {
  const double a = rho.a, b = rho.b;
  const double tx = -pr.contact.y / (b * b);
  const double ty = pr.contact.x / (a * a);
  const double tn = std::hypot(tx, ty);
  if (tn == 0.0) return 0.0;
  const double dx = q.X - pr.contact.x;
  const double dy = q.Y - pr.contact.y;
  return std::abs(dx * tx + dy * ty) / tn;
}

inline double on_ellipse_residual(const GeometricEllipse& rho, Point2 contact_frame) {
  const double u = contact_frame.x / rho.a;
  const double v = contact_frame.y / rho.b;
  return std::abs(u * u + v * v - 1.0);
}

inline GeometricEllipse random_ellipse(std::mt19937_64& rng, double b_min = 5.0,
                                       double b_max = 50.0, double aspect_min = 1.001,
                                       double aspect_max = 4.0, double center = 10.0) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double b = b_min + u01(rng) * (b_max - b_min);
  const double aspect = aspect_min + u01(rng) * (aspect_max - aspect_min);
  const double theta = u01(rng) * std::numbers::pi;
  const double xc = (2.0 * u01(rng) - 1.0) * center;
  const double yc = (2.0 * u01(rng) - 1.0) * center;
  return canonicalize(xc, yc, aspect * b, b, theta);
}

// Uniform point in a box of +-span around the ellipse center.
inline Point2 random_point_near(std::mt19937_64& rng, const GeometricEllipse& rho,
                                double span_factor = 2.0) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double span = span_factor * rho.a;
  return {rho.xc + (2.0 * u01(rng) - 1.0) * span, rho.yc + (2.0 * u01(rng) - 1.0) * span};
}

// Exact (non-pixelated) points sampled uniformly in parameter.
inline std::vector<Point2> exact_ellipse_points(const GeometricEllipse& rho, int n,
                                                double u0 = 0.0,
                                                double u1 = 2.0 * std::numbers::pi) {
  std::vector<Point2> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double u = u0 + (u1 - u0) * i / n;
    pts.push_back(from_ellipse_frame(rho, {rho.a * std::cos(u), rho.b * std::sin(u)}));
  }
  return pts;
}

}  // namespace ellipsefit::testref
