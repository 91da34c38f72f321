#include "ellipsefit/fitters.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cfloat>
#include <cmath>
#include <limits>

#include "ellipsefit/conic.hpp"
#include "ellipsefit/distance.hpp"

namespace ellipsefit {

namespace {

// Similarity normalization of the data (centroid shift + isotropic scale).
// The constrained algebraic problems transform congruently under this map,
// so the minimizer is unchanged; it only improves conditioning.
struct Normalization {
  double mx = 0.0, my = 0.0, s = 1.0;
};

Normalization normalize_points(std::span<const Point2> pts, std::vector<Point2>& out) {
  Normalization nm;
  const auto n = static_cast<double>(pts.size());
  for (const Point2& p : pts) {
    nm.mx += p.x;
    nm.my += p.y;
  }
  nm.mx /= n;
  nm.my /= n;
  double mean_dist = 0.0;
  for (const Point2& p : pts) mean_dist += std::hypot(p.x - nm.mx, p.y - nm.my);
  mean_dist /= n;
  nm.s = mean_dist > 1e-12 ? mean_dist : 1.0;
  out.resize(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out[i] = {(pts[i].x - nm.mx) / nm.s, (pts[i].y - nm.my) / nm.s};
  }
  return nm;
}

// Conic fitted in normalized coordinates, expressed in the original frame.
AlgebraicConic denormalize_conic(const AlgebraicConic& t, const Normalization& nm) {
  const double s = nm.s, s2 = s * s;
  AlgebraicConic o;
  o.A = t.A / s2;
  o.B = t.B / s2;
  o.C = t.C / s2;
  o.D = -(2.0 * t.A * nm.mx + t.B * nm.my) / s2 + t.D / s;
  o.E = -(t.B * nm.mx + 2.0 * t.C * nm.my) / s2 + t.E / s;
  o.F = (t.A * nm.mx * nm.mx + t.B * nm.mx * nm.my + t.C * nm.my * nm.my) / s2 -
        (t.D * nm.mx + t.E * nm.my) / s + t.F;
  return normalized(o);
}

void validate_config(const LMConfig& c) {
  if (!(c.lambda0 > 0.0) || !(c.nu0 > 1.0) || !(c.gamma > 1.0) || c.max_iters < 1 ||
      !(c.rel_tol >= 0.0)) {
    throw std::invalid_argument("invalid LM configuration");
  }
}

}  // namespace

GeometricEllipse fit_halir(std::span<const Point2> points) {
  if (points.size() < 6) throw InsufficientPoints("ellipse fit needs at least 6 points");

  std::vector<Point2> pts;
  const Normalization nm = normalize_points(points, pts);

  Eigen::Matrix3d S1 = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d S2 = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d S3 = Eigen::Matrix3d::Zero();
  for (const Point2& p : pts) {
    const Eigen::Vector3d q(p.x * p.x, p.x * p.y, p.y * p.y);
    const Eigen::Vector3d l(p.x, p.y, 1.0);
    S1 += q * q.transpose();
    S2 += q * l.transpose();
    S3 += l * l.transpose();
  }

  Eigen::FullPivLU<Eigen::Matrix3d> lu(S3);
  lu.setThreshold(1e-10);
  if (!lu.isInvertible()) {
    throw DegenerateInput("points are collinear or coincident");
  }
  const Eigen::Matrix3d Tm = -lu.solve(S2.transpose());
  const Eigen::Matrix3d M = S1 + S2 * Tm;

  // Premultiply by the inverse of the constraint block ((0,0,2),(0,-1,0),(2,0,0)).
  Eigen::Matrix3d Mr;
  Mr.row(0) = M.row(2) / 2.0;
  Mr.row(1) = -M.row(1);
  Mr.row(2) = M.row(0) / 2.0;

  const Eigen::EigenSolver<Eigen::Matrix3d> es(Mr);
  if (es.info() != Eigen::Success) throw DegenerateInput("eigen decomposition failed");

  // Exactly one eigenvector satisfies the ellipse condition 4AC - B^2 > 0;
  // if several qualify numerically, keep the largest value.
  double best_cond = 0.0;
  Eigen::Vector3d tau1 = Eigen::Vector3d::Zero();
  bool found = false;
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector3cd vc = es.eigenvectors().col(i);
    if (vc.imag().cwiseAbs().maxCoeff() > 1e-8 * vc.real().cwiseAbs().maxCoeff()) continue;
    const Eigen::Vector3d v = vc.real().normalized();
    const double cond = 4.0 * v(0) * v(2) - v(1) * v(1);
    if (cond > 0.0 && (!found || cond > best_cond)) {
      best_cond = cond;
      tau1 = v;
      found = true;
    }
  }
  if (!found) throw DegenerateInput("no eigenvector satisfies the ellipse condition");

  const Eigen::Vector3d tau2 = Tm * tau1;
  const AlgebraicConic conic = denormalize_conic(
      {tau1(0), tau1(1), tau1(2), tau2(0), tau2(1), tau2(2)}, nm);
  return algebraic_to_geometric(conic);
}

AlgebraicConic fit_taubin(std::span<const Point2> points) {
  if (points.size() < 6) throw InsufficientPoints("conic fit needs at least 6 points");

  std::vector<Point2> pts;
  const Normalization nm = normalize_points(points, pts);

  using Matrix6d = Eigen::Matrix<double, 6, 6>;
  using Vector6d = Eigen::Matrix<double, 6, 1>;
  Matrix6d S = Matrix6d::Zero();
  Eigen::Matrix<double, 5, 5> N = Eigen::Matrix<double, 5, 5>::Zero();
  for (const Point2& p : pts) {
    Vector6d d;
    d << p.x * p.x, p.x * p.y, p.y * p.y, p.x, p.y, 1.0;
    S += d * d.transpose();
    Eigen::Matrix<double, 5, 1> gx, gy;
    gx << 2.0 * p.x, p.y, 0.0, 1.0, 0.0;
    gy << 0.0, p.x, 2.0 * p.y, 0.0, 1.0;
    N += gx * gx.transpose() + gy * gy.transpose();
  }

  // The gradient rows carry no F component, so F is eliminated through the
  // Schur complement and the pencil reduces to a symmetric-definite 5x5 one.
  const double n = static_cast<double>(pts.size());
  const Eigen::Matrix<double, 5, 1> s6 = S.block<5, 1>(0, 5);
  const Eigen::Matrix<double, 5, 5> Sr = S.block<5, 5>(0, 0) - (s6 * s6.transpose()) / n;

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix<double, 5, 5>> ges(Sr, N);
  if (ges.info() != Eigen::Success) {
    throw DegenerateInput("rank-deficient pencil (degenerate point set)");
  }
  const double lam_scale = std::max(1.0, ges.eigenvalues().cwiseAbs().maxCoeff());
  int pick = -1;
  for (int i = 0; i < 5; ++i) {
    if (ges.eigenvalues()(i) >= -1e-9 * lam_scale) {
      pick = i;  // eigenvalues are sorted ascending
      break;
    }
  }
  if (pick < 0) throw DegenerateInput("no non-negative generalized eigenvalue");

  const Eigen::Matrix<double, 5, 1> v = ges.eigenvectors().col(pick);
  const double F = -s6.dot(v) / n;
  return denormalize_conic({v(0), v(1), v(2), v(3), v(4), F}, nm);
}

namespace {

// Levenberg-Marquardt driver shared by the 5-parameter ellipse fit and the
// 3-parameter circle reduction.
//
//   objective(q)            sum of squared residuals at canonical q
//   build_system(q, A, g)   accumulates J^T J and J^T r at canonical q
//   project(q)              validates a raw candidate and canonicalizes it
//                           in place; false rejects the step
//   pack(q)                 canonical parameters -> GeometricEllipse
//
// Step acceptance follows the damping schedule: improvement divides lambda
// by gamma and resets nu; a worse candidate multiplies lambda by nu and
// squares nu; a flat objective change (within rel_tol) terminates. The best
// visited solution is always retained.
template <int Dim, typename Objective, typename BuildSystem, typename Project, typename Pack>
FitResult lm_minimize(const LMConfig& cfg, Eigen::Matrix<double, Dim, 1> param,
                      const Objective& objective, const BuildSystem& build_system,
                      const Project& project, const Pack& pack) {
  using Vec = Eigen::Matrix<double, Dim, 1>;
  using Mat = Eigen::Matrix<double, Dim, Dim>;

  double sd = objective(param);
  Vec best_param = param;
  double best_sd = sd;

  FitResult result;
  result.sd_history.push_back(sd);
  result.status = FitStatus::MaxIters;

  double lambda = cfg.lambda0;
  double nu = cfg.nu0;
  bool improved = false;
  bool need_system = true;
  Mat jtj;
  Vec jtr;
  int iter = 0;

  while (iter < cfg.max_iters) {
    ++iter;
    if (need_system) {
      jtj.setZero();
      jtr.setZero();
      build_system(param, jtj, jtr);
      need_system = false;
    }

    Mat damped = jtj;
    for (int k = 0; k < Dim; ++k) damped(k, k) += lambda;
    const Eigen::LDLT<Mat> ldlt(damped);
    const Vec delta = ldlt.solve(jtr);
    bool ok = ldlt.info() == Eigen::Success && delta.allFinite();

    Vec cand = param - delta;
    double sdn = std::numeric_limits<double>::infinity();
    if (ok && project(cand)) {
      sdn = objective(cand);
      ok = std::isfinite(sdn);
    } else {
      ok = false;
    }

    if (ok && std::abs(sdn - sd) <= cfg.rel_tol * std::max(sd, DBL_EPSILON)) {
      if (sdn < sd) {
        param = cand;
        sd = sdn;
        result.sd_history.push_back(sd);
        if (sd < best_sd) {
          best_sd = sd;
          best_param = param;
          improved = true;
        }
      }
      result.status = FitStatus::Converged;
      break;
    }

    if (!ok || sdn > sd) {
      lambda *= nu;
      nu = nu * nu;
      if (!std::isfinite(lambda) || lambda > 1e200) {
        if (!ok) throw NumericalFailure("normal equations unsolvable at maximum damping");
        // Steps have collapsed to numerical no-ops; keep the current best.
        result.status = FitStatus::Converged;
        break;
      }
      nu = std::min(nu, 1e200);
    } else {
      lambda /= cfg.gamma;
      nu = cfg.nu0;
      param = cand;
      sd = sdn;
      need_system = true;
      result.sd_history.push_back(sd);
      if (sd < best_sd) {
        best_sd = sd;
        best_param = param;
        improved = true;
      }
    }
  }

  result.iterations = iter;
  result.final_sd = best_sd;
  result.ellipse = pack(best_param);
  if (!improved) result.status = FitStatus::InitialWasOptimal;
  return result;
}

}  // namespace

FitResult fit_confocal_lm(std::span<const Point2> points, const LMConfig& config,
                          const std::optional<GeometricEllipse>& init) {
  validate_config(config);
  if (points.size() < 6) throw InsufficientPoints("ellipse fit needs at least 6 points");

  GeometricEllipse rho0;
  if (init.has_value()) {
    rho0 = canonicalize(*init);
  } else {
    try {
      rho0 = fit_halir(points);
    } catch (const std::runtime_error& e) {
      throw InitializationFailed(std::string("initial estimate failed: ") + e.what());
    }
  }

  using Vec5 = Eigen::Matrix<double, 5, 1>;
  Vec5 q0;
  q0 << rho0.xc, rho0.yc, rho0.a, rho0.b, rho0.theta;

  const auto as_ellipse = [](const Vec5& q) {
    return GeometricEllipse{q(0), q(1), q(2), q(3), q(4)};
  };
  const auto objective = [&](const Vec5& q) {
    const GeometricEllipse rho = as_ellipse(q);
    double s = 0.0;
    for (const Point2& p : points) {
      const double d = confocal_distance(rho, p).norm;
      s += d * d;
    }
    return s;
  };
  const auto build_system = [&](const Vec5& q, Eigen::Matrix<double, 5, 5>& jtj, Vec5& jtr) {
    const GeometricEllipse rho = as_ellipse(q);
    for (const Point2& p : points) {
      const double r = confocal_distance(rho, p).norm;
      const JacobianRow jr = confocal_jacobian(rho, p);
      Vec5 row;
      for (int k = 0; k < 5; ++k) row(k) = jr.d[k];
      jtj += row * row.transpose();
      jtr += row * r;
    }
  };
  const auto project = [](Vec5& q) {
    if (!q.allFinite() || !(q(2) > 0.0) || !(q(3) > 0.0)) return false;
    const GeometricEllipse c = canonicalize(q(0), q(1), q(2), q(3), q(4));
    q << c.xc, c.yc, c.a, c.b, c.theta;
    return true;
  };
  const auto pack = [&](const Vec5& q) { return canonicalize(as_ellipse(q)); };

  return lm_minimize<5>(config, q0, objective, build_system, project, pack);
}

FitResult fit_circle_lm(std::span<const Point2> points, const LMConfig& config) {
  validate_config(config);
  if (points.size() < 3) throw InsufficientPoints("circle fit needs at least 3 points");

  // Closed-form algebraic initializer: least squares on
  // x^2 + y^2 + D x + E y + F = 0 over centered coordinates.
  std::vector<Point2> pts;
  const Normalization nm = normalize_points(points, pts);
  Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  for (const Point2& p : pts) {
    const Eigen::Vector3d l(p.x, p.y, 1.0);
    A += l * l.transpose();
    rhs -= (p.x * p.x + p.y * p.y) * l;
  }
  Eigen::FullPivLU<Eigen::Matrix3d> lu(A);
  lu.setThreshold(1e-10);
  if (!lu.isInvertible()) throw DegenerateInput("points are collinear");
  const Eigen::Vector3d def = lu.solve(rhs);
  const double cx = -def(0) / 2.0;
  const double cy = -def(1) / 2.0;
  const double r2 = cx * cx + cy * cy - def(2);
  if (!(r2 > 0.0)) throw DegenerateInput("degenerate circle initializer");

  using Vec3 = Eigen::Matrix<double, 3, 1>;
  Vec3 q0;
  q0 << nm.mx + nm.s * cx, nm.my + nm.s * cy, nm.s * std::sqrt(r2);

  const auto objective = [&](const Vec3& q) {
    double s = 0.0;
    for (const Point2& p : points) {
      const double r = std::hypot(p.x - q(0), p.y - q(1)) - q(2);
      s += r * r;
    }
    return s;
  };
  const auto build_system = [&](const Vec3& q, Eigen::Matrix3d& jtj, Vec3& jtr) {
    for (const Point2& p : points) {
      const double dx = p.x - q(0);
      const double dy = p.y - q(1);
      const double dist = std::hypot(dx, dy);
      Vec3 row;
      if (dist > 1e-300) {
        row << -dx / dist, -dy / dist, -1.0;
      } else {
        row << 0.0, 0.0, -1.0;  // point at the candidate center
      }
      jtj += row * row.transpose();
      jtr += row * (dist - q(2));
    }
  };
  const auto project = [](Vec3& q) { return q.allFinite() && q(2) > 0.0; };
  const auto pack = [](const Vec3& q) { return canonicalize(q(0), q(1), q(2), q(2), 0.0); };

  return lm_minimize<3>(config, q0, objective, build_system, project, pack);
}

}  // namespace ellipsefit
