#include "ellipsefit/cylinder.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "ellipsefit/conic.hpp"
#include "ellipsefit/fitters.hpp"
#include "ellipsefit/parallel.hpp"
#include "ellipsefit/rng.hpp"

namespace ellipsefit {

namespace {

constexpr double kPi = std::numbers::pi;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

GeometricEllipse fit_section(const std::string& fitter, std::span<const Point2> pts) {
  if (fitter == "halir") return fit_halir(pts);
  if (fitter == "taubin") return algebraic_to_geometric(fit_taubin(pts));
  if (fitter == "confocal") {
    const GeometricEllipse init = fit_halir(pts);
    return fit_confocal_lm(pts, LMConfig{}, init).ellipse;
  }
  throw std::invalid_argument("unknown fitter: " + fitter);
}

}  // namespace

PointCloud load_point_cloud(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open point cloud file: " + path);

  PointCloud cloud;
  std::string line;
  long line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string cleaned;
    cleaned.reserve(line.size());
    for (char ch : line) cleaned.push_back(ch == ',' ? ' ' : ch);
    std::istringstream probe(cleaned);
    std::string first;
    if (!(probe >> first)) continue;
    if (first[0] == '#') continue;
    std::istringstream ss(cleaned);
    double x, y, z;
    std::string extra;
    if (!(ss >> x >> y >> z)) {
      throw ParseError("expected three numeric columns", line_no);
    }
    if (ss >> extra) {
      throw ParseError("unexpected trailing data", line_no);
    }
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
      throw ParseError("non-finite coordinate", line_no);
    }
    cloud.points.emplace_back(x, y, z);
  }
  if (cloud.points.empty()) throw EmptyInput("point cloud contains no points");
  return cloud;
}

SectionSample sample_section(const PointCloud& cloud, std::uint64_t seed, double band,
                             int max_points) {
  if (cloud.points.empty()) throw EmptyInput("point cloud contains no points");
  if (!(band >= 0.0)) throw std::invalid_argument("band must be non-negative");
  if (max_points < 6) throw std::invalid_argument("max_points must be at least 6");

  std::mt19937_64 rng = stream_rng(seed, 0xCE);
  const std::size_t idx =
      std::uniform_int_distribution<std::size_t>(0, cloud.points.size() - 1)(rng);
  const Eigen::Vector3d anchor = cloud.points[idx];

  // Uniform direction on the sphere from a normalized Gaussian draw.
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Vector3d normal;
  do {
    normal = Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
  } while (normal.norm() < 1e-6);
  normal.normalize();

  // The max_points closest points within band of the plane.
  std::vector<std::pair<double, std::size_t>> near;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const double d = std::abs((cloud.points[i] - anchor).dot(normal));
    if (d <= band) near.emplace_back(d, i);
  }
  if (near.size() < 6) {
    throw InsufficientPoints("fewer than 6 points within the plane band");
  }
  std::sort(near.begin(), near.end());
  if (near.size() > static_cast<std::size_t>(max_points)) {
    near.resize(static_cast<std::size_t>(max_points));
  }

  SectionSample out;
  out.plane = {normal, anchor};
  out.rotation =
      Eigen::Quaterniond::FromTwoVectors(normal, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  out.plane_z = (out.rotation * anchor).z();
  out.planar.reserve(near.size());
  for (const auto& [d, i] : near) {
    const Eigen::Vector3d q = out.rotation * cloud.points[i];
    out.planar.push_back({q.x(), q.y()});
  }
  return out;
}

CylinderParams recover_cylinder(const GeometricEllipse& ellipse, const SectionSample& section,
                                const Eigen::Vector3d& axis_hint) {
  const GeometricEllipse rho = canonicalize(ellipse);
  const double ratio = std::clamp(rho.b / rho.a, 0.0, 1.0);
  const double delta = std::acos(ratio);  // axis tilt from the plane normal

  // The minor axis direction in the plane frame, mapped back to the world;
  // the cylinder axis is the plane normal tilted by delta about it (toward
  // the major axis), with the sign resolved by the hint.
  const Eigen::Vector3d minor_pf(-std::sin(rho.theta), std::cos(rho.theta), 0.0);
  const Eigen::Vector3d minor_w = section.rotation.transpose() * minor_pf;
  const Eigen::Vector3d& n = section.plane.normal;
  const Eigen::Vector3d cand1 = Eigen::AngleAxisd(delta, minor_w) * n;
  const Eigen::Vector3d cand2 = Eigen::AngleAxisd(-delta, minor_w) * n;
  Eigen::Vector3d axis =
      std::abs(cand1.dot(axis_hint)) >= std::abs(cand2.dot(axis_hint)) ? cand1 : cand2;
  if (axis.dot(axis_hint) < 0.0) axis = -axis;
  axis.normalize();

  // The ellipse center is the image of the axis/plane intersection point.
  const Eigen::Vector3d center_pf(rho.xc, rho.yc, section.plane_z);
  const Eigen::Vector3d on_axis = section.rotation.transpose() * center_pf;

  CylinderParams out;
  out.radius = rho.b;
  out.axis = axis;
  out.axis_point = on_axis - on_axis.dot(axis) * axis;  // foot point from the origin
  return out;
}

std::vector<CylinderBenchRow> run_cylinder_benchmark(const PointCloud& cloud,
                                                     const CylinderParams& reference,
                                                     int n_planes, std::uint64_t seed,
                                                     const std::vector<std::string>& fitters,
                                                     double band, int max_points,
                                                     unsigned threads) {
  if (n_planes < 1) throw std::invalid_argument("n_planes must be >= 1");
  const std::size_t nf = fitters.size();

  struct SectionOut {
    bool sampled = false;
    std::vector<bool> ok;
    std::vector<double> center_mm, radius_mm, axis_deg;
  };
  std::vector<SectionOut> sections(static_cast<std::size_t>(n_planes));

  const Eigen::Vector3d ref_axis = reference.axis.normalized();
  parallel_for(static_cast<std::size_t>(n_planes), threads, [&](std::size_t k) {
    SectionOut& out = sections[k];
    out.ok.assign(nf, false);
    out.center_mm.assign(nf, 0.0);
    out.radius_mm.assign(nf, 0.0);
    out.axis_deg.assign(nf, 0.0);

    SectionSample sec;
    try {
      sec = sample_section(cloud, stream_seed(seed, k + 1), band, max_points);
    } catch (const InsufficientPoints&) {
      return;
    }
    out.sampled = true;

    for (std::size_t f = 0; f < nf; ++f) {
      GeometricEllipse ellipse;
      try {
        ellipse = fit_section(fitters[f], sec.planar);
      } catch (const std::runtime_error&) {
        continue;  // fit failures are counted, not raised
      }
      const CylinderParams est = recover_cylinder(ellipse, sec, ref_axis);
      out.ok[f] = true;
      out.radius_mm[f] = std::abs(est.radius - reference.radius) * 1000.0;
      const double c = std::clamp(std::abs(est.axis.dot(ref_axis)), 0.0, 1.0);
      out.axis_deg[f] = std::acos(c) * 180.0 / kPi;
      const Eigen::Vector3d v = est.axis_point - reference.axis_point;
      out.center_mm[f] = (v - v.dot(ref_axis) * ref_axis).norm() * 1000.0;
    }
  });

  std::vector<CylinderBenchRow> rows(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    CylinderBenchRow& row = rows[f];
    row.fitter = fitters[f];
    double sc = 0.0, sr = 0.0, sa = 0.0;
    for (const SectionOut& s : sections) {
      if (!s.sampled || !s.ok[f]) {
        ++row.sections_skipped;
        continue;
      }
      ++row.sections_used;
      sc += s.center_mm[f];
      sr += s.radius_mm[f];
      sa += s.axis_deg[f];
    }
    if (row.sections_used > 0) {
      row.mean_center_mm = sc / row.sections_used;
      row.mean_radius_mm = sr / row.sections_used;
      row.mean_axis_deg = sa / row.sections_used;
    }
  }
  return rows;
}

std::string cylinder_bench_csv(const std::vector<CylinderBenchRow>& rows) {
  std::string out =
      "fitter,sections_used,sections_skipped,mean_center_mm,mean_radius_mm,mean_axis_deg\n";
  for (const CylinderBenchRow& r : rows) {
    out += r.fitter + "," + std::to_string(r.sections_used) + "," +
           std::to_string(r.sections_skipped) + "," + format_double(r.mean_center_mm) + "," +
           format_double(r.mean_radius_mm) + "," + format_double(r.mean_axis_deg) + "\n";
  }
  return out;
}

}  // namespace ellipsefit
