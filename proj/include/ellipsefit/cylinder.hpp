#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "ellipsefit/types.hpp"

namespace ellipsefit {

struct PointCloud {
  std::vector<Eigen::Vector3d> points;  // metres
};

struct CuttingPlane {
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();  // unit length
  Eigen::Vector3d anchor = Eigen::Vector3d::Zero();   // a point on the plane
};

// Canonical: unit axis with axis . hint >= 0, axis_point the foot of the
// perpendicular from the origin onto the axis line.
struct CylinderParams {
  double radius = 0.0;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  Eigen::Vector3d axis_point = Eigen::Vector3d::Zero();
};

// Near-plane slab of cloud points expressed in the plane frame (normal
// rotated onto +z, constant z dropped).
struct SectionSample {
  std::vector<Point2> planar;      // plane-frame xy, metres
  Eigen::Matrix3d rotation;        // takes world normal to (0,0,1)
  CuttingPlane plane;
  double plane_z = 0.0;            // z of the plane in the rotated frame
};

// Whitespace/comma separated "x y z" lines; "#" starts a comment. Throws
// IoError / ParseError.
PointCloud load_point_cloud(const std::string& path);

// Random plane through a random cloud point; keeps the max_points closest
// points within `band` of the plane. Throws InsufficientPoints when fewer
// than 6 points fall in the band.
SectionSample sample_section(const PointCloud& cloud, std::uint64_t seed,
                             double band = 1e-3, int max_points = 50);

// Plane-section inversion: radius = semi-minor, axis tilt = acos(b/a) about
// the in-plane minor-axis direction; the tilt sign is the candidate closest
// to axis_hint, and the ellipse center maps back to the axis/plane
// intersection point.
CylinderParams recover_cylinder(const GeometricEllipse& ellipse, const SectionSample& section,
                                const Eigen::Vector3d& axis_hint);

struct CylinderBenchRow {
  std::string fitter;
  int sections_used = 0;
  int sections_skipped = 0;
  double mean_center_mm = 0.0;
  double mean_radius_mm = 0.0;
  double mean_axis_deg = 0.0;
};

// Fit each sampled section with every named fitter ("halir", "taubin",
// "confocal"), recover the cylinder and accumulate parameter errors against
// the reference. Sections that raise fit errors are counted and skipped.
std::vector<CylinderBenchRow> run_cylinder_benchmark(
    const PointCloud& cloud, const CylinderParams& reference, int n_planes, std::uint64_t seed,
    const std::vector<std::string>& fitters = {"halir", "confocal"}, double band = 1e-3,
    int max_points = 50, unsigned threads = 0);

std::string cylinder_bench_csv(const std::vector<CylinderBenchRow>& rows);

}  // namespace ellipsefit
