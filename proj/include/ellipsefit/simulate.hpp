#pragma once

#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "ellipsefit/fitters.hpp"
#include "ellipsefit/types.hpp"

namespace ellipsefit {

// Pixel-accurate elliptical edge point generation: ellipse in pixel units,
// spanning arc [arc_start, arc_end] in parametric angle, i.i.d. Gaussian
// measurement error of sigma pixels on each contact coordinate.
struct SimConfig {
  GeometricEllipse rho;
  double arc_start = 0.0;
  double arc_end = 2.0 * std::numbers::pi;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

struct PixelRect {
  long x_min = 0, x_max = 0, y_min = 0, y_max = 0;
};

// One aggregated statistics row of a benchmark run.
struct BenchmarkRecord {
  std::string suite;   // e.g. "bench-distance", "bench-fit-noise"
  std::string param;   // varied parameter name + value, e.g. "sigma=2.25"
  std::string method;  // e.g. "confocal"
  std::size_t n = 0;   // sample count behind the statistics
  double mean = 0.0;
  double median = 0.0;
  double p95 = 0.0;
};

// Integer bounds of the orthogonal circumscribed rectangle.
PixelRect circumscribed_rect(const GeometricEllipse& rho);

// Grid pixels whose orthogonal contact lies within half a pixel in both
// axes, filtered to the requested arc, noise-perturbed, re-rounded to the
// pixel grid and deduplicated. Deterministic for a given config.
// Throws EmptyResult when no pixel survives.
std::vector<Point2> rasterize_ellipse(const SimConfig& config);

// Root mean square of exact geometric distances from the points to the
// ellipse. Throws EmptyInput.
double rmse(const GeometricEllipse& rho, std::span<const Point2> points);

// 100 * |rho_est - rho_truth| / |rho_truth| after canonicalizing both sides;
// the angular residual is the shortest distance modulo pi.
double p_error(const GeometricEllipse& est, const GeometricEllipse& truth);

// Distance-measure benchmark: random quarter-arc ellipses (aspect 1.5-4,
// sigma 0.5-15 px, semi-minor 50 px), absolute deviation of each measure
// from the projection oracle. Returns one record per measure.
std::vector<BenchmarkRecord> run_distance_benchmark(int n_ellipses, std::uint64_t seed,
                                                    unsigned threads = 0);

enum class FitSuite { Overall, Rotation, Aspect, Noise, Arc };

// Fitting benchmarks. Overall draws n_configs random configurations
// (aspect 1.5-4, sigma 0.5-5 px, semi-minor 10-100 px, arc in {2pi, 3pi/2,
// pi}) and reports P-Error and RMSE per fitter plus iteration counts for the
// LM fit; the parameter sweeps hold the base configuration (theta = pi/4,
// aspect 2, sigma = 2 px, semi-minor 50 px, full arc) and vary one parameter,
// reporting P-Error per grid point. repeats is the number of noise
// realizations per configuration; n_configs is ignored by the sweeps.
std::vector<BenchmarkRecord> run_fit_benchmark(FitSuite suite, int n_configs, int repeats,
                                               std::uint64_t seed, unsigned threads = 0,
                                               const LMConfig& lm = {});

// --- serialization ----------------------------------------------------------

std::string benchmark_csv(std::span<const BenchmarkRecord> records);
std::string benchmark_json(std::span<const BenchmarkRecord> records);

// Two-column decimal point list with a "#" header carrying the SimConfig.
void write_points_text(std::ostream& os, const SimConfig& config,
                       std::span<const Point2> points);
// Reads two-column points; "#" lines and blank lines are skipped; fields may
// be separated by whitespace or commas. Throws ParseError with line number.
std::vector<Point2> read_points_text(std::istream& is);

const char* fit_suite_name(FitSuite suite);

}  // namespace ellipsefit
