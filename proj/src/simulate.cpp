#include "ellipsefit/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include "ellipsefit/conic.hpp"
#include "ellipsefit/distance.hpp"
#include "ellipsefit/parallel.hpp"
#include "ellipsefit/rng.hpp"
#include "ellipsefit/stats.hpp"

#include "json.hpp"

namespace ellipsefit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Pixels farther than this from the ellipse cannot pass the half-pixel
// filter (the confocal contact lies on the ellipse, so the confocal norm
// upper-bounds the geometric distance by construction and tracks it to well
// under a pixel near the curve); skipping them avoids projecting the bulk of
// the grid.
constexpr double kPrefilterBand = 3.0;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_param(const char* name, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s=%.9g", name, v);
  return buf;
}

bool angle_in_arc(double phi, double start, double end) {
  double d = std::fmod(phi - start, kTwoPi);
  if (d < 0.0) d += kTwoPi;
  return d <= (end - start) + 1e-12;
}

void validate_sim_config(const SimConfig& cfg) {
  if (!(cfg.rho.a > 0.0) || !(cfg.rho.b > 0.0)) {
    throw std::invalid_argument("simulation ellipse axes must be positive");
  }
  if (!(cfg.arc_start < cfg.arc_end) || !(cfg.arc_end <= cfg.arc_start + kTwoPi + 1e-12)) {
    throw std::invalid_argument("arc must satisfy start < end <= start + 2*pi");
  }
  if (!(cfg.sigma >= 0.0) || !std::isfinite(cfg.sigma)) {
    throw std::invalid_argument("sigma must be finite and non-negative");
  }
}

BenchmarkRecord make_record(std::string suite, std::string param, std::string method,
                            std::vector<double> samples) {
  const SummaryStats st = summarize(std::move(samples));
  return {std::move(suite), std::move(param), std::move(method), st.n, st.mean, st.median,
          st.p95};
}

}  // namespace

PixelRect circumscribed_rect(const GeometricEllipse& rho) {
  const double c = std::cos(rho.theta);
  const double s = std::sin(rho.theta);
  const double a2 = rho.a * rho.a;
  const double b2 = rho.b * rho.b;
  const double hx = std::sqrt(a2 * c * c + b2 * s * s);
  const double hy = std::sqrt(b2 * c * c + a2 * s * s);
  PixelRect r;
  r.x_min = static_cast<long>(std::floor(rho.xc - hx));
  r.x_max = static_cast<long>(std::ceil(rho.xc + hx));
  r.y_min = static_cast<long>(std::floor(rho.yc - hy));
  r.y_max = static_cast<long>(std::ceil(rho.yc + hy));
  return r;
}

std::vector<Point2> rasterize_ellipse(const SimConfig& config) {
  validate_sim_config(config);
  const GeometricEllipse& rho = config.rho;
  const PixelRect rect = circumscribed_rect(rho);

  // Contacts of the grid pixels that pass the half-pixel and arc filters,
  // collected in fixed row-major order.
  std::vector<Point2> contacts;
  for (long py = rect.y_min; py <= rect.y_max; ++py) {
    for (long px = rect.x_min; px <= rect.x_max; ++px) {
      const Point2 p{static_cast<double>(px), static_cast<double>(py)};
      if (confocal_distance(rho, p).norm > kPrefilterBand) continue;
      const ProjectionResult pr = project_point_oracle(rho, p);
      const Point2 w = from_ellipse_frame(rho, {pr.contact.x, pr.contact.y});
      if (std::abs(w.x - p.x) > 0.5 || std::abs(w.y - p.y) > 0.5) continue;
      const double phi = std::atan2(pr.contact.y / rho.b, pr.contact.x / rho.a);
      if (!angle_in_arc(phi, config.arc_start, config.arc_end)) continue;
      contacts.push_back(w);
    }
  }

  std::mt19937_64 rng = stream_rng(config.seed);
  std::normal_distribution<double> noise(0.0, config.sigma > 0.0 ? config.sigma : 1.0);

  std::set<std::pair<long, long>> seen;
  std::vector<Point2> pixels;
  for (const Point2& w : contacts) {
    double x = w.x, y = w.y;
    if (config.sigma > 0.0) {
      x += noise(rng);
      y += noise(rng);
    }
    const long nx = std::llround(x);
    const long ny = std::llround(y);
    if (seen.emplace(nx, ny).second) {
      pixels.push_back({static_cast<double>(nx), static_cast<double>(ny)});
    }
  }
  if (pixels.empty()) throw EmptyResult("no pixel survives the rasterization filters");
  return pixels;
}

double rmse(const GeometricEllipse& rho, std::span<const Point2> points) {
  if (points.empty()) throw EmptyInput("rmse needs at least one point");
  double s = 0.0;
  for (const Point2& p : points) {
    const double d = project_point_oracle(rho, p).distance;
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(points.size()));
}

double p_error(const GeometricEllipse& est, const GeometricEllipse& truth) {
  const GeometricEllipse e = canonicalize(est);
  const GeometricEllipse t = canonicalize(truth);
  double dth = std::abs(e.theta - t.theta);
  dth = std::min(dth, kPi - dth);  // theta is pi-periodic
  const double num = std::sqrt((e.xc - t.xc) * (e.xc - t.xc) + (e.yc - t.yc) * (e.yc - t.yc) +
                               (e.a - t.a) * (e.a - t.a) + (e.b - t.b) * (e.b - t.b) +
                               dth * dth);
  const double den = std::sqrt(t.xc * t.xc + t.yc * t.yc + t.a * t.a + t.b * t.b +
                               t.theta * t.theta);
  return 100.0 * num / den;
}

std::vector<BenchmarkRecord> run_distance_benchmark(int n_ellipses, std::uint64_t seed,
                                                    unsigned threads) {
  if (n_ellipses < 1) throw std::invalid_argument("n_ellipses must be >= 1");

  struct TrialSamples {
    std::vector<double> alg, samp, conf;
  };
  std::vector<TrialSamples> trials(static_cast<std::size_t>(n_ellipses));

  parallel_for(static_cast<std::size_t>(n_ellipses), threads, [&](std::size_t i) {
    std::mt19937_64 rng = stream_rng(seed, i, 0x01);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double theta = u01(rng) * kPi;
    const double aspect = 1.5 + u01(rng) * 2.5;
    const double sigma = 0.5 + u01(rng) * 14.5;
    const double arc_start = u01(rng) * kTwoPi;
    const GeometricEllipse rho = canonicalize(0.0, 0.0, 50.0 * aspect, 50.0, theta);

    SimConfig cfg;
    cfg.rho = rho;
    cfg.arc_start = arc_start;
    cfg.arc_end = arc_start + kPi / 2.0;  // quarter ellipse
    cfg.sigma = sigma;
    cfg.seed = stream_seed(seed, i, 0x02);

    std::vector<Point2> pts;
    try {
      pts = rasterize_ellipse(cfg);
    } catch (const EmptyResult&) {
      return;
    }

    const AlgebraicConic tau = geometric_to_algebraic(rho);
    TrialSamples& out = trials[i];
    for (const Point2& p : pts) {
      const double truth = project_point_oracle(rho, p).distance;
      out.alg.push_back(std::abs(std::abs(algebraic_distance(tau, p)) - truth));
      if (const auto sd = sampson_distance(tau, p)) {
        out.samp.push_back(std::abs(std::abs(*sd) - truth));
      }
      out.conf.push_back(std::abs(confocal_distance(rho, p).norm - truth));
    }
  });

  std::vector<double> alg, samp, conf;
  for (const TrialSamples& t : trials) {
    alg.insert(alg.end(), t.alg.begin(), t.alg.end());
    samp.insert(samp.end(), t.samp.begin(), t.samp.end());
    conf.insert(conf.end(), t.conf.begin(), t.conf.end());
  }

  const std::string param = format_param("n_ellipses", n_ellipses);
  std::vector<BenchmarkRecord> records;
  records.push_back(make_record("bench-distance", param, "algebraic", std::move(alg)));
  records.push_back(make_record("bench-distance", param, "sampson", std::move(samp)));
  records.push_back(make_record("bench-distance", param, "confocal", std::move(conf)));
  return records;
}

namespace {

constexpr int kNumFitters = 3;
const char* const kFitterNames[kNumFitters] = {"halir", "taubin", "confocal_lm"};

struct TrialResult {
  bool ok[kNumFitters] = {false, false, false};
  double perr[kNumFitters] = {0.0, 0.0, 0.0};
  double rms[kNumFitters] = {0.0, 0.0, 0.0};
  double iterations = 0.0;
};

TrialResult run_fit_trial(const GeometricEllipse& truth, double arc_start, double arc_end,
                          double sigma, std::uint64_t trial_seed, const LMConfig& lm,
                          bool want_rmse) {
  TrialResult out;
  SimConfig cfg{truth, arc_start, arc_end, sigma, trial_seed};
  std::vector<Point2> pts;
  try {
    pts = rasterize_ellipse(cfg);
  } catch (const EmptyResult&) {
    return out;
  }
  if (pts.size() < 6) return out;

  GeometricEllipse fits[kNumFitters];
  try {
    fits[0] = fit_halir(pts);
    out.ok[0] = true;
  } catch (const std::runtime_error&) {
  }
  try {
    fits[1] = algebraic_to_geometric(fit_taubin(pts));
    out.ok[1] = true;
  } catch (const std::runtime_error&) {
  }
  if (out.ok[0]) {  // the LM fit shares the direct-fit initializer
    try {
      const FitResult fr = fit_confocal_lm(pts, lm, fits[0]);
      fits[2] = fr.ellipse;
      out.iterations = fr.iterations;
      out.ok[2] = true;
    } catch (const std::runtime_error&) {
    }
  }

  for (int k = 0; k < kNumFitters; ++k) {
    if (!out.ok[k]) continue;
    out.perr[k] = p_error(fits[k], truth);
    if (want_rmse) out.rms[k] = rmse(fits[k], pts);
  }
  return out;
}

std::vector<BenchmarkRecord> run_overall_benchmark(int n_configs, int repeats,
                                                   std::uint64_t seed, unsigned threads,
                                                   const LMConfig& lm) {
  struct Config {
    GeometricEllipse truth;
    double arc_start, arc_end, sigma;
  };
  std::vector<Config> configs(static_cast<std::size_t>(n_configs));
  for (int c = 0; c < n_configs; ++c) {
    std::mt19937_64 rng = stream_rng(seed, static_cast<std::uint64_t>(c), 0xA0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double theta = u01(rng) * kPi;
    const double aspect = 1.5 + u01(rng) * 2.5;
    const double sigma = 0.5 + u01(rng) * 4.5;
    const double b = 10.0 + u01(rng) * 90.0;
    const int arc_pick = std::uniform_int_distribution<int>(0, 2)(rng);
    const double arc = arc_pick == 0 ? kTwoPi : (arc_pick == 1 ? 1.5 * kPi : kPi);
    const double arc_start = u01(rng) * kTwoPi;
    configs[c] = {canonicalize(0.0, 0.0, aspect * b, b, theta), arc_start, arc_start + arc,
                  sigma};
  }

  const std::size_t total = static_cast<std::size_t>(n_configs) * static_cast<std::size_t>(repeats);
  std::vector<TrialResult> results(total);
  parallel_for(total, threads, [&](std::size_t i) {
    const std::size_t c = i / static_cast<std::size_t>(repeats);
    const std::size_t r = i % static_cast<std::size_t>(repeats);
    const Config& cf = configs[c];
    results[i] = run_fit_trial(cf.truth, cf.arc_start, cf.arc_end, cf.sigma,
                               stream_seed(seed, c, r + 1), lm, /*want_rmse=*/true);
  });

  std::vector<BenchmarkRecord> records;
  const std::string param = format_param("n_configs", n_configs);
  for (int k = 0; k < kNumFitters; ++k) {
    std::vector<double> perr, rms;
    for (const TrialResult& t : results) {
      if (!t.ok[k]) continue;
      perr.push_back(t.perr[k]);
      rms.push_back(t.rms[k]);
    }
    records.push_back(make_record("bench-fit-overall", param + ",metric=p_error",
                                  kFitterNames[k], std::move(perr)));
    records.push_back(make_record("bench-fit-overall", param + ",metric=rmse",
                                  kFitterNames[k], std::move(rms)));
  }
  std::vector<double> iters;
  for (const TrialResult& t : results) {
    if (t.ok[2]) iters.push_back(t.iterations);
  }
  records.push_back(make_record("bench-fit-overall", param + ",metric=iterations",
                                "confocal_lm", std::move(iters)));
  return records;
}

std::vector<BenchmarkRecord> run_sweep_benchmark(FitSuite suite, int repeats,
                                                 std::uint64_t seed, unsigned threads,
                                                 const LMConfig& lm) {
  // Base configuration: theta = pi/4, aspect 2, sigma = 2 px, semi-minor
  // 50 px, full arc; one parameter varied per suite.
  constexpr double kBaseTheta = kPi / 4.0;
  constexpr double kBaseAspect = 2.0;
  constexpr double kBaseSigma = 2.0;
  constexpr double kBaseB = 50.0;

  const char* param_name = "";
  std::vector<double> grid;
  switch (suite) {
    case FitSuite::Rotation:
      param_name = "theta";
      for (int k = 0; k <= 20; ++k) grid.push_back(k * kPi / 20.0);
      break;
    case FitSuite::Aspect:
      param_name = "aspect";
      for (int k = 0; k <= 20; ++k) grid.push_back(1.0 + k * 3.0 / 20.0);
      break;
    case FitSuite::Noise:
      param_name = "sigma";
      for (int k = 0; k <= 20; ++k) grid.push_back(k * 0.25);
      break;
    case FitSuite::Arc:
      param_name = "arc";
      for (int k = 0; k <= 20; ++k) grid.push_back(kPi / 2.0 + k * 3.0 * kPi / 40.0);
      break;
    case FitSuite::Overall:
      throw std::logic_error("overall suite is not a sweep");
  }

  const std::string suite_name = fit_suite_name(suite);
  const std::size_t total = grid.size() * static_cast<std::size_t>(repeats);
  std::vector<TrialResult> results(total);
  parallel_for(total, threads, [&](std::size_t i) {
    const std::size_t g = i / static_cast<std::size_t>(repeats);
    const std::size_t r = i % static_cast<std::size_t>(repeats);
    const double value = grid[g];

    double theta = kBaseTheta, aspect = kBaseAspect, sigma = kBaseSigma, arc = kTwoPi;
    switch (suite) {
      case FitSuite::Rotation: theta = value; break;
      case FitSuite::Aspect: aspect = value; break;
      case FitSuite::Noise: sigma = value; break;
      case FitSuite::Arc: arc = value; break;
      case FitSuite::Overall: break;
    }
    const GeometricEllipse truth = canonicalize(0.0, 0.0, aspect * kBaseB, kBaseB, theta);

    // Partial arcs get a random placement so the statistics average over
    // easy and hard sections of the ellipse.
    double arc_start = 0.0;
    if (arc < kTwoPi - 1e-12) {
      std::mt19937_64 rng = stream_rng(seed, g, r, 0xB1);
      arc_start = std::uniform_real_distribution<double>(0.0, kTwoPi)(rng);
    }
    results[i] = run_fit_trial(truth, arc_start, arc_start + arc, sigma,
                               stream_seed(seed, g, r, 0xB2), lm, /*want_rmse=*/false);
  });

  std::vector<BenchmarkRecord> records;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (int k = 0; k < kNumFitters; ++k) {
      std::vector<double> perr;
      for (int r = 0; r < repeats; ++r) {
        const TrialResult& t = results[g * static_cast<std::size_t>(repeats) +
                                       static_cast<std::size_t>(r)];
        if (t.ok[k]) perr.push_back(t.perr[k]);
      }
      records.push_back(make_record(suite_name, format_param(param_name, grid[g]),
                                    kFitterNames[k], std::move(perr)));
    }
  }
  return records;
}

}  // namespace

std::vector<BenchmarkRecord> run_fit_benchmark(FitSuite suite, int n_configs, int repeats,
                                               std::uint64_t seed, unsigned threads,
                                               const LMConfig& lm) {
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  if (suite == FitSuite::Overall) {
    if (n_configs < 1) throw std::invalid_argument("n_configs must be >= 1");
    return run_overall_benchmark(n_configs, repeats, seed, threads, lm);
  }
  return run_sweep_benchmark(suite, repeats, seed, threads, lm);
}

const char* fit_suite_name(FitSuite suite) {
  switch (suite) {
    case FitSuite::Overall: return "bench-fit-overall";
    case FitSuite::Rotation: return "bench-fit-rotation";
    case FitSuite::Aspect: return "bench-fit-aspect";
    case FitSuite::Noise: return "bench-fit-noise";
    case FitSuite::Arc: return "bench-fit-arc";
  }
  return "bench-fit";
}

std::string benchmark_csv(std::span<const BenchmarkRecord> records) {
  std::string out = "suite,param,method,n,mean,median,p95\n";
  for (const BenchmarkRecord& r : records) {
    out += r.suite + "," + r.param + "," + r.method + "," + std::to_string(r.n) + "," +
           format_double(r.mean) + "," + format_double(r.median) + "," +
           format_double(r.p95) + "\n";
  }
  return out;
}

std::string benchmark_json(std::span<const BenchmarkRecord> records) {
  nlohmann::json doc;
  doc["schema"] = 1;
  nlohmann::json arr = nlohmann::json::array();
  for (const BenchmarkRecord& r : records) {
    arr.push_back({{"suite", r.suite},
                   {"param", r.param},
                   {"method", r.method},
                   {"n", r.n},
                   {"mean", r.mean},
                   {"median", r.median},
                   {"p95", r.p95}});
  }
  doc["records"] = std::move(arr);
  return doc.dump(2) + "\n";
}

void write_points_text(std::ostream& os, const SimConfig& config,
                       std::span<const Point2> points) {
  os << "# simulated ellipse points\n";
  os << "# rho " << format_double(config.rho.xc) << " " << format_double(config.rho.yc) << " "
     << format_double(config.rho.a) << " " << format_double(config.rho.b) << " "
     << format_double(config.rho.theta) << "\n";
  os << "# arc " << format_double(config.arc_start) << " " << format_double(config.arc_end)
     << "\n";
  os << "# sigma " << format_double(config.sigma) << "\n";
  os << "# seed " << config.seed << "\n";
  for (const Point2& p : points) {
    os << format_double(p.x) << " " << format_double(p.y) << "\n";
  }
}

std::vector<Point2> read_points_text(std::istream& is) {
  std::vector<Point2> pts;
  std::string line;
  long line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string cleaned;
    cleaned.reserve(line.size());
    for (char ch : line) cleaned.push_back(ch == ',' ? ' ' : ch);
    std::istringstream ss(cleaned);
    std::string first;
    if (!(ss >> first)) continue;  // blank line
    if (first[0] == '#') continue;
    double x, y;
    std::istringstream ps(cleaned);
    std::string extra;
    if (!(ps >> x >> y)) {
      throw ParseError("expected two numeric columns", line_no);
    }
    if (ps >> extra) {
      throw ParseError("unexpected trailing data", line_no);
    }
    if (!std::isfinite(x) || !std::isfinite(y)) {
      throw ParseError("non-finite coordinate", line_no);
    }
    pts.push_back({x, y});
  }
  return pts;
}

}  // namespace ellipsefit
