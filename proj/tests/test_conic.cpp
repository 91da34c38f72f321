#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "ellipsefit/conic.hpp"
#include "support/reference.hpp"

using namespace ellipsefit;

namespace {

constexpr double kPi = std::numbers::pi;

// Compare two conics up to the common positive scale fixed by normalized().
void check_conic_close(const AlgebraicConic& got, const AlgebraicConic& want, double tol) {
  const AlgebraicConic g = normalized(got);
  const AlgebraicConic w = normalized(want);
  CHECK(g.A == doctest::Approx(w.A).epsilon(tol));
  CHECK(g.B == doctest::Approx(w.B).epsilon(tol));
  CHECK(g.C == doctest::Approx(w.C).epsilon(tol));
  CHECK(g.D == doctest::Approx(w.D).epsilon(tol));
  CHECK(g.E == doctest::Approx(w.E).epsilon(tol));
  CHECK(g.F == doctest::Approx(w.F).epsilon(tol));
}

}  // namespace

TEST_CASE("geometric_to_algebraic on reference shapes") {
  check_conic_close(geometric_to_algebraic({0, 0, 1, 1, 0}), {1, 0, 1, 0, 0, -1}, 1e-14);
  check_conic_close(geometric_to_algebraic({0, 0, 5, 3, 0}),
                    {1.0 / 25.0, 0, 1.0 / 9.0, 0, 0, -1}, 1e-14);
  check_conic_close(geometric_to_algebraic({1, 0, 2, 1, 0}), {1, 0, 4, -2, 0, -3}, 1e-14);
}

TEST_CASE("algebraic_to_geometric on reference shapes") {
  const GeometricEllipse circle = algebraic_to_geometric({1, 0, 1, 0, 0, -4});
  CHECK(circle.xc == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(circle.yc == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(circle.a == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(circle.b == doctest::Approx(2.0).epsilon(1e-14));

  const GeometricEllipse e = algebraic_to_geometric({1.0 / 25.0, 0, 1.0 / 9.0, 0, 0, -1});
  CHECK(e.a == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(e.b == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(e.theta == doctest::Approx(0.0).epsilon(1e-12));

  CHECK_THROWS_AS(algebraic_to_geometric({1, 0, -1, 0, 0, -1}), NotAnEllipse);
}

TEST_CASE("classify_conic") {
  CHECK(classify_conic({1, 0, 1, 0, 0, -1}) == ConicClass::Ellipse);
  CHECK(classify_conic({1, 0, -1, 0, 0, -1}) == ConicClass::Hyperbola);
  CHECK(classify_conic({1, 0, 1, 0, 0, 0}) == ConicClass::Degenerate);  // single point
  CHECK(classify_conic({0, 0, 1, -1, 0, 0}) == ConicClass::Parabola);   // y^2 = x
}

TEST_CASE("classification is invariant under nonzero scaling") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> scale(0.05, 100.0);
  for (int i = 0; i < 200; ++i) {
    const GeometricEllipse rho = testref::random_ellipse(rng);
    const AlgebraicConic tau = geometric_to_algebraic(rho);
    CHECK(classify_conic(tau) == ConicClass::Ellipse);
    for (const double s : {scale(rng), -scale(rng)}) {
      const AlgebraicConic scaled{tau.A * s, tau.B * s, tau.C * s,
                                  tau.D * s, tau.E * s, tau.F * s};
      CHECK(classify_conic(scaled) == ConicClass::Ellipse);
    }
  }
}

TEST_CASE("canonicalize") {
  SUBCASE("axis swap") {
    const GeometricEllipse r = canonicalize(0, 0, 3, 5, 0);
    CHECK(r.a == 5.0);
    CHECK(r.b == 3.0);
    CHECK(r.theta == doctest::Approx(kPi / 2).epsilon(1e-15));
  }
  SUBCASE("theta wraps modulo pi") {
    const GeometricEllipse r = canonicalize(0, 0, 5, 3, 3 * kPi / 2);
    CHECK(r.theta == doctest::Approx(kPi / 2).epsilon(1e-12));
  }
  SUBCASE("already canonical") {
    const GeometricEllipse r = canonicalize(0, 0, 5, 3, 0.1);
    CHECK(r.a == 5.0);
    CHECK(r.b == 3.0);
    CHECK(r.theta == 0.1);
  }
  SUBCASE("invalid axes") {
    CHECK_THROWS_AS(canonicalize(0, 0, -1, 3, 0), InvalidAxes);
    CHECK_THROWS_AS(canonicalize(0, 0, 5, 0, 0), InvalidAxes);
  }
  SUBCASE("circles get theta = 0") {
    const GeometricEllipse r = canonicalize(1, 2, 4, 4, 1.0);
    CHECK(r.theta == 0.0);
  }
}

TEST_CASE("to_ellipse_frame") {
  SUBCASE("identity frame") {
    const EllipseFramePoint q = to_ellipse_frame({0, 0, 5, 3, 0}, {2, 1});
    CHECK(q.X == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(q.Y == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("quarter turn") {
    const EllipseFramePoint q = to_ellipse_frame({1, 3, 15, 10, kPi / 2}, {1, 4});
    CHECK(q.X == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(q.Y == doctest::Approx(0.0).epsilon(1e-14));
  }
  SUBCASE("eighth turn") {
    const EllipseFramePoint q =
        to_ellipse_frame({0, 0, 5, 3, kPi / 4}, {std::numbers::sqrt2, 0});
    CHECK(q.X == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(q.Y == doctest::Approx(-1.0).epsilon(1e-14));
  }
}

TEST_CASE("frame transform is an isometry and inverts exactly") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const GeometricEllipse rho = testref::random_ellipse(rng);
    const Point2 p1 = testref::random_point_near(rng, rho);
    const Point2 p2 = testref::random_point_near(rng, rho);
    const EllipseFramePoint q1 = to_ellipse_frame(rho, p1);
    const EllipseFramePoint q2 = to_ellipse_frame(rho, p2);
    const double dw = std::hypot(p1.x - p2.x, p1.y - p2.y);
    const double df = std::hypot(q1.X - q2.X, q1.Y - q2.Y);
    CHECK(std::abs(dw - df) <= 1e-12 * (1.0 + dw));

    const Point2 back = from_ellipse_frame(rho, q1);
    CHECK(std::abs(back.x - p1.x) <= 1e-9);
    CHECK(std::abs(back.y - p1.y) <= 1e-9);
  }
}

TEST_CASE("roundtrip geometric -> algebraic -> geometric") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 1000; ++i) {
    const GeometricEllipse rho = testref::random_ellipse(rng);
    const GeometricEllipse back = algebraic_to_geometric(geometric_to_algebraic(rho));
    const GeometricEllipse want = canonicalize(rho);
    CHECK(std::abs(back.xc - want.xc) <= 1e-10 * (1.0 + std::abs(want.xc)));
    CHECK(std::abs(back.yc - want.yc) <= 1e-10 * (1.0 + std::abs(want.yc)));
    CHECK(std::abs(back.a - want.a) <= 1e-10 * want.a);
    CHECK(std::abs(back.b - want.b) <= 1e-10 * want.b);
    double dth = std::abs(back.theta - want.theta);
    dth = std::min(dth, kPi - dth);
    CHECK(dth <= 1e-9);
  }
}
