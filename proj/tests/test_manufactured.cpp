#include <doctest.h>

#include <cmath>
#include <random>

#include "eddy/errors.hpp"
#include "eddy/manufactured.hpp"

using namespace eddy;

namespace {

using Field = std::function<Vec3(const Point&)>;

// central differences, d[k][i] = d field_i / d x_k
std::array<Vec3, 3> jacobian(const Field& f, const Point& x, double h) {
  std::array<Vec3, 3> d{};
  for (int k = 0; k < 3; ++k) {
    Point xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    const Vec3 fp = f(xp), fm = f(xm);
    for (int i = 0; i < 3; ++i) d[k][i] = (fp[i] - fm[i]) / (2 * h);
  }
  return d;
}

Vec3 fd_curl(const Field& f, const Point& x, double h) {
  const auto d = jacobian(f, x, h);
  return {d[1][2] - d[2][1], d[2][0] - d[0][2], d[0][1] - d[1][0]};
}

std::vector<Point> random_points(int n, unsigned seed, double lo = 0.0, double hi = 1.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Point> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
  return pts;
}

}  // namespace

TEST_CASE("exact A") {
  const Vec3 a = exact_A({0.5, 0.0, 0.0}, 0.0);
  CHECK(a[0] == doctest::Approx(0.479426).epsilon(1e-6));
  CHECK(a[1] == 0.0);
  CHECK(a[2] == 0.0);
  for (const auto& x : random_points(100, 1)) {
    const auto d = jacobian([](const Point& y) { return exact_A(y, 0.3); }, x, 1e-5);
    CHECK(std::abs(d[0][0] + d[1][1] + d[2][2]) <= 1e-8);
    const Vec3 a0 = exact_A(x, 0.2), a1 = exact_A(x, 1.2);
    for (int i = 0; i < 3; ++i) CHECK(a1[i] == doctest::Approx(std::exp(-1.0) * a0[i]).epsilon(1e-13));
  }
}

TEST_CASE("exact B is the curl of A") {
  for (const auto& x : random_points(100, 2)) {
    const Vec3 b = exact_B(x, 0.7);
    const Vec3 c = fd_curl([](const Point& y) { return exact_A(y, 0.7); }, x, 1e-5);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(b[i] - c[i]) <= 1e-8);
    CHECK(b[1] == 0.0);
    const auto d = jacobian([](const Point& y) { return exact_B(y, 0.7); }, x, 1e-5);
    CHECK(std::abs(d[0][0] + d[1][1] + d[2][2]) <= 1e-8);
  }
}

TEST_CASE("exact E on the conductor") {
  for (const auto& x : random_points(100, 3, 0.0, 0.5)) {
    const Vec3 e = exact_E_C(x, 0.4, Region::Conductor), a = exact_A(x, 0.4);
    for (int i = 0; i < 3; ++i) CHECK(e[i] == a[i]);
    const double dt = 1e-4;
    const Vec3 ap = exact_A(x, 0.4 + dt), am = exact_A(x, 0.4 - dt);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(e[i] + (ap[i] - am[i]) / (2 * dt)) <= 1e-8);
  }
  const Vec3 e = exact_E_C({0.25, 0.25, 0.25}, 0.0, Region::Conductor), a = exact_A({0.25, 0.25, 0.25}, 0.0);
  CHECK(e == a);
  CHECK_THROWS_AS(exact_E_C({0.75, 0.5, 0.5}, 0.0, Region::Insulator), UsageError);
}

TEST_CASE("source J satisfies the potential equation") {
  const CaseConfig cfg;
  for (const auto& x : random_points(20, 4)) {
    const double t = 0.35;
    const Vec3 a = exact_A(x, t);
    const Vec3 jc = source_J(x, t, Region::Conductor, cfg), ji = source_J(x, t, Region::Insulator, cfg);
    for (int i = 0; i < 3; ++i) {
      CHECK(jc[i] == doctest::Approx(2.0 * a[i]).epsilon(1e-14));
      CHECK(ji[i] == doctest::Approx(3.0 * a[i]).epsilon(1e-14));
    }
    // curl(nu curl A) by nested differences of exact_B, independent of the closed form for J
    const Vec3 cc = fd_curl([t](const Point& y) { return exact_B(y, t); }, x, 1e-4);
    const double dt = 1e-5;
    const Vec3 ap = exact_A(x, t + dt), am = exact_A(x, t - dt);
    for (int i = 0; i < 3; ++i) {
      const double dadt = (ap[i] - am[i]) / (2 * dt);
      CHECK(std::abs(cfg.nu * cc[i] + cfg.sigma * dadt - jc[i]) <= 1e-6);
      CHECK(std::abs(cfg.nu * cc[i] - ji[i]) <= 1e-6);
    }
  }
}

TEST_CASE("time separability and sampler") {
  CaseConfig cfg;
  cfg.nu = 2.0;
  cfg.sigma = 0.5;
  const auto src = source_sampler(Region::Conductor, cfg);
  for (const auto& x : random_points(10, 5)) {
    const Vec3 b0 = exact_B(x, 0.0), b1 = exact_B(x, 0.6);
    for (int i = 0; i < 3; ++i) CHECK(b1[i] == doctest::Approx(std::exp(-0.6) * b0[i]).epsilon(1e-13));
    const Vec3 j = src(x, 0.6), a = exact_A(x, 0.6);
    for (int i = 0; i < 3; ++i) CHECK(j[i] == doctest::Approx((3.0 * 2.0 - 0.5) * a[i]).epsilon(1e-14));
  }
}

TEST_CASE("case configuration validation") {
  CaseConfig c;
  CHECK_NOTHROW(c.validate());
  c.sigma = 0.0;
  CHECK_THROWS_AS(c.validate(), InputError);
  c = CaseConfig{};
  c.final_time = -1.0;
  CHECK_THROWS_AS(c.validate(), InputError);
}
