#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "oscavg/core.hpp"
#include "oscavg/models.hpp"

using namespace oscavg;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TEST_CASE("l1 norm: pinned values") {
  const std::vector<double> empty;
  const std::vector<double> v{1.0, -2.0, 3.0};
  const std::vector<double> w{-0.5};
  CHECK(l1_norm(empty) == 0.0);
  CHECK(l1_norm(v) == 6.0);
  CHECK(l1_norm(w) == 0.5);
}

TEST_CASE("l1 norm: triangle inequality and homogeneity on random data") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-10.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(5), b(5), sum(5), scaled(5);
    for (int i = 0; i < 5; ++i) {
      a[i] = dist(rng);
      b[i] = dist(rng);
      sum[i] = a[i] + b[i];
    }
    CHECK(l1_norm(sum) <= l1_norm(a) + l1_norm(b) + 1e-12);
    const double c = dist(rng);
    for (int i = 0; i < 5; ++i) scaled[i] = c * a[i];
    CHECK(l1_norm(scaled) == doctest::Approx(std::fabs(c) * l1_norm(a)).epsilon(1e-12));
    CHECK(l1_distance(a, b) == l1_norm(std::vector<double>{a[0] - b[0], a[1] - b[1], a[2] - b[2],
                                                           a[3] - b[3], a[4] - b[4]}));
  }
}

TEST_CASE("l1 distance: length mismatch throws") {
  const std::vector<double> a{1.0, 2.0};
  const std::vector<double> b{1.0};
  CHECK_THROWS_AS((void)l1_distance(a, b), RangeError);
}

TEST_CASE("full rhs: block structure") {
  // f1 feeds only dx, f2 feeds only dH, and both scale with H as H^1 / H^2.
  OscillatoryModel m;
  m.name = "probe";
  m.dimension = 2;
  m.period = kTwoPi;

  SUBCASE("pure f1") {
    m.f1 = [](std::span<const double>, double, std::span<double> out) {
      out[0] = 2.0;
      out[1] = -1.0;
    };
    m.f2 = [](std::span<const double>, double) { return 0.0; };
    const SystemState s{1.5, 0.25, {0.1, 0.2}};
    const FullRhs r = eval_full_rhs(m, s);
    CHECK(r.dH == 0.0);
    CHECK(r.dx[0] == 0.25 * 2.0);
    CHECK(r.dx[1] == 0.25 * -1.0);
  }

  SUBCASE("pure f2") {
    m.f1 = [](std::span<const double>, double, std::span<double> out) {
      out[0] = 0.0;
      out[1] = 0.0;
    };
    m.f2 = [](std::span<const double>, double) { return 3.5; };
    const SystemState s{0.0, 0.25, {0.1, 0.2}};
    const FullRhs r = eval_full_rhs(m, s);
    CHECK(r.dH == 0.25 * 0.25 * 3.5);
    CHECK(r.dx[0] == 0.0);
    CHECK(r.dx[1] == 0.0);
  }
}

TEST_CASE("full rhs: zero model is identically zero") {
  const OscillatoryModel m = make_zero_model(3);
  const FullRhs r = eval_full_rhs(m, {2.0, 0.7, {0.3, -0.4, 0.5}});
  CHECK(r.dH == 0.0);
  for (double v : r.dx) CHECK(v == 0.0);
}

TEST_CASE("full rhs: near-vacuum anisotropy limit") {
  // As Omega -> 0 at Sigma = 0 the Sigma equation tends to dSigma = H.
  const OscillatoryModel m = make_bianchi3_model();
  const double H = 0.7;
  const SystemState s{0.0, H, {0.0, 1e-13, 0.0}};
  const FullRhs r = eval_full_rhs(m, s);
  CHECK(r.dx[0] / H == doctest::Approx(1.0).epsilon(1e-12));
  // dH = -H^2 (1 + q) with q = 2e-13 here.
  CHECK(r.dH == doctest::Approx(-H * H).epsilon(1e-12));
}

TEST_CASE("full rhs: constant-drive oscillator has dH identically zero") {
  const OscillatoryModel m = make_vdp_model();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> rd(0.1, 1.9), pd(-3.0, 3.0), td(0.0, 20.0);
  for (int i = 0; i < 50; ++i) {
    const FullRhs r = eval_full_rhs(m, {td(rng), 0.3, {rd(rng), pd(rng)}});
    CHECK(r.dH == 0.0);
  }
}

TEST_CASE("full rhs: dimension mismatch throws") {
  const OscillatoryModel m = make_bianchi3_model();
  CHECK_THROWS_AS((void)eval_full_rhs(m, {0.0, 1.0, {0.1, 0.2}}), RangeError);
}

TEST_CASE("full rhs: inadmissible state throws") {
  const OscillatoryModel m = make_bianchi3_model();
  CHECK_THROWS_AS((void)eval_full_rhs(m, {0.0, 1.0, {0.0, 0.0, 0.0}}), AdmissibilityError);
}

TEST_CASE("full rhs: non-finite component is reported") {
  OscillatoryModel m;
  m.name = "nanprobe";
  m.dimension = 1;
  m.period = kTwoPi;
  m.f1 = [](std::span<const double>, double, std::span<double> out) {
    out[0] = std::numeric_limits<double>::quiet_NaN();
  };
  m.f2 = [](std::span<const double>, double) { return 0.0; };
  CHECK_THROWS_AS((void)eval_full_rhs(m, {0.0, 1.0, {0.0}}), EvaluationError);
}

TEST_CASE("trajectory: nodes are reproduced bitwise") {
  Trajectory traj(3);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  std::vector<std::vector<double>> ys, ds;
  std::vector<double> ts;
  double t = 0.3;
  for (int i = 0; i < 20; ++i) {
    std::vector<double> y(3), d(3);
    for (auto& v : y) v = dist(rng);
    for (auto& v : d) v = dist(rng);
    traj.push_back(t, y, d);
    ts.push_back(t);
    ys.push_back(y);
    ds.push_back(d);
    t += 0.1 + 0.05 * std::fabs(dist(rng));
  }
  std::vector<double> out(3);
  for (int i = 0; i < 20; ++i) {
    traj.interpolate(ts[i], out);
    for (int c = 0; c < 3; ++c) CHECK(out[c] == ys[i][c]);
    for (int c = 0; c < 3; ++c) CHECK(traj.interpolate_component(ts[i], c) == ys[i][c]);
  }
  const SystemState s0 = sample_at(traj, traj.front_time());
  CHECK(s0.H == ys[0][0]);
  CHECK(s0.x[0] == ys[0][1]);
  CHECK(s0.x[1] == ys[0][2]);
}

TEST_CASE("trajectory: constant data stays constant between nodes") {
  Trajectory traj(2);
  const std::vector<double> y{1.75, -0.625};
  const std::vector<double> d{0.0, 0.0};
  traj.push_back(0.0, y, d);
  traj.push_back(1.0, y, d);
  std::vector<double> out(2);
  for (double t : {0.1, 0.37, 0.5, 0.93}) {
    traj.interpolate(t, out);
    CHECK(out[0] == doctest::Approx(y[0]).epsilon(1e-15));
    CHECK(out[1] == doctest::Approx(y[1]).epsilon(1e-15));
  }
}

TEST_CASE("trajectory: linear data is interpolated exactly") {
  // y = a + b t with matching derivative b is in the cubic Hermite space.
  const double a = 0.4, b = -1.3;
  Trajectory traj(1);
  const std::vector<double> d{b};
  for (double t : {0.0, 0.8, 1.7}) {
    const std::vector<double> y{a + b * t};
    traj.push_back(t, y, d);
  }
  for (double t : {0.2, 0.4, 1.1, 1.55}) {
    CHECK(traj.interpolate_component(t, 0) == doctest::Approx(a + b * t).epsilon(1e-13));
  }
}

TEST_CASE("trajectory: sample times must strictly increase") {
  Trajectory traj(1);
  const std::vector<double> y{1.0}, d{0.0};
  traj.push_back(0.0, y, d);
  CHECK_THROWS_AS(traj.push_back(0.0, y, d), RangeError);
  CHECK_THROWS_AS(traj.push_back(-0.5, y, d), RangeError);
}

TEST_CASE("trajectory: queries outside the stored range throw") {
  Trajectory traj(1);
  const std::vector<double> y{1.0}, d{0.0};
  traj.push_back(0.0, y, d);
  traj.push_back(1.0, y, d);
  std::vector<double> out(1);
  CHECK_THROWS_AS(traj.interpolate(-0.1, out), RangeError);
  CHECK_THROWS_AS(traj.interpolate(1.1, out), RangeError);
  CHECK_THROWS_AS((void)Trajectory(0), RangeError);
}

TEST_CASE("built-in fields are periodic in t") {
  const OscillatoryModel vdp = make_vdp_model();
  const OscillatoryModel b3 = make_bianchi3_model();
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> td(-15.0, 15.0);
  std::uniform_real_distribution<double> rd(0.1, 1.9), pd(-3.0, 3.0);
  std::uniform_real_distribution<double> sd(-0.5, 0.5), od(0.05, 0.45);
  for (int i = 0; i < 100; ++i) {
    const double t = td(rng);
    {
      const std::vector<double> x{rd(rng), pd(rng)};
      std::vector<double> f0(2), f1v(2);
      vdp.f1(x, t, f0);
      vdp.f1(x, t + vdp.period, f1v);
      CHECK(l1_distance(f0, f1v) <= 1e-12);
    }
    {
      const std::vector<double> x{sd(rng), od(rng), pd(rng)};
      std::vector<double> f0(3), f1v(3);
      b3.f1(x, t, f0);
      b3.f1(x, t + b3.period, f1v);
      CHECK(l1_distance(f0, f1v) <= 1e-12);
      CHECK(b3.f2(x, t + b3.period) == doctest::Approx(b3.f2(x, t)).epsilon(1e-12));
    }
  }
}
