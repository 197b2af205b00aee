#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "hydrolimit/burgers_wave.hpp"
#include "hydrolimit/errors.hpp"

using namespace hydrolimit;

namespace {
const GasState kLeft{1.0, {0.0, 0.0, 0.0}, 1.5};
}

TEST_CASE("burgers_init values") {
  const WaveParams p{0.1, 1.2, 1.5};
  CHECK(burgers_init(p, 0.0) == doctest::Approx(1.35).epsilon(1e-15));
  CHECK(burgers_init(p, 50.0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(burgers_init(p, -50.0) == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(burgers_init(p, 0.1) == doctest::Approx(1.35 + 0.15 * 0.76159415595576489).epsilon(1e-15));
  CHECK_THROWS_AS((WaveParams{0.0, 1.0, 2.0}.validate()), ConfigError);
  CHECK_THROWS_AS((WaveParams{0.1, 2.0, 1.0}.validate()), ConfigError);
}

TEST_CASE("characteristic solution") {
  const WaveParams p{0.1, 1.2, 1.5};
  SUBCASE("t = 0 reproduces the data") {
    for (double x : {-0.3, 0.0, 0.05, 0.2}) {
      const BurgersValue v = burgers_eval(p, 0.0, x);
      const double sech = 1.0 / std::cosh(x / p.delta);
      CHECK(v.value == doctest::Approx(burgers_init(p, x)).epsilon(1e-15));
      CHECK(v.dx == doctest::Approx(0.15 / p.delta * sech * sech).epsilon(1e-13));
    }
  }
  SUBCASE("PDE residual and foot point at random points") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> T(0.0, 20.0), X(-1.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double t = T(rng);
      const double x = 1.35 * t + X(rng) * (0.3 + 0.2 * t);
      const BurgersValue v = burgers_eval(p, t, x);
      worst = std::max(worst, std::abs(v.dt + v.value * v.dx));
      CHECK(v.foot + burgers_init(p, v.foot) * t == doctest::Approx(x).epsilon(1e-12));
      CHECK(v.value == doctest::Approx(burgers_init(p, v.foot)).epsilon(1e-13));
    }
    CHECK(worst <= 1e-11);
  }
  SUBCASE("derivatives against finite differences") {
    const double t = 0.7, x = 0.95, h = 1e-5;
    const BurgersValue v = burgers_eval(p, t, x);
    const double fx = (burgers_eval(p, t, x + h).value - burgers_eval(p, t, x - h).value) / (2 * h);
    const double ft = (burgers_eval(p, t + h, x).value - burgers_eval(p, t - h, x).value) / (2 * h);
    const double fxx = (burgers_eval(p, t, x + h).dx - burgers_eval(p, t, x - h).dx) / (2 * h);
    const double ftt = (burgers_eval(p, t + h, x).dt - burgers_eval(p, t - h, x).dt) / (2 * h);
    const double fxt = (burgers_eval(p, t + h, x).dx - burgers_eval(p, t - h, x).dx) / (2 * h);
    CHECK(v.dx == doctest::Approx(fx).epsilon(1e-7));
    CHECK(v.dt == doctest::Approx(ft).epsilon(1e-7));
    CHECK(v.dxx == doctest::Approx(fxx).epsilon(1e-6));
    CHECK(v.dtt == doctest::Approx(ftt).epsilon(1e-6));
    CHECK(v.dxt == doctest::Approx(fxt).epsilon(1e-6));
  }
  SUBCASE("gradient envelope") {
    for (double t : {0.1, 1.0, 10.0}) {
      double sup = 0.0;
      for (int i = 0; i <= 20000; ++i) {
        const double x = 1.2 * t - 1.0 + (0.3 * t + 2.0) * i / 20000.0;
        sup = std::max(sup, burgers_eval(p, t, x).dx);
      }
      CHECK(sup <= std::min(0.3 / (2 * p.delta), 1.0 / t) * (1.0 + 1e-9));
    }
  }
  CHECK_THROWS(burgers_eval(p, -1.0, 0.0));
}

TEST_CASE("smooth wave lift") {
  const RiemannData d = RiemannData::on_curve(kLeft, 1.1);
  const SmoothWave w(d, 0.1);
  const GasState far_l = approx_wave_eval(w, 1.0, -40.0), far_r = approx_wave_eval(w, 1.0, 40.0);
  CHECK(far_l.rho == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(far_r.rho == doctest::Approx(1.1).epsilon(1e-12));
  CHECK(far_r.u[0] == doctest::Approx(d.right().u[0]).epsilon(1e-12));
  const GasState mid = approx_wave_eval(w, 0.0, 0.0);
  CHECK(lambda3(mid) == doctest::Approx(0.5 * (d.speed_left() + d.speed_right())).epsilon(1e-13));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> T(0.0, 5.0), X(-0.5, 8.0);
  for (int i = 0; i < 200; ++i) {
    const WaveSample s = w.sample(T(rng), X(rng));
    const double lhs = s.theta_x, rhs = std::sqrt(2.0 / 5.0) * std::sqrt(s.state.theta) * s.u_x;
    CHECK(std::abs(lhs - rhs) <= 1e-9);
    // invariants constant along the wave
    CHECK(entropy(s.state) == doctest::Approx(entropy(kLeft)).epsilon(1e-12));
  }
}

TEST_CASE("Euler residual of the smooth wave") {
  const SmoothWave w(RiemannData::on_curve(kLeft, 1.1), 0.25);
  auto norm = [](const std::array<double, 4>& r) {
    double m = 0.0;
    for (double v : r) m = std::max(m, std::abs(v));
    return m;
  };
  CHECK(norm(euler_residual(w, 1.0, -30.0, 1e-3)) <= 1e-12);
  const double t = 1.0, x = 0.5 * (w.params().omega_minus + w.params().omega_plus) * t;
  const double r1 = norm(euler_residual(w, t, x, 4e-3)), r2 = norm(euler_residual(w, t, x, 2e-3));
  CHECK(r1 / r2 >= 3.5);
  CHECK(norm(euler_residual(w, t, x, 1e-4)) <= 1e-6);
}

TEST_CASE("decay tables") {
  const RiemannData d = RiemannData::on_curve(kLeft, 1.1);
  const std::vector<double> times{0.1, 1.0, 10.0, 100.0};
  const std::vector<double> ps{1.0, kPInfinity};
  const SmoothWave w(d, 0.1);
  const auto rows = burgers_decay_report(w.params(), times, ps);
  std::vector<double> inf_ratio;
  for (const auto& r : rows) {
    if (r.j == 1 && r.p == 1.0) CHECK(r.value == doctest::Approx(d.speed_right() - d.speed_left()).epsilon(1e-6));
    if (r.j == 1 && r.p == kPInfinity) inf_ratio.push_back(r.ratio);
  }
  REQUIRE(inf_ratio.size() == times.size());
  // sup |w_x| approaches 1/t from below
  for (double r : inf_ratio) CHECK(r <= 1.0 + 1e-9);
  CHECK(inf_ratio.back() >= 0.95);

  // j = 2, p = inf: implied constant stable within x2 when delta halves
  auto c2 = [&](double delta) {
    const SmoothWave wd(d, delta);
    double c = 0.0;
    for (const auto& r : burgers_decay_report(wd.params(), times, ps))
      if (r.j == 2 && r.p == kPInfinity) c = std::max(c, r.ratio);
    return c;
  };
  const double a = c2(0.1), b = c2(0.05);
  CHECK(std::max(a, b) / std::min(a, b) <= 2.0);
  CHECK_THROWS_AS(burgers_decay_report(w.params(), std::vector<double>{0.0}, ps), DomainError);
}

TEST_CASE("gap to the Riemann fan") {
  const RiemannData d = RiemannData::on_curve(kLeft, 1.1);
  const std::vector<double> times{0.5, 1.0, 2.0, 5.0};
  std::vector<double> lo(times.size(), 1e300), hi(times.size(), 0.0);
  for (double delta : {0.2, 0.1, 0.05}) {
    const SmoothWave w(d, delta);
    double prev = 1e300;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const GapResult g = riemann_gap(w, times[i]);
      CHECK(g.gap < prev);
      CHECK(g.ratio < 1.0);
      prev = g.gap;
      lo[i] = std::min(lo[i], g.ratio);
      hi[i] = std::max(hi[i], g.ratio);
    }
  }
  // the constant is uniform in delta
  for (std::size_t i = 0; i < times.size(); ++i) CHECK(hi[i] / lo[i] <= 2.0);
  CHECK_THROWS_AS(riemann_gap(SmoothWave(d, 0.1), 0.0), DomainError);
}
