#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "hydrolimit/errors.hpp"
#include "hydrolimit/landau.hpp"
#include "hydrolimit/velocity_grid.hpp"

using namespace hydrolimit;

namespace {

GridFunction random_field(const VelocityGrid& g, const GridFunction& m, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  GridFunction h(g);
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = N(rng) * m[i];
  return h;
}

}  // namespace

TEST_CASE("lattice layout") {
  const VelocityGrid g(8.0, 16);
  CHECK(g.spacing() == 1.0);
  CHECK(g.coord(0, 0) == -7.5);
  CHECK(g.coord(2, 15) == 7.5);
  CHECK(g.size() == 4096u);
  CHECK_THROWS_AS(VelocityGrid(8.0, 15), ConfigError);
}

TEST_CASE("maxwellian and moments") {
  const VelocityGrid g(8.0, 48);
  const GridFunction mu = global_maxwellian(g);
  const GasState ref = reference_state();
  CHECK(ref.rho == 1.0);
  CHECK(ref.theta == 1.5);
  const double peak = std::pow(2.0 * std::numbers::pi, -1.5);
  // mu = (2 pi)^{-3/2} exp(-|v|^2/2)
  const std::size_t k = g.index(24, 24, 24);
  const Vec3 v = g.node(k);
  CHECK(mu[k] == doctest::Approx(peak * std::exp(-0.5 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]))).epsilon(1e-14));

  const GasState s = moments(mu);
  CHECK(std::abs(s.rho - 1.0) <= 1e-8);
  CHECK(std::abs(s.u[0]) <= 1e-8);
  CHECK(std::abs(s.theta - 1.5) <= 1e-8);

  const GasState s2{1.2, {0.3, -0.1, 0.05}, 1.3};
  const GasState r2 = moments(maxwellian(s2, g));
  CHECK(r2.rho == doctest::Approx(1.2).epsilon(1e-8));
  CHECK(r2.u[0] == doctest::Approx(0.3).epsilon(1e-8));
  CHECK(r2.u[1] == doctest::Approx(-0.1).epsilon(1e-8));
  CHECK(r2.theta == doctest::Approx(1.3).epsilon(1e-8));

  const GasState r3 = moments(2.5 * maxwellian(s2, g));
  CHECK(r3.rho == doctest::Approx(2.5 * r2.rho).epsilon(1e-13));
  CHECK(r3.u[0] == doctest::Approx(r2.u[0]).epsilon(1e-13));
  CHECK(r3.theta == doctest::Approx(r2.theta).epsilon(1e-13));
  CHECK_THROWS_AS(moments(GridFunction(g)), DomainError);

  // parity about the bulk velocity
  const VelocityGrid gc(8.0, 24, {0.3, 0.0, 0.0});
  const GridFunction mc = maxwellian(GasState{1.0, {0.3, 0, 0}, 1.5}, gc);
  for (int i = 0; i < 24; ++i) CHECK(mc[gc.index(i, 3, 7)] == doctest::Approx(mc[gc.index(23 - i, 3, 7)]).epsilon(1e-14));
}

TEST_CASE("macro basis and projections") {
  const VelocityGrid g(8.0, 48);
  const GasState s{1.0, {0.0, 0.0, 0.0}, 1.5};
  const MacroBasis b = macro_basis(s, g);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) CHECK(std::abs(inner(b.chi[i], b.chi_over_m[j]) - (i == j ? 1.0 : 0.0)) <= 1e-7);
  // tails
  const double r6 = 6.0 * std::sqrt(GasConstants::R * s.theta);
  double tail = 0.0;
  for (int i = 0; i < 5; ++i)
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Vec3 v = g.node(k);
      if (std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) >= r6) tail = std::max(tail, std::abs(b.chi[i][k]));
    }
  // M(6 radii) / M(0) = e^-18
  CHECK(tail <= 1e-6 * sup_norm(b.chi[4]));
  const auto c4 = conserved_moments(b.chi[4]);
  CHECK(std::abs(c4[0]) <= 1e-10);
  CHECK(std::abs(c4[1]) <= 1e-10);

  const GridFunction m = maxwellian(s, g);
  const GridFunction p0 = project_P0(m, b), p1 = project_P1(m, b);
  CHECK(sup_norm(p0 - m) <= 1e-8);
  CHECK(sup_norm(p1) <= 1e-8);
  const GridFunction h = random_field(g, m, 5);
  const GridFunction ph = project_P0(h, b);
  CHECK(sup_norm(project_P0(ph, b) - ph) <= 1e-10 * sup_norm(ph));
  const auto mom = conserved_moments(project_P1(h, b));
  for (double x : mom) CHECK(std::abs(x) <= 1e-10);
}

TEST_CASE("weight") {
  CHECK(weight_w({0, 0, 0}, -3.0) == 1.0);
  CHECK(weight_w({1, 2, 2}, -3.0) == doctest::Approx(1.0 / std::sqrt(10.0)).epsilon(1e-15));
  CHECK(weight_w({3, 0, 0}, -3.0) < weight_w({2, 0, 0}, -3.0));
}

TEST_CASE("maxwellian distance in L2(1/mu)") {
  const GasState s1{1.0, {0, 0, 0}, 1.5}, s2{1.05, {0.05, 0, 0}, 1.55};
  CHECK(maxwellian_l2mu_distance(s1, s1) == 0.0);
  CHECK(maxwellian_l2mu_distance(s1, s2) == doctest::Approx(maxwellian_l2mu_distance(s2, s1)).epsilon(1e-14));
  const VelocityGrid g(10.0, 64);
  const GridFunction m1 = maxwellian(s1, g), m2 = maxwellian(s2, g), mu = global_maxwellian(g);
  double q = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) q += (m1[k] - m2[k]) * (m1[k] - m2[k]) / mu[k] * g.weight();
  CHECK(maxwellian_l2mu_distance(s1, s2) == doctest::Approx(std::sqrt(q)).epsilon(1e-6));
  CHECK_THROWS_AS(maxwellian_l2mu_distance(s1, GasState{1.0, {0, 0, 0}, 3.5}), DomainError);
}

TEST_CASE("sigma norm against its equivalent form") {
  auto ratio = [](int n) {
    const VelocityGrid g(8.0, n);
    const CollisionCoeffs c = collision_frequency(g, KernelParams{});
    const GridFunction h = maxwellian(GasState{1.0, {0.2, 0, 0}, 1.2}, g);
    return sigma_norm_squared(h, c, 0) / sigma_equivalent_squared(h, -3.0);
  };
  const double r1 = ratio(16), r2 = ratio(24), r3 = ratio(32);
  CHECK(r1 > 0.0);
  CHECK(std::abs(r3 - r2) <= std::abs(r2 - r1) + 1e-3 * r3);
  CHECK(r3 / r2 == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("grid function serialization") {
  const VelocityGrid g(6.0, 8, {0.1, 0.0, -0.2});
  const GridFunction m = maxwellian(GasState{1.0, {0.1, 0, -0.2}, 1.0}, g);
  std::stringstream a, b;
  write_grid_function_csv(a, m, -3.0);
  write_grid_function_binary(b, m, -3.0);
  double ga = 0.0, gb = 0.0;
  const GridFunction ra = read_grid_function_csv(a, &ga), rb = read_grid_function_binary(b, &gb);
  CHECK(ra.grid == g);
  CHECK(rb.grid == g);
  CHECK(ga == -3.0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK(ra[k] == m[k]);
    CHECK(rb[k] == m[k]);
  }
}
