#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hydrolimit/burnett.hpp"
#include "hydrolimit/errors.hpp"
#include "hydrolimit/transport_table.hpp"

using namespace hydrolimit;

namespace {

const GasState kRef{1.0, {0.0, 0.0, 0.0}, 1.5};

const BurnettSolution& solution() {
  static const BurnettSolution s = burnett_solve(kRef);
  return s;
}

}  // namespace

TEST_CASE("Burnett polynomials") {
  const VelocityGrid g = thermal_grid(kRef, 24);
  const BurnettHats h = burnett_hats(kRef, g);
  const GridFunction m = maxwellian(kRef, g);
  for (int j = 0; j < 3; ++j) CHECK(std::abs(integral(h.a_src[j])) <= 1e-12);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(std::abs(integral(h.b_src[3 * i + j])) <= 1e-12);
  for (double x : {-1.3, 0.2, 2.0}) {
    const Vec3 xi{x, 0.7 * x - 0.1, 0.4};
    CHECK(burnett_B_hat(xi, 0, 0) + burnett_B_hat(xi, 1, 1) + burnett_B_hat(xi, 2, 2) ==
          doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    const Vec3 flip1{-xi[0], xi[1], xi[2]}, flip2{xi[0], -xi[1], xi[2]};
    CHECK(burnett_A_hat(flip1, 0) == -burnett_A_hat(xi, 0));
    CHECK(burnett_A_hat(flip2, 0) == burnett_A_hat(xi, 0));
  }
}

TEST_CASE("Burnett functions and transport coefficients") {
  const BurnettSolution& s = solution();
  CHECK(s.mu_theta > 0.0);
  CHECK(s.kappa_theta > 0.0);
  CHECK(s.grid_defect < 0.1);
  const PropertyReport rep = burnett_property_check(s);
  for (const auto& it : rep.items) {
    INFO(it.name << " defect " << it.defect << " tol " << it.tolerance);
    CHECK(it.pass);
  }
  std::ostringstream os;
  write_property_report(os, rep);
  CHECK(os.str().find("FAIL") == std::string::npos);
}

TEST_CASE("Burnett decay bound") {
  const auto d = decay_check(solution(), {0.1, 0.25, 0.5});
  REQUIRE(d.size() == 3);
  for (const auto& e : d) CHECK(std::isfinite(e.constant));
  CHECK(d[0].constant > d[1].constant);
  CHECK(d[1].constant > d[2].constant);
  // at eps = 0.5 the sup is attained well inside the ball
  CHECK(d[2].argmax_radius <= 4.0);
}

TEST_CASE("G_bar") {
  const BurnettSolution& s = solution();
  const double eps = 0.01, a = 2.0 / 3.0;
  const GridFunction zero = gbar_from_gradients(0.0, 0.0, eps, a, s);
  CHECK(sup_norm(zero) == 0.0);
  const GridFunction gb = gbar_from_gradients(0.3, -0.2, eps, a, s);
  const MacroBasis b = macro_basis(s.state, s.grid);
  CHECK(sup_norm(project_P0(gb, b)) <= 1e-6 * sup_norm(gb));
  const GridFunction mu = global_maxwellian(s.grid);
  double n2 = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k) n2 += gb[k] * gb[k] / mu[k] * s.grid.weight();
  const double c = std::sqrt(n2) / (std::pow(eps, 1.0 - a) * 0.5);
  CHECK(std::isfinite(c));
  CHECK(c < 100.0);
  // linear in the gradients
  const GridFunction g2 = gbar_from_gradients(0.6, -0.4, eps, a, s);
  CHECK(sup_norm(g2 - 2.0 * gb) <= 1e-14 * sup_norm(g2));
  const SmoothWave w(RiemannData::on_curve(kRef, 1.1), 0.1);
  CHECK_THROWS_AS(gbar_construct(w, 1.0, 1.4, GasState{1.05, {0, 0, 0}, 1.5}, eps, a, s), ConfigError);
}

TEST_CASE("monotone cubic and transport table") {
  const MonotoneCubic c({0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, 1.0, 4.0});
  CHECK(c(1.0) == 1.0);
  CHECK(c(1.5) == doctest::Approx(1.0));
  for (double x = 0.0; x < 3.0; x += 0.01) CHECK(c(x + 0.01) >= c(x) - 1e-14);
  CHECK(c(-1.0) == 0.0);
  CHECK_THROWS_AS(MonotoneCubic({0.0, 0.0}, {1.0, 2.0}), ConfigError);

  TransportTable t = TransportTable::constant(2.5, 7.0);
  CHECK(t.mu(1.5) == 2.5);
  CHECK(t.kappa(5.0) == 7.0);
  CHECK(t.clamped() >= 1);
  std::stringstream ss;
  write_transport_csv(ss, t);
  const TransportTable r = read_transport_csv(ss);
  REQUIRE(r.rows().size() == t.rows().size());
  for (std::size_t i = 0; i < r.rows().size(); ++i) {
    CHECK(r.rows()[i].theta == t.rows()[i].theta);
    CHECK(r.rows()[i].mu == t.rows()[i].mu);
  }
  CHECK_THROWS_AS(build_transport_table({0.5, 1.0}), DomainError);
  std::stringstream bad("theta,mu,kappa\n1.0,x,2\n");
  CHECK_THROWS_AS(read_transport_csv(bad), ConfigError);
}
