#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "hydrolimit/errors.hpp"
#include "hydrolimit/landau.hpp"

using namespace hydrolimit;

namespace {

const GasState kRef{1.0, {0.0, 0.0, 0.0}, 1.5};

// microscopic perturbation with Gaussian decay
GridFunction random_micro(const LinearizedLandau& lm, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  const VelocityGrid& g = lm.grid();
  GridFunction h(g);
  double c[10];
  for (double& x : c) x = N(rng);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec3 v = g.node(k);
    const double p = c[0] * v[0] * v[1] + c[1] * v[2] + c[2] * v[0] * v[0] * v[0] + c[3] * std::sin(v[1]) +
                     c[4] * v[0] * v[2] + c[5] * std::cos(v[0] + 0.3 * v[2]) + c[6] * v[1] * v[1] * v[2];
    h[k] = p * lm.maxwellian()[k];
  }
  return project_P1(h, lm.basis());
}

double moment_defect(const GridFunction& q, const GridFunction& scale) {
  const auto m = conserved_moments(q);
  double d = 0.0;
  for (double x : m) d = std::max(d, std::abs(x));
  return d / (l2_norm(scale) + 1e-300);
}

}  // namespace

TEST_CASE("kernel matrix") {
  const KernelParams p{};
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int t = 0; t < 50; ++t) {
    const Vec3 z{U(rng), U(rng), U(rng)};
    const double r = std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]);
    const Mat3 phi = phi_kernel(z, p);
    for (int i = 0; i < 3; ++i) {
      double pv = 0.0;
      for (int j = 0; j < 3; ++j) {
        pv += phi[i][j] * z[j];
        CHECK(phi[i][j] == phi[j][i]);
      }
      CHECK(std::abs(pv) <= 1e-14 * r);
    }
    CHECK(phi[0][0] + phi[1][1] + phi[2][2] == doctest::Approx(2.0 / r).epsilon(1e-13));
    // a unit vector orthogonal to z is an eigenvector with eigenvalue 1/r
    const Vec3 e{z[1], -z[0], 0.0};
    const double en = std::sqrt(e[0] * e[0] + e[1] * e[1]);
    for (int i = 0; i < 3; ++i) {
      double pe = 0.0;
      for (int j = 0; j < 3; ++j) pe += phi[i][j] * e[j] / en;
      CHECK(pe == doctest::Approx(e[i] / en / r).epsilon(1e-12).scale(1.0 / r));
    }
  }
  const Mat3 z0 = phi_kernel({0, 0, 0}, p);
  for (const auto& row : z0)
    for (double x : row) CHECK(x == 0.0);
  CHECK_THROWS_AS(KernelParams({-1.0, 0.0, 4}).validate(), ConfigError);
}

TEST_CASE("FFT convolution equals the direct sum") {
  const VelocityGrid g(6.0, 8);
  const GridFunction m = maxwellian(GasState{1.0, {0.2, 0, 0}, 1.1}, g);
  KernelConvolver fft(g, KernelParams{}, ConvolutionMethod::fft), direct(g, KernelParams{}, ConvolutionMethod::direct);
  SymField a, b;
  fft.matrix(m.values, a);
  direct.matrix(m.values, b);
  for (int s = 0; s < 6; ++s)
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(a[s][k] == doctest::Approx(b[s][k]).epsilon(1e-11).scale(1e-3));
}

TEST_CASE("collision frequency") {
  const VelocityGrid g(8.0, 16);
  const CollisionCoeffs c = collision_frequency(g, KernelParams{});
  const GridFunction mu = global_maxwellian(g);
  for (std::size_t k = 0; k < g.size(); k += 97) CHECK(c.entry(0, 1, k) == c.entry(1, 0, k));
  // isotropy: node on the 1-axis vs the same node rotated onto the 2-axis
  const std::size_t k1 = g.index(12, 8, 8), k2 = g.index(8, 12, 8);
  CHECK(c.entry(0, 0, k1) == doctest::Approx(c.entry(1, 1, k2)).epsilon(1e-12));
  // trace against an independent scalar sum 2 sum_l |v_k - v_l|^{-1} mu_l w
  for (std::size_t k : {g.index(3, 8, 11), g.index(8, 8, 8), g.index(0, 15, 4)}) {
    const Vec3 v = g.node(k);
    double s = 0.0;
    for (std::size_t l = 0; l < g.size(); ++l) {
      if (l == k) continue;
      const Vec3 w = g.node(l);
      const double r = std::sqrt((v[0] - w[0]) * (v[0] - w[0]) + (v[1] - w[1]) * (v[1] - w[1]) + (v[2] - w[2]) * (v[2] - w[2]));
      s += 2.0 / r * mu[l] * g.weight();
    }
    CHECK(c.entry(0, 0, k) + c.entry(1, 1, k) + c.entry(2, 2, k) == doctest::Approx(s).epsilon(1e-11));
  }
  const auto dir = std::filesystem::temp_directory_path() / "hydrolimit_sigma_test";
  std::filesystem::remove_all(dir);
  bool cached = true;
  const CollisionCoeffs c1 = collision_frequency_cached(g, KernelParams{}, dir, &cached);
  CHECK_FALSE(cached);
  const CollisionCoeffs c2 = collision_frequency_cached(g, KernelParams{}, dir, &cached);
  CHECK(cached);
  CHECK(c1.sigma[3] == c2.sigma[3]);
  std::filesystem::remove_all(dir);
}

TEST_CASE("collision operator: equilibrium and conservation") {
  double prev = 1e300;
  for (int n : {16, 24, 32}) {
    const VelocityGrid g(8.0, n);
    const GridFunction mu = global_maxwellian(g);
    const double q = sup_norm(collision_Q(mu, mu));
    CHECK(q < prev);
    prev = q;
    if (n == 32) CHECK(q <= 1e-3);
  }
  const VelocityGrid g(8.0, 24);
  const GridFunction m = maxwellian(GasState{1.0, {0.3, 0.0, 0.0}, 1.2}, g);
  const GridFunction q = collision_Q(m, m);
  CHECK(sup_norm(q) <= 1e-2);
  // two-bump positive F
  GridFunction f = maxwellian(GasState{0.6, {0.8, 0, 0}, 1.0}, g) + maxwellian(GasState{0.4, {-0.9, 0.3, 0}, 0.8}, g);
  const GridFunction qf = collision_Q(f, f);
  CHECK(std::abs(integral(qf)) <= 1e-13);
  CHECK(moment_defect(qf, qf) <= 0.05);
}

TEST_CASE("linearized operator structure") {
  const VelocityGrid g(8.0, 24);
  LinearizedLandau lm(kRef, g);
  const double defect = lm.equilibrium_defect();
  for (int i = 0; i < 5; ++i) {
    const GridFunction r = lm.apply(lm.basis().chi[i]);
    CHECK(sup_norm(r) <= defect);
  }
  const GridFunction m = lm.maxwellian();
  for (unsigned s = 0; s < 20; ++s) {
    const GridFunction h = random_micro(lm, s);
    const double hh = weighted_inner(h, h, m);
    CHECK(weighted_inner(lm.apply(h), h, m) <= defect * hh);
  }
  for (unsigned s = 0; s < 5; ++s) {
    const GridFunction h1 = random_micro(lm, 100 + s), h2 = random_micro(lm, 200 + s);
    const double a = weighted_inner(lm.apply(h1), h2, m), b = weighted_inner(lm.apply(h2), h1, m);
    CHECK(std::abs(a - b) <= 1e-10 * (std::abs(a) + std::abs(b)));
  }
}

TEST_CASE("weak form converges to Q(h, M) + Q(M, h)") {
  auto rel = [](int n) {
    LinearizedLandau lm(kRef, VelocityGrid(8.0, n));
    const GridFunction h = random_micro(lm, 7);
    const GridFunction a = lm.apply(h), b = lm.apply_bilinear(h);
    return weighted_norm(a - b, lm.maxwellian()) / weighted_norm(a, lm.maxwellian());
  };
  const double r24 = rel(24), r32 = rel(32);
  CHECK(r32 < 0.5 * r24);
  CHECK(r32 <= 0.1);
}

TEST_CASE("operator on the sqrt(mu) scale") {
  const VelocityGrid g(8.0, 16);
  const GridFunction mu = global_maxwellian(g);
  GridFunction root(g);
  for (std::size_t k = 0; k < g.size(); ++k) root[k] = std::sqrt(mu[k]);
  // collision invariants times sqrt(mu) are annihilated
  GridFunction e = root;
  const GridFunction le = linearized_script_L(e);
  CHECK(sup_norm(le) <= 0.05);
  // sqrt(mu) scriptL f = L_mu(sqrt(mu) f)
  std::mt19937_64 rng(9);
  std::normal_distribution<double> N(0.0, 1.0);
  GridFunction f(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec3 v = g.node(k);
    f[k] = (N(rng) * 0.1 + v[0] * v[1]) * root[k];
  }
  const GridFunction lhs = linearized_script_L(f);
  GridFunction mf(g);
  for (std::size_t k = 0; k < g.size(); ++k) mf[k] = root[k] * f[k];
  LinearizedLandau lm(reference_state(), g);
  const GridFunction rhs = lm.apply(mf);
  double err = 0.0, sc = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    err = std::max(err, std::abs(root[k] * lhs[k] - rhs[k]));
    sc = std::max(sc, std::abs(rhs[k]));
  }
  CHECK(err <= 1e-10 * sc);
  // sign of -<scriptL g, g> on a microscopic g
  const GridFunction gm = project_P1(mf, lm.basis());
  GridFunction gs(g);
  for (std::size_t k = 0; k < g.size(); ++k) gs[k] = gm[k] / root[k];
  CHECK(-inner(linearized_script_L(gs), gs) >= -lm.equilibrium_defect() * inner(gs, gs));
}

TEST_CASE("inverse on the microscopic subspace") {
  const VelocityGrid g(8.0, 32);
  LinearizedLandau lm(kRef, g);
  const GridFunction g0 = random_micro(lm, 42);
  const GridFunction h = project_P1(lm.apply(g0), lm.basis());
  const InverseResult r = invert_LM_micro(lm, h);
  CHECK(r.relative_residual <= 1e-6);
  const GridFunction diff = project_P1(r.g - g0, lm.basis());
  CHECK(weighted_norm(diff, lm.maxwellian()) <= 1e-3 * weighted_norm(g0, lm.maxwellian()));
  const InverseResult z = invert_LM_micro(lm, GridFunction(g));
  CHECK(sup_norm(z.g) == 0.0);
  CHECK_THROWS_AS(invert_LM_micro(lm, lm.maxwellian()), DomainError);
}
