#include "hydrolimit/burnett.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "hydrolimit/errors.hpp"

namespace hydrolimit {

double burnett_A_hat(const Vec3& xi, int j) {
  const double r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
  return 0.5 * (r2 - 5.0) * xi[j];
}

double burnett_B_hat(const Vec3& xi, int i, int j) {
  const double r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
  return xi[i] * xi[j] - (i == j ? r2 / 3.0 : 0.0);
}

VelocityGrid thermal_grid(const GasState& s, int n, double radii) {
  if (!s.valid()) throw DomainError("thermal_grid: invalid state");
  if (!(radii > 0.0)) throw ConfigError("thermal_grid: radii must be positive");
  return VelocityGrid(radii * std::sqrt(GasConstants::R * s.theta), n, s.u);
}

namespace {

Vec3 xi_at(const GasState& s, const Vec3& v) {
  const double c = 1.0 / std::sqrt(GasConstants::R * s.theta);
  return {(v[0] - s.u[0]) * c, (v[1] - s.u[1]) * c, (v[2] - s.u[2]) * c};
}

// Exchange lattice axes p and q; the grid must be symmetric under the swap.
GridFunction swap_axes(const GridFunction& f, int p, int q) {
  const VelocityGrid& g = f.grid;
  GridFunction out(g);
  const int n = g.n();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        int idx[3] = {i, j, k};
        std::swap(idx[p], idx[q]);
        out[g.index(i, j, k)] = f[g.index(idx[0], idx[1], idx[2])];
      }
  return out;
}

double relative_residual(LinearizedLandau& lm, const GridFunction& g, const GridFunction& src) {
  GridFunction r = lm.apply(g);
  r -= src;
  return weighted_norm(r, lm.maxwellian()) / weighted_norm(src, lm.maxwellian());
}

}  // namespace

BurnettHats burnett_hats(const GasState& s, const VelocityGrid& g) {
  if (!s.valid()) throw DomainError("burnett_hats: invalid state");
  const GridFunction m = maxwellian(s, g);
  BurnettHats h;
  for (int j = 0; j < 3; ++j) h.a_poly.emplace_back(g);
  for (int j = 0; j < 9; ++j) h.b_poly.emplace_back(g);
  for (std::size_t q = 0; q < g.size(); ++q) {
    const Vec3 xi = xi_at(s, g.node(q));
    for (int j = 0; j < 3; ++j) h.a_poly[j][q] = burnett_A_hat(xi, j);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) h.b_poly[3 * i + j][q] = burnett_B_hat(xi, i, j);
  }
  for (const auto& p : h.a_poly) {
    GridFunction x = p;
    for (std::size_t q = 0; q < g.size(); ++q) x[q] *= m[q];
    h.a_src.push_back(std::move(x));
  }
  for (const auto& p : h.b_poly) {
    GridFunction x = p;
    for (std::size_t q = 0; q < g.size(); ++q) x[q] *= m[q];
    h.b_src.push_back(std::move(x));
  }
  return h;
}

BurnettSolution burnett_solve(const GasState& s, const BurnettOptions& opt) {
  const VelocityGrid g = thermal_grid(s, opt.n, opt.radii);
  LinearizedLandau lm(s, g, opt.kernel);
  BurnettSolution sol{s, g, burnett_hats(s, g), {}, {}, 0.0, 0.0, 0.0, 0.0, {}};
  sol.solver_tol = opt.inverse.tol;

  std::vector<std::optional<GridFunction>> a(3), b(9);
  auto solve = [&](const GridFunction& src, const std::string& name) {
    InverseResult r = invert_LM_micro(lm, src, opt.inverse);
    sol.solves.push_back({name, r.iterations, 0.0, true});
    return std::move(r.g);
  };
  a[0] = solve(sol.hats.a_src[0], "A1");
  b[0] = solve(sol.hats.b_src[0], "B11");
  b[1] = solve(sol.hats.b_src[1], "B12");
  if (opt.solve_all) {
    a[1] = solve(sol.hats.a_src[1], "A2");
    a[2] = solve(sol.hats.a_src[2], "A3");
    b[4] = solve(sol.hats.b_src[4], "B22");
    b[2] = solve(sol.hats.b_src[2], "B13");
    b[5] = solve(sol.hats.b_src[5], "B23");
    // B33 from the trace condition keeps the solved set independent of it
    b[8] = -1.0 * (*b[0] + *b[4]);
    sol.solves.push_back({"B33", 0, 0.0, false});
  } else {
    a[1] = swap_axes(*a[0], 0, 1);
    a[2] = swap_axes(*a[0], 0, 2);
    b[4] = swap_axes(*b[0], 0, 1);
    b[8] = swap_axes(*b[0], 0, 2);
    b[2] = swap_axes(*b[1], 1, 2);
    b[5] = swap_axes(*b[1], 0, 2);
    for (const char* name : {"A2", "A3", "B22", "B33", "B13", "B23"}) sol.solves.push_back({name, 0, 0.0, false});
  }
  b[3] = *b[1];
  b[6] = *b[2];
  b[7] = *b[5];
  for (auto& x : a) sol.A.push_back(std::move(*x));
  for (auto& x : b) sol.B.push_back(std::move(*x));

  for (auto& c : sol.solves) {
    const bool is_a = c.name[0] == 'A';
    const int i = c.name[1] - '1';
    const int idx = is_a ? i : 3 * i + (c.name[2] - '1');
    c.residual = is_a ? relative_residual(lm, sol.A[idx], sol.hats.a_src[idx])
                      : relative_residual(lm, sol.B[idx], sol.hats.b_src[idx]);
  }

  const double rt = GasConstants::R * s.theta;
  sol.mu_theta = -rt * inner(sol.hats.b_poly[1], sol.B[1]);
  sol.kappa_theta = -GasConstants::R * rt * inner(sol.hats.a_poly[0], sol.A[0]);
  sol.grid_defect = lm.equilibrium_defect() / sup_norm(sol.hats.b_src[1]);
  return sol;
}

double pair_AA(const BurnettSolution& sol, int i, int j) { return inner(sol.hats.a_poly[i], sol.A[j]); }
double pair_AB(const BurnettSolution& sol, int i, int j, int k) { return inner(sol.hats.a_poly[i], sol.b(j, k)); }
double pair_BB(const BurnettSolution& sol, int i, int j, int k, int l) {
  return inner(sol.hats.b_poly[3 * i + j], sol.b(k, l));
}

bool PropertyReport::all_pass() const {
  return std::all_of(items.begin(), items.end(), [](const PropertyItem& p) { return p.pass; });
}

PropertyReport burnett_property_check(const BurnettSolution& sol, double slack) {
  PropertyReport rep;
  const double tol = slack * (sol.solver_tol + sol.grid_defect);
  const double sa = std::abs(pair_AA(sol, 0, 0));
  const double sb = std::abs(pair_BB(sol, 0, 1, 0, 1));
  const double sab = std::sqrt(sa * sb);
  auto add = [&](std::string name, double value, double defect) {
    rep.items.push_back({std::move(name), value, defect, tol, defect <= tol});
  };
  auto add_sign = [&](std::string name, double value) {
    rep.items.push_back({std::move(name), value, value > 0.0 ? 0.0 : 1.0, 0.0, value > 0.0});
  };

  // -<A_hat_i, A_i> positive, independent of i
  add_sign("-<A_hat_1,A_1> > 0", -pair_AA(sol, 0, 0));
  {
    double d = 0.0;
    for (int i = 1; i < 3; ++i) d = std::max(d, std::abs(pair_AA(sol, i, i) - pair_AA(sol, 0, 0)));
    add("<A_hat_i,A_i> independent of i", pair_AA(sol, 0, 0), d / sa);
  }
  {
    double d = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) d = std::max(d, std::abs(pair_AA(sol, i, j)));
    add("<A_hat_i,A_j> = 0 (i != j)", d, d / sa);
  }
  {
    double d = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) d = std::max(d, std::abs(pair_AB(sol, i, j, k)));
    add("<A_hat_i,B_jk> = 0", d, d / sab);
  }
  {
    // <B_hat_ij, B_kl> = <B_hat_kl, B_ij> = <B_hat_ji, B_kl>
    double d = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) {
            const double x = pair_BB(sol, i, j, k, l);
            d = std::max({d, std::abs(x - pair_BB(sol, k, l, i, j)), std::abs(x - pair_BB(sol, j, i, k, l))});
          }
    add("<B_hat_ij,B_kl> symmetric in the index pairs", d, d / sb);
  }
  add_sign("-<B_hat_12,B_12> > 0", -pair_BB(sol, 0, 1, 0, 1));
  {
    double d = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) d = std::max(d, std::abs(pair_BB(sol, i, j, i, j) - pair_BB(sol, 0, 1, 0, 1)));
    add("<B_hat_ij,B_ij> independent of i != j", pair_BB(sol, 0, 1, 0, 1), d / sb);
  }
  add_sign("<B_hat_11,B_22> > 0", pair_BB(sol, 0, 0, 1, 1));
  {
    double d = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) d = std::max(d, std::abs(pair_BB(sol, i, i, j, j) - pair_BB(sol, 0, 0, 1, 1)));
    add("<B_hat_ii,B_jj> independent of i != j", pair_BB(sol, 0, 0, 1, 1), d / sb);
  }
  add_sign("-<B_hat_11,B_11> > 0", -pair_BB(sol, 0, 0, 0, 0));
  {
    double d = 0.0;
    for (int i = 1; i < 3; ++i) d = std::max(d, std::abs(pair_BB(sol, i, i, i, i) - pair_BB(sol, 0, 0, 0, 0)));
    add("<B_hat_ii,B_ii> independent of i", pair_BB(sol, 0, 0, 0, 0), d / sb);
  }
  {
    double d = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) {
            const bool allowed = (i == k && j == l) || (i == l && j == k) || (i == j && k == l);
            if (!allowed) d = std::max(d, std::abs(pair_BB(sol, i, j, k, l)));
          }
    add("<B_hat_ij,B_kl> = 0 otherwise", d, d / sb);
  }
  {
    double d = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j)
          d = std::max(d, std::abs(pair_BB(sol, i, i, i, i) - pair_BB(sol, i, i, j, j) - 2.0 * pair_BB(sol, i, j, i, j)));
    add("<B_hat_ii,B_ii> - <B_hat_ii,B_jj> = 2<B_hat_ij,B_ij>", d, d / sb);
  }
  {
    const MacroBasis basis = macro_basis(sol.state, sol.grid);
    const GridFunction m = maxwellian(sol.state, sol.grid);
    double d = 0.0;
    auto check = [&](const GridFunction& g) {
      const auto c = macro_coefficients(g, basis);
      double cn = 0.0;
      for (double x : c) cn += x * x;
      d = std::max(d, std::sqrt(cn) / weighted_norm(g, m));
    };
    for (const auto& g : sol.A) check(g);
    for (const auto& g : sol.B) check(g);
    add("P0 A_j = P0 B_ij = 0", d, d);
  }
  {
    double d = 0.0;
    for (const auto& c : sol.solves) d = std::max(d, c.residual);
    rep.items.push_back({"round-trip residual <= 2 tol", d, d, 2.0 * sol.solver_tol, d <= 2.0 * sol.solver_tol});
  }
  return rep;
}

std::vector<DecayEntry> decay_check(const BurnettSolution& sol, const std::vector<double>& epsilons,
                                    double ball_radii) {
  const GridFunction m = maxwellian(sol.state, sol.grid);
  std::vector<DecayEntry> out;
  for (double e : epsilons) {
    if (!(e > 0.0 && e < 1.0)) throw ConfigError("decay_check: epsilon must lie in (0, 1)");
    DecayEntry d{e, 0.0, 0.0};
    for (std::size_t q = 0; q < m.size(); ++q) {
      const Vec3 xi = xi_at(sol.state, sol.grid.node(q));
      const double r = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
      if (r > ball_radii) continue;
      double amax = 0.0, bmax = 0.0;
      for (const auto& g : sol.A) amax = std::max(amax, std::abs(g[q]));
      for (const auto& g : sol.B) bmax = std::max(bmax, std::abs(g[q]));
      const double ratio = (amax + bmax) / std::pow(m[q], 1.0 - e);
      if (ratio > d.constant) {
        d.constant = ratio;
        d.argmax_radius = r;
      }
    }
    out.push_back(d);
  }
  return out;
}

GridFunction gbar_from_gradients(double u1_y, double theta_y, double eps, double a, const BurnettSolution& sol) {
  if (!(eps > 0.0)) throw ConfigError("gbar: eps must be positive");
  const double scale = std::pow(eps, 1.0 - a);
  const double ca = scale * std::sqrt(GasConstants::R) * theta_y / std::sqrt(sol.state.theta);
  const double cb = scale * u1_y;
  GridFunction g(sol.grid);
  const GridFunction& a1 = sol.A[0];
  const GridFunction& b11 = sol.B[0];
  for (std::size_t q = 0; q < g.size(); ++q) g[q] = ca * a1[q] + cb * b11[q];
  return g;
}

GridFunction gbar_construct(const SmoothWave& w, double t, double x, const GasState& s, double eps, double a,
                            const BurnettSolution& sol) {
  const GasState& r = sol.state;
  auto close = [](double p, double q) { return std::abs(p - q) <= 1e-12 * (1.0 + std::abs(q)); };
  if (!close(s.rho, r.rho) || !close(s.theta, r.theta) || !close(s.u[0], r.u[0]) || !close(s.u[1], r.u[1]) ||
      !close(s.u[2], r.u[2]))
    throw ConfigError("gbar_construct: state does not match the Burnett solution");
  const WaveSample ws = w.sample(t, x);
  const double ea = std::pow(eps, a);
  return gbar_from_gradients(ea * ws.u_x, ea * ws.theta_x, eps, a, sol);
}

void write_property_report(std::ostream& os, const PropertyReport& r) {
  os.precision(6);
  for (const auto& p : r.items)
    os << (p.pass ? "ok   " : "FAIL ") << p.name << "  value " << p.value << "  defect " << p.defect << "  tol "
       << p.tolerance << '\n';
}

}  // namespace hydrolimit
