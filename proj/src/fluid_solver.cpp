#include "hydrolimit/fluid_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "hydrolimit/errors.hpp"

namespace hydrolimit {

namespace {

constexpr double kGamma = 5.0 / 3.0;
constexpr int G = FluidField::kGhost;

using Field = std::array<std::vector<double>, 5>;

// primitive (rho, u1, u2, u3, p)
using Prim = std::array<double, 5>;

Prim prim_of(const GasState& s) { return {s.rho, s.u[0], s.u[1], s.u[2], GasConstants::R * s.rho * s.theta}; }

Conserved cons_of(const Prim& w) {
  const double q2 = w[1] * w[1] + w[2] * w[2] + w[3] * w[3];
  return {w[0], w[0] * w[1], w[0] * w[2], w[0] * w[3], w[4] / (kGamma - 1.0) + 0.5 * w[0] * q2};
}

Conserved physical_flux(const Prim& w) {
  const Conserved u = cons_of(w);
  return {u[1], u[1] * w[1] + w[4], u[2] * w[1], u[3] * w[1], (u[4] + w[4]) * w[1]};
}

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

// Roe flux with Harten's entropy fix on the acoustic fields.
Conserved roe_flux(const Prim& l, const Prim& r) {
  const Conserved ul = cons_of(l), ur = cons_of(r);
  const Conserved fl = physical_flux(l), fr = physical_flux(r);
  const double hl = (ul[4] + l[4]) / l[0], hr = (ur[4] + r[4]) / r[0];
  const double sl = std::sqrt(l[0]), sr = std::sqrt(r[0]);
  const double inv = 1.0 / (sl + sr);
  const double u = (sl * l[1] + sr * r[1]) * inv;
  const double v = (sl * l[2] + sr * r[2]) * inv;
  const double w = (sl * l[3] + sr * r[3]) * inv;
  const double h = (sl * hl + sr * hr) * inv;
  const double q2 = u * u + v * v + w * w;
  const double a2 = (kGamma - 1.0) * (h - 0.5 * q2);
  if (!(a2 > 0.0)) throw BlowUpError("roe_flux: non-positive Roe-averaged sound speed");
  const double a = std::sqrt(a2);

  Conserved d;
  for (int m = 0; m < 5; ++m) d[m] = ur[m] - ul[m];
  const double al3 = d[2] - v * d[0];
  const double al4 = d[3] - w * d[0];
  const double d5 = d[4] - al3 * v - al4 * w;
  const double al2 = (kGamma - 1.0) / a2 * (d[0] * (h - u * u) + u * d[1] - d5);
  const double al1 = (d[0] * (u + a) - d[1] - a * al2) / (2.0 * a);
  const double al5 = d[0] - (al1 + al2);

  auto fix = [&](double lam) {
    const double eps = 0.1 * a;
    const double m = std::abs(lam);
    return m < eps ? 0.5 * (lam * lam / eps + eps) : m;
  };
  const double l1 = fix(u - a), l2 = std::abs(u), l5 = fix(u + a);

  const Conserved k1{1.0, u - a, v, w, h - u * a};
  const Conserved k2{1.0, u, v, w, 0.5 * q2};
  const Conserved k3{0.0, 0.0, 1.0, 0.0, v};
  const Conserved k4{0.0, 0.0, 0.0, 1.0, w};
  const Conserved k5{1.0, u + a, v, w, h + u * a};
  Conserved f;
  for (int m = 0; m < 5; ++m)
    f[m] = 0.5 * (fl[m] + fr[m]) -
           0.5 * (l1 * al1 * k1[m] + l2 * (al2 * k2[m] + al3 * k3[m] + al4 * k4[m]) + l5 * al5 * k5[m]);
  return f;
}

Conserved cell_of(const Field& U, int j) { return {U[0][j], U[1][j], U[2][j], U[3][j], U[4][j]}; }

[[noreturn]] void blow_up(const FluidField& f, int j, const Conserved& c) {
  std::ostringstream msg;
  msg.precision(17);
  msg << "fluid solver: loss of positivity at t = " << f.t << ", x = " << f.x(j - G) << " (cell " << j - G
      << "), conserved state (" << c[0] << ", " << c[1] << ", " << c[2] << ", " << c[3] << ", " << c[4] << ")";
  throw BlowUpError(msg.str());
}

void states_of(const FluidField& f, std::vector<GasState>& s) {
  const int total = f.n + 2 * G;
  s.resize(total);
  for (int j = 0; j < total; ++j) {
    const Conserved c = cell_of(f.U, j);
    try {
      s[j] = to_primitive(c);
    } catch (const BlowUpError&) {
      blow_up(f, j, c);
    }
  }
}

// Scratch space reused across steps; one per thread.
struct Work {
  std::vector<GasState> s;
  std::vector<Prim> w, slope;
  std::vector<Conserved> H;
  std::array<std::vector<double>, 5> F;
  Field u0, k1, k2;
};

Work& work_space() {
  thread_local Work w;
  return w;
}

void rhs_into(const FluidField& f, const SolverConfig& cfg, const TransportTable& tr, bool with_diffusion,
              Field& out, Conserved* boundary);

// Viscous and heat fluxes at the n + 1 interfaces (interface k sits between
// full cells G - 1 + k and G + k).
void diffusive_fluxes(const std::vector<GasState>& s, int n, double dx, const SolverConfig& cfg,
                      const TransportTable& tr, std::array<std::vector<double>, 5>& F) {
  for (auto& v : F) v.assign(n + 1, 0.0);
  for (int k = 0; k <= n; ++k) {
    const GasState& a = s[G - 1 + k];
    const GasState& b = s[G + k];
    const double th = 0.5 * (a.theta + b.theta);
    const double mu = cfg.eps * tr.mu(th);
    const double ka = cfg.eps * tr.kappa(th);
    double work = 0.0;
    for (int c = 0; c < 3; ++c) {
      const double coef = c == 0 ? 4.0 / 3.0 : 1.0;
      const double fc = coef * mu * (b.u[c] - a.u[c]) / dx;
      F[1 + c][k] = fc;
      work += 0.5 * (a.u[c] + b.u[c]) * fc;
    }
    F[4][k] = ka * (b.theta - a.theta) / dx + work;
  }
}

// Thomas algorithm; sub[i] couples x[i-1], sup[i] couples x[i+1].
void solve_tridiagonal(std::vector<double>& sub, std::vector<double>& diag, std::vector<double>& sup,
                       std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = sub[i] / diag[i - 1];
    diag[i] -= m * sup[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
}

// Backward Euler for the diffusive part over dt with coefficients frozen at
// the incoming state. Momentum first, then temperature with the work terms of
// the new velocity, so that the energy update is in exact flux form.
void implicit_diffusion(FluidField& f, const SolverConfig& cfg, const TransportTable& tr, double dt) {
  const int n = f.n;
  std::vector<GasState>& s = work_space().s;
  states_of(f, s);
  std::vector<double> mu(n + 1), ka(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double th = 0.5 * (s[G - 1 + k].theta + s[G + k].theta);
    mu[k] = cfg.eps * tr.mu(th);
    ka[k] = cfg.eps * tr.kappa(th);
  }
  // unknowns are increments, conserved variables move by flux differences
  const double r = dt / (f.dx * f.dx);
  const double lam = dt / f.dx;
  std::vector<double> sub(n), diag(n), sup(n), rhs(n);
  std::array<std::vector<double>, 3> unew;
  std::array<std::vector<double>, 3> flux;  // viscous flux per component at interfaces
  for (int c = 0; c < 3; ++c) {
    const double coef = c == 0 ? 4.0 / 3.0 : 1.0;
    for (int i = 0; i < n; ++i) {
      const double al = coef * mu[i], ar = coef * mu[i + 1];
      const double ui = s[G + i].u[c];
      sub[i] = -r * al;
      sup[i] = -r * ar;
      diag[i] = s[G + i].rho + r * (al + ar);
      rhs[i] = r * (al * (s[G + i - 1].u[c] - ui) + ar * (s[G + i + 1].u[c] - ui));
    }
    solve_tridiagonal(sub, diag, sup, rhs);
    unew[c].resize(n + 2);
    unew[c][0] = s[G - 1].u[c];
    unew[c][n + 1] = s[G + n].u[c];
    for (int i = 0; i < n; ++i) unew[c][i + 1] = s[G + i].u[c] + rhs[i];
    flux[c].resize(n + 1);
    for (int k = 0; k <= n; ++k) flux[c][k] = coef * mu[k] * (unew[c][k + 1] - unew[c][k]) / f.dx;
  }
  std::vector<double> work(n + 1, 0.0);
  for (int k = 0; k <= n; ++k)
    for (int c = 0; c < 3; ++c) work[k] += 0.5 * (unew[c][k] + unew[c][k + 1]) * flux[c][k];
  for (int i = 0; i < n; ++i) {
    const double rho = s[G + i].rho;
    double dke = 0.0;
    for (int c = 0; c < 3; ++c) dke += unew[c][i + 1] * unew[c][i + 1] - s[G + i].u[c] * s[G + i].u[c];
    const double thi = s[G + i].theta;
    sub[i] = -r * ka[i];
    sup[i] = -r * ka[i + 1];
    diag[i] = rho + r * (ka[i] + ka[i + 1]);
    rhs[i] = lam * (work[i + 1] - work[i]) +
             r * (ka[i] * (s[G + i - 1].theta - thi) + ka[i + 1] * (s[G + i + 1].theta - thi)) - 0.5 * rho * dke;
  }
  solve_tridiagonal(sub, diag, sup, rhs);
  std::vector<double> th(n + 2);
  th[0] = s[G - 1].theta;
  th[n + 1] = s[G + n].theta;
  for (int i = 0; i < n; ++i) th[i + 1] = s[G + i].theta + rhs[i];

  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) f.U[1 + c][G + i] += lam * (flux[c][i + 1] - flux[c][i]);
    f.U[4][G + i] += lam * (work[i + 1] - work[i]) +
                     r * (ka[i + 1] * (th[i + 2] - th[i + 1]) - ka[i] * (th[i + 1] - th[i]));
    if (!(th[i + 1] > 0.0)) blow_up(f, G + i, cell_of(f.U, G + i));
  }
  for (int c = 0; c < 3; ++c) f.boundary_inflow[1 + c] += dt * (flux[c][n] - flux[c][0]);
  const double g0 = ka[0] * (th[1] - th[0]) / f.dx + work[0];
  const double gn = ka[n] * (th[n + 1] - th[n]) / f.dx + work[n];
  f.boundary_inflow[4] += dt * (gn - g0);
}

void midpoint(FluidField& f, const SolverConfig& cfg, const TransportTable& tr, double dt, bool with_diffusion) {
  Work& ws = work_space();
  Field& u0 = ws.u0;
  for (int m = 0; m < 5; ++m) u0[m] = f.U[m];
  const double t0 = f.t;
  rhs_into(f, cfg, tr, with_diffusion, ws.k1, nullptr);
  for (int m = 0; m < 5; ++m)
    for (int i = 0; i < f.n; ++i) f.U[m][G + i] = u0[m][G + i] + 0.5 * dt * ws.k1[m][i];
  f.t = t0 + 0.5 * dt;
  Conserved bnd{};
  rhs_into(f, cfg, tr, with_diffusion, ws.k2, &bnd);
  for (int m = 0; m < 5; ++m) {
    for (int i = 0; i < f.n; ++i) f.U[m][G + i] = u0[m][G + i] + dt * ws.k2[m][i];
    f.boundary_inflow[m] += dt * bnd[m];
  }
  f.t = t0 + dt;
  for (int i = 0; i < f.n; ++i) {
    const Conserved c = cell_of(f.U, G + i);
    const double ke = 0.5 * (c[1] * c[1] + c[2] * c[2] + c[3] * c[3]) / c[0];
    if (!(c[0] > 0.0) || !(c[4] - ke > 0.0)) blow_up(f, G + i, c);
  }
}

}  // namespace

Conserved to_conserved(const GasState& s) { return cons_of(prim_of(s)); }

GasState to_primitive(const Conserved& u) {
  GasState s;
  s.rho = u[0];
  if (!(s.rho > 0.0) || !std::isfinite(s.rho)) throw BlowUpError("to_primitive: non-positive density");
  for (int c = 0; c < 3; ++c) s.u[c] = u[1 + c] / s.rho;
  const double ke = 0.5 * (s.u[0] * s.u[0] + s.u[1] * s.u[1] + s.u[2] * s.u[2]);
  s.theta = u[4] / s.rho - ke;
  if (!(s.theta > 0.0) || !std::isfinite(s.theta)) throw BlowUpError("to_primitive: non-positive temperature");
  return s;
}

void SolverConfig::validate() const {
  if (!(a >= 2.0 / 3.0 - 1e-12 && a <= 1.0 + 1e-12)) throw ConfigError("SolverConfig: a must lie in [2/3, 1]");
  if (!(eps > 0.0) || !(k > 0.0)) throw ConfigError("SolverConfig: eps and k must be positive");
  if (!(cfl_hyp > 0.0) || !(cfl_diff > 0.0) || !(t_end > 0.0))
    throw ConfigError("SolverConfig: CFL numbers and t_end must be positive");
  if (!(cells_per_layer > 0.0) || !(cells_per_fan > 0.0)) throw ConfigError("SolverConfig: bad grid policy");
}

double SolverConfig::delta() const { return std::pow(eps, 0.6 - 0.4 * a) / k; }
double SolverConfig::scale() const { return std::pow(eps, a); }

Conserved FluidField::cell(int i) const { return cell_of(U, G + i); }

Conserved FluidField::totals() const {
  Conserved s{};
  for (int m = 0; m < 5; ++m)
    for (int i = 0; i < n; ++i) s[m] += U[m][G + i] * dx;
  return s;
}

Conserved FluidField::audit() const {
  Conserved s = totals();
  for (int m = 0; m < 5; ++m) s[m] -= initial_totals[m] + boundary_inflow[m];
  return s;
}

GridLayout grid_layout(const SolverConfig& cfg, const RiemannData& data) {
  cfg.validate();
  // The viscous run sheds weak acoustic waves from the initial layer; the
  // domain covers their cone as well as the fan so that nothing reaches the
  // pinned boundary cells.
  const double c_l = data.left().u[0] - sound_speed(data.left());
  const double c_r = data.right().u[0] + sound_speed(data.right());
  const double lo = std::min(data.speed_left(), c_l) * cfg.t_end;
  const double hi = std::max(data.speed_right(), c_r) * cfg.t_end;
  const double layer = cfg.scale() * cfg.delta();
  const double margin = cfg.margin >= 0.0 ? cfg.margin : 10.0 * std::sqrt(cfg.eps * cfg.t_end) + 20.0 * layer;
  double dx = cfg.dx > 0.0 ? cfg.dx : std::min(layer / cfg.cells_per_layer, (data.speed_right() - data.speed_left()) * cfg.t_end / cfg.cells_per_fan);
  GridLayout g;
  g.x_lo = std::min(lo, 0.0) - margin;
  g.x_hi = std::max(hi, 0.0) + margin;
  g.n = static_cast<int>(std::ceil((g.x_hi - g.x_lo) / dx - 1e-9));
  g.dx = (g.x_hi - g.x_lo) / g.n;
  return g;
}

FluidField initial_data(const SolverConfig& cfg, const SmoothWave& w) {
  return initial_data(cfg, w, grid_layout(cfg, w.riemann()));
}

FluidField initial_data(const SolverConfig& cfg, const SmoothWave& w, const GridLayout& layout) {
  cfg.validate();
  const double layer = cfg.scale() * cfg.delta();
  if (layer / layout.dx < cfg.min_layer_cells) {
    std::ostringstream msg;
    msg << "initial_data: eps^a delta = " << layer << " is resolved by only " << layer / layout.dx
        << " cells (need " << cfg.min_layer_cells << ")";
    throw ConfigError(msg.str());
  }
  if (!(layout.n >= 4)) throw ConfigError("initial_data: too few cells");
  const ScaledWave bar(w, cfg.scale());
  FluidField f;
  f.x_lo = layout.x_lo;
  f.dx = layout.dx;
  f.n = layout.n;
  f.left_far = w.left();
  f.right_far = w.right();
  for (auto& v : f.U) v.assign(f.n + 2 * G, 0.0);
  const Conserved cl = to_conserved(f.left_far), cr = to_conserved(f.right_far);
  for (int j = 0; j < f.n + 2 * G; ++j) {
    Conserved c;
    if (j < G)
      c = cl;
    else if (j >= G + f.n)
      c = cr;
    else
      c = to_conserved(bar.state(0.0, f.x(j - G)));
    for (int m = 0; m < 5; ++m) f.U[m][j] = c[m];
  }
  f.initial_totals = f.totals();
  return f;
}

namespace {

void rhs_into(const FluidField& f, const SolverConfig& cfg, const TransportTable& tr, bool with_diffusion,
              Field& out, Conserved* boundary) {
  const int n = f.n;
  const int total = n + 2 * G;
  Work& ws = work_space();
  states_of(f, ws.s);
  const std::vector<GasState>& s = ws.s;
  std::vector<Prim>& w = ws.w;
  w.resize(total);
  for (int j = 0; j < total; ++j) w[j] = prim_of(s[j]);

  // limited slopes on the cells adjacent to an interface
  std::vector<Prim>& slope = ws.slope;
  slope.assign(total, Prim{});
  for (int j = 1; j + 1 < total; ++j) {
    Prim d;
    for (int m = 0; m < 5; ++m) d[m] = minmod(w[j][m] - w[j - 1][m], w[j + 1][m] - w[j][m]);
    const bool ok = w[j][0] - 0.5 * std::abs(d[0]) > 0.0 && w[j][4] - 0.5 * std::abs(d[4]) > 0.0;
    if (ok) slope[j] = d;
  }
  std::vector<Conserved>& H = ws.H;
  H.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    const int jl = G - 1 + k, jr = G + k;
    Prim l, r;
    for (int m = 0; m < 5; ++m) {
      l[m] = w[jl][m] + 0.5 * slope[jl][m];
      r[m] = w[jr][m] - 0.5 * slope[jr][m];
    }
    H[k] = roe_flux(l, r);
  }
  for (auto& v : out) v.resize(n);
  for (int m = 0; m < 5; ++m)
    for (int i = 0; i < n; ++i) out[m][i] = -(H[i + 1][m] - H[i][m]) / f.dx;
  Conserved bnd{};
  for (int m = 0; m < 5; ++m) bnd[m] = H[0][m] - H[n][m];
  if (with_diffusion) {
    auto& F = ws.F;
    diffusive_fluxes(s, n, f.dx, cfg, tr, F);
    for (int m = 1; m < 5; ++m) {
      for (int i = 0; i < n; ++i) out[m][i] += (F[m][i + 1] - F[m][i]) / f.dx;
      bnd[m] += F[m][n] - F[m][0];
    }
  }
  if (boundary) *boundary = bnd;
}

}  // namespace

std::array<std::vector<double>, 5> rhs(const FluidField& f, const SolverConfig& cfg, const TransportTable& tr,
                                       bool with_diffusion, Conserved* boundary) {
  Field out;
  rhs_into(f, cfg, tr, with_diffusion, out, boundary);
  return out;
}

StepLimits step_limits(const FluidField& f, const SolverConfig& cfg, const TransportTable& tr) {
  double smax = 0.0, rho_min = 1e300, th_lo = 1e300, th_hi = 0.0;
  for (int j = 0; j < f.n + 2 * G; ++j) {
    const Conserved c = cell_of(f.U, j);
    const double rho = c[0];
    const double ke = 0.5 * (c[1] * c[1] + c[2] * c[2] + c[3] * c[3]) / rho;
    const double th = (c[4] - ke) / rho;
    if (!(rho > 0.0) || !(th > 0.0)) blow_up(f, j, c);
    smax = std::max(smax, std::abs(c[1] / rho) + std::sqrt(5.0 / 3.0 * GasConstants::R * th));
    rho_min = std::min(rho_min, rho);
    th_lo = std::min(th_lo, th);
    th_hi = std::max(th_hi, th);
  }
  // mu, kappa are monotone cubic interpolants: their maximum over
  // [th_lo, th_hi] is attained at an end point or a table node inside.
  double dmax = 0.0;
  auto consider = [&](double th) { dmax = std::max({dmax, 4.0 / 3.0 * tr.mu(th), tr.kappa(th)}); };
  consider(th_lo);
  consider(th_hi);
  for (const auto& r : tr.rows())
    if (r.theta > th_lo && r.theta < th_hi) consider(r.theta);
  return {cfg.cfl_hyp * f.dx / smax, cfg.cfl_diff * f.dx * f.dx * rho_min / (cfg.eps * dmax)};
}

namespace {

bool imex_for(const StepLimits& l, const SolverConfig& cfg) {
  switch (cfg.diffusion) {
    case DiffusionMode::explicit_step:
      return false;
    case DiffusionMode::imex:
      return true;
    case DiffusionMode::automatic:
      break;
  }
  return l.diffusive * cfg.imex_ratio < l.hyperbolic;
}

void advance(FluidField& f, const SolverConfig& cfg, const TransportTable& tr, double dt, bool imex) {
  if (imex) {
    implicit_diffusion(f, cfg, tr, 0.5 * dt);
    midpoint(f, cfg, tr, dt, false);
    implicit_diffusion(f, cfg, tr, 0.5 * dt);
  } else {
    midpoint(f, cfg, tr, dt, true);
  }
}

}  // namespace

bool uses_imex(const FluidField& f, const SolverConfig& cfg, const TransportTable& tr) {
  return imex_for(step_limits(f, cfg, tr), cfg);
}

void step(FluidField& f, const SolverConfig& cfg, const TransportTable& tr, double dt) {
  if (!(dt > 0.0)) throw ConfigError("step: dt must be positive");
  const StepLimits lim = step_limits(f, cfg, tr);
  const bool imex = imex_for(lim, cfg);
  const double allowed = imex ? lim.hyperbolic : std::min(lim.hyperbolic, lim.diffusive);
  if (dt > allowed * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "step: dt = " << dt << " violates the CFL limit " << allowed;
    throw ConfigError(msg.str());
  }
  advance(f, cfg, tr, dt, imex);
}

double step(FluidField& f, const SolverConfig& cfg, const TransportTable& tr, double t_stop, bool* imex_used) {
  const StepLimits lim = step_limits(f, cfg, tr);
  const bool imex = imex_for(lim, cfg);
  if (imex_used) *imex_used = imex;
  double dt = imex ? lim.hyperbolic : std::min(lim.hyperbolic, lim.diffusive);
  const double left = t_stop - f.t;
  const bool last = left <= dt * (1.0 + 1e-9);
  if (last) dt = left;
  if (!(dt > 0.0)) throw ConfigError("step: t_stop is not ahead of the field time");
  advance(f, cfg, tr, dt, imex);
  if (last) f.t = t_stop;
  return dt;
}

void write_snapshot(std::ostream& os, const FluidField& f) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "# t = %.17g\n", f.t);
  os << buf << "x,rho,u1,u2,u3,theta\n";
  for (int i = 0; i < f.n; ++i) {
    const Conserved c = f.cell(i);
    const double rho = c[0];
    const double u1 = c[1] / rho, u2 = c[2] / rho, u3 = c[3] / rho;
    const double th = c[4] / rho - 0.5 * (u1 * u1 + u2 * u2 + u3 * u3);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", f.x(i), rho, u1, u2, u3, th);
    os << buf;
  }
}

}  // namespace hydrolimit
