#include "hydrolimit/fluid_diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "hydrolimit/errors.hpp"
#include "hydrolimit/velocity_grid.hpp"

namespace hydrolimit {

namespace {

double phi(double s) { return s - std::log(s) - 1.0; }

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// (rho, u1, u2, u3, theta) and its first/second time derivatives from the
// conserved ones.
using Prim5 = std::array<double, 5>;

Prim5 prim5(const GasState& s) { return {s.rho, s.u[0], s.u[1], s.u[2], s.theta}; }

struct TimeDerivs {
  Prim5 d1;
  Prim5 d2;
};

TimeDerivs chain_rule(const GasState& s, const Conserved& ut, const Conserved& utt) {
  TimeDerivs r{};
  const double rho = s.rho;
  const double rt = ut[0], rtt = utt[0];
  r.d1[0] = rt;
  r.d2[0] = rtt;
  double ke = 0.0, u_ut = 0.0, ut2 = 0.0, u_utt = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double u = s.u[c];
    const double vt = (ut[1 + c] - u * rt) / rho;
    const double vtt = (utt[1 + c] - rtt * u - 2.0 * rt * vt) / rho;
    r.d1[1 + c] = vt;
    r.d2[1 + c] = vtt;
    ke += u * u;
    u_ut += u * vt;
    ut2 += vt * vt;
    u_utt += u * vtt;
  }
  const double th = s.theta;
  const double tht = (ut[4] - rt * (th + 0.5 * ke) - rho * u_ut) / rho;
  const double thtt = (utt[4] - rtt * th - 2.0 * rt * tht - 0.5 * rtt * ke - 2.0 * rt * u_ut - rho * (ut2 + u_utt)) / rho;
  r.d1[4] = tht;
  r.d2[4] = thtt;
  return r;
}

double sq(const Prim5& p) {
  double s = 0.0;
  for (double x : p) s += x * x;
  return s;
}

}  // namespace

double entropy_density(const GasState& s, const GasState& bar) {
  double du2 = 0.0;
  for (int c = 0; c < 3; ++c) du2 += (s.u[c] - bar.u[c]) * (s.u[c] - bar.u[c]);
  return s.rho * bar.theta * phi(bar.rho / s.rho) + 1.5 * s.rho * bar.theta * phi(s.theta / bar.theta) +
         0.75 * s.rho * du2;
}

double entropy_flux(const GasState& s, const GasState& bar) {
  return s.u[0] * entropy_density(s, bar) + (s.u[0] - bar.u[0]) * (s.rho * s.theta - bar.rho * bar.theta);
}

EntropyDiag entropy_monitor(const FluidField& f, const ScaledWave& bar) {
  EntropyDiag d;
  d.t = f.t;
  d.eta_min = std::numeric_limits<double>::infinity();
  const double dy = f.dx / bar.scale();
  for (int i = 0; i < f.n; ++i) {
    const GasState s = f.state(i);
    const GasState b = bar.state(f.t, f.x(i));
    const double eta = entropy_density(s, b);
    d.eta_integral += eta * dy;
    d.eta_min = std::min(d.eta_min, eta);
    d.perturbation_norm2 += sq({s.rho - b.rho, s.u[0] - b.u[0], s.u[1] - b.u[1], s.u[2] - b.u[2], s.theta - b.theta}) * dy;
  }
  const double length = f.n * dy;
  d.ratio = d.perturbation_norm2 > 1e-26 * length ? d.eta_integral / d.perturbation_norm2 : kNaN;
  return d;
}

EnergyDiag energy_diagnostics(const FluidField& f, const ScaledWave& bar, const SolverConfig& cfg,
                              const TransportTable& tr) {
  const int n = f.n;
  const int G = FluidField::kGhost;
  const double s = bar.scale();
  const double dy = f.dx / s;

  // states including one ghost on each side
  std::vector<GasState> st(n + 2);
  st[0] = f.left_far;
  st[n + 1] = f.right_far;
  for (int i = 0; i < n; ++i) st[i + 1] = f.state(i);

  // U_t and U_tt from the semi-discrete equations
  const auto ut = rhs(f, cfg, tr, true);
  const double h = 1e-3 * step_limits(f, cfg, tr).hyperbolic;
  FluidField fp = f, fm = f;
  for (int m = 0; m < 5; ++m)
    for (int i = 0; i < n; ++i) {
      fp.U[m][G + i] += h * ut[m][i];
      fm.U[m][G + i] -= h * ut[m][i];
    }
  const auto lp = rhs(fp, cfg, tr, true);
  const auto lm = rhs(fm, cfg, tr, true);

  std::vector<TimeDerivs> td(n + 2, TimeDerivs{});
  for (int i = 0; i < n; ++i) {
    Conserved a, b;
    for (int m = 0; m < 5; ++m) {
      a[m] = ut[m][i];
      b[m] = (lp[m][i] - lm[m][i]) / (2.0 * h);
    }
    td[i + 1] = chain_rule(st[i + 1], a, b);
  }

  double n0 = 0, ny = 0, nt = 0, nyy = 0, nyt = 0, ntt = 0;
  for (int i = 0; i < n; ++i) {
    const WaveSample w = bar.sample(f.t, f.x(i));
    const Prim5 p = prim5(st[i + 1]), pl = prim5(st[i]), pr = prim5(st[i + 2]);
    const Prim5 bv{w.state.rho, w.state.u[0], 0.0, 0.0, w.state.theta};
    const Prim5 by{w.rho_x, w.u_x, 0.0, 0.0, w.theta_x};
    const Prim5 bt{w.rho_t, w.u_t, 0.0, 0.0, w.theta_t};
    const Prim5 byy{w.rho_xx, w.u_xx, 0.0, 0.0, w.theta_xx};
    const Prim5 byt{w.rho_xt, w.u_xt, 0.0, 0.0, w.theta_xt};
    const Prim5 btt{w.rho_tt, w.u_tt, 0.0, 0.0, w.theta_tt};
    Prim5 e0, ey, et, eyy, eyt, ett;
    for (int m = 0; m < 5; ++m) {
      e0[m] = p[m] - bv[m];
      ey[m] = s * (pr[m] - pl[m]) / (2.0 * f.dx) - by[m];
      eyy[m] = s * s * (pr[m] - 2.0 * p[m] + pl[m]) / (f.dx * f.dx) - byy[m];
      et[m] = s * td[i + 1].d1[m] - bt[m];
      eyt[m] = s * s * (td[i + 2].d1[m] - td[i].d1[m]) / (2.0 * f.dx) - byt[m];
      ett[m] = s * s * td[i + 1].d2[m] - btt[m];
    }
    n0 += sq(e0);
    ny += sq(ey);
    nt += sq(et);
    nyy += sq(eyy);
    nyt += sq(eyt);
    ntt += sq(ett);
  }
  EnergyDiag d;
  d.t = f.t;
  const double second = (nyy + nyt + ntt) * dy;
  const double first = (ny + nt) * dy;
  d.E2 = n0 * dy + first + std::pow(cfg.eps, 2.0 - 2.0 * cfg.a) * second;
  d.D2 = std::pow(cfg.eps, 1.0 - cfg.a) * (first + second);
  return d;
}

RiemannDistance distance_to_riemann(const FluidField& f, const RiemannData& data, double t) {
  if (!(t > 0.0)) throw DomainError("distance_to_riemann: t must be positive");
  RiemannDistance d;
  for (int i = 0; i < f.n; ++i) {
    const GasState s = f.state(i);
    const GasState r = riemann_rarefaction(data, f.x(i) / t);
    double e = std::max(std::abs(s.rho - r.rho), std::abs(s.theta - r.theta));
    for (int c = 0; c < 3; ++c) e = std::max(e, std::abs(s.u[c] - r.u[c]));
    if (e > d.fluid_sup) {
      d.fluid_sup = e;
      d.argmax_x = f.x(i);
    }
    d.maxwellian_sup = std::max(d.maxwellian_sup, maxwellian_l2mu_distance(s, r));
  }
  return d;
}

RunResult simulate(const SolverConfig& cfg, const SmoothWave& w, const TransportTable& tr, const RunOptions& opt) {
  return simulate(cfg, w, tr, initial_data(cfg, w), opt);
}

RunResult simulate(const SolverConfig& cfg, const SmoothWave& w, const TransportTable& tr, FluidField f,
                   const RunOptions& opt) {
  cfg.validate();
  if (opt.samples < 1) throw ConfigError("simulate: need at least one sample");
  const ScaledWave bar(w, cfg.scale());
  RunResult res;
  res.ratio_min = std::numeric_limits<double>::infinity();
  res.ratio_max = -std::numeric_limits<double>::infinity();

  auto record = [&] {
    RunSample smp;
    smp.t = f.t;
    if (f.t > 0.0) {
      const RiemannDistance d = distance_to_riemann(f, w.riemann(), f.t);
      smp.fluid_sup = d.fluid_sup;
      smp.maxwellian_sup = d.maxwellian_sup;
    } else {
      smp.fluid_sup = smp.maxwellian_sup = kNaN;
    }
    const EntropyDiag e = entropy_monitor(f, bar);
    smp.eta_integral = e.eta_integral;
    smp.entropy_ratio = e.ratio;
    if (std::isfinite(e.ratio)) {
      res.ratio_min = std::min(res.ratio_min, e.ratio);
      res.ratio_max = std::max(res.ratio_max, e.ratio);
    }
    if (opt.energy) {
      const EnergyDiag en = energy_diagnostics(f, bar, cfg, tr);
      smp.E2 = en.E2;
      smp.D2 = en.D2;
    } else {
      smp.E2 = smp.D2 = kNaN;
    }
    const Conserved audit = f.audit();
    smp.mass_audit = audit[0];
    double scale[5] = {};
    for (int m = 0; m < 5; ++m) {
      for (int i = 0; i < f.n; ++i) scale[m] += std::abs(f.U[m][FluidField::kGhost + i]) * f.dx;
      if (scale[m] > 0.0) res.max_audit = std::max(res.max_audit, std::abs(audit[m]) / scale[m]);
    }
    if (!res.series.empty() && opt.energy) {
      const RunSample& prev = res.series.back();
      res.int_D2 += 0.5 * (prev.D2 + smp.D2) * (smp.t - prev.t) / cfg.scale();
    }
    if (opt.energy) res.sup_E2 = std::max(res.sup_E2, smp.E2);
    res.series.push_back(smp);
  };

  record();
  for (int k = 1; k <= opt.samples; ++k) {
    const double t_next = cfg.t_end * k / opt.samples;
    while (f.t < t_next) {
      bool imex = false;
      step(f, cfg, tr, t_next, &imex);
      res.imex = res.imex || imex;
      ++res.steps;
      if (opt.on_step) opt.on_step(f);
    }
    record();
  }
  res.final_state = std::move(f);
  return res;
}

void write_series_csv(std::ostream& os, const std::vector<RunSample>& series) {
  os << "t,fluid_sup,maxwellian_sup,eta_integral,entropy_ratio,E2_fluid,D2_fluid,mass_audit\n";
  char buf[512];
  for (const auto& s : series) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.fluid_sup,
                  s.maxwellian_sup, s.eta_integral, s.entropy_ratio, s.E2, s.D2, s.mass_audit);
    os << buf;
  }
}

}  // namespace hydrolimit
