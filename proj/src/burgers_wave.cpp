#include "hydrolimit/burgers_wave.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include "hydrolimit/errors.hpp"

namespace hydrolimit {

namespace {

// sech^2 without cancellation in the tails.
double sech2(double z) {
  const double e = std::exp(-2.0 * std::abs(z));
  return 4.0 * e / ((1.0 + e) * (1.0 + e));
}

double init_derivative(const WaveParams& p, double x0) {
  return p.half_jump() / p.delta * sech2(x0 / p.delta);
}

double init_second_derivative(const WaveParams& p, double x0) {
  const double z = x0 / p.delta;
  return -2.0 * p.half_jump() / (p.delta * p.delta) * sech2(z) * std::tanh(z);
}

// Uniform samples of the foot point, scaled to delta.
constexpr double kFootHalfWidth = 40.0;  // in units of delta
constexpr int kFootSamples = 16001;      // odd, for Simpson

double simpson(std::span<const double> f, double dz) {
  const std::size_t n = f.size();
  double s = f.front() + f.back();
  for (std::size_t i = 1; i + 1 < n; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f[i];
  return s * dz / 3.0;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Builds L^p rows from pointwise magnitudes of the first and second space
// derivatives sampled on the foot-point lattice; `jac` is dx/dx0.
void append_rows(std::vector<DecayRow>& rows, const WaveParams& wp, double t,
                 std::span<const double> p_exponents, const std::vector<double>& d1,
                 const std::vector<double>& d2, const std::vector<double>& jac, double dz) {
  const double jump = wp.omega_plus - wp.omega_minus;
  std::vector<double> integrand(d1.size());
  for (int j = 1; j <= 2; ++j) {
    const auto& d = j == 1 ? d1 : d2;
    for (double p : p_exponents) {
      DecayRow row;
      row.t = t;
      row.p = p;
      row.j = j;
      const double inv_p = p == kPInfinity ? 0.0 : 1.0 / p;
      if (p == kPInfinity) {
        row.value = *std::max_element(d.begin(), d.end());
      } else {
        for (std::size_t i = 0; i < d.size(); ++i) integrand[i] = std::pow(d[i], p) * jac[i] * wp.delta;
        row.value = std::pow(simpson(integrand, dz), inv_p);
      }
      if (j == 1)
        row.bound_shape = std::pow(jump, inv_p) * std::pow(wp.delta + t, -1.0 + inv_p);
      else
        row.bound_shape = std::pow(wp.delta, -j + 1.0 + inv_p) / (wp.delta + t);
      row.ratio = row.value / row.bound_shape;
      rows.push_back(row);
    }
  }
}

}  // namespace

void WaveParams::validate() const {
  if (!(delta > 0.0)) throw ConfigError("WaveParams: delta must be positive");
  if (!(omega_minus < omega_plus)) throw ConfigError("WaveParams: need omega_minus < omega_plus");
}

double burgers_init(const WaveParams& p, double x) { return p.mean() + p.half_jump() * std::tanh(x / p.delta); }

BurgersValue burgers_eval(const WaveParams& p, double t, double x) {
  if (!(t >= 0.0)) throw DomainError("burgers_eval: t must be nonnegative");
  BurgersValue out;
  double x0 = x;
  if (t > 0.0) {
    double lo = x - p.omega_plus * t;
    double hi = x - p.omega_minus * t;
    const double tol = 1e-13 * (1.0 + std::abs(x));
    x0 = std::clamp(x - p.mean() * t, lo, hi);
    bool converged = false;
    double prev_step = hi - lo;
    for (int it = 1; it <= 200; ++it) {
      const double g = x0 + t * burgers_init(p, x0) - x;
      out.iterations = it;
      if (g == 0.0) {
        converged = true;
        break;
      }
      if (g < 0.0)
        lo = x0;
      else
        hi = x0;
      const double dg = 1.0 + t * init_derivative(p, x0);
      double next = x0 - g / dg;
      // bisect when Newton leaves the bracket or is not halving the step
      if (!(next > lo && next < hi) || std::abs(2.0 * g) > std::abs(prev_step * dg)) next = 0.5 * (lo + hi);
      const double step = std::abs(next - x0);
      prev_step = step;
      x0 = next;
      if (step <= tol || hi - lo <= tol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      std::ostringstream msg;
      msg << "burgers_eval: foot point did not converge at t=" << t << " x=" << x;
      throw ConvergenceError(msg.str());
    }
    // a bisection exit leaves x0 only bracket-accurate; one Newton polish
    const double g = x0 + t * burgers_init(p, x0) - x;
    const double polished = x0 - g / (1.0 + t * init_derivative(p, x0));
    if (polished >= lo && polished <= hi) x0 = polished;
  }
  const double w = burgers_init(p, x0);
  const double w1 = init_derivative(p, x0);
  const double w2 = init_second_derivative(p, x0);
  const double jac = 1.0 + t * w1;
  out.foot = x0;
  out.value = w;
  out.dx = w1 / jac;
  out.dt = -w * out.dx;
  out.dxx = w2 / (jac * jac * jac);
  out.dxt = -(out.dx * out.dx + w * out.dxx);
  out.dtt = 2.0 * w * out.dx * out.dx + w * w * out.dxx;
  return out;
}

SmoothWave::SmoothWave(const RiemannData& data, double delta) : data_(data) {
  params_.delta = delta;
  params_.omega_minus = data.speed_left();
  params_.omega_plus = data.speed_right();
  params_.validate();
}

WaveSample SmoothWave::lift(const BurgersValue& w) const {
  const RarefactionCurve& c = curve();
  WaveSample out;
  double omega = w.value;
  const double slack = 1e-12 * (1.0 + std::abs(params_.omega_plus));
  if (omega < params_.omega_minus - slack || omega > params_.omega_plus + slack) out.clamped = true;
  omega = std::clamp(omega, params_.omega_minus, params_.omega_plus);

  const double k = c.k_entropy();
  const double c4 = 4.0 * c.c0();
  const double s = c.cube_root_density_at_speed(omega);
  const double sx = w.dx / c4, st = w.dt / c4;
  const double sxx = w.dxx / c4, sxt = w.dxt / c4, stt = w.dtt / c4;

  out.state.rho = s * s * s;
  out.state.u = {c.invariant() + 3.0 * c.c0() * s, 0.0, 0.0};
  out.state.theta = 1.5 * k * s * s;

  out.rho_x = 3.0 * s * s * sx;
  out.rho_t = 3.0 * s * s * st;
  out.rho_xx = 6.0 * s * sx * sx + 3.0 * s * s * sxx;
  out.rho_xt = 6.0 * s * sx * st + 3.0 * s * s * sxt;
  out.rho_tt = 6.0 * s * st * st + 3.0 * s * s * stt;

  const double a = 3.0 * c.c0();
  out.u_x = a * sx;
  out.u_t = a * st;
  out.u_xx = a * sxx;
  out.u_xt = a * sxt;
  out.u_tt = a * stt;

  out.theta_x = 3.0 * k * s * sx;
  out.theta_t = 3.0 * k * s * st;
  out.theta_xx = 3.0 * k * (sx * sx + s * sxx);
  out.theta_xt = 3.0 * k * (sx * st + s * sxt);
  out.theta_tt = 3.0 * k * (st * st + s * stt);
  return out;
}

WaveSample SmoothWave::sample(double t, double x) const { return lift(burgers_eval(params_, t, x)); }

GasState approx_wave_eval(const SmoothWave& w, double t, double x) { return w.sample(t, x).state; }

std::array<double, 4> euler_residual(const SmoothWave& w, double t, double x, double h) {
  if (!(h > 0.0)) throw ConfigError("euler_residual: stencil_h must be positive");
  struct Q {
    double rho, mom, tmom, rtheta;   // conserved-like densities
    double f_rho, f_mom, f_tmom, f_rtheta;
    double p, u;
  };
  auto at = [&](double tt, double xx) {
    const GasState s = approx_wave_eval(w, tt, xx);
    const double p = pressure(s);
    return Q{s.rho, s.rho * s.u[0], s.rho * s.u[1], s.rho * s.theta,
             s.rho * s.u[0], s.rho * s.u[0] * s.u[0] + p, s.rho * s.u[0] * s.u[1], s.rho * s.u[0] * s.theta,
             p, s.u[0]};
  };
  const Q c = at(t, x);
  const Q xp = at(t, x + h);
  const Q xm = at(t, x - h);
  Q dt_{};
  if (t >= h) {
    const Q tp = at(t + h, x), tm = at(t - h, x);
    dt_.rho = (tp.rho - tm.rho) / (2 * h);
    dt_.mom = (tp.mom - tm.mom) / (2 * h);
    dt_.tmom = (tp.tmom - tm.tmom) / (2 * h);
    dt_.rtheta = (tp.rtheta - tm.rtheta) / (2 * h);
  } else {
    const Q t1 = at(t + h, x), t2 = at(t + 2 * h, x);
    auto d = [&](double q0, double q1, double q2) { return (-3.0 * q0 + 4.0 * q1 - q2) / (2 * h); };
    dt_.rho = d(c.rho, t1.rho, t2.rho);
    dt_.mom = d(c.mom, t1.mom, t2.mom);
    dt_.tmom = d(c.tmom, t1.tmom, t2.tmom);
    dt_.rtheta = d(c.rtheta, t1.rtheta, t2.rtheta);
  }
  auto dx = [&](double qp, double qm) { return (qp - qm) / (2 * h); };
  return {dt_.rho + dx(xp.f_rho, xm.f_rho), dt_.mom + dx(xp.f_mom, xm.f_mom),
          dt_.tmom + dx(xp.f_tmom, xm.f_tmom),
          dt_.rtheta + dx(xp.f_rtheta, xm.f_rtheta) + c.p * dx(xp.u, xm.u)};
}

std::vector<DecayRow> burgers_decay_report(const WaveParams& p, std::span<const double> times,
                                           std::span<const double> p_exponents) {
  p.validate();
  const double dz = 2.0 * kFootHalfWidth / (kFootSamples - 1);
  std::vector<DecayRow> rows;
  std::vector<double> d1(kFootSamples), d2(kFootSamples), jac(kFootSamples);
  for (double t : times) {
    if (!(t > 0.0)) throw DomainError("burgers_decay_report: times must be positive");
    for (int i = 0; i < kFootSamples; ++i) {
      const double x0 = p.delta * (-kFootHalfWidth + i * dz);
      const double w1 = init_derivative(p, x0);
      const double j = 1.0 + t * w1;
      jac[i] = j;
      d1[i] = w1 / j;
      d2[i] = std::abs(init_second_derivative(p, x0)) / (j * j * j);
    }
    append_rows(rows, p, t, p_exponents, d1, d2, jac, dz);
  }
  return rows;
}

std::vector<DecayRow> lemma_decay_report(const SmoothWave& w, std::span<const double> times,
                                         std::span<const double> p_exponents) {
  const WaveParams& p = w.params();
  const double dz = 2.0 * kFootHalfWidth / (kFootSamples - 1);
  std::vector<DecayRow> rows;
  std::vector<double> d1(kFootSamples), d2(kFootSamples), jac(kFootSamples);
  for (double t : times) {
    if (!(t > 0.0)) throw DomainError("lemma_decay_report: times must be positive");
    for (int i = 0; i < kFootSamples; ++i) {
      const double x0 = p.delta * (-kFootHalfWidth + i * dz);
      const double x = x0 + t * burgers_init(p, x0);
      const WaveSample s = w.sample(t, x);
      jac[i] = 1.0 + t * init_derivative(p, x0);
      d1[i] = std::abs(s.rho_x) + std::abs(s.u_x) + std::abs(s.theta_x);
      d2[i] = std::abs(s.rho_xx) + std::abs(s.u_xx) + std::abs(s.theta_xx);
    }
    append_rows(rows, p, t, p_exponents, d1, d2, jac, dz);
  }
  return rows;
}

namespace {

double gap_shape(double delta, double t) { return delta / t * (std::log1p(t) + std::abs(std::log(delta))); }

// Maximises err(x) over x = x0 + t w(x0) on the foot lattice, plus the two
// fan edges where the Riemann profile has kinks, then refines by golden
// section around the best lattice point.
GapResult maximise_gap(const WaveParams& p, double t, const std::function<double(double)>& err) {
  GapResult out;
  out.t = t;
  const double dz = 2.0 * kFootHalfWidth / (kFootSamples - 1);
  auto x_of = [&](double z) {
    const double x0 = p.delta * z;
    return x0 + t * burgers_init(p, x0);
  };
  double best = -1.0;
  double best_z = 0.0;
  for (int i = 0; i < kFootSamples; ++i) {
    const double z = -kFootHalfWidth + i * dz;
    const double e = err(x_of(z));
    if (e > best) {
      best = e;
      best_z = z;
    }
  }
  double lo = best_z - dz, hi = best_z + dz;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 60; ++it) {
    const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    if (err(x_of(a)) > err(x_of(b)))
      hi = b;
    else
      lo = a;
  }
  double best_x = x_of(best_z);
  const double zr = 0.5 * (lo + hi);
  if (err(x_of(zr)) > best) {
    best = err(x_of(zr));
    best_x = x_of(zr);
  }
  for (double edge : {p.omega_minus * t, p.omega_plus * t}) {
    const double e = err(edge);
    if (e > best) {
      best = e;
      best_x = edge;
    }
  }
  out.gap = best;
  out.argmax_x = best_x;
  out.bound_shape = gap_shape(p.delta, t);
  out.ratio = out.gap / out.bound_shape;
  return out;
}

}  // namespace

GapResult burgers_gap(const WaveParams& p, double t) {
  p.validate();
  if (!(t > 0.0)) throw DomainError("burgers_gap: t must be positive");
  auto err = [&](double x) {
    const double xi = x / t;
    const double wr = std::clamp(xi, p.omega_minus, p.omega_plus);
    return std::abs(burgers_eval(p, t, x).value - wr);
  };
  return maximise_gap(p, t, err);
}

GapResult riemann_gap(const SmoothWave& w, double t) {
  if (!(t > 0.0)) throw DomainError("riemann_gap: t must be positive");
  auto err = [&](double x) {
    const GasState a = approx_wave_eval(w, t, x);
    const GasState r = riemann_rarefaction(w.riemann(), x / t);
    return std::max({std::abs(a.rho - r.rho), std::abs(a.u[0] - r.u[0]), std::abs(a.theta - r.theta)});
  };
  return maximise_gap(w.params(), t, err);
}

void write_decay_csv(std::ostream& os, std::span<const DecayRow> rows) {
  os << "t,p,j,value,bound_shape,ratio\n";
  for (const auto& r : rows) {
    os << fmt17(r.t) << ',' << (r.p == kPInfinity ? std::string("inf") : fmt17(r.p)) << ',' << r.j << ','
       << fmt17(r.value) << ',' << fmt17(r.bound_shape) << ',' << fmt17(r.ratio) << '\n';
  }
}

void write_gap_csv(std::ostream& os, std::span<const GapResult> rows, double delta) {
  os << "t,delta,gap,bound_shape,ratio,argmax_x\n";
  for (const auto& r : rows) {
    os << fmt17(r.t) << ',' << fmt17(delta) << ',' << fmt17(r.gap) << ',' << fmt17(r.bound_shape) << ','
       << fmt17(r.ratio) << ',' << fmt17(r.argmax_x) << '\n';
  }
}

}  // namespace hydrolimit
