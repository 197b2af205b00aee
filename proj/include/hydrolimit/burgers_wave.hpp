#pragma once

// Smooth approximate 3-rarefaction wave: inviscid Burgers equation with
// tanh initial data of width delta, solved exactly by characteristics and
// lifted to (rho, u, theta) along the rarefaction curve.

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hydrolimit/euler_riemann.hpp"

namespace hydrolimit {

struct WaveParams {
  double delta = 0.1;
  double omega_minus = 0.0;
  double omega_plus = 1.0;

  /// Throws ConfigError unless delta > 0 and omega_minus < omega_plus.
  void validate() const;
  [[nodiscard]] double mean() const { return 0.5 * (omega_plus + omega_minus); }
  [[nodiscard]] double half_jump() const { return 0.5 * (omega_plus - omega_minus); }
};

/// omega_delta(x) = (w+ + w-)/2 + (w+ - w-)/2 tanh(x/delta)
double burgers_init(const WaveParams& p, double x);

/// Characteristic solution and its derivatives at (t, x).
struct BurgersValue {
  double value = 0.0;
  double dx = 0.0;
  double dt = 0.0;
  double dxx = 0.0;
  double dxt = 0.0;
  double dtt = 0.0;
  double foot = 0.0;  ///< x0 with x = x0 + omega_delta(x0) t
  int iterations = 0;
};

/// Requires t >= 0. The foot point is found by safeguarded Newton on the
/// strictly increasing map x0 -> x0 + t omega_delta(x0), starting from the
/// bracket [x - w+ t, x - w- t].
BurgersValue burgers_eval(const WaveParams& p, double t, double x);

/// Fluid state with space and time derivatives up to second order.
struct WaveSample {
  GasState state;
  // first derivatives
  double rho_x = 0.0, u_x = 0.0, theta_x = 0.0;
  double rho_t = 0.0, u_t = 0.0, theta_t = 0.0;
  // second derivatives
  double rho_xx = 0.0, u_xx = 0.0, theta_xx = 0.0;
  double rho_xt = 0.0, u_xt = 0.0, theta_xt = 0.0;
  double rho_tt = 0.0, u_tt = 0.0, theta_tt = 0.0;
  bool clamped = false;
};

class SmoothWave {
 public:
  /// omega_pm are the lambda3 speeds of the Riemann end states.
  SmoothWave(const RiemannData& data, double delta);

  [[nodiscard]] const WaveParams& params() const { return params_; }
  [[nodiscard]] const RiemannData& riemann() const { return data_; }
  [[nodiscard]] const RarefactionCurve& curve() const { return data_.curve(); }
  [[nodiscard]] const GasState& left() const { return data_.left(); }
  [[nodiscard]] const GasState& right() const { return data_.right(); }

  /// Lifts a Burgers value (with derivatives) to the fluid variables.
  [[nodiscard]] WaveSample lift(const BurgersValue& w) const;
  [[nodiscard]] WaveSample sample(double t, double x) const;

 private:
  RiemannData data_;
  WaveParams params_;
};

/// (rho_bar, u_bar, theta_bar)(t, x); u2 = u3 = 0.
GasState approx_wave_eval(const SmoothWave& w, double t, double x);

/// Centred finite-difference residuals of the four Euler equations satisfied
/// by the smooth wave: mass, u1-momentum, transverse momentum, and
/// (rho theta)_t + (rho u1 theta)_x + p u1_x. One-sided second-order time
/// differences are used when t < h.
std::array<double, 4> euler_residual(const SmoothWave& w, double t, double x, double h);

/// One row of a decay table; columns (t, p, j, value, bound_shape, ratio).
/// p = 0 encodes p = infinity.
struct DecayRow {
  double t = 0.0;
  double p = 0.0;
  int j = 1;
  double value = 0.0;
  double bound_shape = 0.0;
  double ratio = 0.0;
};

inline constexpr double kPInfinity = 0.0;

/// ||d^j_x omega_delta(t)||_{L^p} for j = 1, 2 against
/// (w+ - w-)^{1/p} (delta+t)^{-1+1/p} (j = 1) and delta^{-j+1+1/p} (delta+t)^{-1}.
std::vector<DecayRow> burgers_decay_report(const WaveParams& p, std::span<const double> times,
                                           std::span<const double> p_exponents);

/// Same table for d^j_x (rho_bar, u1_bar, theta_bar), with the pointwise
/// vector magnitude taken as |rho_x| + |u_x| + |theta_x|.
std::vector<DecayRow> lemma_decay_report(const SmoothWave& w, std::span<const double> times,
                                         std::span<const double> p_exponents);

struct GapResult {
  double t = 0.0;
  double gap = 0.0;
  double bound_shape = 0.0;
  double ratio = 0.0;
  double argmax_x = 0.0;
};

/// sup_x |(rho_bar,u_bar,theta_bar)(t,x) - (rho^R,u^R,theta^R)(x/t)| (max over
/// components) against delta t^{-1} (ln(1+t) + |ln delta|). Requires t > 0.
GapResult riemann_gap(const SmoothWave& w, double t);

/// sup_x |omega_delta(t,x) - omega^R(x/t)|, same bound shape.
GapResult burgers_gap(const WaveParams& p, double t);

void write_decay_csv(std::ostream& os, std::span<const DecayRow> rows);
void write_gap_csv(std::ostream& os, std::span<const GapResult> rows, double delta);

}  // namespace hydrolimit
