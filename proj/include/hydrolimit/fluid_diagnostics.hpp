#pragma once

// Diagnostics of a fluid run against the smooth wave bar(t, x) and the
// Riemann fan, plus a driver that integrates to t_end and records them.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "hydrolimit/fluid_solver.hpp"

namespace hydrolimit {

/// Relative entropy density around the wave state.
///   eta = rho theta_bar Phi(rho_bar/rho) + (3/2) rho theta_bar Phi(theta/theta_bar) + (3/4) rho |u - u_bar|^2
///   q   = u1 eta + (u1 - u1_bar)(rho theta - rho_bar theta_bar),   Phi(s) = s - ln s - 1
double entropy_density(const GasState& s, const GasState& bar);
double entropy_flux(const GasState& s, const GasState& bar);

struct EntropyDiag {
  double t = 0.0;
  /// int eta dy (scaled frame)
  double eta_integral = 0.0;
  /// ||(rho~, u~, theta~)||^2_{L^2_y}
  double perturbation_norm2 = 0.0;
  /// eta_integral / perturbation_norm2; NaN while the perturbation vanishes.
  double ratio = 0.0;
  double eta_min = 0.0;
};

EntropyDiag entropy_monitor(const FluidField& f, const ScaledWave& bar);

struct EnergyDiag {
  double t = 0.0;
  double E2 = 0.0;
  double D2 = 0.0;
};

/// Fluid parts of the instant energy and dissipation in the (tau, y) frame:
///   E2 = sum_{|alpha|<=1} ||d^alpha phi~||^2 + eps^{2-2a} sum_{|alpha|=2} ||d^alpha phi~||^2
///   D2 = eps^{1-a} sum_{1<=|alpha|<=2} ||d^alpha phi~||^2
/// with phi~ = (rho~, u~, theta~). Space derivatives of the fluid are centred
/// differences; its time derivatives come from the semi-discrete equations.
EnergyDiag energy_diagnostics(const FluidField& f, const ScaledWave& bar, const SolverConfig& cfg,
                              const TransportTable& tr);

struct RiemannDistance {
  double fluid_sup = 0.0;
  double maxwellian_sup = 0.0;
  double argmax_x = 0.0;
};

/// Requires t > 0.
RiemannDistance distance_to_riemann(const FluidField& f, const RiemannData& data, double t);

struct RunSample {
  double t = 0.0;
  double fluid_sup = 0.0;
  double maxwellian_sup = 0.0;
  double eta_integral = 0.0;
  double entropy_ratio = 0.0;
  double E2 = 0.0;
  double D2 = 0.0;
  double mass_audit = 0.0;
};

struct RunOptions {
  /// Diagnostics are recorded at this many equally spaced times (plus t = 0).
  int samples = 50;
  bool energy = true;
  /// Called after every step (for progress reporting); may be empty.
  std::function<void(const FluidField&)> on_step;
};

struct RunResult {
  std::vector<RunSample> series;
  FluidField final_state;
  double sup_E2 = 0.0;
  /// int D2 dtau (trapezoid over the samples)
  double int_D2 = 0.0;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  long steps = 0;
  bool imex = false;
  /// max over components and samples of |audit| / total
  double max_audit = 0.0;
};

RunResult simulate(const SolverConfig& cfg, const SmoothWave& w, const TransportTable& tr, const RunOptions& opt = {});
RunResult simulate(const SolverConfig& cfg, const SmoothWave& w, const TransportTable& tr, FluidField f,
                   const RunOptions& opt);

void write_series_csv(std::ostream& os, const std::vector<RunSample>& series);

}  // namespace hydrolimit
