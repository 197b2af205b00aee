#pragma once

// 1-D compressible Navier-Stokes-type system with Landau transport
// coefficients, i.e. the fluid-type limit system with the microscopic
// remainder dropped:
//   rho_t + (rho u1)_x = 0
//   (rho u1)_t + (rho u1^2 + p)_x = (4/3) eps (mu u1_x)_x
//   (rho ui)_t + (rho u1 ui)_x = eps (mu ui_x)_x,  i = 2, 3
//   E_t + ((E + p) u1)_x = eps (kappa theta_x)_x + (4/3) eps (mu u1 u1_x)_x + eps sum_i (mu ui ui_x)_x
// with E = rho (theta + |u|^2/2), p = (2/3) rho theta.
//
// Finite volumes in physical (t, x): MUSCL reconstruction of (rho, u, p) with
// minmod slopes, Roe flux with Harten's entropy fix, centred viscous fluxes,
// explicit midpoint in time. Diffusion is either part of the explicit step or
// split off (Strang) and treated by backward Euler with lagged coefficients.

#include <array>
#include <iosfwd>
#include <vector>

#include "hydrolimit/burgers_wave.hpp"
#include "hydrolimit/transport_table.hpp"

namespace hydrolimit {

using Conserved = std::array<double, 5>;

Conserved to_conserved(const GasState& s);
/// Throws BlowUpError if rho or theta is not positive.
GasState to_primitive(const Conserved& u);

enum class DiffusionMode { explicit_step, imex, automatic };

struct SolverConfig {
  double eps = 0.0625;
  double a = 2.0 / 3.0;
  double k = 0.5;
  double cfl_hyp = 0.4;
  double cfl_diff = 0.4;
  double t_end = 1.0;
  DiffusionMode diffusion = DiffusionMode::automatic;
  /// automatic picks IMEX when the explicit diffusive step would be this
  /// many times smaller than the hyperbolic one.
  double imex_ratio = 4.0;
  /// Grid policy: dx = min(eps^a delta / cells_per_layer, fan_width / cells_per_fan)
  /// unless dx > 0 is given.
  double cells_per_layer = 10.0;
  double cells_per_fan = 400.0;
  double dx = 0.0;
  /// Margin beyond the fan on each side; negative = 10 sqrt(eps t_end) + 20 eps^a delta.
  double margin = -1.0;
  /// Smallest admissible number of cells across eps^a delta.
  double min_layer_cells = 8.0;

  /// Throws ConfigError unless 2/3 <= a <= 1, eps > 0, k > 0 and the CFL
  /// numbers and t_end are positive.
  void validate() const;
  /// delta = eps^{3/5 - 2a/5} / k
  [[nodiscard]] double delta() const;
  /// eps^a
  [[nodiscard]] double scale() const;
};

/// The smooth wave in physical variables: bar(t, x) = w(t / eps^a, x / eps^a).
/// Derivatives in the returned sample are with respect to (tau, y).
class ScaledWave {
 public:
  ScaledWave(const SmoothWave& w, double scale) : w_(&w), scale_(scale) {}
  [[nodiscard]] WaveSample sample(double t, double x) const { return w_->sample(t / scale_, x / scale_); }
  [[nodiscard]] GasState state(double t, double x) const { return approx_wave_eval(*w_, t / scale_, x / scale_); }
  [[nodiscard]] double scale() const { return scale_; }
  [[nodiscard]] const SmoothWave& wave() const { return *w_; }

 private:
  const SmoothWave* w_;
  double scale_;
};

struct FluidField {
  static constexpr int kGhost = 2;

  double x_lo = 0.0;
  double dx = 0.0;
  int n = 0;  ///< interior cells
  double t = 0.0;
  /// Conserved variables on n + 2 kGhost cells; ghost cells hold the
  /// far-field states and are never updated.
  std::array<std::vector<double>, 5> U;
  GasState left_far, right_far;
  /// Totals at t = 0 and time-integrated boundary fluxes (inflow positive).
  Conserved initial_totals{};
  Conserved boundary_inflow{};

  [[nodiscard]] double x(int i) const { return x_lo + (i + 0.5) * dx; }
  [[nodiscard]] double x_hi() const { return x_lo + n * dx; }
  [[nodiscard]] Conserved cell(int i) const;  ///< interior index
  [[nodiscard]] GasState state(int i) const { return to_primitive(cell(i)); }
  [[nodiscard]] Conserved totals() const;
  /// totals - initial_totals - boundary_inflow, per component.
  [[nodiscard]] Conserved audit() const;
};

struct GridLayout {
  double x_lo = 0.0;
  double x_hi = 0.0;
  double dx = 0.0;
  int n = 0;
};

/// Domain and spacing from the sizing policy: the fan and the acoustic cone
/// [u_l - c_l, u_r + c_r] t_end, widened by the margin on both sides.
GridLayout grid_layout(const SolverConfig& cfg, const RiemannData& data);

/// Cell-centre values of bar(0, x). Throws ConfigError when fewer than
/// cfg.min_layer_cells cells resolve eps^a delta.
FluidField initial_data(const SolverConfig& cfg, const SmoothWave& w);
FluidField initial_data(const SolverConfig& cfg, const SmoothWave& w, const GridLayout& layout);

struct StepLimits {
  double hyperbolic = 0.0;
  double diffusive = 0.0;
};

StepLimits step_limits(const FluidField& f, const SolverConfig& cfg, const TransportTable& tr);
/// Whether the configuration integrates diffusion implicitly for this field.
bool uses_imex(const FluidField& f, const SolverConfig& cfg, const TransportTable& tr);

/// Semi-discrete right-hand side dU/dt on the interior cells (explicit
/// diffusion included when `with_diffusion`). Boundary interface fluxes are
/// returned through `boundary` (inflow at the left minus outflow at the right).
std::array<std::vector<double>, 5> rhs(const FluidField& f, const SolverConfig& cfg, const TransportTable& tr,
                                       bool with_diffusion, Conserved* boundary = nullptr);

/// Advances f by dt. Throws ConfigError when dt exceeds the stable step and
/// BlowUpError (with the offending cell) on loss of positivity.
void step(FluidField& f, const SolverConfig& cfg, const TransportTable& tr, double dt);
/// Advances by the largest stable step not passing t_stop; returns dt.
double step(FluidField& f, const SolverConfig& cfg, const TransportTable& tr, double t_stop, bool* imex_used);

/// Text dump: one line per interior cell with x, rho, u1, u2, u3, theta.
void write_snapshot(std::ostream& os, const FluidField& f);

}  // namespace hydrolimit
