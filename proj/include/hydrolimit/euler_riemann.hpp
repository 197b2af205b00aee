#pragma once

// Exact 1-D compressible Euler structure for the monatomic gas with
// p = R rho theta, R = 2/3, e = theta: entropy, characteristic speed of the
// third family, the 3-rarefaction curve and the centred rarefaction fan.

#include <array>
#include <cmath>
#include <numbers>

namespace hydrolimit {

/// Gas constant and entropy constant. Both are fixed; nothing downstream
/// supports other values.
struct GasConstants {
  static constexpr double R = 2.0 / 3.0;
  static constexpr double k0 = 1.0 / (2.0 * std::numbers::pi * std::numbers::e);
};

using Vec3 = std::array<double, 3>;

/// Pointwise fluid state (rho, u, theta).
struct GasState {
  double rho = 1.0;
  Vec3 u{0.0, 0.0, 0.0};
  double theta = 1.5;

  /// rho > 0, theta > 0 and all entries finite.
  [[nodiscard]] bool valid() const;
};

double pressure(const GasState& s);
/// S = -(2/3) ln rho + ln(4 pi theta / 3) + 1, so that p = k0 rho^{5/3} e^S.
double entropy(const GasState& s);
/// lambda_3 = u1 + sqrt(p_rho), p_rho = (5/3) p / rho.
double lambda3(const GasState& s);
double sound_speed(const GasState& s);

/// Parametrisation of the 3-rarefaction curve through a left state.
///
/// Along R3(left) the entropy is frozen at S* and, writing K = k0 e^{S*} and
/// c0 = sqrt(5K/3), every quantity is a polynomial in s = rho^{1/3}:
///   theta = (3/2) K s^2,  u1 = B + 3 c0 s,  lambda3 = B + 4 c0 s,
/// with B = u1- - 3 c0 rho-^{1/3}. The second Riemann invariant is
/// u1 - sqrt(15 k0) e^{S*/2} rho^{1/3} = B.
class RarefactionCurve {
 public:
  explicit RarefactionCurve(const GasState& left);

  [[nodiscard]] const GasState& left() const { return left_; }
  [[nodiscard]] double entropy_star() const { return s_star_; }
  /// k0 e^{S*}
  [[nodiscard]] double k_entropy() const { return k_; }
  [[nodiscard]] double c0() const { return c0_; }
  /// Second Riemann invariant u1 - sqrt(15 k0) e^{S/2} rho^{1/3}.
  [[nodiscard]] double invariant() const { return b_; }

  /// State on the curve with the given density; rho < left.rho throws
  /// DomainError.
  [[nodiscard]] GasState state_at_density(double rho) const;
  /// State on the curve (including its continuation below left.rho) whose
  /// lambda3 equals `speed`. Requires speed > B so that rho > 0.
  [[nodiscard]] GasState state_at_speed(double speed) const;
  /// s = rho^{1/3} as a function of lambda3.
  [[nodiscard]] double cube_root_density_at_speed(double speed) const;

 private:
  GasState left_;
  double s_star_;
  double k_;
  double c0_;
  double b_;
};

/// Second Riemann invariant of the third family evaluated at an arbitrary
/// state (uses the state's own entropy).
double riemann_invariant3(const GasState& s);

/// r3_state: the point of R3(left) with density rho >= left.rho.
GasState r3_state(const GasState& left, double rho);

/// Riemann data joined by a single 3-rarefaction.
class RiemannData {
 public:
  /// Validates u2 = u3 = 0, rho+ > rho-, u1+ > u1- and that `right` lies on
  /// R3(left) to 1e-10 relative in both invariants.
  RiemannData(const GasState& left, const GasState& right);

  /// Builds exactly consistent data: right = r3_state(left, rho_plus).
  static RiemannData on_curve(const GasState& left, double rho_plus);

  [[nodiscard]] const GasState& left() const { return left_; }
  [[nodiscard]] const GasState& right() const { return right_; }
  [[nodiscard]] const RarefactionCurve& curve() const { return curve_; }
  /// |rho+ - rho-| + |u+ - u-| + |theta+ - theta-|
  [[nodiscard]] double wave_strength() const;
  [[nodiscard]] double speed_left() const { return lambda3(left_); }
  [[nodiscard]] double speed_right() const { return lambda3(right_); }

 private:
  GasState left_;
  GasState right_;
  RarefactionCurve curve_;
};

/// Self-similar solution at xi = x/t.
GasState riemann_rarefaction(const RiemannData& data, double xi);

/// Result of the safeguarded Newton-bisection inversion used for the fan.
struct FanInversion {
  double rho;
  int iterations;
};

/// Solves lambda3(r3_state(left, rho)) = xi for rho in [rho_lo, rho_hi] by
/// bracketed Newton with bisection fallback (tolerance 1e-13 on the speed).
/// Throws ConvergenceError with the bracket in the message on failure.
FanInversion invert_fan_speed(const GasState& left, double xi, double rho_lo, double rho_hi);

}  // namespace hydrolimit
