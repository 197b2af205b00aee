#include "hydrolimit/euler_riemann.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hydrolimit/errors.hpp"

namespace hydrolimit {

namespace {
constexpr double kCurveTol = 1e-10;
constexpr double kFanTol = 1e-13;

double rel_diff(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }
}  // namespace

bool GasState::valid() const {
  return std::isfinite(rho) && std::isfinite(theta) && std::isfinite(u[0]) && std::isfinite(u[1]) &&
         std::isfinite(u[2]) && rho > 0.0 && theta > 0.0;
}

double pressure(const GasState& s) { return GasConstants::R * s.rho * s.theta; }

double entropy(const GasState& s) {
  return -(2.0 / 3.0) * std::log(s.rho) + std::log(4.0 * std::numbers::pi * s.theta / 3.0) + 1.0;
}

double sound_speed(const GasState& s) { return std::sqrt((5.0 / 3.0) * pressure(s) / s.rho); }

double lambda3(const GasState& s) { return s.u[0] + sound_speed(s); }

double riemann_invariant3(const GasState& s) {
  const double k = GasConstants::k0 * std::exp(entropy(s));
  return s.u[0] - std::sqrt(15.0 * k) * std::cbrt(s.rho);
}

RarefactionCurve::RarefactionCurve(const GasState& left) : left_(left) {
  if (!left.valid()) throw DomainError("RarefactionCurve: invalid left state");
  s_star_ = entropy(left);
  k_ = GasConstants::k0 * std::exp(s_star_);
  c0_ = std::sqrt(5.0 * k_ / 3.0);
  b_ = left.u[0] - 3.0 * c0_ * std::cbrt(left.rho);
}

GasState RarefactionCurve::state_at_density(double rho) const {
  if (!(rho >= left_.rho)) {
    std::ostringstream msg;
    msg << "r3_state: density " << rho << " below left density " << left_.rho << " is not a 3-rarefaction";
    throw DomainError(msg.str());
  }
  if (rho == left_.rho) return left_;
  const double s = std::cbrt(rho);
  GasState out;
  out.rho = rho;
  out.u = {b_ + 3.0 * c0_ * s, 0.0, 0.0};
  out.theta = 1.5 * k_ * s * s;
  return out;
}

double RarefactionCurve::cube_root_density_at_speed(double speed) const {
  const double s = (speed - b_) / (4.0 * c0_);
  if (!(s > 0.0)) throw DomainError("RarefactionCurve: speed below the vacuum limit of the curve");
  return s;
}

GasState RarefactionCurve::state_at_speed(double speed) const {
  const double s = cube_root_density_at_speed(speed);
  GasState out;
  out.rho = s * s * s;
  out.u = {b_ + 3.0 * c0_ * s, 0.0, 0.0};
  out.theta = 1.5 * k_ * s * s;
  return out;
}

GasState r3_state(const GasState& left, double rho) { return RarefactionCurve(left).state_at_density(rho); }

RiemannData::RiemannData(const GasState& left, const GasState& right)
    : left_(left), right_(right), curve_(left) {
  if (!left.valid() || !right.valid()) throw DomainError("RiemannData: invalid end state");
  if (left.u[1] != 0.0 || left.u[2] != 0.0 || right.u[1] != 0.0 || right.u[2] != 0.0)
    throw DomainError("RiemannData: transverse velocities must vanish");
  if (!(right.rho > left.rho) || !(right.u[0] > left.u[0]))
    throw DomainError("RiemannData: right state is not on the expanding branch of R3(left)");
  if (rel_diff(entropy(right), curve_.entropy_star()) > kCurveTol ||
      rel_diff(riemann_invariant3(right), curve_.invariant()) > kCurveTol)
    throw DomainError("RiemannData: right state is off the 3-rarefaction curve");
}

RiemannData RiemannData::on_curve(const GasState& left, double rho_plus) {
  return RiemannData(left, r3_state(left, rho_plus));
}

double RiemannData::wave_strength() const {
  return std::abs(right_.rho - left_.rho) + std::abs(right_.u[0] - left_.u[0]) +
         std::abs(right_.theta - left_.theta);
}

FanInversion invert_fan_speed(const GasState& left, double xi, double rho_lo, double rho_hi) {
  const RarefactionCurve curve(left);
  auto speed = [&](double rho) { return lambda3(curve.state_at_density(rho)); };
  double lo = rho_lo;
  double hi = rho_hi;
  double f_lo = speed(lo) - xi;
  double f_hi = speed(hi) - xi;
  if (f_lo > kFanTol || f_hi < -kFanTol) {
    std::ostringstream msg;
    msg << "invert_fan_speed: xi=" << xi << " not bracketed by rho in [" << lo << ", " << hi
        << "], residuals [" << f_lo << ", " << f_hi << "]";
    throw ConvergenceError(msg.str());
  }
  if (std::abs(f_lo) <= kFanTol) return {lo, 0};
  if (std::abs(f_hi) <= kFanTol) return {hi, 0};

  double rho = 0.5 * (lo + hi);
  for (int it = 1; it <= 200; ++it) {
    const double f = speed(rho) - xi;
    if (std::abs(f) <= kFanTol) return {rho, it};
    if (f < 0.0)
      lo = rho;
    else
      hi = rho;
    // d lambda3 / d rho along the curve = (4/3) c0 rho^{-2/3}
    const double dfdr = (4.0 / 3.0) * curve.c0() / std::cbrt(rho * rho);
    double next = rho - f / dfdr;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    rho = next;
  }
  std::ostringstream msg;
  msg << "invert_fan_speed: no convergence in bracket [" << lo << ", " << hi << "] for xi=" << xi;
  throw ConvergenceError(msg.str());
}

GasState riemann_rarefaction(const RiemannData& data, double xi) {
  const double s_left = data.speed_left();
  const double s_right = data.speed_right();
  if (xi <= s_left) return data.left();
  if (xi > s_right) return data.right();
  const FanInversion inv = invert_fan_speed(data.left(), xi, data.left().rho, data.right().rho);
  return data.curve().state_at_density(inv.rho);
}

}  // namespace hydrolimit
