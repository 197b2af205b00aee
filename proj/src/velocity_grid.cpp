#include "hydrolimit/velocity_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "hydrolimit/errors.hpp"
#include "hydrolimit/log.hpp"

namespace hydrolimit {

namespace {
constexpr double kR = GasConstants::R;
constexpr char kMagic[4] = {'H', 'L', 'G', 'F'};
constexpr std::int32_t kFormatVersion = 1;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

VelocityGrid::VelocityGrid(double half_width, int n_per_axis, Vec3 center)
    : L_(half_width), n_(n_per_axis), center_(center), h_(0.0) {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) throw ConfigError("VelocityGrid: L must be positive");
  if (n_per_axis < 4 || n_per_axis % 2 != 0) throw ConfigError("VelocityGrid: N must be even and >= 4");
  h_ = 2.0 * L_ / n_;
}

Vec3 VelocityGrid::node(std::size_t idx) const {
  const auto n = static_cast<std::size_t>(n_);
  const int k = static_cast<int>(idx % n);
  const int j = static_cast<int>((idx / n) % n);
  const int i = static_cast<int>(idx / (n * n));
  return {coord(0, i), coord(1, j), coord(2, k)};
}

GridFunction::GridFunction(const VelocityGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != g.size()) throw ConfigError("GridFunction: value count does not match grid");
}

void require_same_grid(const GridFunction& a, const GridFunction& b, const char* where) {
  if (!(a.grid == b.grid) || a.size() != b.size()) throw ConfigError(std::string(where) + ": grid mismatch");
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  require_same_grid(*this, o, "GridFunction +=");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  require_same_grid(*this, o, "GridFunction -=");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
  return *this;
}

GridFunction& GridFunction::operator*=(double c) {
  for (double& v : values) v *= c;
  return *this;
}

bool GridFunction::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double c, GridFunction a) { return a *= c; }

double inner(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f, g, "inner");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
  return s * f.grid.weight();
}

double integral(const GridFunction& f) {
  double s = 0.0;
  for (double v : f.values) s += v;
  return s * f.grid.weight();
}

double sup_norm(const GridFunction& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

double l2_norm(const GridFunction& f) { return std::sqrt(inner(f, f)); }

double thermal_margin(const GasState& s, const VelocityGrid& g) {
  double gap = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    const double d = g.half_width() - std::abs(s.u[a] - g.center()[a]);
    gap = std::min(gap, d);
  }
  return gap / std::sqrt(kR * s.theta);
}

GridFunction maxwellian(const GasState& s, const VelocityGrid& g) {
  if (!s.valid()) throw DomainError("maxwellian: invalid state");
  if (thermal_margin(s, g) < 6.0) {
    std::ostringstream msg;
    msg << "maxwellian: only " << thermal_margin(s, g) << " thermal radii fit in the velocity box";
    log_warning(msg.str());
  }
  const double rt = kR * s.theta;
  const double c = s.rho / std::pow(2.0 * std::numbers::pi * rt, 1.5);
  GridFunction m(g);
  const int n = g.n();
  for (int i = 0; i < n; ++i) {
    const double d0 = g.coord(0, i) - s.u[0];
    for (int j = 0; j < n; ++j) {
      const double d1 = g.coord(1, j) - s.u[1];
      for (int k = 0; k < n; ++k) {
        const double d2 = g.coord(2, k) - s.u[2];
        m[g.index(i, j, k)] = c * std::exp(-(d0 * d0 + d1 * d1 + d2 * d2) / (2.0 * rt));
      }
    }
  }
  return m;
}

GasState reference_state() { return GasState{1.0, {0.0, 0.0, 0.0}, 1.5}; }

GridFunction global_maxwellian(const VelocityGrid& g) { return maxwellian(reference_state(), g); }

std::array<double, 5> conserved_moments(const GridFunction& f) {
  std::array<double, 5> m{};
  const VelocityGrid& g = f.grid;
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const Vec3 v = g.node(idx);
    const double x = f[idx];
    m[0] += x;
    m[1] += v[0] * x;
    m[2] += v[1] * x;
    m[3] += v[2] * x;
    m[4] += 0.5 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) * x;
  }
  for (double& x : m) x *= g.weight();
  return m;
}

GasState moments(const GridFunction& f) {
  const auto m = conserved_moments(f);
  if (!(m[0] > 0.0)) throw DomainError("moments: degenerate moments (nonpositive mass)");
  GasState s;
  s.rho = m[0];
  s.u = {m[1] / m[0], m[2] / m[0], m[3] / m[0]};
  const double u2 = s.u[0] * s.u[0] + s.u[1] * s.u[1] + s.u[2] * s.u[2];
  s.theta = m[4] / m[0] - 0.5 * u2;
  if (!(s.theta > 0.0)) throw DomainError("moments: degenerate moments (nonpositive temperature)");
  return s;
}

MacroBasis macro_basis(const GasState& s, const VelocityGrid& g) {
  if (!s.valid()) throw DomainError("macro_basis: invalid state");
  const GridFunction m = maxwellian(s, g);
  MacroBasis b{s, {m, m, m, m, m}, {GridFunction(g), GridFunction(g), GridFunction(g), GridFunction(g),
                                    GridFunction(g)}};
  const double rt = kR * s.theta;
  const double c0 = 1.0 / std::sqrt(s.rho);
  const double c1 = 1.0 / std::sqrt(kR * s.rho * s.theta);
  const double c4 = 1.0 / std::sqrt(6.0 * s.rho);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Vec3 v = g.node(idx);
    const Vec3 d{v[0] - s.u[0], v[1] - s.u[1], v[2] - s.u[2]};
    const double q = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) / rt;
    const std::array<double, 5> poly{c0, c1 * d[0], c1 * d[1], c1 * d[2], c4 * (q - 3.0)};
    for (int a = 0; a < 5; ++a) {
      b.chi_over_m[a][idx] = poly[a];
      b.chi[a][idx] = poly[a] * m[idx];
    }
  }
  return b;
}

std::array<double, 5> macro_coefficients(const GridFunction& h, const MacroBasis& basis) {
  std::array<double, 5> c{};
  for (int a = 0; a < 5; ++a) c[a] = inner(h, basis.chi_over_m[a]);
  return c;
}

GridFunction project_P0(const GridFunction& h, const MacroBasis& basis) {
  const auto c = macro_coefficients(h, basis);
  GridFunction out(h.grid);
  for (int a = 0; a < 5; ++a)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += c[a] * basis.chi[a][i];
  return out;
}

GridFunction project_P1(const GridFunction& h, const MacroBasis& basis) { return h - project_P0(h, basis); }

double weight_w(const Vec3& v, double gamma) {
  return std::pow(1.0 + v[0] * v[0] + v[1] * v[1] + v[2] * v[2], 0.5 * (gamma + 2.0));
}

double CollisionCoeffs::entry(int i, int j, std::size_t node) const {
  static constexpr int kSlot[3][3] = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};
  return sigma[kSlot[i][j]][node];
}

std::vector<double> gradient(const GridFunction& f, int axis) {
  const VelocityGrid& g = f.grid;
  const int n = g.n();
  const double inv2h = 1.0 / (2.0 * g.spacing());
  std::vector<double> out(f.size());
  const std::size_t stride = axis == 0 ? static_cast<std::size_t>(n) * n : axis == 1 ? n : 1;
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const int pos = static_cast<int>((idx / stride) % n);
    if (pos == 0)
      out[idx] = (-3.0 * f[idx] + 4.0 * f[idx + stride] - f[idx + 2 * stride]) * inv2h;
    else if (pos == n - 1)
      out[idx] = (3.0 * f[idx] - 4.0 * f[idx - stride] + f[idx - 2 * stride]) * inv2h;
    else
      out[idx] = (f[idx + stride] - f[idx - stride]) * inv2h;
  }
  return out;
}

double sigma_norm_squared(const GridFunction& h, const CollisionCoeffs& c, int ell) {
  if (!(h.grid == c.grid)) throw ConfigError("sigma_norm: grid mismatch with collision coefficients");
  const std::array<std::vector<double>, 3> d{gradient(h, 0), gradient(h, 1), gradient(h, 2)};
  double s = 0.0;
  for (std::size_t idx = 0; idx < h.size(); ++idx) {
    const Vec3 v = h.grid.node(idx);
    const double w2l = std::pow(weight_w(v, c.gamma), 2.0 * ell);
    double acc = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double sij = c.entry(i, j, idx);
        acc += sij * (d[i][idx] * d[j][idx] + 0.25 * v[i] * v[j] * h[idx] * h[idx]);
      }
    s += w2l * acc;
  }
  return s * h.grid.weight();
}

double sigma_norm(const GridFunction& h, const CollisionCoeffs& c, int ell) {
  return std::sqrt(std::max(0.0, sigma_norm_squared(h, c, ell)));
}

double sigma_equivalent_squared(const GridFunction& h, double gamma) {
  const std::array<std::vector<double>, 3> d{gradient(h, 0), gradient(h, 1), gradient(h, 2)};
  double s = 0.0;
  for (std::size_t idx = 0; idx < h.size(); ++idx) {
    const Vec3 v = h.grid.node(idx);
    const double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    const double br = 1.0 + r2;
    const Vec3 gr{d[0][idx], d[1][idx], d[2][idx]};
    const double g2 = gr[0] * gr[0] + gr[1] * gr[1] + gr[2] * gr[2];
    double radial2 = 0.0;
    double tangential2 = g2;
    if (r2 > 0.0) {
      const double radial = (gr[0] * v[0] + gr[1] * v[1] + gr[2] * v[2]) / std::sqrt(r2);
      radial2 = radial * radial;
      tangential2 = std::max(0.0, g2 - radial2);
    }
    s += std::pow(br, 0.5 * (gamma + 2.0)) * (h[idx] * h[idx] + tangential2) + std::pow(br, 0.5 * gamma) * radial2;
  }
  return s * h.grid.weight();
}

namespace {
// int M_a M_b / mu dv for Maxwellians a, b.
double gaussian_cross(const GasState& a, const GasState& b) {
  const double ka = 1.0 / (2.0 * kR * a.theta);
  const double kb = 1.0 / (2.0 * kR * b.theta);
  const double A = ka + kb - 0.5;
  if (!(A > 0.0)) {
    std::ostringstream msg;
    msg << "maxwellian_l2mu_distance: temperatures (" << a.theta << ", " << b.theta
        << ") are out of regime, the weighted Gaussian integral diverges";
    throw DomainError(msg.str());
  }
  double bb = 0.0, cc = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double lin = 2.0 * (ka * a.u[i] + kb * b.u[i]);
    bb += lin * lin;
    cc += ka * a.u[i] * a.u[i] + kb * b.u[i] * b.u[i];
  }
  const double two_pi = 2.0 * std::numbers::pi;
  const double pref = a.rho * b.rho * std::pow(two_pi, 1.5) /
                      (std::pow(two_pi * kR * a.theta, 1.5) * std::pow(two_pi * kR * b.theta, 1.5));
  return pref * std::pow(std::numbers::pi / A, 1.5) * std::exp(bb / (4.0 * A) - cc);
}
}  // namespace

double maxwellian_l2mu_distance(const GasState& s1, const GasState& s2) {
  if (!s1.valid() || !s2.valid()) throw DomainError("maxwellian_l2mu_distance: invalid state");
  if (s1.rho == s2.rho && s1.u == s2.u && s1.theta == s2.theta) return 0.0;
  const double d2 = gaussian_cross(s1, s1) - 2.0 * gaussian_cross(s1, s2) + gaussian_cross(s2, s2);
  return std::sqrt(std::max(0.0, d2));
}

void write_grid_function_csv(std::ostream& os, const GridFunction& f, double gamma) {
  const VelocityGrid& g = f.grid;
  os << "L,N,gamma,cx,cy,cz\n"
     << fmt17(g.half_width()) << ',' << g.n() << ',' << fmt17(gamma) << ',' << fmt17(g.center()[0]) << ','
     << fmt17(g.center()[1]) << ',' << fmt17(g.center()[2]) << "\nvalue\n";
  for (double v : f.values) os << fmt17(v) << '\n';
  if (!os) throw std::runtime_error("write_grid_function_csv: write failed");
}

GridFunction read_grid_function_csv(std::istream& is, double* gamma) {
  std::string line;
  if (!std::getline(is, line) || line != "L,N,gamma,cx,cy,cz")
    throw ConfigError("read_grid_function_csv: bad header");
  if (!std::getline(is, line)) throw ConfigError("read_grid_function_csv: missing grid line");
  std::replace(line.begin(), line.end(), ',', ' ');
  std::istringstream ls(line);
  double L = 0.0, gam = 0.0;
  int n = 0;
  Vec3 c{};
  if (!(ls >> L >> n >> gam >> c[0] >> c[1] >> c[2])) throw ConfigError("read_grid_function_csv: bad grid line");
  if (!std::getline(is, line) || line != "value") throw ConfigError("read_grid_function_csv: bad column header");
  const VelocityGrid g(L, n, c);
  GridFunction f(g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::getline(is, line)) throw ConfigError("read_grid_function_csv: truncated values");
    f[i] = std::stod(line);
  }
  if (gamma) *gamma = gam;
  return f;
}

void write_grid_function_binary(std::ostream& os, const GridFunction& f, double gamma) {
  const VelocityGrid& g = f.grid;
  const double L = g.half_width();
  const std::int32_t n = g.n();
  const std::uint64_t count = f.size();
  os.write(kMagic, 4);
  os.write(reinterpret_cast<const char*>(&kFormatVersion), sizeof kFormatVersion);
  os.write(reinterpret_cast<const char*>(&L), sizeof L);
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  os.write(reinterpret_cast<const char*>(&gamma), sizeof gamma);
  os.write(reinterpret_cast<const char*>(g.center().data()), 3 * sizeof(double));
  os.write(reinterpret_cast<const char*>(&count), sizeof count);
  os.write(reinterpret_cast<const char*>(f.values.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (!os) throw std::runtime_error("write_grid_function_binary: write failed");
}

GridFunction read_grid_function_binary(std::istream& is, double* gamma) {
  char magic[4];
  std::int32_t version = 0, n = 0;
  double L = 0.0, gam = 0.0;
  Vec3 c{};
  std::uint64_t count = 0;
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw ConfigError("read_grid_function_binary: bad magic");
  is.read(reinterpret_cast<char*>(&version), sizeof version);
  if (version != kFormatVersion) throw ConfigError("read_grid_function_binary: unsupported version");
  is.read(reinterpret_cast<char*>(&L), sizeof L);
  is.read(reinterpret_cast<char*>(&n), sizeof n);
  is.read(reinterpret_cast<char*>(&gam), sizeof gam);
  is.read(reinterpret_cast<char*>(c.data()), 3 * sizeof(double));
  is.read(reinterpret_cast<char*>(&count), sizeof count);
  if (!is) throw ConfigError("read_grid_function_binary: truncated header");
  const VelocityGrid g(L, n, c);
  if (count != g.size()) throw ConfigError("read_grid_function_binary: count does not match grid");
  GridFunction f(g);
  is.read(reinterpret_cast<char*>(f.values.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (!is) throw ConfigError("read_grid_function_binary: truncated values");
  if (gamma) *gamma = gam;
  return f;
}

}  // namespace hydrolimit
