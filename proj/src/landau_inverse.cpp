// Constrained inverse of L_M on the microscopic subspace.
//
// Work in f = g / sqrt(M): A f = -M^{-1/2} L_M (M^{1/2} f) is symmetric
// and nonnegative in the plain lattice inner product, the M^{-1}
// weighted residual of L_M g = h becomes the Euclidean residual of
// A f = -h / sqrt(M), and the macroscopic directions are chi_i / sqrt(M).

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hydrolimit/errors.hpp"
#include "hydrolimit/landau.hpp"
#include "hydrolimit/log.hpp"

namespace hydrolimit {

namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, const Vec& x, Vec& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

class MicroSystem {
 public:
  explicit MicroSystem(LinearizedLandau& lm) : lm_(lm), grid_(lm.grid()) {
    const GridFunction& m = lm.maxwellian();
    root_.resize(m.size());
    double mmin = m[0];
    for (std::size_t i = 0; i < m.size(); ++i) {
      root_[i] = std::sqrt(m[i]);
      mmin = std::min(mmin, m[i]);
    }
    if (!(mmin > 1e-290)) throw DomainError("invert_LM_micro: Maxwellian underflows on the grid; shrink the box");
    // orthonormal macroscopic directions (modified Gram-Schmidt)
    for (int a = 0; a < 5; ++a) {
      Vec e(m.size());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = lm.basis().chi_over_m[a][i] * root_[i];
      for (const auto& q : basis_) axpy(-dot(q, e), q, e);
      const double nr = norm(e);
      for (double& x : e) x /= nr;
      basis_.push_back(std::move(e));
    }
    build_diagonal();
  }

  [[nodiscard]] std::size_t size() const { return root_.size(); }

  void project(Vec& x) const {
    for (const auto& q : basis_) axpy(-dot(q, x), q, x);
  }

  [[nodiscard]] double macro_norm(const Vec& x) const {
    double s = 0.0;
    for (const auto& q : basis_) s += dot(q, x) * dot(q, x);
    return std::sqrt(s);
  }

  Vec apply(const Vec& f) {
    Vec out = lm_.apply_scaled(f);
    for (double& x : out) x = -x;
    return out;
  }

  Vec to_f(const GridFunction& h) const {
    Vec r(h.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = -h[i] / root_[i];
    return r;
  }

  GridFunction to_g(const Vec& f) const {
    GridFunction g(grid_);
    for (std::size_t i = 0; i < f.size(); ++i) g[i] = f[i] * root_[i];
    return g;
  }

  void precondition(const Vec& r, Vec& z) const {
    z.resize(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) z[i] = r[i] / diag_[i];
    project(z);
  }

 private:
  void build_diagonal() {
    diag_ = lm_.scaled_diagonal();
    const double dmax = *std::max_element(diag_.begin(), diag_.end());
    for (double& d : diag_) d = std::max(d, 1e-6 * dmax);
  }

  LinearizedLandau& lm_;
  VelocityGrid grid_;
  Vec root_;
  Vec diag_;
  std::vector<Vec> basis_;
};

struct SolveOutcome {
  Vec x;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;
};

SolveOutcome solve_cg(MicroSystem& sys, const Vec& b, double tol, int max_iter) {
  SolveOutcome out;
  const double bn = norm(b);
  out.x.assign(b.size(), 0.0);
  Vec r = b, z, p;
  sys.precondition(r, z);
  p = z;
  double rz = dot(r, z);
  double best = 1.0;
  Vec x_best = out.x;
  int since_best = 0;
  for (int it = 1; it <= max_iter; ++it) {
    const Vec ap = sys.apply(p);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) break;  // lost definiteness
    const double alpha = rz / pap;
    axpy(alpha, p, out.x);
    axpy(-alpha, ap, r);
    const double rel = norm(r) / bn;
    out.history.push_back(rel);
    out.iterations = it;
    if (rel <= tol) {
      out.converged = true;
      break;
    }
    if (rel < best) {
      if (rel < 0.9 * best) since_best = 0;
      best = rel;
      x_best = out.x;
    }
    if (++since_best > 100 || rel > 100.0 * best) break;  // stalled or lost orthogonality
    sys.precondition(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
  }
  if (!out.converged) out.x = std::move(x_best);
  sys.project(out.x);
  return out;
}

// Right-preconditioned restarted GMRES; iterates stay in the microscopic subspace.
SolveOutcome solve_gmres(MicroSystem& sys, const Vec& b, double tol, int max_iter, int restart, Vec x0) {
  SolveOutcome out;
  const double bn = norm(b);
  out.x = std::move(x0);
  if (out.x.empty()) out.x.assign(b.size(), 0.0);
  int total = 0;
  while (total < max_iter) {
    Vec r = b;
    if (norm(out.x) > 0.0) axpy(-1.0, sys.apply(out.x), r);
    double beta = norm(r);
    if (beta / bn <= tol) {
      out.converged = true;
      break;
    }
    const int m = std::min(restart, max_iter - total);
    std::vector<Vec> V;
    std::vector<Vec> Z;
    V.reserve(m + 1);
    Z.reserve(m);
    for (double& x : r) x /= beta;
    V.push_back(std::move(r));
    std::vector<std::vector<double>> H(m + 1, std::vector<double>(m, 0.0));
    std::vector<double> cs(m), sn(m), g(m + 1, 0.0);
    g[0] = beta;
    int k = 0;
    for (; k < m; ++k) {
      Vec z;
      sys.precondition(V[k], z);
      Vec w = sys.apply(z);
      Z.push_back(std::move(z));
      for (int i = 0; i <= k; ++i) {
        H[i][k] = dot(w, V[i]);
        axpy(-H[i][k], V[i], w);
      }
      const double wn = norm(w);
      H[k + 1][k] = wn;
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * H[i][k] + sn[i] * H[i + 1][k];
        H[i + 1][k] = -sn[i] * H[i][k] + cs[i] * H[i + 1][k];
        H[i][k] = t;
      }
      const double den = std::hypot(H[k][k], H[k + 1][k]);
      cs[k] = H[k][k] / den;
      sn[k] = H[k + 1][k] / den;
      H[k][k] = den;
      H[k + 1][k] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      ++total;
      const double rel = std::abs(g[k + 1]) / bn;
      out.history.push_back(rel);
      if (rel <= tol || H[k][k] == 0.0) {
        ++k;
        break;
      }
      if (wn == 0.0) {
        ++k;
        break;
      }
      for (double& x : w) x /= wn;
      V.push_back(std::move(w));
    }
    out.iterations = total;
    // back substitution
    const int kk = static_cast<int>(Z.size());
    std::vector<double> y(kk, 0.0);
    for (int i = kk - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < kk; ++j) s -= H[i][j] * y[j];
      y[i] = s / H[i][i];
    }
    for (int j = 0; j < kk; ++j) axpy(y[j], Z[j], out.x);
    sys.project(out.x);
    if (!out.history.empty() && out.history.back() <= tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace

InverseResult invert_LM_micro(LinearizedLandau& lm, const GridFunction& h, const InverseOptions& opt) {
  if (!(h.grid == lm.grid())) throw ConfigError("invert_LM_micro: grid mismatch");
  if (!(opt.tol > 0.0) || opt.max_iter < 1) throw ConfigError("invert_LM_micro: bad solver options");
  MicroSystem sys(lm);
  InverseResult res{GridFunction(h.grid), 0, 0.0, 0.0, {}, false};
  const Vec b_raw = sys.to_f(h);
  const double bn = norm(b_raw);
  if (bn == 0.0) return res;
  res.input_macro_fraction = sys.macro_norm(b_raw) / bn;
  if (res.input_macro_fraction > opt.micro_tol) {
    std::ostringstream msg;
    msg << "invert_LM_micro: right-hand side is not microscopic (|P0 h|/|h| = " << res.input_macro_fraction << ")";
    throw DomainError(msg.str());
  }
  Vec b = b_raw;
  sys.project(b);

  SolveOutcome sol;
  if (opt.method != InverseMethod::gmres) {
    sol = solve_cg(sys, b, opt.tol, opt.max_iter);
    res.history = sol.history;
  }
  if (!sol.converged && opt.method != InverseMethod::cg) {
    if (opt.method == InverseMethod::automatic) {
      res.used_fallback = true;
      log_warning("invert_LM_micro: conjugate gradients stalled, switching to GMRES");
    }
    const int left = std::max(1, opt.max_iter - sol.iterations);
    SolveOutcome g = solve_gmres(sys, b, opt.tol, left, opt.gmres_restart, sol.x);
    res.history.insert(res.history.end(), g.history.begin(), g.history.end());
    g.iterations += sol.iterations;
    sol = std::move(g);
  }
  res.iterations = sol.iterations;
  res.g = sys.to_g(sol.x);
  Vec r = b_raw;
  axpy(-1.0, sys.apply(sol.x), r);
  res.relative_residual = norm(r) / bn;
  if (!sol.converged || !(res.relative_residual <= 2.0 * opt.tol)) {
    std::ostringstream msg;
    msg << "invert_LM_micro: no convergence after " << res.iterations << " iterations, relative residual "
        << res.relative_residual;
    throw ConvergenceError(msg.str(), res.history);
  }
  return res;
}

GridFunction invert_LM_micro(const GridFunction& h, const GasState& s, const KernelParams& p, double tol,
                             int max_iter) {
  LinearizedLandau lm(s, h.grid, p);
  InverseOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  return invert_LM_micro(lm, h, opt).g;
}

}  // namespace hydrolimit
