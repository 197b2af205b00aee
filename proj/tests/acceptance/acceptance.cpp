// Acceptance checks, one PASS/FAIL line per criterion.
//   acceptance [--criterion N]... [--table path] [--work dir] [--threads n]
// Exit status 1 when any selected criterion fails.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hydrolimit/errors.hpp"
#include "hydrolimit/harness.hpp"
#include "hydrolimit/landau.hpp"
#include "hydrolimit/log.hpp"

namespace fs = std::filesystem;
using namespace hydrolimit;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Context {
  fs::path table_path;
  fs::path work;
  int threads = 1;
  const TransportTable& table() {
    if (!table_) {
      BurnettOptions o;
      o.n = 32;
      table_ = std::make_unique<TransportTable>(load_or_build_table(table_path, kDefaultThetas, o, threads));
    }
    return *table_;
  }

 private:
  std::unique_ptr<TransportTable> table_;
};

const GasState kLeft{1.0, {0.0, 0.0, 0.0}, 1.5};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi / *lo;
}

// 1. Both invariants (entropy and u1 - sqrt(15 k0) e^{S/2} rho^{1/3}) along r3_state.
Outcome rarefaction_curve(Context&) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (const GasState& left : {kLeft, GasState{0.7, {-0.3, 0.1, 0.0}, 0.9}, GasState{2.0, {0.5, 0, 0.2}, 2.5}}) {
    const double s0 = entropy(left), b0 = riemann_invariant3(left);
    for (int i = 0; i <= 1000; ++i) {
      const double rho = left.rho * (1.0 + i / 1000.0);
      const GasState s = r3_state(left, rho);
      worst = std::max(worst, std::abs(entropy(s) - s0) / std::max(1.0, std::abs(s0)));
      worst = std::max(worst, std::abs(riemann_invariant3(s) - b0) / std::max(1.0, std::abs(b0)));
    }
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-12 && t < 1.0, fmt("max relative drift %.3g (tol 1e-12), %.2f s (limit 1 s)", worst, t)};
}

// Independent characteristic solve in long double: w = w0(x - t w), with
// w0 = m + h tanh(x / delta). Returns (w, w_x, w_t).
std::array<long double, 3> burgers_reference(const WaveParams& p, long double t, long double x) {
  const long double m = p.mean(), h = p.half_jump(), d = p.delta;
  long double lo = x - (long double)p.omega_plus * t, hi = x - (long double)p.omega_minus * t;
  long double x0 = 0.5L * (lo + hi);
  for (int it = 0; it < 400 && hi - lo > 1e-18L * (1.0L + std::fabs(x)); ++it) {
    const long double g = x0 + t * (m + h * std::tanh(x0 / d)) - x;
    (g < 0 ? lo : hi) = x0;
    x0 = 0.5L * (lo + hi);
  }
  for (int it = 0; it < 3; ++it) {
    const long double c = std::cosh(x0 / d);
    const long double g = x0 + t * (m + h * std::tanh(x0 / d)) - x;
    x0 -= g / (1.0L + t * h / (d * c * c));
  }
  const long double c = std::cosh(x0 / d);
  const long double w0p = h / (d * c * c);
  const long double w = m + h * std::tanh(x0 / d);
  const long double wx = w0p / (1.0L + t * w0p);
  return {w, wx, -w * wx};
}

// 2. Burgers residual at 1000 random points per delta and the p = inf envelope constants.
Outcome burgers_solution(Context&) {
  const auto t0 = std::chrono::steady_clock::now();
  const RiemannData d = RiemannData::on_curve(kLeft, 1.1);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> T(0.0, 10.0), X(-1.0, 1.0);
  double residual = 0.0, deriv = 0.0;
  for (double delta : {0.2, 0.1, 0.05}) {
    const SmoothWave w(d, delta);
    const WaveParams& p = w.params();
    for (int i = 0; i < 1000; ++i) {
      const double t = T(rng);
      const double x = p.mean() * t + X(rng) * (3.0 * delta + p.half_jump() * 2.0 * t);
      const BurgersValue v = burgers_eval(p, t, x);
      const auto ref = burgers_reference(p, t, x);
      // the PDE with exact derivatives, evaluated at the computed value
      residual = std::max(residual, static_cast<double>(std::fabs(ref[2] + (long double)v.value * ref[1])));
      deriv = std::max(deriv, static_cast<double>(std::fabs(v.dx - ref[1]) / (1.0L + std::fabs(ref[1]))));
      deriv = std::max(deriv, static_cast<double>(std::fabs(v.dt - ref[2]) / (1.0L + std::fabs(ref[2]))));
    }
  }
  const std::vector<double> times{0.05, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0};
  const std::vector<double> ps{kPInfinity};
  std::vector<double> c1, c2;
  for (double delta : {0.2, 0.1, 0.05}) {
    double a = 0.0, b = 0.0;
    for (const auto& r : burgers_decay_report(SmoothWave(d, delta).params(), times, ps))
      (r.j == 1 ? a : b) = std::max(r.j == 1 ? a : b, r.ratio);
    c1.push_back(a);
    c2.push_back(b);
  }
  const double t = seconds_since(t0);
  const bool pass = residual <= 1e-11 && deriv <= 1e-11 && spread(c1) <= 2.0 && spread(c2) <= 2.0 && t < 10.0;
  return {pass, fmt("residual %.3g, derivative mismatch %.3g (tol 1e-11); envelope constants j=1 %.4g %.4g %.4g (spread %.3f), "
                    "j=2 %.4g %.4g %.4g (spread %.3f), limit x2; %.2f s (limit 10 s)",
                    residual, deriv, c1[0], c1[1], c1[2], spread(c1), c2[0], c2[1], c2[2], spread(c2), t)};
}

// 3. Gap to the Riemann fan against delta t^-1 (ln(1+t) + |ln delta|).
Outcome gap_law(Context&) {
  const auto t0 = std::chrono::steady_clock::now();
  const RiemannData d = RiemannData::on_curve(kLeft, 1.1);
  const std::vector<double> times{0.5, 1.0, 2.0, 5.0}, deltas{0.2, 0.1, 0.05};
  std::vector<double> all;
  double per_t = 0.0;
  for (double t : times) {
    std::vector<double> r;
    for (double delta : deltas) r.push_back(riemann_gap(SmoothWave(d, delta), t).ratio);
    per_t = std::max(per_t, spread(r));
    all.insert(all.end(), r.begin(), r.end());
  }
  const double hi = *std::max_element(all.begin(), all.end());
  const double t = seconds_since(t0);
  return {per_t <= 2.0 && hi < 1.0 && t < 30.0,
          fmt("ratio max %.4g; spread across delta at fixed t %.3f (limit x2); spread over the whole grid %.3f; "
              "%.2f s (limit 30 s)",
              hi, per_t, spread(all), t)};
}

// 4. Q(M, M) and the moments of Q(F, F) under N = 24 -> 48; sigma cache at N = 32.
Outcome collision_operator(Context& ctx) {
  auto t0 = std::chrono::steady_clock::now();
  bool cached = false;
  collision_frequency_cached(VelocityGrid(8.0, 32), KernelParams{}, ctx.work / "sigma_cache", &cached);
  const double t_cache = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-0.6, 0.6), R(0.3, 1.0), Th(0.8, 1.6);
  std::vector<GasState> bumps;
  for (int i = 0; i < 3; ++i) bumps.push_back(GasState{R(rng), {U(rng), U(rng), U(rng)}, Th(rng)});
  double qmm[2], mass[2];
  std::array<double, 4> mom[2];
  const int ns[2] = {24, 48};
  for (int k = 0; k < 2; ++k) {
    const VelocityGrid g(8.0, ns[k]);
    const GridFunction mu = global_maxwellian(g);
    qmm[k] = sup_norm(collision_Q(mu, mu));
    GridFunction f(g);
    for (const auto& b : bumps) f = f + maxwellian(b, g);
    const GridFunction q = collision_Q(f, f);
    const auto m = conserved_moments(q);
    double scale = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) scale += std::abs(q[i]) * g.weight();
    mass[k] = std::abs(m[0]) / scale;
    for (int i = 0; i < 4; ++i) mom[k][i] = std::abs(m[1 + i]) / scale;
  }
  const double t = seconds_since(t0);
  bool moments_down = true;
  for (int i = 0; i < 4; ++i) moments_down = moments_down && (mom[1][i] < mom[0][i] || mom[1][i] <= 1e-14);
  const bool pass = qmm[0] / qmm[1] >= 3.0 && moments_down && mass[0] <= 1e-13 && mass[1] <= 1e-13 &&
                    t_cache <= 600.0 && t <= 300.0;
  return {pass, fmt("sup|Q(M,M)| %.3g -> %.3g (x%.2f, need x3); |int psi Q(F,F)|/|Q| momentum/energy "
                    "N=24 %.2g %.2g %.2g %.2g, N=48 %.2g %.2g %.2g %.2g; mass %.2g %.2g; sigma cache %.1f s%s, "
                    "checks %.1f s",
                    qmm[0], qmm[1], qmm[0] / qmm[1], mom[0][0], mom[0][1], mom[0][2], mom[0][3], mom[1][0],
                    mom[1][1], mom[1][2], mom[1][3], mass[0], mass[1], t_cache, cached ? " (cached)" : "", t)};
}

GridFunction random_micro(const LinearizedLandau& lm, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  double c[8];
  for (double& x : c) x = N(rng);
  GridFunction h(lm.grid());
  for (std::size_t k = 0; k < h.size(); ++k) {
    const Vec3 v = lm.grid().node(k);
    h[k] = (c[0] * v[0] * v[1] + c[1] * v[2] + c[2] * v[0] * v[0] * v[0] + c[3] * std::sin(v[1]) +
            c[4] * v[0] * v[2] + c[5] * std::cos(v[0] + 0.3 * v[2]) + c[6] * v[1] * v[1] * v[2] +
            c[7] * v[2] * v[2]) *
           lm.maxwellian()[k];
  }
  return project_P1(h, lm.basis());
}

// 5. Null space, sign and symmetry of L_M at N = 32.
Outcome linearized_structure(Context&) {
  LinearizedLandau lm(kLeft, VelocityGrid(8.0, 32));
  const double defect = lm.equilibrium_defect();
  const GridFunction& m = lm.maxwellian();
  double null = 0.0;
  for (int i = 0; i < 5; ++i) null = std::max(null, sup_norm(lm.apply(lm.basis().chi[i])));
  std::mt19937_64 rng(5);
  double sign = -1e300, sym = 0.0;
  std::vector<GridFunction> hs;
  for (int s = 0; s < 20; ++s) {
    hs.push_back(random_micro(lm, rng));
    const GridFunction& h = hs.back();
    sign = std::max(sign, weighted_inner(lm.apply(h), h, m) / weighted_inner(h, h, m));
  }
  for (int s = 0; s + 1 < 20; s += 2) {
    const double a = weighted_inner(lm.apply(hs[s]), hs[s + 1], m);
    const double b = weighted_inner(lm.apply(hs[s + 1]), hs[s], m);
    sym = std::max(sym, std::abs(a - b) / (std::abs(a) + std::abs(b)));
  }
  const bool pass = null <= defect && sign <= defect && sym <= defect;
  return {pass, fmt("grid defect %.3g; max ||L_M chi_i|| %.3g; max <L_M h, h/M>/<h, h/M> %.3g over 20 h; "
                    "symmetry defect %.3g",
                    defect, null, sign, sym)};
}

// 6. Transport table, Burnett property list and the decay bound at eps = 0.5.
Outcome burnett_transport(Context& ctx) {
  const auto t0 = std::chrono::steady_clock::now();
  BurnettOptions o;
  o.n = 32;
  const BurnettSolution sol = burnett_solve(kLeft, o);
  const double t_solve = seconds_since(t0);
  const PropertyReport rep = burnett_property_check(sol);
  std::string failed;
  for (const auto& it : rep.items)
    if (!it.pass) failed += " " + it.name;
  const auto dec = decay_check(sol, {0.5});
  const TransportTable& tr = ctx.table();
  bool positive = true;
  for (const auto& r : tr.rows()) positive = positive && r.mu > 0.0 && r.kappa > 0.0;
  const bool pass = positive && rep.all_pass() && std::isfinite(dec[0].constant) && t_solve <= 1800.0;
  return {pass, fmt("mu, kappa > 0 at %zu table nodes: %s; %zu properties, tolerance %.3g, failing:%s; "
                    "decay constant at eps 0.5: %.4g; solves %.1f s (limit 1800 s)",
                    tr.rows().size(), positive ? "yes" : "no", rep.items.size(), sol.solver_tol + sol.grid_defect,
                    failed.empty() ? " none" : failed.c_str(), dec[0].constant, t_solve)};
}

SweepConfig sweep_config(double a, Context& ctx) {
  SweepConfig c;
  c.a = a;
  c.threads = ctx.threads;
  c.run_files = false;
  return c;
}

// 7. Constant states, L1 self-convergence, entropy interval on short runs.
Outcome fluid_solver(Context& ctx) {
  const TransportTable& tr = ctx.table();
  bool exact = true;
  for (DiffusionMode mode : {DiffusionMode::explicit_step, DiffusionMode::imex}) {
    SolverConfig c;
    c.diffusion = mode;
    const GasState s{1.05, {0.3, -0.1, 0.2}, 1.6};
    FluidField f;
    f.x_lo = -1.0;
    f.dx = 0.01;
    f.n = 200;
    f.left_far = f.right_far = s;
    const Conserved u = to_conserved(s);
    for (int m = 0; m < 5; ++m) f.U[m].assign(f.n + 2 * FluidField::kGhost, u[m]);
    const FluidField f0 = f;
    for (int i = 0; i < 50; ++i) step(f, c, tr, 10.0, nullptr);
    for (int m = 0; m < 5; ++m) exact = exact && f.U[m] == f0.U[m];
  }

  // three grids, explicit diffusion so the time error is second order too
  SolverConfig c0;
  c0.t_end = 0.2;
  c0.dx = 0.008;
  c0.min_layer_cells = 1.0;
  c0.diffusion = DiffusionMode::explicit_step;
  const RiemannData data = RiemannData::on_curve(kLeft, 1.1);
  const SmoothWave w(data, c0.delta());
  const GridLayout base = grid_layout(c0, data);
  auto run = [&](int refine) {
    SolverConfig c = c0;
    GridLayout g = base;
    g.n *= refine;
    g.dx /= refine;
    c.dx = g.dx;
    FluidField f = initial_data(c, w, g);
    while (f.t < c.t_end) step(f, c, tr, c.t_end, nullptr);
    return f;
  };
  const FluidField f1 = run(1), f2 = run(2), f4 = run(4);
  auto l1 = [](const FluidField& coarse, const FluidField& fine) {
    const int r = fine.n / coarse.n;
    double e = 0.0;
    for (int m : {0, 1, 4})
      for (int i = 0; i < coarse.n; ++i) {
        double avg = 0.0;
        for (int q = 0; q < r; ++q) avg += fine.U[m][FluidField::kGhost + r * i + q] / r;
        e += std::abs(coarse.U[m][FluidField::kGhost + i] - avg) * coarse.dx;
      }
    return e;
  };
  FluidField f2c = f2;
  f2c.n = f2.n / 2;
  f2c.dx = 2.0 * f2.dx;
  for (int m = 0; m < 5; ++m)
    for (int i = 0; i < f2c.n; ++i)
      f2c.U[m][FluidField::kGhost + i] =
          0.5 * (f2.U[m][FluidField::kGhost + 2 * i] + f2.U[m][FluidField::kGhost + 2 * i + 1]);
  const double e1 = l1(f1, f2), e2 = l1(f2c, f4);
  const double order = std::log2(e1 / e2);

  // entropy sandwich with c1 = 4 on a short sweep at each a; the interval
  // does not need the production fan resolution
  double rmin = 1e300, rmax = 0.0;
  int runs = 0;
  bool all_ok = true;
  for (double a : {2.0 / 3.0, 0.75, 1.0}) {
    SweepConfig sc = sweep_config(a, ctx);
    sc.eps_list = {0.0625, 0.03125};
    sc.t_eval = 0.25;
    sc.samples = 20;
    sc.solver.cells_per_fan = 100.0;
    const SweepResult r = run_sweep(sc, tr);
    for (const auto& row : r.rows) {
      ++runs;
      all_ok = all_ok && row.ok();
      rmin = std::min(rmin, row.ratio_min);
      rmax = std::max(rmax, row.ratio_max);
    }
  }
  const double c1 = 4.0;
  const bool pass = exact && order >= 1.5 && all_ok && rmin >= 1.0 / c1 && rmax <= c1;
  return {pass, fmt("constant states bit-exact (explicit and IMEX): %s; L1 order %.3f (need 1.5); entropy ratio "
                    "in [%.4f, %.4f] over %d runs, interval [1/4, 4]",
                    exact ? "yes" : "no", order, rmin, rmax, runs)};
}

fs::path sweep_dir(Context& ctx, double a) { return ctx.work / fmt("sweep_a%.4f", a); }

SweepResult run_and_store(double a, Context& ctx, double* seconds) {
  const auto t0 = std::chrono::steady_clock::now();
  SweepResult r = run_sweep(sweep_config(a, ctx), ctx.table());
  *seconds = seconds_since(t0);
  report(r, sweep_dir(ctx, a));
  return r;
}

// 8. Rate fits at a = 2/3, 3/4, 1.
Outcome rate_reproduction(Context& ctx) {
  bool pass = true;
  std::string detail;
  for (double a : {2.0 / 3.0, 0.75, 1.0}) {
    double secs = 0.0;
    const SweepResult r = run_and_store(a, ctx, &secs);
    const RateFit& f = r.fit;
    const double target = r.cfg.target_exponent();
    const bool ok = f.ok && f.p_hat >= target - 0.08 && f.bound_nonincreasing && secs <= 1200.0;
    pass = pass && ok;
    detail += fmt("%sa=%.4g: p_hat %.4f (target %.4f, need >= %.4f), uncorrected %.4f, bound ratio max %.4g "
                  "%s, %.0f s%s",
                  detail.empty() ? "" : "; ", a, f.p_hat, target, target - 0.08, f.p_raw, f.bound_ratio_max,
                  f.bound_nonincreasing ? "non-increasing" : "INCREASING", secs, f.ok ? "" : (" [" + f.message + "]").c_str());
  }
  return {pass, detail};
}

// 9. Exponent of sup_t E2 (fluid part) across the a = 2/3 sweep.
Outcome energy_scaling(Context& ctx) {
  const double a = 2.0 / 3.0;
  SweepResult r;
  r.cfg = sweep_config(a, ctx);
  std::string source = "reused rows of criterion 8";
  const fs::path rows = sweep_dir(ctx, a) / "rows.csv";
  const fs::path self = fs::canonical("/proc/self/exe");
  if (fs::exists(rows) && fs::last_write_time(rows) > fs::last_write_time(self)) {
    std::ifstream is(rows);
    r.rows = read_rows_csv(is);
    fit_sweep(r);
  } else {
    double secs = 0.0;
    r = run_and_store(a, ctx, &secs);
    source = fmt("fresh sweep, %.0f s", secs);
  }
  const double target = 1.2 - 0.8 * a;
  const PowerFit& f = r.energy_fit;
  std::string e2;
  for (const auto& row : r.rows) e2 += fmt(" %.4g", row.sup_E2);
  const bool pass = f.ok && f.exponent >= target - 0.15;
  return {pass, fmt("fitted exponent %.4f (need >= %.4f); sup E2 per eps:%s (%s)", f.exponent, target - 0.15,
                    e2.c_str(), source.c_str())};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

// 10. Two runs of the same config give byte-identical output files.
Outcome reproducibility(Context& ctx) {
  const TransportTable& tr = ctx.table();
  SweepConfig c = sweep_config(2.0 / 3.0, ctx);
  c.eps_list = {0.0625, 0.03125};
  c.t_eval = 0.25;
  c.samples = 10;
  c.solver.cells_per_fan = 100.0;
  c.run_files = true;
  c.threads = std::max(2, ctx.threads);
  const fs::path d1 = ctx.work / "repro_1", d2 = ctx.work / "repro_2";
  fs::remove_all(d1);
  fs::remove_all(d2);
  report(run_sweep(c, tr), d1);
  report(run_sweep(c, tr), d2);
  int files = 0, differ = 0;
  for (const auto& e : fs::directory_iterator(d1)) {
    const std::string name = e.path().filename().string();
    if (name == "timing.csv") continue;  // wall clock
    ++files;
    if (slurp(e.path()) != slurp(d2 / name)) ++differ;
  }
  return {files > 0 && differ == 0, fmt("%d files compared, %d differ (timing.csv excluded)", files, differ)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome(Context&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<int> which;
  std::string table = "transport_table_n32.csv", work = "acceptance_work";
  int threads = 1;
  app.add_option("--criterion", which, "criterion number(s); all when omitted")->check(CLI::Range(1, 10));
  app.add_option("--table", table, "transport table cache");
  app.add_option("--work", work, "scratch directory");
  app.add_option("--threads", threads, "worker threads");
  CLI11_PARSE(app, argc, argv);
  set_warnings_enabled(false);

  Context ctx;
  ctx.table_path = table;
  ctx.work = work;
  ctx.threads = threads;
  fs::create_directories(ctx.work);
  const std::vector<Criterion> all{
      {1, "rarefaction-curve exactness", rarefaction_curve},
      {2, "Burgers characteristic solution", burgers_solution},
      {3, "gap law", gap_law},
      {4, "collision operator", collision_operator},
      {5, "linearized-operator structure", linearized_structure},
      {6, "Burnett functions and transport", burnett_transport},
      {7, "fluid solver verification", fluid_solver},
      {8, "rate reproduction", rate_reproduction},
      {9, "energy scaling", energy_scaling},
      {10, "reproducibility", reproducibility},
  };
  bool ok = true;
  for (const auto& c : all) {
    if (!which.empty() && std::find(which.begin(), which.end(), c.id) == which.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    ok = ok && o.pass;
    std::printf("criterion %2d %s  %s: %s [%.1f s]\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  return ok ? 0 : 1;
}
