#include "hydrolimit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "hydrolimit/errors.hpp"

namespace hydrolimit {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || trim(v.substr(used)) != "") throw ConfigError("config: bad number for " + key + ": '" + v + "'");
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x)) throw ConfigError("config: " + key + " must be an integer");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("config: bad boolean for " + key + ": '" + v + "'");
}

// "2^-4" or a plain number
double eps_token(const std::string& t) {
  const std::string s = trim(t);
  if (s.rfind("2^", 0) == 0) return std::pow(2.0, to_double("eps", s.substr(2)));
  return to_double("eps", s);
}

std::string csv_safe(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

SweepRow run_one(const SweepConfig& cfg, const TransportTable& tr, double eps) {
  SweepRow row;
  row.eps = eps;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const SolverConfig sc = cfg.run_config(eps);
    row.delta = sc.delta();
    const SmoothWave w(RiemannData::on_curve(cfg.left, cfg.rho_plus), sc.delta());
    FluidField f = initial_data(sc, w);
    row.cells = f.n;
    RunOptions opt;
    opt.samples = cfg.samples;
    const RunResult r = simulate(sc, w, tr, std::move(f), opt);
    const RunSample& last = r.series.back();
    row.fluid_sup = last.fluid_sup;
    row.maxwellian_sup = last.maxwellian_sup;
    row.sup_E2 = r.sup_E2;
    row.int_D2 = r.int_D2;
    row.ratio_min = r.ratio_min;
    row.ratio_max = r.ratio_max;
    row.max_audit = r.max_audit;
    row.steps = r.steps;
    row.imex = r.imex;
    row.series = r.series;
    row.final_state = r.final_state;
  } catch (const std::exception& e) {
    row.status = "failed: " + std::string(e.what());
  }
  row.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

}  // namespace

void SweepConfig::validate() const {
  if (!(a >= 2.0 / 3.0 - 1e-12 && a <= 1.0 + 1e-12)) throw ConfigError("sweep: a must lie in [2/3, 1]");
  if (!(k > 0.0)) throw ConfigError("sweep: k must be positive");
  if (!(t_eval > 0.0)) throw ConfigError("sweep: t_eval must be positive");
  if (eps_list.empty()) throw ConfigError("sweep: empty eps list");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0) || !(eps_list[i] < eps0))
      throw ConfigError("sweep: every eps must lie in (0, eps0 = " + num(eps0) + ")");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw ConfigError("sweep: eps list must decrease");
  }
  if (samples < 1) throw ConfigError("sweep: samples must be positive");
  if (threads < 1) throw ConfigError("sweep: threads must be positive");
  const RiemannData d = RiemannData::on_curve(left, rho_plus);
  if (d.wave_strength() > eta0)
    throw ConfigError("sweep: wave strength " + num(d.wave_strength()) + " exceeds eta0 = " + num(eta0));
  solver.validate();
}

SolverConfig SweepConfig::run_config(double eps) const {
  SolverConfig s = solver;
  s.eps = eps;
  s.a = a;
  s.k = k;
  s.t_end = t_eval;
  return s;
}

std::vector<double> parse_eps_list(const std::string& s) {
  std::vector<double> out;
  const auto range = s.find("..");
  if (range != std::string::npos) {
    const std::string lo = trim(s.substr(0, range)), hi = trim(s.substr(range + 2));
    if (lo.rfind("2^", 0) != 0 || hi.rfind("2^", 0) != 0) throw ConfigError("config: ranges take the form 2^-m..2^-n");
    const int p = to_int("eps", lo.substr(2)), q = to_int("eps", hi.substr(2));
    const int stepd = p <= q ? 1 : -1;
    for (int e = p;; e += stepd) {
      out.push_back(std::ldexp(1.0, e));
      if (e == q) break;
    }
    return out;
  }
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!trim(tok).empty()) out.push_back(eps_token(tok));
  if (out.empty()) throw ConfigError("config: empty eps list");
  return out;
}

void apply_setting(SweepConfig& cfg, const std::string& key_in, const std::string& value_in) {
  const std::string key = trim(key_in), v = trim(value_in);
  SolverConfig& s = cfg.solver;
  if (key == "a") cfg.a = to_double(key, v);
  else if (key == "k") cfg.k = to_double(key, v);
  else if (key == "eps") cfg.eps_list = parse_eps_list(v);
  else if (key == "t_eval") cfg.t_eval = to_double(key, v);
  else if (key == "rho_plus") cfg.rho_plus = to_double(key, v);
  else if (key == "eps0") cfg.eps0 = to_double(key, v);
  else if (key == "eta0") cfg.eta0 = to_double(key, v);
  else if (key == "samples") cfg.samples = to_int(key, v);
  else if (key == "threads") cfg.threads = to_int(key, v);
  else if (key == "out") cfg.out = v;
  else if (key == "run_files") cfg.run_files = to_bool(key, v);
  else if (key == "cfl_hyp") s.cfl_hyp = to_double(key, v);
  else if (key == "cfl_diff") s.cfl_diff = to_double(key, v);
  else if (key == "imex_ratio") s.imex_ratio = to_double(key, v);
  else if (key == "cells_per_layer") s.cells_per_layer = to_double(key, v);
  else if (key == "cells_per_fan") s.cells_per_fan = to_double(key, v);
  else if (key == "dx") s.dx = to_double(key, v);
  else if (key == "margin") s.margin = to_double(key, v);
  else if (key == "min_layer_cells") s.min_layer_cells = to_double(key, v);
  else if (key == "diffusion") {
    if (v == "explicit") s.diffusion = DiffusionMode::explicit_step;
    else if (v == "imex") s.diffusion = DiffusionMode::imex;
    else if (v == "auto") s.diffusion = DiffusionMode::automatic;
    else throw ConfigError("config: diffusion must be explicit, imex or auto");
  } else {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

void read_sweep_config(std::istream& is, SweepConfig& cfg) {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
}

RateFit rate_fit(const std::vector<double>& eps, const std::vector<double>& err, double target) {
  RateFit f;
  f.target = target;
  if (eps.size() != err.size()) throw ConfigError("rate_fit: size mismatch");
  std::vector<double> x, y, yr;
  double lo = 1e300, hi = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0 && eps[i] < 1.0) || !(err[i] > 0.0) || !std::isfinite(err[i])) continue;
    const double le = std::log(eps[i]);
    x.push_back(le);
    y.push_back(std::log(err[i] / std::abs(le)));
    yr.push_back(std::log(err[i]));
    lo = std::min(lo, eps[i]);
    hi = std::max(hi, eps[i]);
    f.bound_ratio.push_back(err[i] / (std::pow(eps[i], target) * std::abs(le)));
  }
  f.rows = static_cast<int>(x.size());
  if (f.rows < 4) {
    f.message = "insufficient rows (" + std::to_string(f.rows) + " usable, need 4)";
    return f;
  }
  if (hi / lo < 4.0 * (1.0 - 1e-12)) {
    f.message = "degenerate spread: eps range covers less than two octaves";
    return f;
  }
  const PowerFit corrected = power_fit(x, y), raw = power_fit(x, yr);
  f.p_hat = corrected.exponent;
  f.c_hat = corrected.constant;
  f.residual = corrected.residual;
  f.p_raw = raw.exponent;
  f.c_raw = raw.constant;
  f.bound_ratio_max = *std::max_element(f.bound_ratio.begin(), f.bound_ratio.end());
  f.bound_nonincreasing = true;
  for (std::size_t i = 1; i < f.bound_ratio.size(); ++i)
    if (f.bound_ratio[i] > f.bound_ratio[i - 1]) f.bound_nonincreasing = false;
  f.ok = true;
  f.message = "ok";
  return f;
}

// Least squares y = ln C + p x on (x, y) that are already logarithms.
PowerFit power_fit(const std::vector<double>& x, const std::vector<double>& y) {
  PowerFit r;
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return r;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) return r;
  r.exponent = sxy / sxx;
  const double b = my - r.exponent * mx;
  r.constant = std::exp(b);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) ss += std::pow(y[i] - b - r.exponent * x[i], 2);
  r.residual = std::sqrt(ss / n);
  r.ok = true;
  return r;
}

RateFit rate_fit(const std::vector<SweepRow>& rows, double a) {
  std::vector<double> e, v;
  for (const auto& r : rows)
    if (r.ok()) {
      e.push_back(r.eps);
      v.push_back(r.fluid_sup);
    }
  return rate_fit(e, v, 0.6 - 0.4 * a);
}

void fit_sweep(SweepResult& r) {
  r.fit = rate_fit(r.rows, r.cfg.a);
  std::vector<double> e, m, le, lE;
  for (const auto& row : r.rows)
    if (row.ok()) {
      e.push_back(row.eps);
      m.push_back(row.maxwellian_sup);
      if (row.sup_E2 > 0.0) {
        le.push_back(std::log(row.eps));
        lE.push_back(std::log(row.sup_E2));
      }
    }
  r.maxwellian_fit = rate_fit(e, m, r.cfg.target_exponent());
  r.energy_fit = le.size() >= 4 ? power_fit(le, lE) : PowerFit{};
}

SweepResult run_sweep(const SweepConfig& cfg, const TransportTable& tr) {
  cfg.validate();
  SweepResult res;
  res.cfg = cfg;
  const std::size_t n = cfg.eps_list.size();
  res.rows.resize(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) res.rows[i] = run_one(cfg, tr, cfg.eps_list[i]);
  };
  const int nt = std::clamp(cfg.threads, 1, static_cast<int>(n));
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  fit_sweep(res);
  return res;
}

void write_rows_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "eps,delta,fluid_sup,maxwellian_sup,sup_E2_fluid,int_D2_fluid,entropy_ratio_min,entropy_ratio_max,"
        "max_audit,steps,cells,imex,status\n";
  for (const auto& r : rows) {
    os << num(r.eps) << ',' << num(r.delta) << ',' << num(r.fluid_sup) << ',' << num(r.maxwellian_sup) << ','
       << num(r.sup_E2) << ',' << num(r.int_D2) << ',' << num(r.ratio_min) << ',' << num(r.ratio_max) << ','
       << num(r.max_audit) << ',' << r.steps << ',' << r.cells << ',' << (r.imex ? 1 : 0) << ','
       << csv_safe(r.status) << '\n';
  }
}

std::vector<SweepRow> read_rows_csv(std::istream& is) {
  std::vector<SweepRow> rows;
  std::string line;
  if (!std::getline(is, line) || line.rfind("eps,delta", 0) != 0) throw ConfigError("read_rows_csv: missing header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> c;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) c.push_back(cell);
    if (c.size() != 13) throw ConfigError("read_rows_csv: expected 13 columns: " + line);
    SweepRow r;
    double* d[9] = {&r.eps, &r.delta, &r.fluid_sup, &r.maxwellian_sup, &r.sup_E2,
                    &r.int_D2, &r.ratio_min, &r.ratio_max, &r.max_audit};
    for (int i = 0; i < 9; ++i) *d[i] = to_double("csv", c[i]);
    r.steps = static_cast<long>(to_double("csv", c[9]));
    r.cells = to_int("csv", c[10]);
    r.imex = c[11] == "1";
    r.status = c[12];
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

void write_fit(std::ostream& os, const std::string& tag, const RateFit& f) {
  os << tag << ".status = " << (f.ok ? "ok" : f.message) << '\n';
  os << tag << ".rows = " << f.rows << '\n';
  os << tag << ".target_exponent = " << num(f.target) << '\n';
  if (!f.ok) return;
  os << tag << ".p_hat = " << num(f.p_hat) << '\n';
  os << tag << ".C_hat = " << num(f.c_hat) << '\n';
  os << tag << ".residual = " << num(f.residual) << '\n';
  os << tag << ".p_uncorrected = " << num(f.p_raw) << '\n';
  os << tag << ".C_uncorrected = " << num(f.c_raw) << '\n';
  os << tag << ".bound_ratio_max = " << num(f.bound_ratio_max) << '\n';
  os << tag << ".bound_ratio_nonincreasing = " << (f.bound_nonincreasing ? "yes" : "no") << '\n';
  os << tag << ".bound_ratio =";
  for (double b : f.bound_ratio) os << ' ' << num(b);
  os << '\n';
}

}  // namespace

void write_summary(std::ostream& os, const SweepResult& r) {
  const SweepConfig& c = r.cfg;
  int ok = 0;
  for (const auto& row : r.rows) ok += row.ok() ? 1 : 0;
  os << "# sweep summary\n";
  os << "a = " << num(c.a) << "\nk = " << num(c.k) << "\nt_eval = " << num(c.t_eval) << "\nrho_plus = "
     << num(c.rho_plus) << '\n';
  os << "rows = " << r.rows.size() << "\nrows_ok = " << ok << '\n';
  if (ok < 4) os << "note = insufficient rows\n";
  write_fit(os, "fluid", r.fit);
  write_fit(os, "maxwellian", r.maxwellian_fit);
  os << "energy.status = " << (r.energy_fit.ok ? "ok" : "insufficient rows") << '\n';
  if (r.energy_fit.ok) {
    os << "energy.exponent = " << num(r.energy_fit.exponent) << '\n';
    os << "energy.constant = " << num(r.energy_fit.constant) << '\n';
    os << "energy.residual = " << num(r.energy_fit.residual) << '\n';
    os << "energy.target_exponent = " << num(1.2 - 0.8 * c.a) << '\n';
  }
}

void write_plot_data(std::ostream& os, const SweepResult& r) {
  os << "# eps fluid_sup maxwellian_sup bound_shape\n";
  for (const auto& row : r.rows) {
    if (!row.ok()) continue;
    const double shape = r.fit.ok ? r.fit.c_hat * std::pow(row.eps, r.fit.p_hat) * std::abs(std::log(row.eps)) : NAN;
    os << num(row.eps) << ' ' << num(row.fluid_sup) << ' ' << num(row.maxwellian_sup) << ' ' << num(shape) << '\n';
  }
}

void report(const SweepResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream os(dir / name);
    if (!os) throw std::runtime_error("report: cannot write " + (dir / name).string());
    return os;
  };
  auto check = [&](std::ofstream& os, const std::string& name) {
    os.flush();
    if (!os) throw std::runtime_error("report: write failed for " + (dir / name).string());
  };
  {
    auto os = open("rows.csv");
    write_rows_csv(os, r.rows);
    check(os, "rows.csv");
  }
  {
    auto os = open("summary.txt");
    write_summary(os, r);
    check(os, "summary.txt");
  }
  {
    auto os = open("plot.dat");
    write_plot_data(os, r);
    check(os, "plot.dat");
  }
  {
    auto os = open("timing.csv");
    os << "eps,runtime_s\n";
    for (const auto& row : r.rows) os << num(row.eps) << ',' << num(row.runtime) << '\n';
    check(os, "timing.csv");
  }
  if (!r.cfg.run_files) return;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    if (r.rows[i].series.empty()) continue;
    const std::string name = "series_" + std::to_string(i) + ".csv";
    auto os = open(name);
    write_series_csv(os, r.rows[i].series);
    check(os, name);
    const std::string snap = "snapshot_" + std::to_string(i) + ".csv";
    auto ss = open(snap);
    write_snapshot(ss, r.rows[i].final_state);
    check(ss, snap);
  }
}

}  // namespace hydrolimit
