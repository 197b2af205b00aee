// Command-line front end: sweep, transport-table, wave-report, burnett-check.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hydrolimit/errors.hpp"
#include "hydrolimit/harness.hpp"

namespace fs = std::filesystem;
using namespace hydrolimit;

namespace {

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("bad number in list: '" + tok + "'");
    }
  }
  return out;
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

struct TableFlags {
  std::string path;
  int n = 32;
  double radii = 8.0;
  std::string thetas;
  int threads = 1;
};

BurnettOptions burnett_options(int n, double radii) {
  BurnettOptions o;
  o.n = n;
  o.radii = radii;
  return o;
}

std::vector<double> table_thetas(const std::string& s) { return s.empty() ? kDefaultThetas : parse_list(s); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hydrolimit: hydrodynamic-limit sweeps for the Landau equation"};
  app.require_subcommand(1);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "eps sweep of the fluid-type system with a rate fit");
  std::string config_file, eps_flag, out_flag;
  double a_flag = 0, k_flag = 0, t_flag = 0, rho_flag = 0;
  int threads_flag = 1;
  TableFlags sweep_table;
  auto* o_config = sweep->add_option("--config", config_file, "flat key = value file")->check(CLI::ExistingFile);
  auto* o_a = sweep->add_option("--a", a_flag, "scaling exponent, 2/3 <= a <= 1");
  auto* o_k = sweep->add_option("--k", k_flag, "constant in delta = eps^(3/5 - 2a/5) / k");
  auto* o_eps = sweep->add_option("--eps", eps_flag, "comma list or 2^-m..2^-n");
  auto* o_t = sweep->add_option("--t-eval", t_flag, "evaluation time");
  auto* o_rho = sweep->add_option("--rho-plus", rho_flag, "right density on the 3-rarefaction curve");
  auto* o_out = sweep->add_option("--out", out_flag, "output directory");
  auto* o_threads = sweep->add_option("--threads", threads_flag, "worker threads");
  std::vector<std::string> sets;
  sweep->add_option("--set", sets, "extra key=value settings (solver overrides)");
  sweep->add_option("--table", sweep_table.path, "transport table CSV (built and cached when missing)");
  sweep->add_option("--table-n", sweep_table.n, "velocity nodes per axis for the table");
  sweep->add_option("--table-thetas", sweep_table.thetas, "theta nodes of the table");
  (void)o_config;

  // transport-table
  auto* tt = app.add_subcommand("transport-table", "build mu(theta), kappa(theta) and write the CSV cache");
  TableFlags tt_flags;
  bool tt_force = false;
  tt->add_option("--out", tt_flags.path, "CSV path")->required();
  tt->add_option("--n", tt_flags.n, "velocity nodes per axis");
  tt->add_option("--radii", tt_flags.radii, "half width in thermal radii");
  tt->add_option("--thetas", tt_flags.thetas, "comma list of temperatures in (3/4, 3)");
  tt->add_option("--threads", tt_flags.threads, "worker threads");
  tt->add_flag("--force", tt_force, "rebuild even when a matching cache exists");

  // wave-report
  auto* wr = app.add_subcommand("wave-report", "decay and gap tables of the smooth rarefaction wave");
  std::string wr_out = "wave_report", wr_deltas = "0.2,0.1,0.05", wr_times = "0.5,1,2,5";
  double wr_rho = 1.1;
  wr->add_option("--out", wr_out, "output directory");
  wr->add_option("--deltas", wr_deltas, "comma list of delta");
  wr->add_option("--times", wr_times, "comma list of t");
  wr->add_option("--rho-plus", wr_rho, "right density");

  // burnett-check
  auto* bc = app.add_subcommand("burnett-check", "Burnett functions, transport coefficients and their properties");
  double bc_rho = 1.0, bc_theta = 1.5, bc_u = 0.0;
  int bc_n = 32;
  double bc_radii = 8.0;
  bool bc_all = false;
  std::string bc_out;
  bc->add_option("--rho", bc_rho, "density");
  bc->add_option("--u1", bc_u, "bulk velocity");
  bc->add_option("--theta", bc_theta, "temperature");
  bc->add_option("--n", bc_n, "velocity nodes per axis");
  bc->add_option("--radii", bc_radii, "half width in thermal radii");
  bc->add_flag("--solve-all", bc_all, "solve every component instead of using permutations");
  bc->add_option("--out", bc_out, "report file (stdout when empty)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) {
      SweepConfig cfg;
      if (!config_file.empty()) {
        std::ifstream is(config_file);
        read_sweep_config(is, cfg);
      }
      if (o_a->count()) cfg.a = a_flag;
      if (o_k->count()) cfg.k = k_flag;
      if (o_eps->count()) cfg.eps_list = parse_eps_list(eps_flag);
      if (o_t->count()) cfg.t_eval = t_flag;
      if (o_rho->count()) cfg.rho_plus = rho_flag;
      if (o_out->count()) cfg.out = out_flag;
      if (o_threads->count()) cfg.threads = threads_flag;
      for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
        apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
      }
      cfg.validate();
      const fs::path out = cfg.out.empty() ? fs::path("sweep_out") : fs::path(cfg.out);
      const fs::path table_path = sweep_table.path.empty() ? out / "transport_table.csv" : fs::path(sweep_table.path);
      const TransportTable tr = load_or_build_table(table_path, table_thetas(sweep_table.thetas),
                                                    burnett_options(sweep_table.n, 8.0), cfg.threads);
      const SweepResult r = run_sweep(cfg, tr);
      report(r, out);
      write_summary(std::cout, r);
      return 0;
    }
    if (tt->parsed()) {
      const fs::path p(tt_flags.path);
      if (tt_force && fs::exists(p)) fs::remove(p);
      const TransportTable t = load_or_build_table(p, table_thetas(tt_flags.thetas),
                                                   burnett_options(tt_flags.n, tt_flags.radii), tt_flags.threads);
      write_transport_csv(std::cout, t);
      return 0;
    }
    if (wr->parsed()) {
      const fs::path out(wr_out);
      const std::vector<double> deltas = parse_list(wr_deltas), times = parse_list(wr_times);
      const std::vector<double> ps{1.0, 2.0, kPInfinity};
      const RiemannData data = RiemannData::on_curve(GasState{1.0, {0.0, 0.0, 0.0}, 1.5}, wr_rho);
      for (double d : deltas) {
        const SmoothWave w(data, d);
        char tag[64];
        std::snprintf(tag, sizeof tag, "delta_%.6g", d);
        {
          auto os = open_out(out / (std::string("burgers_decay_") + tag + ".csv"));
          const auto rows = burgers_decay_report(w.params(), times, ps);
          write_decay_csv(os, rows);
        }
        {
          auto os = open_out(out / (std::string("wave_decay_") + tag + ".csv"));
          const auto rows = lemma_decay_report(w, times, ps);
          write_decay_csv(os, rows);
        }
        {
          std::vector<GapResult> gaps;
          for (double t : times) gaps.push_back(riemann_gap(w, t));
          auto os = open_out(out / (std::string("riemann_gap_") + tag + ".csv"));
          write_gap_csv(os, gaps, d);
        }
      }
      std::cout << "wrote wave tables to " << out.string() << '\n';
      return 0;
    }
    if (bc->parsed()) {
      BurnettOptions opt = burnett_options(bc_n, bc_radii);
      opt.solve_all = bc_all;
      const BurnettSolution sol = burnett_solve(GasState{bc_rho, {bc_u, 0.0, 0.0}, bc_theta}, opt);
      const PropertyReport rep = burnett_property_check(sol);
      std::ofstream file;
      if (!bc_out.empty()) file = open_out(bc_out);
      std::ostream& os = bc_out.empty() ? std::cout : file;
      char buf[160];
      std::snprintf(buf, sizeof buf, "mu = %.17g\nkappa = %.17g\ngrid_defect = %.17g\nsolver_tol = %.17g\n",
                    sol.mu_theta, sol.kappa_theta, sol.grid_defect, sol.solver_tol);
      os << buf;
      for (const auto& c : sol.solves) {
        std::snprintf(buf, sizeof buf, "solve %s iterations %d residual %.17g %s\n", c.name.c_str(), c.iterations,
                      c.residual, c.solved ? "solved" : "permuted");
        os << buf;
      }
      write_property_report(os, rep);
      for (const auto& d : decay_check(sol, {0.1, 0.25, 0.5})) {
        std::snprintf(buf, sizeof buf, "decay eps %.17g constant %.17g at |xi| %.17g\n", d.epsilon, d.constant,
                      d.argmax_radius);
        os << buf;
      }
      return rep.all_pass() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
