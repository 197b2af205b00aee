#pragma once

// epsilon sweeps of the fluid-type system: delta tied to eps, distance to
// the Riemann fan at t_eval, power-law fit of the error, report files.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hydrolimit/fluid_diagnostics.hpp"

namespace hydrolimit {

struct SweepConfig {
  double a = 2.0 / 3.0;
  double k = 0.5;
  /// decreasing
  std::vector<double> eps_list{0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625, 0.001953125};
  double t_eval = 1.0;
  GasState left{1.0, {0.0, 0.0, 0.0}, 1.5};
  double rho_plus = 1.1;
  /// every eps must lie below eps0
  double eps0 = 0.1;
  /// bound on the wave strength |rho+ - rho-| + |u+ - u-| + |theta+ - theta-|
  double eta0 = 0.35;
  /// eps, a, k and t_end are overwritten per run
  SolverConfig solver;
  int samples = 50;
  int threads = 1;
  /// output directory; empty = no files
  std::string out;
  /// per-run time series and final snapshot
  bool run_files = true;

  /// Throws ConfigError on an invalid combination.
  void validate() const;
  [[nodiscard]] double target_exponent() const { return 0.6 - 0.4 * a; }
  [[nodiscard]] SolverConfig run_config(double eps) const;
};

/// Sets one key from the flat config format; throws ConfigError on an unknown
/// key or a malformed value. Keys: a, k, eps, t_eval, rho_plus, eps0, eta0,
/// samples, threads, out, run_files, cfl_hyp, cfl_diff, diffusion, imex_ratio,
/// cells_per_layer, cells_per_fan, dx, margin, min_layer_cells.
void apply_setting(SweepConfig& cfg, const std::string& key, const std::string& value);
/// key = value lines; '#' starts a comment.
void read_sweep_config(std::istream& is, SweepConfig& cfg);
/// "0.0625,0.03125" or "2^-4..2^-9".
std::vector<double> parse_eps_list(const std::string& s);

struct SweepRow {
  double eps = 0.0;
  double delta = 0.0;
  double fluid_sup = 0.0;
  double maxwellian_sup = 0.0;
  double sup_E2 = 0.0;
  double int_D2 = 0.0;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  double max_audit = 0.0;
  long steps = 0;
  int cells = 0;
  bool imex = false;
  /// "ok" or "failed: <reason>"
  std::string status = "ok";
  /// wall clock, kept out of the rows CSV
  double runtime = 0.0;
  std::vector<RunSample> series;
  FluidField final_state;

  [[nodiscard]] bool ok() const { return status == "ok"; }
};

struct RateFit {
  bool ok = false;
  std::string message;
  int rows = 0;
  double target = 0.0;
  /// ln(err / |ln eps|) = ln C + p ln eps
  double p_hat = 0.0;
  double c_hat = 0.0;
  double residual = 0.0;
  /// ln err = ln C + p ln eps
  double p_raw = 0.0;
  double c_raw = 0.0;
  /// err / (eps^target |ln eps|), in row order
  std::vector<double> bound_ratio;
  double bound_ratio_max = 0.0;
  bool bound_nonincreasing = false;
};

/// Least squares over the successful rows; needs >= 4 of them spanning at
/// least two octaves of eps, otherwise ok = false with the reason.
RateFit rate_fit(const std::vector<SweepRow>& rows, double a);
/// Same, for arbitrary (eps, value) pairs.
RateFit rate_fit(const std::vector<double>& eps, const std::vector<double>& err, double target);

/// Least squares y = ln C + p x for x, y already logarithms.
struct PowerFit {
  bool ok = false;
  double exponent = 0.0;
  double constant = 0.0;
  double residual = 0.0;
};
PowerFit power_fit(const std::vector<double>& x, const std::vector<double>& y);

struct SweepResult {
  SweepConfig cfg;
  std::vector<SweepRow> rows;
  RateFit fit;
  RateFit maxwellian_fit;
  PowerFit energy_fit;
};

/// Runs every eps of the config on a worker pool; rows come back in config
/// order. Failed runs keep their row with the reason in `status`.
SweepResult run_sweep(const SweepConfig& cfg, const TransportTable& tr);
/// Fits for already computed rows.
void fit_sweep(SweepResult& r);

void write_rows_csv(std::ostream& os, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_rows_csv(std::istream& is);
void write_summary(std::ostream& os, const SweepResult& r);
/// eps, error and the bound shape C_hat eps^p |ln eps|, for log-log plots.
void write_plot_data(std::ostream& os, const SweepResult& r);
/// rows.csv, summary.txt, plot.dat, timing.csv and per-run files under dir.
void report(const SweepResult& r, const std::filesystem::path& dir);

}  // namespace hydrolimit
