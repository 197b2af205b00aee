#include "hydrolimit/transport_table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "hydrolimit/errors.hpp"
#include "hydrolimit/log.hpp"

namespace hydrolimit {

std::string GridKey::str() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "N%d_R%.17g_g%.17g_r%.17g_o%d", n, radii, gamma, diag_regularization,
                difference_order);
  return buf;
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw ConfigError("MonotoneCubic: need at least two points");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1])) throw ConfigError("MonotoneCubic: abscissae must increase");
  std::vector<double> d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
  m_.assign(n, 0.0);
  m_[0] = d[0];
  m_[n - 1] = d[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) m_[i] = d[i - 1] * d[i] <= 0.0 ? 0.0 : 0.5 * (d[i - 1] + d[i]);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (d[i] == 0.0) {
      m_[i] = m_[i + 1] = 0.0;
      continue;
    }
    const double a = m_[i] / d[i], b = m_[i + 1] / d[i];
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double tau = 3.0 / std::sqrt(s);
      m_[i] = tau * a * d[i];
      m_[i + 1] = tau * b * d[i];
    }
  }
}

namespace {
std::size_t interval(const std::vector<double>& x, double v) {
  auto it = std::upper_bound(x.begin(), x.end(), v);
  std::size_t i = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
  return std::min(i, x.size() - 2);
}
}  // namespace

double MonotoneCubic::operator()(double x) const {
  x = std::clamp(x, x_.front(), x_.back());
  const std::size_t i = interval(x_, x);
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * m_[i] + (-2 * t3 + 3 * t2) * y_[i + 1] +
         (t3 - t2) * h * m_[i + 1];
}

double MonotoneCubic::derivative(double x) const {
  if (x < x_.front() || x > x_.back()) return 0.0;
  const std::size_t i = interval(x_, x);
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * y_[i] + (3 * t2 - 4 * t + 1) * h * m_[i] + (-6 * t2 + 6 * t) * y_[i + 1] +
          (3 * t2 - 2 * t) * h * m_[i + 1]) /
         h;
}

TransportTable::TransportTable(std::vector<TransportRow> rows, GridKey key)
    : rows_(std::move(rows)), key_(key), clamped_(std::make_shared<std::atomic<long>>(0)) {
  if (rows_.size() < 2) throw ConfigError("TransportTable: need at least two rows");
  std::vector<double> th, mu, ka;
  for (const auto& r : rows_) {
    if (!(r.mu > 0.0) || !(r.kappa > 0.0)) throw DomainError("TransportTable: coefficients must be positive");
    th.push_back(r.theta);
    mu.push_back(r.mu);
    ka.push_back(r.kappa);
  }
  mu_ = MonotoneCubic(th, mu);
  kappa_ = MonotoneCubic(th, ka);
}

TransportTable TransportTable::constant(double mu, double kappa, double theta_lo, double theta_hi) {
  return TransportTable({{theta_lo, mu, kappa, 0.0, 0.0}, {theta_hi, mu, kappa, 0.0, 0.0}});
}

double TransportTable::clamp(double theta) const {
  if (theta < theta_min() || theta > theta_max()) {
    if ((*clamped_)++ == 0) {
      std::ostringstream msg;
      msg << "transport table: theta = " << theta << " outside [" << theta_min() << ", " << theta_max()
          << "], clamping";
      log_warning(msg.str());
    }
    return std::clamp(theta, theta_min(), theta_max());
  }
  return theta;
}

double TransportTable::mu(double theta) const { return mu_(clamp(theta)); }
double TransportTable::kappa(double theta) const { return kappa_(clamp(theta)); }

GridKey grid_key(const BurnettOptions& opt) {
  return {opt.n, opt.radii, opt.kernel.gamma, opt.kernel.diag_regularization, opt.kernel.difference_order};
}

TransportTable build_transport_table(const std::vector<double>& thetas, const BurnettOptions& opt, int threads) {
  if (thetas.size() < 2) throw ConfigError("build_transport_table: need at least two theta values");
  for (double t : thetas)
    if (!(t > 0.75 && t < 3.0)) throw DomainError("build_transport_table: theta must lie in (3/4, 3)");
  std::vector<TransportRow> rows(thetas.size());
  std::vector<std::exception_ptr> errors(thetas.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < thetas.size();) {
      try {
        const BurnettSolution sol = burnett_solve(GasState{1.0, {0.0, 0.0, 0.0}, thetas[i]}, opt);
        double res = 0.0;
        for (const auto& c : sol.solves) res = std::max(res, c.residual);
        rows[i] = {thetas[i], sol.mu_theta, sol.kappa_theta, res, sol.grid_defect};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int nt = std::clamp(threads, 1, static_cast<int>(thetas.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.theta < b.theta; });
  return TransportTable(std::move(rows), grid_key(opt));
}

void write_transport_csv(std::ostream& os, const TransportTable& t) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "# grid %d %.17g %.17g %.17g %d\n", t.key().n, t.key().radii, t.key().gamma,
                t.key().diag_regularization, t.key().difference_order);
  os << buf << "theta,mu,kappa,residual,grid_defect,grid_key\n";
  for (const auto& r : t.rows()) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,", r.theta, r.mu, r.kappa, r.residual,
                  r.grid_defect);
    os << buf << t.key().str() << '\n';
  }
}

TransportTable read_transport_csv(std::istream& is) {
  std::string line;
  GridKey key;
  std::vector<TransportRow> rows;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string tag;
      ss >> tag;
      if (tag == "grid" && !(ss >> key.n >> key.radii >> key.gamma >> key.diag_regularization >> key.difference_order))
        throw ConfigError("read_transport_csv: malformed grid line");
      continue;
    }
    if (!header) {
      if (line.rfind("theta,mu,kappa", 0) != 0) throw ConfigError("read_transport_csv: missing header");
      header = true;
      continue;
    }
    TransportRow r;
    std::istringstream ss(line);
    std::string cell;
    double* fields[5] = {&r.theta, &r.mu, &r.kappa, &r.residual, &r.grid_defect};
    for (double* f : fields) {
      if (!std::getline(ss, cell, ',')) throw ConfigError("read_transport_csv: short row: " + line);
      try {
        *f = std::stod(cell);
      } catch (const std::exception&) {
        throw ConfigError("read_transport_csv: bad number in row: " + line);
      }
    }
    rows.push_back(r);
  }
  if (!header) throw ConfigError("read_transport_csv: empty input");
  return TransportTable(std::move(rows), key);
}

TransportTable load_or_build_table(const std::filesystem::path& path, const std::vector<double>& thetas,
                                   const BurnettOptions& opt, int threads) {
  const GridKey want = grid_key(opt);
  if (std::filesystem::exists(path)) {
    std::ifstream is(path);
    try {
      TransportTable t = read_transport_csv(is);
      bool same = t.key().str() == want.str() && t.rows().size() == thetas.size();
      for (std::size_t i = 0; same && i < thetas.size(); ++i) same = t.rows()[i].theta == thetas[i];
      if (same) return t;
      log_warning("transport table " + path.string() + " was built for another grid, rebuilding");
    } catch (const ConfigError& e) {
      log_warning("transport table " + path.string() + " unreadable (" + e.what() + "), rebuilding");
    }
  }
  TransportTable t = build_transport_table(thetas, opt, threads);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  write_transport_csv(os, t);
  if (!os) throw std::runtime_error("load_or_build_table: cannot write " + path.string());
  return t;
}

}  // namespace hydrolimit
