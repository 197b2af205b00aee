#pragma once

// mu(theta), kappa(theta) tabulated from Burnett solves and interpolated by
// monotone cubic Hermite splines (Fritsch-Carlson slopes). Outside the table
// the value is clamped to the end point and a warning is emitted once per
// table.

#include <atomic>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "hydrolimit/burnett.hpp"

namespace hydrolimit {

struct TransportRow {
  double theta = 0.0;
  double mu = 0.0;
  double kappa = 0.0;
  /// Largest round-trip residual over the solved components.
  double residual = 0.0;
  double grid_defect = 0.0;
};

/// Identifies the velocity discretisation the table was built on.
struct GridKey {
  int n = 32;
  double radii = 8.0;
  double gamma = -3.0;
  double diag_regularization = 0.0;
  int difference_order = 4;

  [[nodiscard]] std::string str() const;
  bool operator==(const GridKey&) const = default;
};

inline const std::vector<double> kDefaultThetas{0.8, 1.0, 1.25, 1.5, 1.75, 2.0, 2.5};

class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  /// x strictly increasing, at least two points.
  MonotoneCubic(std::vector<double> x, std::vector<double> y);
  /// Clamped to [x.front(), x.back()].
  [[nodiscard]] double operator()(double x) const;
  [[nodiscard]] double derivative(double x) const;

 private:
  std::vector<double> x_, y_, m_;
};

class TransportTable {
 public:
  TransportTable(std::vector<TransportRow> rows, GridKey key = {});

  /// Constant coefficients on [theta_lo, theta_hi]; for tests and ablations.
  static TransportTable constant(double mu, double kappa, double theta_lo = 0.75, double theta_hi = 3.0);

  [[nodiscard]] const std::vector<TransportRow>& rows() const { return rows_; }
  [[nodiscard]] const GridKey& key() const { return key_; }
  [[nodiscard]] double theta_min() const { return rows_.front().theta; }
  [[nodiscard]] double theta_max() const { return rows_.back().theta; }

  [[nodiscard]] double mu(double theta) const;
  [[nodiscard]] double kappa(double theta) const;
  /// Number of clamped lookups so far.
  [[nodiscard]] long clamped() const { return clamped_->load(); }

 private:
  double clamp(double theta) const;

  std::vector<TransportRow> rows_;
  GridKey key_;
  MonotoneCubic mu_, kappa_;
  std::shared_ptr<std::atomic<long>> clamped_;
};

/// One Burnett solve per theta at (rho, u) = (1, 0); theta values are solved
/// concurrently on up to `threads` workers. Rows come back in input order.
TransportTable build_transport_table(const std::vector<double>& thetas, const BurnettOptions& opt = {},
                                     int threads = 1);

GridKey grid_key(const BurnettOptions& opt);

void write_transport_csv(std::ostream& os, const TransportTable& t);
/// Reads `path` when it exists and carries the grid key and theta nodes of
/// the request; otherwise builds the table and writes it there.
TransportTable load_or_build_table(const std::filesystem::path& path, const std::vector<double>& thetas,
                                   const BurnettOptions& opt = {}, int threads = 1);
TransportTable read_transport_csv(std::istream& is);

}  // namespace hydrolimit
