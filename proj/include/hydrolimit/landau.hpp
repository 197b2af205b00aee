#pragma once

// Discrete Landau collision operator on a VelocityGrid.
//
// Q(F1, F2) = -sum_i D_i^T J_i,  J_i = sum_j a_ij[F1] D_j F2 - b_i[F1] F2,
//   a_ij[F] = w sum_l phi_ij(v - v_l) F_l,  b_i[F] = w sum_l sum_j phi_ij(v - v_l) (D_j F)_l,
// with D_j a centred difference (second or fourth order; second-order
// one-sided rows at the box faces) and w = h^3. Tested against
// psi = 1, v, |v|^2/2 the weak form telescopes: every row of D_j is exact on
// quadratics, phi is even with phi(z) z = 0, so mass,
// momentum and energy of Q(F, F) vanish to round-off.

#include <array>
#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "hydrolimit/velocity_grid.hpp"

namespace hydrolimit {

struct KernelParams {
  double gamma = -3.0;
  /// r >= 0: |z| -> sqrt(|z|^2 + (r h)^2), and phi(0) = (2/3) I (r h)^{gamma+2}.
  /// r = 0 drops the coincident-node term.
  double diag_regularization = 0.0;
  /// Order of the centred velocity differences D (2 or 4).
  int difference_order = 4;

  /// Throws ConfigError unless -3 <= gamma < -2 and r >= 0.
  void validate() const;
};

using Mat3 = std::array<std::array<double, 3>, 3>;

/// (I - z z^T / |z|^2) |z|^{gamma+2}; zero matrix at z = 0.
Mat3 phi_kernel(const Vec3& z, const KernelParams& p);

enum class ConvolutionMethod { fft, direct };

/// Six-slot symmetric matrix field (11, 22, 33, 12, 13, 23) and a vector field.
using SymField = std::array<std::vector<double>, 6>;
using VecField = std::array<std::vector<double>, 3>;

inline constexpr int kSymSlot[3][3] = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};

struct KernelSpectrum;

/// Discrete convolutions with phi on a fixed lattice. The FFT path uses
/// zero padding to 2N per axis, which reproduces the direct pairwise sum to
/// round-off. Instances own scratch buffers: one instance per thread.
class KernelConvolver {
 public:
  KernelConvolver(const VelocityGrid& g, const KernelParams& p, ConvolutionMethod m = ConvolutionMethod::fft);
  ~KernelConvolver();
  KernelConvolver(const KernelConvolver&) = delete;
  KernelConvolver& operator=(const KernelConvolver&) = delete;

  [[nodiscard]] const VelocityGrid& grid() const { return grid_; }
  [[nodiscard]] const KernelParams& params() const { return params_; }
  [[nodiscard]] ConvolutionMethod method() const { return method_; }

  /// a_s = w sum_l phi_s(v_k - v_l) f_l
  void matrix(const std::vector<double>& f, SymField& out);
  /// b_i = w sum_l sum_j phi_ij(v_k - v_l) g_j(l)
  void vector(const VecField& g, VecField& out);
  /// w sum_l |v_k - v_l|^{gamma+2} f_l, with the same diagonal handling.
  std::vector<double> scalar(const std::vector<double>& f);

 private:
  VelocityGrid grid_;
  KernelParams params_;
  ConvolutionMethod method_;
  std::shared_ptr<const KernelSpectrum> spectrum_;
  struct Work;
  std::unique_ptr<Work> work_;
};

/// sigma^{ij} = phi^{ij} * mu on the lattice.
CollisionCoeffs collision_frequency(const VelocityGrid& g, const KernelParams& p,
                                    ConvolutionMethod m = ConvolutionMethod::fft);
/// Same, reading/writing a binary cache file keyed by (L, N, center, gamma, r).
CollisionCoeffs collision_frequency_cached(const VelocityGrid& g, const KernelParams& p,
                                           const std::filesystem::path& cache_dir, bool* from_cache = nullptr);

/// Coefficient fields of the first argument of Q.
struct CollisionField {
  SymField a;
  VecField b;
};

class LandauOperator {
 public:
  LandauOperator(const VelocityGrid& g, const KernelParams& p = {}, ConvolutionMethod m = ConvolutionMethod::fft);

  [[nodiscard]] const VelocityGrid& grid() const { return conv_.grid(); }
  [[nodiscard]] const KernelParams& params() const { return conv_.params(); }

  CollisionField field(const GridFunction& f1);
  /// -sum_i D_i^T (a D f2 - b f2)_i
  GridFunction apply(const CollisionField& c, const GridFunction& f2) const;
  GridFunction Q(const GridFunction& f1, const GridFunction& f2);
  /// D_axis f
  [[nodiscard]] std::vector<double> derivative(const GridFunction& f, int axis) const;
  [[nodiscard]] std::vector<double> derivative(const std::vector<double>& f, int axis) const;
  /// out -= sum_i D_i^T flux_i
  void subtract_divergence(const VecField& flux, std::vector<double>& out) const;
  /// sum_m D_axis[m][k]^2 weight[m] for every node k
  [[nodiscard]] std::vector<double> squared_stencil_sum(const std::vector<double>& weight, int axis) const;
  KernelConvolver& convolver() { return conv_; }

 private:
  struct Stencil;
  KernelConvolver conv_;
  std::shared_ptr<const Stencil> stencil_;
};

GridFunction collision_Q(const GridFunction& f1, const GridFunction& f2, const KernelParams& p = {},
                         ConvolutionMethod m = ConvolutionMethod::fft);

/// Linearized operator around M. apply() uses the weak symmetric form
///   L_M h = -sum_i D_i^T J_i,  J_i = M sum_j (a_ij[M] D_j f - phi_ij * (M D_j f)),  f = h / M,
/// i.e. grad . int phi M M_* (grad f - grad_* f_*), which is exactly symmetric
/// and nonpositive in the M^{-1} pairing with null space span{chi_i}. It
/// equals Q(h, M) + Q(M, h) up to the truncation error of D; that bilinear
/// form is available as apply_bilinear().
class LinearizedLandau {
 public:
  LinearizedLandau(const GasState& s, const VelocityGrid& g, const KernelParams& p = {},
                   ConvolutionMethod m = ConvolutionMethod::fft);

  [[nodiscard]] const GasState& state() const { return state_; }
  [[nodiscard]] const VelocityGrid& grid() const { return op_.grid(); }
  [[nodiscard]] const KernelParams& params() const { return op_.params(); }
  [[nodiscard]] const GridFunction& maxwellian() const { return m_; }
  [[nodiscard]] const MacroBasis& basis() const { return basis_; }
  [[nodiscard]] const CollisionField& maxwellian_field() const { return field_m_; }

  GridFunction apply(const GridFunction& h);
  /// Q(h, M) + Q(M, h) from the discrete collision operator.
  GridFunction apply_bilinear(const GridFunction& h);
  /// Apply in the variable x = h / sqrt(M): returns L_M(sqrt(M) x) / sqrt(M).
  std::vector<double> apply_scaled(const std::vector<double>& x);
  /// Diagonal of the local part of -M^{-1/2} L_M M^{1/2}.
  [[nodiscard]] std::vector<double> scaled_diagonal() const;
  /// sup |Q(M, M)|
  [[nodiscard]] double equilibrium_defect() const { return qmm_sup_; }

 private:
  GasState state_;
  LandauOperator op_;
  GridFunction m_;
  MacroBasis basis_;
  CollisionField field_m_;
  std::vector<double> root_m_;
  double qmm_sup_ = 0.0;
};

GridFunction linearized_LM(const GridFunction& h, const GasState& s, const KernelParams& p = {},
                           ConvolutionMethod m = ConvolutionMethod::fft);

/// Gamma(h, k) = Q(sqrt(mu) h, sqrt(mu) k) / sqrt(mu)
GridFunction gamma_bilinear(const GridFunction& h, const GridFunction& k, const KernelParams& p = {});
/// Gamma(f, sqrt(mu)) + Gamma(sqrt(mu), f)
GridFunction linearized_script_L(const GridFunction& f, const KernelParams& p = {});

enum class InverseMethod { automatic, cg, gmres };

struct InverseOptions {
  double tol = 1e-6;
  int max_iter = 400;
  InverseMethod method = InverseMethod::automatic;
  /// Largest admissible |P0 h| / |h| (M^{-1}-weighted) for the input.
  double micro_tol = 1e-8;
  int gmres_restart = 60;
};

struct InverseResult {
  GridFunction g;
  int iterations = 0;
  /// |L_M g - h| / |h| in the M^{-1}-weighted norm, recomputed at exit.
  double relative_residual = 0.0;
  /// |P0 h| / |h| of the input.
  double input_macro_fraction = 0.0;
  std::vector<double> history;
  bool used_fallback = false;
};

/// Solves L_M g = h with P0 g = 0. Throws DomainError if h is not
/// microscopic and ConvergenceError (with the residual history) on stall.
InverseResult invert_LM_micro(LinearizedLandau& lm, const GridFunction& h, const InverseOptions& opt = {});
GridFunction invert_LM_micro(const GridFunction& h, const GasState& s, const KernelParams& p = {},
                             double tol = 1e-6, int max_iter = 400);

/// |f|_{M^{-1}} = sqrt(sum f^2 / M w)
double weighted_norm(const GridFunction& f, const GridFunction& m);
/// <f, g / M>
double weighted_inner(const GridFunction& f, const GridFunction& g, const GridFunction& m);

}  // namespace hydrolimit
