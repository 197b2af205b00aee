#include "hydrolimit/landau.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "hydrolimit/errors.hpp"
#include "hydrolimit/log.hpp"

namespace hydrolimit {

namespace {

// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double kernel_power(double r2, const KernelParams& p, double h) {
  const double reg = p.diag_regularization * h;
  return std::pow(r2 + reg * reg, 0.5 * (p.gamma + 2.0));
}

// Kernel entries (six slots, then the scalar |z|^{gamma+2}) at lattice offset m.
std::array<double, 7> kernel_entries(int m0, int m1, int m2, const KernelParams& p, double h) {
  std::array<double, 7> out{};
  if (m0 == 0 && m1 == 0 && m2 == 0) {
    if (p.diag_regularization > 0.0) {
      const double s = kernel_power(0.0, p, h);
      out = {2.0 / 3.0 * s, 2.0 / 3.0 * s, 2.0 / 3.0 * s, 0.0, 0.0, 0.0, s};
    }
    return out;
  }
  const Vec3 z{m0 * h, m1 * h, m2 * h};
  const double r2 = z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
  const double s = kernel_power(r2, p, h);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) out[kSymSlot[i][j]] = ((i == j ? 1.0 : 0.0) - z[i] * z[j] / r2) * s;
  out[6] = s;
  return out;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
template <class T>
using FftwPtr = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwPtr<T> fftw_array(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (!p) throw std::bad_alloc();
  std::memset(static_cast<void*>(p), 0, sizeof(T) * n);
  return FftwPtr<T>(p);
}

}  // namespace

struct KernelSpectrum {
  int n = 0;
  int pad = 0;
  std::size_t n_complex = 0;
  // slots 0..5: matrix entries, slot 6: scalar kernel; already scaled by w / P^3
  std::array<std::vector<std::complex<double>>, 7> hat;
  // direct path: kernel on offsets in (-(N-1), N-1)^3
  std::array<std::vector<double>, 7> table;
};

namespace {

using SpectrumKey = std::tuple<int, double, double, double, int>;

std::shared_ptr<const KernelSpectrum> build_spectrum(const VelocityGrid& g, const KernelParams& p,
                                                     ConvolutionMethod method) {
  auto spec = std::make_shared<KernelSpectrum>();
  const int n = g.n();
  const double h = g.spacing();
  const double w = g.weight();
  spec->n = n;
  if (method == ConvolutionMethod::direct) {
    const int span = 2 * n - 1;
    for (auto& t : spec->table) t.assign(static_cast<std::size_t>(span) * span * span, 0.0);
    for (int a = 0; a < span; ++a)
      for (int b = 0; b < span; ++b)
        for (int c = 0; c < span; ++c) {
          const auto e = kernel_entries(a - (n - 1), b - (n - 1), c - (n - 1), p, h);
          const std::size_t idx = (static_cast<std::size_t>(a) * span + b) * span + c;
          for (int s = 0; s < 7; ++s) spec->table[s][idx] = w * e[s];
        }
    return spec;
  }
  const int P = 2 * n;
  spec->pad = P;
  const std::size_t nreal = static_cast<std::size_t>(P) * P * P;
  spec->n_complex = static_cast<std::size_t>(P) * P * (P / 2 + 1);
  auto real = fftw_array<double>(nreal);
  auto cplx = fftw_array<fftw_complex>(spec->n_complex);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_3d(P, P, P, real.get(), cplx.get(), FFTW_ESTIMATE);
  }
  const double scale = w / static_cast<double>(nreal);
  std::vector<std::array<double, 7>> entries(nreal);
  for (int a = -(n - 1); a <= n - 1; ++a)
    for (int b = -(n - 1); b <= n - 1; ++b)
      for (int c = -(n - 1); c <= n - 1; ++c) {
        const std::size_t idx =
            (static_cast<std::size_t>((a + P) % P) * P + (b + P) % P) * P + (c + P) % P;
        entries[idx] = kernel_entries(a, b, c, p, h);
      }
  for (int s = 0; s < 7; ++s) {
    for (std::size_t i = 0; i < nreal; ++i) real[i] = entries[i][s];
    fftw_execute_dft_r2c(plan, real.get(), cplx.get());
    auto& hat = spec->hat[s];
    hat.resize(spec->n_complex);
    for (std::size_t i = 0; i < spec->n_complex; ++i) hat[i] = {cplx[i][0] * scale, cplx[i][1] * scale};
  }
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return spec;
}

// Spectra depend on (N, h, gamma, r) only, not on where the box is centred.
std::shared_ptr<const KernelSpectrum> spectrum_for(const VelocityGrid& g, const KernelParams& p,
                                                   ConvolutionMethod method) {
  static std::mutex mutex;
  static std::map<SpectrumKey, std::weak_ptr<const KernelSpectrum>> cache;
  const SpectrumKey key{g.n(), g.spacing(), p.gamma, p.diag_regularization, static_cast<int>(method)};
  std::lock_guard lock(mutex);
  if (auto it = cache.find(key); it != cache.end())
    if (auto sp = it->second.lock()) return sp;
  auto sp = build_spectrum(g, p, method);
  cache[key] = sp;
  return sp;
}

}  // namespace

void KernelParams::validate() const {
  if (!(gamma >= -3.0 && gamma < -2.0)) throw ConfigError("KernelParams: gamma must lie in [-3, -2)");
  if (!(diag_regularization >= 0.0)) throw ConfigError("KernelParams: diag_regularization must be >= 0");
  if (difference_order != 2 && difference_order != 4) throw ConfigError("KernelParams: difference_order must be 2 or 4");
}

Mat3 phi_kernel(const Vec3& z, const KernelParams& p) {
  Mat3 out{};
  const double r2 = z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
  if (r2 == 0.0) return out;
  const double s = std::pow(r2, 0.5 * (p.gamma + 2.0));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] = ((i == j ? 1.0 : 0.0) - z[i] * z[j] / r2) * s;
  return out;
}

struct KernelConvolver::Work {
  std::size_t nreal = 0;
  FftwPtr<double> real;
  std::array<FftwPtr<fftw_complex>, 3> in_hat;
  FftwPtr<fftw_complex> scratch;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

KernelConvolver::KernelConvolver(const VelocityGrid& g, const KernelParams& p, ConvolutionMethod m)
    : grid_(g), params_(p), method_(m) {
  p.validate();
  spectrum_ = spectrum_for(g, p, m);
  if (m == ConvolutionMethod::direct) return;
  work_ = std::make_unique<Work>();
  const int P = spectrum_->pad;
  work_->nreal = static_cast<std::size_t>(P) * P * P;
  work_->real = fftw_array<double>(work_->nreal);
  for (auto& a : work_->in_hat) a = fftw_array<fftw_complex>(spectrum_->n_complex);
  work_->scratch = fftw_array<fftw_complex>(spectrum_->n_complex);
  std::lock_guard lock(planner_mutex());
  work_->forward = fftw_plan_dft_r2c_3d(P, P, P, work_->real.get(), work_->in_hat[0].get(), FFTW_ESTIMATE);
  work_->backward = fftw_plan_dft_c2r_3d(P, P, P, work_->scratch.get(), work_->real.get(), FFTW_ESTIMATE);
}

KernelConvolver::~KernelConvolver() {
  if (!work_) return;
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(work_->forward);
  fftw_destroy_plan(work_->backward);
}

namespace {

void pad_into(const std::vector<double>& f, double* real, int n, int P) {
  std::fill(real, real + static_cast<std::size_t>(P) * P * P, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double* src = f.data() + (static_cast<std::size_t>(i) * n + j) * n;
      std::copy(src, src + n, real + (static_cast<std::size_t>(i) * P + j) * P);
    }
}

void extract_from(const double* real, std::vector<double>& out, int n, int P) {
  out.resize(static_cast<std::size_t>(n) * n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double* src = real + (static_cast<std::size_t>(i) * P + j) * P;
      std::copy(src, src + n, out.data() + (static_cast<std::size_t>(i) * n + j) * n);
    }
}

// out[k] = sum_l table[k - l] f[l]
void direct_convolve(const std::vector<double>& table, const std::vector<double>& f, std::vector<double>& out,
                     int n, bool accumulate) {
  const int span = 2 * n - 1;
  if (!accumulate) out.assign(f.size(), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            const double* row = table.data() +
                                (static_cast<std::size_t>(i - a + n - 1) * span + (j - b + n - 1)) * span + (k + n - 1);
            const double* fr = f.data() + (static_cast<std::size_t>(a) * n + b) * n;
            for (int c = 0; c < n; ++c) s += row[-c] * fr[c];
          }
        out[(static_cast<std::size_t>(i) * n + j) * n + k] += s;
      }
}

}  // namespace

void KernelConvolver::matrix(const std::vector<double>& f, SymField& out) {
  const int n = grid_.n();
  if (f.size() != grid_.size()) throw ConfigError("KernelConvolver: input size mismatch");
  if (method_ == ConvolutionMethod::direct) {
    for (int s = 0; s < 6; ++s) direct_convolve(spectrum_->table[s], f, out[s], n, false);
    return;
  }
  const int P = spectrum_->pad;
  const std::size_t nc = spectrum_->n_complex;
  pad_into(f, work_->real.get(), n, P);
  fftw_execute_dft_r2c(work_->forward, work_->real.get(), work_->in_hat[0].get());
  const auto* fh = reinterpret_cast<const std::complex<double>*>(work_->in_hat[0].get());
  auto* sc = reinterpret_cast<std::complex<double>*>(work_->scratch.get());
  for (int s = 0; s < 6; ++s) {
    const auto& kh = spectrum_->hat[s];
    for (std::size_t i = 0; i < nc; ++i) sc[i] = kh[i] * fh[i];
    fftw_execute_dft_c2r(work_->backward, work_->scratch.get(), work_->real.get());
    extract_from(work_->real.get(), out[s], n, P);
  }
}

void KernelConvolver::vector(const VecField& g, VecField& out) {
  const int n = grid_.n();
  for (const auto& c : g)
    if (c.size() != grid_.size()) throw ConfigError("KernelConvolver: input size mismatch");
  if (method_ == ConvolutionMethod::direct) {
    for (int i = 0; i < 3; ++i) {
      out[i].assign(grid_.size(), 0.0);
      for (int j = 0; j < 3; ++j) direct_convolve(spectrum_->table[kSymSlot[i][j]], g[j], out[i], n, true);
    }
    return;
  }
  const int P = spectrum_->pad;
  const std::size_t nc = spectrum_->n_complex;
  for (int j = 0; j < 3; ++j) {
    pad_into(g[j], work_->real.get(), n, P);
    fftw_execute_dft_r2c(work_->forward, work_->real.get(), work_->in_hat[j].get());
  }
  auto* sc = reinterpret_cast<std::complex<double>*>(work_->scratch.get());
  for (int i = 0; i < 3; ++i) {
    const auto& k0 = spectrum_->hat[kSymSlot[i][0]];
    const auto& k1 = spectrum_->hat[kSymSlot[i][1]];
    const auto& k2 = spectrum_->hat[kSymSlot[i][2]];
    const auto* g0 = reinterpret_cast<const std::complex<double>*>(work_->in_hat[0].get());
    const auto* g1 = reinterpret_cast<const std::complex<double>*>(work_->in_hat[1].get());
    const auto* g2 = reinterpret_cast<const std::complex<double>*>(work_->in_hat[2].get());
    for (std::size_t q = 0; q < nc; ++q) sc[q] = k0[q] * g0[q] + k1[q] * g1[q] + k2[q] * g2[q];
    fftw_execute_dft_c2r(work_->backward, work_->scratch.get(), work_->real.get());
    extract_from(work_->real.get(), out[i], n, P);
  }
}

std::vector<double> KernelConvolver::scalar(const std::vector<double>& f) {
  const int n = grid_.n();
  std::vector<double> out;
  if (method_ == ConvolutionMethod::direct) {
    direct_convolve(spectrum_->table[6], f, out, n, false);
    return out;
  }
  const int P = spectrum_->pad;
  const std::size_t nc = spectrum_->n_complex;
  pad_into(f, work_->real.get(), n, P);
  fftw_execute_dft_r2c(work_->forward, work_->real.get(), work_->in_hat[0].get());
  const auto* fh = reinterpret_cast<const std::complex<double>*>(work_->in_hat[0].get());
  auto* sc = reinterpret_cast<std::complex<double>*>(work_->scratch.get());
  for (std::size_t i = 0; i < nc; ++i) sc[i] = spectrum_->hat[6][i] * fh[i];
  fftw_execute_dft_c2r(work_->backward, work_->scratch.get(), work_->real.get());
  extract_from(work_->real.get(), out, n, P);
  return out;
}

CollisionCoeffs collision_frequency(const VelocityGrid& g, const KernelParams& p, ConvolutionMethod m) {
  KernelConvolver conv(g, p, m);
  CollisionCoeffs c{g, p.gamma, {}};
  conv.matrix(global_maxwellian(g).values, c.sigma);
  return c;
}

CollisionCoeffs collision_frequency_cached(const VelocityGrid& g, const KernelParams& p,
                                           const std::filesystem::path& cache_dir, bool* from_cache) {
  char name[256];
  std::snprintf(name, sizeof name, "sigma_L%.17g_N%d_c%.17g_%.17g_%.17g_g%.17g_r%.17g.bin", g.half_width(), g.n(),
                g.center()[0], g.center()[1], g.center()[2], p.gamma, p.diag_regularization);
  const auto path = cache_dir / name;
  if (from_cache) *from_cache = false;
  if (std::ifstream in(path, std::ios::binary); in) {
    try {
      CollisionCoeffs c{g, p.gamma, {}};
      for (int s = 0; s < 6; ++s) {
        double gam = 0.0;
        GridFunction f = read_grid_function_binary(in, &gam);
        if (!(f.grid == g) || gam != p.gamma) throw ConfigError("cache key mismatch");
        c.sigma[s] = std::move(f.values);
      }
      if (from_cache) *from_cache = true;
      return c;
    } catch (const std::exception& e) {
      log_warning(std::string("collision_frequency: ignoring unreadable cache ") + path.string() + ": " + e.what());
    }
  }
  CollisionCoeffs c = collision_frequency(g, p);
  std::filesystem::create_directories(cache_dir);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    for (int s = 0; s < 6; ++s) write_grid_function_binary(out, GridFunction(g, c.sigma[s]), p.gamma);
  }
  std::filesystem::rename(tmp, path);
  return c;
}

namespace {

struct StencilLine {
  std::vector<std::vector<std::pair<int, double>>> rows;
};

// Rows of the 1-D difference matrix. Every row is exact on quadratics, which
// is all the conservation argument needs; order 4 uses the five-point
// centred formula away from the two outermost nodes.
StencilLine make_stencil(int n, double h, int order) {
  StencilLine s;
  s.rows.resize(n);
  const double c2 = 1.0 / (2.0 * h);
  const double c4 = 1.0 / (12.0 * h);
  for (int r = 0; r < n; ++r) {
    auto& row = s.rows[r];
    if (r == 0) {
      row = {{0, -3.0 * c2}, {1, 4.0 * c2}, {2, -c2}};
    } else if (r == n - 1) {
      row = {{n - 3, c2}, {n - 2, -4.0 * c2}, {n - 1, 3.0 * c2}};
    } else if (order == 2 || r == 1 || r == n - 2) {
      row = {{r - 1, -c2}, {r + 1, c2}};
    } else {
      row = {{r - 2, c4}, {r - 1, -8.0 * c4}, {r + 1, 8.0 * c4}, {r + 2, -c4}};
    }
  }
  return s;
}

std::size_t axis_stride(int axis, int n) {
  return axis == 0 ? static_cast<std::size_t>(n) * n : axis == 1 ? static_cast<std::size_t>(n) : 1;
}

std::vector<double> apply_stencil(const StencilLine& st, const std::vector<double>& x, int axis, int n) {
  const std::size_t stride = axis_stride(axis, n);
  std::vector<double> out(x.size());
  for (std::size_t q = 0; q < x.size(); ++q) {
    const int pos = static_cast<int>((q / stride) % n);
    const std::size_t base = q - static_cast<std::size_t>(pos) * stride;
    double acc = 0.0;
    for (const auto& [col, c] : st.rows[pos]) acc += c * x[base + static_cast<std::size_t>(col) * stride];
    out[q] = acc;
  }
  return out;
}

// out -= D^T x along `axis`
void subtract_transpose(const StencilLine& st, const std::vector<double>& x, int axis, int n,
                        std::vector<double>& out) {
  const std::size_t stride = axis_stride(axis, n);
  for (std::size_t q = 0; q < x.size(); ++q) {
    const int pos = static_cast<int>((q / stride) % n);
    const std::size_t base = q - static_cast<std::size_t>(pos) * stride;
    for (const auto& [col, c] : st.rows[pos]) out[base + static_cast<std::size_t>(col) * stride] -= c * x[q];
  }
}

}  // namespace

struct LandauOperator::Stencil {
  StencilLine line;
};

LandauOperator::LandauOperator(const VelocityGrid& g, const KernelParams& p, ConvolutionMethod m)
    : conv_(g, p, m), stencil_(std::make_shared<Stencil>(Stencil{make_stencil(g.n(), g.spacing(), p.difference_order)})) {}

std::vector<double> LandauOperator::derivative(const GridFunction& f, int axis) const {
  return apply_stencil(stencil_->line, f.values, axis, grid().n());
}

std::vector<double> LandauOperator::derivative(const std::vector<double>& f, int axis) const {
  return apply_stencil(stencil_->line, f, axis, grid().n());
}

void LandauOperator::subtract_divergence(const VecField& flux, std::vector<double>& out) const {
  for (int i = 0; i < 3; ++i) subtract_transpose(stencil_->line, flux[i], i, grid().n(), out);
}

std::vector<double> LandauOperator::squared_stencil_sum(const std::vector<double>& weight, int axis) const {
  const int n = grid().n();
  const std::size_t stride = axis_stride(axis, n);
  std::vector<double> out(weight.size(), 0.0);
  for (std::size_t q = 0; q < weight.size(); ++q) {
    const int pos = static_cast<int>((q / stride) % n);
    const std::size_t base = q - static_cast<std::size_t>(pos) * stride;
    for (const auto& [col, c] : stencil_->line.rows[pos]) out[base + static_cast<std::size_t>(col) * stride] += c * c * weight[q];
  }
  return out;
}

CollisionField LandauOperator::field(const GridFunction& f1) {
  if (!(f1.grid == grid())) throw ConfigError("LandauOperator: grid mismatch");
  CollisionField c;
  conv_.matrix(f1.values, c.a);
  const VecField d{derivative(f1, 0), derivative(f1, 1), derivative(f1, 2)};
  conv_.vector(d, c.b);
  return c;
}

GridFunction LandauOperator::apply(const CollisionField& c, const GridFunction& f2) const {
  if (!(f2.grid == grid())) throw ConfigError("LandauOperator: grid mismatch");
  const VelocityGrid& g = grid();
  const int n = g.n();
  const std::size_t sz = g.size();
  const VecField d{derivative(f2, 0), derivative(f2, 1), derivative(f2, 2)};
  GridFunction out(g);
  std::vector<double> flux(sz);
  for (int i = 0; i < 3; ++i) {
    const auto& ai0 = c.a[kSymSlot[i][0]];
    const auto& ai1 = c.a[kSymSlot[i][1]];
    const auto& ai2 = c.a[kSymSlot[i][2]];
    for (std::size_t q = 0; q < sz; ++q)
      flux[q] = ai0[q] * d[0][q] + ai1[q] * d[1][q] + ai2[q] * d[2][q] - c.b[i][q] * f2[q];
    subtract_transpose(stencil_->line, flux, i, n, out.values);
  }
  return out;
}

GridFunction LandauOperator::Q(const GridFunction& f1, const GridFunction& f2) {
  require_same_grid(f1, f2, "collision_Q");
  return apply(field(f1), f2);
}

GridFunction collision_Q(const GridFunction& f1, const GridFunction& f2, const KernelParams& p, ConvolutionMethod m) {
  require_same_grid(f1, f2, "collision_Q");
  LandauOperator op(f1.grid, p, m);
  return op.Q(f1, f2);
}

LinearizedLandau::LinearizedLandau(const GasState& s, const VelocityGrid& g, const KernelParams& p,
                                   ConvolutionMethod m)
    : state_(s), op_(g, p, m), m_(hydrolimit::maxwellian(s, g)), basis_(macro_basis(s, g)) {
  field_m_ = op_.field(m_);
  qmm_sup_ = sup_norm(op_.apply(field_m_, m_));
  root_m_.resize(m_.size());
  for (std::size_t i = 0; i < m_.size(); ++i) root_m_[i] = std::sqrt(m_[i]);
}

GridFunction LinearizedLandau::apply_bilinear(const GridFunction& h) {
  require_same_grid(h, m_, "linearized_LM");
  GridFunction out = op_.apply(op_.field(h), m_);
  out += op_.apply(field_m_, h);
  return out;
}

namespace {
// -sum_i D_i^T [M (a D f - phi * (M D f))_i]
std::vector<double> weak_symmetric(LandauOperator& op, const SymField& a, const std::vector<double>& m,
                                   const std::vector<double>& f) {
  const std::size_t sz = f.size();
  VecField d{op.derivative(f, 0), op.derivative(f, 1), op.derivative(f, 2)};
  VecField md;
  for (int j = 0; j < 3; ++j) {
    md[j].resize(sz);
    for (std::size_t q = 0; q < sz; ++q) md[j][q] = m[q] * d[j][q];
  }
  VecField conv;
  op.convolver().vector(md, conv);
  VecField flux;
  for (int i = 0; i < 3; ++i) {
    flux[i].resize(sz);
    const auto& a0 = a[kSymSlot[i][0]];
    const auto& a1 = a[kSymSlot[i][1]];
    const auto& a2 = a[kSymSlot[i][2]];
    for (std::size_t q = 0; q < sz; ++q)
      flux[i][q] = m[q] * (a0[q] * d[0][q] + a1[q] * d[1][q] + a2[q] * d[2][q] - conv[i][q]);
  }
  std::vector<double> out(sz, 0.0);
  op.subtract_divergence(flux, out);
  return out;
}
}  // namespace

GridFunction LinearizedLandau::apply(const GridFunction& h) {
  require_same_grid(h, m_, "linearized_LM");
  std::vector<double> f(h.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = h[i] / m_[i];
  return GridFunction(m_.grid, weak_symmetric(op_, field_m_.a, m_.values, f));
}

std::vector<double> LinearizedLandau::apply_scaled(const std::vector<double>& x) {
  std::vector<double> f(x.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = x[i] / root_m_[i];
  std::vector<double> out = weak_symmetric(op_, field_m_.a, m_.values, f);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= root_m_[i];
  return out;
}

std::vector<double> LinearizedLandau::scaled_diagonal() const {
  std::vector<double> diag(m_.size(), 0.0);
  std::vector<double> w(m_.size());
  for (int i = 0; i < 3; ++i) {
    const auto& aii = field_m_.a[kSymSlot[i][i]];
    for (std::size_t q = 0; q < w.size(); ++q) w[q] = aii[q] * m_[q];
    const auto s = op_.squared_stencil_sum(w, i);
    for (std::size_t q = 0; q < w.size(); ++q) diag[q] += s[q] / m_[q];
  }
  return diag;
}

GridFunction linearized_LM(const GridFunction& h, const GasState& s, const KernelParams& p, ConvolutionMethod m) {
  LinearizedLandau lm(s, h.grid, p, m);
  return lm.apply(h);
}

namespace {
GridFunction sqrt_mu(const VelocityGrid& g) {
  GridFunction s = global_maxwellian(g);
  for (double& v : s.values) v = std::sqrt(v);
  return s;
}
}  // namespace

GridFunction gamma_bilinear(const GridFunction& h, const GridFunction& k, const KernelParams& p) {
  require_same_grid(h, k, "gamma_bilinear");
  const GridFunction s = sqrt_mu(h.grid);
  GridFunction a = h, b = k;
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] *= s[i];
    b[i] *= s[i];
  }
  GridFunction q = collision_Q(a, b, p);
  for (std::size_t i = 0; i < q.size(); ++i) q[i] /= s[i];
  return q;
}

GridFunction linearized_script_L(const GridFunction& f, const KernelParams& p) {
  const GridFunction s = sqrt_mu(f.grid);
  GridFunction h = f;
  for (std::size_t i = 0; i < h.size(); ++i) h[i] *= s[i];
  LinearizedLandau lm(reference_state(), f.grid, p);
  GridFunction out = lm.apply(h);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= s[i];
  return out;
}

double weighted_inner(const GridFunction& f, const GridFunction& g, const GridFunction& m) {
  require_same_grid(f, g, "weighted_inner");
  require_same_grid(f, m, "weighted_inner");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i] / m[i];
  return s * f.grid.weight();
}

double weighted_norm(const GridFunction& f, const GridFunction& m) { return std::sqrt(weighted_inner(f, f, m)); }

}  // namespace hydrolimit
