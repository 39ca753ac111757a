#pragma once

// Periodic grid on [-L, L)^n with FFTW-backed spectral transforms, spectral
// derivatives and Sobolev norms evaluated as Fourier multipliers.

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scnls/errors.hpp"

namespace scnls {

using cplx = std::complex<double>;

inline constexpr std::size_t kDefaultMaxPoints = std::size_t{1} << 24;
inline constexpr double kDecayTol = 1e-12;
inline constexpr int kMaxDim = 3;

namespace detail {
// The FFTW planner is not reentrant; execution on distinct arrays is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

class Grid {
 public:
  Grid(int dim, double half_width, int points_per_axis,
       std::size_t max_points = kDefaultMaxPoints)
      : dim_(dim), half_width_(half_width), n_(points_per_axis) {
    require(dim >= 1 && dim <= kMaxDim,
            "grid: dim must be in [1, 3], got " + std::to_string(dim));
    require(half_width > 0.0 && std::isfinite(half_width),
            "grid: half_width must be positive");
    require(points_per_axis >= 8 && std::has_single_bit(static_cast<unsigned>(points_per_axis)),
            "grid: points_per_axis must be a power of two >= 8, got " +
                std::to_string(points_per_axis));
    total_ = 1;
    for (int d = 0; d < dim_; ++d) {
      require(total_ <= max_points / static_cast<std::size_t>(n_),
              "grid: N^n exceeds the memory budget of " + std::to_string(max_points) +
                  " points");
      total_ *= static_cast<std::size_t>(n_);
    }
    spacing_ = 2.0 * half_width_ / n_;

    axis_index_.resize(n_);
    axis_wavenumber_.resize(n_);
    for (int i = 0; i < n_; ++i) {
      const int m = i < n_ / 2 ? i : i - n_;
      axis_index_[i] = m;
      axis_wavenumber_[i] = std::numbers::pi * m / half_width_;
    }

    kappa_sq_.resize(total_);
    shift_sign_.resize(total_);
    for (std::size_t idx = 0; idx < total_; ++idx) {
      double k2 = 0.0;
      int parity = 0;
      std::size_t rem = idx;
      for (int d = dim_ - 1; d >= 0; --d) {
        const std::size_t i = rem % n_;
        rem /= n_;
        k2 += axis_wavenumber_[i] * axis_wavenumber_[i];
        parity += axis_index_[i];
      }
      kappa_sq_[idx] = k2;
      shift_sign_[idx] = (parity % 2 == 0) ? 1.0 : -1.0;
    }

    std::array<int, kMaxDim> dims{};
    std::fill(dims.begin(), dims.end(), n_);
    std::lock_guard lock(detail::fftw_planner_mutex());
    auto* scratch = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total_));
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft(dim_, dims.data(), scratch, scratch, FFTW_FORWARD, flags);
    backward_ = fftw_plan_dft(dim_, dims.data(), scratch, scratch, FFTW_BACKWARD, flags);
    fftw_free(scratch);
  }

  ~Grid() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  int dim() const noexcept { return dim_; }
  double half_width() const noexcept { return half_width_; }
  int points_per_axis() const noexcept { return n_; }
  double spacing() const noexcept { return spacing_; }
  std::size_t size() const noexcept { return total_; }

  /// Trapezoidal quadrature weight dx^n.
  double cell_volume() const noexcept { return std::pow(spacing_, dim_); }
  /// Weight mu in the discrete Parseval identity sum |f|^2 dx^n = mu sum |fhat|^2.
  double spectral_weight() const noexcept { return std::pow(2.0 * half_width_, -dim_); }
  /// Largest resolved wavenumber pi N / (2L).
  double kappa_max() const noexcept { return std::numbers::pi * n_ / (2.0 * half_width_); }

  /// Signed mode index m in [-N/2, N/2) for FFT-ordered position i.
  int axis_mode(std::size_t i) const noexcept { return axis_index_[i]; }
  std::span<const double> axis_wavenumbers() const noexcept { return axis_wavenumber_; }
  std::span<const double> kappa_squared() const noexcept { return kappa_sq_; }

  /// FFT-ordered position along `axis` of flat index idx (row-major, last axis fastest).
  std::size_t axis_position(std::size_t idx, int axis) const noexcept {
    std::size_t stride = 1;
    for (int d = dim_ - 1; d > axis; --d) stride *= n_;
    return (idx / stride) % n_;
  }

  bool is_nyquist(std::size_t axis_pos) const noexcept {
    return axis_pos == static_cast<std::size_t>(n_ / 2);
  }

  /// Modes outside the 2/3-rule box: some axis has |m| > N/3.
  bool outside_dealias_box(std::size_t idx) const noexcept {
    std::size_t rem = idx;
    for (int d = 0; d < dim_; ++d) {
      const std::size_t i = rem % n_;
      rem /= n_;
      if (3 * std::abs(axis_index_[i]) > n_) return true;
    }
    return false;
  }

  double coordinate(std::size_t axis_pos) const noexcept {
    return -half_width_ + spacing_ * static_cast<double>(axis_pos);
  }

  std::array<double, kMaxDim> point(std::size_t idx) const noexcept {
    std::array<double, kMaxDim> x{};
    std::size_t rem = idx;
    for (int d = dim_ - 1; d >= 0; --d) {
      x[d] = coordinate(rem % n_);
      rem /= n_;
    }
    return x;
  }

  bool on_boundary(std::size_t idx) const noexcept {
    std::size_t rem = idx;
    for (int d = 0; d < dim_; ++d) {
      const std::size_t i = rem % n_;
      rem /= n_;
      if (i == 0 || i + 1 == static_cast<std::size_t>(n_)) return true;
    }
    return false;
  }

  /// fhat(kappa) = dx^n sum_x f(x) e^{-i kappa.x}, in place.
  void forward(std::span<cplx> data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(forward_, p, p);
    const double w = cell_volume();
    for (std::size_t i = 0; i < total_; ++i) data[i] *= w * shift_sign_[i];
  }

  /// Inverse of forward(), in place.
  void backward(std::span<cplx> data) const {
    const double w = spectral_weight();
    for (std::size_t i = 0; i < total_; ++i) data[i] *= w * shift_sign_[i];
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(backward_, p, p);
  }

 private:
  int dim_;
  double half_width_;
  int n_;
  double spacing_ = 0.0;
  std::size_t total_ = 0;
  std::vector<int> axis_index_;
  std::vector<double> axis_wavenumber_;
  std::vector<double> kappa_sq_;
  std::vector<double> shift_sign_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr make_grid(int dim, double half_width, int points_per_axis,
                         std::size_t max_points = kDefaultMaxPoints) {
  return std::make_shared<const Grid>(dim, half_width, points_per_axis, max_points);
}

enum class Space { physical, spectral };

struct Field {
  GridPtr grid;
  std::vector<cplx> values;
  Space space = Space::physical;

  Field() = default;
  Field(GridPtr g, Space sp = Space::physical)
      : grid(std::move(g)), values(grid->size(), cplx{0.0, 0.0}), space(sp) {}
  Field(GridPtr g, std::vector<cplx> v, Space sp = Space::physical)
      : grid(std::move(g)), values(std::move(v)), space(sp) {
    require(values.size() == grid->size(), "field: value count must equal N^n");
  }

  std::size_t size() const noexcept { return values.size(); }
  cplx& operator[](std::size_t i) { return values[i]; }
  const cplx& operator[](std::size_t i) const { return values[i]; }
};

/// Sobolev index: L^2 (s = 0), H^s, homogeneous Hdot^s, or the eps-scaled H^s_eps.
struct SobolevIndex {
  double s = 0.0;
  bool homogeneous = false;
  std::optional<double> eps_scaled;

  static SobolevIndex l2() { return {}; }
  static SobolevIndex h(double s) { return {s, false, std::nullopt}; }
  static SobolevIndex hdot(double s) { return {s, true, std::nullopt}; }
  static SobolevIndex h_eps(double s, double eps) { return {s, false, eps}; }
};

inline void require_space(const Field& f, Space sp, const char* op) {
  require(f.grid != nullptr, std::string(op) + ": field has no grid");
  require(f.space == sp, std::string(op) + ": field is in the wrong space (expected " +
                             (sp == Space::physical ? "physical" : "spectral") + ")");
}

inline Field transform(const Field& f) {
  require_space(f, Space::physical, "transform");
  Field out = f;
  f.grid->forward(out.values);
  out.space = Space::spectral;
  return out;
}

inline Field inverse_transform(const Field& f) {
  require_space(f, Space::spectral, "inverse_transform");
  Field out = f;
  f.grid->backward(out.values);
  out.space = Space::physical;
  return out;
}

inline Field as_spectral(const Field& f) {
  return f.space == Space::spectral ? f : transform(f);
}

/// Spectral derivative along `axis` of a spectral field; Nyquist mode zeroed.
inline Field spectral_derivative(const Field& fhat, int axis) {
  require_space(fhat, Space::spectral, "spectral_derivative");
  const Grid& g = *fhat.grid;
  Field out(fhat.grid, Space::spectral);
  const auto kap = g.axis_wavenumbers();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t pos = g.axis_position(i, axis);
    out[i] = g.is_nyquist(pos) ? cplx{} : cplx{0.0, kap[pos]} * fhat[i];
  }
  return out;
}

inline Field spectral_laplacian(const Field& fhat) {
  require_space(fhat, Space::spectral, "spectral_laplacian");
  const auto k2 = fhat.grid->kappa_squared();
  Field out(fhat.grid, Space::spectral);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = -k2[i] * fhat[i];
  return out;
}

inline std::vector<Field> gradient(const Field& f) {
  require_space(f, Space::physical, "gradient");
  const Field fhat = transform(f);
  std::vector<Field> out;
  out.reserve(f.grid->dim());
  for (int d = 0; d < f.grid->dim(); ++d)
    out.push_back(inverse_transform(spectral_derivative(fhat, d)));
  return out;
}

inline Field laplacian(const Field& f) {
  require_space(f, Space::physical, "laplacian");
  return inverse_transform(spectral_laplacian(transform(f)));
}

/// Zero every mode outside the 2/3-rule box (spectral field, in place).
inline void dealias(Field& fhat) {
  require_space(fhat, Space::spectral, "dealias");
  const Grid& g = *fhat.grid;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.outside_dealias_box(i)) fhat[i] = cplx{};
}

/// Fraction of spectral energy outside the 2/3-rule box. Zero for the zero field.
inline double tail_fraction(const Field& f) {
  const Field fhat = as_spectral(f);
  const Grid& g = *f.grid;
  double total = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double e = std::norm(fhat[i]);
    total += e;
    if (g.outside_dealias_box(i)) tail += e;
  }
  return total > 0.0 ? tail / total : 0.0;
}

inline double sobolev_weight(const SobolevIndex& idx, double kappa_sq) {
  if (idx.eps_scaled) {
    const double e = *idx.eps_scaled;
    return std::pow(1.0 + e * e * kappa_sq, idx.s);
  }
  if (idx.homogeneous) return idx.s == 0.0 ? 1.0 : std::pow(kappa_sq, idx.s);
  return std::pow(1.0 + kappa_sq, idx.s);
}

inline void validate(const SobolevIndex& idx) {
  require(std::isfinite(idx.s) && idx.s >= 0.0, "norm: Sobolev index s must be finite and >= 0");
  if (idx.eps_scaled) {
    require(!idx.homogeneous, "norm: H^s_eps is inhomogeneous by definition");
    require(*idx.eps_scaled > 0.0 && *idx.eps_scaled <= 1.0, "norm: eps must lie in (0, 1]");
  }
}

/// (sum_kappa w(kappa) |fhat(kappa)|^2 mu)^{1/2}.
inline double norm(const Field& f, const SobolevIndex& idx = {}) {
  validate(idx);
  const Field fhat = as_spectral(f);
  const Grid& g = *f.grid;
  const auto k2 = g.kappa_squared();
  double acc = 0.0;
  if (idx.s == 0.0) {
    for (std::size_t i = 0; i < g.size(); ++i) acc += std::norm(fhat[i]);
  } else {
    for (std::size_t i = 0; i < g.size(); ++i) acc += sobolev_weight(idx, k2[i]) * std::norm(fhat[i]);
  }
  return std::sqrt(acc * g.spectral_weight());
}

/// Physical-space quadrature (int |f|^2 dx)^{1/2}.
inline double l2_quadrature(const Field& f) {
  require_space(f, Space::physical, "l2_quadrature");
  double acc = 0.0;
  for (const auto& v : f.values) acc += std::norm(v);
  return std::sqrt(acc * f.grid->cell_volume());
}

inline double linf_norm(const Field& f) {
  require_space(f, Space::physical, "linf_norm");
  double m = 0.0;
  for (const auto& v : f.values) m = std::max(m, std::abs(v));
  return m;
}

template <class Fn>
Field sample(const GridPtr& grid, Fn&& fn) {
  Field out(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const auto x = grid->point(i);
    out[i] = cplx(fn(std::span<const double>(x.data(), grid->dim())));
  }
  return out;
}

/// Largest |f| on the two boundary layers of each axis, relative to `scale`.
inline void check_boundary_decay(const Field& f, double scale, double decay_tol,
                                 const std::string& what) {
  require_space(f, Space::physical, "check_boundary_decay");
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f.grid->on_boundary(i)) m = std::max(m, std::abs(f[i]));
  if (m > decay_tol * scale)
    throw ValidationError(what + ": boundary value " + std::to_string(m) +
                          " exceeds decay tolerance; enlarge the domain");
}

/// alpha exp(-|x - c|^2 / w^2), checked for decay at the periodic boundary.
inline Field make_gaussian(const GridPtr& grid, double amplitude, double width,
                           std::span<const double> center = {}, double decay_tol = kDecayTol) {
  require(width > 0.0, "make_gaussian: width must be positive");
  require(center.empty() || static_cast<int>(center.size()) == grid->dim(),
          "make_gaussian: center must have one entry per axis");
  Field f = sample(grid, [&](std::span<const double> x) {
    double r2 = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
      const double dx = x[d] - (center.empty() ? 0.0 : center[d]);
      r2 += dx * dx;
    }
    return amplitude * std::exp(-r2 / (width * width));
  });
  check_boundary_decay(f, std::abs(amplitude), decay_tol, "make_gaussian");
  return f;
}

// Pointwise helpers on physical fields sharing a grid.

inline Field operator-(const Field& a, const Field& b) {
  require(a.grid == b.grid && a.space == b.space, "field subtraction: grid/space mismatch");
  Field out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

inline Field operator+(const Field& a, const Field& b) {
  require(a.grid == b.grid && a.space == b.space, "field addition: grid/space mismatch");
  Field out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

inline Field operator*(cplx c, const Field& a) {
  Field out = a;
  for (auto& v : out.values) v *= c;
  return out;
}

inline Field operator*(double c, const Field& a) { return cplx(c) * a; }

}  // namespace scnls
