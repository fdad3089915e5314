#include "npd/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace npd {
namespace {

// The FFTW planner is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int& fft_threads() {
  static int threads = 1;
  return threads;
}

}  // namespace

void GridSpec::validate() const {
  if (!(box_length > 0.0) || !std::isfinite(box_length)) {
    throw std::invalid_argument("grid.box_length must be positive");
  }
  if (resolution < 8 || resolution % 2 != 0) {
    throw std::invalid_argument("grid.resolution must be even and >= 8");
  }
  if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0)) {
    throw std::invalid_argument("grid.dealias_fraction must lie in (0, 1]");
  }
}

void set_fft_threads(int threads) {
  std::lock_guard lock(planner_mutex());
  static bool initialized = false;
  if (!initialized) {
    fftw_init_threads();
    initialized = true;
  }
  fft_threads() = threads < 1 ? 1 : threads;
  fftw_plan_with_nthreads(fft_threads());
}

Grid::Grid(const GridSpec& spec, PlanEffort effort) : spec_(spec) {
  spec_.validate();
  const int n = spec_.resolution;
  const int nh = n_half();
  real_size_ = static_cast<Eigen::Index>(n) * n * n;
  spectral_size_ = static_cast<Eigen::Index>(n) * n * nh;

  const double two_pi_over_l = 2.0 * std::numbers::pi / spec_.box_length;
  const double cutoff = spec_.dealias_fraction * n / 2.0;
  k_squared_.resize(spectral_size_);
  parseval_weight_.resize(spectral_size_);
  dealias_mask_.resize(spectral_size_);
  for (auto& k : k_derivative_) k.resize(spectral_size_);

  Eigen::Index idx = 0;
  for (int ix = 0; ix < n; ++ix) {
    const int kx = signed_wavenumber(ix);
    for (int iy = 0; iy < n; ++iy) {
      const int ky = signed_wavenumber(iy);
      for (int iz = 0; iz < nh; ++iz, ++idx) {
        const int kz = iz == n / 2 ? -n / 2 : iz;
        const std::array<int, 3> k{kx, ky, kz};
        double k2 = 0.0;
        bool keep = true;
        for (int j = 0; j < 3; ++j) {
          const double kj = two_pi_over_l * k[j];
          k2 += kj * kj;
          k_derivative_[j](idx) = (k[j] == -n / 2) ? 0.0 : kj;
          keep = keep && std::abs(k[j]) <= cutoff;
        }
        k_squared_(idx) = k2;
        dealias_mask_(idx) = keep ? 1.0 : 0.0;
        parseval_weight_(idx) = (iz == 0 || iz == n / 2) ? 1.0 : 2.0;
      }
    }
  }

  const unsigned flags =
      FFTW_UNALIGNED | (effort == PlanEffort::measure ? FFTW_MEASURE : FFTW_ESTIMATE);
  std::lock_guard lock(planner_mutex());
  double* r = fftw_alloc_real(static_cast<size_t>(real_size_));
  fftw_complex* c = fftw_alloc_complex(static_cast<size_t>(spectral_size_));
  forward_plan_ = fftw_plan_dft_r2c_3d(n, n, n, r, c, flags);
  inverse_plan_ = fftw_plan_dft_c2r_3d(n, n, n, c, r, flags);
  fftw_free(r);
  fftw_free(c);
  if (forward_plan_ == nullptr || inverse_plan_ == nullptr) {
    throw std::runtime_error("FFTW plan creation failed");
  }
}

Grid::~Grid() {
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

std::shared_ptr<const Grid> Grid::make(const GridSpec& spec, PlanEffort effort) {
  return std::make_shared<const Grid>(spec, effort);
}

double Grid::cell_volume() const {
  const double h = spacing();
  return h * h * h;
}

double Grid::volume() const {
  const double l = spec_.box_length;
  return l * l * l;
}

std::array<int, 3> Grid::wavevector(Eigen::Index spectral_index) const {
  const int nh = n_half();
  const auto iz = static_cast<int>(spectral_index % nh);
  const auto rest = spectral_index / nh;
  const auto iy = static_cast<int>(rest % n());
  const auto ix = static_cast<int>(rest / n());
  return {signed_wavenumber(ix), signed_wavenumber(iy), iz == n() / 2 ? -n() / 2 : iz};
}

std::array<double, 3> Grid::position(Eigen::Index real_index) const {
  const auto iz = static_cast<int>(real_index % n());
  const auto rest = real_index / n();
  const auto iy = static_cast<int>(rest % n());
  const auto ix = static_cast<int>(rest / n());
  const double h = spacing();
  const double origin = -0.5 * spec_.box_length;
  return {origin + ix * h, origin + iy * h, origin + iz * h};
}

void Grid::forward(const double* in, Complex* out) const {
  // r2c leaves the input intact for out-of-place multi-dimensional plans.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
  const double scale = 1.0 / static_cast<double>(real_size_);
  for (Eigen::Index i = 0; i < spectral_size_; ++i) out[i] *= scale;
}

void Grid::inverse(Complex* in, double* out) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_),
                       reinterpret_cast<fftw_complex*>(in), out);
}

RealField RealField::zeros(const GridPtr& grid) {
  return {grid, RealArray::Zero(grid->real_size())};
}

SpectralField SpectralField::zeros(const GridPtr& grid) {
  return {grid, ComplexArray::Zero(grid->spectral_size())};
}

void require_same_grid(const GridPtr& a, const GridPtr& b) {
  if (!a || !b) throw GridMismatch("field has no grid");
  if (a != b && !(a->spec() == b->spec())) {
    throw GridMismatch("fields live on different grids");
  }
}

}  // namespace npd
