#pragma once

#include <Eigen/Core>

#include <array>
#include <complex>
#include <memory>
#include <stdexcept>
#include <string>

namespace npd {

using Complex = std::complex<double>;
using RealArray = Eigen::ArrayXd;
using ComplexArray = Eigen::ArrayXcd;

class InvalidField : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MeanZeroViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GridMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cubic periodic box [-L/2, L/2)^3 sampled with N points per axis.
struct GridSpec {
  double box_length = 1.0;
  int resolution = 32;
  double dealias_fraction = 2.0 / 3.0;

  /// Throws std::invalid_argument unless L > 0, N even and >= 8, fraction in (0, 1].
  void validate() const;

  bool operator==(const GridSpec&) const = default;
};

enum class PlanEffort { estimate, measure };

/// Sets the number of threads used by subsequently created FFT plans.
void set_fft_threads(int threads);

/// Immutable grid: wavenumber tables for the half spectrum and FFT plans.
///
/// Spectral storage follows the real-to-complex layout: index
/// (ix * N + iy) * (N/2 + 1) + iz with ix, iy in [0, N) and iz in [0, N/2].
/// Signed wavenumbers are k = i for i < N/2 and k = i - N otherwise, so
/// every axis covers [-N/2, N/2). The forward transform carries the 1/N^3
/// factor, so coefficient 0 is the field mean.
class Grid {
 public:
  explicit Grid(const GridSpec& spec, PlanEffort effort = PlanEffort::estimate);
  ~Grid();
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  static std::shared_ptr<const Grid> make(const GridSpec& spec,
                                          PlanEffort effort = PlanEffort::estimate);

  const GridSpec& spec() const { return spec_; }
  int n() const { return spec_.resolution; }
  int n_half() const { return spec_.resolution / 2 + 1; }
  double length() const { return spec_.box_length; }
  double spacing() const { return spec_.box_length / spec_.resolution; }
  double cell_volume() const;
  double volume() const;
  Eigen::Index real_size() const { return real_size_; }
  Eigen::Index spectral_size() const { return spectral_size_; }

  /// (2 pi |k| / L)^2, including Nyquist components.
  const RealArray& k_squared() const { return k_squared_; }
  /// 2 pi k_j / L with the Nyquist component zeroed (odd-derivative convention).
  const std::array<RealArray, 3>& k_derivative() const { return k_derivative_; }
  /// Multiplicity of each stored coefficient in the full spectrum (1 or 2).
  const RealArray& parseval_weight() const { return parseval_weight_; }
  /// 1 where every |k_j| <= dealias_fraction * N / 2, else 0.
  const RealArray& dealias_mask() const { return dealias_mask_; }

  std::array<int, 3> wavevector(Eigen::Index spectral_index) const;
  std::array<double, 3> position(Eigen::Index real_index) const;
  int signed_wavenumber(int i) const { return i < n() / 2 ? i : i - n(); }

  void forward(const double* in, Complex* out) const;
  /// Inverse transform; `in` is clobbered.
  void inverse(Complex* in, double* out) const;

 private:
  GridSpec spec_;
  Eigen::Index real_size_ = 0;
  Eigen::Index spectral_size_ = 0;
  RealArray k_squared_;
  std::array<RealArray, 3> k_derivative_;
  RealArray parseval_weight_;
  RealArray dealias_mask_;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

using GridPtr = std::shared_ptr<const Grid>;

struct RealField {
  GridPtr grid;
  RealArray values;

  static RealField zeros(const GridPtr& grid);
};

struct SpectralField {
  GridPtr grid;
  ComplexArray coeffs;

  static SpectralField zeros(const GridPtr& grid);
  /// Field mean (the zero mode).
  double mean() const { return coeffs(0).real(); }
};

using SpectralVector = std::array<SpectralField, 3>;
using RealVector = std::array<RealField, 3>;

/// Throws GridMismatch unless both grids describe the same discretization.
void require_same_grid(const GridPtr& a, const GridPtr& b);

}  // namespace npd
