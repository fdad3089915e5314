#include "npd/spectral.hpp"

#include <cmath>
#include <string>

namespace npd {
namespace {

constexpr double kMeanTolerance = 1e-12;
const Complex kI{0.0, 1.0};

void check_mean_zero(const SpectralField& f, double scale, const char* what) {
  if (scale <= 0.0) scale = f.coeffs.abs().maxCoeff();
  const double mean = std::abs(f.coeffs(0));
  if (mean > kMeanTolerance * scale || (scale == 0.0 && mean > 0.0)) {
    throw MeanZeroViolation(std::string(what) + ": field mean " + std::to_string(mean) +
                            " is not zero (required for this operation)");
  }
}

}  // namespace

RealField sample(const GridPtr& grid, const std::function<double(double, double, double)>& f) {
  RealField out = RealField::zeros(grid);
  for (Eigen::Index i = 0; i < grid->real_size(); ++i) {
    const auto x = grid->position(i);
    out.values(i) = f(x[0], x[1], x[2]);
  }
  return out;
}

SpectralField forward_transform(const RealField& f) {
  if (!all_finite(f)) throw InvalidField("forward_transform: non-finite sample");
  SpectralField out{f.grid, ComplexArray(f.grid->spectral_size())};
  f.grid->forward(f.values.data(), out.coeffs.data());
  return out;
}

RealField inverse_transform(const SpectralField& f) {
  thread_local ComplexArray scratch;
  scratch = f.coeffs;
  RealField out{f.grid, RealArray(f.grid->real_size())};
  f.grid->inverse(scratch.data(), out.values.data());
  return out;
}

SpectralField apply_lambda(const SpectralField& f, double s) {
  if (s == 0.0) return f;
  if (s < 0.0) check_mean_zero(f, 0.0, "apply_lambda");
  const RealArray& k2 = f.grid->k_squared();
  SpectralField out{f.grid, ComplexArray(f.coeffs.size())};
  out.coeffs(0) = 0.0;
  for (Eigen::Index i = 1; i < f.coeffs.size(); ++i) {
    out.coeffs(i) = f.coeffs(i) * std::pow(k2(i), 0.5 * s);
  }
  return out;
}

SpectralVector gradient(const SpectralField& f) {
  const auto& kd = f.grid->k_derivative();
  SpectralVector out;
  for (int j = 0; j < 3; ++j) {
    out[j] = {f.grid, f.coeffs * (kI * kd[j].cast<Complex>())};
  }
  return out;
}

SpectralField divergence(const SpectralVector& v) {
  const auto& kd = v[0].grid->k_derivative();
  for (int j = 1; j < 3; ++j) require_same_grid(v[0].grid, v[j].grid);
  SpectralField out{v[0].grid, ComplexArray(v[0].coeffs.size())};
  out.coeffs = kI * (kd[0].cast<Complex>() * v[0].coeffs + kd[1].cast<Complex>() * v[1].coeffs +
                     kd[2].cast<Complex>() * v[2].coeffs);
  return out;
}

SpectralField laplacian(const SpectralField& f) {
  return {f.grid, -f.coeffs * f.grid->k_squared().cast<Complex>()};
}

SpectralField solve_poisson(const SpectralField& rho, double scale) {
  check_mean_zero(rho, scale, "solve_poisson");
  const RealArray& k2 = rho.grid->k_squared();
  SpectralField phi{rho.grid, ComplexArray(rho.coeffs.size())};
  phi.coeffs(0) = 0.0;
  for (Eigen::Index i = 1; i < rho.coeffs.size(); ++i) phi.coeffs(i) = rho.coeffs(i) / k2(i);
  return phi;
}

SpectralVector leray_project(const SpectralVector& v) {
  const GridPtr& grid = v[0].grid;
  for (int j = 1; j < 3; ++j) require_same_grid(grid, v[j].grid);
  const auto& kd = grid->k_derivative();
  SpectralVector out{SpectralField::zeros(grid), SpectralField::zeros(grid),
                     SpectralField::zeros(grid)};
  for (Eigen::Index i = 0; i < grid->spectral_size(); ++i) {
    const double k[3] = {kd[0](i), kd[1](i), kd[2](i)};
    const double kk = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if (kk == 0.0) {
      for (int j = 0; j < 3; ++j) out[j].coeffs(i) = v[j].coeffs(i);
      continue;
    }
    const Complex kv = (k[0] * v[0].coeffs(i) + k[1] * v[1].coeffs(i) + k[2] * v[2].coeffs(i)) / kk;
    for (int j = 0; j < 3; ++j) out[j].coeffs(i) = v[j].coeffs(i) - k[j] * kv;
  }
  return out;
}

SpectralField dealias(const SpectralField& f) {
  return {f.grid, f.coeffs * f.grid->dealias_mask().cast<Complex>()};
}

SpectralVector dealias(const SpectralVector& v) {
  return {dealias(v[0]), dealias(v[1]), dealias(v[2])};
}

double inner_product(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f.grid, g.grid);
  const RealArray& w = f.grid->parseval_weight();
  const double sum = (w * (f.coeffs * g.coeffs.conjugate()).real()).sum();
  return sum * f.grid->volume();
}

double inner_product(const SpectralVector& f, const SpectralVector& g) {
  return inner_product(f[0], g[0]) + inner_product(f[1], g[1]) + inner_product(f[2], g[2]);
}

double l2_norm_squared(const SpectralField& f) {
  const RealArray& w = f.grid->parseval_weight();
  return (w * f.coeffs.abs2()).sum() * f.grid->volume();
}

double l2_norm_squared(const SpectralVector& v) {
  return l2_norm_squared(v[0]) + l2_norm_squared(v[1]) + l2_norm_squared(v[2]);
}

double integral(const RealField& f) { return f.values.sum() * f.grid->cell_volume(); }

double l2_norm_squared(const RealField& f) {
  return f.values.square().sum() * f.grid->cell_volume();
}

bool all_finite(const RealField& f) { return f.values.allFinite(); }

bool all_finite(const SpectralField& f) {
  return f.coeffs.real().allFinite() && f.coeffs.imag().allFinite();
}

SpectralField operator+(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a.grid, b.grid);
  return {a.grid, a.coeffs + b.coeffs};
}

SpectralField operator-(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a.grid, b.grid);
  return {a.grid, a.coeffs - b.coeffs};
}

SpectralField operator*(double s, const SpectralField& a) { return {a.grid, s * a.coeffs}; }

}  // namespace npd
