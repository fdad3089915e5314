#pragma once

#include "npd/grid.hpp"

#include <functional>

namespace npd {

/// Samples `f(x, y, z)` at every grid point.
RealField sample(const GridPtr& grid, const std::function<double(double, double, double)>& f);

/// Throws InvalidField on NaN/Inf samples.
SpectralField forward_transform(const RealField& f);
RealField inverse_transform(const SpectralField& f);

/// Fractional power of (-Laplacian)^{1/2}: multiplies by (2 pi |k| / L)^s.
///
/// For s > 0 the zero mode is annihilated; for s < 0 the field must be
/// mean-zero (MeanZeroViolation otherwise) and the zero mode stays zero.
SpectralField apply_lambda(const SpectralField& f, double s);

SpectralVector gradient(const SpectralField& f);
SpectralField divergence(const SpectralVector& v);
SpectralField laplacian(const SpectralField& f);

/// Solves -Laplacian(phi) = rho with phi mean-zero.
///
/// `rho` must be mean-zero to 1e-12 relative to `scale`; when `scale` is not
/// positive the largest coefficient magnitude is used instead.
SpectralField solve_poisson(const SpectralField& rho, double scale = 0.0);

/// L^2-orthogonal projection onto divergence-free fields, I - k k^T / |k|^2.
SpectralVector leray_project(const SpectralVector& v);

SpectralField dealias(const SpectralField& f);
SpectralVector dealias(const SpectralVector& v);

/// Box inner product <f, g> = integral of f g, evaluated by Parseval.
double inner_product(const SpectralField& f, const SpectralField& g);
double inner_product(const SpectralVector& f, const SpectralVector& g);
double l2_norm_squared(const SpectralField& f);
double l2_norm_squared(const SpectralVector& v);

/// Quadrature of f over the box with weight (L/N)^3.
double integral(const RealField& f);
double l2_norm_squared(const RealField& f);

/// True when every sample/coefficient is finite.
bool all_finite(const RealField& f);
bool all_finite(const SpectralField& f);

SpectralField operator+(const SpectralField& a, const SpectralField& b);
SpectralField operator-(const SpectralField& a, const SpectralField& b);
SpectralField operator*(double s, const SpectralField& a);

}  // namespace npd
