#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace npd;
using namespace npd::testing;

namespace {

double max_abs(const SpectralField& f) { return f.coeffs.abs().maxCoeff(); }

Eigen::Index index_of(const Grid& g, int kx, int ky, int kz) {
  const int n = g.n();
  const auto wrap = [n](int k) { return (k + n) % n; };
  return (static_cast<Eigen::Index>(wrap(kx)) * n + wrap(ky)) * g.n_half() + kz;
}

}  // namespace

TEST_CASE("grid spec validation") {
  CHECK_THROWS_AS(GridSpec({0.0, 16, 2.0 / 3.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec({1.0, 15, 2.0 / 3.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec({1.0, 6, 2.0 / 3.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec({1.0, 16, 0.0}).validate(), std::invalid_argument);
  CHECK_NOTHROW(GridSpec({1.0, 16, 1.0}).validate());
}

TEST_CASE("wavenumber tables") {
  auto g = grid(2.0 * kPi, 8);
  CHECK(g->spectral_size() == 8 * 8 * 5);
  const auto k = g->wavevector(index_of(*g, -1, 3, 4));
  CHECK(k[0] == -1);
  CHECK(k[1] == 3);
  CHECK(k[2] == -4);
  const Eigen::Index nyq = index_of(*g, -4, 0, 0);
  CHECK(g->k_squared()(nyq) == doctest::Approx(16.0));
  CHECK(g->k_derivative()[0](nyq) == 0.0);
  CHECK(g->parseval_weight()(index_of(*g, 1, 1, 0)) == 1.0);
  CHECK(g->parseval_weight()(index_of(*g, 1, 1, 2)) == 2.0);
  CHECK(g->parseval_weight()(index_of(*g, 1, 1, 4)) == 1.0);
}

TEST_CASE("forward transform of zero and single mode") {
  auto g = grid(3.0, 16);
  SpectralField z = forward_transform(RealField::zeros(g));
  CHECK(max_abs(z) == 0.0);

  SpectralField c = forward_transform(cosine_mode(g, 1.0, 0));
  const Eigen::Index plus = index_of(*g, 1, 0, 0);
  const Eigen::Index minus = index_of(*g, -1, 0, 0);
  CHECK(std::abs(c.coeffs(plus)) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(c.coeffs(minus)) == doctest::Approx(std::abs(c.coeffs(plus))).epsilon(1e-14));
  ComplexArray rest = c.coeffs;
  rest(plus) = 0.0;
  rest(minus) = 0.0;
  CHECK(rest.abs().maxCoeff() < 1e-15);
}

TEST_CASE("forward transform rejects non-finite samples") {
  auto g = grid(1.0, 8);
  RealField f = RealField::zeros(g);
  f.values(3) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(forward_transform(f), InvalidField);
  f.values(3) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(forward_transform(f), InvalidField);
}

TEST_CASE("round trip and Parseval") {
  auto g = grid(5.0, 16);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  RealField f = RealField::zeros(g);
  for (Eigen::Index i = 0; i < g->real_size(); ++i) f.values(i) = normal(rng);
  const SpectralField s = forward_transform(f);
  const RealField back = inverse_transform(s);
  CHECK((back.values - f.values).abs().maxCoeff() < 1e-12);
  CHECK(l2_norm_squared(s) == doctest::Approx(l2_norm_squared(f)).epsilon(1e-12));
  CHECK(s.mean() * g->volume() == doctest::Approx(integral(f)).epsilon(1e-12));
}

TEST_CASE("Gaussian mean matches its integral") {
  const double l = 20.0, w = 1.2;
  auto g = grid(l, 32);
  RealField f = sample(g, [&](double x, double y, double z) {
    return std::exp(-(x * x + y * y + z * z) / (2.0 * w * w));
  });
  const double exact = std::pow(w * std::sqrt(2.0 * kPi) * std::erf(l / (2.0 * std::sqrt(2.0) * w)), 3);
  CHECK(forward_transform(f).mean() * g->volume() == doctest::Approx(exact).epsilon(1e-10));
}

TEST_CASE("apply_lambda") {
  auto g = grid(4.0, 16);
  std::mt19937_64 rng(3);
  SpectralField f = random_band_limited(g, rng, 5, true);

  CHECK(max_abs(apply_lambda(f, 0.0) - f) == 0.0);

  SpectralField mode = forward_transform(cosine_mode(g, 0.7, 1));
  SpectralField scaled = apply_lambda(mode, 2.0);
  const double factor = std::pow(2.0 * kPi / g->length(), 2);
  CHECK(max_abs(scaled - factor * mode) < 1e-14);

  CHECK(relative_difference(f, apply_lambda(apply_lambda(f, 1.0), -1.0)) < 1e-12);

  SpectralField with_mean = f;
  with_mean.coeffs(0) = 0.3;
  CHECK_THROWS_AS(apply_lambda(with_mean, -1.0), MeanZeroViolation);
  CHECK(apply_lambda(with_mean, 1.0).coeffs(0) == Complex(0.0));
}

TEST_CASE("gradient") {
  const double l = 3.0;
  auto g = grid(l, 16);
  SpectralVector zero = gradient(forward_transform(sample(g, [](double, double, double) { return 2.5; })));
  for (const auto& c : zero) CHECK(max_abs(c) == 0.0);

  RealField s = sample(g, [&](double x, double, double) { return std::sin(2.0 * kPi * x / l); });
  SpectralVector d = gradient(forward_transform(s));
  RealField expected = sample(g, [&](double x, double, double) {
    return 2.0 * kPi / l * std::cos(2.0 * kPi * x / l);
  });
  CHECK((inverse_transform(d[0]).values - expected.values).abs().maxCoeff() < 1e-12);
  CHECK(max_abs(d[1]) < 1e-15);
  CHECK(max_abs(d[2]) < 1e-15);

  // ||grad f|| = ||Lambda f|| when the Nyquist plane is empty.
  std::mt19937_64 rng(5);
  SpectralField f = random_band_limited(g, rng, 7);
  CHECK(l2_norm_squared(gradient(f)) ==
        doctest::Approx(l2_norm_squared(apply_lambda(f, 1.0))).epsilon(1e-12));
  CHECK(max_abs(divergence(gradient(f)) - laplacian(f)) < 1e-12 * max_abs(laplacian(f)));
}

TEST_CASE("solve_poisson") {
  const double l = 6.0;
  auto g = grid(l, 16);
  CHECK(max_abs(solve_poisson(SpectralField::zeros(g))) == 0.0);

  SpectralField rho = forward_transform(cosine_mode(g, 1.0, 2));
  SpectralField phi = solve_poisson(rho);
  CHECK(max_abs(phi - (l * l / (4.0 * kPi * kPi)) * rho) < 1e-15);

  std::mt19937_64 rng(9);
  SpectralField r = random_band_limited(g, rng, 6, true);
  SpectralField p = solve_poisson(r);
  CHECK(relative_difference(r, -1.0 * laplacian(p)) < 1e-12);
  CHECK(std::abs(p.mean()) == 0.0);
  // <grad phi, grad phi> = <rho, phi> by parts.
  CHECK(l2_norm_squared(gradient(p)) == doctest::Approx(inner_product(r, p)).epsilon(1e-12));

  SpectralField charged = r;
  charged.coeffs(0) = 1e-3;
  CHECK_THROWS_AS(solve_poisson(charged), MeanZeroViolation);
}

TEST_CASE("leray projection") {
  auto g = grid(2.0, 16);
  std::mt19937_64 rng(21);
  SpectralField f = random_band_limited(g, rng, 6);
  for (const auto& c : leray_project(gradient(f))) CHECK(max_abs(c) < 1e-13);

  SpectralVector a{random_band_limited(g, rng, 6), random_band_limited(g, rng, 6),
                   random_band_limited(g, rng, 6)};
  SpectralVector da0 = gradient(a[0]), da1 = gradient(a[1]), da2 = gradient(a[2]);
  SpectralVector curl{da2[1] - da1[2], da0[2] - da2[0], da1[0] - da0[1]};
  SpectralVector pc = leray_project(curl);
  for (int j = 0; j < 3; ++j) CHECK(max_abs(pc[j] - curl[j]) < 1e-12 * max_abs(curl[j]));

  SpectralVector v{random_band_limited(g, rng, 7), random_band_limited(g, rng, 7),
                   random_band_limited(g, rng, 7)};
  SpectralVector w{random_band_limited(g, rng, 7), random_band_limited(g, rng, 7),
                   random_band_limited(g, rng, 7)};
  SpectralVector pv = leray_project(v);
  SpectralVector pw = leray_project(w);
  const double scale = std::sqrt(l2_norm_squared(v) * l2_norm_squared(w));
  CHECK(std::abs(inner_product(pv, w) - inner_product(v, pw)) < 1e-12 * scale);
  SpectralVector ppv = leray_project(pv);
  for (int j = 0; j < 3; ++j) CHECK(max_abs(ppv[j] - pv[j]) < 1e-13);
  CHECK(max_abs(divergence(pv)) < 1e-12);
  SpectralVector rest{v[0] - pv[0], v[1] - pv[1], v[2] - pv[2]};
  CHECK(std::abs(inner_product(pv, rest)) < 1e-12 * l2_norm_squared(v));
}

TEST_CASE("dealias") {
  auto g = grid(1.0, 24);
  std::mt19937_64 rng(2);
  SpectralField low = random_band_limited(g, rng, 8);
  CHECK(max_abs(dealias(low) - low) == 0.0);

  SpectralField high = SpectralField::zeros(g);
  high.coeffs(index_of(*g, 11, 0, 0)) = 1.0;
  high.coeffs(index_of(*g, 0, 0, 12)) = 1.0;
  CHECK(max_abs(dealias(high)) == 0.0);

  SpectralField any = random_band_limited(g, rng, 12);
  SpectralField once = dealias(any);
  CHECK(max_abs(dealias(once) - once) == 0.0);
}

TEST_CASE("fields on different grids are rejected") {
  auto a = grid(1.0, 8);
  auto b = grid(2.0, 8);
  CHECK_THROWS_AS(SpectralField::zeros(a) + SpectralField::zeros(b), GridMismatch);
  CHECK_NOTHROW(require_same_grid(a, grid(1.0, 8)));
}
