#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "blab/error.hpp"
#include "blab/fft.hpp"
#include "blab/sobolev.hpp"
#include "test_support.hpp"

using namespace blab;
using blab::testing::random_smooth_field;
using blab::testing::rel_l2;

namespace {

constexpr double kPi = Grid::kPi;

// Composite Simpson on [a, b] with an even number of panels.
template <class F>
double simpson(F f, double a, double b, int panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// |f^(rho)|^2 for f = exp(-b|z|^2): f^ = (pi/b) exp(-rho^2/(4b)).
double gaussian_power(double rho, double b) {
  const double v = kPi / b * std::exp(-rho * rho / (4.0 * b));
  return v * v;
}

}  // namespace

TEST(FracDeriv, OrderZeroIsIdentity) {
  const Grid g = Grid::make(64, 2.0);
  const ComplexField f = blab::testing::gaussian(g, 3.0);
  EXPECT_LE(rel_l2(frac_deriv(f, 0.0), f), 1e-12);
}

TEST(FracDeriv, PlaneWaveEigenvalue) {
  const Grid g = Grid::make(64, 2.0);
  const ComplexField w = plane_wave(g, 5, -3);
  const double r = g.frequency_step() * std::hypot(5.0, 3.0);
  for (double a : {0.3, 1.0, 1.7}) {
    EXPECT_LE(rel_l2(frac_deriv(w, a), std::pow(r, a) * w), 1e-12);
  }
}

TEST(FracDeriv, Semigroup) {
  const Grid g = Grid::make(128, 2.0);
  const ComplexField f = random_smooth_field(g, 2);
  EXPECT_LE(rel_l2(frac_deriv(frac_deriv(f, 0.3), 0.7), frac_deriv(f, 1.0)), 1e-10);
}

TEST(SobolevNorm, OrderZeroIsL2) {
  const Grid g = Grid::make(128, 2.0);
  const ComplexField f = random_smooth_field(g, 7);
  EXPECT_NEAR(sobolev_norm(f, 0.0).value / l2_norm(f), 1.0, 1e-12);
}

TEST(SobolevNorm, GaussianMatchesRadialQuadrature) {
  const Grid g = Grid::make(512, 16.0);
  const ComplexField f = blab::testing::gaussian(g, 1.0);
  for (double a : {0.25, 0.5, 1.0, 1.5}) {
    // (1/4pi^2) \int (1+rho^2)^a |f^|^2 2 pi rho drho
    const double oracle = std::sqrt(
        simpson([&](double rho) { return std::pow(1 + rho * rho, a) * gaussian_power(rho, 1.0) * rho; },
                0.0, 60.0, 20000) /
        (2.0 * kPi));
    EXPECT_NEAR(sobolev_norm(f, a).value, oracle, 1e-6) << "a=" << a;
  }
}

TEST(SobolevNorm, CharacteristicFunctionThreshold) {
  // p = 2: chi_B belongs to W^{a,2} exactly for a < 1/2.
  const auto norm_at = [](int n, double a) {
    const Grid g = Grid::make(n, 4.0);
    return sobolev_norm(disk_indicator(g, 0.6), a).value;
  };
  const double stable = norm_at(512, 0.45) / norm_at(256, 0.45);
  const double growing = norm_at(512, 0.55) / norm_at(256, 0.55);
  EXPECT_LT(std::abs(stable - 1.0), 0.05);
  EXPECT_GT(growing, stable);
}

TEST(SobolevNorm, RejectsOrderOutOfRange) {
  const Grid g = Grid::make(16, 2.0);
  EXPECT_THROW(sobolev_norm(ComplexField(g), 2.5), Error);
}

TEST(SobolevProperties, MonotoneInOrder) {
  const Grid g = Grid::make(128, 2.0);
  for (unsigned seed = 0; seed < 3; ++seed) {
    const ComplexField f = random_smooth_field(g, seed);
    double prev = 0.0;
    for (double a = 0.0; a <= 2.0; a += 0.25) {
      const double v = sobolev_norm(f, a).value;
      EXPECT_GE(v, prev);
      prev = v;
    }
  }
}

TEST(SobolevProperties, LogConvexInterpolation) {
  const Grid g = Grid::make(128, 2.0);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (unsigned seed = 0; seed < 6; ++seed) {
    const ComplexField f = random_smooth_field(g, 50 + seed);
    const double a0 = 2.0 * u(rng), a1 = 2.0 * u(rng), theta = u(rng);
    const double mid = sobolev_norm(f, theta * a0 + (1 - theta) * a1).value;
    const double bound = std::pow(sobolev_norm(f, a0).value, theta) *
                         std::pow(sobolev_norm(f, a1).value, 1 - theta);
    EXPECT_LE(mid, bound * (1 + 1e-10));
  }
}

TEST(SobolevProperties, LebesgueInterpolation) {
  const Grid g = Grid::make(64, 2.0);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (unsigned seed = 0; seed < 8; ++seed) {
    const ComplexField f = random_smooth_field(g, 70 + seed);
    // 1/2 = theta/p0 + (1 - theta)/p1 with p0 in (0.3, 2), p1 in (2, 8).
    const double p0 = 0.3 + 1.7 * u(rng), p1 = 2.0 + 6.0 * u(rng);
    const double theta = (0.5 - 1.0 / p1) / (1.0 / p0 - 1.0 / p1);
    const double lhs = lp_norm(f, 2.0);
    const double rhs = std::pow(lp_norm(f, p0), theta) * std::pow(lp_norm(f, p1), 1 - theta);
    EXPECT_LE(lhs, rhs * (1 + 1e-10));
  }
}

TEST(Besov, ConstantFieldVanishes) {
  const Grid g = Grid::make(32, 2.0);
  const ComplexField c = ComplexField::constant(g, {2.0, -1.0});
  EXPECT_NEAR(besov_seminorm(c, 0.5, 2.0, 2.0).value, 0.0, 1e-12);
  EXPECT_NEAR(besov_seminorm(c, 0.5, 1.0, 2.0).value, 0.0, 1e-12);
}

TEST(Besov, DirectShiftsAgreeWithAutocorrelation) {
  const Grid g = Grid::make(32, 2.0);
  const ComplexField f = random_smooth_field(g, 3, 0.5);
  BesovOptions opt;
  opt.max_shift = 0.6;
  const double fast = besov_seminorm(f, 0.4, 2.0, 2.0, opt).value;
  const double direct = besov_seminorm(f, 0.4, 2.0 + 1e-15, 2.0, opt).value;
  EXPECT_NEAR(fast / direct, 1.0, 1e-8);
}

TEST(Besov, MatchesFourierSideWithBesselConstant) {
  // \int |f(x+y)-f(x)|^2 dx = (1/4pi^2) \int 2(1 - cos<xi,y>) |f^|^2, so the
  // truncated double integral equals (1/4pi^2) \int |f^|^2 (c(a)|xi|^{2a} - T_Y(|xi|)),
  // with c(a) = 2pi \int_0^inf (2 - 2J0(s)) s^{-1-2a} ds and T_Y the part of the
  // shift integral beyond Y.  Both are radial Bessel quadratures.
  const double b = 4.0;
  const Grid g = Grid::make(256, 8.0);
  const ComplexField f = blab::testing::gaussian(g, b);
  for (double a : {0.4, 0.6}) {
    const double y_max = 4.0;
    BesovOptions opt;
    opt.max_shift = y_max;
    const double lattice = besov_seminorm(f, a, 2.0, 2.0, opt).value;

    const auto kernel = [a](double s) { return (2.0 - 2.0 * std::cyl_bessel_j(0.0, s)) * std::pow(s, -1.0 - 2.0 * a); };
    const double c_a = 2.0 * kPi * (simpson(kernel, 1e-9, 400.0, 100000) +
                                    2.0 * std::pow(400.0, -2.0 * a) / (2.0 * a));
    const auto tail = [&](double rho) {
      if (rho == 0.0) return 0.0;
      const double far = 2.0 * std::pow(y_max, -2.0 * a) / (2.0 * a);
      const double osc = simpson([&](double r) { return std::cyl_bessel_j(0.0, rho * r) * std::pow(r, -1.0 - 2.0 * a); },
                                 y_max, y_max + 150.0, 3000);
      return 2.0 * kPi * (far - 2.0 * osc);
    };
    const double oracle_sq =
        simpson([&](double rho) {
          return (c_a * std::pow(rho, 2.0 * a) - tail(rho)) * gaussian_power(rho, b) * rho;
        }, 0.0, 20.0, 200) / (2.0 * kPi);
    const double ratio = lattice / std::sqrt(oracle_sq);
    EXPECT_NEAR(ratio, 1.0, 0.05) << "a=" << a;

    // Untruncated equivalence with the Riesz seminorm.
    const double riesz = homogeneous_seminorm(f, a).value * std::sqrt(c_a);
    EXPECT_GT(riesz, lattice);
  }
}

TEST(Besov, DilationScaling) {
  // f_2(z) = f(2z) has homogeneous seminorm 2^{a-1} times that of f, with the
  // grid and the shift truncation refined by the same factor.
  const double a = 0.5;
  const Grid coarse = Grid::make(128, 4.0);
  const Grid fine = Grid::make(128, 2.0);
  const auto bump = [](cplx z) { return cplx(std::exp(-4.0 * std::norm(z)) * (1.0 + z.real())); };
  const ComplexField f = ComplexField::sample(coarse, bump);
  const ComplexField f2 = ComplexField::sample(fine, [&](cplx z) { return bump(2.0 * z); });
  BesovOptions o1, o2;
  o1.max_shift = 2.0;
  o2.max_shift = 1.0;
  const double ratio = besov_seminorm(f2, a, 2, 2, o2).value / besov_seminorm(f, a, 2, 2, o1).value;
  EXPECT_NEAR(ratio / std::pow(2.0, a - 1.0), 1.0, 0.03);
}

TEST(SobolevReport, SerializesToJson) {
  const Grid g = Grid::make(16, 2.0);
  const auto r = sobolev_norm(blab::testing::gaussian(g), 0.5);
  const std::string js = to_json(r);
  EXPECT_NE(js.find("\"method\":\"bessel-fourier\""), std::string::npos);
  EXPECT_NE(js.find("\"alpha\":0.5"), std::string::npos);
}
