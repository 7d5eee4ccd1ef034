#include <gtest/gtest.h>

#include <cmath>

#include "blab/beltrami.hpp"
#include "blab/error.hpp"
#include "test_support.hpp"

using namespace blab;
using blab::testing::rel_l2;

namespace {

ComplexField radial_stretch_mu(const Grid& g, double s) {
  const double c = (s - 1.0) / (s + 1.0);
  return ComplexField::sample(g, [c](cplx z) {
    const double r = std::abs(z);
    if (r == 0.0 || r > 1.0) return cplx(0.0);
    return c * z / std::conj(z);
  });
}

}  // namespace

TEST(GammaMu, Examples) {
  const Grid g = Grid::make(16, 2.0);
  EXPECT_EQ(sup_norm(gamma_to_mu(ComplexField::constant(g, 1.0), 2.0)), 0.0);
  const ComplexField mu = gamma_to_mu(ComplexField::constant(g, 3.0), 3.0);
  EXPECT_NEAR(sup_norm(mu - ComplexField::constant(g, -0.5)), 0.0, 1e-15);
}

TEST(GammaMu, RoundTrip) {
  const Grid g = Grid::make(32, 2.0);
  const ComplexField gamma = ComplexField::sample(g, [](cplx z) { return cplx(1.0 + 0.4 * std::sin(3.0 * z.real()) * std::cos(z.imag())); });
  const ComplexField back = mu_to_gamma(gamma_to_mu(gamma, 2.0), 2.0);
  EXPECT_LE(sup_norm(back - gamma), 1e-12);
}

TEST(GammaMu, RangeViolations) {
  const Grid g = Grid::make(16, 2.0);
  EXPECT_THROW(gamma_to_mu(ComplexField::constant(g, 5.0), 2.0), Error);
  EXPECT_THROW(gamma_to_mu(ComplexField::constant(g, cplx(1.0, 0.5)), 2.0), Error);
  EXPECT_THROW(mu_to_gamma(ComplexField::constant(g, 0.5), 2.0), Error);
  try {
    gamma_to_mu(ComplexField::constant(g, 0.1), 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EllipticityViolation);
  }
}

TEST(BeltramiPair, Validation) {
  const Grid g = Grid::make(32, 2.0);
  const ComplexField disk = disk_indicator(g, 1.0);
  EXPECT_NO_THROW(BeltramiPair::make(0.2 * disk, 0.13 * disk, 2.0));
  EXPECT_THROW(BeltramiPair::make(0.2 * disk, 0.2 * disk, 2.0), Error);
  EXPECT_THROW(BeltramiPair::make(0.1 * disk_indicator(g, 1.5), 2.0), Error);
  EXPECT_NEAR(BeltramiPair::make(0.2 * disk, 2.0).kappa(), 1.0 / 3.0, 1e-15);
}

TEST(Neumann, ZeroCoefficientsReturnRhsAtOnce) {
  const Grid g = Grid::make(32, 2.0);
  const auto pair = BeltramiPair::make(ComplexField(g), 2.0);
  const ComplexField rhs = blab::testing::gaussian(g, 4.0);
  const NeumannResult r = neumann_solve(pair, rhs);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_EQ(sup_norm(r.h - rhs), 0.0);
}

TEST(Neumann, GeometricRateAtKappaNineTenths) {
  const Grid g = Grid::make(128, 2.0);
  const double K = 19.0;
  const ComplexField mu = ComplexField::sample(g, [](cplx z) {
    return std::abs(z) <= 1.0 ? 0.9 * std::polar(1.0, 3.0 * std::arg(z + 0.3)) : cplx(0.0);
  });
  const auto pair = BeltramiPair::make(mu, K);
  NeumannOptions opt;
  opt.tol = 1e-10;
  opt.max_iter = 1000;
  const NeumannResult r = neumann_solve(pair, mu, opt);
  const int bound = static_cast<int>(std::ceil(std::log(1e-10) / std::log(0.9))) + 2;
  EXPECT_LE(r.iterations, bound);
  EXPECT_LE(r.residual, 1e-10);
}

TEST(Neumann, MaxIterCarriesResidual) {
  const Grid g = Grid::make(64, 2.0);
  const ComplexField mu = 0.8 * disk_indicator(g, 1.0);
  NeumannOptions opt;
  opt.tol = 1e-14;
  opt.max_iter = 5;
  try {
    neumann_solve(BeltramiPair::make(mu, 9.0), mu, opt);
    FAIL();
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MaxIterExceeded);
    EXPECT_EQ(e.iterations(), 5);
    EXPECT_GT(e.last_residual(), 1e-14);
  }
}

TEST(Principal, ZeroCoefficientGivesIdentity) {
  const Grid g = Grid::make(32, 2.0);
  const auto s = principal_solution(BeltramiPair::make(ComplexField(g), 2.0));
  EXPECT_EQ(sup_norm(s.phi - ComplexField::coordinate(g)), 0.0);
}

TEST(Principal, RadialStretch) {
  const Grid g = Grid::make(512, 4.0);
  const double K = 2.0, s = 1.0 / K;
  const auto pair = BeltramiPair::make(radial_stretch_mu(g, s), K);
  const auto sol = principal_solution(pair);

  const ComplexField exact = ComplexField::sample(g, [s](cplx z) {
    const double r = std::abs(z);
    return r < 1.0 && r > 0.0 ? z * std::pow(r, s - 1.0) : z;
  });
  const ComplexField exact_h = ComplexField::sample(g, [s](cplx z) {
    const double r = std::abs(z);
    return r < 1.0 && r > 0.0 ? 0.5 * (s - 1.0) * std::pow(r, s - 1.0) * z / std::conj(z) : cplx(0.0);
  });
  const Mask d = disk_mask(g, 1.0);
  EXPECT_LE(rel_l2(sol.phi, exact, &d), 0.02);

  EXPECT_GE(sol.ellipticity_fraction, 0.999);
  EXPECT_GE(sol.jacobian_fraction, 0.999);
  EXPECT_EQ(sol.injectivity_failures, 0);

  const double rhs_norm = l2_norm(pair.mu());
  EXPECT_LE(beltrami_residual(pair, sol), (1e-10 + 5.0 * std::sqrt(g.spacing())) * rhs_norm);
}

TEST(Neumann, RadialStretchDensity) {
  const Grid g = Grid::make(1024, 4.0);
  const double s = 0.5;
  const ComplexField mu = radial_stretch_mu(g, s);
  const NeumannResult r = neumann_solve(BeltramiPair::make(mu, 2.0), mu);
  const ComplexField exact = ComplexField::sample(g, [s](cplx z) {
    const double r = std::abs(z);
    return r < 1.0 && r > 0.0 ? 0.5 * (s - 1.0) * std::pow(r, s - 1.0) * z / std::conj(z) : cplx(0.0);
  });
  EXPECT_LE(rel_l2(r.h, exact), 0.02);
}

TEST(Principal, FarFieldDecay) {
  const Grid g = Grid::make(256, 4.0);
  const ComplexField mu = ComplexField::sample(g, [](cplx z) {
    const double r2 = std::norm(z);
    return r2 < 1.0 ? cplx(0.25, 0.2) * (1.0 - r2) * (1.0 + z.real()) : cplx(0.0);
  });
  const auto sol = principal_solution(BeltramiPair::make(mu, 3.0));
  double outer = 0.0, inner = 0.0;
  for (int j = 0; j < g.n(); ++j)
    for (int k = 0; k < g.n(); ++k) {
      const cplx z = g.z(j, k);
      const double r = std::abs(z), v = std::abs(sol.phi(j, k) - z) * r;
      if (r > 3.0 && r < 3.5) outer = std::max(outer, v);
      if (r > 2.5 && r < 3.0) inner = std::max(inner, v);
    }
  EXPECT_GT(inner, 0.0);
  EXPECT_LE(outer, 2.0 * inner);
}

TEST(Principal, ScheduleIndependence) {
  const Grid g = Grid::make(128, 2.0);
  const ComplexField disk = disk_indicator(g, 1.0);
  const ComplexField mu = ComplexField::sample(g, [](cplx z) { return std::abs(z) <= 1.0 ? 0.4 * std::exp(cplx(0, 2.0) * z.real()) : cplx(0.0); });
  const ComplexField nu = 0.35 * disk * ComplexField::coordinate(g);
  const auto pair = BeltramiPair::make(mu, nu, 9.0);
  const double tol = 1e-10;
  NeumannOptions plain;
  plain.tol = tol;
  const auto ref = principal_solution(pair, plain);
  for (Schedule sch : {Schedule::TwoStep, Schedule::Anderson}) {
    NeumannOptions o = plain;
    o.schedule = sch;
    const auto other = principal_solution(pair, o);
    EXPECT_LE(sup_norm(other.phi - ref.phi), 10 * tol) << to_string(sch);
    EXPECT_LE(l2_norm(other.h - ref.h), 10 * tol * l2_norm(mu + nu)) << to_string(sch);
  }
}

TEST(Principal, AndersonNeedsFewerSteps) {
  const Grid g = Grid::make(64, 2.0);
  const ComplexField mu = 0.9 * disk_indicator(g, 1.0) * ComplexField::sample(g, [](cplx z) { return std::polar(1.0, 2.0 * std::arg(z)); });
  NeumannOptions plain, acc;
  plain.max_iter = acc.max_iter = 1000;
  acc.schedule = Schedule::Anderson;
  const auto pair = BeltramiPair::make(mu, 19.0);
  EXPECT_LT(neumann_solve(pair, mu, acc).iterations, neumann_solve(pair, mu, plain).iterations);
}

TEST(Principal, WarmStartFromSolutionConvergesImmediately) {
  const Grid g = Grid::make(64, 2.0);
  const ComplexField mu = 0.3 * disk_indicator(g, 0.8);
  const auto pair = BeltramiPair::make(mu, 2.0);
  NeumannOptions o;
  const NeumannResult first = neumann_solve(pair, mu, o);
  o.warm_start = first.h;
  EXPECT_EQ(neumann_solve(pair, mu, o).iterations, 1);
}
