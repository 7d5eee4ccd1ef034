#include <gtest/gtest.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "blab/error.hpp"
#include "blab/scattering.hpp"

using namespace blab;

namespace {

ComplexField gaussian(const Grid& g, double amp) {
  return ComplexField::sample(g, [amp](cplx z) {
    const double r2 = std::norm(z);
    return r2 <= 1.0 ? cplx(amp * std::exp(-r2 / 0.125)) : cplx(0.0);
  });
}

ComplexField disk_instance(const Grid& g) { return (-1.0 / 3.0) * disk_indicator(g, 1.0); }

TauOptions fast() {
  TauOptions o;
  o.cgo.scheme = OuterScheme::Anderson;
  o.cgo.tol = 1e-11;
  return o;
}

std::vector<cplx> sample_points() {
  std::vector<cplx> zs;
  for (int i = 0; i < 16; ++i) zs.push_back(std::polar(0.2 + 0.15 * i, 0.7 * i));
  return zs;
}

}  // namespace

TEST(Tau, ZeroCoefficient) {
  const Grid g = Grid::make(64, 4.0);
  EXPECT_EQ(tau(ComplexField(g), {1.0, 0.5}, TauMethod::Area), 0.0);
  EXPECT_EQ(tau(ComplexField(g), {1.0, 0.5}, TauMethod::Boundary), 0.0);
}

TEST(Tau, MethodsAgreeOnDiskInstance) {
  const Grid g = Grid::make(256, 4.0);
  for (double k : {1.0, 2.0}) {
    const CgoPair p = solve_pair(disk_instance(g), k, fast().cgo);
    const cplx a = tau(p, TauMethod::Area, fast()), b = tau(p, TauMethod::Boundary, fast());
    EXPECT_LE(std::abs(a - b), 0.01 * std::abs(a)) << "k=" << k;
  }
}

TEST(Tau, ContourRadiusIndependence) {
  const Grid g = Grid::make(256, 4.0);
  const CgoPair p = solve_pair(gaussian(g, 0.3), {1.5, -0.5}, fast().cgo);
  TauOptions o = fast();
  o.trace_radius = 1.0;
  const cplx t1 = tau(p, TauMethod::Boundary, o);
  o.trace_radius = 1.0 + 2.0 * g.spacing();
  const cplx t2 = tau(p, TauMethod::Boundary, o);
  o.trace_radius = 1.7;
  const cplx t3 = tau(p, TauMethod::Boundary, o);
  EXPECT_LE(std::abs(t1 - t2), 1e-3 * std::abs(t2));
  EXPECT_LE(std::abs(t3 - t2), 1e-3 * std::abs(t2));
  o.area_radius = 1.5;
  EXPECT_LE(std::abs(tau(p, TauMethod::Area, o) - tau(p, TauMethod::Area, fast())), 1e-4 * std::abs(t2));
}

TEST(Tau, SignFlipUnderNegation) {
  const Grid g = Grid::make(128, 4.0);
  const CgoPair p = solve_pair(gaussian(g, 0.3), 1.0, fast().cgo);
  const CgoPair q{p.minus, p.plus};
  for (TauMethod m : {TauMethod::Area, TauMethod::Boundary})
    EXPECT_LE(std::abs(tau(q, m, fast()) + tau(p, m, fast())), 1e-14);
}

TEST(Tau, GridSelfConvergence) {
  const cplx k(2.0, 0.0);
  const Grid coarse = Grid::make(256, 4.0), fine = Grid::make(512, 4.0);
  const cplx a = tau(gaussian(coarse, 0.3), k, TauMethod::Area, fast());
  const cplx b = tau(gaussian(fine, 0.3), k, TauMethod::Area, fast());
  EXPECT_LE(std::abs(a - b), 0.02 * std::abs(b));
}

TEST(Tau, Mismatch) {
  const Grid g = Grid::make(32, 4.0);
  const ComplexField mu = 0.2 * disk_indicator(g, 0.5);
  const CgoPair bad{solve_cgo(mu, 1.0), solve_cgo(mu, 1.0)};
  try {
    tau(bad, TauMethod::Area);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MismatchedSolutions);
  }
  EXPECT_THROW(tau(CgoPair{solve_cgo(mu, 1.0), solve_cgo(-1.0 * mu, 2.0)}, TauMethod::Boundary), Error);
}

TEST(Tau, RejectsContourOutsideBox) {
  const Grid g = Grid::make(32, 2.0);
  TauOptions o;
  o.trace_radius = 2.5;
  EXPECT_THROW(tau(0.2 * disk_indicator(g, 0.5), 1.0, TauMethod::Boundary, o), Error);
}

TEST(TauSamples, CsvAndPoolDeterminism) {
  const Grid g = Grid::make(128, 4.0);
  const std::vector<cplx> ks = {1.0, {0.0, 1.0}, {1.0, 1.0}};
  const ScatteringSamples a = tau_samples(gaussian(g, 0.3), ks, TauMethod::Boundary, fast(), 1);
  const ScatteringSamples b = tau_samples(gaussian(g, 0.3), ks, TauMethod::Boundary, fast(), 3);
  const std::string csv = a.to_csv().str();
  EXPECT_EQ(csv, b.to_csv().str());
  EXPECT_EQ(csv.substr(0, csv.find("\r\n")), "k_re,k_im,tau_re,tau_im,method,residual");
  EXPECT_NE(csv.find(",boundary,"), std::string::npos);
  EXPECT_DOUBLE_EQ(a.trace_radius, 1.0 + 2.0 * g.spacing());
  EXPECT_EQ(a.n_theta, 8 * 128);
}

TEST(Dbar, ZeroCoefficientVanishes) {
  const Grid g = Grid::make(64, 4.0);
  const DbarResult r = dbar_residual(ComplexField(g), {2.0, 0.5}, 1e-2, sample_points());
  EXPECT_EQ(r.residual, 0.0);
  EXPECT_EQ(r.tau, 0.0);
}

TEST(Dbar, SmoothCoefficient) {
  const Grid g = Grid::make(256, 4.0);
  const ComplexField mu = gaussian(g, 0.3);
  std::vector<double> res;
  for (double d : {1.6e-1, 8e-2, 4e-2, 2e-2, 1e-2}) {
    const DbarResult r = dbar_residual(mu, {2.0, 0.5}, d, sample_points(), fast());
    res.push_back(r.residual);
    EXPECT_NEAR(r.literal_residual, std::sqrt(5.0), 0.01);
  }
  EXPECT_LE(res.back(), 0.05);
  // second-order regime, then monotone until the values level off at the quadrature floor
  EXPECT_GE(res[0] / res[1], 2.5);
  bool floor = false;
  for (size_t i = 1; i + 1 < res.size(); ++i) {
    if (!floor && res[i + 1] > res[i]) floor = true;
    if (floor) EXPECT_LE(std::abs(res[i + 1] - res[i]), 0.2 * res[i]) << i;
  }
}

TEST(Dbar, JsonSummary) {
  const Grid g = Grid::make(32, 4.0);
  const DbarResult r = dbar_residual(ComplexField(g), 1.0, 1e-2, {0.5});
  const auto j = nlohmann::json::parse(to_json({r, r}));
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[0]["residual"], 0.0);
  EXPECT_EQ(j[1]["samples"], 1);
  EXPECT_THROW(dbar_residual(ComplexField(g), 1.0, 0.0, {0.5}), Error);
}
