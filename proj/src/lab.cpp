#include "blab/lab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "blab/error.hpp"
#include "blab/fft.hpp"
#include "blab/sobolev.hpp"

namespace blab {
namespace {

double taper(double r) {
  constexpr double r0 = 0.5, r1 = 0.95;
  if (r <= r0) return 1.0;
  if (r >= r1) return 0.0;
  const auto psi = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
  const double t = (r - r0) / (r1 - r0);
  return psi(1.0 - t) / (psi(1.0 - t) + psi(t));
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    for (std::size_t t = i; t <= j; ++t) r[idx[t]] = 0.5 * (i + j);
    i = j + 1;
  }
  return r;
}

}  // namespace

ComplexField RandomConductivity::mu() const {
  Samples m = (1.0 - gamma.values()) / (1.0 + gamma.values());
  return ComplexField(gamma.grid(), std::move(m), "mu");
}

RandomConductivity random_conductivity(double alpha, double gamma0, double K, std::uint64_t seed, const Grid& grid,
                                       int band) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
  if (!(gamma0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "Gamma0 must be positive");
  if (!(K > 1.0)) throw Error(ErrorKind::InvalidArgument, "K must exceed 1");
  if (band < 1 || 2 * band >= grid.n()) throw Error(ErrorKind::InvalidArgument, "band must lie in [1, N/2)");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const int n = grid.n();
  Samples spec = Samples::Zero(n, n);
  for (int m1 = -band; m1 <= band; ++m1)
    for (int m2 = -band; m2 <= band; ++m2) {
      const int r2 = m1 * m1 + m2 * m2;
      if (r2 == 0 || r2 > band * band) continue;
      const double re = normal(rng), im = normal(rng);
      const double xi = grid.frequency_step() * std::sqrt(static_cast<double>(r2));
      spec((m1 + n) % n, (m2 + n) % n) = cplx(re, im) * std::pow(xi, -(1.1 + alpha));
    }
  ComplexField g = inverse_transform(grid, spec);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) g(j, k) = g(j, k).real() * taper(std::abs(grid.z(j, k)));
  g *= gamma0 / sobolev_norm(g, alpha).value;

  RandomConductivity out{ComplexField(grid, "gamma"), gamma0, 0.0, 0.0, K};
  std::size_t clamped = 0;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const double raw = 1.0 + g(j, k).real();
      const double v = std::clamp(raw, 1.0 / K, K);
      clamped += v != raw;
      out.gamma(j, k) = v;
    }
  out.clamped_fraction = static_cast<double>(clamped) / static_cast<double>(grid.size());
  out.measured = sobolev_norm(out.gamma - ComplexField::constant(grid, 1.0), alpha).value;
  if (out.measured < 0.5 * gamma0)
    throw Error(ErrorKind::TargetUnreachable, "clamping to [1/K, K] left " + std::to_string(out.measured) +
                                                  " of the target norm " + std::to_string(gamma0));
  return out;
}

BicubicInterpolator::BicubicInterpolator(const ComplexField& f)
    : f_(f),
      fx_(apply_symbol(f, symbols::d_dx())),
      fy_(apply_symbol(f, symbols::d_dy())),
      fxy_(apply_symbol(fx_, symbols::d_dy())) {}

cplx BicubicInterpolator::operator()(cplx z) const {
  const Grid& g = f_.grid();
  const int n = g.n();
  const double h = g.spacing();
  const auto locate = [&](double x, int& i, double& t) {
    double p = (x + g.half_width()) / h;
    if (std::abs(p - std::round(p)) < 1e-9) p = std::round(p);
    const double fl = std::floor(p);
    t = p - fl;
    i = static_cast<int>(fl);
  };
  int i, j;
  double s, t;
  locate(z.real(), i, s);
  locate(z.imag(), j, t);
  if (s == 0.0 && t == 0.0) return f_(((i % n) + n) % n, ((j % n) + n) % n);
  const auto basis = [h](double u, double b[4]) {
    const double u2 = u * u, u3 = u2 * u;
    b[0] = 2 * u3 - 3 * u2 + 1;
    b[1] = -2 * u3 + 3 * u2;
    b[2] = (u3 - 2 * u2 + u) * h;
    b[3] = (u3 - u2) * h;
  };
  double bx[4], by[4];
  basis(s, bx);
  basis(t, by);
  cplx acc = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const int jj = (((i + a) % n) + n) % n, kk = (((j + b) % n) + n) % n;
      acc += f_(jj, kk) * bx[a] * by[b] + fx_(jj, kk) * bx[2 + a] * by[b] + fy_(jj, kk) * bx[a] * by[2 + b] +
             fxy_(jj, kk) * bx[2 + a] * by[2 + b];
    }
  return acc;
}

ComplexField compose_field(const ComplexField& mu, const ComplexField& phi) {
  require_same_grid(mu.grid(), phi.grid(), "compose_field");
  const Grid& g = mu.grid();
  const double h = g.spacing(), S = g.half_width(), edge = S - 2.0 * h;
  bool quiet_edge = true;
  for (int j = 0; j < g.n() && quiet_edge; ++j)
    for (int k = 0; k < g.n(); ++k) {
      const cplx z = g.z(j, k);
      if (std::max(std::abs(z.real()), std::abs(z.imag())) >= S - 4.0 * h && mu(j, k) != 0.0) {
        quiet_edge = false;
        break;
      }
    }
  const BicubicInterpolator interp(mu);
  ComplexField out(g, "mu o phi");
  for (int j = 0; j < g.n(); ++j)
    for (int k = 0; k < g.n(); ++k) {
      const cplx w = phi(j, k);
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
        throw Error(ErrorKind::OutOfDomain, "non-finite map value");
      const double pj = (w.real() + S) / h, pk = (w.imag() + S) / h;
      const double rj = std::round(pj), rk = std::round(pk);
      if (std::abs(pj - rj) < 1e-9 && std::abs(pk - rk) < 1e-9 && rj >= 0 && rk >= 0 && rj < g.n() && rk < g.n()) {
        out(j, k) = mu(static_cast<int>(rj), static_cast<int>(rk));
        continue;
      }
      if (std::abs(w.real()) > edge || std::abs(w.imag()) > edge) {
        if (!quiet_edge) throw Error(ErrorKind::OutOfDomain, "phi leaves the grid box interior");
        continue;
      }
      out(j, k) = interp(w);
    }
  return out;
}

ComplexField compose_field(const ComplexField& mu, const PrincipalSolution& phi) { return compose_field(mu, phi.phi); }

double l2_distance(const Conductivity& a, const Conductivity& b, double mesh_h) {
  std::vector<double> interfaces;
  for (const Conductivity* c : {&a, &b})
    if (c->layers()) interfaces.insert(interfaces.end(), c->layers()->radii.begin(), c->layers()->radii.end());
  std::sort(interfaces.begin(), interfaces.end());
  interfaces.erase(std::unique(interfaces.begin(), interfaces.end()), interfaces.end());
  const DiskMesh mesh = ring_mesh(mesh_h, interfaces);
  double acc = 0.0;
  for (const auto& t : mesh.triangles) {
    const cplx p = mesh.nodes[t[0]], q = mesh.nodes[t[1]], r = mesh.nodes[t[2]];
    const double area = 0.5 * std::abs(((q - p) * std::conj(r - p)).imag());
    const cplx c = (p + q + r) / 3.0;
    acc += area * std::pow(a(c) - b(c), 2);
  }
  return std::sqrt(acc);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::DimensionMismatch, "spearman needs two equal-length samples");
  const std::vector<double> rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = 0.5 * (n - 1);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  return sxx == 0.0 || syy == 0.0 ? 0.0 : sxy / std::sqrt(sxx * syy);
}

}  // namespace blab
