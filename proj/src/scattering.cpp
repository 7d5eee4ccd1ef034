#include "blab/scattering.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <optional>

#include "blab/error.hpp"
#include "blab/pool.hpp"
#include "blab/transforms.hpp"

namespace blab {
namespace {

constexpr double kPi = Grid::kPi;

void check_pair(const CgoPair& p) {
  if (!(p.plus.f.grid() == p.minus.f.grid())) throw Error(ErrorKind::MismatchedSolutions, "different grids");
  if (p.plus.k != p.minus.k) throw Error(ErrorKind::MismatchedSolutions, "different k");
  if (p.plus.lambda != 1.0 || p.minus.lambda != 1.0) throw Error(ErrorKind::MismatchedSolutions, "lambda must be 1");
  if (((p.plus.mu.values() + p.minus.mu.values()).abs() > 0.0).any())
    throw Error(ErrorKind::MismatchedSolutions, "coefficients are not opposite");
}

// 1 on |z| <= r0, 0 on |z| >= r1, C-infinity in between.
double cutoff(double r, double r0, double r1) {
  if (r <= r0) return 1.0;
  if (r >= r1) return 0.0;
  const auto psi = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
  const double t = (r - r0) / (r1 - r0);
  return psi(1.0 - t) / (psi(1.0 - t) + psi(t));
}

cplx tau_area(const ComplexField& F, double radius) {
  const Grid& g = F.grid();
  const double S = g.half_width();
  const double r0 = std::max(1.1, radius + 0.1), r1 = 0.9 * S;
  if (r1 <= r0 + 0.2) throw Error(ErrorKind::InvalidGrid, "box too small for the area quadrature");
  ComplexField G = F;
  for (int j = 0; j < g.n(); ++j)
    for (int k = 0; k < g.n(); ++k) G(j, k) *= cutoff(std::abs(g.z(j, k)), r0, r1);
  const Mask disk = disk_mask(g, radius);
  return cplx(0.0, 1.0 / (4.0 * kPi)) * integrate(d_z(G), &disk);
}

double contour_radius(const Grid& g, double requested) { return requested > 0.0 ? requested : 1.0 + 2.0 * g.spacing(); }

cplx tau_boundary(const ComplexField& F, double requested, int n_theta) {
  const double radius = contour_radius(F.grid(), requested);
  if (radius < 1.0) throw Error(ErrorKind::InvalidArgument, "trace radius must be >= 1");
  if (radius >= F.grid().half_width()) throw Error(ErrorKind::OutOfDomain, "trace radius outside the box");
  const int n = n_theta > 0 ? n_theta : 8 * F.grid().n();
  cplx acc = 0.0;
  for (int m = 0; m < n; ++m) {
    const double th = 2.0 * kPi * m / n;
    const cplx w = std::polar(radius, th);
    acc += interpolate_bilinear(F, w) * std::conj(cplx(0.0, 1.0) * w);  // dz-bar / d-theta
  }
  // int_D d_z F dA = (i/2) closed integral of F dz-bar
  return -(1.0 / (8.0 * kPi)) * acc * (2.0 * kPi / n);
}

}  // namespace

const char* to_string(TauMethod m) { return m == TauMethod::Area ? "area" : "boundary"; }

CgoPair solve_pair(const ComplexField& mu, cplx k, const CgoOptions& opts) {
  return {solve_cgo(mu, k, 1.0, opts), solve_cgo(-1.0 * mu, k, 1.0, opts)};
}

cplx tau(const CgoPair& pair, TauMethod method, const TauOptions& opts) {
  check_pair(pair);
  const ComplexField F = (pair.plus.M - pair.minus.M).conj();
  return method == TauMethod::Area ? tau_area(F, opts.area_radius)
                                   : tau_boundary(F, opts.trace_radius, opts.n_theta);
}

cplx tau(const ComplexField& mu, cplx k, TauMethod method, const TauOptions& opts) {
  return tau(solve_pair(mu, k, opts.cgo), method, opts);
}

ScatteringSamples tau_samples(const ComplexField& mu, const std::vector<cplx>& ks, TauMethod method,
                              const TauOptions& opts, int workers) {
  ScatteringSamples s;
  s.k = ks;
  s.tau.assign(ks.size(), 0.0);
  s.residual.assign(ks.size(), 0.0);
  s.method = method;
  s.grid_n = mu.grid().n();
  s.grid_half_width = mu.grid().half_width();
  s.trace_radius = contour_radius(mu.grid(), opts.trace_radius);
  s.n_theta = opts.n_theta > 0 ? opts.n_theta : 8 * s.grid_n;
  s.area_radius = opts.area_radius;
  parallel_for(ks.size(), workers, [&](std::size_t i) {
    const CgoPair p = solve_pair(mu, ks[i], opts.cgo);
    s.tau[i] = tau(p, method, opts);
    s.residual[i] = std::max(p.plus.outer_residual, p.minus.outer_residual);
  });
  for (cplx t : s.tau)
    if (!std::isfinite(t.real()) || !std::isfinite(t.imag()))
      throw Error(ErrorKind::NoConvergence, "non-finite scattering value");
  return s;
}

CsvTable ScatteringSamples::to_csv() const {
  CsvTable t({"k_re", "k_im", "tau_re", "tau_im", "method", "residual"});
  for (std::size_t i = 0; i < k.size(); ++i)
    t.add_row({k[i].real(), k[i].imag(), tau[i].real(), tau[i].imag(), std::string(to_string(method)), residual[i]});
  return t;
}

DbarResult dbar_residual(const ComplexField& mu, cplx k, double delta_k, const std::vector<cplx>& z_samples,
                         const TauOptions& opts, int workers) {
  if (!(delta_k > 0.0)) throw Error(ErrorKind::InvalidArgument, "delta_k must be positive");
  if (z_samples.empty()) throw Error(ErrorKind::InvalidArgument, "no sample points");
  const cplx I(0.0, 1.0);
  // 0: k, 1: k+d, 2: k-d, 3: k+id, 4: k-id; even slot +mu, odd slot -mu
  const cplx shifts[5] = {0.0, delta_k, -delta_k, I * delta_k, -I * delta_k};
  std::vector<std::optional<CgoSolution>> sols(10);
  parallel_for(sols.size(), workers, [&](std::size_t i) {
    sols[i] = solve_cgo(i % 2 == 0 ? mu : -1.0 * mu, k + shifts[i / 2], 1.0, opts.cgo);
  });

  DbarResult r;
  r.k = k;
  r.delta_k = delta_k;
  r.tau = tau(CgoPair{*sols[0], *sols[1]}, TauMethod::Area, opts);

  double num = 0.0, den = 0.0, lit_num = 0.0, lit_den = 0.0;
  for (cplx z : z_samples) {
    const cplx E = std::exp(I * k * z);
    cplx f[2], dk[2], dkbar[2];
    for (int s = 0; s < 2; ++s) {
      const auto M = [&](int slot) { return interpolate_bilinear(sols[2 * slot + s]->M, z); };
      const cplx m0 = M(0);
      const cplx d_re = (M(1) - M(2)) / (2.0 * delta_k), d_im = (M(3) - M(4)) / (2.0 * delta_k);
      f[s] = E * m0;
      dk[s] = I * z * E * m0 + E * 0.5 * (d_re - I * d_im);
      dkbar[s] = E * 0.5 * (d_re + I * d_im);
    }
    const cplx u(f[0].real(), f[1].imag());
    const cplx lhs = 0.5 * (dkbar[0] + std::conj(dk[0])) + 0.5 * (dkbar[1] - std::conj(dk[1]));
    const cplx rhs = -2.0 * r.tau * std::conj(u);
    const cplx literal = -I * r.tau * std::conj(u);
    r.lhs.push_back(lhs);
    r.rhs.push_back(rhs);
    num += std::norm(lhs - rhs);
    den += std::norm(rhs);
    lit_num += std::norm(lhs - literal);
    lit_den += std::norm(literal);
  }
  r.residual = num == 0.0 ? 0.0 : std::sqrt(num / den);
  r.literal_residual = lit_num == 0.0 ? 0.0 : std::sqrt(lit_num / lit_den);
  return r;
}

std::string to_json(const std::vector<DbarResult>& sweep) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const DbarResult& r : sweep)
    j.push_back({{"k_re", r.k.real()},
                 {"k_im", r.k.imag()},
                 {"delta_k", r.delta_k},
                 {"tau_re", r.tau.real()},
                 {"tau_im", r.tau.imag()},
                 {"residual", r.residual},
                 {"literal_residual", r.literal_residual},
                 {"samples", r.lhs.size()}});
  return j.dump();
}

}  // namespace blab
