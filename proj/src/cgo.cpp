#include "blab/cgo.hpp"

#include <cmath>
#include <limits>

#include "anderson.hpp"
#include "blab/error.hpp"
#include "blab/pool.hpp"
#include "blab/sobolev.hpp"

namespace blab {

namespace {

void require_real_mu(const ComplexField& mu) {
  if ((mu.values().imag().abs() > 1e-12).any())
    throw Error(ErrorKind::InvalidArgument, "CGO coefficient must be real-valued");
}

void require_unimodular(cplx lambda) {
  if (std::abs(std::abs(lambda) - 1.0) > 1e-12) throw Error(ErrorKind::InvalidArgument, "|lambda| must be 1");
}

double pick_K(double requested, double sup) {
  if (requested > 0.0) return requested;
  if (sup >= 1.0) throw Error(ErrorKind::EllipticityViolation, "||mu||_inf >= 1");
  return ellipticity_for(sup);
}

ComplexField exp_i(const ComplexField& w, cplx k) {
  Samples v = (cplx(0.0, 1.0) * k * w.values()).exp();
  return ComplexField(w.grid(), std::move(v));
}

}  // namespace

double ellipticity_for(double s) {
  if (!(s >= 0.0 && s < 1.0)) throw Error(ErrorKind::EllipticityViolation, "bound must lie in [0, 1)");
  return std::max(1.0, (1.0 + s) / (1.0 - s));
}

ComplexField exp_phase(const ComplexField& w, cplx k) {
  // kw + conj(kw) = 2 Re(kw) is real, so the phase is unimodular by construction.
  Samples v = w.values().unaryExpr([k](cplx x) { return std::polar(1.0, 2.0 * std::real(k * x)); });
  return ComplexField(w.grid(), std::move(v), "e_k");
}

CgoSolution solve_cgo(const ComplexField& mu, cplx k, cplx lambda, const CgoOptions& opts) {
  require_real_mu(mu);
  require_unimodular(lambda);
  if (!(opts.tol > 0.0) || opts.max_outer < 1) throw Error(ErrorKind::InvalidArgument, "bad CGO options");
  const Grid& g = mu.grid();
  const ComplexField z = ComplexField::coordinate(g);
  const double sup = sup_norm(mu);
  const double K = pick_K(opts.K, sup);

  CgoSolution s{k, lambda, mu, ComplexField(g, "h"), z, ComplexField::constant(g, 1.0, "dphi"),
                ComplexField::constant(g, 1.0, "f"), ComplexField::constant(g, 1.0, "M")};
  if (k == 0.0) return s;

  const cplx c = -lambda * std::conj(k) / k;
  const ComplexField zero(g);
  const bool anderson = opts.scheme == OuterScheme::Anderson;
  double omega = anderson ? 1.0 : (opts.omega > 0.0 ? opts.omega : (sup <= 0.5 ? 1.0 : 0.5));
  double prev_step = std::numeric_limits<double>::infinity();
  double first_step = 0.0, step = 0.0;
  NeumannOptions inner;
  inner.max_iter = opts.inner_max_iter;
  inner.boundary = opts.boundary;
  const bool plane = opts.boundary == Boundary::Plane;
  const double disk = 1.0 + 1e-9;
  const Mask in_disk = disk_mask(g, disk);
  const auto transform_c = [&](const ComplexField& h, double radius) {
    return plane ? cauchy_plane(h, radius) : cauchy(h);
  };
  detail::AndersonMixer mixer(opts.anderson_depth);

  bool converged = false;
  for (int it = 1; it <= opts.max_outer && !converged; ++it) {
    const ComplexField nu = c * (mu * exp_phase(s.phi, -k));
    inner.warm_start = s.h;
    inner.tol = opts.inner_factor * std::max(opts.tol, 1e-2 * std::min(prev_step, 1.0));
    NeumannResult nr = neumann_solve(BeltramiPair::make(zero, nu, K), nu, inner);
    const ComplexField phi_new = z + transform_c(nr.h, disk);
    step = sup_norm(phi_new - s.phi, &in_disk);
    if (it == 1) first_step = step;
    s.outer_iterations = it;
    if (anderson) {
      converged = step <= opts.tol;
      if (converged) {
        s.h = std::move(nr.h);
      } else {
        Samples gs = nr.h.values() - s.h.values();
        detail::as_real(s.h.values()) = mixer.next(detail::as_real(s.h.values()), detail::as_real(gs));
        s.phi = z + transform_c(s.h, disk);
      }
      prev_step = step;
      continue;
    }
    if (step > prev_step) omega = std::max(omega / 2.0, opts.omega_floor);
    prev_step = step;
    if (omega == 1.0) {
      s.h = std::move(nr.h);
      s.phi = phi_new;
    } else {
      s.h = (1.0 - omega) * s.h + omega * nr.h;
      s.phi = (1.0 - omega) * s.phi + omega * phi_new;
    }
    converged = omega * step <= opts.tol;
  }
  s.omega = omega;
  if (!converged)
    throw ConvergenceError(ErrorKind::NoConvergence,
                           "CGO outer iteration at k = (" + std::to_string(k.real()) + ", " + std::to_string(k.imag()) +
                               "): step " + std::to_string(first_step) + " -> " + std::to_string(step) +
                               " after " + std::to_string(s.outer_iterations) + " iterations, omega " +
                               std::to_string(omega),
                           step, s.outer_iterations);

  s.h.set_tag("h");
  s.phi = z + transform_c(s.h, 1e300);
  s.phi.set_tag("phi");
  s.dphi = plane ? beurling_plane(s.h) : beurling(s.h);
  s.dphi.values() += 1.0;
  s.dphi.set_tag("dphi");
  s.f = exp_i(s.phi, k);
  s.f.set_tag("f");
  s.M = exp_i(s.phi - z, k);
  s.M.set_tag("M");
  const ComplexField nu = c * (mu * exp_phase(s.phi, -k));
  s.outer_residual = l2_norm(s.h - nu * s.dphi.conj());
  return s;
}

namespace {

void require_partners(const CgoSolution& fp, const CgoSolution& fm) {
  if (!(fp.f.grid() == fm.f.grid())) throw Error(ErrorKind::MismatchedSolutions, "different grids");
  if (fp.k != fm.k) throw Error(ErrorKind::MismatchedSolutions, "different k");
  if (fp.lambda != 1.0 || fm.lambda != 1.0) throw Error(ErrorKind::MismatchedSolutions, "lambda must be 1");
  if (sup_norm(fp.mu + fm.mu) > 1e-14 * (1.0 + sup_norm(fp.mu)))
    throw Error(ErrorKind::MismatchedSolutions, "coefficients are not opposite");
}

}  // namespace

ComplexField u_gamma(const CgoSolution& fp, const CgoSolution& fm) {
  require_partners(fp, fm);
  Samples u = fp.f.values().real().cast<cplx>() + cplx(0.0, 1.0) * fm.f.values().imag().cast<cplx>();
  return ComplexField(fp.f.grid(), std::move(u), "u");
}

ComplexField u_gamma_tilde(const CgoSolution& fp, const CgoSolution& fm) {
  require_partners(fp, fm);
  Samples u = fp.f.values().imag().cast<cplx>() + cplx(0.0, 1.0) * fm.f.values().real().cast<cplx>();
  return ComplexField(fp.f.grid(), std::move(u), "u_tilde");
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::InvalidArgument, "slope needs >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / den;
}

CsvTable DecayTable::to_csv() const {
  CsvTable t({"k_re", "k_im", "lambda_re", "lambda_im", "sup_abs_phi_minus_z", "outer_iterations", "outer_residual"});
  for (const auto& r : rows)
    t.add_row({r.k.real(), r.k.imag(), r.lambda.real(), r.lambda.imag(), r.sup_abs_phi_minus_z,
               static_cast<long long>(r.outer_iterations), r.outer_residual});
  return t;
}

DecayTable epsilon_decay_table(const ComplexField& mu, const std::vector<cplx>& ks, const std::vector<cplx>& lambdas,
                               const CgoOptions& opts, int workers) {
  DecayTable table;
  table.rows.resize(ks.size() * lambdas.size());
  const ComplexField z = ComplexField::coordinate(mu.grid());
  parallel_for(table.rows.size(), workers, [&](size_t i) {
    const cplx k = ks[i / lambdas.size()], lambda = lambdas[i % lambdas.size()];
    const CgoSolution s = solve_cgo(mu, k, lambda, opts);
    table.rows[i] = {k, lambda, sup_norm(s.phi - z), s.outer_iterations, s.outer_residual};
  });
  std::vector<double> x, y;
  for (const auto& r : table.rows) {
    x.push_back(std::abs(r.k));
    y.push_back(r.sup_abs_phi_minus_z);
  }
  table.slope = table.rows.size() >= 2 ? loglog_slope(x, y) : std::numeric_limits<double>::quiet_NaN();
  return table;
}

PrincipalSolution linear_psi(const ComplexField& mu, cplx k, cplx lambda, const NeumannOptions& opts, double K) {
  require_unimodular(lambda);
  if (k == 0.0) throw Error(ErrorKind::InvalidArgument, "linear_psi needs k != 0");
  const ComplexField coeff = (std::conj(k) / k * lambda) * (modulation(mu.grid(), -k) * mu);
  return principal_solution(BeltramiPair::make(coeff, pick_K(K, sup_norm(mu))), opts);
}

NeumannTerms neumann_terms(const ComplexField& mu, cplx k, int n_max) {
  if (n_max < 0) throw Error(ErrorKind::InvalidArgument, "n_max must be >= 0");
  NeumannTerms out;
  const double r = std::abs(k);
  out.radii = {r / 4.0, r / 2.0, r};
  out.f.push_back(mu);
  for (int n = 1; n <= n_max; ++n) out.f.push_back(mu * shifted_beurling(out.f.back(), n, k));
  for (const auto& fn : out.f) {
    std::vector<double> row;
    for (double R : out.radii) row.push_back(fourier_tail(fn, 2.0 * R));
    out.tails.push_back(std::move(row));
  }
  return out;
}

}  // namespace blab
