#include "blab/beltrami.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "anderson.hpp"
#include "blab/error.hpp"

namespace blab {

namespace {

constexpr double kSlack = 1e-12;

void require_real(const ComplexField& f, const char* what) {
  if ((f.values().imag().abs() > kSlack * (1.0 + f.values().real().abs())).any())
    throw Error(ErrorKind::EllipticityViolation, std::string(what) + " is not real-valued");
}

void require_K(double K) {
  if (!(K >= 1.0) || !std::isfinite(K)) throw Error(ErrorKind::InvalidArgument, "K must be >= 1");
}

}  // namespace

double ellipticity_bound(double K) {
  require_K(K);
  return (K - 1.0) / (K + 1.0);
}

ComplexField gamma_to_mu(const ComplexField& gamma, double K) {
  require_K(K);
  require_real(gamma, "conductivity");
  const auto g = gamma.values().real();
  if ((g < (1.0 / K) * (1 - kSlack)).any() || (g > K * (1 + kSlack)).any())
    throw Error(ErrorKind::EllipticityViolation, "conductivity outside [1/K, K]");
  Samples mu = ((1.0 - g) / (1.0 + g)).cast<cplx>();
  return ComplexField(gamma.grid(), std::move(mu), "mu");
}

ComplexField mu_to_gamma(const ComplexField& mu, double K) {
  const double kappa = ellipticity_bound(K);
  require_real(mu, "coefficient");
  const auto m = mu.values().real();
  if ((m.abs() > kappa + kSlack).any())
    throw Error(ErrorKind::EllipticityViolation, "|mu| exceeds kappa");
  Samples g = ((1.0 - m) / (1.0 + m)).cast<cplx>();
  return ComplexField(mu.grid(), std::move(g), "gamma");
}

BeltramiPair::BeltramiPair(ComplexField mu, ComplexField nu, double K, double sup)
    : mu_(std::move(mu)), nu_(std::move(nu)), kappa_(ellipticity_bound(K)), K_(K), sup_(sup) {}

BeltramiPair BeltramiPair::make(ComplexField mu, ComplexField nu, double K) {
  const double kappa = ellipticity_bound(K);
  require_same_grid(mu.grid(), nu.grid(), "BeltramiPair");
  if (!mu.all_finite() || !nu.all_finite())
    throw Error(ErrorKind::InvalidArgument, "non-finite coefficient");
  const double sup = (mu.values().abs() + nu.values().abs()).maxCoeff();
  if (sup > kappa + kSlack)
    throw Error(ErrorKind::EllipticityViolation,
                "max |mu| + |nu| = " + std::to_string(sup) + " exceeds kappa = " + std::to_string(kappa));
  const Grid& g = mu.grid();
  for (int j = 0; j < g.n(); ++j)
    for (int k = 0; k < g.n(); ++k)
      if (std::abs(g.z(j, k)) > 1.0 + kSlack && (mu(j, k) != 0.0 || nu(j, k) != 0.0))
        throw Error(ErrorKind::InvalidArgument, "coefficient not supported in the unit disk");
  return BeltramiPair(std::move(mu), std::move(nu), K, sup);
}

BeltramiPair BeltramiPair::make(ComplexField mu, double K) {
  ComplexField nu(mu.grid(), "nu");
  return make(std::move(mu), std::move(nu), K);
}

const char* to_string(Schedule s) {
  switch (s) {
    case Schedule::Plain: return "plain";
    case Schedule::TwoStep: return "two-step";
    case Schedule::Anderson: return "anderson";
  }
  return "?";
}

NeumannResult neumann_solve(const BeltramiPair& pair, const ComplexField& rhs, const NeumannOptions& opts) {
  require_same_grid(pair.grid(), rhs.grid(), "neumann_solve");
  if (!(opts.tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
  if (opts.max_iter < 1) throw Error(ErrorKind::InvalidArgument, "max_iter must be >= 1");

  const Samples& mu = pair.mu().values();
  const Samples& nu = pair.nu().values();
  const Samples& b = rhs.values();
  const double scale = l2_norm(rhs);
  const bool has_nu = (nu != 0.0).any();
  const Grid& g = rhs.grid();
  double reach = 0.0;  // 0 when both coefficients vanish
  for (int j = 0; j < g.n(); ++j)
    for (int k = 0; k < g.n(); ++k)
      if (mu(j, k) != 0.0 || nu(j, k) != 0.0) reach = std::max(reach, std::abs(g.z(j, k)));

  const auto apply = [&](const ComplexField& h) {
    if (reach == 0.0) return rhs;
    const ComplexField th = opts.boundary == Boundary::Plane ? beurling_plane(h, reach) : beurling(h);
    Samples out = mu * th.values() + b;
    if (has_nu) out += nu * th.values().conjugate();
    return ComplexField(rhs.grid(), std::move(out), "h");
  };

  NeumannResult res{opts.warm_start ? *opts.warm_start : rhs, 0.0, 0};
  if (opts.warm_start) require_same_grid(opts.warm_start->grid(), rhs.grid(), "neumann_solve");
  if (scale == 0.0 && !opts.warm_start) return {ComplexField(rhs.grid(), "h"), 0.0, 1};
  const double denom = scale > 0.0 ? scale : 1.0;

  detail::AndersonMixer mixer(opts.anderson_depth);

  for (int it = 1; it <= opts.max_iter; ++it) {
    ComplexField next = apply(res.h);
    if (opts.schedule == Schedule::TwoStep) {
      ComplexField after = apply(next);
      res.residual = l2_norm(after - next) / denom;
      res.h = std::move(after);
    } else {
      Samples gs = next.values() - res.h.values();
      res.residual = std::sqrt(gs.abs2().sum() * rhs.grid().cell_area()) / denom;
      if (opts.schedule == Schedule::Anderson && opts.anderson_depth > 0 && res.residual > opts.tol) {
        // Mixing in the real inner product: the operator is only R-linear.
        const Eigen::VectorXd upd = mixer.next(detail::as_real(res.h.values()), detail::as_real(gs));
        detail::as_real(next.values()) = upd;
      }
      res.h = std::move(next);
    }
    res.iterations = it;
    if (!std::isfinite(res.residual))
      throw ConvergenceError(ErrorKind::MaxIterExceeded, "Neumann iteration diverged", res.residual, it);
    if (res.residual <= opts.tol) return res;
  }
  throw ConvergenceError(ErrorKind::MaxIterExceeded,
                         "Neumann series: residual " + std::to_string(res.residual) + " after " +
                             std::to_string(res.iterations) + " iterations",
                         res.residual, res.iterations);
}

PrincipalSolution principal_solution(const BeltramiPair& pair, const NeumannOptions& opts) {
  const ComplexField rhs = pair.mu() + pair.nu();
  NeumannResult nr = neumann_solve(pair, rhs, opts);
  const bool plane = opts.boundary == Boundary::Plane;
  ComplexField phi = ComplexField::coordinate(pair.grid()) + (plane ? cauchy_plane(nr.h) : cauchy(nr.h));
  phi.set_tag("phi");
  ComplexField dphi = plane ? beurling_plane(nr.h) : beurling(nr.h);
  dphi.values() += 1.0;
  PrincipalSolution s{std::move(nr.h), std::move(phi), std::move(dphi), nr.residual, nr.iterations};
  s.dphi.set_tag("dphi");

  const auto ah = s.h.values().abs();
  const auto ad = s.dphi.values().abs();
  const double nodes = static_cast<double>(ah.size());
  s.ellipticity_fraction = (ah <= pair.kappa() * ad * (1 + 1e-9) + kSlack).cast<double>().sum() / nodes;
  s.jacobian_fraction = (ad.square() - ah.square() > 0.0).cast<double>().sum() / nodes;

  std::mt19937_64 rng(20240613);
  std::uniform_int_distribution<int> pick(0, pair.grid().n() - 1);
  for (int t = 0; t < 1000; ++t) {
    const int j1 = pick(rng), k1 = pick(rng), j2 = pick(rng), k2 = pick(rng);
    if (j1 == j2 && k1 == k2) continue;
    if (std::abs(s.phi(j1, k1) - s.phi(j2, k2)) < 1e-9) ++s.injectivity_failures;
  }
  return s;
}

double beltrami_residual(const BeltramiPair& pair, const PrincipalSolution& sol) {
  const ComplexField w = sol.phi - ComplexField::coordinate(pair.grid());
  ComplexField dbar = d_zbar(w);
  ComplexField d = d_z(w);
  d.values() += 1.0;
  const Samples r = dbar.values() - pair.mu().values() * d.values() - pair.nu().values() * d.values().conjugate();
  return std::sqrt(r.abs2().sum() * pair.grid().cell_area());
}

}  // namespace blab
