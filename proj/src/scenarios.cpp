#include "blab/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>

#include "blab/cgo.hpp"
#include "blab/dtn.hpp"
#include "blab/error.hpp"
#include "blab/field_io.hpp"
#include "blab/lab.hpp"
#include "blab/pool.hpp"
#include "blab/scattering.hpp"
#include "blab/sobolev.hpp"

namespace blab {

namespace {

using json = nlohmann::ordered_json;
constexpr double kPi = Grid::kPi;

void check(ScenarioResult& r, std::string id, std::string kind, bool passed, double value, double bound,
           std::string detail) {
  r.assertions.push_back({std::move(id), std::move(kind), passed && std::isfinite(value), value, bound,
                          std::move(detail)});
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string tag(const std::string& name, double v) { return name + "=" + short_number(v); }

std::string at(double v) { return "[" + short_number(v) + "]"; }

Grid grid_of(const ScenarioConfig& cfg, int scale = 1) { return Grid::make(cfg.grid_n * scale, cfg.half_width); }

ComplexField gaussian_bump(const Grid& g, double amp) {
  return ComplexField::sample(g, [amp](cplx z) {
    const double r2 = std::norm(z);
    return r2 <= 1.0 ? cplx(amp * std::exp(-r2 / 0.125)) : cplx(0.0);
  });
}

CgoOptions cgo_options(const ScenarioConfig& cfg, OuterScheme scheme = OuterScheme::Anderson) {
  CgoOptions o;
  o.tol = cfg.tol;
  o.max_outer = cfg.max_outer;
  o.scheme = scheme;
  o.K = cfg.K;
  return o;
}

std::vector<double> moduli(const std::vector<cplx>& ks) {
  std::vector<double> out;
  for (cplx k : ks) out.push_back(std::abs(k));
  return out;
}

double rel_change(double coarse, double fine) { return std::abs(fine - coarse) / std::abs(coarse); }

// ---------------------------------------------------------------- alessandrini

void alessandrini(const ScenarioConfig& cfg, ScenarioResult& r) {
  const auto& r0s = cfg.r0_list;
  const Conductivity one = Conductivity::radial({{}, {1.0}}, cfg.K);
  const DtnMatrix lam1 = dtn_matrix(one, cfg.n_b, cfg.mesh_h, cfg.workers);
  const DtnMatrix oracle1 = radial_dtn_oracle({{}, {1.0}}, cfg.n_b);
  std::vector<double> rho(r0s.size()), l2(r0s.size()), l2_grid(r0s.size()), rho_oracle(r0s.size());
  const Grid g = grid_of(cfg);
  const Mask disk = disk_mask(g, 1.0);
  parallel_for(r0s.size(), cfg.workers, [&](std::size_t i) {
    const RadialLayers layers{{r0s[i]}, {2.0, 1.0}};
    const Conductivity two = Conductivity::radial(layers, cfg.K);
    rho[i] = dtn_distance(lam1, dtn_matrix(two, cfg.n_b, cfg.mesh_h));
    rho_oracle[i] = dtn_distance(oracle1, radial_dtn_oracle(layers, cfg.n_b));
    l2[i] = l2_distance(one, two, cfg.mesh_h);
    l2_grid[i] = lp_norm(disk_indicator(g, r0s[i]), 2.0, &disk);
  });
  CsvTable t({"r0", "rho", "l2diff", "rho_oracle", "l2diff_grid"});
  for (std::size_t i = 0; i < r0s.size(); ++i) {
    t.add_row({r0s[i], rho[i], l2[i], rho_oracle[i], l2_grid[i]});
    check(r, "rho_le_2r0" + at(r0s[i]), "bound", rho[i] <= 2.0 * r0s[i], rho[i], 2.0 * r0s[i],
          "rho <= 2 r0");
    const double exact = std::sqrt(kPi) * r0s[i];
    check(r, "l2diff" + at(r0s[i]), "exact", std::abs(l2[i] - exact) <= 1e-3,
          std::abs(l2[i] - exact), 1e-3, "|l2diff - sqrt(pi) r0|");
  }
  bool mono = true;
  for (std::size_t i = 1; i < r0s.size(); ++i) mono = mono && ((r0s[i] > r0s[i - 1]) == (rho[i] > rho[i - 1]));
  check(r, "rho_monotone_in_r0", "monotonicity", mono, mono ? 1.0 : 0.0, 1.0, "rho increases with r0");
  r.tables.emplace_back("alessandrini", std::move(t));
}

// ---------------------------------------------------------------- oscillation

void oscillation(const ScenarioConfig& cfg, ScenarioResult& r) {
  const auto& js = cfg.osc_j;
  if (js.size() < 3) throw Error(ErrorKind::InvalidArgument, "oscillation needs at least three j values");
  const double a = cfg.osc_amplitude;
  std::vector<Conductivity> cs;
  for (double j : js)
    cs.push_back(Conductivity::from_function(
        [a, j](cplx z) { return 1.0 + a * std::sin(2 * kPi * j * z.real()) * std::sin(2 * kPi * j * z.imag()); },
        cfg.K));
  std::vector<DtnMatrix> lams(js.size());
  parallel_for(js.size(), cfg.workers, [&](std::size_t i) { lams[i] = dtn_matrix(cs[i], cfg.n_b, cfg.mesh_h); });
  const std::size_t m = js.size() - 1;
  std::vector<double> rho(m), l2(m);
  parallel_for(m, cfg.workers, [&](std::size_t i) {
    rho[i] = dtn_distance(lams[i], lams[i + 1]);
    l2[i] = l2_distance(cs[i], cs[i + 1], cfg.mesh_h);
  });
  CsvTable t({"j1", "j2", "rho", "l2diff"});
  for (std::size_t i = 0; i < m; ++i) t.add_row({js[i], js[i + 1], rho[i], l2[i]});
  for (std::size_t i = 1; i < m; ++i) {
    const double ratio = rho[i - 1] / rho[i];
    check(r, "rho_halves" + at(js[i]), "property", ratio >= 2.0, ratio, 2.0,
          "rho(j1/2, j1) / rho(j1, 2 j1)");
    check(r, "l2_floor" + at(js[i]), "property", l2[i] > 0.5 * l2[0], l2[i], 0.5 * l2[0],
          "l2diff stays above half its first value");
  }
  r.metrics["rho_first"] = rho.front();
  r.metrics["rho_last"] = rho.back();
  r.tables.emplace_back("oscillation", std::move(t));
}

// ---------------------------------------------------------------- decay

void decay(const ScenarioConfig& cfg, ScenarioResult& r) {
  const Grid g = grid_of(cfg);
  const RandomConductivity rc = random_conductivity(cfg.alpha, cfg.gamma0, cfg.K, cfg.seed, g);
  const ComplexField mu = rc.mu();
  const DecayTable table = epsilon_decay_table(mu, cfg.k_list, cfg.lambda_list, cgo_options(cfg), cfg.workers);
  check(r, "slope_negative", "sign", table.slope < -0.05, table.slope, -0.05,
        "log-log slope of sup|phi - z| against |k|");
  std::map<double, std::pair<double, double>> spread;
  for (const DecayRow& row : table.rows) {
    auto [it, fresh] = spread.try_emplace(std::abs(row.k), row.sup_abs_phi_minus_z, row.sup_abs_phi_minus_z);
    if (!fresh) {
      it->second.first = std::min(it->second.first, row.sup_abs_phi_minus_z);
      it->second.second = std::max(it->second.second, row.sup_abs_phi_minus_z);
    }
  }
  double worst = 1.0;
  for (const auto& [k, mm] : spread) worst = std::max(worst, mm.second / mm.first);
  check(r, "lambda_spread", "property", worst <= 3.0, worst, 3.0, "max over |k| of max/min sup across lambda");
  r.metrics["slope"] = table.slope;
  r.metrics["gamma_norm_target"] = rc.target;
  r.metrics["gamma_norm_measured"] = rc.measured;
  r.metrics["clamped_fraction"] = rc.clamped_fraction;
  r.tables.emplace_back("decay", table.to_csv());
  r.fields.emplace_back("gamma", rc.gamma);
  r.fields.emplace_back("mu", mu);
}

// ---------------------------------------------------------------- stability_curve

void stability_curve(const ScenarioConfig& cfg, ScenarioResult& r) {
  if (cfg.pairs < 8) throw Error(ErrorKind::InvalidArgument, "stability_curve needs at least 8 pairs");
  const Grid g = grid_of(cfg);
  const RandomConductivity rc = random_conductivity(cfg.alpha, cfg.gamma0, cfg.K, cfg.seed, g);
  const int nb_max = 64;
  const std::vector<int> nbs = {16, 32, 64};
  const std::size_t n = static_cast<std::size_t>(cfg.pairs);
  std::vector<double> contrast(n);
  for (std::size_t i = 0; i < n; ++i) contrast[i] = std::pow(cfg.contrast_min, double(i) / double(n - 1));

  const cplx k0 = cfg.k_list.front();
  const TauOptions topts{cgo_options(cfg)};
  const Mask disk = disk_mask(g, 1.0);
  const ComplexField one = ComplexField::constant(g, 1.0);

  // slot n holds gamma1 itself
  std::vector<DtnMatrix> lams(n + 1);
  std::vector<cplx> taus(n + 1);
  std::vector<double> l2(n);
  std::vector<ComplexField> gammas;
  for (std::size_t i = 0; i < n; ++i) gammas.push_back(one + (1.0 - contrast[i]) * (rc.gamma - one));
  gammas.push_back(rc.gamma);
  parallel_for(n + 1, cfg.workers, [&](std::size_t i) {
    lams[i] = dtn_matrix(Conductivity::from_field(gammas[i], cfg.K), nb_max, cfg.mesh_h);
    taus[i] = tau(gamma_to_mu(gammas[i], cfg.K), k0, TauMethod::Area, topts);
    if (i < n) l2[i] = lp_norm(gammas[i] - rc.gamma, 2.0, &disk);
  });

  CsvTable t({"contrast", "rho", "l2diff", "inv_log_rho", "rho_nb16", "rho_nb32", "rho_nb64", "nb_monotone",
              "tau_diff"});
  std::vector<double> xs, ys, rhos;
  bool nb_ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double rho = dtn_distance(lams[n].truncated(cfg.n_b), lams[i].truncated(cfg.n_b));
    std::vector<double> by_nb;
    for (int nb : nbs) by_nb.push_back(dtn_distance(lams[n].truncated(nb), lams[i].truncated(nb)));
    const bool mono = std::is_sorted(by_nb.begin(), by_nb.end());
    nb_ok = nb_ok && mono;
    const double x = 1.0 / std::abs(std::log(rho));
    xs.push_back(x);
    ys.push_back(l2[i]);
    rhos.push_back(rho);
    t.add_row({contrast[i], rho, l2[i], x, by_nb[0], by_nb[1], by_nb[2], (long long)mono,
               std::abs(taus[i] - taus[n])});
  }
  const double rs = spearman(xs, ys);
  check(r, "spearman", "monotonicity", rs >= 0.9, rs, 0.9, "Spearman(|log rho|^-1, l2diff)");
  const double decades = std::log10(*std::max_element(rhos.begin(), rhos.end()) /
                                    *std::min_element(rhos.begin(), rhos.end()));
  check(r, "rho_span_decades", "property", decades >= 3.0, decades, 3.0, "log10(max rho / min rho)");
  r.metrics["spearman"] = rs;
  r.metrics["nb_monotone"] = nb_ok;
  r.metrics["tau_k"] = {k0.real(), k0.imag()};
  r.metrics["gamma_norm_measured"] = rc.measured;
  r.tables.emplace_back("stability_curve", std::move(t));
  r.fields.emplace_back("gamma1", rc.gamma);
}

// ---------------------------------------------------------------- composition

struct Composed {
  ComplexField mu, composed;
  std::vector<double> norms;
};

Composed compose_at(const ScenarioConfig& cfg, int scale, const std::vector<double>& betas) {
  const Grid g = grid_of(cfg, scale);
  const ComplexField mu = random_conductivity(cfg.alpha, cfg.gamma0, cfg.K, cfg.seed, g).mu();
  NeumannOptions no;
  no.schedule = Schedule::Anderson;
  const PrincipalSolution phi = principal_solution(BeltramiPair::make(mu, cfg.K), no);
  Composed c{mu, compose_field(mu, phi), {}};
  for (double b : betas) c.norms.push_back(sobolev_norm(c.composed, b).value);
  return c;
}

void composition(const ScenarioConfig& cfg, ScenarioResult& r) {
  std::vector<double> betas;
  for (double f : cfg.beta_factors) betas.push_back(f * cfg.alpha / cfg.K);
  std::vector<std::optional<Composed>> runs(2);
  parallel_for(2, cfg.workers, [&](std::size_t i) { runs[i] = compose_at(cfg, 1 << i, betas); });
  CsvTable t({"beta_factor", "beta", "norm_n", "norm_2n", "rel_change"});
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const double a = runs[0]->norms[i], b = runs[1]->norms[i];
    const double ch = rel_change(a, b);
    t.add_row({cfg.beta_factors[i], betas[i], a, b, ch});
    check(r, "finite" + at(cfg.beta_factors[i]), "finiteness", std::isfinite(a) && std::isfinite(b),
          b, 0.0, "||mu o phi||_{W^{beta,2}} on both grids");
  }
  const std::size_t top = std::max_element(cfg.beta_factors.begin(), cfg.beta_factors.end()) -
                          cfg.beta_factors.begin();
  const double ch = rel_change(runs[0]->norms[top], runs[1]->norms[top]);
  check(r, "grid_stable", "property", ch < 0.05, ch, 0.05,
        "relative change N -> 2N at " + tag("beta_factor", cfg.beta_factors[top]));
  r.tables.emplace_back("composition", std::move(t));
  r.fields.emplace_back("mu", runs[0]->mu);
  r.fields.emplace_back("mu_composed", runs[0]->composed);
}

// ---------------------------------------------------------------- regularity

ComplexField smooth_cutoff(const Grid& g, double r1, double r2) {
  return ComplexField::sample(g, [r1, r2](cplx z) {
    const double r = std::abs(z);
    if (r <= r1) return cplx(1.0);
    if (r >= r2) return cplx(0.0);
    const auto e = [](double s) { return s > 0 ? std::exp(-1.0 / s) : 0.0; };
    const double s = (r2 - r) / (r2 - r1);
    return cplx(e(s) / (e(s) + e(1.0 - s)));
  });
}

struct CgoRegularity {
  double deriv = 0.0, inv_grad = 0.0;
};

CgoRegularity cgo_regularity(const ComplexField& mu, cplx k, double order, double p, const CgoOptions& o) {
  const Grid& g = mu.grid();
  const CgoSolution s = solve_cgo(mu, k, 1.0, o);
  const Mask disk = disk_mask(g, 1.0);
  const ComplexField chi = smooth_cutoff(g, 1.5, std::min(2.5, 0.9 * g.half_width()));
  CgoRegularity out;
  out.deriv = l2_norm(frac_deriv(chi * s.f, order), &disk);
  // d f = i k f d phi
  ComplexField inv(g);
  inv.values() = (cplx(0.0, 1.0) * k * s.f.values() * s.dphi.values()).abs().pow(-p).cast<cplx>();
  out.inv_grad = integrate(inv, &disk).real();
  return out;
}

void regularity(const ScenarioConfig& cfg, ScenarioResult& r) {
  const double theta = 0.9 / cfg.K;
  const double kappa = ellipticity_bound(cfg.K);
  const double order = theta * cfg.alpha;
  const double p = 2.0;

  // homeomorphic solution: family mu_t = t mu
  const std::vector<double> ts = {0.25, 0.5, 1.0};
  std::vector<std::vector<double>> hn(2, std::vector<double>(ts.size()));
  std::vector<ComplexField> mus;
  for (int s = 0; s < 2; ++s) {
    const Grid g = grid_of(cfg, 1 << s);
    const ComplexField mu = random_conductivity(cfg.alpha, cfg.gamma0, cfg.K, cfg.seed, g).mu();
    mus.push_back(mu);
  }
  const double mu_sup = sup_norm(mus[0]);
  parallel_for(2 * ts.size(), cfg.workers, [&](std::size_t c) {
    const std::size_t s = c / ts.size(), i = c % ts.size();
    NeumannOptions no;
    no.schedule = Schedule::Anderson;
    const ComplexField mt = (ts[i] * kappa / mu_sup) * mus[s];
    const PrincipalSolution phi = principal_solution(BeltramiPair::make(mt, cfg.K), no);
    hn[s][i] = 2.0 * homogeneous_seminorm(phi.h, order).value;
  });
  CsvTable th({"t", "mu_sup", "norm_n", "norm_2n"});
  for (std::size_t i = 0; i < ts.size(); ++i) th.add_row({ts[i], ts[i] * kappa, hn[0][i], hn[1][i]});
  const double slope = loglog_slope(ts, hn[0]);
  check(r, "phi_norm_finite", "finiteness", true, hn[0].back(), 0.0, "||D^{1+theta alpha}(phi - z)||_2");
  check(r, "phi_growth_in_t", "bound", slope <= theta + 0.15, slope, theta + 0.15,
        "log-log slope of ||D^{1+theta alpha}(phi - z)||_2 against t");
  const double hch = rel_change(hn[0].back(), hn[1].back());
  check(r, "phi_grid_stable", "property", hch < 0.1, hch, 0.1, "relative change N -> 2N at t = 1");
  r.tables.emplace_back("regularity_phi", std::move(th));

  // CGO solutions
  const auto& ks = cfg.k_list;
  std::vector<std::vector<CgoRegularity>> cr(2, std::vector<CgoRegularity>(ks.size()));
  parallel_for(2 * ks.size(), cfg.workers, [&](std::size_t c) {
    const std::size_t s = c / ks.size(), i = c % ks.size();
    cr[s][i] = cgo_regularity(mus[s], ks[i], 1.0 + order, p, cgo_options(cfg));
  });
  CsvTable tc({"k_re", "k_im", "deriv_n", "deriv_2n", "inv_grad_n", "inv_grad_2n"});
  std::vector<double> logs;
  const std::vector<double> ak = moduli(ks);
  for (std::size_t i = 0; i < ks.size(); ++i) {
    tc.add_row({ks[i].real(), ks[i].imag(), cr[0][i].deriv, cr[1][i].deriv, cr[0][i].inv_grad, cr[1][i].inv_grad});
    logs.push_back(std::log(cr[0][i].deriv));
    const double dch = rel_change(cr[0][i].deriv, cr[1][i].deriv);
    const double ich = rel_change(cr[0][i].inv_grad, cr[1][i].inv_grad);
    const std::string where = at(ak[i]);
    check(r, "cgo_deriv_grid_stable" + where, "property", dch < 0.1, dch, 0.1,
          "||D^{1+alpha theta} f||_{L^2(D)} change N -> 2N");
    check(r, "inv_grad_finite" + where, "finiteness", std::isfinite(cr[1][i].inv_grad), cr[1][i].inv_grad, 0.0,
          "int_D |1/d f|^2");
    check(r, "inv_grad_grid_stable" + where, "property", ich < 0.1, ich, 0.1, "int_D |1/d f|^2 change N -> 2N");
  }
  // exponential envelope: least-squares line in (|k|, log norm) lifted by its largest residual
  double mk = 0, ml = 0;
  for (std::size_t i = 0; i < ak.size(); ++i) mk += ak[i] / ak.size(), ml += logs[i] / ak.size();
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < ak.size(); ++i) sxx += (ak[i] - mk) * (ak[i] - mk), sxy += (ak[i] - mk) * (logs[i] - ml);
  const double rate = sxx > 0 ? sxy / sxx : 0.0;
  double margin = 0.0;
  for (std::size_t i = 0; i < ak.size(); ++i) margin = std::max(margin, logs[i] - (ml + rate * (ak[i] - mk)));
  bool below = true;
  for (std::size_t i = 0; i < ak.size(); ++i) below = below && logs[i] <= ml + rate * (ak[i] - mk) + margin;
  check(r, "cgo_exponential_envelope", "finiteness", below && margin >= 0.0, margin, 0.0,
        "largest residual above the fitted exp(c|k|) envelope");
  r.metrics["theta"] = theta;
  r.metrics["envelope_rate"] = rate;
  r.tables.emplace_back("regularity_cgo", std::move(tc));
  r.fields.emplace_back("mu", mus[0]);
}

// ---------------------------------------------------------------- char_fn

void char_fn(const ScenarioConfig& cfg, ScenarioResult& r) {
  const double radius = 0.6;
  const auto& as = cfg.char_orders;
  std::vector<std::vector<double>> v(2, std::vector<double>(as.size()));
  for (int s = 0; s < 2; ++s) {
    const ComplexField chi = disk_indicator(grid_of(cfg, 1 << s), radius);
    parallel_for(as.size(), cfg.workers, [&](std::size_t i) { v[s][i] = sobolev_norm(chi, as[i]).value; });
  }
  CsvTable t({"a", "norm_n", "norm_2n", "growth"});
  for (std::size_t i = 0; i < as.size(); ++i) {
    const double growth = v[1][i] / v[0][i] - 1.0;
    t.add_row({as[i], v[0][i], v[1][i], growth});
    const std::string where = at(as[i]);
    if (as[i] < 0.5)
      check(r, "stable" + where, "property", std::abs(growth) < 0.05, std::abs(growth), 0.05,
            "relative change N -> 2N below the threshold order");
    else
      check(r, "divergent" + where, "property", growth >= 0.25, growth, 0.25,
            "relative growth N -> 2N at or above the threshold order");
  }
  r.metrics["radius"] = radius;
  r.tables.emplace_back("char_fn", std::move(t));
}

// ---------------------------------------------------------------- dbar_check

void dbar_check(const ScenarioConfig& cfg, ScenarioResult& r) {
  const Grid g = grid_of(cfg);
  const ComplexField mu = gaussian_bump(g, cfg.mu_amplitude);
  std::vector<cplx> zs;
  for (int i = 0; i < 16; ++i) zs.push_back(std::polar(0.2 + 0.15 * i, 0.7 * i));
  const TauOptions topts{cgo_options(cfg)};
  std::vector<double> ds = cfg.delta_k_list;
  std::sort(ds.begin(), ds.end(), std::greater<>());
  std::vector<DbarResult> all;
  CsvTable t({"k_re", "k_im", "delta_k", "tau_re", "tau_im", "residual", "literal_residual"});
  for (cplx k : cfg.k_list) {
    std::vector<double> res;
    for (double d : ds) {
      const DbarResult dr = dbar_residual(mu, k, d, zs, topts, cfg.workers);
      t.add_row({k.real(), k.imag(), d, dr.tau.real(), dr.tau.imag(), dr.residual, dr.literal_residual});
      res.push_back(dr.residual);
      all.push_back(dr);
    }
    const std::string where = at(std::abs(k));
    check(r, "residual" + where, "property", res.back() <= 0.05, res.back(), 0.05,
          "relative residual at " + tag("delta_k", ds.back()));
    // non-increasing until the quadrature floor, flat within 20% afterwards
    bool floor = false, mono = true;
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < res.size(); ++i) {
      if (!floor && res[i + 1] > res[i]) floor = true;
      if (floor) {
        const double jump = std::abs(res[i + 1] - res[i]) / res[i];
        worst = std::max(worst, jump);
        mono = mono && jump <= 0.2;
      }
    }
    check(r, "monotone" + where, "monotonicity", mono, worst, 0.2,
          "residual non-increasing as delta_k halves, up to a 20% floor band");
  }
  r.tables.emplace_back("dbar", std::move(t));
  r.metrics["dbar"] = json::parse(to_json(all));
  r.fields.emplace_back("mu", mu);
}

// ---------------------------------------------------------------- linear_terms

void linear_terms(const ScenarioConfig& cfg, ScenarioResult& r) {
  const Grid g = grid_of(cfg);
  const ComplexField mu = gaussian_bump(g, cfg.mu_amplitude);
  const double sup = sup_norm(mu), l2mu = l2_norm(mu);
  const double wnorm = sobolev_norm(mu, cfg.alpha).value;
  const auto& ks = cfg.k_list;
  std::vector<NeumannTerms> terms(ks.size());
  std::vector<double> psi(ks.size());
  const ComplexField z = ComplexField::coordinate(g);
  parallel_for(ks.size(), cfg.workers, [&](std::size_t i) {
    terms[i] = neumann_terms(mu, ks[i], cfg.n_max);
    NeumannOptions no;
    no.schedule = Schedule::Anderson;
    psi[i] = sup_norm(linear_psi(mu, ks[i], 1.0, no, cfg.K).phi - z);
  });
  CsvTable t({"k_re", "k_im", "n", "l2", "bound", "tail_quarter", "tail_half", "tail_full"});
  bool bounded = true, tails_mono = true, tail_ok = true;
  double worst_bound = 0.0, worst_tail = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const NeumannTerms& nt = terms[i];
    for (std::size_t n = 0; n < nt.f.size(); ++n) {
      const double l2 = l2_norm(nt.f[n]);
      const double bound = std::pow(sup, double(n)) * l2mu;
      bounded = bounded && l2 <= bound * (1 + 1e-10);
      worst_bound = std::max(worst_bound, l2 / bound);
      const auto& tl = nt.tails[n];
      tails_mono = tails_mono && tl[0] >= tl[1] && tl[1] >= tl[2];
      t.add_row({ks[i].real(), ks[i].imag(), (long long)n, l2, bound, tl[0], tl[1], tl[2]});
    }
    for (std::size_t j = 0; j < nt.radii.size(); ++j) {
      const double allowed = wnorm / std::pow(2.0 * nt.radii[j], cfg.alpha);
      tail_ok = tail_ok && nt.tails[0][j] <= allowed;
      worst_tail = std::max(worst_tail, nt.tails[0][j] / allowed);
    }
  }
  check(r, "geometric_bound", "bound", bounded, worst_bound, 1.0, "max ||f_n||_2 / (||mu||_inf^n ||mu||_2)");
  check(r, "tails_monotone", "monotonicity", tails_mono, tails_mono ? 1.0 : 0.0, 1.0,
        "Fourier tails shrink as the cut radius grows");
  check(r, "fourier_tail_bound", "bound", tail_ok, worst_tail, 1.0,
        "max tail(R) R^alpha / ||mu||_{W^{alpha,2}}");
  const double slope = loglog_slope(moduli(ks), psi);
  check(r, "linear_psi_decay", "sign", slope < 0.0, slope, 0.0, "log-log slope of sup|psi - z| against |k|");
  CsvTable tp({"k_re", "k_im", "sup_abs_psi_minus_z"});
  for (std::size_t i = 0; i < ks.size(); ++i) tp.add_row({ks[i].real(), ks[i].imag(), psi[i]});
  r.metrics["psi_slope"] = slope;
  r.tables.emplace_back("linear_terms", std::move(t));
  r.tables.emplace_back("linear_psi", std::move(tp));
  r.fields.emplace_back("mu", mu);
}

// ---------------------------------------------------------------- convergence_map

void convergence_map(const ScenarioConfig& cfg, ScenarioResult& r) {
  const Grid g = grid_of(cfg);
  const auto& kappas = cfg.kappa_list;
  const auto& ks = cfg.k_list;
  const std::vector<OuterScheme> schemes = {OuterScheme::DampedPicard, OuterScheme::Anderson};
  struct Cell {
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;
  };
  const std::size_t cells = kappas.size() * ks.size() * schemes.size();
  std::vector<Cell> out(cells);
  parallel_for(cells, cfg.workers, [&](std::size_t c) {
    const std::size_t s = c % schemes.size(), ki = (c / schemes.size()) % ks.size(),
                      ci = c / (schemes.size() * ks.size());
    const ComplexField mu = kappas[ci] * disk_indicator(g, 1.0);
    CgoOptions o = cgo_options(cfg, schemes[s]);
    o.K = ellipticity_for(kappas[ci]);
    try {
      const CgoSolution sol = solve_cgo(mu, ks[ki], 1.0, o);
      out[c] = {true, sol.outer_iterations, sol.outer_residual};
    } catch (const ConvergenceError& e) {
      out[c] = {false, e.iterations(), e.last_residual()};
    }
  });
  CsvTable t({"kappa", "k_abs", "scheme", "converged", "iterations", "residual"});
  int converged = 0;
  for (std::size_t c = 0; c < cells; ++c) {
    const std::size_t s = c % schemes.size(), ki = (c / schemes.size()) % ks.size(),
                      ci = c / (schemes.size() * ks.size());
    t.add_row({kappas[ci], std::abs(ks[ki]), std::string(schemes[s] == OuterScheme::Anderson ? "anderson" : "picard"),
               (long long)out[c].converged, (long long)out[c].iterations, out[c].residual});
    converged += out[c].converged;
  }
  r.metrics["cells"] = static_cast<long long>(cells);
  r.metrics["converged_cells"] = converged;
  r.tables.emplace_back("convergence_map", std::move(t));
}

using Runner = std::function<void(const ScenarioConfig&, ScenarioResult&)>;

const std::vector<std::pair<ScenarioInfo, Runner>>& registry() {
  static const std::vector<std::pair<ScenarioInfo, Runner>> r = {
      {{"alessandrini", "rho and L2 distance for gamma = 1 + chi_{B(0,r0)} against gamma = 1"}, alessandrini},
      {{"oscillation", "DtN distance and L2 distance for gamma(jx) as j doubles"}, oscillation},
      {{"decay", "sup|phi - z| against |k| for a random conductivity"}, decay},
      {{"stability_curve", "L2 distance against |log rho|^-1 for shrinking-contrast pairs"}, stability_curve},
      {{"composition", "W^{beta,2} norm of mu o phi under grid refinement"}, composition},
      {{"regularity", "fractional derivatives of phi - z and of CGO solutions, inverse gradient integrals"},
       regularity},
      {{"char_fn", "W^{a,2} norm of a disk indicator on both sides of a = 1/2"}, char_fn},
      {{"dbar_check", "finite-difference residual of the k-equation"}, dbar_check},
      {{"linear_terms", "Neumann terms f_n, their Fourier tails and the linear decay equation"}, linear_terms},
      {{"convergence_map", "outer-iteration convergence over kappa and |k| for kappa chi_D"}, convergence_map},
  };
  return r;
}

}  // namespace

bool ScenarioResult::passed() const {
  return error.empty() && std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

nlohmann::ordered_json ScenarioResult::summary(const ScenarioConfig& cfg) const {
  json j;
  j["schema"] = "blab-summary/1";
  j["scenario"] = scenario;
  j["config"] = cfg.to_json();
  j["passed"] = passed();
  j["error"] = error.empty() ? json(nullptr) : json(error);
  json as = json::array();
  for (const Assertion& a : assertions) {
    const auto num = [](double v) { return std::isfinite(v) ? json(v) : json(format_number(v)); };
    as.push_back({{"id", a.id}, {"kind", a.kind}, {"passed", a.passed}, {"value", num(a.value)},
                  {"bound", num(a.bound)}, {"detail", a.detail}});
  }
  j["assertions"] = as;
  j["metrics"] = metrics;
  json outs = json::array();
  for (const auto& [name, t] : tables) outs.push_back(name + ".csv");
  for (const auto& [name, f] : fields) outs.push_back(name + ".blf");
  j["outputs"] = outs;
  return j;
}

const std::vector<ScenarioInfo>& scenario_list() {
  static const std::vector<ScenarioInfo> list = [] {
    std::vector<ScenarioInfo> v;
    for (const auto& [info, run] : registry()) v.push_back(info);
    return v;
  }();
  return list;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  const auto& reg = registry();
  const auto it = std::find_if(reg.begin(), reg.end(), [&](const auto& e) { return e.first.name == cfg.scenario; });
  if (it == reg.end()) throw Error(ErrorKind::UnknownScenario, "no scenario named '" + cfg.scenario + "'");
  validate(cfg);
  ScenarioResult r;
  r.scenario = cfg.scenario;
  try {
    it->second(cfg, r);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError || e.kind() == ErrorKind::UnknownScenario) throw;
    r.error = e.what();
  }
  return r;
}

void write_outputs(const ScenarioResult& r, const ScenarioConfig& cfg) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + cfg.out + ": " + ec.message());
  const fs::path dir(cfg.out);
  for (const auto& [name, t] : r.tables) t.save((dir / (name + ".csv")).string());
  for (const auto& [name, f] : r.fields) save_field((dir / (name + ".blf")).string(), f);
  std::ofstream out(dir / "summary.json", std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write summary.json in " + cfg.out);
  out << r.summary(cfg).dump(2) << '\n';
}

}  // namespace blab
