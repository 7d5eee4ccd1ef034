#include "blab/transforms.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "blab/error.hpp"

namespace blab {
namespace {

constexpr double kPi = Grid::kPi;
// Width parameter of the Gaussian that carries the mean of a Cauchy density.
constexpr double kMeanCarrier = 16.0;

// Multiplier arrays are reused across the Neumann iterations; keyed by
// (N, S) and symbol id.
const Samples& cached_multiplier(const Grid& grid, int id, FourierSymbol (*make)()) {
  static std::map<std::tuple<int, double, int>, Samples> cache;
  static std::mutex m;
  std::lock_guard<std::mutex> lock(m);
  auto key = std::make_tuple(grid.n(), grid.half_width(), id);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, symbol_array(grid, make())).first;
  return it->second;
}

cplx internal_shift(int n, cplx k) { return k_to_lattice_frequency(static_cast<double>(n) * k); }

void check_shift(const Grid& grid, cplx xi) {
  const double limit = 0.5 * grid.nyquist();
  if (std::abs(xi.real()) > limit || std::abs(xi.imag()) > limit) {
    throw Error(ErrorKind::FrequencyOverflow, "modulation frequency beyond half Nyquist");
  }
}

// Per-grid tables shared by the Cauchy variants.
struct GridTables {
  RealSamples radius;
  ComplexField carrier;
  cplx carrier_mass;
  Samples carrier_cauchy, carrier_beurling;
};

const GridTables& grid_tables(const Grid& grid) {
  static std::map<std::pair<int, double>, GridTables> cache;
  static std::mutex m;
  std::lock_guard<std::mutex> lock(m);
  const auto key = std::make_pair(grid.n(), grid.half_width());
  auto it = cache.find(key);
  if (it == cache.end()) {
    const int n = grid.n();
    GridTables t{RealSamples(n, n), ComplexField::sample(grid, [](cplx z) {
                   return cplx(kMeanCarrier / kPi * std::exp(-kMeanCarrier * std::norm(z)));
                 }),
                 0.0, Samples(n, n), Samples(n, n)};
    t.carrier_mass = integrate(t.carrier);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const cplx z = grid.z(j, k);
        t.radius(j, k) = std::abs(z);
        t.carrier_cauchy(j, k) = gaussian_cauchy(z, kMeanCarrier);
        t.carrier_beurling(j, k) = gaussian_beurling(z, kMeanCarrier);
      }
    it = cache.emplace(key, std::move(t)).first;
  }
  return it->second;
}

}  // namespace

cplx gaussian_cauchy(cplx z, double a) {
  const double r2 = std::norm(z);
  if (r2 < 1e-24) return 0.0;
  return -std::expm1(-a * r2) / (kPi * z);
}

cplx gaussian_beurling(cplx z, double a) {
  const double r2 = std::norm(z);
  if (r2 < 1e-24) return 0.0;
  const double e = std::exp(-a * r2);
  return a * std::conj(z) * e / (kPi * z) + std::expm1(-a * r2) / (kPi * z * z);
}

std::vector<double> gaussian_lattice_sums(int n_max) {
  // Laurent coefficients of the Weierstrass function of the square lattice:
  // wp(z) = z^-2 + sum_k c_k z^{2k} with c_k = (2k+1) g_{2k+2}, g_2 of the
  // lattice invariant 60 g_4 = varpi^4 / 15 * 60 and g_6 = 0.
  static std::vector<double> cache;
  static std::mutex m;
  std::lock_guard<std::mutex> lock(m);
  if (static_cast<int>(cache.size()) <= n_max) {
    const double varpi = 2.62205755429211981046483958989111941;
    const int k_max = std::max(1, n_max / 2);
    std::vector<double> c(k_max + 1, 0.0);
    c[1] = 3.0 * std::pow(varpi, 4) / 15.0;
    for (int k = 3; k <= k_max; ++k) {
      double acc = 0.0;
      for (int i = 1; i <= k - 2; ++i) acc += c[i] * c[k - 1 - i];
      c[k] = 3.0 * acc / ((2.0 * k + 3.0) * (k - 2.0));
    }
    cache.assign(2 * k_max + 3, 0.0);
    for (int k = 1; k <= k_max; ++k) cache[2 * k + 2] = c[k] / (2.0 * k + 1.0);
  }
  return std::vector<double>(cache.begin(), cache.begin() + n_max + 1);
}

ComplexField modulation(const Grid& grid, cplx k) {
  return ComplexField::sample(
      grid, [k](cplx z) { return std::polar(1.0, 2.0 * (k * z).real()); }, "e_k");
}

ComplexField d_z(const ComplexField& f) {
  return apply_multiplier(f, cached_multiplier(f.grid(), 0, &symbols::d));
}

ComplexField d_zbar(const ComplexField& f) {
  return apply_multiplier(f, cached_multiplier(f.grid(), 1, &symbols::dbar));
}

ComplexField beurling(const ComplexField& f) {
  return apply_multiplier(f, cached_multiplier(f.grid(), 2, &symbols::beurling));
}

ComplexField conj_beurling(const ComplexField& f) { return beurling(f).conj(); }

ComplexField cauchy(const ComplexField& f) {
  const Grid& grid = f.grid();
  const double cut = 0.75 * grid.half_width();
  double total = 0.0, outer = 0.0;
  for (int j = 0; j < grid.n(); ++j) {
    for (int k = 0; k < grid.n(); ++k) {
      const double a = std::abs(f(j, k));
      total += a;
      if (std::max(std::abs(grid.x(j)), std::abs(grid.x(k))) >= cut) outer += a;
    }
  }
  if (total == 0.0) return ComplexField(grid, f.tag());
  if (outer > 1e-8 * total) {
    throw Error(ErrorKind::UnsupportedField,
                "Cauchy transform needs a density concentrated away from the box edge");
  }

  const GridTables& tables = grid_tables(grid);
  const cplx mass = integrate(f) / tables.carrier_mass;
  ComplexField rest = f - mass * tables.carrier;

  ComplexField out =
      apply_multiplier(rest, cached_multiplier(grid, 3, &symbols::inverse_dbar));
  const Mask ring = annulus_mask(grid, 0.75 * grid.half_width(), 0.95 * grid.half_width());
  const cplx offset = integrate(out, &ring) / (static_cast<double>(ring.count()) * grid.cell_area());
  out.values() += mass * tables.carrier_cauchy - offset;
  out.set_tag("C(" + f.tag() + ")");
  return out;
}

namespace {

double log_factorial(int n) {
  static const std::vector<double> table = [] {
    std::vector<double> t(8192, 0.0);
    for (size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] + std::log(static_cast<double>(i));
    return t;
  }();
  return n < static_cast<int>(table.size()) ? table[n] : std::lgamma(n + 1.0);
}

// Mean carried by a Gaussian, mean-free remainder handled by the periodic
// multipliers, and the multipole data needed to undo the lattice images.
struct PlaneSplit {
  cplx mass = 0.0;
  ComplexField rest;
  double two_s = 0.0;
  double support = 0.0;
  // moments[j] = sum f(w) (w / 2S)^j h^2, j >= 1
  std::vector<cplx> moments;
};

PlaneSplit plane_split(const ComplexField& f, bool far_field) {
  const Grid& grid = f.grid();
  const double S = grid.half_width();
  const GridTables& tables = grid_tables(grid);
  const auto mag2 = f.values().abs2().eval();
  const double peak2 = mag2.maxCoeff();
  const auto inside = (mag2 > 1e-28 * peak2).eval();
  const double support = peak2 > 0.0 ? inside.select(tables.radius, 0.0).maxCoeff() : 0.0;
  if (support > 0.7 * S)
    throw Error(ErrorKind::UnsupportedField, "plane transforms need a density inside B(0, 0.7 S)");

  PlaneSplit out{0.0, f, 2.0 * S, support, {}};
  if (peak2 == 0.0) return out;
  out.mass = integrate(f) / tables.carrier_mass;
  out.rest = f - out.mass * tables.carrier;

  // Enough terms for the image series, or for the far field on the
  // calibration annulus |z| >= 0.75 S.
  const double ratio = std::max(support / (far_field ? 0.75 * S : 2.0 * S), 1e-3);
  const int J = std::min(2000, static_cast<int>(std::ceil(std::log(1e-17) / std::log(ratio))) + 2);
  out.moments.assign(J + 1, 0.0);
  const double h2 = grid.cell_area();
  for (int j = 0; j < grid.n(); ++j)
    for (int k = 0; k < grid.n(); ++k) {
      if (!inside(j, k)) continue;
      const cplx v = f(j, k);
      const cplx w = grid.z(j, k) / out.two_s;
      cplx p = v * h2;
      for (int i = 1; i <= J; ++i) {
        p *= w;
        out.moments[i] += p;
      }
    }
  return out;
}

// Image field P(z) = sum_m b[m] (z / 2S)^m, up to a constant.
std::vector<cplx> image_coefficients(const PlaneSplit& sp, double reach) {
  const int J = static_cast<int>(sp.moments.size()) - 1;
  if (J < 1) return {};
  if (reach >= 0.985)
    throw Error(ErrorKind::UnsupportedField, "image expansion does not converge on the requested region");
  const int M = static_cast<int>(std::ceil(std::log(1e-17) / std::log(std::max(reach, 1e-3)))) + 4;
  const std::vector<double> g = gaussian_lattice_sums(J + M + 2);
  std::vector<cplx> b(M + 1, 0.0);
  for (int m = 0; m <= M; ++m) {
    cplx acc = 0.0;
    for (int j = 1; j <= J; ++j) {
      const int n = j + 1 + m;
      if (n % 4 || n < 4) continue;
      const double binom = std::exp(log_factorial(j + m) - log_factorial(m) - log_factorial(j));
      acc += (j % 2 ? 1.0 : -1.0) * binom * g[n] * sp.moments[j];
    }
    b[m] = acc / (kPi * sp.two_s);
  }
  return b;
}

// (largest evaluation radius + density support) / 2S; the image series
// converges geometrically at this ratio.
double reach_of(const PlaneSplit& sp, double radius) {
  return (std::min(radius, std::sqrt(0.5) * sp.two_s) + sp.support) / sp.two_s;
}

template <class Fn>
void for_nodes_within(const Grid& grid, double radius, Fn&& fn) {
  const RealSamples& r = grid_tables(grid).radius;
  for (int j = 0; j < grid.n(); ++j)
    for (int k = 0; k < grid.n(); ++k)
      if (r(j, k) <= radius) fn(j, k);
}

}  // namespace

ComplexField cauchy_plane(const ComplexField& f, double eval_radius) {
  const Grid& grid = f.grid();
  const PlaneSplit sp = plane_split(f, true);
  if (sp.moments.empty()) return ComplexField(grid, f.tag());
  const double S = grid.half_width();
  const std::vector<cplx> b =
      image_coefficients(sp, std::max(reach_of(sp, eval_radius), reach_of(sp, 0.95 * S)));
  const auto image = [&](cplx z) {
    const cplx w = z / sp.two_s;
    cplx acc = 0.0;
    for (auto it = b.rbegin(); it != b.rend(); ++it) acc = acc * w + *it;
    return acc;
  };
  const auto far_field = [&](cplx z) {
    const cplx w = sp.two_s / z;
    cplx acc = 0.0;
    for (size_t j = sp.moments.size() - 1; j >= 1; --j) acc = (acc + sp.moments[j]) * w;
    return acc * w / (kPi * sp.two_s);
  };

  ComplexField out = apply_multiplier(sp.rest, cached_multiplier(grid, 3, &symbols::inverse_dbar));
  // The images fix everything but a constant; match the exterior multipole
  // field on the calibration annulus.
  const Mask ring = annulus_mask(grid, 0.75 * S, 0.95 * S);
  cplx offset = 0.0;
  for (int j = 0; j < grid.n(); ++j)
    for (int k = 0; k < grid.n(); ++k)
      if (ring(j, k)) {
        const cplx z = grid.z(j, k);
        offset += out(j, k) - image(z) - far_field(z);
      }
  offset /= static_cast<double>(ring.count());
  out.values() += sp.mass * grid_tables(grid).carrier_cauchy - offset;
  for_nodes_within(grid, eval_radius, [&](int j, int k) { out(j, k) -= image(grid.z(j, k)); });
  out.set_tag("C(" + f.tag() + ")");
  return out;
}

ComplexField beurling_plane(const ComplexField& f, double eval_radius) {
  const Grid& grid = f.grid();
  const PlaneSplit sp = plane_split(f, false);
  if (sp.moments.empty()) return ComplexField(grid, f.tag());
  const std::vector<cplx> b = image_coefficients(sp, reach_of(sp, eval_radius));
  const auto image_derivative = [&](cplx z) {
    const cplx w = z / sp.two_s;
    cplx acc = 0.0;
    for (size_t m = b.size() - 1; m >= 1; --m) acc = acc * w + static_cast<double>(m) * b[m];
    return acc / sp.two_s;
  };
  ComplexField out = beurling(sp.rest);
  out.values() += sp.mass * grid_tables(grid).carrier_beurling;
  for_nodes_within(grid, eval_radius, [&](int j, int k) { out(j, k) -= image_derivative(grid.z(j, k)); });
  out.set_tag("T(" + f.tag() + ")");
  return out;
}

ComplexField shifted_beurling(const ComplexField& f, int n, cplx k) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "shift index must be >= 0");
  if (n == 0) return beurling(f);
  if (k == cplx(0.0)) throw Error(ErrorKind::InvalidArgument, "shifted Beurling needs k != 0");
  const Grid& grid = f.grid();
  check_shift(grid, internal_shift(n, k));
  const cplx nk = static_cast<double>(n) * k;
  const ComplexField up = modulation(grid, nk);
  ComplexField out = up * beurling(up.conj() * f);
  out.set_tag(f.tag());
  return out;
}

ComplexField shifted_beurling_multiplier(const ComplexField& f, int n, cplx k) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "shift index must be >= 0");
  if (n == 0) return beurling(f);
  const cplx shift = internal_shift(n, k);
  check_shift(f.grid(), shift);
  return apply_symbol(f, symbols::shifted_beurling(shift));
}

}  // namespace blab
