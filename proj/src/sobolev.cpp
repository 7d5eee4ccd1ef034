#include "blab/sobolev.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <vector>

#include "blab/error.hpp"
#include "blab/fft.hpp"

namespace blab {
namespace {

SobolevReport make_report(const ComplexField& f, double a, NormMethod method) {
  SobolevReport r;
  r.alpha = a;
  r.method = method;
  r.grid_n = f.grid().n();
  r.grid_half_width = f.grid().half_width();
  return r;
}

template <class Weight>
double weighted_spectral_norm(const ComplexField& f, Weight weight) {
  const Grid& g = f.grid();
  const Samples spec = forward_transform(f);
  double acc = 0.0;
  for (int a = 0; a < g.n(); ++a) {
    const double x = g.frequency(a);
    for (int b = 0; b < g.n(); ++b) {
      const double y = g.frequency(b);
      acc += weight(x * x + y * y) * std::norm(spec(a, b));
    }
  }
  const double s = 2.0 * g.half_width();
  return std::sqrt(acc / (s * s));
}

}  // namespace

const char* to_string(NormMethod m) {
  switch (m) {
    case NormMethod::BesselFourier: return "bessel-fourier";
    case NormMethod::BesovDoubleIntegral: return "besov-double-integral";
    case NormMethod::RieszFourier: return "riesz-fourier";
  }
  return "unknown";
}

ComplexField frac_deriv(const ComplexField& f, double a) {
  if (a < 0.0) throw Error(ErrorKind::InvalidArgument, "fractional order must be >= 0");
  if (a == 0.0) return f;
  ComplexField out = apply_symbol(f, symbols::riesz(a));
  out.set_tag("D^a(" + f.tag() + ")");
  return out;
}

SobolevReport sobolev_norm(const ComplexField& f, double a) {
  if (a < 0.0 || a > 2.0) throw Error(ErrorKind::InvalidArgument, "Sobolev order must be in [0, 2]");
  SobolevReport r = make_report(f, a, NormMethod::BesselFourier);
  r.value = weighted_spectral_norm(f, [a](double r2) { return std::pow(1.0 + r2, a); });
  return r;
}

SobolevReport homogeneous_seminorm(const ComplexField& f, double a) {
  if (a < 0.0) throw Error(ErrorKind::InvalidArgument, "order must be >= 0");
  SobolevReport r = make_report(f, a, NormMethod::RieszFourier);
  r.value = weighted_spectral_norm(f, [a](double r2) { return r2 == 0.0 ? 0.0 : std::pow(r2, a); });
  return r;
}

double fourier_tail(const ComplexField& f, double radius) {
  const double r2max = radius * radius;
  return weighted_spectral_norm(f, [r2max](double r2) { return r2 > r2max ? 1.0 : 0.0; });
}

SobolevReport besov_seminorm(const ComplexField& f, double a, double p, double q,
                             const BesovOptions& opts) {
  if (!(a > 0.0 && a < 1.0)) throw Error(ErrorKind::InvalidArgument, "Besov order must be in (0,1)");
  if (!(p > 0.0 && q > 0.0)) throw Error(ErrorKind::InvalidArgument, "exponents must be positive");
  if (opts.stride < 1) throw Error(ErrorKind::InvalidArgument, "stride must be >= 1");
  const Grid& g = f.grid();
  const int n = g.n();
  const double h = g.spacing();
  const double y_max = opts.max_shift > 0.0 ? opts.max_shift : 0.5 * g.half_width();
  const int reach = std::min(n / 2 - 1, static_cast<int>(std::floor(y_max / h)));
  const double cell = std::pow(opts.stride * h, 2);

  // omega_2 via the periodic autocorrelation: ||f(.+y) - f||^2 = 2||f||^2 - 2 Re <f(.+y), f>.
  RealSamples omega2_sq;
  double energy = 0.0;
  if (p == 2.0) {
    Samples spec = forward_transform(f);
    spec(0, 0) = 0.0;
    Samples power = spec.abs2().cast<cplx>();
    const ComplexField corr = inverse_transform(g, power);
    energy = corr.values()(0, 0).real();
    omega2_sq = (2.0 * energy - 2.0 * corr.values().real()).max(0.0);
  }

  double acc = 0.0;
  for (int dj = -reach; dj <= reach; dj += opts.stride) {
    for (int dk = -reach; dk <= reach; dk += opts.stride) {
      if (dj == 0 && dk == 0) continue;
      const double len = h * std::hypot(dj, dk);
      if (len > y_max) continue;
      double omega;
      if (p == 2.0) {
        omega = std::sqrt(omega2_sq((dj + n) % n, (dk + n) % n));
      } else {
        double s = 0.0;
        for (int j = 0; j < n; ++j) {
          const int js = (j + dj + n) % n;
          for (int k = 0; k < n; ++k) {
            s += std::pow(std::abs(f(js, (k + dk + n) % n) - f(j, k)), p);
          }
        }
        omega = std::pow(s * g.cell_area(), 1.0 / p);
      }
      acc += std::pow(omega, q) * std::pow(len, -(2.0 + a * q)) * cell;
    }
  }

  SobolevReport r = make_report(f, a, NormMethod::BesovDoubleIntegral);
  r.p = p;
  r.q = q;
  r.value = std::pow(acc, 1.0 / q);
  // Shifts beyond Y: omega_2 <= 2||f||_2 and sum |y|^{-2-2a} h^2 over |y| > Y
  // is bounded by its integral 2 pi Y^{-2a} / (2a).
  const double tail_sum = 2.0 * Grid::kPi * std::pow(y_max, -2.0 * a) / (2.0 * a);
  r.tail_estimate = 2.0 * lp_norm(f, 2.0) * std::sqrt(tail_sum);
  return r;
}

std::string to_json(const SobolevReport& r) {
  nlohmann::ordered_json j;
  j["alpha"] = r.alpha;
  j["p"] = r.p;
  j["q"] = r.q;
  j["value"] = r.value;
  j["method"] = to_string(r.method);
  j["grid"] = {{"n", r.grid_n}, {"half_width", r.grid_half_width}};
  if (r.method == NormMethod::BesovDoubleIntegral) j["tail_estimate"] = r.tail_estimate;
  return j.dump();
}

}  // namespace blab
