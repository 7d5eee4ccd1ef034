#include "blab/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

#include "blab/error.hpp"

namespace blab {
namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

// The FFTW planner is not thread-safe; execution of an existing plan on new
// arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(int n) {
  static std::map<int, PlanPair> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto* buf = fftw_alloc_complex(static_cast<std::size_t>(n) * n);
  PlanPair p;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  p.forward = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, flags);
  p.backward = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, flags);
  fftw_free(buf);
  return cache.emplace(n, p).first->second;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

void raw_forward(Samples& data) {
  const auto& plans = plans_for(static_cast<int>(data.rows()));
  fftw_execute_dft(plans.forward, as_fftw(data.data()), as_fftw(data.data()));
}

void raw_backward(Samples& data) {
  const auto& plans = plans_for(static_cast<int>(data.rows()));
  fftw_execute_dft(plans.backward, as_fftw(data.data()), as_fftw(data.data()));
}

}  // namespace

Samples forward_transform(const ComplexField& f) {
  Samples out = f.values();
  raw_forward(out);
  out *= f.grid().cell_area();
  return out;
}

ComplexField inverse_transform(const Grid& grid, const Samples& spectrum, std::string tag) {
  Samples out = spectrum;
  raw_backward(out);
  const double s = 2.0 * grid.half_width();
  out /= s * s;
  return ComplexField(grid, std::move(out), std::move(tag));
}

double spectral_energy(const Grid& grid, const Samples& spectrum) {
  const double s = 2.0 * grid.half_width();
  return spectrum.abs2().sum() / (s * s);
}

cplx FourierSymbol::at(double xi1, double xi2) const {
  if (xi1 == 0.0 && xi2 == 0.0) {
    switch (zero_mode) {
      case ZeroMode::Annihilate: return 0.0;
      case ZeroMode::Value: return zero_value;
      case ZeroMode::Evaluate: break;
    }
  }
  return rule(xi1, xi2);
}

FourierSymbol FourierSymbol::identity() {
  return {[](double, double) { return cplx(1.0); }, ZeroMode::Evaluate, 0.0};
}

FourierSymbol FourierSymbol::product(FourierSymbol a, FourierSymbol b) {
  FourierSymbol out;
  const cplx za = a.at(0.0, 0.0);
  const cplx zb = b.at(0.0, 0.0);
  out.rule = [ra = a.rule, rb = b.rule](double x, double y) { return ra(x, y) * rb(x, y); };
  out.zero_mode = ZeroMode::Value;
  out.zero_value = za * zb;
  return out;
}

Samples symbol_array(const Grid& grid, const FourierSymbol& m) {
  const int n = grid.n();
  Samples out(n, n);
  for (int a = 0; a < n; ++a) {
    const double xi1 = grid.frequency(a);
    for (int b = 0; b < n; ++b) out(a, b) = m.at(xi1, grid.frequency(b));
  }
  return out;
}

ComplexField apply_multiplier(const ComplexField& f, const Samples& multiplier) {
  Samples data = f.values();
  raw_forward(data);
  data *= multiplier;
  raw_backward(data);
  data /= static_cast<double>(f.grid().size());
  return ComplexField(f.grid(), std::move(data), f.tag());
}

ComplexField apply_symbol(const ComplexField& f, const FourierSymbol& m) {
  return apply_multiplier(f, symbol_array(f.grid(), m));
}

namespace symbols {

FourierSymbol d_dx() {
  return {[](double x, double) { return cplx(0.0, x); }, ZeroMode::Evaluate, 0.0};
}
FourierSymbol d_dy() {
  return {[](double, double y) { return cplx(0.0, y); }, ZeroMode::Evaluate, 0.0};
}
FourierSymbol dbar() {
  return {[](double x, double y) { return cplx(0.0, 0.5) * cplx(x, y); }, ZeroMode::Evaluate, 0.0};
}
FourierSymbol d() {
  return {[](double x, double y) { return cplx(0.0, 0.5) * cplx(x, -y); }, ZeroMode::Evaluate,
          0.0};
}
FourierSymbol beurling() {
  return {[](double x, double y) {
            const cplx xi(x, y);
            return std::conj(xi) / xi;
          },
          ZeroMode::Annihilate, 0.0};
}
FourierSymbol shifted_beurling(cplx shift) {
  // Singular where xi equals the shift; annihilated there.
  return {[shift](double x, double y) {
            const cplx xi = cplx(x, y) - shift;
            if (std::abs(xi) == 0.0) return cplx(0.0);
            return std::conj(xi) / xi;
          },
          ZeroMode::Evaluate, 0.0};
}
FourierSymbol inverse_dbar() {
  return {[](double x, double y) { return cplx(0.0, -2.0) / cplx(x, y); }, ZeroMode::Annihilate,
          0.0};
}
FourierSymbol riesz(double a) {
  return {[a](double x, double y) { return cplx(std::pow(std::hypot(x, y), a)); },
          ZeroMode::Annihilate, 0.0};
}
FourierSymbol bessel(double a) {
  return {[a](double x, double y) { return cplx(std::pow(1.0 + x * x + y * y, 0.5 * a)); },
          ZeroMode::Evaluate, 0.0};
}

}  // namespace symbols

ComplexField plane_wave(const Grid& grid, int m1, int m2) {
  const double w = grid.frequency_step();
  return ComplexField::sample(
      grid, [&](cplx z) { return std::exp(cplx(0.0, w * (m1 * z.real() + m2 * z.imag()))); },
      "plane_wave");
}

}  // namespace blab
