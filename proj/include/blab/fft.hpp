#pragma once

#include <complex>
#include <functional>
#include <optional>

#include "blab/field.hpp"

namespace blab {

/// Discrete transform f^(xi) = sum f(z) exp(-i xi.(z - z_00)) h^2, taken
/// relative to the box corner node z_00.  Parseval: sum |f|^2 h^2 equals
/// sum |f^|^2 / (4 S^2).
Samples forward_transform(const ComplexField& f);
ComplexField inverse_transform(const Grid& grid, const Samples& spectrum, std::string tag = {});

/// Frequency-side Parseval sum: sum |f^|^2 / (4 S^2).
double spectral_energy(const Grid& grid, const Samples& spectrum);

/// How a symbol is treated at xi = 0.
enum class ZeroMode { Evaluate, Annihilate, Value };

/// Fourier multiplier m(xi1, xi2).  Symbols singular at the origin must
/// declare Annihilate or Value.
struct FourierSymbol {
  std::function<cplx(double, double)> rule;
  ZeroMode zero_mode = ZeroMode::Evaluate;
  cplx zero_value = 0.0;

  cplx at(double xi1, double xi2) const;

  static FourierSymbol identity();
  /// Multiply two symbols pointwise.  The product annihilates the zero mode
  /// if either factor does.
  static FourierSymbol product(FourierSymbol a, FourierSymbol b);
};

/// Inverse transform of m(xi) f^(xi).
ComplexField apply_symbol(const ComplexField& f, const FourierSymbol& m);

/// Common multipliers, all in internal frequency units.
namespace symbols {
FourierSymbol d_dx();
FourierSymbol d_dy();
/// d/dz-bar = (i/2)(xi1 + i xi2).
FourierSymbol dbar();
/// d/dz = (i/2)(xi1 - i xi2).
FourierSymbol d();
/// Beurling: conj(xi)/xi, zero annihilated.
FourierSymbol beurling();
/// Beurling shifted by the internal frequency `shift`: conj(xi - shift)/(xi - shift).
FourierSymbol shifted_beurling(cplx shift);
/// Periodic inverse of dbar: -2i/xi, zero annihilated.
FourierSymbol inverse_dbar();
/// Riesz |xi|^a, zero annihilated.
FourierSymbol riesz(double a);
/// Bessel (1 + |xi|^2)^(a/2).
FourierSymbol bessel(double a);
}  // namespace symbols

/// Discrete plane wave exp(i xi.z) at lattice indices (m1, m2).
ComplexField plane_wave(const Grid& grid, int m1, int m2);

}  // namespace blab

namespace blab {

/// Symbol values on the FFT lattice of `grid` (zero policy applied).
Samples symbol_array(const Grid& grid, const FourierSymbol& m);
/// apply_symbol with a precomputed symbol_array.
ComplexField apply_multiplier(const ComplexField& f, const Samples& multiplier);

}  // namespace blab
