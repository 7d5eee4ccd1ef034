#pragma once

#include <string>

#include "blab/field.hpp"

namespace blab {

enum class NormMethod { BesselFourier, BesovDoubleIntegral, RieszFourier };

const char* to_string(NormMethod m);

struct SobolevReport {
  double alpha = 0.0;
  double p = 2.0;
  double q = 2.0;
  double value = 0.0;
  NormMethod method = NormMethod::BesselFourier;
  int grid_n = 0;
  double grid_half_width = 0.0;
  /// Besov only: bound on the contribution of shifts beyond the truncation.
  double tail_estimate = 0.0;
};

/// Homogeneous fractional derivative D^a, multiplier |xi|^a with the zero
/// mode annihilated (a = 0 is the identity).
ComplexField frac_deriv(const ComplexField& f, double a);

/// Bessel-potential norm || (1 + |xi|^2)^(a/2) f^ ||_2, a in [0, 2].
SobolevReport sobolev_norm(const ComplexField& f, double a);

/// Riesz seminorm || |xi|^a f^ ||_2.
SobolevReport homogeneous_seminorm(const ComplexField& f, double a);

struct BesovOptions {
  /// Largest shift length; <= 0 means S/2.
  double max_shift = 0.0;
  /// Shift sub-lattice stride in nodes.
  int stride = 1;
};

/// (sum_y omega_p(f)(y)^q |y|^{-(2 + a q)} h_y^2)^{1/q} over lattice shifts
/// 0 < |y| <= Y, with omega_p(f)(y) = || f(. + y) - f ||_p under periodic
/// translation and h_y = stride * h.  Requires 0 < a < 1.
SobolevReport besov_seminorm(const ComplexField& f, double a, double p, double q,
                             const BesovOptions& opts = {});

/// L^2 mass of f^ outside the disk |xi| > radius (internal frequency units).
double fourier_tail(const ComplexField& f, double radius);

std::string to_json(const SobolevReport& r);

}  // namespace blab
