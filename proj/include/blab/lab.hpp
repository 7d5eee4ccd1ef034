#pragma once

#include <cstdint>
#include <vector>

#include "blab/beltrami.hpp"
#include "blab/dtn.hpp"
#include "blab/field.hpp"

namespace blab {

struct RandomConductivity {
  ComplexField gamma;
  double target = 0.0;
  /// ||gamma - 1||_{W^{alpha,2}} after clamping.
  double measured = 0.0;
  /// Fraction of nodes changed by the clamp.
  double clamped_fraction = 0.0;
  double K = 1.0;

  Conductivity conductivity() const { return Conductivity::from_field(gamma, K); }
  /// (1 - gamma) / (1 + gamma).
  ComplexField mu() const;
};

/// Gaussian Fourier coefficients on the integer frequencies |m| <= band (drawn in a
/// fixed order, so the trigonometric polynomial does not depend on N), weighted by
/// |xi|^-(1.1 + alpha), real part, tapered to vanish outside |z| = 0.95, scaled to
/// ||gamma - 1||_{W^{alpha,2}} = gamma0 and clamped to [1/K, K].
/// Throws TargetUnreachable when the clamp removes more than half the target norm.
RandomConductivity random_conductivity(double alpha, double gamma0, double K, std::uint64_t seed, const Grid& grid,
                                       int band = 24);

/// Hermite bicubic interpolation with spectrally computed derivatives.
class BicubicInterpolator {
 public:
  explicit BicubicInterpolator(const ComplexField& f);
  cplx operator()(cplx z) const;

 private:
  ComplexField f_, fx_, fy_, fxy_;
};

/// mu(phi(z)) at every node.  Points mapped outside the box (minus a 2h margin) read
/// 0 when mu vanishes near the box edge and throw OutOfDomain otherwise.
ComplexField compose_field(const ComplexField& mu, const ComplexField& phi);
ComplexField compose_field(const ComplexField& mu, const PrincipalSolution& phi);

/// Centroid-rule L^2(D) distance on a ring mesh aligned with both conductivities' layers.
double l2_distance(const Conductivity& a, const Conductivity& b, double mesh_h);

/// Spearman rank correlation (average ranks for ties).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace blab
