#pragma once

#include <vector>

#include "blab/fft.hpp"

namespace blab {

/// Solid Cauchy transform  C f(z) = -(1/pi) \int f(w) / (w - z) dA(w),
/// the inverse of d/dz-bar that decays at infinity.
///
/// The field is split as f = f0 + c g with g a normalised Gaussian whose
/// transform is known in closed form; f0 has zero mean and goes through the
/// periodic multiplier -2i/xi, after which the free constant is fixed so that
/// the mean over the outer annulus 0.75S < |z| < 0.95S matches the far field
/// prediction (zero for a mean-free density).
///
/// Throws Error(UnsupportedField) if more than 1e-8 of the L^1 mass of f lies
/// in the outer quarter of the box (max(|x|,|y|) >= 0.75 S).
ComplexField cauchy(const ComplexField& f);

/// Beurling transform, multiplier conj(xi)/xi with the zero mode annihilated.
ComplexField beurling(const ComplexField& f);

/// conj(T f), the anti-linear half of the Beltrami operator.
ComplexField conj_beurling(const ComplexField& f);

/// T_n f = e_n T(e_{-n} f) with e_n(z) = exp(i n (k z + conj(k z))).
/// n = 0 is plain Beurling.  Throws FrequencyOverflow if the modulation
/// frequency exceeds half the Nyquist frequency on either axis.
ComplexField shifted_beurling(const ComplexField& f, int n, cplx k);

/// Same operator through its multiplier conj(xi - xi_n)/(xi - xi_n), with
/// xi_n the internal image of n k.
ComplexField shifted_beurling_multiplier(const ComplexField& f, int n, cplx k);

/// Unimodular modulation e_k(z) = exp(i (k z + conj(k z))) sampled on the grid.
ComplexField modulation(const Grid& grid, cplx k);

/// Spectral d/dz and d/dz-bar.
ComplexField d_z(const ComplexField& f);
ComplexField d_zbar(const ComplexField& f);

/// Closed-form Cauchy transform of the unit-mass Gaussian (a/pi) exp(-a|z|^2).
cplx gaussian_cauchy(cplx z, double a);
/// Its Beurling transform, d/dz of gaussian_cauchy.
cplx gaussian_beurling(cplx z, double a);

/// Lattice sums g_n = sum over nonzero Gaussian integers L of L^{-n}, n = 0..n_max
/// (zero unless 4 | n; g_2 and below are left at zero).
std::vector<double> gaussian_lattice_sums(int n_max);

/// Cauchy and Beurling transforms on the whole plane rather than the torus:
/// the periodic results are corrected by the field of the lattice images of the
/// density, expanded in multipoles about the origin.  The density must vanish
/// (below 1e-14 of its maximum) outside a disk B(0, r) with r <= 0.7 S.
/// Nodes with |z| > eval_radius keep the uncorrected periodic value; the
/// expansion must converge there, i.e. (min(eval_radius, sqrt2 S) + r) / 2S
/// stays below 0.985, else Error(UnsupportedField).
ComplexField cauchy_plane(const ComplexField& f, double eval_radius = 1e300);
ComplexField beurling_plane(const ComplexField& f, double eval_radius = 1e300);

}  // namespace blab
