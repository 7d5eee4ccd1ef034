#pragma once

#include <complex>
#include <cstddef>

namespace blab {

using cplx = std::complex<double>;

/// Square periodic box [-S, S)^2 sampled with N x N nodes.
///
/// Node (j, k) sits at z = (-S + j h) + i(-S + k h).  Lattice frequencies are
/// xi = (pi/S) * m for signed m in [-N/2, N/2).
class Grid {
 public:
  /// Throws Error(InvalidGrid) unless N is a power of two >= 8 and S >= 2.
  static Grid make(int n, double half_width);

  int n() const noexcept { return n_; }
  double half_width() const noexcept { return s_; }
  double spacing() const noexcept { return h_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_) * n_; }
  double cell_area() const noexcept { return h_ * h_; }

  double x(int j) const noexcept { return -s_ + j * h_; }
  cplx z(int j, int k) const noexcept { return {x(j), x(k)}; }

  /// Signed frequency index of FFT bin `m`.
  int signed_index(int m) const noexcept { return m < n_ / 2 ? m : m - n_; }
  double frequency(int m) const noexcept { return kPi / s_ * signed_index(m); }
  double frequency_step() const noexcept { return kPi / s_; }
  double nyquist() const noexcept { return kPi / s_ * (n_ / 2); }

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.n_ == b.n_ && a.s_ == b.s_;
  }

  static constexpr double kPi = 3.14159265358979323846;

 private:
  Grid(int n, double s) : n_(n), s_(s), h_(2.0 * s / n) {}

  int n_;
  double s_;
  double h_;
};

/// Spectral parameter k (modulation e_k(z) = exp(i(kz + conj(k z)))) to the
/// internal lattice frequency xi = (2 Re k, -2 Im k), returned as xi1 + i xi2.
inline cplx k_to_lattice_frequency(cplx k) { return {2.0 * k.real(), -2.0 * k.imag()}; }
inline cplx lattice_to_k_frequency(cplx xi) { return {0.5 * xi.real(), -0.5 * xi.imag()}; }

}  // namespace blab
