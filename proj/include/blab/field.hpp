#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>

#include "blab/grid.hpp"

namespace blab {

/// N x N complex samples, row index j (x), column index k (y), row-major.
using Samples = Eigen::Array<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RealSamples = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Complex samples living on a Grid, plus a free-text provenance tag.
class ComplexField {
 public:
  explicit ComplexField(const Grid& grid, std::string tag = {});
  ComplexField(const Grid& grid, Samples values, std::string tag = {});

  /// Samples `fn(z)` at every node.
  static ComplexField sample(const Grid& grid, const std::function<cplx(cplx)>& fn,
                             std::string tag = {});
  static ComplexField constant(const Grid& grid, cplx value, std::string tag = {});
  /// The identity map z.
  static ComplexField coordinate(const Grid& grid);

  const Grid& grid() const noexcept { return grid_; }
  const Samples& values() const noexcept { return values_; }
  Samples& values() noexcept { return values_; }
  const std::string& tag() const noexcept { return tag_; }
  void set_tag(std::string tag) { tag_ = std::move(tag); }

  cplx operator()(int j, int k) const { return values_(j, k); }
  cplx& operator()(int j, int k) { return values_(j, k); }

  bool all_finite() const;
  ComplexField conj() const;
  ComplexField real_part() const;

  ComplexField& operator+=(const ComplexField& o);
  ComplexField& operator-=(const ComplexField& o);
  ComplexField& operator*=(const ComplexField& o);
  ComplexField& operator*=(cplx s);

 private:
  Grid grid_;
  Samples values_;
  std::string tag_;
};

ComplexField operator+(ComplexField a, const ComplexField& b);
ComplexField operator-(ComplexField a, const ComplexField& b);
ComplexField operator*(ComplexField a, const ComplexField& b);
ComplexField operator*(cplx s, ComplexField a);
ComplexField operator*(ComplexField a, cplx s);

/// Throws InvalidArgument when the grids differ.
void require_same_grid(const Grid& a, const Grid& b, const char* where);

/// Boolean region on a grid.
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Mask disk_mask(const Grid& grid, double radius, cplx center = {0.0, 0.0});
Mask annulus_mask(const Grid& grid, double r_in, double r_out);

/// Discrete L^p norm (sum |f|^p h^2)^(1/p) over `mask` (whole grid if empty);
/// p = infinity returns the max modulus.  Requires p > 0.
double lp_norm(const ComplexField& f, double p, const Mask* mask = nullptr);
inline double l2_norm(const ComplexField& f, const Mask* mask = nullptr) {
  return lp_norm(f, 2.0, mask);
}
double sup_norm(const ComplexField& f, const Mask* mask = nullptr);

/// Quadrature of f over the mask.
cplx integrate(const ComplexField& f, const Mask* mask = nullptr);

/// Bilinear interpolation of the periodic samples at an arbitrary point.
cplx interpolate_bilinear(const ComplexField& f, cplx z);

/// Indicator of the disk B(center, radius), sampled pointwise.
ComplexField disk_indicator(const Grid& grid, double radius, cplx center = {0.0, 0.0});

}  // namespace blab
