#include "blab/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "blab/error.hpp"

namespace blab {

ComplexField::ComplexField(const Grid& grid, std::string tag)
    : grid_(grid), values_(Samples::Zero(grid.n(), grid.n())), tag_(std::move(tag)) {}

ComplexField::ComplexField(const Grid& grid, Samples values, std::string tag)
    : grid_(grid), values_(std::move(values)), tag_(std::move(tag)) {
  if (values_.rows() != grid.n() || values_.cols() != grid.n()) {
    throw Error(ErrorKind::InvalidArgument, "sample array does not match grid");
  }
}

ComplexField ComplexField::sample(const Grid& grid, const std::function<cplx(cplx)>& fn,
                                  std::string tag) {
  ComplexField out(grid, std::move(tag));
  for (int j = 0; j < grid.n(); ++j) {
    for (int k = 0; k < grid.n(); ++k) out.values_(j, k) = fn(grid.z(j, k));
  }
  return out;
}

ComplexField ComplexField::constant(const Grid& grid, cplx value, std::string tag) {
  return ComplexField(grid, Samples::Constant(grid.n(), grid.n(), value), std::move(tag));
}

ComplexField ComplexField::coordinate(const Grid& grid) {
  return sample(grid, [](cplx z) { return z; }, "z");
}

bool ComplexField::all_finite() const {
  const cplx* p = values_.data();
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(p[i].real()) || !std::isfinite(p[i].imag())) return false;
  }
  return true;
}

ComplexField ComplexField::conj() const { return ComplexField(grid_, values_.conjugate(), tag_); }

ComplexField ComplexField::real_part() const {
  return ComplexField(grid_, values_.real().cast<cplx>(), tag_);
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!(a == b)) throw Error(ErrorKind::InvalidArgument, std::string(where) + ": grid mismatch");
}

ComplexField& ComplexField::operator+=(const ComplexField& o) {
  require_same_grid(grid_, o.grid_, "operator+");
  values_ += o.values_;
  return *this;
}
ComplexField& ComplexField::operator-=(const ComplexField& o) {
  require_same_grid(grid_, o.grid_, "operator-");
  values_ -= o.values_;
  return *this;
}
ComplexField& ComplexField::operator*=(const ComplexField& o) {
  require_same_grid(grid_, o.grid_, "operator*");
  values_ *= o.values_;
  return *this;
}
ComplexField& ComplexField::operator*=(cplx s) {
  values_ *= s;
  return *this;
}

ComplexField operator+(ComplexField a, const ComplexField& b) { return a += b; }
ComplexField operator-(ComplexField a, const ComplexField& b) { return a -= b; }
ComplexField operator*(ComplexField a, const ComplexField& b) { return a *= b; }
ComplexField operator*(cplx s, ComplexField a) { return a *= s; }
ComplexField operator*(ComplexField a, cplx s) { return a *= s; }

Mask disk_mask(const Grid& grid, double radius, cplx center) {
  Mask m(grid.n(), grid.n());
  for (int j = 0; j < grid.n(); ++j)
    for (int k = 0; k < grid.n(); ++k) m(j, k) = std::abs(grid.z(j, k) - center) < radius;
  return m;
}

Mask annulus_mask(const Grid& grid, double r_in, double r_out) {
  Mask m(grid.n(), grid.n());
  for (int j = 0; j < grid.n(); ++j) {
    for (int k = 0; k < grid.n(); ++k) {
      const double r = std::abs(grid.z(j, k));
      m(j, k) = r > r_in && r < r_out;
    }
  }
  return m;
}

double lp_norm(const ComplexField& f, double p, const Mask* mask) {
  if (!(p > 0.0)) throw Error(ErrorKind::InvalidArgument, "lp_norm requires p > 0");
  if (std::isinf(p)) return sup_norm(f, mask);
  const auto& v = f.values();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (mask && !mask->data()[i]) continue;
    const double a = std::abs(v.data()[i]);
    if (a == 0.0) continue;
    acc += p == 2.0 ? a * a : std::pow(a, p);
  }
  return std::pow(acc * f.grid().cell_area(), 1.0 / p);
}

double sup_norm(const ComplexField& f, const Mask* mask) {
  const auto& v = f.values();
  double m = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (mask && !mask->data()[i]) continue;
    m = std::max(m, std::abs(v.data()[i]));
  }
  return m;
}

cplx integrate(const ComplexField& f, const Mask* mask) {
  const auto& v = f.values();
  cplx acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (mask && !mask->data()[i]) continue;
    acc += v.data()[i];
  }
  return acc * f.grid().cell_area();
}

cplx interpolate_bilinear(const ComplexField& f, cplx z) {
  const Grid& g = f.grid();
  const int n = g.n();
  const double u = (z.real() + g.half_width()) / g.spacing();
  const double v = (z.imag() + g.half_width()) / g.spacing();
  const double fu = std::floor(u), fv = std::floor(v);
  const double tu = u - fu, tv = v - fv;
  auto wrap = [n](long i) { return static_cast<int>(((i % n) + n) % n); };
  const int j0 = wrap(static_cast<long>(fu)), j1 = wrap(static_cast<long>(fu) + 1);
  const int k0 = wrap(static_cast<long>(fv)), k1 = wrap(static_cast<long>(fv) + 1);
  return (1 - tu) * ((1 - tv) * f(j0, k0) + tv * f(j0, k1)) +
         tu * ((1 - tv) * f(j1, k0) + tv * f(j1, k1));
}

ComplexField disk_indicator(const Grid& grid, double radius, cplx center) {
  return ComplexField::sample(
      grid, [&](cplx z) { return std::abs(z - center) < radius ? cplx(1.0) : cplx(0.0); },
      "disk_indicator");
}

}  // namespace blab
