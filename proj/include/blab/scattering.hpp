#pragma once

#include <string>
#include <vector>

#include "blab/cgo.hpp"
#include "blab/csv.hpp"

namespace blab {

enum class TauMethod { Area, Boundary };
const char* to_string(TauMethod m);

struct TauOptions {
  CgoOptions cgo;
  /// Boundary method: radius of the contour (>= 1; 0 picks 1 + 2h, just off the
  /// support edge where F has a kink) and number of trapezoid nodes (0: 8N).
  double trace_radius = 0.0;
  int n_theta = 0;
  /// Area method: radius of the disk the derivative is summed over.
  double area_radius = 1.0;
};

struct CgoPair {
  CgoSolution plus, minus;  // for mu and -mu
};

CgoPair solve_pair(const ComplexField& mu, cplx k, const CgoOptions& opts = {});

/// tau(k) = (i/4pi) int_D d_z F dA,  F = e^{i conj(kz)} (conj f_mu - conj f_{-mu}) = conj(M_mu - M_{-mu}).
cplx tau(const CgoPair& pair, TauMethod method, const TauOptions& opts = {});
cplx tau(const ComplexField& mu, cplx k, TauMethod method, const TauOptions& opts = {});

struct ScatteringSamples {
  std::vector<cplx> k;
  std::vector<cplx> tau;
  /// Larger of the two CGO outer residuals at each k.
  std::vector<double> residual;
  TauMethod method = TauMethod::Area;
  int grid_n = 0;
  double grid_half_width = 0.0;
  double trace_radius = 0.0;
  int n_theta = 0;
  double area_radius = 1.0;

  CsvTable to_csv() const;
};

ScatteringSamples tau_samples(const ComplexField& mu, const std::vector<cplx>& ks, TauMethod method,
                              const TauOptions& opts = {}, int workers = 1);

struct DbarResult {
  cplx k;
  double delta_k = 0.0;
  cplx tau;
  /// ||d_kbar u + 2 tau conj(u)|| / ||2 tau conj(u)|| over the samples; 0 when the numerator vanishes.
  /// With tau normalized as above and e_k(z) = exp(i(kz + conj(kz))) this is the form the
  /// k-equation takes; the form d_kbar u = -i tau conj(u) is reported as literal_residual.
  double residual = 0.0;
  double literal_residual = 0.0;
  std::vector<cplx> lhs, rhs;
};

/// Central differences in k of M_{+-mu} at k +- delta_k, k +- i delta_k; the factor
/// e^{ikz} is differentiated exactly.  Sample points are read by bilinear interpolation.
DbarResult dbar_residual(const ComplexField& mu, cplx k, double delta_k, const std::vector<cplx>& z_samples,
                         const TauOptions& opts = {}, int workers = 1);

std::string to_json(const std::vector<DbarResult>& sweep);

}  // namespace blab
