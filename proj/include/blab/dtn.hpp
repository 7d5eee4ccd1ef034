#pragma once

#include <Eigen/Core>
#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "blab/csv.hpp"
#include "blab/field.hpp"

namespace blab {

/// Piecewise-constant radial conductivity: values[i] on radii[i-1] <= |z| < radii[i],
/// with radii[-1] = 0 and values.back() up to |z| = 1.
struct RadialLayers {
  std::vector<double> radii;
  std::vector<double> values;

  double operator()(double r) const;
};

class Conductivity {
 public:
  /// Real samples on a grid; the mesh reads them by bilinear interpolation.
  static Conductivity from_field(const ComplexField& gamma, double K);
  static Conductivity radial(RadialLayers layers, double K);
  static Conductivity from_function(std::function<double(cplx)> gamma, double K);

  double operator()(cplx z) const { return eval_(z); }
  double K() const noexcept { return K_; }
  const std::optional<RadialLayers>& layers() const noexcept { return layers_; }

  /// w -> gamma(r w): the restriction to B(0, r) carried to the unit disk.
  Conductivity restricted(double r) const;
  /// gamma inside B(0, r), 1 outside.
  Conductivity extended(double r) const;

 private:
  Conductivity(std::function<double(cplx)> eval, double K, std::optional<RadialLayers> layers);
  std::function<double(cplx)> eval_;
  double K_;
  std::optional<RadialLayers> layers_;
};

struct DiskMesh {
  std::vector<cplx> nodes;
  std::vector<std::array<int, 3>> triangles;
  /// Indices of the nodes on |z| = 1, in increasing angle.
  std::vector<int> boundary;
  double h = 0.0;
};

/// Concentric-ring triangulation with radial spacing <= h, rings placed on every
/// interface radius and spacing h/2 within 4h of the boundary.  Every ring count is
/// a multiple of `symmetry`, so the mesh is invariant under rotation by 2pi/symmetry
/// and Fourier modes n != m with |n - m| < symmetry do not couple for radial gamma.
DiskMesh ring_mesh(double h, const std::vector<double>& interfaces = {}, int symmetry = 1);

struct DtnMatrix {
  int n_b = 0;
  /// (m + n_b, n + n_b) entry = (1/2pi) int gamma grad u_n . grad conj(e^{im theta} extension).
  Eigen::MatrixXcd entries;
  double mesh_h = 0.0;
  double tolerance = 0.0;

  cplx operator()(int m, int n) const { return entries(m + n_b, n + n_b); }
  Eigen::VectorXcd diagonal() const { return entries.diagonal(); }
  CsvTable diagonal_csv() const;
  /// Leading (2 n + 1) block.
  DtnMatrix truncated(int n) const;
};

DtnMatrix dtn_matrix(const Conductivity& c, int n_b, double mesh_h, int workers = 1);

/// Exact DtN of a radial piecewise-constant conductivity (diagonal).
DtnMatrix radial_dtn_oracle(const RadialLayers& layers, int n_b);

/// Spectral norm of W^{-1/2} (L1 - L2) W^{-1/2}, W = diag((1 + n^2)^{1/2}).
double dtn_distance(const DtnMatrix& a, const DtnMatrix& b);

struct ExtensionComparison {
  double rho_inner = 0.0, rho_outer = 0.0;
  double ratio() const { return rho_outer / rho_inner; }
};

/// rho on the boundary of B(0, r) (via the rescaled conductivities) and on the unit
/// circle for the conductivities extended by 1 outside B(0, r).
ExtensionComparison extension_compare(const Conductivity& c1, const Conductivity& c2, double r, int n_b,
                                      double mesh_h, int workers = 1);

/// JSON header line followed by raw little-endian (re, im) doubles, row-major.
void save_dtn(const DtnMatrix& m, const std::string& path);
DtnMatrix load_dtn(const std::string& path);

}  // namespace blab
