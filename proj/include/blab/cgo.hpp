#pragma once

#include <vector>

#include "blab/beltrami.hpp"
#include "blab/csv.hpp"

namespace blab {

/// e_k(w) = exp(i (k w + conj(k w))) evaluated pointwise on the samples of w.
ComplexField exp_phase(const ComplexField& w, cplx k);

enum class OuterScheme { DampedPicard, Anderson };

struct CgoOptions {
  double tol = 1e-10;
  int max_outer = 200;
  OuterScheme scheme = OuterScheme::DampedPicard;
  int anderson_depth = 6;
  /// Relaxation; <= 0 picks 1 for ||mu||_inf <= 0.5 and 0.5 above.
  double omega = 0.0;
  double omega_floor = 1.0 / 16.0;
  /// Inner Neumann tolerance: inner_factor * max(tol, 1e-2 * last outer step).
  double inner_factor = 0.01;
  int inner_max_iter = 2000;
  double K = 0.0;  // <= 0: smallest K admitted by ||mu||_inf
  Boundary boundary = Boundary::Plane;
};

struct CgoSolution {
  cplx k;
  cplx lambda;
  ComplexField mu;
  ComplexField h;    // d-bar phi
  ComplexField phi;
  ComplexField dphi;
  ComplexField f;    // exp(i k phi)
  ComplexField M;    // exp(i k (phi - z))
  double outer_residual = 0.0;
  int outer_iterations = 0;
  double omega = 1.0;
};

/// Solves  d-bar phi = -lambda mu (conj(k)/k) e_{-k}(phi) conj(d phi)  with
/// phi - z = O(1/z) by damped Picard on the frozen coefficient.  The outer
/// step is measured on the unit disk, which bounds it everywhere since phi - z
/// is holomorphic and decaying outside.  Throws ConvergenceError(NoConvergence)
/// after max_outer steps.
CgoSolution solve_cgo(const ComplexField& mu, cplx k, cplx lambda = 1.0, const CgoOptions& opts = {});

/// u = Re f_mu + i Im f_{-mu}.
ComplexField u_gamma(const CgoSolution& fp, const CgoSolution& fm);
/// Companion  Im f_mu + i Re f_{-mu}.
ComplexField u_gamma_tilde(const CgoSolution& fp, const CgoSolution& fm);

struct DecayRow {
  cplx k, lambda;
  double sup_abs_phi_minus_z;
  int outer_iterations;
  double outer_residual;
};

struct DecayTable {
  std::vector<DecayRow> rows;
  /// Least-squares slope of log sup|phi - z| against log|k| over all rows;
  /// NaN when some sup vanishes.
  double slope = 0.0;
  CsvTable to_csv() const;
};

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

DecayTable epsilon_decay_table(const ComplexField& mu, const std::vector<cplx>& ks,
                               const std::vector<cplx>& lambdas, const CgoOptions& opts = {},
                               int workers = 1);

/// Principal solution of the linear equation
/// d-bar psi = (conj(k)/k) lambda e_{-k}(z) mu d psi.
PrincipalSolution linear_psi(const ComplexField& mu, cplx k, cplx lambda = 1.0,
                             const NeumannOptions& opts = {}, double K = 0.0);

struct NeumannTerms {
  std::vector<ComplexField> f;
  /// radii[i] in the spectral parameter's units: |k|/4, |k|/2, |k|.
  std::vector<double> radii;
  /// tails[n][i] = L^2 mass of the transform of f_n outside radii[i].
  std::vector<std::vector<double>> tails;
};

/// f_0 = mu, f_n = mu T_n f_{n-1}.
NeumannTerms neumann_terms(const ComplexField& mu, cplx k, int n_max);

/// Smallest K with (K-1)/(K+1) >= s, for s < 1.
double ellipticity_for(double s);

}  // namespace blab
