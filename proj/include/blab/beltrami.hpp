#pragma once

#include <optional>

#include "blab/transforms.hpp"

namespace blab {

/// kappa = (K - 1) / (K + 1).
double ellipticity_bound(double K);

/// mu = (1 - gamma) / (1 + gamma) for a real conductivity with 1/K <= gamma <= K.
ComplexField gamma_to_mu(const ComplexField& gamma, double K);
/// gamma = (1 - mu) / (1 + mu) for a real coefficient with |mu| <= kappa.
ComplexField mu_to_gamma(const ComplexField& mu, double K);

/// Coefficients of  d-bar f = mu d f + nu conj(d f),  checked at construction:
/// max(|mu| + |nu|) <= kappa and both vanish off the closed unit disk.
class BeltramiPair {
 public:
  static BeltramiPair make(ComplexField mu, ComplexField nu, double K);
  static BeltramiPair make(ComplexField mu, double K);

  const ComplexField& mu() const noexcept { return mu_; }
  const ComplexField& nu() const noexcept { return nu_; }
  const Grid& grid() const noexcept { return mu_.grid(); }
  double kappa() const noexcept { return kappa_; }
  double K() const noexcept { return K_; }
  /// max(|mu| + |nu|) over the grid.
  double sup() const noexcept { return sup_; }

 private:
  BeltramiPair(ComplexField mu, ComplexField nu, double K, double sup);
  ComplexField mu_, nu_;
  double kappa_, K_, sup_;
};

enum class Schedule { Plain, TwoStep, Anderson };

/// Plane: Cauchy and Beurling transforms on the whole plane (image corrected);
/// Periodic: plain torus multipliers.
enum class Boundary { Plane, Periodic };

const char* to_string(Schedule s);

struct NeumannOptions {
  double tol = 1e-10;
  int max_iter = 500;
  Schedule schedule = Schedule::Plain;
  int anderson_depth = 5;
  Boundary boundary = Boundary::Plane;
  std::optional<ComplexField> warm_start;
};

struct NeumannResult {
  ComplexField h;
  /// ||F(h) - h||_2 / ||rhs||_2 of the last step.
  double residual = 0.0;
  int iterations = 0;
};

/// Fixed point of h -> mu T h + nu conj(T h) + rhs.  Throws ConvergenceError
/// (MaxIterExceeded) when the residual is still above tol after max_iter steps.
NeumannResult neumann_solve(const BeltramiPair& pair, const ComplexField& rhs,
                            const NeumannOptions& opts = {});

struct PrincipalSolution {
  ComplexField h;     // d-bar phi
  ComplexField phi;   // z + C h
  ComplexField dphi;  // 1 + T h
  double residual = 0.0;
  int iterations = 0;
  double ellipticity_fraction = 0.0;
  double jacobian_fraction = 0.0;
  int injectivity_failures = 0;
};

PrincipalSolution principal_solution(const BeltramiPair& pair, const NeumannOptions& opts = {});

/// || d-bar phi - mu d phi - nu conj(d phi) ||_2 with both derivatives of phi - z
/// taken spectrally.
double beltrami_residual(const BeltramiPair& pair, const PrincipalSolution& sol);

}  // namespace blab
