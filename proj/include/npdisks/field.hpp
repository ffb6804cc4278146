#pragma once

// Potentials away from the boundary.  The single layer potential of a
// mean-zero density is harmonic in the strip picture with explicit
// sinh/cosh profiles in theta for every frequency s, so it can be evaluated
// anywhere from the spectral pair of the density.

#include <array>
#include <complex>

#include "npdisks/source.hpp"
#include "npdisks/spectral.hpp"

namespace npdisks {

/// Strip coordinates of z, including the segment (-alpha, alpha) between the
/// corners (theta = pi there).  Throws CornerError at (+-alpha, 0).
BipolarCoord strip_coords(const Geometry& g, PlanePoint z);

/// u~(xi, theta) = S[phi](Phi(xi, theta)) for the density with pair f.
class StripSolution {
 public:
  /// Coefficients F_o = f1 / 2 and F_e = f2 / 2 of the odd and even parts.
  StripSolution(const Transform& T, const SpectralPair& f);

  /// Additive constant of the even part, fixed by u~(0, 0) = 0.
  complex c0() const { return c0_; }

  complex at(double xi, double theta) const;
  /// (d/dxi, d/dtheta) of u~.
  std::array<complex, 2> strip_gradient(double xi, double theta) const;

  complex operator()(PlanePoint z) const;
  /// (du/dx1, du/dx2).
  std::array<complex, 2> gradient(PlanePoint z) const;

  /// Samples of v(s_k, theta): the Fourier transform of u~ - c0 in xi.
  std::vector<complex> profile(double theta, bool theta_derivative = false) const;

 private:
  const Transform* T_;
  std::vector<complex> Fo_, Fe_;
  complex c0_;
};

/// Rejects densities with |int phi dsigma| > tol * int |phi| dsigma.
StripSolution solve_transmission(const Transform& T, const BoundaryDensity& phi, double tol = 1e-9);

/// Boundary trace of S[phi] through the multipliers -p1, -p2.
BoundaryDensity single_layer_boundary(const Transform& T, const BoundaryDensity& phi);

/// K*[phi] = U^{-1} (eta f1, -eta f2).
BoundaryDensity np_apply_boundary(const Transform& T, const BoundaryDensity& phi);

/// psi_s^j; j = 1 belongs to eta(s), j = 2 to -eta(s).  Negative s is
/// accepted (psi_{-s} is the conjugate family).
struct GenEigenfunction {
  double s = 0.0;
  int j = 1;
};

/// psi_s^j at Phi(xi, +-theta0).  j = 2, s = 0 throws SingularityError.
complex eigenfunction_boundary(const Geometry& g, GenEigenfunction e, double xi, Arc arc);

/// The closed form for S[psi_s^j] off the boundary as the paper states it:
///   j = 1: (2 sqrt pi)^-1 p1^1/2 sinh(s Psi2)/sinh(s theta0) e^{i s Psi1},
///   j = 2: (2 sqrt pi)^-1 p2^1/2 [cosh(s Psi2)/cosh(s theta0) e^{i s Psi1} - 1].
/// Compared with the actual single layer potential this has the opposite
/// overall sign, and for j = 2 it does not decay at infinity; see
/// eigenfunction_potential.  Interior z throws DomainError.  For j = 2 the
/// s -> 0 limit i Psi1 / (2 pi) is returned at s = 0.
complex eigenfunction_single_layer(const Geometry& g, GenEigenfunction e, PlanePoint z);
std::array<complex, 2> eigenfunction_single_layer_gradient(const Geometry& g, GenEigenfunction e, PlanePoint z);

/// Boundary limit of eigenfunction_single_layer on the given arc.
complex eigenfunction_trace(const Geometry& g, GenEigenfunction e, double xi, Arc arc);

/// The decaying single layer potential of psi_s^j, as the multiplier
/// pipeline and the Nystrom oracle give it:
///   j = 1: -(2 sqrt pi)^-1 p1^1/2 sinh(s Psi2)/sinh(s theta0) e^{i s Psi1},
///   j = 2: -(2 sqrt pi)^-1 p2^1/2 (cosh(s Psi2) e^{i s Psi1} - 1) / cosh(s theta0).
/// For j = 2 this is only defined up to a constant (psi_s^2 has infinite
/// total mass); the constant is the one that makes it vanish at infinity.
complex eigenfunction_potential(const Geometry& g, GenEigenfunction e, PlanePoint z);

/// Weak eigenrelation <phi, K* psi>_{H*} = +-eta(s) <phi, psi>_{H*}, with
/// both pairings -int phi conj(S[psi]) dsigma evaluated from the closed form
/// trace.  K* phi comes from np_apply_boundary.  phi must be mean-zero for
/// j = 2, where S[psi] carries an additive constant.
struct EigenrelationReport {
  complex lhs;       // <phi, K* psi>
  complex pairing;   // <phi, psi>
  double eigenvalue = 0.0;
  double residual = 0.0;  // |lhs - eigenvalue * pairing|
  complex rayleigh;       // lhs / pairing
};
EigenrelationReport eigenrelation_check(const Transform& T, GenEigenfunction e, const BoundaryDensity& phi);

/// phi_delta = (lambda I - K*)^{-1} [d q / d nu] in the spectral domain.
SpectralPair resolvent_pair(const Transform& T, const DipoleSource& src, complex lambda);

/// u_delta = q + S[phi_delta] at a point off the boundary.
class InducedField {
 public:
  InducedField(const Transform& T, const DipoleSource& src, complex lambda);
  complex value(PlanePoint z) const;
  std::array<complex, 2> gradient(PlanePoint z) const;
  const StripSolution& scattered() const { return scattered_; }

 private:
  DipoleSource src_;
  StripSolution scattered_;
};

/// One-shot evaluation for a query at delta; rejects delta = 0 when lambda0
/// lies in [-b, b].
complex induced_field(const Transform& T, const ResonanceQuery& query, double delta, PlanePoint z);

}  // namespace npdisks
