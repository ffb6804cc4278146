#pragma once

// Resonance of a dipole source.  Everything here is closed form in the
// frequency s: the spectral density of dq/dnu is 2 g_j / |eta'| and the
// norm of phi_delta is a one-dimensional integral against it.

#include <complex>
#include <string>
#include <vector>

#include "npdisks/geometry.hpp"
#include "npdisks/multipliers.hpp"
#include "npdisks/source.hpp"

namespace npdisks {

/// |a . grad S[psi_s^j](z)|^2 in closed form:
///   j = 1: s^2 p1 / (4 pi sinh^2 s theta0) [(a.grad Psi2)^2 cosh^2 s Psi2 + (a.grad Psi1)^2 sinh^2 s Psi2],
///   j = 2: s^2 p2 / (4 pi cosh^2 s theta0) [(a.grad Psi2)^2 sinh^2 s Psi2 + (a.grad Psi1)^2 cosh^2 s Psi2].
double dipole_gradient_sq(const Geometry& g, const DipoleSource& src, double s, int j);

/// g_j at eta(s): |-1/2 + (-1)^{j+1} eta(s)|^2 dipole_gradient_sq.
double g_j(const Geometry& g, const DipoleSource& src, double s, int j);

/// Spectral density of dq/dnu at t in [-b, b] \ {0}; +infinity at t = +-b.
double mu_prime(const Geometry& g, const DipoleSource& src, double t);

/// ||phi_delta||^2_{H*} = int mu'(t) / |lambda - t|^2 dt.
struct NormResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute quadrature error
};
NormResult phi_norm_sq(const Geometry& g, const DipoleSource& src, std::complex<double> lambda, double rel_tol = 1e-6);
inline NormResult phi_norm_sq(const Geometry& g, const DipoleSource& src, double lambda0, double delta,
                              double rel_tol = 1e-6) {
  return phi_norm_sq(g, src, {lambda0, delta}, rel_tol);
}

/// Where lambda0 sits relative to the spectrum [-b, b].
enum class Regime { interior, endpoint, zero, outside };
Regime classify(const Multipliers& m, double lambda0);
std::string to_string(Regime r);

/// Fit of ||phi_delta||^2 over a delta sweep.
///   slope:               least squares of log ||phi||^2 against log delta.
///   log_corrected_slope: the same for ||phi||^2 / |log delta|.
///   exponent:            p of the regime (1, 3/2, 1 + |Psi2|/theta0, or 0).
///   limit_constant:      delta^p ||phi||^2 (divided by |log delta| at 0),
///                        extrapolated from the two smallest deltas with the
///                        leading correction of the regime (delta, delta^1/2,
///                        1/|log delta|, delta^2).
///   predicted_limit:     2 pi g_j / |eta'| for the interior regime, else NaN.
struct RateFit {
  Regime regime = Regime::outside;
  std::vector<double> deltas;
  std::vector<double> norms;
  std::vector<double> local_slopes;  // between neighbours, first entry NaN
  double slope = 0.0;
  double log_corrected_slope = 0.0;
  double exponent = 0.0;
  double limit_constant = 0.0;
  double predicted_limit = 0.0;
};
RateFit rate_fit(const Geometry& g, const DipoleSource& src, double lambda0, const std::vector<double>& deltas);

/// delta ||phi_delta|| over the sweep.
std::vector<double> never_order_check(const Geometry& g, const DipoleSource& src, double lambda0,
                                      const std::vector<double>& deltas);

/// n points geometric from hi down to lo.
std::vector<double> geometric_deltas(double hi, double lo, int n);

}  // namespace npdisks
