#pragma once

// Fourier multipliers that diagonalize the single layer potential and the
// Neumann-Poincare operator in bipolar coordinates.  All functions are
// evaluated in exponentially scaled form, so arguments of several hundred
// are safe.

#include "npdisks/geometry.hpp"

namespace npdisks {

class Multipliers {
 public:
  explicit Multipliers(double theta0);
  explicit Multipliers(const Geometry& g) : Multipliers(g.theta0()) {}

  double theta0() const { return theta0_; }
  /// Spectral bound b = eta(0) = 1/2 - theta0/pi.
  double bound() const { return bound_; }

  /// sinh(s theta0) sinh(s(pi - theta0)) / (s sinh(s pi)); smooth, positive.
  double p1(double s) const;
  /// cosh(s theta0) cosh(s(pi - theta0)) / (s sinh(s pi)); pole at s = 0.
  double p2(double s) const;
  double p(int component, double s) const { return component == 1 ? p1(s) : p2(s); }

  /// (1/2) sinh(s(pi - 2 theta0)) / sinh(s pi).
  double eta(double s) const;
  double eta_prime(double s) const;
  /// log(eta(s)), finite for every s (eta never underflows here).
  double log_eta(double s) const;
  /// b - eta(s) without cancellation near s = 0.
  double eta_gap(double s) const;

  /// The unique s >= 0 with eta(s) = t, for t in (0, b].
  double eta_inverse(double t) const;
  /// The unique s >= 0 with b - eta(s) = gap, for gap in [0, b).
  double eta_inverse_gap(double gap) const;

  /// Upper end of the bracket used by eta_inverse.
  double s_cap() const { return 60.0 / theta0_; }

 private:
  double theta0_;
  double bound_;
  double shrink_;  // pi - 2 theta0
  double kappa_;   // 2 theta0 (pi - theta0) / 3
};

}  // namespace npdisks
