#include "npdisks/multipliers.hpp"

#include <cmath>
#include <numbers>

#include "npdisks/errors.hpp"

namespace npdisks {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double series_cutoff = 1e-4;

// (1 - e^{-2x}) for x >= 0, accurate for small x.
double one_minus_exp2(double x) { return -std::expm1(-2.0 * x); }
double one_plus_exp2(double x) { return 1.0 + std::exp(-2.0 * x); }

// x coth(x) - 1 for |x| < 0.05, to O(x^10).
double xcoth_minus_one(double x) {
  const double x2 = x * x;
  return x2 * (1.0 / 3.0 + x2 * (-1.0 / 45.0 + x2 * (2.0 / 945.0 - x2 / 4725.0)));
}

// coth(x) for x > 0.
double coth_pos(double x) { return one_plus_exp2(x) / one_minus_exp2(x); }

}  // namespace

Multipliers::Multipliers(double theta0)
    : theta0_(theta0),
      bound_(0.5 - theta0 / pi),
      shrink_(pi - 2.0 * theta0),
      kappa_(2.0 * theta0 * (pi - theta0) / 3.0) {
  if (!(theta0 > 0.0 && theta0 < pi / 2.0)) {
    throw DomainError("theta0 must lie in the open interval (0, pi/2)");
  }
}

double Multipliers::p1(double s) const {
  const double x = std::abs(s);
  const double q = theta0_ * (pi - theta0_);
  if (x < series_cutoff) return q / pi * (1.0 - q * x * x / 3.0);
  return 0.5 * one_minus_exp2(x * theta0_) * one_minus_exp2(x * (pi - theta0_)) /
         (x * one_minus_exp2(pi * x));
}

double Multipliers::p2(double s) const {
  if (s == 0.0) throw SingularityError("p2 has a pole at s = 0");
  const double x = std::abs(s);
  return 0.5 * one_plus_exp2(x * theta0_) * one_plus_exp2(x * (pi - theta0_)) /
         (x * one_minus_exp2(pi * x));
}

double Multipliers::eta(double s) const {
  const double x = std::abs(s);
  if (x < series_cutoff) return bound_ * (1.0 - kappa_ * x * x);
  return 0.5 * std::exp(-2.0 * theta0_ * x) * one_minus_exp2(shrink_ * x) / one_minus_exp2(pi * x);
}

double Multipliers::log_eta(double s) const {
  const double x = std::abs(s);
  if (x < series_cutoff) return std::log(eta(s));
  return std::log(0.5) - 2.0 * theta0_ * x +
         std::log(one_minus_exp2(shrink_ * x) / one_minus_exp2(pi * x));
}

double Multipliers::eta_prime(double s) const {
  // eta' = eta * (A coth(A s) - pi coth(pi s)), A = pi - 2 theta0.
  const double x = std::abs(s);
  const double sign = s < 0.0 ? -1.0 : 1.0;
  if (x == 0.0) return 0.0;
  double d;
  if (pi * x < 0.05) {
    d = (xcoth_minus_one(shrink_ * x) - xcoth_minus_one(pi * x)) / x;
  } else {
    d = shrink_ * coth_pos(shrink_ * x) - pi * coth_pos(pi * x);
  }
  return sign * eta(x) * d;
}

double Multipliers::eta_gap(double s) const {
  const double x = std::abs(s);
  if (pi * x < 0.05) {
    // sinh(Ax)/sinh(pi x) = (A/pi) num/den with num, den the sinh(y)/y series.
    const double a2 = shrink_ * shrink_ * x * x;
    const double p2v = pi * pi * x * x;
    auto series = [](double y2) {
      return 1.0 + y2 / 6.0 * (1.0 + y2 / 20.0 * (1.0 + y2 / 42.0 * (1.0 + y2 / 72.0)));
    };
    const double diff = (p2v - a2) / 6.0 *
                        (1.0 + (p2v + a2) / 20.0 +
                         (p2v * p2v + p2v * a2 + a2 * a2) / 840.0 +
                         (p2v + a2) * (p2v * p2v + a2 * a2) / 60480.0);
    return bound_ * diff / series(p2v);
  }
  return bound_ - eta(x);
}

double Multipliers::eta_inverse(double t) const {
  if (!(t > 0.0 && t <= bound_)) throw DomainError("eta_inverse: t must lie in (0, b]");
  if (t == bound_) return 0.0;
  if (bound_ - t < 1e-3 * bound_) return eta_inverse_gap(bound_ - t);

  const double smax = s_cap();
  const double eta_max = eta(smax);
  const double log_t = std::log(t);
  double s;
  if (t < eta_max) {
    // Asymptotic regime eta ~ (1/2) e^{-2 theta0 s}.
    s = smax + (std::log(eta_max) - log_t) / (2.0 * theta0_);
  } else {
    double lo = 0.0, hi = smax;
    while (eta(lo) - eta(hi) > 1e-3 * bound_) {
      const double mid = 0.5 * (lo + hi);
      (eta(mid) > t ? lo : hi) = mid;
    }
    s = 0.5 * (lo + hi);
  }
  // Newton on log(eta(s)) - log(t); the log form stays well conditioned
  // in the exponential tail.
  for (int it = 0; it < 60; ++it) {
    const double f = log_eta(s) - log_t;
    const double df = eta_prime(s) / eta(s);
    const double step = f / df;
    s = std::max(s - step, 0.5 * s);
    if (std::abs(step) <= 1e-15 * std::max(1.0, s)) break;
  }
  return s;
}

double Multipliers::eta_inverse_gap(double gap) const {
  if (!(gap >= 0.0 && gap < bound_)) throw DomainError("eta_inverse_gap: gap must lie in [0, b)");
  if (gap == 0.0) return 0.0;
  if (gap >= 1e-3 * bound_) return eta_inverse(bound_ - gap);
  double s = std::sqrt(gap / (bound_ * kappa_));
  for (int it = 0; it < 60; ++it) {
    const double f = eta_gap(s) - gap;
    const double df = -eta_prime(s);
    const double step = f / df;
    s -= step;
    if (std::abs(step) <= 1e-15 * s) break;
  }
  return s;
}

}  // namespace npdisks
