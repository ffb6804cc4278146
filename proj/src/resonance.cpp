#include "npdisks/resonance.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "hyperbolic.hpp"
#include "npdisks/errors.hpp"

namespace npdisks {

namespace {

constexpr double pi = std::numbers::pi;
using detail::Kind;
using detail::quotient;

struct Projections {
  double psi2, a1, a2;  // Psi2(z), a . grad Psi1, a . grad Psi2
};

Projections project(const Geometry& g, const DipoleSource& src) {
  return {psi(g, src.z).theta, dot(src.a, grad_psi1(g, src.z)), dot(src.a, grad_psi2(g, src.z))};
}

double gradient_sq(const Multipliers& m, const Projections& p, double s, int j) {
  const double t0 = m.theta0(), y = p.psi2;
  if (j == 1) {
    if (s == 0.0) return m.p1(0.0) / (4.0 * pi * t0 * t0) * p.a2 * p.a2;
    const double c = quotient(Kind::cosh, s * y, Kind::sinh, s * t0);
    const double d = quotient(Kind::sinh, s * y, Kind::sinh, s * t0);
    return s * s * m.p1(s) / (4.0 * pi) * (p.a2 * p.a2 * c * c + p.a1 * p.a1 * d * d);
  }
  if (j != 2) throw DomainError("g_j: j must be 1 or 2");
  if (s == 0.0) return p.a1 * p.a1 / (4.0 * pi * pi);
  const double c = quotient(Kind::sinh, s * y, Kind::cosh, s * t0);
  const double d = quotient(Kind::cosh, s * y, Kind::cosh, s * t0);
  return s * s * m.p2(s) / (4.0 * pi) * (p.a2 * p.a2 * c * c + p.a1 * p.a1 * d * d);
}

double g_of(const Multipliers& m, const Projections& p, double s, int j) {
  const double f = -0.5 + (j == 1 ? 1.0 : -1.0) * m.eta(s);
  return f * f * gradient_sq(m, p, s, j);
}

double inverse_eta(const Multipliers& m, double t) {
  const double b = m.bound();
  return b - t < 1e-3 * b ? m.eta_inverse_gap(b - t) : m.eta_inverse(t);
}

// Curvature of eta at 0: eta = b (1 - kappa s^2) + ...
double kappa(double theta0) { return 2.0 * theta0 * (pi - theta0) / 3.0; }

}  // namespace

double dipole_gradient_sq(const Geometry& g, const DipoleSource& src, double s, int j) {
  return gradient_sq(Multipliers(g), project(g, src), std::abs(s), j);
}

double g_j(const Geometry& g, const DipoleSource& src, double s, int j) {
  if (j != 1 && j != 2) throw DomainError("g_j: j must be 1 or 2");
  return g_of(Multipliers(g), project(g, src), std::abs(s), j);
}

double mu_prime(const Geometry& g, const DipoleSource& src, double t) {
  const Multipliers m(g);
  const double b = m.bound();
  if (t == 0.0) throw DomainError("mu_prime: t = 0 is a singular point of the density");
  if (std::abs(t) > b) throw DomainError("mu_prime: t outside [-b, b]");
  if (std::abs(t) == b) return std::numeric_limits<double>::infinity();
  const double s = inverse_eta(m, std::abs(t));
  return 2.0 * g_of(m, project(g, src), s, t > 0.0 ? 1 : 2) / std::abs(m.eta_prime(s));
}

NormResult phi_norm_sq(const Geometry& g, const DipoleSource& src, std::complex<double> lambda, double rel_tol) {
  const Multipliers m(g);
  const Projections p = project(g, src);
  const double b = m.bound(), t0 = g.theta0();
  const double l0 = lambda.real(), delta = std::abs(lambda.imag());
  if (!(delta > 0.0) && std::abs(l0) <= b) throw DomainError("phi_norm_sq: lambda on the spectrum needs delta > 0");

  // In s the measure is 2 g_j ds: t = +-eta(s) turns the (b - t)^{-1/2}
  // edge into a smooth end at s = 0 and the |log t| t^{-r} behaviour at
  // t = 0 into an exponential tail.
  auto f = [&](double s) {
    const double e = m.eta(s);
    return 2.0 * g_of(m, p, s, 1) / std::norm(lambda - e) + 2.0 * g_of(m, p, s, 2) / std::norm(lambda + e);
  };

  // Location s0 and width w of the Poisson peak (or knee at lambda0 = 0).
  double s0, w;
  const double a = std::abs(l0);
  if (a >= b) {
    s0 = 0.0;
    w = std::sqrt((a - b + delta) / (b * kappa(t0)));
  } else if (a <= delta) {
    s0 = m.eta_inverse(std::min(delta, b));
    w = 1.0 / (2.0 * t0);
  } else {
    s0 = inverse_eta(m, a);
    w = std::min(delta / std::abs(m.eta_prime(s0)), 1.0 / (2.0 * t0));
    if (s0 == 0.0) w = std::sqrt(delta / (b * kappa(t0)));
  }
  const double rate = 2.0 * (t0 - std::abs(p.psi2));
  const double s_end = s0 + 60.0 / rate + 10.0 / t0;

  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  NormResult out;
  auto add = [&](auto&& fn, double lo, double hi) {
    if (!(hi > lo)) return;
    double err = 0.0;
    out.value += GK::integrate(fn, lo, hi, 12, 1e-3 * rel_tol, &err);
    out.error += err;
  };
  // Arctangent map s = s0 + w tan u over the central window.
  const double W = 20.0 * w;
  const double lo = std::max(0.0, s0 - W), hi = s0 + W;
  auto mapped = [&](double u) {
    const double c = std::cos(u);
    return f(s0 + w * std::tan(u)) * w / (c * c);
  };
  add(mapped, std::atan((lo - s0) / w), std::atan((hi - s0) / w));
  // Geometric panels outward from the window.
  for (double x = lo, step = W; x > 0.0; step *= 4.0) {
    const double nx = std::max(0.0, x - 3.0 * step);
    add(f, nx, x);
    x = nx;
  }
  for (double x = hi, step = W; x < s_end; step *= 4.0) {
    const double nx = std::min(s_end, x + 3.0 * step);
    add(f, x, nx);
    x = nx;
  }
  if (out.error > rel_tol * out.value) {
    throw QuadratureError("phi_norm_sq: quadrature did not reach the requested accuracy", out.error / out.value);
  }
  return out;
}

Regime classify(const Multipliers& m, double lambda0) {
  const double b = m.bound(), a = std::abs(lambda0);
  if (a > b * (1.0 + 1e-12)) return Regime::outside;
  if (a >= b * (1.0 - 1e-12)) return Regime::endpoint;
  if (a < 1e-14) return Regime::zero;
  return Regime::interior;
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::interior: return "interior";
    case Regime::endpoint: return "endpoint";
    case Regime::zero: return "zero";
    case Regime::outside: return "outside";
  }
  return "?";
}

namespace {

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

RateFit rate_fit(const Geometry& g, const DipoleSource& src, double lambda0, const std::vector<double>& deltas) {
  ResonanceQuery{src, lambda0, deltas, std::nullopt}.validate();
  if (deltas.size() < 6 || deltas.front() / deltas.back() < 1e3 * (1.0 - 1e-12)) {
    throw DomainError("rate_fit: need at least 6 deltas spanning 3 decades");
  }
  const Multipliers m(g);
  RateFit r;
  r.regime = classify(m, lambda0);
  r.deltas = deltas;
  std::vector<double> lx, ly, lc;
  for (double d : deltas) {
    const double v = phi_norm_sq(g, src, lambda0, d).value;
    r.norms.push_back(v);
    lx.push_back(std::log(d));
    ly.push_back(std::log(v));
    lc.push_back(std::log(v / std::abs(std::log(d))));
  }
  r.local_slopes.push_back(std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 1; i < deltas.size(); ++i) r.local_slopes.push_back((ly[i] - ly[i - 1]) / (lx[i] - lx[i - 1]));
  r.slope = lsq_slope(lx, ly);
  r.log_corrected_slope = lsq_slope(lx, lc);

  const double ratio = std::abs(psi(g, src.z).theta) / g.theta0();
  double kap = 1.0;
  bool log_correction = false;
  switch (r.regime) {
    case Regime::interior: r.exponent = 1.0; kap = 1.0; break;
    case Regime::endpoint: r.exponent = 1.5; kap = 0.5; break;
    case Regime::zero: r.exponent = 1.0 + ratio; log_correction = true; break;
    case Regime::outside: r.exponent = 0.0; kap = 2.0; break;
  }
  auto y = [&](std::size_t i) {
    double v = std::pow(deltas[i], r.exponent) * r.norms[i];
    if (log_correction) v /= std::abs(std::log(deltas[i]));
    return v;
  };
  auto x = [&](std::size_t i) { return log_correction ? 1.0 / std::abs(std::log(deltas[i])) : std::pow(deltas[i], kap); };
  const std::size_t i1 = deltas.size() - 2, i2 = deltas.size() - 1;
  r.limit_constant = (y(i2) * x(i1) - y(i1) * x(i2)) / (x(i1) - x(i2));

  r.predicted_limit = std::numeric_limits<double>::quiet_NaN();
  if (r.regime == Regime::interior) {
    const double s0 = inverse_eta(m, std::abs(lambda0));
    r.predicted_limit = 2.0 * pi * g_j(g, src, s0, lambda0 > 0.0 ? 1 : 2) / std::abs(m.eta_prime(s0));
  }
  return r;
}

std::vector<double> never_order_check(const Geometry& g, const DipoleSource& src, double lambda0,
                                      const std::vector<double>& deltas) {
  std::vector<double> out;
  for (double d : deltas) out.push_back(d * std::sqrt(phi_norm_sq(g, src, lambda0, d).value));
  return out;
}

std::vector<double> geometric_deltas(double hi, double lo, int n) {
  if (!(hi > lo && lo > 0.0) || n < 2) throw DomainError("geometric_deltas: need hi > lo > 0 and n >= 2");
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) d[i] = hi * std::pow(lo / hi, static_cast<double>(i) / (n - 1));
  return d;
}

}  // namespace npdisks
