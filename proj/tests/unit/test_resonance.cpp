#include <doctest.h>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "npdisks/errors.hpp"
#include "npdisks/field.hpp"
#include "npdisks/nystrom.hpp"
#include "npdisks/resonance.hpp"

using namespace npdisks;
using std::numbers::pi;

namespace {

const Geometry& geom() {
  static const Geometry g = Geometry::make(1.0, pi / 4);
  return g;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// eta = b (1 - kappa s^2) + O(s^4)
double kappa(double t0) { return 2.0 * t0 * (pi - t0) / 3.0; }

}  // namespace

TEST_CASE("closed-form dipole gradient matches the eigenfunction gradient") {
  const auto& g = geom();
  const auto src = dipole_at_ratio(g, 0.4, 0.5);
  for (double s : {0.2, 1.0, 3.5}) {
    for (int j : {1, 2}) {
      const auto grad = eigenfunction_single_layer_gradient(g, {s, j}, src.z);
      const double direct = std::norm(src.a.x1 * grad[0] + src.a.x2 * grad[1]);
      CHECK(rel(dipole_gradient_sq(g, src, s, j), direct) < 1e-12);
      CHECK(g_j(g, src, s, j) > 0.0);
    }
  }
}

TEST_CASE("g_j agrees with p_j |U[dq/dnu]_j|^2 / 2") {
  const auto& g = geom();
  const Transform T(g, SpectralGrid::make(30.0, 2048));
  const auto src = dipole_at_ratio(g, 0.4, 0.5);
  const auto f = T.forward(dipole_normal_derivative(T, src));
  const SpectralInterpolant fi(T.fourier(), f);
  const auto& m = T.multipliers();
  for (double s : {0.3, 1.0, 2.5, 6.0}) {
    for (int j : {1, 2}) {
      CHECK(rel(g_j(g, src, s, j), 0.5 * m.p(j, s) * std::norm(fi(j, s))) < 1e-6);
    }
  }
}

TEST_CASE("g_j is continuous at s = 0 and even") {
  const auto& g = geom();
  const auto src = dipole_at_ratio(g, 0.4, 0.5);
  for (int j : {1, 2}) {
    CHECK(rel(g_j(g, src, 1e-6, j), g_j(g, src, 0.0, j)) < 1e-8);
    CHECK(g_j(g, src, -1.3, j) == g_j(g, src, 1.3, j));
  }
  CHECK_THROWS_AS(g_j(g, src, 1.0, 3), DomainError);
}

TEST_CASE("g_j decays at rate 2(theta0 - |Psi2|)") {
  const auto& g = geom();
  for (double r : {0.3, 0.6, 0.9}) {
    const auto src = dipole_at_ratio(g, 0.4, r);
    const double rate = 2.0 * g.theta0() * (1.0 - r);
    // s^2 p_j grows like s / 2; divide it out.
    for (int j : {1, 2}) {
      const double slope = std::log(g_j(g, src, 201.0, j) / g_j(g, src, 200.0, j) * 200.0 / 201.0);
      CHECK(std::abs(slope + rate) < 0.02 * rate);
    }
  }
}

TEST_CASE("mu' has the edge and zero singularities") {
  const auto& g = geom();
  const Multipliers m(g);
  const double b = m.bound();
  const auto src = dipole_at_ratio(g, 0.4, 0.6);
  // sqrt(b - t) mu'(t) tends to a finite nonzero limit.
  const double e1 = std::sqrt(1e-8) * mu_prime(g, src, b - 1e-8);
  const double e2 = std::sqrt(1e-10) * mu_prime(g, src, b - 1e-10);
  CHECK(e1 > 0.0);
  CHECK(rel(e2, e1) < 1e-3);
  CHECK(mu_prime(g, src, b) == std::numeric_limits<double>::infinity());
  // Near 0 the log-log slope tends to -|Psi2|/theta0 (up to the log factor).
  for (double sign : {1.0, -1.0}) {
    const double t1 = sign * 1e-40, t2 = sign * 1e-41;
    const double slope = std::log(mu_prime(g, src, t2) / mu_prime(g, src, t1)) / std::log(10.0) * -1.0;
    CHECK(std::abs(slope + 0.6) < 0.05);
  }
  CHECK_THROWS_AS(mu_prime(g, src, 0.0), DomainError);
  CHECK_THROWS_AS(mu_prime(g, src, 1.1 * b), DomainError);
}

TEST_CASE("total mass of mu' equals the W* norm of U[dq/dnu]") {
  const auto& g = geom();
  const Transform T(g, SpectralGrid::make(30.0, 2048));
  const double b = T.multipliers().bound();
  const auto src = dipole_at_ratio(g, 0.4, 0.5);
  const double wnorm = wstar_norm_sq(T.multipliers(), T.forward(dipole_normal_derivative(T, src)));

  // In t: tanh-sinh handles both endpoint singularities.
  boost::math::quadrature::tanh_sinh<double> ts;
  auto mu = [&](double t) { return mu_prime(g, src, t); };
  const double in_t = ts.integrate(mu, 0.0, b) + ts.integrate(mu, -b, 0.0);
  CHECK(rel(in_t, wnorm) < 1e-6);

  // In s the same mass is int_0^inf 2 (g1 + g2) ds.
  auto dens = [&](double s) { return 2.0 * (g_j(g, src, s, 1) + g_j(g, src, s, 2)); };
  const double in_s = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      dens, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-12);
  CHECK(rel(in_s, wnorm) < 1e-6);
}

TEST_CASE("phi_norm_sq agrees with the spectral resolvent and the Nystrom solve") {
  const auto& g = geom();
  const Transform T(g, SpectralGrid::make(120.0, 8192));
  const auto& m = T.multipliers();
  const double b = m.bound();
  const auto src = dipole_at_ratio(g, 0.4, 0.5);
  for (complex lambda : {complex(b / 2, 0.05), complex(-b / 2, 0.02), complex(0.0, 0.1), complex(b, 0.05),
                         complex(0.3, 1e-3)}) {
    CAPTURE(lambda);
    const double quad = phi_norm_sq(g, src, lambda).value;
    CHECK(rel(quad, wstar_norm_sq(m, resolvent_pair(T, src, lambda))) < 1e-6);
  }

  // Oracle: solve (lambda - K*) phi = dq/dnu on the graded mesh.
  const auto sys = NystromSystem::assemble(NystromMesh::build(g, 64));
  const auto& mesh = sys.mesh();
  const Eigen::VectorXcd rhs = mesh.sample([&](PlanePoint x, Arc arc) {
    return complex(dot(dipole_gradient(src, x), outward_normal(g, x, arc)));
  });
  const complex lambda(b / 2, 0.05);
  const Eigen::MatrixXcd A = lambda * Eigen::MatrixXcd::Identity(mesh.size(), mesh.size()) -
                             sys.Kstar().cast<complex>();
  const Eigen::VectorXcd phi = A.partialPivLu().solve(rhs);
  CHECK(rel(sys.hstar_inner(phi, phi).real(), phi_norm_sq(g, src, lambda).value) < 1e-3);
}

TEST_CASE("phi_norm_sq is monotone in delta on the spectrum and bounded off it") {
  const auto& g = geom();
  const Multipliers m(g);
  const double b = m.bound();
  const auto src = dipole_at_ratio(g, 0.4, 0.5);
  const auto deltas = geometric_deltas(1e-1, 1e-6, 11);
  for (double l0 : {b / 2, -b / 3, b, -b, 0.0}) {
    double prev = 0.0;
    for (double d : deltas) {
      const double v = phi_norm_sq(g, src, l0, d).value;
      CHECK(v > prev);
      prev = v;
    }
  }
  const double far1 = phi_norm_sq(g, src, 1.5 * b, 1e-6).value;
  const double far2 = phi_norm_sq(g, src, 1.5 * b, 1e-9).value;
  CHECK(rel(far2, far1) < 1e-9);
  // eps_c = 2 lands outside [-b, b]: no blow-up.
  const double e1 = phi_norm_sq(g, src, lambda_from_permittivity(2.0, 1e-3)).value;
  const double e2 = phi_norm_sq(g, src, lambda_from_permittivity(2.0, 1e-7)).value;
  CHECK(rel(e2, e1) < 1e-2);
  CHECK_THROWS_AS(phi_norm_sq(g, src, complex(b / 2, 0.0)), DomainError);
}

TEST_CASE("interior and endpoint limits") {
  const auto& g = geom();
  const Multipliers m(g);
  const double b = m.bound();
  const auto deltas = geometric_deltas(1e-2, 1e-6, 12);
  const auto src = dipole_at_ratio(g, 0.4, 0.5);

  const auto in = rate_fit(g, src, b / 2, deltas);
  CHECK(in.regime == Regime::interior);
  CHECK(std::abs(in.slope + 1.0) < 0.05);
  const double s0 = m.eta_inverse(b / 2);
  const double expect = 2.0 * pi * g_j(g, src, s0, 1) / std::abs(m.eta_prime(s0));
  CHECK(rel(in.predicted_limit, expect) < 1e-12);
  CHECK(rel(in.limit_constant, expect) < 1e-4);

  const auto neg = rate_fit(g, src, -b / 2, deltas);
  CHECK(rel(neg.limit_constant, 2.0 * pi * g_j(g, src, s0, 2) / std::abs(m.eta_prime(s0))) < 1e-4);

  // Near s = 0 the Poisson integral reduces to int du / (u^4 + 1) = pi / (2 sqrt 2).
  for (double r : {0.3, 0.6}) {
    const auto s = dipole_at_ratio(g, 0.4, r);
    const auto ep = rate_fit(g, s, b, deltas);
    CHECK(ep.regime == Regime::endpoint);
    CHECK(std::abs(ep.slope + 1.5) < 0.05);
    CHECK(rel(ep.limit_constant, pi * g_j(g, s, 0.0, 1) / std::sqrt(2.0 * b * kappa(g.theta0()))) < 1e-3);
  }
}

TEST_CASE("zero regime follows the log-corrected power law") {
  const auto& g = geom();
  const auto src = dipole_at_ratio(g, 0.4, 0.3);
  const auto fit = rate_fit(g, src, 0.0, geometric_deltas(1e-2, 1e-6, 12));
  CHECK(fit.regime == Regime::zero);
  CHECK(fit.exponent == doctest::Approx(1.3).epsilon(1e-12));
  CHECK(std::abs(fit.log_corrected_slope + 1.3) < 0.05);
  CHECK(fit.limit_constant > 0.0);
  CHECK(std::isnan(fit.predicted_limit));
  // Far below the acceptance window the local slope closes in on -(1 + r).
  const auto deep = rate_fit(g, dipole_at_ratio(g, 0.4, 0.9), 0.0, geometric_deltas(1e-30, 1e-40, 6));
  const double last = deep.local_slopes.back() + 1.0 / std::abs(std::log(deep.deltas.back()));
  CHECK(std::abs(last + 1.9) < 0.01);
}

TEST_CASE("delta times the norm goes to zero") {
  const auto& g = geom();
  const Multipliers m(g);
  const auto src = dipole_at_ratio(g, 0.4, 0.5);
  for (double l0 : {m.bound() / 2, m.bound(), 0.0, 2.0 * m.bound()}) {
    const auto seq = never_order_check(g, src, l0, geometric_deltas(1e-2, 1e-6, 13));
    for (std::size_t i = 1; i < seq.size(); ++i) CHECK(seq[i] < seq[i - 1]);
  }
}

TEST_CASE("rate_fit and sweep preconditions") {
  const auto& g = geom();
  const auto src = dipole_at_ratio(g, 0.4, 0.5);
  CHECK_THROWS_AS(rate_fit(g, src, 0.1, geometric_deltas(1e-2, 1e-6, 5)), DomainError);
  CHECK_THROWS_AS(rate_fit(g, src, 0.1, geometric_deltas(1e-2, 1e-4, 8)), DomainError);
  CHECK_THROWS_AS(rate_fit(g, src, 0.1, {1e-2, 1e-3, 1e-3, 1e-4, 1e-5, 1e-6}), DomainError);
  CHECK_THROWS_AS(rate_fit(g, src, 0.1, {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, -1.0}), DomainError);
  CHECK_THROWS_AS(geometric_deltas(1e-6, 1e-2, 4), DomainError);
  const auto d = geometric_deltas(1e-2, 1e-6, 5);
  CHECK(d.front() == 1e-2);
  CHECK(rel(d.back(), 1e-6) < 1e-14);
  CHECK(rel(d[1], 1e-3) < 1e-14);
}

TEST_CASE("classify") {
  const Multipliers m(geom());
  const double b = m.bound();
  CHECK(classify(m, b / 2) == Regime::interior);
  CHECK(classify(m, -b) == Regime::endpoint);
  CHECK(classify(m, 0.0) == Regime::zero);
  CHECK(classify(m, 1.01 * b) == Regime::outside);
  CHECK(to_string(Regime::endpoint) == "endpoint");
}
