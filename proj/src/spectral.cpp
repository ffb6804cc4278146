#include "npdisks/spectral.hpp"

#include <fftw3.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <istream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

#include "npdisks/config.hpp"
#include "npdisks/errors.hpp"

namespace npdisks {

namespace {

constexpr double pi = std::numbers::pi;
const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * pi);

// FFTW planning is not thread safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void require_same(const SpectralGrid& a, const SpectralGrid& b, const char* what) {
  if (a != b) throw GridMismatchError(std::string(what) + ": grids differ");
}

void require_size(const std::vector<complex>& v, int n, const char* what) {
  if (static_cast<int>(v.size()) != n) throw GridMismatchError(std::string(what) + ": sample count differs from grid size");
}

}  // namespace

SpectralGrid SpectralGrid::make(double half_width, int size) {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) throw ConfigError("grid half width L must be positive");
  if (size < 8 || size % 2 != 0) throw ConfigError("grid size N must be even and at least 8");
  return SpectralGrid(half_width, size);
}

double SpectralGrid::ds() const { return pi / L_; }

BoundaryDensity BoundaryDensity::zeros(const SpectralGrid& grid) {
  return {grid, std::vector<complex>(grid.size()), std::vector<complex>(grid.size())};
}

SpectralPair SpectralPair::zeros(const SpectralGrid& grid) {
  return {grid, std::vector<complex>(grid.size()), std::vector<complex>(grid.size())};
}

// ---------------------------------------------------------------- Fourier

struct Fourier::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  std::vector<complex> pre;   // (-1)^n e^{-i pi n / N}
  std::vector<complex> post;  // e^{i s_k L} dxi / sqrt(2 pi)

  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

Fourier::Fourier(const SpectralGrid& grid) : grid_(grid) {
  const int n = grid.size();
  auto plans = std::make_shared<Plans>();
  std::vector<complex> a(n), b(n);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto* pa = reinterpret_cast<fftw_complex*>(a.data());
    auto* pb = reinterpret_cast<fftw_complex*>(b.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    plans->fwd = fftw_plan_dft_1d(n, pa, pb, FFTW_FORWARD, flags);
    plans->bwd = fftw_plan_dft_1d(n, pa, pb, FFTW_BACKWARD, flags);
  }
  plans->pre.resize(n);
  plans->post.resize(n);
  const double L = grid.half_width();
  for (int i = 0; i < n; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    plans->pre[i] = sign * std::polar(1.0, -pi * i / n);
    plans->post[i] = std::polar(1.0, grid.s(i) * L);
  }
  plans_ = std::move(plans);
}

std::vector<complex> Fourier::forward(const std::vector<complex>& g) const {
  const int n = grid_.size();
  require_size(g, n, "Fourier::forward");
  std::vector<complex> in(n), out(n);
  for (int i = 0; i < n; ++i) in[i] = g[i] * plans_->pre[i];
  fftw_execute_dft(plans_->fwd, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  const double c = grid_.dxi() * inv_sqrt_2pi;
  for (int k = 0; k < n; ++k) out[k] *= c * plans_->post[k];
  return out;
}

std::vector<complex> Fourier::inverse(const std::vector<complex>& F) const {
  const int n = grid_.size();
  require_size(F, n, "Fourier::inverse");
  std::vector<complex> in(n), out(n);
  for (int k = 0; k < n; ++k) in[k] = F[k] * std::conj(plans_->post[k]);
  fftw_execute_dft(plans_->bwd, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  const double c = grid_.ds() * inv_sqrt_2pi;
  for (int i = 0; i < n; ++i) out[i] *= c * std::conj(plans_->pre[i]);
  return out;
}

complex Fourier::forward_at(const std::vector<complex>& g, double s) const {
  const int n = grid_.size();
  require_size(g, n, "Fourier::forward_at");
  // e^{-i s xi_n} by recurrence, re-anchored periodically to bound drift.
  const complex step = std::polar(1.0, -s * grid_.dxi());
  complex acc = 0.0;
  complex w;
  for (int i = 0; i < n; ++i) {
    if (i % 64 == 0) w = std::polar(1.0, -s * grid_.xi(i));
    acc += g[i] * w;
    w *= step;
  }
  return acc * grid_.dxi() * inv_sqrt_2pi;
}

complex Fourier::inverse_at(const std::vector<complex>& F, double xi) const {
  const int n = grid_.size();
  require_size(F, n, "Fourier::inverse_at");
  const complex step = std::polar(1.0, xi * grid_.ds());
  complex acc = 0.0;
  complex w;
  for (int k = 0; k < n; ++k) {
    if (k % 64 == 0) w = std::polar(1.0, xi * grid_.s(k));
    acc += F[k] * w;
    w *= step;
  }
  return acc * grid_.ds() * inv_sqrt_2pi;
}

// -------------------------------------------------------------- Transform

Transform::Transform(const Geometry& g, const SpectralGrid& grid)
    : geometry_(g), fourier_(grid), multipliers_(g.theta0()), scale_(grid.size()) {
  for (int n = 0; n < grid.size(); ++n) scale_[n] = scale_factor(g, grid.xi(n), g.theta0());
}

BoundaryDensity Transform::sample(const std::function<complex(PlanePoint, Arc)>& f) const {
  auto phi = BoundaryDensity::zeros(grid());
  for (Arc arc : {Arc::plus, Arc::minus}) {
    for (int n = 0; n < grid().size(); ++n) {
      phi.on(arc)[n] = f(boundary_point(geometry_, grid().xi(n), arc), arc);
    }
  }
  return phi;
}

complex Transform::integral(const BoundaryDensity& phi) const {
  require_same(phi.grid, grid(), "Transform::integral");
  complex acc = 0.0;
  for (int n = 0; n < grid().size(); ++n) acc += (phi.plus[n] + phi.minus[n]) / scale_[n];
  return acc * grid().dxi();
}

BoundaryDensity Transform::project_mean_zero(const BoundaryDensity& phi) const {
  // The trapezoid weights dxi/h sum to the perimeter only up to truncation,
  // so the mean is taken with respect to the discrete weights.
  double total = 0.0;
  for (int n = 0; n < grid().size(); ++n) total += 2.0 / scale_[n];
  total *= grid().dxi();
  const complex mean = integral(phi) / total;
  BoundaryDensity out = phi;
  for (int n = 0; n < grid().size(); ++n) {
    out.plus[n] -= mean;
    out.minus[n] -= mean;
  }
  return out;
}

double Transform::truncation_tail(const BoundaryDensity& phi) const {
  require_same(phi.grid, grid(), "Transform::truncation_tail");
  const int last = grid().size() - 1;
  double m = 0.0;
  for (int n : {0, last}) {
    m = std::max({m, std::abs(phi.plus[n]) / scale_[n], std::abs(phi.minus[n]) / scale_[n]});
  }
  return m;
}

SpectralPair Transform::forward(const BoundaryDensity& phi) const {
  require_same(phi.grid, grid(), "Transform::forward");
  const int n = grid().size();
  require_size(phi.plus, n, "Transform::forward");
  require_size(phi.minus, n, "Transform::forward");
  std::vector<complex> gp(n), gm(n);
  for (int i = 0; i < n; ++i) {
    gp[i] = phi.plus[i] / scale_[i];
    gm[i] = phi.minus[i] / scale_[i];
  }
  const auto Fp = fourier_.forward(gp);
  const auto Fm = fourier_.forward(gm);
  auto f = SpectralPair::zeros(grid());
  for (int k = 0; k < n; ++k) {
    f.f1[k] = Fp[k] - Fm[k];
    f.f2[k] = Fp[k] + Fm[k];
  }
  return f;
}

BoundaryDensity Transform::inverse(const SpectralPair& f) const {
  require_same(f.grid, grid(), "Transform::inverse");
  const int n = grid().size();
  require_size(f.f1, n, "Transform::inverse");
  require_size(f.f2, n, "Transform::inverse");
  std::vector<complex> Fp(n), Fm(n);
  for (int k = 0; k < n; ++k) {
    Fp[k] = 0.5 * (f.f1[k] + f.f2[k]);
    Fm[k] = 0.5 * (f.f2[k] - f.f1[k]);
  }
  const auto gp = fourier_.inverse(Fp);
  const auto gm = fourier_.inverse(Fm);
  auto phi = BoundaryDensity::zeros(grid());
  for (int i = 0; i < n; ++i) {
    phi.plus[i] = gp[i] * scale_[i];
    phi.minus[i] = gm[i] * scale_[i];
  }
  return phi;
}

// ---------------------------------------------------------- interpolation

SpectralInterpolant::SpectralInterpolant(const Fourier& fourier, const SpectralPair& f)
    : fourier_(&fourier) {
  require_same(f.grid, fourier.grid(), "SpectralInterpolant");
  g1_ = fourier.inverse(f.f1);
  g2_ = fourier.inverse(f.f2);
}

complex SpectralInterpolant::operator()(int j, double s) const {
  return fourier_->forward_at(j == 1 ? g1_ : g2_, s);
}

// -------------------------------------------------------------- multipliers

complex wstar_inner(const Multipliers& m, const SpectralPair& f, const SpectralPair& g) {
  require_same(f.grid, g.grid, "wstar_inner");
  complex acc = 0.0;
  for (int k = 0; k < f.grid.size(); ++k) {
    const double s = f.grid.s(k);
    acc += m.p1(s) * f.f1[k] * std::conj(g.f1[k]) + m.p2(s) * f.f2[k] * std::conj(g.f2[k]);
  }
  return 0.5 * f.grid.ds() * acc;
}

double wstar_norm_sq(const Multipliers& m, const SpectralPair& f) { return wstar_inner(m, f, f).real(); }

SpectralPair apply_K_multiplier(const Multipliers& m, const SpectralPair& f) {
  SpectralPair out = f;
  for (int k = 0; k < f.grid.size(); ++k) {
    const double e = m.eta(f.grid.s(k));
    out.f1[k] *= e;
    out.f2[k] *= -e;
  }
  return out;
}

SpectralPair apply_S_multiplier(const Multipliers& m, const SpectralPair& f) {
  SpectralPair out = f;
  for (int k = 0; k < f.grid.size(); ++k) {
    const double s = f.grid.s(k);
    out.f1[k] *= -m.p1(s);
    out.f2[k] *= -m.p2(s);
  }
  return out;
}

SpectralPair resolution_projector(const Multipliers& m, double t, const SpectralPair& f) {
  const double b = m.bound();
  if (!(std::abs(t) <= b)) throw DomainError("resolution_projector: |t| must not exceed b");
  SpectralPair out = f;
  if (t > 0.0) {
    const double cut = m.eta_inverse(t);
    for (int k = 0; k < f.grid.size(); ++k) {
      if (std::abs(f.grid.s(k)) < cut) out.f1[k] = 0.0;
    }
  } else {
    std::fill(out.f1.begin(), out.f1.end(), complex(0.0));
    if (t < 0.0) {
      const double cut = m.eta_inverse(-t);
      for (int k = 0; k < f.grid.size(); ++k) {
        if (std::abs(f.grid.s(k)) > cut) out.f2[k] = 0.0;
      }
    }
  }
  return out;
}

double spectral_density(const Multipliers& m, const SpectralInterpolant& f, double t) {
  const double b = m.bound();
  if (t == 0.0 || !(std::abs(t) <= b)) throw DomainError("spectral_density: t must lie in [-b, b] without 0");
  if (std::abs(t) == b) throw SingularityError("spectral_density: the density is singular at t = +-b");
  const int j = t > 0.0 ? 1 : 2;
  const double s = m.eta_inverse(std::abs(t));
  const double a = std::abs(f(j, s));
  const double c = std::abs(f(j, -s));
  return m.p(j, s) / (2.0 * std::abs(m.eta_prime(s))) * (a * a + c * c);
}

double integrate_measure(const Multipliers& m, const SpectralInterpolant& f,
                         const std::function<double(double)>& weight, double rel_tol) {
  using boost::math::quadrature::gauss_kronrod;
  const double b = m.bound();
  double total = 0.0;
  for (int j : {1, 2}) {
    const double sign = j == 1 ? 1.0 : -1.0;
    // t = sign (b - u^2), dt = 2u du; mu'(t) 2u stays bounded as u -> 0.
    auto integrand = [&](double u) {
      const double s = m.eta_inverse_gap(u * u);
      const double a = std::abs(f(j, s));
      const double c = std::abs(f(j, -s));
      const double dens = m.p(j, s) / (2.0 * std::abs(m.eta_prime(s))) * (a * a + c * c);
      return weight(sign * (b - u * u)) * dens * 2.0 * u;
    };
    double err = 0.0;
    const double root_b = std::sqrt(b);
    total += gauss_kronrod<double, 61>::integrate(integrand, 0.0, root_b * (1.0 - 1e-15), 15, rel_tol, &err);
  }
  return total;
}

namespace {

// Integral of mu_f' over the part of [t_lo, t_hi] on one side of 0.
double measure_between(const Multipliers& m, const SpectralInterpolant& f, double t_lo, double t_hi) {
  using boost::math::quadrature::gauss_kronrod;
  const double b = m.bound();
  if (t_hi <= t_lo) return 0.0;
  const int j = t_lo >= 0.0 ? 1 : 2;
  // u = sqrt(b - |t|) ranges over [u_a, u_b].
  double u_a = std::sqrt(std::max(0.0, b - std::max(std::abs(t_lo), std::abs(t_hi))));
  double u_b = std::sqrt(std::max(0.0, b - std::min(std::abs(t_lo), std::abs(t_hi))));
  u_b = std::min(u_b, std::sqrt(b) * (1.0 - 1e-15));
  auto integrand = [&](double u) {
    const double s = m.eta_inverse_gap(u * u);
    const double a = std::abs(f(j, s));
    const double c = std::abs(f(j, -s));
    return m.p(j, s) / (2.0 * std::abs(m.eta_prime(s))) * (a * a + c * c) * 2.0 * u;
  };
  return gauss_kronrod<double, 31>::integrate(integrand, u_a, u_b, 10, 1e-10);
}

}  // namespace

ContinuityReport resolution_continuity(const Multipliers& m, const Fourier& fourier, const SpectralPair& f,
                                       int points) {
  if (points < 3) throw DomainError("resolution_continuity: need at least 3 points");
  const double b = m.bound();
  const SpectralInterpolant interp(fourier, f);
  ContinuityReport rep;
  rep.points = points;
  for (int k = 0; k < f.grid.size(); ++k) {
    const double s = f.grid.s(k);
    const double cell = 0.5 * f.grid.ds() *
                        std::max(m.p1(s) * std::norm(f.f1[k]), m.p2(s) * std::norm(f.f2[k]));
    rep.tolerance = std::max(rep.tolerance, 2.0 * cell);
  }
  auto level = [&](double t) { return wstar_inner(m, f, resolution_projector(m, t, f)).real(); };
  double t_prev = -b;
  double v_prev = level(t_prev);
  for (int i = 1; i < points; ++i) {
    const double t = i == points - 1 ? b : -b + 2.0 * b * i / (points - 1);
    const double v = level(t);
    double exact;
    if (t_prev < 0.0 && t > 0.0) {
      exact = measure_between(m, interp, t_prev, 0.0) + measure_between(m, interp, 0.0, t);
    } else {
      exact = measure_between(m, interp, t_prev, t);
    }
    rep.max_excess = std::max(rep.max_excess, std::abs((v - v_prev) - exact));
    t_prev = t;
    v_prev = v;
  }
  return rep;
}

// --------------------------------------------------------------------- CSV

namespace {

void write_rows(std::ostream& out, const char* header, const SpectralGrid& grid,
                const std::vector<complex>& a, const std::vector<complex>& b, bool s_grid) {
  out << header << '\n';
  for (int i = 0; i < grid.size(); ++i) {
    out << config::format_double(s_grid ? grid.s(i) : grid.xi(i)) << ',' << config::format_double(a[i].real())
        << ',' << config::format_double(a[i].imag()) << ',' << config::format_double(b[i].real()) << ','
        << config::format_double(b[i].imag()) << '\n';
  }
}

struct Rows {
  std::vector<double> x;
  std::vector<complex> a, b;
};

Rows read_rows(std::istream& in) {
  Rows r;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("csv: empty input");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    double v[5];
    for (double& x : v) {
      if (!std::getline(ss, cell, ',')) throw ConfigError("csv: expected 5 columns");
      x = std::stod(cell);
    }
    r.x.push_back(v[0]);
    r.a.emplace_back(v[1], v[2]);
    r.b.emplace_back(v[3], v[4]);
  }
  return r;
}

void check_grid(const SpectralGrid& grid, const std::vector<double>& x, bool s_grid) {
  for (int i = 0; i < grid.size(); ++i) {
    const double expect = s_grid ? grid.s(i) : grid.xi(i);
    if (std::abs(x[i] - expect) > 1e-12 * std::max(1.0, std::abs(expect))) {
      throw GridMismatchError("csv: rows are not a uniform grid");
    }
  }
}

}  // namespace

void write_csv(std::ostream& out, const BoundaryDensity& phi) {
  write_rows(out, "xi,plus_re,plus_im,minus_re,minus_im", phi.grid, phi.plus, phi.minus, false);
}

void write_csv(std::ostream& out, const SpectralPair& f) {
  write_rows(out, "s,f1_re,f1_im,f2_re,f2_im", f.grid, f.f1, f.f2, true);
}

BoundaryDensity read_density_csv(std::istream& in) {
  Rows r = read_rows(in);
  if (r.x.size() < 8) throw ConfigError("csv: too few rows");
  auto grid = SpectralGrid::make(-r.x.front(), static_cast<int>(r.x.size()));
  check_grid(grid, r.x, false);
  return {grid, std::move(r.a), std::move(r.b)};
}

SpectralPair read_pair_csv(std::istream& in) {
  Rows r = read_rows(in);
  if (r.x.size() < 8) throw ConfigError("csv: too few rows");
  const int n = static_cast<int>(r.x.size());
  auto grid = SpectralGrid::make(-(n - 1) * pi / (2.0 * r.x.front()), n);
  check_grid(grid, r.x, true);
  return {grid, std::move(r.a), std::move(r.b)};
}

}  // namespace npdisks
