#include "npdisks/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "npdisks/config.hpp"
#include "npdisks/field.hpp"

namespace npdisks {

namespace {

constexpr double pi = std::numbers::pi;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

double packet_pullback(const Packet& p, double xi, Arc arc) {
  const double x = (xi - p.center) / p.width;
  const double gauss = std::exp(-0.5 * x * x);
  // Mean of cos(k xi + p) against the Gaussian; subtracting it zeroes the arc integral.
  const double kw = p.wavenumber * p.width;
  const double mean = std::exp(-0.5 * kw * kw) * std::cos(p.wavenumber * p.center + p.phase);
  const double w = arc == Arc::plus ? p.weight_plus : p.weight_minus;
  return w * gauss * (std::cos(p.wavenumber * xi + p.phase) - mean);
}

complex interpolate(const Transform& T, const std::vector<complex>& phi, double xi) {
  std::vector<complex> pb(phi.size());
  for (std::size_t n = 0; n < phi.size(); ++n) pb[n] = phi[n] / T.scale()[n];
  return T.fourier().inverse_at(T.fourier().forward(pb), xi) * scale_factor(T.geometry(), xi, T.geometry().theta0());
}

double max_abs(const Eigen::VectorXcd& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace

std::string format_line(const CheckResult& r) {
  std::string s = r.id + (r.pass ? " PASS " : " FAIL ") + r.name + ": value=" + config::format_double(r.value) +
                  " threshold=" + config::format_double(r.threshold);
  if (!r.detail.empty()) s += " (" + r.detail + ")";
  return s;
}

SpectrumSweep spectrum_sweep(const Geometry& g, const std::vector<int>& meshes, double grading) {
  SpectrumSweep sw;
  sw.theta0 = g.theta0();
  sw.bound = Multipliers(g).bound();
  sw.meshes = meshes;
  for (int M : meshes) sw.eigenvalues.push_back(oracle_spectrum(NystromSystem::assemble(NystromMesh::build(g, M, grading))));
  return sw;
}

CheckResult check_spectral_bound(const std::vector<SpectrumSweep>& sweeps, double tol) {
  CheckResult r{"AC1", "spectral bound", 0.0, tol, true, ""};
  for (const auto& sw : sweeps) {
    const double b = sw.bound;
    const auto& fine = sw.eigenvalues.back();
    const double err = std::max(std::abs(fine.back() - b), std::abs(fine.front() + b)) / b;
    double margin = 0.0;
    if (sw.eigenvalues.size() > 1) {
      const auto& prev = sw.eigenvalues[sw.eigenvalues.size() - 2];
      margin = std::max(std::abs(fine.back() - prev.back()), std::abs(fine.front() - prev.front()));
    }
    const double over = std::max({0.0, fine.back() - b, -b - fine.front()});
    r.value = std::max(r.value, err);
    r.pass = r.pass && err < tol && over <= margin;
    r.detail += (r.detail.empty() ? "" : "; ") + std::string("theta0=") + fmt(sw.theta0) + " err=" + fmt(err) +
                " overshoot=" + fmt(over);
  }
  return r;
}

CheckResult check_gap_scaling(const SpectrumSweep& sw, double margin) {
  CheckResult r{"AC2", "eigenvalue gaps shrink like 1/M", 0.0, 1.0, true, ""};
  double first = 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < sw.meshes.size(); ++i) {
    const auto gs = gap_statistic(sw.eigenvalues[i], -sw.bound + margin, sw.bound - margin);
    const double scaled = gs.max_gap * sw.meshes[i];
    if (i == 0) first = scaled;
    worst = std::max(worst, scaled / first);
    r.detail += (i ? "; " : "") + std::string("M=") + std::to_string(sw.meshes[i]) + " max_gap=" + fmt(gs.max_gap);
  }
  r.value = worst;
  r.pass = worst <= 1.0;
  return r;
}

std::vector<Packet> random_packets(int count, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Packet> out;
  for (int i = 0; i < count; ++i) {
    Packet p;
    p.center = -1.0 + 2.0 * u(rng);
    p.width = 0.7 + 0.8 * u(rng);
    p.wavenumber = 2.0 * u(rng);
    p.phase = 2.0 * pi * u(rng);
    p.weight_plus = 0.5 + u(rng);
    p.weight_minus = -1.0 + 2.0 * u(rng);
    out.push_back(p);
  }
  return out;
}

BoundaryDensity packet_density(const Transform& T, const Packet& p) {
  auto phi = BoundaryDensity::zeros(T.grid());
  for (int n = 0; n < T.grid().size(); ++n) {
    const double xi = T.grid().xi(n);
    phi.plus[n] = T.scale()[n] * packet_pullback(p, xi, Arc::plus);
    phi.minus[n] = T.scale()[n] * packet_pullback(p, xi, Arc::minus);
  }
  return phi;
}

Eigen::VectorXcd packet_density(const NystromSystem& sys, const Packet& p) {
  const auto& mesh = sys.mesh();
  const auto& g = mesh.geometry();
  Eigen::VectorXcd v(mesh.size());
  for (int i = 0; i < mesh.size(); ++i) {
    const double xi = mesh.node(i).xi;
    v[i] = scale_factor(g, xi, g.theta0()) * packet_pullback(p, xi, mesh.arc_of(i));
  }
  return v;
}

CheckResult check_pipeline(const Transform& T, const NystromSystem& sys, const std::vector<Packet>& packets,
                           double tol, double xi_max) {
  CheckResult r{"AC3", "multiplier S and K* against the oracle", 0.0, tol, true, ""};
  const auto& mesh = sys.mesh();
  const double t0 = T.geometry().theta0();
  double es_max = 0.0, ek_max = 0.0;
  for (const auto& p : packets) {
    const auto phi = packet_density(T, p);
    const auto phin = packet_density(sys, p);
    const auto Sn = sys.apply_S(phin);
    const auto Kn = sys.apply_Kstar(phin);
    const auto u = solve_transmission(T, phi);
    const auto k = np_apply_boundary(T, phi);
    double es = 0.0, ek = 0.0, ns = 0.0, nk = 0.0;
    for (int i = 0; i < mesh.size(); ++i) {
      const double xi = mesh.node(i).xi;
      if (std::abs(xi) > xi_max) continue;
      const Arc arc = mesh.arc_of(i);
      es = std::max(es, std::abs(u.at(xi, arc_sign(arc) * t0) - Sn[i]));
      ek = std::max(ek, std::abs(interpolate(T, k.on(arc), xi) - Kn[i]));
      ns = std::max(ns, std::abs(Sn[i]));
      nk = std::max(nk, std::abs(Kn[i]));
    }
    es_max = std::max(es_max, es / ns);
    ek_max = std::max(ek_max, ek / nk);
  }
  r.value = std::max(es_max, ek_max);
  r.pass = r.value < tol;
  r.detail = "S=" + fmt(es_max) + " K*=" + fmt(ek_max) + " densities=" + std::to_string(packets.size());
  return r;
}

CheckResult check_unitarity(const Transform& T, const NystromSystem& sys, const std::vector<Packet>& packets,
                            double tol) {
  CheckResult r{"AC4", "unitarity of U", 0.0, tol, true, ""};
  const auto& m = T.multipliers();
  for (std::size_t i = 0; i + 1 < packets.size(); i += 2) {
    const complex oracle = sys.hstar_inner(packet_density(sys, packets[i]), packet_density(sys, packets[i + 1]));
    const complex w = wstar_inner(m, T.forward(packet_density(T, packets[i])), T.forward(packet_density(T, packets[i + 1])));
    r.value = std::max(r.value, std::abs(oracle - w) / std::abs(w));
  }
  r.pass = r.value < tol;
  r.detail = "pairs=" + std::to_string(packets.size() / 2);
  return r;
}

CheckResult check_calderon(const NystromSystem& sys, double tol) {
  CheckResult r{"AC5", "Calderon identity", calderon_residual(sys), tol, false, ""};
  r.pass = r.value < tol;
  r.detail = "M=" + std::to_string(sys.mesh().panels_per_arc());
  return r;
}

CheckResult check_interior_rate(const Geometry& g, const DipoleSource& src, const std::vector<double>& deltas,
                                double slope_tol, double limit_tol) {
  const double b = Multipliers(g).bound();
  const auto fit = rate_fit(g, src, b / 2, deltas);
  const double lim = std::abs(fit.limit_constant - fit.predicted_limit) / fit.predicted_limit;
  CheckResult r{"AC6", "interior rate at b/2", fit.slope, slope_tol, false, ""};
  r.value = std::abs(fit.slope + 1.0);
  r.pass = r.value <= slope_tol && lim < limit_tol;
  r.detail = "slope=" + fmt(fit.slope) + " limit=" + fmt(fit.limit_constant) + " predicted=" + fmt(fit.predicted_limit) +
             " rel=" + fmt(lim);
  return r;
}

CheckResult check_endpoint_rate(const Geometry& g, const DipoleSource& a, const DipoleSource& b,
                                const std::vector<double>& deltas, double slope_tol, double ratio_tol) {
  const double bound = Multipliers(g).bound();
  const auto fa = rate_fit(g, a, bound, deltas);
  const auto fb = rate_fit(g, b, bound, deltas);
  const double ra = fa.limit_constant / g_j(g, a, 0.0, 1);
  const double rb = fb.limit_constant / g_j(g, b, 0.0, 1);
  const double ratio = std::abs(ra / rb - 1.0);
  CheckResult r{"AC7", "endpoint rate at b", 0.0, slope_tol, false, ""};
  r.value = std::max(std::abs(fa.slope + 1.5), std::abs(fb.slope + 1.5));
  const bool finite = std::isfinite(ra) && std::isfinite(rb) && ra > 0.0 && rb > 0.0;
  r.pass = r.value <= slope_tol && ratio < ratio_tol && finite;
  r.detail = "slopes=" + fmt(fa.slope) + "," + fmt(fb.slope) + " C/g1(b)=" + fmt(ra) + "," + fmt(rb) +
             " ratio_dev=" + fmt(ratio);
  return r;
}

CheckResult check_zero_rate(const Geometry& g, const std::vector<DipoleSource>& sources,
                            const std::vector<double>& deltas, double slope_tol) {
  CheckResult r{"AC8", "log-corrected rate at 0", 0.0, slope_tol, true, ""};
  for (const auto& src : sources) {
    const auto fit = rate_fit(g, src, 0.0, deltas);
    const double dev = std::abs(fit.log_corrected_slope + fit.exponent);
    r.value = std::max(r.value, dev);
    r.detail += (r.detail.empty() ? "" : "; ") + std::string("ratio=") + fmt(fit.exponent - 1.0) +
                " slope=" + fmt(fit.log_corrected_slope) + " target=" + fmt(-fit.exponent);
  }
  r.pass = r.value <= slope_tol;
  return r;
}

CheckResult check_never_order(const Geometry& g, const std::vector<RateRun>& runs, const std::vector<double>& deltas,
                              double fraction) {
  CheckResult r{"AC9", "delta ||phi_delta|| tends to zero", 0.0, fraction, true, ""};
  for (const auto& run : runs) {
    const auto seq = never_order_check(g, run.source, run.lambda0, deltas);
    bool mono = true;
    for (std::size_t i = 1; i < seq.size(); ++i) mono = mono && seq[i] < seq[i - 1];
    const double drop = seq.back() / seq.front();
    r.value = std::max(r.value, drop);
    r.pass = r.pass && mono && drop < fraction;
    r.detail += (r.detail.empty() ? "" : "; ") + std::string("lambda0=") + fmt(run.lambda0) + " ratio=" +
                fmt(std::abs(psi(g, run.source.z).theta) / g.theta0()) + " drop=" + fmt(drop) +
                (mono ? "" : " non-monotone");
  }
  return r;
}

CheckResult check_eigenrelation(const Transform& T, const BoundaryDensity& phi, const std::vector<double>& freqs,
                                double tol) {
  CheckResult r{"AC10", "eigenrelation residual", 0.0, tol, true, ""};
  for (double s : freqs) {
    for (int j : {1, 2}) r.value = std::max(r.value, eigenrelation_check(T, {s, j}, phi).residual);
  }
  r.pass = r.value < tol;
  r.detail = "frequencies=" + std::to_string(freqs.size()) + " j=1,2";
  return r;
}

CheckResult check_resolution(const Transform& T, const SpectralPair& f, int points, double tol) {
  const auto& m = T.multipliers();
  const SpectralInterpolant I(T.fourier(), f);
  const double total = integrate_measure(m, I, [](double) { return 1.0; });
  const double norm = wstar_norm_sq(m, f);
  const auto cont = resolution_continuity(m, T.fourier(), f, points);
  CheckResult r{"AC11", "resolution of the identity", std::abs(total / norm - 1.0), tol, false, ""};
  r.pass = r.value < tol && cont.max_excess < cont.tolerance;
  r.detail = "continuity excess=" + fmt(cont.max_excess) + " grid tolerance=" + fmt(cont.tolerance) +
             " points=" + std::to_string(cont.points);
  return r;
}

CheckResult check_geometry_round_trip(const Geometry& g, double tol) {
  CheckResult r{"geometry", "bipolar round trip", 0.0, tol, false, ""};
  const double t0 = g.theta0();
  int count = 0;
  for (double xi = -4.0; xi <= 4.0; xi += 0.5) {
    for (double th : {0.3 * t0, -0.8 * t0, 0.5 * (t0 + pi), -0.9 * pi, t0, -t0}) {
      if (xi == 0.0 && std::abs(th) < t0) continue;
      const PlanePoint z = phi(g, {xi, th});
      const BipolarCoord back = psi(g, z);
      const PlanePoint z2 = phi(g, back);
      const double scale = std::max(1.0, norm(z));
      r.value = std::max({r.value, std::abs(back.xi - xi), std::abs(back.theta - th), norm(z2 - z) / scale});
      ++count;
    }
  }
  r.pass = r.value < tol;
  r.detail = "points=" + std::to_string(count);
  return r;
}

CheckResult check_transform_round_trip(const Transform& T, const BoundaryDensity& phi, double tol) {
  const auto back = T.inverse(T.forward(phi));
  double pulled = 0.0, bulk = 0.0;
  for (int n = 0; n < T.grid().size(); ++n) {
    for (Arc arc : {Arc::plus, Arc::minus}) {
      const double e = std::abs(back.on(arc)[n] - phi.on(arc)[n]);
      pulled = std::max(pulled, e / T.scale()[n]);
      if (std::abs(T.grid().xi(n)) <= 10.0) bulk = std::max(bulk, e);
    }
  }
  CheckResult r{"transform", "U round trip", bulk, tol, bulk < tol && pulled < tol, ""};
  r.detail = "pullback=" + fmt(pulled);
  return r;
}

CheckResult check_jump(const NystromSystem& sys, const Eigen::VectorXcd& phi, double tol) {
  const auto rep = jump_check(sys, phi, 1e-4);
  CheckResult r{"jump", "single layer jump relation", std::max(rep.exterior, rep.interior), tol, false, ""};
  r.pass = r.value < tol;
  r.detail = "nodes=" + std::to_string(rep.nodes) + " scale=" + fmt(max_abs(phi));
  return r;
}

}  // namespace npdisks
