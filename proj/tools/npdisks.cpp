// npdisks command line driver.
//
//   npdisks spectrum  [--config F] [--out DIR] [--format csv|json] ...
//   npdisks resonance ...
//   npdisks validate  ...
//   npdisks field     ...
//
// Exit status: 0 pass, 1 check failure or numerical error, 2 usage or config error.

#include <omp.h>

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "npdisks/config.hpp"
#include "npdisks/errors.hpp"
#include "npdisks/field.hpp"
#include "npdisks/resonance.hpp"
#include "npdisks/validation.hpp"

using namespace npdisks;
using json = nlohmann::ordered_json;

namespace {

constexpr double theta_floor = 0.05;

// Thrown for check failures; maps to exit status 1.
struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Resolved configuration: every lookup records the value actually used so
// that outputs can echo it.
class Settings {
 public:
  explicit Settings(config::KeyValues kv) : kv_(std::move(kv)) {}

  double num(const std::string& key, double fallback) {
    const double v = config::get_double(kv_, key, fallback);
    used_[key] = config::format_double(v);
    typed_[key] = v;
    return v;
  }
  long integer(const std::string& key, long fallback) {
    const long v = config::get_int(kv_, key, fallback);
    used_[key] = std::to_string(v);
    typed_[key] = v;
    return v;
  }
  std::vector<double> list(const std::string& key, const std::vector<double>& fallback) {
    const auto v = config::get_double_list(kv_, key, fallback);
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + config::format_double(v[i]);
    used_[key] = s;
    typed_[key] = v;
    return v;
  }
  bool has(const std::string& key) const { return kv_.count(key) > 0; }
  void note(const std::string& key, const std::string& value) { used_[key] = typed_[key] = value; }
  const std::map<std::string, std::string>& used() const { return used_; }
  const std::map<std::string, json>& typed() const { return typed_; }

 private:
  config::KeyValues kv_;
  std::map<std::string, std::string> used_;
  std::map<std::string, json> typed_;
};

struct Options {
  std::string command;
  std::string config_path;
  std::string out_dir = ".";
  std::string format = "csv";
  std::optional<double> theta0, radius;
  int threads = 0;
};

const std::set<std::string> common_keys{"radius", "theta0"};
const std::set<std::string> dipole_keys{"dipole_xi", "dipole_ratio", "dipole_x", "dipole_y", "pol_x", "pol_y"};
const std::set<std::string> lambda_keys{"lambda0", "lambda0_over_b", "eps_c"};

std::set<std::string> allowed_keys(const std::string& cmd) {
  std::set<std::string> k = common_keys;
  auto add = [&](const std::set<std::string>& s) { k.insert(s.begin(), s.end()); };
  if (cmd == "spectrum") add({"s_max", "s_points", "meshes", "beta"});
  if (cmd == "resonance") {
    add(dipole_keys);
    add(lambda_keys);
    add({"delta_max", "delta_min", "delta_count", "deltas", "slope_tol"});
  }
  if (cmd == "validate") add({"L", "N", "M", "beta", "seed", "calderon_tol"});
  if (cmd == "field") {
    add(dipole_keys);
    add(lambda_keys);
    add({"L", "N", "delta", "x_min", "x_max", "nx", "y_min", "y_max", "ny", "guard"});
  }
  return k;
}

// Shortest round-trip form, for messages.
std::string short_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

Geometry make_geometry(Settings& s) {
  const double radius = s.num("radius", 1.0);
  const double theta0 = s.num("theta0", std::numbers::pi / 4);
  if (theta0 > 0.0 && theta0 < theta_floor) {
    throw ConfigError("theta0 = " + short_double(theta0) + " is below the floor " + short_double(theta_floor) +
                      ": near tangency (touching-disk limit) the NP operator is not well defined on the energy space");
  }
  try {
    return Geometry::make(radius, theta0);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

SpectralGrid make_grid(Settings& s) {
  return SpectralGrid::make(s.num("L", 30.0), static_cast<int>(s.integer("N", 4096)));
}

DipoleSource make_dipole(Settings& s, const Geometry& g) {
  try {
    if (s.has("dipole_x") || s.has("dipole_y")) {
      const PlanePoint z{s.num("dipole_x", 0.0), s.num("dipole_y", 0.0)};
      const PlanePoint a{s.num("pol_x", 1.0), s.num("pol_y", 0.0)};
      return DipoleSource::make(g, z, a);
    }
    return dipole_at_ratio(g, s.num("dipole_xi", 0.4), s.num("dipole_ratio", 0.5));
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

// Real part of lambda together with the optional dielectric constant.
struct LambdaChoice {
  double lambda0;
  std::optional<double> eps_c;
};

LambdaChoice make_lambda(Settings& s, const Geometry& g) {
  const int given = s.has("lambda0") + s.has("lambda0_over_b") + s.has("eps_c");
  if (given > 1) throw ConfigError("give at most one of lambda0, lambda0_over_b, eps_c");
  if (s.has("eps_c")) {
    const double e = s.num("eps_c", 0.0);
    if (e == 1.0) throw ConfigError("eps_c = 1 makes lambda infinite");
    return {lambda_from_permittivity(e, 0.0).real(), e};
  }
  if (s.has("lambda0")) return {s.num("lambda0", 0.0), std::nullopt};
  return {s.num("lambda0_over_b", 0.5) * Multipliers(g).bound(), std::nullopt};
}

std::vector<double> make_deltas(Settings& s) {
  std::vector<double> d;
  if (s.has("deltas")) {
    d = s.list("deltas", {});
  } else {
    const double hi = s.num("delta_max", 1e-2), lo = s.num("delta_min", 1e-6);
    const long n = s.integer("delta_count", 12);
    if (!(hi > lo && lo > 0.0) || n < 2) throw ConfigError("delta sweep needs delta_max > delta_min > 0 and delta_count >= 2");
    d = geometric_deltas(hi, lo, static_cast<int>(n));
  }
  try {
    ResonanceQuery{{}, 0.0, d, std::nullopt}.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (d.size() < 6 || d.front() / d.back() < 1e3 * (1.0 - 1e-12)) {
    throw ConfigError("delta sweep needs at least 6 values spanning 3 decades");
  }
  return d;
}

// ------------------------------------------------------------------ output

class Output {
 public:
  Output(const Options& o, const Settings& s) : dir_(o.out_dir), format_(o.format), settings_(s) {
    std::filesystem::create_directories(dir_);
  }
  bool json_format() const { return format_ == "json"; }

  json config_json() const {
    json c = json::object();
    for (const auto& [k, v] : settings_.typed()) c[k] = v;
    return c;
  }

  void csv(const std::string& name, const std::string& header, const std::vector<std::vector<double>>& rows,
           const std::vector<std::pair<std::string, std::string>>& extra = {}) const {
    std::ofstream f(path(name + ".csv"));
    for (const auto& [k, v] : settings_.used()) f << "# " << k << " = " << v << '\n';
    for (const auto& [k, v] : extra) f << "# " << k << " = " << v << '\n';
    f << header << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << config::format_double(row[i]);
      f << '\n';
    }
  }

  void write_json(const std::string& name, json body) const {
    json doc;
    doc["config"] = config_json();
    for (auto& [k, v] : body.items()) doc[k] = v;
    std::ofstream f(path(name + ".json"));
    f << doc.dump(2) << '\n';
  }

 private:
  std::string path(const std::string& file) const { return (std::filesystem::path(dir_) / file).string(); }
  std::string dir_, format_;
  const Settings& settings_;
};

json result_json(const CheckResult& r) {
  return {{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"value", r.value}, {"threshold", r.threshold},
          {"detail", r.detail}};
}

// --------------------------------------------------------------- commands

int cmd_spectrum(Settings& s, const Options& o) {
  const Geometry g = make_geometry(s);
  const Multipliers m(g);
  const double s_max = s.num("s_max", 10.0);
  const long points = s.integer("s_points", 201);
  const auto meshes = s.list("meshes", {64});
  const double beta = s.num("beta", 3.0);
  if (!(s_max > 0.0) || points < 2) throw ConfigError("s_max must be positive and s_points at least 2");
  for (double M : meshes) {
    if (M < 2 || M != std::floor(M)) throw ConfigError("meshes must be integers >= 2");
  }
  Output out(o, s);

  std::vector<std::vector<double>> eta_rows;
  for (long i = 0; i < points; ++i) {
    const double x = s_max * static_cast<double>(i) / static_cast<double>(points - 1);
    eta_rows.push_back({x, m.eta(x)});
  }
  std::vector<std::vector<double>> eig_rows;
  json eig = json::object();
  json summary = json::array();
  for (double M : meshes) {
    const auto ev = oracle_spectrum(NystromSystem::assemble(NystromMesh::build(g, static_cast<int>(M), beta)));
    for (std::size_t i = 0; i < ev.size(); ++i) eig_rows.push_back({M, static_cast<double>(i), ev[i]});
    eig[std::to_string(static_cast<int>(M))] = ev;
    summary.push_back({{"M", static_cast<int>(M)}, {"min", ev.front()}, {"max", ev.back()},
                       {"rel_err", std::max(std::abs(ev.back() - m.bound()), std::abs(ev.front() + m.bound())) / m.bound()}});
  }
  const std::vector<std::pair<std::string, std::string>> b_line{{"b", config::format_double(m.bound())}};
  if (out.json_format()) {
    json eta{{"s", json::array()}, {"eta", json::array()}};
    for (const auto& r : eta_rows) {
      eta["s"].push_back(r[0]);
      eta["eta"].push_back(r[1]);
    }
    out.write_json("spectrum", {{"b", m.bound()}, {"eta", eta}, {"eigenvalues", eig}, {"extremes", summary}});
  } else {
    out.csv("spectrum_eta", "s,eta", eta_rows, b_line);
    out.csv("spectrum_eigenvalues", "M,index,eigenvalue", eig_rows, b_line);
  }
  return 0;
}

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

int cmd_resonance(Settings& s, const Options& o) {
  const Geometry g = make_geometry(s);
  const Multipliers m(g);
  const DipoleSource src = make_dipole(s, g);
  const LambdaChoice lam = make_lambda(s, g);
  const auto deltas = make_deltas(s);
  const double tol = s.num("slope_tol", 0.05);
  const auto check = check_source(g, src);
  Output out(o, s);

  const Regime regime = classify(m, lam.lambda0);
  const double ratio = std::abs(check.psi2) / g.theta0();
  std::vector<double> norms, local;
  json summary;
  summary["regime"] = to_string(regime);
  summary["lambda0"] = lam.lambda0;
  summary["psi2_ratio"] = ratio;
  double measured, expected;
  if (!lam.eps_c) {
    const auto fit = rate_fit(g, src, lam.lambda0, deltas);
    norms = fit.norms;
    local = fit.local_slopes;
    summary["slope"] = fit.slope;
    summary["log_corrected_slope"] = fit.log_corrected_slope;
    summary["exponent"] = fit.exponent;
    summary["limit_constant"] = fit.limit_constant;
    if (std::isfinite(fit.predicted_limit)) summary["predicted_limit"] = fit.predicted_limit;
    measured = regime == Regime::zero ? fit.log_corrected_slope : fit.slope;
    expected = -fit.exponent;
  } else {
    const ResonanceQuery q{src, lam.lambda0, deltas, lam.eps_c};
    std::vector<double> lx, ly;
    for (double d : deltas) {
      norms.push_back(phi_norm_sq(g, src, q.lambda(d)).value);
      lx.push_back(std::log(d));
      ly.push_back(std::log(norms.back()));
    }
    local.push_back(std::nan(""));
    for (std::size_t i = 1; i < deltas.size(); ++i) local.push_back((ly[i] - ly[i - 1]) / (lx[i] - lx[i - 1]));
    measured = lsq_slope(lx, ly);
    summary["slope"] = measured;
    expected = regime == Regime::outside ? 0.0 : std::nan("");
  }
  const auto dphi = never_order_check(g, src, lam.lambda0, deltas);
  const bool pass = std::isfinite(expected) ? std::abs(measured - expected) <= tol : true;
  summary["expected_slope"] = std::isfinite(expected) ? json(expected) : json(nullptr);
  summary["slope_tol"] = tol;
  summary["pass"] = pass;
  summary["delta_norm_drop"] = dphi.back() / dphi.front();

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < deltas.size(); ++i) rows.push_back({deltas[i], norms[i], deltas[i] * norms[i], local[i]});
  if (out.json_format()) {
    json sweep = json::array();
    for (const auto& r : rows)
      sweep.push_back({{"delta", r[0]}, {"norm_sq", r[1]}, {"delta_norm_sq", r[2]},
                       {"local_slope", std::isfinite(r[3]) ? json(r[3]) : json(nullptr)}});
    out.write_json("resonance", {{"summary", summary}, {"sweep", sweep}});
  } else {
    out.csv("resonance", "delta,norm_sq,delta_norm_sq,local_slope", rows);
    out.write_json("resonance_summary", {{"summary", summary}});
  }
  if (!pass) throw CheckFailure("fitted slope " + config::format_double(measured) + " misses expected " +
                                config::format_double(expected));
  return 0;
}

int cmd_validate(Settings& s, const Options& o) {
  const Geometry g = make_geometry(s);
  const SpectralGrid grid = make_grid(s);
  const long M = s.integer("M", 64);
  const double beta = s.num("beta", 3.0);
  const long seed = s.integer("seed", 1);
  const double calderon_tol = s.num("calderon_tol", 5e-3);
  if (M < 2) throw ConfigError("M must be at least 2");
  Output out(o, s);

  const Transform T(g, grid);
  const auto sys = NystromSystem::assemble(NystromMesh::build(g, static_cast<int>(M), beta));
  const auto packets = random_packets(10, static_cast<unsigned>(seed));
  const auto q = dipole_normal_derivative(T, dipole_at_ratio(g, 0.4, 0.5));

  std::vector<CheckResult> results;
  results.push_back(check_geometry_round_trip(g));
  results.push_back(check_transform_round_trip(T, packet_density(T, packets[0])));
  results.push_back(check_pipeline(T, sys, {packets.begin(), packets.begin() + 5}));
  results.push_back(check_unitarity(T, sys, packets));
  results.push_back(check_calderon(sys, calderon_tol));
  results.push_back(check_jump(sys, packet_density(sys, packets[1])));
  results.push_back(check_eigenrelation(T, q, {0.5, 1.0, 3.0}));
  results.push_back(check_resolution(T, T.forward(packet_density(T, packets[2]))));
  const char* ids[] = {"geometry", "transform", "pipeline", "unitarity", "calderon", "jump", "eigenrelation", "resolution"};
  for (std::size_t i = 0; i < results.size(); ++i) results[i].id = ids[i];

  bool ok = true;
  std::vector<std::string> failed;
  for (const auto& r : results) {
    ok = ok && r.pass;
    if (!r.pass) failed.push_back(r.id);
    std::printf("%s\n", format_line(r).c_str());
  }
  if (out.json_format()) {
    json arr = json::array();
    for (const auto& r : results) arr.push_back(result_json(r));
    out.write_json("validate", {{"pass", ok}, {"checks", arr}});
  } else {
    std::ofstream f(std::filesystem::path(o.out_dir) / "validate.csv");
    for (const auto& [k, v] : s.used()) f << "# " << k << " = " << v << '\n';
    f << "check,pass,value,threshold,detail\n";
    for (const auto& r : results) {
      f << r.id << ',' << (r.pass ? 1 : 0) << ',' << config::format_double(r.value) << ','
        << config::format_double(r.threshold) << ",\"" << r.detail << "\"\n";
    }
  }
  if (!ok) {
    std::string list;
    for (const auto& id : failed) list += (list.empty() ? "" : ", ") + id;
    throw CheckFailure("failed checks: " + list);
  }
  return 0;
}

// Distance from z to the boundary of the union of the two disks.
double boundary_distance(const Geometry& g, PlanePoint z) {
  const double alpha = g.alpha();
  const double corner = std::min(norm(z - PlanePoint{alpha, 0.0}), norm(z - PlanePoint{-alpha, 0.0}));
  double d = corner;
  for (Arc arc : {Arc::plus, Arc::minus}) {
    const PlanePoint c = g.center(arc);
    const double r = norm(z - c);
    if (r == 0.0) {
      d = std::min(d, g.radius());
      continue;
    }
    const PlanePoint foot = c + (g.radius() / r) * (z - c);
    // The lower arc lies in y <= 0, the upper one in y >= 0.
    if (arc_sign(arc) * foot.x2 <= 0.0) d = std::min(d, std::abs(r - g.radius()));
  }
  return d;
}

int cmd_field(Settings& s, const Options& o) {
  const Geometry g = make_geometry(s);
  const SpectralGrid grid = make_grid(s);
  const DipoleSource src = make_dipole(s, g);
  const LambdaChoice lam = make_lambda(s, g);
  const double delta = s.num("delta", 1e-2);
  const double x_min = s.num("x_min", -2.0), x_max = s.num("x_max", 2.0);
  const double y_min = s.num("y_min", -2.0), y_max = s.num("y_max", 2.0);
  const long nx = s.integer("nx", 41), ny = s.integer("ny", 41);
  const double guard = s.num("guard", 0.05);
  if (nx < 0 || ny < 0) throw ConfigError("nx and ny must be non-negative");
  if (!(guard >= 0.0)) throw ConfigError("guard must be non-negative");
  if (delta < 0.0) throw ConfigError("delta must be non-negative");
  const double b = Multipliers(g).bound();
  if (delta == 0.0 && std::abs(lam.lambda0) <= b) {
    throw ConfigError("delta = 0 with lambda0 in [-b, b]: the resolvent is singular on the spectrum");
  }
  Output out(o, s);
  if (nx == 0 || ny == 0) {
    std::printf("empty grid: nothing to evaluate\n");
    return 0;
  }

  const ResonanceQuery q{src, lam.lambda0, {}, lam.eps_c};
  const Transform T(g, grid);
  const InducedField field(T, src, q.lambda(delta));
  std::vector<std::vector<double>> rows;
  long skipped = 0;
  for (long j = 0; j < ny; ++j) {
    const double y = ny == 1 ? y_min : y_min + (y_max - y_min) * j / (ny - 1);
    for (long i = 0; i < nx; ++i) {
      const double x = nx == 1 ? x_min : x_min + (x_max - x_min) * i / (nx - 1);
      const PlanePoint z{x, y};
      if (boundary_distance(g, z) < guard || norm(z - src.z) < guard) {
        ++skipped;
        continue;
      }
      const complex u = field.value(z);
      const auto grad = field.gradient(z);
      rows.push_back({x, y, u.real(), u.imag(), std::sqrt(std::norm(grad[0]) + std::norm(grad[1]))});
    }
  }
  s.note("skipped_in_guard_band", std::to_string(skipped));
  if (out.json_format()) {
    json pts = json::array();
    for (const auto& r : rows) pts.push_back({{"x", r[0]}, {"y", r[1]}, {"u_re", r[2]}, {"u_im", r[3]}, {"grad_abs", r[4]}});
    out.write_json("field", {{"skipped", skipped}, {"points", pts}});
  } else {
    out.csv("field", "x,y,u_re,u_im,grad_abs", rows);
  }
  std::printf("evaluated %zu points, skipped %ld in the guard band\n", rows.size(), skipped);
  return 0;
}

void print_error(const std::string& type, const std::string& message, int code) {
  json e{{"error", {{"type", type}, {"message", message}, {"exit_code", code}}}};
  std::cerr << e.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  CLI::App app{"Spectral analysis of the Neumann-Poincare operator on two intersecting disks"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "Flat key = value config file");
    sub->add_option("--out", o.out_dir, "Output directory");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--theta0", o.theta0, "Half intersection angle (radians)");
    sub->add_option("--radius", o.radius, "Disk radius");
    sub->add_option("--threads", o.threads, "OpenMP threads (0 keeps the default)")->check(CLI::NonNegativeNumber);
  };
  const std::map<std::string, std::string> help{
      {"spectrum", "Tabulate eta(s), b and oracle eigenvalues"},
      {"resonance", "delta sweep of ||phi_delta||^2 with fitted rates"},
      {"validate", "Run the invariant checks"},
      {"field", "Induced field u_delta on a grid"}};
  for (const auto& [name, text] : help) {
    auto* sub = app.add_subcommand(name, text);
    add_common(sub);
    sub->callback([&o, name = name] { o.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what(), 2);
    return 2;
  }

  if (o.threads > 0) omp_set_num_threads(o.threads);
  try {
    config::KeyValues kv;
    if (!o.config_path.empty()) kv = config::load(o.config_path);
    if (o.theta0) kv["theta0"] = config::format_double(*o.theta0);
    if (o.radius) kv["radius"] = config::format_double(*o.radius);
    config::reject_unknown(kv, allowed_keys(o.command));
    Settings s(kv);
    if (o.command == "spectrum") return cmd_spectrum(s, o);
    if (o.command == "resonance") return cmd_resonance(s, o);
    if (o.command == "validate") return cmd_validate(s, o);
    return cmd_field(s, o);
  } catch (const ConfigError& e) {
    print_error("config", e.what(), 2);
    return 2;
  } catch (const CheckFailure& e) {
    print_error("check", e.what(), 1);
    return 1;
  } catch (const std::exception& e) {
    print_error("numerical", std::string(o.command) + ": " + e.what(), 1);
    return 1;
  }
}
