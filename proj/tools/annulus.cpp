// Command-line front end: mu-c, eigen, bifurcate, simulate, sweep, boundary.
#include "annulus/bifurcation.hpp"
#include "annulus/critical.hpp"
#include "annulus/io.hpp"
#include "annulus/simulator.hpp"
#include "annulus/sweep.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <random>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace annulus;

namespace {

json params_json(const DomainParams& p) { return {{"a", p.a}, {"b", p.b}, {"alpha", p.alpha}, {"mu", p.mu}}; }

// JSON numbers cannot hold NaN; those become null.
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

struct Output {
  fs::path dir;
  std::vector<std::string> files;

  fs::path file(const std::string& name) {
    files.push_back(name);
    return dir / name;
  }
  void finish(const std::string& command, const json& inputs) {
    write_json(dir / (command + "_manifest.json"), manifest(command, inputs, files));
  }
};

int run_mu_c(double a, double b, double alpha, bool oracle, Output& out) {
  DomainParams p{a, b, alpha, 1.0};
  validate_geometry(p);
  json r;
  r["params"] = {{"a", a}, {"b", b}, {"alpha", alpha}};
  r["mu_c_closed"] = mu_c_closed(p);
  if (oracle) {
    const double o = to_double(mu_c_oracle<Quad>(p));
    r["mu_c_oracle"] = o;
    r["discrepancy"] = std::abs(o - r["mu_c_closed"].get<double>()) / r["mu_c_closed"].get<double>();
  }
  write_json(out.file("mu_c.json"), r);
  out.finish("mu-c", {{"a", a}, {"b", b}, {"alpha", alpha}, {"oracle", oracle}});
  std::cout << r.dump(2) << '\n';
  return 0;
}

int run_eigen(const DomainParams& p0, int n, int mode, const std::string& precision, bool csv, Output& out) {
  const DomainParams p = validate(p0);
  const auto grid = build_grid<double>(p.a, p.b, n);
  const auto eig = leading_eigenpair(p, p.mu, grid, mode);
  double lambda1 = eig.lambda1;
  if (precision == "quad") {
    const auto gq = build_grid<Quad>(Quad(p.a), Quad(p.b), n);
    lambda1 = to_double(leading_eigenvalue<Quad>(p, Quad(p.mu), gq, mode));
  }
  json r;
  r["params"] = params_json(p);
  r["n"] = n;
  r["mode"] = mode;
  r["precision"] = precision;
  r["lambda1"] = lambda1;
  r["lambda1_imag"] = eig.lambda1_imag;
  json samples = json::array();
  const int ns = 11;
  Eigen::VectorXd pts(ns);
  for (int k = 0; k < ns; ++k) pts(k) = p.a + (p.b - p.a) * k / (ns - 1);
  const Eigen::VectorXcd vals = interpolate(grid, eig.psi1.values, pts);
  for (int k = 0; k < ns; ++k) samples.push_back({{"r", pts(k)}, {"re", vals(k).real()}, {"im", vals(k).imag()}});
  r["psi1_samples"] = samples;
  if (csv) {
    std::ofstream f(out.file("eigen_profile.csv"));
    f << "r,re,im\n";
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      f << format_real(grid.nodes(i)) << ',' << format_real(eig.psi1.values(i).real()) << ','
        << format_real(eig.psi1.values(i).imag()) << '\n';
    }
  }
  write_json(out.file("eigen.json"), r);
  out.finish("eigen", {{"params", params_json(p)}, {"n", n}, {"mode", mode}, {"precision", precision}, {"csv", csv}});
  std::cout << r.dump(2) << '\n';
  return 0;
}

int run_bifurcate(const DomainParams& p0, int n, int phases, int ntheta, Output& out) {
  const DomainParams p = validate(p0);
  if (phases < 1) throw Error(ErrorCode::InvalidSpec, "--phases must be at least 1");
  const auto grid = build_grid<double>(p.a, p.b, n);
  const auto eig = leading_eigenpair(p, p.mu, grid);
  const auto mc = solve_G11(p, p.mu, eig.lambda1, eig.psi1, grid);
  const auto ly = lyapunov_coeff(p, p.mu, eig, mc, grid);
  json r;
  r["params"] = params_json(p);
  r["n"] = n;
  r["mu_c"] = mu_c_closed(p);
  r["lambda1"] = eig.lambda1;
  r["l"] = ly.l;
  r["l_plain"] = ly.l_plain;
  r["g11_residual"] = mc.residual;
  const auto report = classify_and_build(p, p.mu, eig, mc, ly.l, grid);
  r["classification"] = to_string(report.classification);
  r["note"] = report.note;
  if (!report.amplitude) {
    // branch lies on the other side of μ_c
    throw Error(ErrorCode::DegenerateCoefficient,
                "no bifurcated state at this mu: lambda1 and l have the same sign (" + report.note + ")");
  }
  r["amplitude"] = *report.amplitude;
  json fields = json::array();
  for (int j = 0; j < phases; ++j) {
    const double phi = 2.0 * pi<double>() * j / phases;
    const auto s = std::polar(*report.amplitude, phi);
    const auto psi = report.field(s, ntheta);
    const auto [vr, vt] = report.velocity(s, ntheta, grid);
    const std::string stem = "bifurcated_" + std::to_string(j);
    write_field_csv(out.file(stem + ".csv"), psi, vr, vt);
    write_contour_svg(out.file(stem + ".svg"), psi);
    fields.push_back({{"phase", phi}, {"csv", stem + ".csv"}, {"svg", stem + ".svg"},
                      {"max_abs_psi", psi.values.cwiseAbs().maxCoeff()}});
  }
  r["fields"] = fields;
  write_json(out.file("bifurcate.json"), r);
  out.finish("bifurcate", {{"params", params_json(p)}, {"n", n}, {"phases", phases}, {"ntheta", ntheta}});
  std::cout << r.dump(2) << '\n';
  return 0;
}

const std::vector<std::string> kSimulateKeys = {
    "a", "b", "alpha", "mu", "mu_factor", "n", "n_theta", "dt", "steps", "t_end", "delta", "phase", "init", "seed",
    "nonlinear", "record_every", "cfl_limit", "mode", "deltas", "threshold", "t_max", "snapshot"};

int run_simulate(const fs::path& config_path, Output& out) {
  const auto cfg = KeyValueConfig::load(config_path);
  cfg.require_known(kSimulateKeys);
  DomainParams p{cfg.get_double("a", 1.0), cfg.get_double("b", 3.0), cfg.get_double("alpha", 5.0), 1.0};
  validate_geometry(p);
  if (cfg.has("mu") && cfg.has("mu_factor")) throw Error(ErrorCode::InvalidSpec, "give either mu or mu_factor");
  const double mu_c = mu_c_closed(p);
  p.mu = cfg.has("mu") ? cfg.get_double("mu", 1.0) : cfg.get_double("mu_factor", 0.99) * mu_c;
  validate(p);
  const int n = int(cfg.get_long("n", 48));
  SimConfig sc;
  sc.n_theta = int(cfg.get_long("n_theta", sc.n_theta));
  sc.nonlinear = cfg.get_bool("nonlinear", sc.nonlinear);
  sc.cfl_limit = cfg.get_double("cfl_limit", sc.cfl_limit);
  const double dt = cfg.get_double("dt", 0.01);
  if (!(dt > 0)) throw Error(ErrorCode::InvalidSpec, "dt must be positive");
  const auto grid = build_grid<double>(p.a, p.b, n);
  const Simulator sim(p, grid, sc);
  const auto eig = leading_eigenpair(p, p.mu, grid);
  const std::string mode = cfg.get_string("mode", "run");

  json inputs = cfg.values();
  json r;
  r["params"] = params_json(p);
  r["mu_c"] = mu_c;
  r["lambda1"] = eig.lambda1;
  r["n"] = n;
  r["n_theta"] = sc.n_theta;
  r["dt"] = dt;
  r["mode"] = mode;

  if (mode == "escape") {
    const auto deltas = cfg.get_doubles("deltas", {1e-6, 1e-5, 1e-4});
    const double threshold = cfg.get_double("threshold", 1e-2);
    const double t_max = cfg.get_double("t_max", 200.0);
    const auto res = escape_experiment(sim, eig, deltas, threshold, dt, t_max, cfg.get_double("phase", 0.0));
    {
      std::ofstream f(out.file("escape.csv"));
      f << "delta,escape_time\n";
      for (const auto& row : res.rows) f << format_real(row.delta) << ',' << format_real(row.escape_time) << '\n';
    }
    json rows = json::array();
    for (const auto& row : res.rows) rows.push_back({{"delta", row.delta}, {"escape_time", row.escape_time}});
    r["escape"] = {{"threshold", threshold}, {"rows", rows}, {"slope", num(res.slope)},
                   {"predicted_slope", 1.0 / eig.lambda1},
                   {"relative_error", num(std::abs(res.slope * eig.lambda1 - 1.0))}};
  } else if (mode == "run") {
    const double delta = cfg.get_double("delta", 1e-3);
    const std::string init = cfg.get_string("init", "eigenmode");
    SimState s;
    if (init == "eigenmode") {
      s = sim.init_from_mode(eig, delta, cfg.get_double("phase", 0.0));
    } else if (init == "random") {
      std::mt19937_64 rng(std::uint64_t(cfg.get_long("seed", 1)));
      std::normal_distribution<double> gauss;
      std::vector<ModalField<double>> modes;
      for (int m = 1; m <= std::min(3, sim.max_mode()); ++m) {
        const auto em = leading_eigenpair(p, p.mu, grid, m);
        const std::complex<double> c(gauss(rng), gauss(rng));
        modes.push_back({m, delta * c * em.psi1.values});
      }
      s = sim.init_from_modes(modes);
    } else {
      throw Error(ErrorCode::InvalidSpec, "init must be eigenmode or random");
    }
    long steps = cfg.get_long("steps", 0);
    if (cfg.has("t_end")) steps = long(std::llround(cfg.get_double("t_end", 0.0) / dt));
    if (steps <= 0) throw Error(ErrorCode::InvalidSpec, "set steps or t_end to a positive value");
    const long record_every = std::max(1L, cfg.get_long("record_every", 10));

    std::vector<Diagnostics> history{sim.diagnostics(s)};
    std::vector<double> residuals;
    for (long k = 1; k <= steps; ++k) {
      const SimState prev = s;
      s = sim.step(s, dt);
      if (k % record_every == 0 || k == steps) {
        history.push_back(sim.diagnostics(s));
        residuals.push_back(energy_residual(sim, prev, s, dt));
      }
    }
    write_trajectory_csv(out.file("trajectory.csv"), history);
    double vmax = 0;
    for (const auto& d : history) vmax = std::max(vmax, d.norm());
    const bool grew = history.back().norm() > history.front().norm();
    const double rate = grew ? fit_growth_rate(history, 1e-8, 1e-3 * vmax) : fit_growth_rate(history);
    double rmax = 0, rmean = 0;
    for (double x : residuals) {
      rmax = std::max(rmax, x);
      rmean += x / residuals.size();
    }
    const auto& last = history.back();
    r["growth_rate"] = num(rate);
    r["saturation_max_psi"] = last.max_psi;
    r["final"] = {{"t", last.t}, {"E3", last.E3}, {"E1", last.E1}, {"E2", last.E2}, {"max_psi", last.max_psi},
                  {"norm", last.norm()}, {"cfl", sim.cfl_number(s, dt)}};
    r["energy_residual"] = {{"max", rmax}, {"mean", rmean}, {"samples", residuals.size()}};
    if (cfg.get_bool("snapshot", true)) {
      const int nt = 4 * sc.n_theta;
      const auto psi = sim.physical(s, nt);
      std::vector<ModalField<double>> vr, vt;
      for (const auto& m : s.psi_modes) {
        vr.push_back({m.n, std::complex<double>(0, -m.n) * m.values.cwiseProduct(grid.inv_r.cast<std::complex<double>>())});
        vt.push_back({m.n, grid.d1.cast<std::complex<double>>() * m.values});
      }
      write_field_csv(out.file("snapshot.csv"), psi, synthesize_physical(grid.nodes, vr, nt),
                      synthesize_physical(grid.nodes, vt, nt));
      write_contour_svg(out.file("snapshot.svg"), psi);
    }
  } else {
    throw Error(ErrorCode::InvalidSpec, "mode must be run or escape");
  }
  write_json(out.file("simulate.json"), r);
  out.finish("simulate", inputs);
  std::cout << r.dump(2) << '\n';
  return 0;
}

// Reuses rows from a previous run when its manifest records the same spec.
template <typename Row, typename Reader>
std::vector<Row> resumable(const Output& out, const std::string& command, const SweepSpec& spec,
                           const std::string& csv, Reader read) {
  const auto mpath = out.dir / (command + "_manifest.json");
  if (!fs::exists(mpath) || !fs::exists(out.dir / csv)) return {};
  const auto m = read_json(mpath);
  if (m.value("command", "") != command || !m.contains("inputs") || m["inputs"] != to_json(spec)) {
    throw Error(ErrorCode::InvalidSpec, "--resume: existing manifest was written for a different spec");
  }
  return read(out.dir / csv);
}

int run_sweep(const fs::path& spec_path, bool resume, Output& out) {
  const auto spec = sweep_spec_from(KeyValueConfig::load(spec_path));
  std::vector<SweepRow> previous;
  if (resume) previous = resumable<SweepRow>(out, "sweep", spec, "sweep.csv", read_sweep_csv);
  const auto rows = sweep_l(spec, previous);
  write_sweep_csv(out.file("sweep.csv"), rows);
  out.finish("sweep", to_json(spec));
  int sup = 0, sub = 0, degen = 0, failed = 0;
  for (const auto& row : rows) {
    if (!row.ok()) ++failed;
    else if (row.classification == Classification::Supercritical) ++sup;
    else if (row.classification == Classification::Subcritical) ++sub;
    else ++degen;
  }
  json r = {{"rows", rows.size()}, {"supercritical", sup}, {"subcritical", sub}, {"degenerate", degen},
            {"failed", failed}, {"csv", (out.dir / "sweep.csv").string()}};
  std::cout << r.dump(2) << '\n';
  return 0;
}

int run_boundary(const fs::path& spec_path, bool resume, Output& out) {
  const auto spec = sweep_spec_from(KeyValueConfig::load(spec_path));
  std::vector<BoundaryPoint> previous;
  if (resume) previous = resumable<BoundaryPoint>(out, "boundary", spec, "boundary.csv", read_boundary_csv);
  std::vector<BoundaryPoint> points;
  for (double alpha : spec.alpha.samples()) {
    auto hit = std::find_if(previous.begin(), previous.end(),
                            [&](const BoundaryPoint& q) { return q.alpha == alpha && q.status == "ok"; });
    points.push_back(hit != previous.end() ? *hit : boundary_bisect(spec, alpha));
  }
  write_boundary_csv(out.file("boundary.csv"), points);
  out.finish("boundary", to_json(spec));
  int flips = 0;
  for (const auto& q : points) flips += !q.no_flip;
  json r = {{"alphas", points.size()}, {"flips", flips}, {"csv", (out.dir / "boundary.csv").string()}};
  std::cout << r.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Viscosity threshold, bifurcation and flow simulation in a slip-walled annulus"};
  app.require_subcommand(1);
  std::string out_dir = default_output_dir().string();
  app.add_option("-o,--out", out_dir, "Output directory (default $" + std::string(kOutputDirEnv) + " or annulus_out)");

  double a = 1, b = 3, alpha = 5, mu = 1;
  int n = 64, mode = 1, phases = 4, ntheta = 128;
  bool oracle = false, csv = false, resume = false;
  std::string precision = "quad", config;

  auto* mu_c = app.add_subcommand("mu-c", "Critical viscosity for (a, b, alpha)");
  mu_c->add_option("a", a)->required();
  mu_c->add_option("b", b)->required();
  mu_c->add_option("alpha", alpha)->required();
  mu_c->add_flag("--oracle", oracle, "Also solve the 4x4 determinant condition numerically");

  auto* eigen = app.add_subcommand("eigen", "Leading eigenvalue of the linearized problem");
  eigen->add_option("a", a)->required();
  eigen->add_option("b", b)->required();
  eigen->add_option("alpha", alpha)->required();
  eigen->add_option("mu", mu)->required();
  eigen->add_option("-N", n, "Chebyshev order");
  eigen->add_option("--mode", mode, "Angular wavenumber");
  eigen->add_option("--precision", precision, "double or quad")->check(CLI::IsMember({"double", "quad"}));
  eigen->add_flag("--csv", csv, "Write the eigenfunction profile");

  auto* bif = app.add_subcommand("bifurcate", "Lyapunov coefficient and bifurcated states");
  bif->add_option("a", a)->required();
  bif->add_option("b", b)->required();
  bif->add_option("alpha", alpha)->required();
  bif->add_option("--mu", mu)->required();
  bif->add_option("--phases", phases, "Number of phase-rotated fields to write");
  bif->add_option("-N", n, "Chebyshev order");
  bif->add_option("--ntheta", ntheta, "Angular samples in field dumps");

  auto* simulate = app.add_subcommand("simulate", "Time integration from a key = value config");
  simulate->add_option("config", config)->required()->check(CLI::ExistingFile);

  auto* sweep = app.add_subcommand("sweep", "Tabulate l over an (alpha, b) grid");
  sweep->add_option("spec", config)->required()->check(CLI::ExistingFile);
  sweep->add_flag("--resume", resume, "Reuse finished rows in the output directory");

  auto* boundary = app.add_subcommand("boundary", "Bisect the sign change of l in b for each alpha");
  boundary->add_option("spec", config)->required()->check(CLI::ExistingFile);
  boundary->add_flag("--resume", resume, "Reuse finished rows in the output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cout << error_json(ErrorCode::InvalidSpec, e.what()).dump(2) << '\n';
    return 2;
  }

  Output out{fs::path(out_dir), {}};
  try {
    if (*mu_c) return run_mu_c(a, b, alpha, oracle, out);
    if (*eigen) return run_eigen({a, b, alpha, mu}, n, mode, precision, csv, out);
    if (*bif) return run_bifurcate({a, b, alpha, mu}, bif->count("-N") ? n : 48, phases, ntheta, out);
    if (*simulate) return run_simulate(config, out);
    if (*sweep) return run_sweep(config, resume, out);
    if (*boundary) return run_boundary(config, resume, out);
  } catch (const Error& e) {
    std::cout << error_json(e.code(), e.what()).dump(2) << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cout << json{{"error", "Internal"}, {"message", e.what()}, {"exit_code", 1}}.dump(2) << '\n';
    return 1;
  }
  return 0;
}
