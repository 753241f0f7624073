#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lbmlab/config.hpp"
#include "lbmlab/dispersion.hpp"
#include "lbmlab/errors.hpp"
#include "lbmlab/experiments.hpp"
#include "lbmlab/kernel.hpp"
#include "lbmlab/model.hpp"
#include "lbmlab/theory.hpp"

using namespace lbmlab;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kMaxRate = 18;

class Output {
 public:
  explicit Output(const RunConfig& cfg) : dir_(cfg.text("output", "lbmlab-out")) { fs::create_directories(dir_); }

  std::ofstream open(const std::string& name) {
    const auto path = dir_ / name;
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write '" + path.string() + "'");
    files_.push_back(path.string());
    os << std::setprecision(17);
    return os;
  }

  void manifest(const RunConfig& cfg) {
    std::ofstream os(dir_ / "manifest.txt");
    write_manifest(os, cfg, files_);
  }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

std::string require(const RunConfig& cfg, const std::string& key) {
  if (!cfg.has(key)) throw ConfigError("missing required setting '" + key + "'");
  return cfg.values.at(key);
}

Model make_model(const RunConfig& cfg) {
  const std::string name = require(cfg, "model");
  ParamMap params = cfg.model_params();
  const auto V = cfg.velocity();
  const bool three_d = name.rfind("D3", 0) == 0;
  if (!three_d && V[2] != 0.0) throw ConfigError("vz must be 0 for a 2D model");
  if (name.find("-NS") == std::string::npos) {
    params["vx"] = V[0];
    params["vy"] = V[1];
    if (three_d) params["vz"] = V[2];
  }
  return build_model(name, params, cfg.model_rates());
}

Background background(const RunConfig& cfg) {
  Background bg;
  bg.V = cfg.velocity();
  return bg;
}

std::vector<double> k_samples(const RunConfig& cfg) {
  auto k = cfg.list("k");
  return k.empty() ? default_k_samples() : k;
}

// 2D: angles in [0, 90 deg] or the single "theta" (degrees). 3D: nine fixed directions.
std::vector<std::pair<double, Eigen::Vector3d>> directions(const Model& m, const RunConfig& cfg) {
  std::vector<std::pair<double, Eigen::Vector3d>> out;
  if (auto th = cfg.number("theta")) {
    const double t = *th * kPi / 180.0;
    out.push_back({*th, Eigen::Vector3d(std::cos(t), std::sin(t), 0.0)});
    return out;
  }
  if (m.d() == 3) {
    const std::vector<Eigen::Vector3d> d = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {0, 1, 1},
                                            {1, 0, 1}, {1, 1, 1}, {1, 2, 3}, {3, -1, 2}};
    for (std::size_t i = 0; i < d.size(); ++i) out.push_back({double(i), d[i].normalized()});
    return out;
  }
  const int n = cfg.integer("angles", 13);
  if (n < 1) throw ConfigError("angles must be positive");
  for (int i = 0; i < n; ++i) {
    const double deg = n == 1 ? 0.0 : 90.0 * i / (n - 1);
    out.push_back({deg, Eigen::Vector3d(std::cos(deg * kPi / 180.0), std::sin(deg * kPi / 180.0), 0.0)});
  }
  return out;
}

int cmd_dispersion(RunConfig& cfg) {
  const Model m = make_model(cfg);
  const Background bg = background(cfg);
  const auto ks = k_samples(cfg);
  Output out(cfg);
  auto modes = out.open("dispersion.csv");
  auto coeffs = out.open("coefficients.csv");
  modes << "theta,k,mode,z_re,z_im,gamma_re,gamma_im\n";
  bool header = true;
  for (const auto& [theta, dir] : directions(m, cfg)) {
    const auto r = track_hydrodynamic_modes(m, bg, dir, ks);
    write_dispersion_csv(modes, theta, r);
    write_coefficients_csv(coeffs, m.name, bg, theta, r, header);
    header = false;
    for (const auto& mode : r.modes)
      std::printf("theta=%g %s a1=%.10g a2=%.10g a3=%.10g a4=%.10g\n", theta, mode.label.c_str(), mode.fit.coeffs.a1,
                  mode.fit.coeffs.a2, mode.fit.coeffs.a3, mode.fit.coeffs.a4);
    if (r.unstable) std::printf("theta=%g unstable at %zu k samples\n", theta, r.unstable_k.size());
  }
  out.manifest(cfg);
  return 0;
}

int cmd_stability(RunConfig& cfg) {
  const Model m = make_model(cfg);
  const Background bg = background(cfg);
  const int n = cfg.integer("kgrid", m.d() == 3 ? 13 : 41);
  const auto r = stability_scan(m, bg, uniform_k_grid(m.d(), n));
  Output out(cfg);
  auto os = out.open("stability.csv");
  os << "kx,ky,kz,max_modulus\n";
  for (std::size_t i = 0; i < r.k.size(); ++i)
    os << r.k[i][0] << ',' << r.k[i][1] << ',' << r.k[i][2] << ',' << r.max_modulus[i] << '\n';
  std::printf("max |z| = %.17g over %zu wavevectors: %s\n", r.overall_max, r.k.size(),
              r.unstable.empty() ? "stable" : "unstable");
  out.manifest(cfg);
  return 0;
}

int cmd_tune(RunConfig& cfg) {
  const std::string model = require(cfg, "model");
  const std::string objective = require(cfg, "objective");
  ParamMap fixed = cfg.model_params();
  for (const auto& [k, v] : cfg.model_rates()) {
    if (k.rfind("sigma", 0) == 0) fixed[k] = v;
    else fixed["sigma" + k.substr(1)] = sigma_from_s(v);
  }
  for (const char* k : {"kappa", "nu", "vmax"})
    if (auto v = cfg.number(k)) fixed[k] = *v;
  const auto r = tune(model, objective, cfg.text("route", ""), fixed);
  Output out(cfg);
  auto os = out.open("tune.csv");
  os << "name,value\n";
  std::printf("condition = %s\n", r.condition.c_str());
  for (const auto& [k, v] : r.sigmas) {
    std::printf("%s = %.8f\n", k.c_str(), v);
    os << k << ',' << v << '\n';
  }
  for (const auto& [k, v] : r.params) {
    std::printf("%s = %.8f\n", k.c_str(), v);
    os << k << ',' << v << '\n';
  }
  std::printf("verified = %.3g\n", r.verified);
  os << "verified," << r.verified << '\n';
  if (!r.alternatives.empty()) std::printf("other roots = %zu\n", r.alternatives.size());
  out.manifest(cfg);
  return 0;
}

struct VerifyRow {
  std::string quantity;
  double direction;
  double predicted, measured;
};

int cmd_verify(RunConfig& cfg) {
  const Model m = make_model(cfg);
  const auto V = cfg.velocity();
  const auto pred = predicted_transport(m.name, m.params, henon_params(m), V);
  const auto ks = k_samples(cfg);
  std::vector<VerifyRow> rows;
  auto a2 = [&](const Background& bg, const Eigen::Vector3d& dir, const std::string& label) {
    return track_hydrodynamic_modes(m, bg, dir, ks).mode(label).fit.coeffs;
  };
  if (m.advection_diffusion()) {
    const Background bg = background(cfg);
    if (m.name == "D2Q5") {
      rows.push_back({"kappa_xx", 0.0, pred.at("kappa_xx"), a2(bg, {1, 0, 0}, "density").a2});
      rows.push_back({"kappa_yy", 90.0, pred.at("kappa_yy"), a2(bg, {0, 1, 0}, "density").a2});
    } else {
      for (const auto& [theta, dir] : directions(m, cfg))
        rows.push_back({"kappa", theta, pred.at("kappa"), a2(bg, dir, "density").a2});
    }
  } else {
    const double speed = std::sqrt(V[0] * V[0] + V[1] * V[1] + V[2] * V[2]);
    for (const auto& [theta, dir] : directions(m, cfg)) {
      Background bg;
      for (int a = 0; a < 3; ++a) bg.V[a] = speed * dir[a];
      rows.push_back({"nu_eff", theta, pred.at("nu_eff"), a2(bg, dir, "shear").a2});
      rows.push_back({"cs", theta, pred.at("cs"), a2(Background{}, dir, "acoustic+").a1});
    }
  }
  Output out(cfg);
  auto os = out.open("verify.csv");
  os << "model,quantity,direction,predicted,measured,rel_error\n";
  std::cout << std::setprecision(17) << "model,quantity,direction,predicted,measured,rel_error\n";
  for (const auto& r : rows) {
    const double rel = std::abs(r.measured - r.predicted) / std::abs(r.predicted);
    os << m.name << ',' << r.quantity << ',' << r.direction << ',' << r.predicted << ',' << r.measured << ',' << rel
       << '\n';
    std::cout << m.name << ',' << r.quantity << ',' << r.direction << ',' << r.predicted << ',' << r.measured << ','
              << rel << '\n';
  }
  out.manifest(cfg);
  return 0;
}

GaussianConfig gaussian_config(const RunConfig& cfg, const Model& m, bool vortex) {
  GaussianConfig g;
  const bool q13 = m.name == "D2Q13-NS";
  const int n = vortex ? (q13 ? 363 : 301) : 101;
  g.Nx = cfg.integer("nx", n);
  g.Ny = cfg.integer("ny", g.Nx);
  g.steps = cfg.integer("steps", vortex ? (q13 ? 2770 : 9000) : 3200);
  g.r0 = cfg.number("r0", vortex ? (q13 ? 11.0 : 8.0) : 5.0);
  g.g0 = cfg.number("g0", vortex ? 1e-2 : 1e-3);
  g.dump_every = cfg.integer("dump_every", 0);
  g.jobs = cfg.integer("jobs", 1);
  const auto V = cfg.velocity();
  g.V = {V[0], V[1]};
  const auto pred = predicted_transport(m.name, m.params, henon_params(m), V);
  g.chi = cfg.number("chi", vortex ? pred.at("nu0") : pred.at("kappa"));
  if (cfg.has("center_x") || cfg.has("center_y"))
    g.center = std::array<double, 2>{cfg.number("center_x", (g.Nx - 1) / 2.0), cfg.number("center_y", (g.Ny - 1) / 2.0)};
  return g;
}

int cmd_simulate(RunConfig& cfg) {
  const Model m = make_model(cfg);
  const std::string exp = cfg.text("experiment", "dot");
  const int jobs = cfg.integer("jobs", 1);
  Output out(cfg);
  if (exp == "dot" || exp == "vortex") {
    const bool vortex = exp == "vortex";
    const GaussianConfig g = gaussian_config(cfg, m, vortex);
    const std::string field = vortex ? "vorticity" : "rho-1";
    DumpFn dump = [&](std::int64_t t, const std::vector<double>& f) {
      auto os = out.open("field_" + std::to_string(t) + ".csv");
      write_field_csv(os, field, t, {g.Nx, g.Ny, 1}, f);
    };
    const auto reports = vortex ? run_gaussian_vortex(m, g, dump) : run_gaussian_dot(m, g, dump);
    auto os = out.open("anisotropy.csv");
    write_report_csv(os, reports);
    const auto& last = reports.back();
    std::printf("t = %lld anisotropy = %.6g l2_error = %.6g\n", static_cast<long long>(last.t), last.anisotropy,
                last.l2_error);
  } else if (exp == "plane-wave") {
    const std::string init = cfg.text("init", "eigenvector");
    if (init != "eigenvector" && init != "equilibrium") throw ConfigError("init must be eigenvector or equilibrium");
    const int wx = cfg.integer("wave_x", 13), wy = cfg.integer("wave_y", 0), N = cfg.integer("nx", 240);
    const double speed = cfg.number("speed", 0.1);
    const auto r = plane_wave_relative_advection(
        m, speed, {wx, wy}, N, jobs, init == "eigenvector" ? PlaneWaveInit::eigenvector : PlaneWaveInit::equilibrium);
    auto os = out.open("plane_wave.csv");
    os << "model,wave_x,wave_y,N,V,measured,theory,rel_error,phase_velocity,contamination,steps\n";
    os << m.name << ',' << wx << ',' << wy << ',' << N << ',' << speed << ',' << r.measured << ',' << r.theory << ','
       << r.rel_error << ',' << r.phase_velocity << ',' << r.contamination << ',' << r.steps << '\n';
    std::printf("relative advection = %.10f theory = %.10f rel_error = %.3g\n", r.measured, r.theory, r.rel_error);
  } else if (exp == "growth") {
    const int nx = cfg.integer("nx", 32);
    const std::array<int, 3> dims{nx, cfg.integer("ny", 4), cfg.integer("nz", m.d() == 3 ? 4 : 1)};
    const auto r = kernel_growth_check(m, dims, cfg.integer("wave_x", 1), cfg.number("speed", 0.05),
                                       cfg.integer("warmup", 200), jobs);
    auto os = out.open("growth.csv");
    os << "model,mode,simulated_re,simulated_im,predicted_re,predicted_im,rel_error\n";
    os << m.name << ',' << r.mode << ',' << r.simulated.real() << ',' << r.simulated.imag() << ','
       << r.predicted.real() << ',' << r.predicted.imag() << ',' << r.rel_error << '\n';
    std::printf("%s growth rel_error = %.3g\n", r.mode.c_str(), r.rel_error);
  } else {
    throw ConfigError("unknown experiment '" + exp + "' (dot, vortex, plane-wave, growth)");
  }
  out.manifest(cfg);
  return 0;
}

int cmd_toy(RunConfig& cfg) {
  ToyConfig t;
  t.N = cfg.integer("nx", 80);
  t.r0 = cfg.number("r0", 4.0);
  t.g0 = cfg.number("g0", 1e-2);
  t.nu = cfg.number("nu", 0.0);
  t.V = cfg.number("speed", 0.1);
  t.angle_deg = cfg.number("angle", 14.0);
  t.t = cfg.number("t", 300.0);
  const auto f = fourier_toy_evolution(t);
  AnisotropyOptions opt;
  opt.center = f.center;
  opt.sample = [&](double x, double y) { return f.vorticity_at(x, y); };
  const auto a = anisotropy_metric(f.vorticity, f.N, f.N, opt);
  Output out(cfg);
  {
    auto os = out.open("toy_vorticity.csv");
    write_field_csv(os, "vorticity", 0, {f.N, f.N, 1}, f.vorticity);
  }
  auto os = out.open("toy_anisotropy.csv");
  AnisotropyReport r;
  r.cx = a.cx;
  r.cy = a.cy;
  r.e = a.e;
  r.anisotropy = a.anisotropy;
  write_report_csv(os, {r});
  std::printf("anisotropy = %.6g\n", a.anisotropy);
  out.manifest(cfg);
  return 0;
}

std::vector<std::string> flag_keys() {
  std::vector<std::string> keys = config_keys();
  for (int i = 0; i <= kMaxRate; ++i) {
    keys.push_back("s" + std::to_string(i));
    keys.push_back("sigma" + std::to_string(i));
  }
  return keys;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear and time-domain analysis of multiple-relaxation-time lattice Boltzmann schemes"};
  app.require_subcommand(1);
  const std::map<std::string, int (*)(RunConfig&)> commands = {
      {"dispersion", cmd_dispersion}, {"simulate", cmd_simulate}, {"tune", cmd_tune},
      {"verify", cmd_verify},         {"toy", cmd_toy},           {"stability", cmd_stability}};
  const std::map<std::string, std::string> help = {
      {"dispersion", "Track hydrodynamic modes and fit their expansion coefficients"},
      {"simulate", "Run a time-domain experiment (dot, vortex, plane-wave, growth)"},
      {"tune", "Solve a tuning condition for free relaxation parameters"},
      {"verify", "Compare closed-form transport coefficients with dispersion fits"},
      {"toy", "Fourier-space model of anomalous advection"},
      {"stability", "Largest eigenvalue modulus over a wavevector grid"}};

  const auto keys = flag_keys();
  std::map<std::string, std::map<std::string, std::string>> flags;
  std::map<std::string, std::string> config_path;
  for (const auto& [name, fn] : commands) {
    auto* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", config_path[name], "key = value config file");
    for (const auto& k : keys) sub->add_option("--" + k, flags[name][k]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "lbmlab: " << e.what() << '\n';
    return 3;
  }

  try {
    for (const auto& [name, fn] : commands) {
      auto* sub = app.get_subcommand(name);
      if (!sub->parsed()) continue;
      RunConfig cfg;
      if (!config_path[name].empty()) load_config_file(cfg, config_path[name]);
      if (!cfg.subcommand.empty() && cfg.subcommand != name)
        throw ConfigError("config file is for '" + cfg.subcommand + "', not '" + name + "'");
      cfg.subcommand = name;
      for (const auto& k : keys)
        if (sub->count("--" + k)) cfg.set(k, flags[name][k]);
      return fn(cfg);
    }
  } catch (const ConfigError& e) {
    std::cerr << "lbmlab: config error: " << e.what() << '\n';
    return 3;
  } catch (const DomainError& e) {
    std::cerr << "lbmlab: domain error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "lbmlab: numerical error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "lbmlab: error: " << e.what() << '\n';
    return 2;
  }
  return 3;
}
