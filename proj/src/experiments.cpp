#include "lbmlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <string>

#include "lbmlab/dispersion.hpp"

namespace lbmlab {

namespace {

constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;

double wrap(double d, int N) {
  d = std::fmod(d, double(N));
  if (d > 0.5 * N) d -= N;
  if (d < -0.5 * N) d += N;
  return d;
}

double bilinear(const std::vector<double>& f, int Nx, int Ny, double x, double y) {
  const double fx = std::floor(x), fy = std::floor(y);
  const double tx = x - fx, ty = y - fy;
  auto at = [&](long i, long j) {
    i = ((i % Nx) + Nx) % Nx;
    j = ((j % Ny) + Ny) % Ny;
    return f[i + long(Nx) * j];
  };
  const long i = long(fx), j = long(fy);
  return (1 - tx) * (1 - ty) * at(i, j) + tx * (1 - ty) * at(i + 1, j) + (1 - tx) * ty * at(i, j + 1) +
         tx * ty * at(i + 1, j + 1);
}

double l2_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double rel_l2(const std::vector<double>& a, const std::vector<double>& ref) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - ref[i]) * (a[i] - ref[i]);
    den += ref[i] * ref[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

// Sum over the nearest periodic images.
double periodic_gaussian(double g0, double r0, double chi, const std::array<double, 2>& V, double x, double y,
                         const std::array<double, 2>& c, double t, int Nx, int Ny) {
  const double dx = wrap(x - c[0] - V[0] * t, Nx), dy = wrap(y - c[1] - V[1] * t, Ny);
  double s = 0.0;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      s += analytic_gaussian(g0, r0, chi, {0.0, 0.0}, {dx + a * Nx, dy + b * Ny}, t);
  return s;
}

std::vector<double> sample_gaussian(const GaussianConfig& cfg, const std::array<double, 2>& c, double t) {
  std::vector<double> out(std::size_t(cfg.Nx) * cfg.Ny);
  for (int y = 0; y < cfg.Ny; ++y)
    for (int x = 0; x < cfg.Nx; ++x)
      out[x + std::size_t(cfg.Nx) * y] = periodic_gaussian(cfg.g0, cfg.r0, cfg.chi, cfg.V, x, y, c, t, cfg.Nx, cfg.Ny);
  return out;
}

// u = (d psi/dy, -d psi/dx) by centered differences.
void velocity_from_psi(const std::vector<double>& psi, int Nx, int Ny, std::vector<double>& ux, std::vector<double>& uy) {
  ux.assign(psi.size(), 0.0);
  uy.assign(psi.size(), 0.0);
  for (int y = 0; y < Ny; ++y)
    for (int x = 0; x < Nx; ++x) {
      const int xp = (x + 1) % Nx, xm = (x + Nx - 1) % Nx, yp = (y + 1) % Ny, ym = (y + Ny - 1) % Ny;
      const std::size_t n = x + std::size_t(Nx) * y;
      ux[n] = 0.5 * (psi[x + std::size_t(Nx) * yp] - psi[x + std::size_t(Nx) * ym]);
      uy[n] = -0.5 * (psi[xp + std::size_t(Nx) * y] - psi[xm + std::size_t(Nx) * y]);
    }
}

std::vector<double> curl(const std::vector<double>& jx, const std::vector<double>& jy, int Nx, int Ny) {
  std::vector<double> w(jx.size());
  for (int y = 0; y < Ny; ++y)
    for (int x = 0; x < Nx; ++x) {
      const int xp = (x + 1) % Nx, xm = (x + Nx - 1) % Nx, yp = (y + 1) % Ny, ym = (y + Ny - 1) % Ny;
      w[x + std::size_t(Nx) * y] = 0.5 * (jy[xp + std::size_t(Nx) * y] - jy[xm + std::size_t(Nx) * y]) -
                                  0.5 * (jx[x + std::size_t(Nx) * yp] - jx[x + std::size_t(Nx) * ym]);
    }
  return w;
}

std::vector<double> vorticity_of(const std::vector<double>& psi, int Nx, int Ny) {
  std::vector<double> ux, uy;
  velocity_from_psi(psi, Nx, Ny, ux, uy);
  return curl(ux, uy, Nx, Ny);
}

void check_config(const GaussianConfig& cfg) {
  if (!(cfg.r0 >= 3.0)) throw ConfigError("gaussian: r0 must be >= 3");
  if (std::hypot(cfg.V[0], cfg.V[1]) > 0.2) throw ConfigError("gaussian: |V| must be <= 0.2");
  if (cfg.Nx < 8 || cfg.Ny < 8) throw ConfigError("gaussian: grid too small");
  if (cfg.steps < 0) throw ConfigError("gaussian: steps must be >= 0");
  if (!(cfg.chi >= 0.0)) throw ConfigError("gaussian: transport coefficient must be >= 0");
}

std::array<double, 2> center_of(const GaussianConfig& cfg) {
  return cfg.center ? *cfg.center : std::array<double, 2>{0.5 * (cfg.Nx - 1), 0.5 * (cfg.Ny - 1)};
}

bool dump_due(const GaussianConfig& cfg, std::int64_t t) {
  return t == 0 || t == cfg.steps || (cfg.dump_every > 0 && t % cfg.dump_every == 0);
}

AnisotropyReport make_report(std::int64_t t, const std::vector<double>& field, const std::vector<double>& ref, int Nx,
                             int Ny) {
  Anisotropy a = anisotropy_metric(field, Nx, Ny);
  AnisotropyReport r;
  r.t = t;
  r.cx = a.cx;
  r.cy = a.cy;
  r.e = a.e;
  r.anisotropy = a.anisotropy;
  r.l2_error = rel_l2(field, ref);
  return r;
}

template <class FieldFn, class RefFn>
std::vector<AnisotropyReport> run_loop(LatticeState& st, const GaussianConfig& cfg, FieldFn field, RefFn ref,
                                       const DumpFn& dump) {
  std::vector<AnisotropyReport> out;
  const double norm0 = l2_norm(field(st));
  const double mass0 = total_mass(st);
  for (std::int64_t t = 0;; ++t) {
    if (dump_due(cfg, t)) {
      auto f = field(st);
      out.push_back(make_report(t, f, ref(double(t)), cfg.Nx, cfg.Ny));
      if (dump) dump(t, f);
    }
    if (t == cfg.steps) break;
    step(st, cfg.jobs);
    if ((t + 1) % 100 == 0 || t + 1 == cfg.steps) {
      const double n = l2_norm(field(st));
      if (!(n <= 10.0 * norm0)) throw NumericalError("instability detected at step " + std::to_string(t + 1));
      if (!std::isfinite(total_mass(st)) || std::abs(total_mass(st) - mass0) > 1e-10 * std::abs(mass0))
        throw NumericalError("mass drift above 1e-10 at step " + std::to_string(t + 1));
    }
  }
  return out;
}

}  // namespace

double analytic_gaussian(double g0, double r0, double chi, const std::array<double, 2>& V,
                         const std::array<double, 2>& r, double t) {
  const double w = r0 * r0 + 4.0 * chi * t;
  const double dx = r[0] - V[0] * t, dy = r[1] - V[1] * t;
  return g0 * r0 * r0 / w * std::exp(-(dx * dx + dy * dy) / w);
}

std::array<double, 2> periodic_centroid(const std::vector<double>& field, int Nx, int Ny, double threshold) {
  double peak = 0.0;
  for (double v : field) peak = std::max(peak, std::abs(v));
  if (!(peak > 0.0)) throw DomainError("periodic_centroid: field is zero");
  double cxc = 0, cxs = 0, cyc = 0, cys = 0;
  for (int y = 0; y < Ny; ++y)
    for (int x = 0; x < Nx; ++x) {
      const double w = std::abs(field[x + std::size_t(Nx) * y]);
      if (w < threshold * peak) continue;
      cxc += w * std::cos(2.0 * kPi * x / Nx);
      cxs += w * std::sin(2.0 * kPi * x / Nx);
      cyc += w * std::cos(2.0 * kPi * y / Ny);
      cys += w * std::sin(2.0 * kPi * y / Ny);
    }
  double cx = std::atan2(cxs, cxc) * Nx / (2.0 * kPi), cy = std::atan2(cys, cyc) * Ny / (2.0 * kPi);
  if (cx < 0) cx += Nx;
  if (cy < 0) cy += Ny;
  return {cx, cy};
}

double radial_variance(const std::vector<double>& field, int Nx, int Ny, const std::array<double, 2>& c) {
  double num = 0.0, den = 0.0;
  for (int y = 0; y < Ny; ++y)
    for (int x = 0; x < Nx; ++x) {
      const double w = field[x + std::size_t(Nx) * y];
      const double dx = wrap(x - c[0], Nx), dy = wrap(y - c[1], Ny);
      num += w * (dx * dx + dy * dy);
      den += w;
    }
  return num / den;
}

Anisotropy anisotropy_metric(const std::vector<double>& field, int Nx, int Ny, const AnisotropyOptions& opt) {
  if (field.size() != std::size_t(Nx) * Ny) throw ConfigError("anisotropy_metric: field size mismatch");
  if (opt.rings < 1 || opt.angles < 17) throw ConfigError("anisotropy_metric: need >= 1 ring and >= 17 angles");
  Anisotropy a;
  const auto c = opt.center ? *opt.center : periodic_centroid(field, Nx, Ny, opt.threshold);
  a.cx = c[0];
  a.cy = c[1];
  double R;
  if (opt.radius) {
    R = *opt.radius;
  } else {
    double peak = 0.0;
    for (double v : field) peak = std::max(peak, std::abs(v));
    R = 0.0;
    for (int y = 0; y < Ny; ++y)
      for (int x = 0; x < Nx; ++x)
        if (std::abs(field[x + std::size_t(Nx) * y]) >= opt.threshold * peak)
          R = std::max(R, std::hypot(wrap(x - c[0], Nx), wrap(y - c[1], Ny)));
  }
  auto sample = opt.sample ? opt.sample : [&](double x, double y) { return bilinear(field, Nx, Ny, x, y); };
  std::vector<double> ring(opt.angles);
  for (int i = 0; i < opt.rings; ++i) {
    const double r = R * (i + 0.5) / opt.rings;
    for (int j = 0; j < opt.angles; ++j) {
      const double th = 2.0 * kPi * j / opt.angles;
      ring[j] = sample(c[0] + r * std::cos(th), c[1] + r * std::sin(th));
    }
    for (int m = 0; m <= 8; ++m) {
      cplx s = 0.0;
      for (int j = 0; j < opt.angles; ++j) s += ring[j] * std::polar(1.0, -2.0 * kPi * m * j / opt.angles);
      a.e[m] += std::norm(s / double(opt.angles));
    }
  }
  double hi = 0.0;
  for (int m = 1; m <= 8; ++m) hi += a.e[m];
  a.anisotropy = a.e[0] > 0.0 ? hi / a.e[0] : 0.0;
  return a;
}

std::vector<AnisotropyReport> run_gaussian_dot(const Model& model, const GaussianConfig& cfg, const DumpFn& dump) {
  check_config(cfg);
  if (model.kind != ModelKind::D2Q9_AD) throw ConfigError("run_gaussian_dot: model must be D2Q9-AD");
  const auto Vm = model.advection_velocity();
  if (Vm[0] != cfg.V[0] || Vm[1] != cfg.V[1])
    throw ConfigError("run_gaussian_dot: model velocity (vx, vy) differs from the config velocity");
  const auto c = center_of(cfg);
  LatticeState st(model, {cfg.Nx, cfg.Ny, 1});
  ConservedFields init;
  init.rho = sample_gaussian(cfg, c, 0.0);
  for (double& v : init.rho) v += 1.0;
  initialize_equilibrium(st, init);
  auto field = [](const LatticeState& s) {
    auto r = conserved_fields(s).rho;
    for (double& v : r) v -= 1.0;
    return r;
  };
  auto ref = [&](double t) { return sample_gaussian(cfg, c, t); };
  return run_loop(st, cfg, field, ref, dump);
}

std::vector<AnisotropyReport> run_gaussian_vortex(const Model& model, const GaussianConfig& cfg, const DumpFn& dump) {
  check_config(cfg);
  if (model.kind != ModelKind::D2Q9_NS && model.kind != ModelKind::D2Q13_NS)
    throw ConfigError("run_gaussian_vortex: model must be D2Q9-NS or D2Q13-NS");
  const auto c = center_of(cfg);
  const int Nx = cfg.Nx, Ny = cfg.Ny;
  LatticeState st(model, {Nx, Ny, 1});
  std::vector<double> ux, uy;
  velocity_from_psi(sample_gaussian(cfg, c, 0.0), Nx, Ny, ux, uy);
  ConservedFields init;
  init.rho.assign(ux.size(), 1.0);
  init.jx.resize(ux.size());
  init.jy.resize(ux.size());
  for (std::size_t n = 0; n < ux.size(); ++n) {
    init.jx[n] = cfg.V[0] + ux[n];
    init.jy[n] = cfg.V[1] + uy[n];
  }
  initialize_equilibrium(st, init);
  auto field = [Nx, Ny](const LatticeState& s) {
    auto f = conserved_fields(s);
    return curl(f.jx, f.jy, Nx, Ny);
  };
  auto ref = [&](double t) { return vorticity_of(sample_gaussian(cfg, c, t), Nx, Ny); };
  return run_loop(st, cfg, field, ref, dump);
}

namespace {

// Fourier amplitude of a field at integer wavenumbers (nx, ny).
cplx fourier_at(const std::vector<double>& v, int Nx, int Ny, int nx, int ny) {
  cplx s = 0.0;
  std::vector<cplx> ex(Nx), ey(Ny);
  for (int x = 0; x < Nx; ++x) ex[x] = std::polar(1.0, -2.0 * kPi * double(nx) * x / Nx);
  for (int y = 0; y < Ny; ++y) ey[y] = std::polar(1.0, -2.0 * kPi * double(ny) * y / Ny);
  for (int y = 0; y < Ny; ++y) {
    cplx row = 0.0;
    for (int x = 0; x < Nx; ++x) row += v[x + std::size_t(Nx) * y] * ex[x];
    s += row * ey[y];
  }
  return s;
}

std::vector<double> transverse(const LatticeState& st, const Eigen::Vector3d& kp) {
  auto f = conserved_fields(st);
  std::vector<double> out(f.jx.size());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = kp[0] * f.jx[n] + kp[1] * f.jy[n];
  return out;
}

}  // namespace

PlaneWaveResult plane_wave_relative_advection(const Model& model, double V, std::array<int, 2> n, int N, int jobs,
                                              PlaneWaveInit init, double eps) {
  if (model.advection_diffusion()) throw ConfigError("plane_wave_relative_advection: model must be Navier-Stokes");
  if (n[0] == 0 && n[1] == 0) throw ConfigError("plane_wave_relative_advection: k must be nonzero");
  if (N < 8) throw ConfigError("plane_wave_relative_advection: grid too small");
  const Eigen::Vector3d k(2.0 * kPi * n[0] / N, 2.0 * kPi * n[1] / N, 0.0);
  const Eigen::Vector3d kh = k.normalized(), kp(-kh[1], kh[0], 0.0);
  Background bg;
  bg.V = {V * kh[0], V * kh[1], 0.0};

  const cplx z = tracked_eigenvalue(model, bg, k, "shear");
  PlaneWaveResult res;
  res.theory = V != 0.0 ? -std::arg(z) / (k.norm() * V) : std::nan("");

  LatticeState st(model, {N, N, 1});
  const int q = model.q();
  ConservedFields base;
  base.rho.assign(std::size_t(N) * N, 1.0);
  base.jx.assign(base.rho.size(), bg.V[0]);
  base.jy.assign(base.rho.size(), bg.V[1]);
  if (init == PlaneWaveInit::equilibrium) {
    for (int y = 0; y < N; ++y)
      for (int x = 0; x < N; ++x) {
        const double ph = std::cos(k[0] * x + k[1] * y);
        base.jx[x + std::size_t(N) * y] += eps * kp[0] * ph;
        base.jy[x + std::size_t(N) * y] += eps * kp[1] * ph;
      }
    initialize_equilibrium(st, base);
  } else {
    initialize_equilibrium(st, base);
    // add the shear eigenvector of E(k), scaled so its transverse momentum amplitude is eps
    const Eigen::MatrixXcd E = evolution_matrix(model, bg, k);
    Spectrum sp = spectrum(E);
    int best = 0;
    for (int j = 1; j < q; ++j)
      if (std::abs(sp.values[j] - z) < std::abs(sp.values[best] - z)) best = j;
    Eigen::VectorXcd v = sp.vectors.col(best);
    const Eigen::VectorXcd m = model.basis.matrix.cast<cplx>() * v;
    v *= eps / (kp[0] * m[1] + kp[1] * m[2]);
    for (int y = 0; y < N; ++y)
      for (int x = 0; x < N; ++x) {
        const cplx e = std::polar(1.0, k[0] * x + k[1] * y);
        for (int p = 0; p < q; ++p) st.f(p, x + std::int64_t(N) * y) += (v[p] * e).real();
      }
  }

  // enough steps for the phase to advance by 2 pi, capped for slow waves
  const double omega = std::abs(std::arg(z));
  const int warm = init == PlaneWaveInit::equilibrium ? 200 : 0;
  const int steps = omega > 0.0 ? int(std::ceil(2.0 * kPi / omega)) : 100;
  if (steps > 200000) throw ConfigError("plane_wave_relative_advection: wave too slow to advance 2 pi");
  for (int t = 0; t < warm; ++t) step(st, jobs);
  cplx prev = fourier_at(transverse(st, kp), N, N, n[0], n[1]);
  double phase = 0.0;
  for (int t = 0; t < steps; ++t) {
    step(st, jobs);
    const cplx a = fourier_at(transverse(st, kp), N, N, n[0], n[1]);
    phase += std::arg(a / prev);
    prev = a;
  }
  res.steps = warm + steps;
  res.phase_velocity = -phase / steps / k.norm();
  res.measured = V != 0.0 ? res.phase_velocity / V : res.phase_velocity;
  res.rel_error = V != 0.0 ? std::abs(res.measured - res.theory) / std::abs(res.theory) : std::abs(res.phase_velocity);

  // secondary peaks of the transverse momentum spectrum
  const auto jt = transverse(st, kp);
  std::vector<cplx> a(jt.begin(), jt.end());
  auto F = dft2(a, N, N, -1);
  const double primary = std::abs(F[((n[0] % N + N) % N) + std::size_t(N) * ((n[1] % N + N) % N)]);
  double second = 0.0;
  for (int y = 0; y < N; ++y)
    for (int x = 0; x < N; ++x) {
      const bool plus = x == (n[0] % N + N) % N && y == (n[1] % N + N) % N;
      const bool minus = x == (-n[0] % N + N) % N && y == (-n[1] % N + N) % N;
      if (plus || minus || (x == 0 && y == 0)) continue;
      second = std::max(second, std::abs(F[x + std::size_t(N) * y]));
    }
  res.contamination = second / primary;
  if (res.contamination > 0.01)
    throw NumericalError("plane_wave_relative_advection: mode contaminated (secondary peak " +
                         std::to_string(res.contamination) + " of primary)");
  return res;
}

GrowthCheck kernel_growth_check(const Model& model, std::array<int, 3> dims, int nx, double V, int warmup, int jobs,
                                double eps) {
  const double k = 2.0 * kPi * nx / dims[0];
  LatticeState st(model, dims);
  const std::int64_t N = st.nodes();
  ConservedFields init;
  init.rho.assign(N, 1.0);
  Background bg;
  GrowthCheck out;
  std::vector<double> probe(N);
  if (model.advection_diffusion()) {
    const auto Vm = model.advection_velocity();
    bg.V = Vm;
    for (std::int64_t n = 0; n < N; ++n) init.rho[n] += eps * std::cos(k * st.coords(n)[0]);
    out.mode = "density";
  } else {
    bg.V = {V, 0.0, 0.0};
    init.jx.assign(N, V);
    init.jy.assign(N, 0.0);
    if (model.d() == 3) init.jz.assign(N, 0.0);
    for (std::int64_t n = 0; n < N; ++n) init.jy[n] = eps * std::cos(k * st.coords(n)[0]);
    out.mode = "shear";
  }
  initialize_equilibrium(st, init);
  auto amplitude = [&]() {
    auto f = conserved_fields(st);
    const auto& v = model.advection_diffusion() ? f.rho : f.jy;
    cplx s = 0.0;
    for (std::int64_t n = 0; n < N; ++n) s += v[n] * std::polar(1.0, -k * st.coords(n)[0]);
    return s;
  };
  for (int t = 0; t < warmup; ++t) step(st, jobs);
  const cplx a0 = amplitude();
  step(st, jobs);
  const cplx a1 = amplitude();
  out.simulated = a1 / a0;
  out.predicted = tracked_eigenvalue(model, bg, Eigen::Vector3d(k, 0.0, 0.0), out.mode);
  out.rel_error = std::abs(out.simulated - out.predicted) / std::abs(out.predicted);
  return out;
}

std::vector<cplx> dft2(const std::vector<cplx>& a, int Nx, int Ny, int sign) {
  if (a.size() != std::size_t(Nx) * Ny) throw ConfigError("dft2: size mismatch");
  std::vector<cplx> wx(Nx), wy(Ny), tmp(a.size()), out(a.size());
  for (int i = 0; i < Nx; ++i) wx[i] = std::polar(1.0, sign * 2.0 * kPi * i / Nx);
  for (int i = 0; i < Ny; ++i) wy[i] = std::polar(1.0, sign * 2.0 * kPi * i / Ny);
  for (int y = 0; y < Ny; ++y)
    for (int m = 0; m < Nx; ++m) {
      cplx s = 0.0;
      for (int x = 0; x < Nx; ++x) s += a[x + std::size_t(Nx) * y] * wx[(std::size_t(m) * x) % Nx];
      tmp[m + std::size_t(Nx) * y] = s;
    }
  for (int m = 0; m < Nx; ++m)
    for (int l = 0; l < Ny; ++l) {
      cplx s = 0.0;
      for (int y = 0; y < Ny; ++y) s += tmp[m + std::size_t(Nx) * y] * wy[(std::size_t(l) * y) % Ny];
      out[m + std::size_t(Nx) * l] = s;
    }
  return out;
}

double ToyField::vorticity_at(double x, double y) const {
  double s = 0.0;
  for (int my = 0; my < N; ++my)
    for (int mx = 0; mx < N; ++mx) {
      const int kx = mx < N / 2 ? mx : mx - N, ky = my < N / 2 ? my : my - N;
      const double ph = 2.0 * kPi * (kx * x + ky * y) / N;
      s += (vorticity_hat[mx + std::size_t(N) * my] * std::polar(1.0, ph)).real();
    }
  return s / (double(N) * N);
}

ToyField fourier_toy_evolution(const ToyConfig& cfg) {
  if (cfg.N < 8) throw ConfigError("fourier_toy_evolution: N too small");
  const int N = cfg.N;
  const double th = cfg.angle_deg * kPi / 180.0;
  const double Vx = cfg.V * std::cos(th), Vy = cfg.V * std::sin(th);
  const std::array<double, 2> c0 = cfg.center ? *cfg.center : std::array<double, 2>{0.5 * N, 0.5 * N};
  auto g = cfg.g ? cfg.g : [](double kx, double ky) {
    const double k2 = kx * kx + ky * ky;
    if (k2 == 0.0) return 1.0;
    const double a = std::atan2(ky, kx);
    return 1.0 + 0.01 * (std::cos(4.0 * a) - std::cos(2.0 * a)) * k2;
  };
  ToyField out;
  out.N = N;
  out.center = {c0[0] + Vx * cfg.t, c0[1] + Vy * cfg.t};
  std::vector<cplx> psi_hat(std::size_t(N) * N);
  out.vorticity_hat.resize(psi_hat.size());
  const double r2 = cfg.r0 * cfg.r0;
  for (int my = 0; my < N; ++my)
    for (int mx = 0; mx < N; ++mx) {
      const double kx = 2.0 * kPi * (mx < N / 2 ? mx : mx - N) / N;
      const double ky = 2.0 * kPi * (my < N / 2 ? my : my - N) / N;
      const double k2 = kx * kx + ky * ky;
      const cplx spec = kPi * r2 * cfg.g0 * std::exp(-r2 * k2 / 4.0) * std::polar(1.0, -(kx * c0[0] + ky * c0[1]));
      const cplx evo = std::exp(cplx(-cfg.nu * k2 * cfg.t, -g(kx, ky) * (kx * Vx + ky * Vy) * cfg.t));
      const std::size_t i = mx + std::size_t(N) * my;
      psi_hat[i] = spec * evo;
      out.vorticity_hat[i] = k2 * psi_hat[i];
    }
  auto psi = dft2(psi_hat, N, N, +1);
  auto w = dft2(out.vorticity_hat, N, N, +1);
  out.psi.resize(psi.size());
  out.vorticity.resize(w.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    out.psi[i] = psi[i].real() / (double(N) * N);
    out.vorticity[i] = w[i].real() / (double(N) * N);
  }
  return out;
}

void write_report_csv(std::ostream& os, const std::vector<AnisotropyReport>& reports) {
  os << "t,center_x,center_y";
  for (int m = 0; m <= 8; ++m) os << ",e_" << m;
  os << ",anisotropy,l2_error\n" << std::setprecision(17);
  for (const auto& r : reports) {
    os << r.t << ',' << r.cx << ',' << r.cy;
    for (double e : r.e) os << ',' << e;
    os << ',' << r.anisotropy << ',' << r.l2_error << '\n';
  }
}

}  // namespace lbmlab
