#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "lbmlab/kernel.hpp"
#include "lbmlab/model.hpp"

namespace lbmlab {

// g0 r0^2/(r0^2 + 4 chi t) exp(-|r - V t|^2/(r0^2 + 4 chi t))
double analytic_gaussian(double g0, double r0, double chi, const std::array<double, 2>& V,
                         const std::array<double, 2>& r, double t);

struct GaussianConfig {
  double g0 = 1e-3;
  double r0 = 5.0;
  std::array<double, 2> V{0.1, 0.0};
  double chi = 0.008;  // kappa or nu, used by the analytic reference
  int Nx = 101, Ny = 101;
  int steps = 3200;
  int dump_every = 0;  // 0: first and last step only
  std::optional<std::array<double, 2>> center;  // default: domain middle
  int jobs = 1;
};

struct Anisotropy {
  double cx = 0, cy = 0;
  std::array<double, 9> e{};
  double anisotropy = 0;
};

struct AnisotropyReport {
  std::int64_t t = 0;
  double cx = 0, cy = 0;
  std::array<double, 9> e{};
  double anisotropy = 0;
  double l2_error = 0;
};

struct AnisotropyOptions {
  int rings = 16;
  int angles = 64;
  double threshold = 0.1;
  std::optional<std::array<double, 2>> center;  // skip the centroid estimate
  std::optional<double> radius;                 // outer ring radius; default: farthest node above threshold
  // field value at a real point; default: periodic bilinear interpolation of the grid
  std::function<double(double, double)> sample;
};

// Angular harmonic energies e_m (m = 0..8) summed over rings; anisotropy = sum_{m>=1} e_m / e_0.
// field is row-major, index x + Nx y.
Anisotropy anisotropy_metric(const std::vector<double>& field, int Nx, int Ny, const AnisotropyOptions& opt = {});

// Intensity-weighted centroid of |field| above threshold * peak, periodic in both axes.
std::array<double, 2> periodic_centroid(const std::vector<double>& field, int Nx, int Ny, double threshold = 0.1);

// <|r - c|^2> weighted by field, minimum-image distances from c.
double radial_variance(const std::vector<double>& field, int Nx, int Ny, const std::array<double, 2>& c);

using DumpFn = std::function<void(std::int64_t t, const std::vector<double>& field)>;

// D2Q9-AD advection-diffusion of rho = 1 + Gamma(r, 0); the reported field is rho - 1.
std::vector<AnisotropyReport> run_gaussian_dot(const Model& model, const GaussianConfig& cfg, const DumpFn& dump = {});

// Navier-Stokes advection of a Gaussian stream function; the reported field is the vorticity.
std::vector<AnisotropyReport> run_gaussian_vortex(const Model& model, const GaussianConfig& cfg,
                                                  const DumpFn& dump = {});

struct PlaneWaveResult {
  double measured = 0;        // phase velocity / V; the phase velocity itself when V = 0
  double theory = 0;          // from the tracked shear eigenvalue
  double rel_error = 0;
  double phase_velocity = 0;  // measured phase velocity along k
  double contamination = 0;   // largest secondary Fourier peak / primary
  int steps = 0;
};

enum class PlaneWaveInit { eigenvector, equilibrium };

// Transverse plane wave with k = 2 pi (nx, ny)/N advected by V along k on an N x N periodic grid.
PlaneWaveResult plane_wave_relative_advection(const Model& model, double V, std::array<int, 2> n, int N, int jobs = 1,
                                              PlaneWaveInit init = PlaneWaveInit::eigenvector, double eps = 1e-6);

struct GrowthCheck {
  std::complex<double> simulated, predicted;
  double rel_error = 0;
  std::string mode;
};

// Small-amplitude plane wave started from equilibrium; the per-step amplification of its Fourier
// amplitude after `warmup` steps is compared with the dominant tracked eigenvalue.
// AD: density wave with the model's advection velocity. NS: shear wave with k along x and V along x.
GrowthCheck kernel_growth_check(const Model& model, std::array<int, 3> dims, int nx, double V, int warmup = 200,
                                int jobs = 1, double eps = 1e-7);

struct ToyConfig {
  int N = 80;
  double r0 = 4.0;
  double g0 = 1e-2;
  double nu = 0.0;
  double V = 0.1;
  double angle_deg = 14.0;
  double t = 0.0;
  std::optional<std::array<double, 2>> center;  // default: domain middle
  std::function<double(double kx, double ky)> g;  // default: 1 + 0.01 (cos 4θ - cos 2θ) k^2
};

struct ToyField {
  int N = 0;
  std::vector<double> psi, vorticity;
  std::vector<std::complex<double>> vorticity_hat;  // spectral coefficients, index mx + N my
  std::array<double, 2> center{};                   // advected center c + V t

  // Trigonometric interpolation of the vorticity at a real point.
  double vorticity_at(double x, double y) const;
};

ToyField fourier_toy_evolution(const ToyConfig& cfg);

// 2D DFT, forward sign -1, unnormalized; row-major N x N.
std::vector<std::complex<double>> dft2(const std::vector<std::complex<double>>& a, int Nx, int Ny, int sign);

void write_report_csv(std::ostream& os, const std::vector<AnisotropyReport>& reports);

}  // namespace lbmlab
