#pragma once

#include <array>
#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lbmlab/model.hpp"

namespace lbmlab {

using cplx = std::complex<double>;

// Uniform background; S = cplx allows analytic continuation in V.
template <class S>
struct BackgroundT {
  double rho0 = 1.0;
  std::array<S, 3> V{};
};
using Background = BackgroundT<double>;

// J[k][c] = d m_eq,k / d w_c at (rho0, rho0 V); for AD models V is the advection velocity.
template <class S>
Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> linearize_equilibrium(const Model& model, const BackgroundT<S>& bg);

// k-independent part C = I + M^-1 S (J Pi - I) M, in f-space.
template <class S>
Eigen::MatrixXcd collision_matrix(const Model& model, const BackgroundT<S>& bg);

// diag(exp(-i k.c_p)) * C; k may be complex.
Eigen::MatrixXcd evolution_matrix(const Model& model, const Eigen::MatrixXcd& collision, const Eigen::Vector3cd& k);
Eigen::MatrixXcd evolution_matrix(const Model& model, const Background& bg, const Eigen::Vector3d& k);

struct Spectrum {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;  // unit columns
};

// Dense eigensolver (complex Schur) with a per-pair residual check.
Spectrum spectrum(const Eigen::MatrixXcd& E);

struct Coefficients {
  double a1 = 0, a2 = 0, a3 = 0, a4 = 0;
};

struct Fit {
  Coefficients coeffs;
  double residual = 0;  // RMS of |gamma - model|
};

// Least squares of gamma(k) = -i a1 k - a2 k^2 - i a3 k^3 - a4 k^4, real and imaginary parts separately.
Fit fit_expansion(const std::vector<double>& k, const std::vector<cplx>& gamma);

struct TrackedMode {
  std::string label;  // density, shear, acoustic+, acoustic-
  std::vector<double> k;
  std::vector<cplx> z;
  std::vector<cplx> gamma;
  Fit fit;
};

struct DispersionResult {
  Eigen::Vector3d direction;
  std::vector<double> k_samples;
  std::vector<Eigen::VectorXcd> eigenvalues;  // full spectrum per sample
  std::vector<TrackedMode> modes;
  std::vector<double> skipped_k;
  bool unstable = false;
  std::vector<double> unstable_k;

  const TrackedMode& mode(const std::string& label) const;
};

DispersionResult track_hydrodynamic_modes(const Model& model, const Background& bg, const Eigen::Vector3d& direction,
                                          const std::vector<double>& k_samples);

// Default k samples {1e-2 * 2^-m, m = 0..4}, ascending.
std::vector<double> default_k_samples();

// Taylor coefficients c_n of gamma(k) = sum c_n k^n along khat for the labelled mode, from a Cauchy
// integral on |k| = radius (trapezoid rule). The radius is halved if tracking around the circle fails.
struct ContourOptions {
  double radius = 0.1;
  int points = 64;
  int order = 6;
};
std::vector<cplx> taylor_coefficients(const Model& model, const Background& bg, const Eigen::Vector3d& khat,
                                      const std::string& label = "", const ContourOptions& opt = {});
Coefficients to_coefficients(const std::vector<cplx>& c);

// C[n][l]: coefficient of k^n |V|^l with V = |V| vhat, from a second contour |V| = v_radius.
struct VelocityContour {
  double v_radius = 0.05;
  int v_points = 8;
};
std::vector<std::vector<cplx>> velocity_expansion(const Model& model, const Eigen::Vector3d& vhat,
                                                  const Eigen::Vector3d& khat, const std::string& label,
                                                  const ContourOptions& opt = {}, const VelocityContour& vopt = {});

// Linear-in-V relative third-order phase-velocity correction h = a3 / a1 (both taken at first order in |V|).
double measure_anomalous_advection(const Model& model, const Eigen::Vector3d& V, const Eigen::Vector3d& khat,
                                   const std::string& label = "", const ContourOptions& opt = {},
                                   const VelocityContour& vopt = {});

// Exact eigenvalue of the labelled mode at a finite wavevector, continued from small k along k.
cplx tracked_eigenvalue(const Model& model, const Background& bg, const Eigen::Vector3d& k, const std::string& label);

struct StabilityResult {
  std::vector<Eigen::Vector3d> k;
  std::vector<double> max_modulus;
  double overall_max = 0;
  std::vector<Eigen::Vector3d> unstable;  // |z| > 1 + tol
  std::vector<Eigen::Vector3d> marginal;  // ||z| - 1| <= tol away from k = 0
};

StabilityResult stability_scan(const Model& model, const Background& bg, const std::vector<Eigen::Vector3d>& k_grid,
                               double tol = 1e-12);
// n points per axis in [-pi, pi] (endpoints included), d axes.
std::vector<Eigen::Vector3d> uniform_k_grid(int d, int n);

void write_dispersion_csv(std::ostream& os, double theta, const DispersionResult& r);
void write_coefficients_csv(std::ostream& os, const std::string& model, const Background& bg, double theta,
                            const DispersionResult& r, bool header);

}  // namespace lbmlab
