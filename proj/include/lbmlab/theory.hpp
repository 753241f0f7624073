#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lbmlab/model.hpp"

namespace lbmlab {

double sigma_from_s(double s);
double s_from_sigma(double sigma);

// Henon parameters by row index: sig[4] = sigma_4.
using HenonParams = std::map<int, double>;
HenonParams henon_params(const Model& model);

// Closed-form transport coefficients. Keys: kappa; nu0, nu_eff; nu0, zeta0, cs, nu_eff, nu_v2.
ParamMap predicted_transport(const std::string& model, const ParamMap& params, const HenonParams& sig,
                             const std::array<double, 3>& V = {0.0, 0.0, 0.0});

// Anomalous-advection amplitudes of D2Q9-AD; A1 needs d1 = -1, A2 needs sigma1 sigma4 = 1/12.
double anomaly_A1(double alpha, double d1, double sigma1, double sigma3, double sigma4);
double anomaly_A2(double alpha, double d1, double sigma1, double sigma3, double sigma4);

struct NSOrder3 {
  double h0, h1, h3, h4, g1, g2, g3;
  bool isotropic;  // sigma3 = sigma4 and sigma4 sigma6 = 1/12
  // transverse wave phase velocities per unit V
  double perpendicular(double theta) const;  // (1 - 12 s4 s6) sin 4θ / 24
  double parallel(double theta) const;       // [16 s4 (s4 - s6) + (1 - 12 s4 s6) sin^2 2θ] / 24
  double sigma4 = 0, sigma6 = 0;
};
NSOrder3 d2q9_ns_order3(double sigma3, double sigma4, double sigma6, double alpha = -2.0, double beta = 1.0);

struct D2Q13Order3 {
  double nu_v2;               // 12 (7 + 6q) / (77 (3 + c1)), nu_eff = nu0 (1 - nu_v2 V^2)
  double perpendicular_amp;   // v_phi / V = perpendicular_amp sin 4θ
  double parallel_f2;         // coefficient of V sin^2 2θ
  double parallel_const;      // coefficient of V
  double isotropic_residual;  // (3 + c1)/24 (12 s4^2 - 1), valid at sigma6 = sigma8 = 1/(12 sigma4)
  double perpendicular(double theta, double V) const;
  double parallel(double theta, double V) const;
};
D2Q13Order3 d2q13_order3(double sigma4, double sigma6, double sigma8, double c1, double q);

struct D3Assignment {
  double sigma5 = 0;
  std::optional<double> d1, d2, sigma6;
  bool feasible = true;
  std::string note;
};
// case 1: fixed alpha, sigma1, sigma6 -> d1 (and d2), sigma5.  case 2: fixed alpha, sigma1, d1 -> sigma6, sigma5.
D3Assignment d3_conditions(const std::string& model, int which, double alpha, double sigma1, double sigma6_or_d1);

// TRT rows (even rates = sigma6, odd rates = sigma1): returns sigma6 (and d1, d2 for case 1).
D3Assignment d3_trt(const std::string& model, int which, double alpha, double sigma1);

// Null hyper-diffusivity at V = 0: returns (sigma11, sigma5).
std::pair<double, double> hyperdiffusivity_null(const std::string& model, double alpha, double beta, double sigma1,
                                                double sigma6);

struct TuningCondition {
  std::string name;
  std::string description;
  // normalized residual: |sum of terms| / max |term|; 0 exactly at the condition
  std::function<double(const Model&)> residual;
};
const std::vector<TuningCondition>& tuning_conditions();
const TuningCondition& tuning_condition(const std::string& name);

// Normalized residual helper: |sum| / max |term|.
double normalized_residual(std::initializer_list<double> terms);

// All roots of f on [lo, hi] found by scanning and bisection.
std::vector<double> bracket_roots(const std::function<double(double)>& f, double lo = 1e-3, double hi = 10.0,
                                  int scan = 2000, int iterations = 200);

struct TuneResult {
  ParamMap params;                 // model parameters (alpha, d1, ...)
  ParamMap sigmas;                 // "sigma4" -> value, for every rate symbol set by the tuning
  std::vector<ParamMap> alternatives;  // other roots
  std::string condition;           // which TuningCondition it satisfies
  double verified = 0;             // dispersion-measured residual
};

// objective in {isotropic-advection, zero-anomaly, quartic, null-hyperdiffusivity}; route picks between
// alternative isotropy conditions ("d1" / "sigma14" for D2Q9-AD, "case1" / "case2" / "trt1" / "trt2" in 3D).
// fixed holds model parameters, Henon parameters ("sigma1"), and optionally "kappa", "nu", "vmax" (stability check speed).
TuneResult tune(const std::string& model, const std::string& objective, const std::string& route,
                const ParamMap& fixed);

}  // namespace lbmlab
