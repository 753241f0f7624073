#pragma once

#include <array>
#include <complex>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "lbmlab/errors.hpp"
#include "lbmlab/rational.hpp"

namespace lbmlab {

using ParamMap = std::map<std::string, double>;

enum class ModelKind { D2Q5, D2Q9_AD, D2Q9_NS, D2Q13_NS, D3Q15_AD, D3Q19_AD };

struct VelocitySet {
  std::string name;
  int dimension = 2;
  std::vector<std::array<int, 3>> velocities;
  std::vector<int> opposite;

  int size() const { return static_cast<int>(velocities.size()); }
};

struct MomentBasis {
  std::vector<std::vector<Rational>> exact;  // row k, column p
  Eigen::MatrixXd matrix;
  Eigen::MatrixXd inverse;
  std::vector<int> parity;  // +1 or -1
  std::vector<std::string> labels;
};

struct EquilibriumSpec {
  int n_conserved = 1;
  double alpha = 0, beta = 0, gamma = 0, c1 = 0, q = 0, d1 = 0, d2 = 0, a = 0;
};

struct RelaxationVector {
  Eigen::VectorXd s;
  std::vector<std::string> symbol;  // rate name per row, empty on conserved rows

  double sigma(int row) const { return 1.0 / s[row] - 0.5; }
};

struct Model {
  ModelKind kind{};
  std::string name;
  VelocitySet velocity_set;
  MomentBasis basis;
  EquilibriumSpec equilibrium;
  RelaxationVector rates;
  ParamMap params;
  int n_conserved = 1;

  int q() const { return velocity_set.size(); }
  int d() const { return velocity_set.dimension; }
  bool advection_diffusion() const { return n_conserved == 1; }
  double param(const std::string& key) const;
  // Advection velocity of AD models (vx, vy, vz params); zero for NS models.
  std::array<double, 3> advection_velocity() const;
};

const std::vector<std::string>& model_names();
VelocitySet velocity_set(std::string_view name);

// rates: s values keyed by symbol ("s4"); "sigma4" keys are accepted as Henon parameters.
Model build_model(std::string_view name, const ParamMap& params, const ParamMap& rates);

// Names of the rate symbols / parameters a model needs.
std::vector<std::string> rate_symbols(std::string_view name);
std::vector<std::string> required_params(std::string_view name);

Eigen::VectorXd moments_from_f(const Model& model, const Eigen::VectorXd& f);
Eigen::VectorXd f_from_moments(const Model& model, const Eigen::VectorXd& m);

namespace detail {
template <class S>
bool nonpositive(const S& rho) {
  if constexpr (std::is_floating_point_v<S>) return !(rho > 0.0);
  else return false;
}
}  // namespace detail

// Equilibrium moments for conserved vector w (rho or rho, j). V is the advection
// velocity used by AD models and ignored by NS models. out has length q.
template <class S>
void equilibrium_moments(const Model& model, const S* w, const std::array<S, 3>& V, S* out) {
  const EquilibriumSpec& e = model.equilibrium;
  switch (model.kind) {
    case ModelKind::D2Q5: {
      const S rho = w[0];
      out[0] = rho;
      out[1] = rho * V[0];
      out[2] = rho * V[1];
      out[3] = e.alpha * rho;
      out[4] = 0.0 * rho;
      break;
    }
    case ModelKind::D2Q9_AD: {
      const S rho = w[0];
      const S V2 = V[0] * V[0] + V[1] * V[1];
      out[0] = rho;
      out[1] = rho * V[0];
      out[2] = rho * V[1];
      out[3] = rho * (e.alpha + 3.0 * V2);
      out[4] = rho * (V[0] * V[0] - V[1] * V[1]);
      out[5] = rho * V[0] * V[1];
      out[6] = e.d1 * rho * V[0];
      out[7] = e.d1 * rho * V[1];
      out[8] = rho * (e.beta + e.a * V2);
      break;
    }
    case ModelKind::D2Q9_NS: {
      const S rho = w[0], jx = w[1], jy = w[2];
      if (detail::nonpositive(rho)) throw DomainError("D2Q9-NS equilibrium requires rho > 0");
      const S j2 = jx * jx + jy * jy;
      out[0] = rho;
      out[1] = jx;
      out[2] = jy;
      out[3] = e.alpha * rho + 3.0 * j2 / rho;
      out[4] = (jx * jx - jy * jy) / rho;
      out[5] = jx * jy / rho;
      out[6] = -jx;
      out[7] = -jy;
      out[8] = e.beta * rho - 3.0 * j2 / rho;
      break;
    }
    case ModelKind::D2Q13_NS: {
      const S rho = w[0], jx = w[1], jy = w[2];
      if (detail::nonpositive(rho)) throw DomainError("D2Q13-NS equilibrium requires rho > 0");
      const S j2 = jx * jx + jy * jy;
      const double q = e.q, c1 = e.c1;
      const S qf = c1 - (36.0 * q - 35.0) / 77.0 * j2;
      const double r0 = -(63.0 * c1 + 65.0) / 24.0;
      const double rc = (42.0 * q - 105.0) / 22.0;
      out[0] = rho;
      out[1] = jx;
      out[2] = jy;
      out[3] = e.alpha * rho + 13.0 * j2 / rho;
      out[4] = (jx * jx - jy * jy) / rho;
      out[5] = jx * jy / rho;
      out[6] = jx * qf;
      out[7] = jy * qf;
      out[8] = jx * (r0 + q * jx * jx + rc * jy * jy);
      out[9] = jy * (r0 + rc * jx * jx + q * jy * jy);
      out[10] = e.beta * rho;
      out[11] = 0.0 * rho;
      out[12] = e.gamma * rho;
      break;
    }
    case ModelKind::D3Q15_AD: {
      const S rho = w[0];
      const S V2 = V[0] * V[0] + V[1] * V[1] + V[2] * V[2];
      out[0] = rho;
      for (int a = 0; a < 3; ++a) out[1 + a] = rho * V[a];
      out[4] = e.alpha * rho + rho * V2;
      out[5] = rho * (2.0 * V[0] * V[0] - V[1] * V[1] - V[2] * V[2]);
      out[6] = rho * (V[1] * V[1] - V[2] * V[2]);
      out[7] = rho * V[0] * V[1];
      out[8] = rho * V[1] * V[2];
      out[9] = rho * V[2] * V[0];
      for (int a = 0; a < 3; ++a) out[10 + a] = e.d1 * rho * V[a];
      out[13] = e.beta * rho;
      out[14] = 0.0 * rho;
      break;
    }
    case ModelKind::D3Q19_AD: {
      const S rho = w[0];
      const S V2 = V[0] * V[0] + V[1] * V[1] + V[2] * V[2];
      out[0] = rho;
      for (int a = 0; a < 3; ++a) out[1 + a] = rho * V[a];
      out[4] = e.alpha * rho + 19.0 * V2 * rho;
      out[5] = rho * (2.0 * V[0] * V[0] - V[1] * V[1] - V[2] * V[2]);
      out[6] = rho * (V[1] * V[1] - V[2] * V[2]);
      out[7] = rho * V[0] * V[1];
      out[8] = rho * V[1] * V[2];
      out[9] = rho * V[2] * V[0];
      for (int a = 0; a < 3; ++a) out[10 + a] = e.d1 * rho * V[a];
      out[13] = 0.0 * rho;
      out[14] = 0.0 * rho;
      out[15] = e.beta * rho;
      for (int a = 0; a < 3; ++a) out[16 + a] = e.d2 * rho * V[a];
      break;
    }
  }
}

// Convenience overload with the model's own advection velocity.
Eigen::VectorXd equilibrium_moments(const Model& model, const Eigen::VectorXd& conserved);

void write_model_file(std::ostream& os, const Model& model);
Model read_model_file(std::istream& is);

}  // namespace lbmlab
