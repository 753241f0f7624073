#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lbmlab/model.hpp"

namespace lbmlab {

// Per-node conserved fields; j* arrays are empty for AD models.
struct ConservedFields {
  std::vector<double> rho, jx, jy, jz;
};

class LatticeState {
 public:
  // dims = {Nx, Ny, Nz}; Nz must be 1 for 2D models.
  LatticeState(const Model& model, std::array<int, 3> dims);

  const Model& model() const { return model_; }
  const std::array<int, 3>& dims() const { return dims_; }
  std::int64_t nodes() const { return nodes_; }
  std::int64_t index(int x, int y, int z = 0) const { return x + std::int64_t(dims_[0]) * (y + std::int64_t(dims_[1]) * z); }
  std::array<int, 3> coords(std::int64_t node) const;

  // f is stored velocity-major: f[p * nodes + node].
  double& f(int p, std::int64_t node) { return f_[p * nodes_ + node]; }
  double f(int p, std::int64_t node) const { return f_[p * nodes_ + node]; }
  std::vector<double>& data() { return f_; }
  const std::vector<double>& data() const { return f_; }
  std::vector<double>& scratch() { return g_; }

  std::int64_t time = 0;

 private:
  Model model_;
  std::array<int, 3> dims_;
  std::int64_t nodes_;
  std::vector<double> f_;
  std::vector<double> g_;
};

// f = M^-1 m_eq(conserved fields) at every node.
void initialize_equilibrium(LatticeState& state, const ConservedFields& fields);

void collide(LatticeState& state, int jobs = 1);
void stream(LatticeState& state, int jobs = 1);
void step(LatticeState& state, int jobs = 1);

ConservedFields conserved_fields(const LatticeState& state);
double total_mass(const LatticeState& state);
std::array<double, 3> total_momentum(const LatticeState& state);

// Row-major CSV, one line per (z, y), values along x.
void write_field_csv(std::ostream& os, const std::string& name, std::int64_t t, const std::array<int, 3>& dims,
                     const std::vector<double>& values);

// Header line "lbmlab-checkpoint <model> q=<q> Nx=<> Ny=<> Nz=<> t=<t>\n", then q*nodes little-endian doubles.
void write_checkpoint(std::ostream& os, const LatticeState& state);
void read_checkpoint(std::istream& is, LatticeState& state);

}  // namespace lbmlab
