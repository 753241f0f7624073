#include "lbmlab/kernel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <exception>
#include <iomanip>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace lbmlab {

namespace {

// Runs body(begin, end) over [0, n) split into `jobs` contiguous chunks.
template <class Body>
void parallel_for(std::int64_t n, int jobs, Body&& body) {
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(std::min<std::int64_t>(n, 1 << 20))));
  if (jobs == 1) {
    body(std::int64_t(0), n);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex mu;
  for (int t = 0; t < jobs; ++t) {
    std::int64_t b = n * t / jobs, e = n * (t + 1) / jobs;
    pool.emplace_back([&, b, e] {
      try {
        body(b, e);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

constexpr int kBlock = 64;

template <int Q>
void collide_range(LatticeState& state, std::int64_t begin, std::int64_t end) {
  const Model& model = state.model();
  const std::int64_t N = state.nodes();
  const int nc = model.n_conserved;
  double M[Q][Q], Mi[Q][Q], s[Q];
  for (int k = 0; k < Q; ++k) {
    s[k] = model.rates.s[k];
    for (int p = 0; p < Q; ++p) {
      M[k][p] = model.basis.matrix(k, p);
      Mi[p][k] = model.basis.inverse(p, k);
    }
  }
  const bool ad = model.advection_diffusion();
  const auto V = model.advection_velocity();
  double eq_unit[Q];
  if (ad) {
    const double one = 1.0;
    equilibrium_moments<double>(model, &one, V, eq_unit);
  }
  double* f = state.data().data();
  alignas(64) double m[Q][kBlock];
  double eq[Q];

  for (std::int64_t b = begin; b < end; b += kBlock) {
    const int n = static_cast<int>(std::min<std::int64_t>(kBlock, end - b));
    for (int k = 0; k < Q; ++k)
      for (int i = 0; i < n; ++i) m[k][i] = 0.0;
    for (int p = 0; p < Q; ++p) {
      const double* fp = f + p * N + b;
      for (int k = 0; k < Q; ++k) {
        const double w = M[k][p];
        if (w == 0.0) continue;
        for (int i = 0; i < n; ++i) m[k][i] += w * fp[i];
      }
    }
    for (int i = 0; i < n; ++i) {
      if (ad) {
        for (int k = nc; k < Q; ++k) eq[k] = m[0][i] * eq_unit[k];
      } else {
        double w[3] = {m[0][i], m[1][i], m[2][i]};
        if (!(w[0] > 0.0)) {
          auto c = state.coords(b + i);
          std::ostringstream os;
          os << "collide: rho = " << w[0] << " <= 0 at node (" << c[0] << ", " << c[1] << ", " << c[2] << ")";
          throw DomainError(os.str());
        }
        equilibrium_moments<double>(model, w, {0.0, 0.0, 0.0}, eq);
      }
      for (int k = nc; k < Q; ++k) m[k][i] = s[k] * (eq[k] - m[k][i]);
    }
    for (int p = 0; p < Q; ++p) {
      double* fp = f + p * N + b;
      for (int k = nc; k < Q; ++k) {
        const double w = Mi[p][k];
        if (w == 0.0) continue;
        for (int i = 0; i < n; ++i) fp[i] += w * m[k][i];
      }
    }
  }
}

void collide_dispatch(LatticeState& state, std::int64_t b, std::int64_t e) {
  switch (state.model().q()) {
    case 5: return collide_range<5>(state, b, e);
    case 9: return collide_range<9>(state, b, e);
    case 13: return collide_range<13>(state, b, e);
    case 15: return collide_range<15>(state, b, e);
    case 19: return collide_range<19>(state, b, e);
  }
  throw ConfigError("collide: unsupported q");
}

int wrap(int a, int n) {
  a %= n;
  return a < 0 ? a + n : a;
}

void put_le(std::ostream& os, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  os.write(buf, 8);
}

double get_le(std::istream& is) {
  unsigned char buf[8];
  if (!is.read(reinterpret_cast<char*>(buf), 8)) throw ConfigError("checkpoint: truncated data");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= std::uint64_t(buf[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

LatticeState::LatticeState(const Model& model, std::array<int, 3> dims) : model_(model), dims_(dims) {
  if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1) throw ConfigError("grid extents must be positive");
  if (model.d() == 2 && dims[2] != 1) throw ConfigError("2D model requires Nz = 1");
  nodes_ = std::int64_t(dims[0]) * dims[1] * dims[2];
  f_.assign(static_cast<std::size_t>(nodes_ * model.q()), 0.0);
  g_.assign(f_.size(), 0.0);
}

std::array<int, 3> LatticeState::coords(std::int64_t node) const {
  int x = static_cast<int>(node % dims_[0]);
  std::int64_t r = node / dims_[0];
  return {x, static_cast<int>(r % dims_[1]), static_cast<int>(r / dims_[1])};
}

void initialize_equilibrium(LatticeState& state, const ConservedFields& fields) {
  const Model& model = state.model();
  const int q = model.q(), nc = model.n_conserved;
  const std::int64_t N = state.nodes();
  if (std::int64_t(fields.rho.size()) != N) throw ConfigError("initialize_equilibrium: rho field has wrong size");
  if (nc > 1) {
    if (std::int64_t(fields.jx.size()) != N || std::int64_t(fields.jy.size()) != N)
      throw ConfigError("initialize_equilibrium: momentum field has wrong size");
  }
  const auto V = model.advection_velocity();
  std::vector<double> eq(q);
  Eigen::VectorXd meq(q), f(q);
  for (std::int64_t n = 0; n < N; ++n) {
    double w[3] = {fields.rho[n], nc > 1 ? fields.jx[n] : 0.0, nc > 1 ? fields.jy[n] : 0.0};
    if (nc > 1 && !(w[0] > 0.0)) {
      auto c = state.coords(n);
      throw DomainError("initialize_equilibrium: rho <= 0 at node (" + std::to_string(c[0]) + ", " +
                        std::to_string(c[1]) + ", " + std::to_string(c[2]) + ")");
    }
    equilibrium_moments<double>(model, w, V, meq.data());
    f.noalias() = model.basis.inverse * meq;
    for (int p = 0; p < q; ++p) state.f(p, n) = f[p];
  }
}

void collide(LatticeState& state, int jobs) {
  const std::int64_t N = state.nodes();
  // chunk boundaries on block multiples keep the arithmetic identical for any job count
  const std::int64_t blocks = (N + kBlock - 1) / kBlock;
  parallel_for(blocks, jobs, [&](std::int64_t b, std::int64_t e) {
    collide_dispatch(state, b * kBlock, std::min(N, e * kBlock));
  });
}

void stream(LatticeState& state, int jobs) {
  const Model& model = state.model();
  const auto [Nx, Ny, Nz] = state.dims();
  const std::int64_t N = state.nodes();
  const double* src = state.data().data();
  double* dst = state.scratch().data();
  parallel_for(model.q(), jobs, [&](std::int64_t pb, std::int64_t pe) {
    for (std::int64_t p = pb; p < pe; ++p) {
      const auto& c = model.velocity_set.velocities[p];
      const int sx = wrap(c[0], Nx);
      for (int z = 0; z < Nz; ++z)
        for (int y = 0; y < Ny; ++y) {
          const double* row = src + p * N + state.index(0, y, z);
          double* out = dst + p * N + state.index(0, wrap(y + c[1], Ny), wrap(z + c[2], Nz));
          std::memcpy(out + sx, row, sizeof(double) * (Nx - sx));
          std::memcpy(out, row + (Nx - sx), sizeof(double) * sx);
        }
    }
  });
  std::swap(state.data(), state.scratch());
}

void step(LatticeState& state, int jobs) {
  collide(state, jobs);
  stream(state, jobs);
  ++state.time;
}

ConservedFields conserved_fields(const LatticeState& state) {
  const Model& model = state.model();
  const std::int64_t N = state.nodes();
  const int q = model.q(), nc = model.n_conserved;
  ConservedFields out;
  std::vector<double>* rows[4] = {&out.rho, &out.jx, &out.jy, &out.jz};
  for (int k = 0; k < nc; ++k) {
    auto& v = *rows[k];
    v.assign(N, 0.0);
    for (int p = 0; p < q; ++p) {
      const double w = model.basis.matrix(k, p);
      if (w == 0.0) continue;
      for (std::int64_t n = 0; n < N; ++n) v[n] += w * state.f(p, n);
    }
  }
  return out;
}

double total_mass(const LatticeState& state) {
  double s = 0.0;
  for (double v : state.data()) s += v;
  return s;
}

std::array<double, 3> total_momentum(const LatticeState& state) {
  const Model& model = state.model();
  std::array<double, 3> j{0.0, 0.0, 0.0};
  for (int p = 0; p < model.q(); ++p) {
    double s = 0.0;
    for (std::int64_t n = 0; n < state.nodes(); ++n) s += state.f(p, n);
    for (int a = 0; a < 3; ++a) j[a] += s * model.velocity_set.velocities[p][a];
  }
  return j;
}

void write_field_csv(std::ostream& os, const std::string& name, std::int64_t t, const std::array<int, 3>& dims,
                     const std::vector<double>& values) {
  os << "# field=" << name << " t=" << t << " Nx=" << dims[0] << " Ny=" << dims[1];
  if (dims[2] > 1) os << " Nz=" << dims[2];
  os << '\n' << std::setprecision(17);
  std::int64_t n = 0;
  for (int z = 0; z < dims[2]; ++z)
    for (int y = 0; y < dims[1]; ++y) {
      for (int x = 0; x < dims[0]; ++x) os << (x ? "," : "") << values[n++];
      os << '\n';
    }
}

void write_checkpoint(std::ostream& os, const LatticeState& state) {
  const auto& d = state.dims();
  os << "lbmlab-checkpoint " << state.model().name << " q=" << state.model().q() << " Nx=" << d[0] << " Ny=" << d[1]
     << " Nz=" << d[2] << " t=" << state.time << '\n';
  for (double v : state.data()) put_le(os, v);
}

void read_checkpoint(std::istream& is, LatticeState& state) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("checkpoint: missing header");
  std::istringstream hs(line);
  std::string magic, name;
  hs >> magic >> name;
  if (magic != "lbmlab-checkpoint") throw ConfigError("checkpoint: bad magic");
  if (name != state.model().name) throw ConfigError("checkpoint: model " + name + " != " + state.model().name);
  std::map<std::string, long long> kv;
  std::string tok;
  while (hs >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw ConfigError("checkpoint: malformed header token '" + tok + "'");
    kv[tok.substr(0, eq)] = std::stoll(tok.substr(eq + 1));
  }
  const auto& d = state.dims();
  if (kv["q"] != state.model().q() || kv["Nx"] != d[0] || kv["Ny"] != d[1] || kv["Nz"] != d[2])
    throw ConfigError("checkpoint: header does not match the lattice");
  for (double& v : state.data()) v = get_le(is);
  state.time = kv["t"];
}

}  // namespace lbmlab
