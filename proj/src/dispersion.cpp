#include "lbmlab/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "lbmlab/dual.hpp"

namespace lbmlab {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

Eigen::Vector3d unit(const Eigen::Vector3d& v) {
  const double n = v.norm();
  if (!(n > 0.0)) throw DomainError("direction vector must be nonzero");
  return v / n;
}

Eigen::Vector3d perpendicular_2d(const Eigen::Vector3d& khat) { return {-khat[1], khat[0], 0.0}; }

// Labels the hydrodynamic modes among the eigenpairs of E at small real k.
// Returns eigen-indices in the order given by `labels`.
std::vector<int> label_modes(const Model& model, const Spectrum& sp, const Eigen::Vector3d& khat,
                             std::vector<std::string>& labels) {
  const int q = model.q(), nc = model.n_conserved;
  std::vector<int> idx(q);
  for (int j = 0; j < q; ++j) idx[j] = j;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::abs(sp.values[a] - 1.0) < std::abs(sp.values[b] - 1.0);
  });
  idx.resize(nc);
  if (nc == 1) {
    labels = {"density"};
    return idx;
  }
  const Eigen::Vector3d kp = perpendicular_2d(khat);
  int shear = 0;
  double best = -1.0;
  for (int i = 0; i < nc; ++i) {
    Eigen::VectorXcd u = model.basis.matrix.cast<cplx>() * sp.vectors.col(idx[i]);
    double score = std::abs(kp[0] * u[1] + kp[1] * u[2]) / (std::abs(u[0]) + std::abs(u[1]) + std::abs(u[2]));
    if (score > best) {
      best = score;
      shear = i;
    }
  }
  std::vector<int> acoustic;
  for (int i = 0; i < nc; ++i)
    if (i != shear) acoustic.push_back(idx[i]);
  std::sort(acoustic.begin(), acoustic.end(),
            [&](int a, int b) { return sp.values[a].imag() < sp.values[b].imag(); });
  labels = {"shear", "acoustic+", "acoustic-"};
  return {idx[shear], acoustic[0], acoustic[1]};
}

std::string default_label(const Model& model) { return model.advection_diffusion() ? "density" : "shear"; }

int find_label(const std::vector<std::string>& labels, const std::string& label) {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return static_cast<int>(i);
  throw ConfigError("unknown mode label '" + label + "'");
}

// Index of the eigenvector best aligned with prev; throws when the choice is not clear-cut.
int follow(const Spectrum& sp, const Eigen::VectorXcd& prev, double where) {
  const int q = static_cast<int>(sp.values.size());
  int best = -1;
  double o1 = -1.0, o2 = -1.0;
  for (int j = 0; j < q; ++j) {
    double o = std::abs(prev.dot(sp.vectors.col(j)));
    if (o > o1) {
      o2 = o1;
      o1 = o;
      best = j;
    } else if (o > o2) {
      o2 = o;
    }
  }
  if (o1 < 0.5 || o2 > 0.9 * o1) throw NumericalError("mode tracking ambiguous at k = " + fmt(where));
  return best;
}

// Eigenvector of the labelled mode at k = k_end along khat, continued from k_end / 100.
Eigen::VectorXcd start_vector(const Model& model, const Eigen::MatrixXcd& C, const Eigen::Vector3d& khat,
                              const std::string& label, double k_end, cplx* z_out = nullptr) {
  const double k0 = std::min(k_end, 1e-3);
  Spectrum sp = spectrum(evolution_matrix(model, C, (k0 * khat).cast<cplx>()));
  std::vector<std::string> labels;
  auto idx = label_modes(model, sp, khat, labels);
  int j = idx[find_label(labels, label)];
  Eigen::VectorXcd v = sp.vectors.col(j);
  cplx z = sp.values[j];
  double k = k0;
  while (k < k_end) {
    k = std::min(k_end, std::min(k * 1.5, k + 0.01));
    sp = spectrum(evolution_matrix(model, C, (k * khat).cast<cplx>()));
    j = follow(sp, v, k);
    v = sp.vectors.col(j);
    z = sp.values[j];
  }
  if (z_out) *z_out = z;
  return v;
}

std::vector<cplx> circle(const Model& model, const Eigen::MatrixXcd& C, const Eigen::Vector3d& khat,
                         Eigen::VectorXcd v, double r, int N, int order) {
  std::vector<cplx> g(N);
  for (int i = 0; i < N; ++i) {
    const cplx k = std::polar(r, 2.0 * kPi * i / N);
    Spectrum sp = spectrum(evolution_matrix(model, C, khat.cast<cplx>() * k));
    int j = follow(sp, v, std::abs(k));
    v = sp.vectors.col(j);
    g[i] = std::log(sp.values[j]);
  }
  std::vector<cplx> c(order + 1);
  for (int n = 0; n <= order; ++n) {
    cplx s = 0.0;
    for (int i = 0; i < N; ++i) s += g[i] * std::polar(1.0, -2.0 * kPi * double(n) * i / N);
    c[n] = s / double(N) / std::pow(r, n);
  }
  return c;
}

template <class S>
BackgroundT<S> checked(const BackgroundT<S>& bg) {
  if (!(bg.rho0 > 0.0)) throw DomainError("background density must be positive");
  return bg;
}

}  // namespace

template <class S>
Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> linearize_equilibrium(const Model& model, const BackgroundT<S>& bg) {
  checked(bg);
  using D = Dual<S>;
  const int q = model.q(), nc = model.n_conserved;
  Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> J(q, nc);
  const std::array<D, 3> V = {D(bg.V[0]), D(bg.V[1]), D(bg.V[2])};
  std::vector<D> out(q);
  for (int c = 0; c < nc; ++c) {
    D w[4];
    w[0] = D(S(bg.rho0));
    for (int a = 1; a < nc; ++a) w[a] = D(S(bg.rho0) * bg.V[a - 1]);
    w[c].d = S(1.0);
    equilibrium_moments<D>(model, w, V, out.data());
    for (int k = 0; k < q; ++k) J(k, c) = out[k].d;
  }
  return J;
}

template Eigen::MatrixXd linearize_equilibrium<double>(const Model&, const BackgroundT<double>&);
template Eigen::MatrixXcd linearize_equilibrium<cplx>(const Model&, const BackgroundT<cplx>&);

template <class S>
Eigen::MatrixXcd collision_matrix(const Model& model, const BackgroundT<S>& bg) {
  const int q = model.q(), nc = model.n_conserved;
  Eigen::MatrixXcd J = linearize_equilibrium(model, bg).template cast<cplx>();
  Eigen::MatrixXcd JPi = Eigen::MatrixXcd::Zero(q, q);
  JPi.leftCols(nc) = J;
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(q, q);
  return I + model.basis.inverse.cast<cplx>() * model.rates.s.cast<cplx>().asDiagonal() * (JPi - I) *
                 model.basis.matrix.cast<cplx>();
}

template Eigen::MatrixXcd collision_matrix<double>(const Model&, const BackgroundT<double>&);
template Eigen::MatrixXcd collision_matrix<cplx>(const Model&, const BackgroundT<cplx>&);

Eigen::MatrixXcd evolution_matrix(const Model& model, const Eigen::MatrixXcd& collision, const Eigen::Vector3cd& k) {
  const int q = model.q();
  Eigen::VectorXcd phase(q);
  for (int p = 0; p < q; ++p) {
    const auto& c = model.velocity_set.velocities[p];
    const cplx kc = k[0] * double(c[0]) + k[1] * double(c[1]) + k[2] * double(c[2]);
    phase[p] = std::exp(cplx(0.0, -1.0) * kc);
  }
  return phase.asDiagonal() * collision;
}

Eigen::MatrixXcd evolution_matrix(const Model& model, const Background& bg, const Eigen::Vector3d& k) {
  if (!k.allFinite()) throw DomainError("wavevector must be finite");
  return evolution_matrix(model, collision_matrix(model, bg), k.cast<cplx>());
}

Spectrum spectrum(const Eigen::MatrixXcd& E) {
  const int q = static_cast<int>(E.rows());
  if (q > 19) throw DomainError("spectrum: matrix larger than 19x19");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces;
  ces.setMaxIterations(100 * q);
  ces.compute(E, true);
  if (ces.info() != Eigen::Success) throw NumericalError("spectrum: eigensolver did not converge");
  Spectrum sp{ces.eigenvalues(), ces.eigenvectors()};
  const double bound = 1e-10 * std::max(E.norm(), 1e-300);
  for (int j = 0; j < q; ++j) {
    sp.vectors.col(j).normalize();
    double res = (E * sp.vectors.col(j) - sp.values[j] * sp.vectors.col(j)).norm();
    if (res > bound) throw NumericalError("spectrum: residual " + fmt(res) + " exceeds bound");
  }
  return sp;
}

Fit fit_expansion(const std::vector<double>& k, const std::vector<cplx>& gamma) {
  const int n = static_cast<int>(k.size());
  if (n < 2 || gamma.size() != k.size()) throw NumericalError("fit_expansion: need at least two samples");
  const double kmax = *std::max_element(k.begin(), k.end());
  Eigen::MatrixXd Ae(n, 2), Ao(n, 2);
  Eigen::VectorXd be(n), bo(n);
  for (int i = 0; i < n; ++i) {
    const double x = k[i] / kmax;
    Ao(i, 0) = x;
    Ao(i, 1) = x * x * x;
    Ae(i, 0) = x * x;
    Ae(i, 1) = x * x * x * x;
    be[i] = gamma[i].real();
    bo[i] = gamma[i].imag();
  }
  Eigen::Vector2d ce = Ae.colPivHouseholderQr().solve(be);
  Eigen::Vector2d co = Ao.colPivHouseholderQr().solve(bo);
  Fit fit;
  fit.coeffs.a1 = -co[0] / kmax;
  fit.coeffs.a3 = -co[1] / (kmax * kmax * kmax);
  fit.coeffs.a2 = -ce[0] / (kmax * kmax);
  fit.coeffs.a4 = -ce[1] / (kmax * kmax * kmax * kmax);
  double ss = (Ae * ce - be).squaredNorm() + (Ao * co - bo).squaredNorm();
  fit.residual = std::sqrt(ss / n);
  return fit;
}

const TrackedMode& DispersionResult::mode(const std::string& label) const {
  for (const auto& m : modes)
    if (m.label == label) return m;
  throw ConfigError("no tracked mode labelled '" + label + "'");
}

std::vector<double> default_k_samples() {
  std::vector<double> k;
  for (int m = 4; m >= 0; --m) k.push_back(1e-2 * std::ldexp(1.0, -m));
  return k;
}

DispersionResult track_hydrodynamic_modes(const Model& model, const Background& bg, const Eigen::Vector3d& direction,
                                          const std::vector<double>& k_samples) {
  if (k_samples.empty()) throw DomainError("track_hydrodynamic_modes: no k samples");
  for (std::size_t i = 0; i < k_samples.size(); ++i) {
    if (!(k_samples[i] > 0.0)) throw DomainError("k samples must be positive");
    if (i && !(k_samples[i] > k_samples[i - 1])) throw DomainError("k samples must be strictly ascending");
  }
  if (k_samples.back() > 0.5) throw DomainError("k samples must not exceed 0.5");
  const int nc = model.n_conserved, q = model.q();
  DispersionResult res;
  res.direction = unit(direction);
  res.k_samples = k_samples;
  const Eigen::MatrixXcd C = collision_matrix(model, bg);

  // separation check at the largest k
  {
    Spectrum sp = spectrum(evolution_matrix(model, C, (k_samples.back() * res.direction).cast<cplx>()));
    std::vector<double> dist(q);
    for (int j = 0; j < q; ++j) dist[j] = std::abs(std::log(sp.values[j]));
    std::sort(dist.begin(), dist.end());
    const double gmax = dist[nc - 1];
    double smin = 2.0;
    for (int k = nc; k < q; ++k) smin = std::min(smin, model.rates.s[k]);
    if (smin < 10.0 * gmax)
      throw NumericalError("separation check failed: min s = " + fmt(smin) + " < 10 max|gamma| = " +
                           fmt(10.0 * gmax));
  }

  std::vector<Eigen::VectorXcd> prev(nc);
  std::vector<std::string> labels;
  res.modes.resize(nc);
  bool started = false;
  for (double k : k_samples) {
    Spectrum sp = spectrum(evolution_matrix(model, C, (k * res.direction).cast<cplx>()));
    res.eigenvalues.push_back(sp.values);
    for (int j = 0; j < q; ++j)
      if (std::abs(sp.values[j]) > 1.0 + 1e-12) {
        res.unstable = true;
        res.unstable_k.push_back(k);
        break;
      }
    std::vector<int> pick;
    if (!started) {
      pick = label_modes(model, sp, res.direction, labels);
      for (int i = 0; i < nc; ++i) res.modes[i].label = labels[i];
      started = true;
    } else {
      try {
        for (int i = 0; i < nc; ++i) pick.push_back(follow(sp, prev[i], k));
      } catch (const NumericalError&) {
        res.skipped_k.push_back(k);
        continue;
      }
      std::vector<int> sorted = pick;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        res.skipped_k.push_back(k);
        continue;
      }
    }
    for (int i = 0; i < nc; ++i) {
      prev[i] = sp.vectors.col(pick[i]);
      auto& m = res.modes[i];
      m.k.push_back(k);
      m.z.push_back(sp.values[pick[i]]);
      m.gamma.push_back(std::log(sp.values[pick[i]]));
    }
  }
  if (res.modes[0].k.size() < 2)
    throw NumericalError("mode tracking failed at k = " +
                         fmt(res.skipped_k.empty() ? k_samples.front() : res.skipped_k.front()));
  for (auto& m : res.modes) m.fit = fit_expansion(m.k, m.gamma);
  return res;
}

std::vector<cplx> taylor_coefficients(const Model& model, const Background& bg, const Eigen::Vector3d& khat,
                                      const std::string& label, const ContourOptions& opt) {
  const Eigen::Vector3d kh = unit(khat);
  const std::string lab = label.empty() ? default_label(model) : label;
  const Eigen::MatrixXcd C = collision_matrix(model, bg);
  double r = opt.radius;
  for (int attempt = 0; attempt < 5; ++attempt, r *= 0.5) {
    try {
      return circle(model, C, kh, start_vector(model, C, kh, lab, r), r, opt.points, opt.order);
    } catch (const NumericalError&) {
    }
  }
  throw NumericalError("taylor_coefficients: mode tracking failed on every contour radius");
}

Coefficients to_coefficients(const std::vector<cplx>& c) {
  Coefficients a;
  a.a1 = -c.at(1).imag();
  a.a2 = -c.at(2).real();
  a.a3 = -c.at(3).imag();
  a.a4 = -c.at(4).real();
  return a;
}

std::vector<std::vector<cplx>> velocity_expansion(const Model& model, const Eigen::Vector3d& vhat,
                                                  const Eigen::Vector3d& khat, const std::string& label,
                                                  const ContourOptions& opt, const VelocityContour& vopt) {
  const Eigen::Vector3d kh = unit(khat), vh = unit(vhat);
  const std::string lab = label.empty() ? default_label(model) : label;
  const int NV = vopt.v_points;
  double r = opt.radius;
  for (int attempt = 0; attempt < 5; ++attempt, r *= 0.5) {
    try {
      std::vector<std::vector<cplx>> c(NV);
      Eigen::VectorXcd v;
      for (int j = 0; j < NV; ++j) {
        const cplx amp = std::polar(vopt.v_radius, 2.0 * kPi * j / NV);
        BackgroundT<cplx> bg;
        for (int a = 0; a < 3; ++a) bg.V[a] = amp * vh[a];
        const Eigen::MatrixXcd C = collision_matrix(model, bg);
        if (j == 0) {
          v = start_vector(model, C, kh, lab, r);
        } else {
          Spectrum sp = spectrum(evolution_matrix(model, C, (r * kh).cast<cplx>()));
          v = sp.vectors.col(follow(sp, v, r));
        }
        c[j] = circle(model, C, kh, v, r, opt.points, opt.order);
      }
      std::vector<std::vector<cplx>> out(opt.order + 1, std::vector<cplx>(NV / 2));
      for (int n = 0; n <= opt.order; ++n)
        for (int l = 0; l < NV / 2; ++l) {
          cplx s = 0.0;
          for (int j = 0; j < NV; ++j) s += c[j][n] * std::polar(1.0, -2.0 * kPi * double(l) * j / NV);
          out[n][l] = s / double(NV) / std::pow(vopt.v_radius, l);
        }
      return out;
    } catch (const NumericalError&) {
    }
  }
  throw NumericalError("velocity_expansion: mode tracking failed on every contour radius");
}

double measure_anomalous_advection(const Model& model, const Eigen::Vector3d& V, const Eigen::Vector3d& khat,
                                   const std::string& label, const ContourOptions& opt,
                                   const VelocityContour& vopt) {
  if (!(V.norm() > 0.0)) throw DomainError("measure_anomalous_advection: V must be nonzero");
  auto C = velocity_expansion(model, V, khat, label, opt, vopt);
  const double a1 = -C[1][1].imag();
  const double a3 = -C[3][1].imag();
  if (std::abs(a1) < 1e-12) throw DomainError("measure_anomalous_advection: a1 below 1e-12, no advection along k");
  return a3 / a1;
}

cplx tracked_eigenvalue(const Model& model, const Background& bg, const Eigen::Vector3d& k, const std::string& label) {
  const double kmag = k.norm();
  const std::string lab = label.empty() ? default_label(model) : label;
  const Eigen::MatrixXcd C = collision_matrix(model, bg);
  if (kmag == 0.0) return 1.0;
  const Eigen::Vector3d kh = k / kmag;
  cplx z;
  const double k0 = std::min(kmag, 1e-3);
  Spectrum sp = spectrum(evolution_matrix(model, C, (k0 * kh).cast<cplx>()));
  std::vector<std::string> labels;
  auto idx = label_modes(model, sp, kh, labels);
  int j = idx[find_label(labels, lab)];
  Eigen::VectorXcd v = sp.vectors.col(j);
  z = sp.values[j];
  double kk = k0;
  while (kk < kmag) {
    kk = std::min(kmag, kk + 0.005);
    sp = spectrum(evolution_matrix(model, C, (kk * kh).cast<cplx>()));
    j = follow(sp, v, kk);
    v = sp.vectors.col(j);
    z = sp.values[j];
  }
  return z;
}

StabilityResult stability_scan(const Model& model, const Background& bg, const std::vector<Eigen::Vector3d>& k_grid,
                               double tol) {
  const Eigen::MatrixXcd C = collision_matrix(model, bg);
  StabilityResult res;
  for (const auto& k : k_grid) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces;
    ces.setMaxIterations(100 * model.q());
    ces.compute(evolution_matrix(model, C, k.cast<cplx>()), false);
    if (ces.info() != Eigen::Success) throw NumericalError("stability_scan: eigensolver did not converge");
    const double mx = ces.eigenvalues().cwiseAbs().maxCoeff();
    res.k.push_back(k);
    res.max_modulus.push_back(mx);
    res.overall_max = std::max(res.overall_max, mx);
    if (mx > 1.0 + tol) res.unstable.push_back(k);
    else if (k.norm() > 0.0 ? mx >= 1.0 - tol
                            : (ces.eigenvalues().cwiseAbs().array() >= 1.0 - tol).count() > model.n_conserved)
      res.marginal.push_back(k);
  }
  return res;
}

std::vector<Eigen::Vector3d> uniform_k_grid(int d, int n) {
  if (n < 2) throw DomainError("uniform_k_grid: need at least two points per axis");
  std::vector<double> axis(n);
  for (int i = 0; i < n; ++i) axis[i] = -kPi + 2.0 * kPi * i / (n - 1);
  std::vector<Eigen::Vector3d> out;
  const int nz = d == 3 ? n : 1;
  for (int iz = 0; iz < nz; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) out.emplace_back(axis[ix], axis[iy], d == 3 ? axis[iz] : 0.0);
  return out;
}

void write_dispersion_csv(std::ostream& os, double theta, const DispersionResult& r) {
  os << std::setprecision(17);
  for (const auto& m : r.modes)
    for (std::size_t i = 0; i < m.k.size(); ++i)
      os << theta << ',' << m.k[i] << ',' << m.label << ',' << m.z[i].real() << ',' << m.z[i].imag() << ','
         << m.gamma[i].real() << ',' << m.gamma[i].imag() << '\n';
}

void write_coefficients_csv(std::ostream& os, const std::string& model, const Background& bg, double theta,
                            const DispersionResult& r, bool header) {
  if (header) os << "model,rho0,vx,vy,vz,theta,mode,a1,a2,a3,a4,residual\n";
  os << std::setprecision(17);
  for (const auto& m : r.modes)
    os << model << ',' << bg.rho0 << ',' << bg.V[0] << ',' << bg.V[1] << ',' << bg.V[2] << ',' << theta << ','
       << m.label << ',' << m.fit.coeffs.a1 << ',' << m.fit.coeffs.a2 << ',' << m.fit.coeffs.a3 << ','
       << m.fit.coeffs.a4 << ',' << m.fit.residual << '\n';
}

}  // namespace lbmlab
