// Acceptance run: one PASS/FAIL line per criterion. Arguments select criteria (default: all).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "lbmlab/dispersion.hpp"
#include "lbmlab/experiments.hpp"
#include "lbmlab/kernel.hpp"
#include "lbmlab/theory.hpp"
#include "oracles.hpp"
#include "reference_matrices.hpp"

using namespace lbmlab;

namespace {

const double kPi = std::acos(-1.0);
const double kRt12 = 1.0 / std::sqrt(12.0);

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string sci(double v) { return fmt("%.3e", v); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Eigen::Vector3d dir2(double theta) { return {std::cos(theta), std::sin(theta), 0.0}; }

std::vector<double> thetas13() {
  std::vector<double> t;
  for (int i = 0; i < 13; ++i) t.push_back(kPi / 2.0 * i / 12.0);
  return t;
}

std::vector<Eigen::Vector3d> directions9() {
  std::vector<Eigen::Vector3d> d = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {0, 1, 1},
                                    {1, 0, 1}, {1, 1, 1}, {1, 2, 3}, {3, -1, 2}};
  for (auto& v : d) v.normalize();
  return d;
}

double fitted(const Model& m, const Background& bg, const Eigen::Vector3d& dir, const std::string& label, int order) {
  const auto c = track_hydrodynamic_modes(m, bg, dir, default_k_samples()).mode(label).fit.coeffs;
  return order == 1 ? c.a1 : c.a2;
}

double multiset_distance(const Eigen::VectorXcd& values, std::vector<cplx> expect) {
  double worst = 0.0;
  for (int i = 0; i < values.size(); ++i) {
    auto it = std::min_element(expect.begin(), expect.end(), [&](cplx u, cplx v) {
      return std::abs(u - values[i]) < std::abs(v - values[i]);
    });
    worst = std::max(worst, std::abs(*it - values[i]));
    expect.erase(it);
  }
  return worst;
}

// Every non-conserved rate set from a parity rule (TRT) or a constant.
ParamMap fill_rates(const std::string& name, ParamMap rates, double odd, double even) {
  const auto proto = fixtures::sample_model(name);
  for (int row = 0; row < proto.q(); ++row) {
    const auto& sym = proto.rates.symbol[row];
    if (sym.empty()) continue;
    const std::string key = "sigma" + sym.substr(1);
    if (!rates.count(key)) rates[key] = proto.basis.parity[row] < 0 ? odd : even;
  }
  return rates;
}

Model d2q9_ad(double alpha, double d1, double s1, double s3, double s4, double s6, double s8, double vx = 0.0,
              double vy = 0.0) {
  return build_model("D2Q9-AD", {{"alpha", alpha}, {"beta", 1.0}, {"d1", d1}, {"a", 0.0}, {"vx", vx}, {"vy", vy}},
                     {{"sigma1", s1}, {"sigma3", s3}, {"sigma4", s4}, {"sigma6", s6}, {"sigma8", s8}});
}

Model d2q9_ns(double s3, double s4, double s6, double s8 = 0.5) {
  return build_model("D2Q9-NS", {{"alpha", -2.0}, {"beta", 1.0}},
                     {{"sigma3", s3}, {"sigma4", s4}, {"sigma6", s6}, {"sigma8", s8}});
}

Model d2q13(double s4, double s6, double s8, double q = -7.0 / 6.0, double c1 = -1.0) {
  return build_model("D2Q13-NS", {{"alpha", -2.0}, {"beta", 1.0}, {"gamma", 0.0}, {"c1", c1}, {"q", q}},
                     {{"sigma3", 0.5}, {"sigma4", s4}, {"sigma6", s6}, {"sigma8", s8}, {"sigma10", 0.5},
                      {"sigma11", 0.5}, {"sigma12", 0.5}});
}

Verdict c1_k0_spectrum() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> rate(0.2, 1.9);
  double worst = 0.0;
  int sets = 0;
  for (const auto& name : model_names()) {
    const bool ad = name.find("-NS") == std::string::npos;
    for (int trial = 0; trial < 4; ++trial) {
      ParamMap extra;
      if (trial > 0)
        for (const auto& sym : rate_symbols(name)) extra[sym] = rate(rng);
      for (double v : {0.0, 0.1}) {
        if (ad) {
          extra["vx"] = v;
          extra["vy"] = -0.5 * v;
          if (name.rfind("D3", 0) == 0) extra["vz"] = 0.3 * v;
        }
        const auto m = fixtures::sample_model(name, extra);
        Background bg;
        if (!ad) bg.V = {v, -0.5 * v, 0.0};
        std::vector<cplx> expect;
        for (int p = 0; p < m.q(); ++p) expect.push_back(p < m.n_conserved ? 1.0 : 1.0 - m.rates.s[p]);
        worst = std::max(worst, multiset_distance(spectrum(evolution_matrix(m, bg, Eigen::Vector3d::Zero())).values, expect));
        ++sets;
      }
    }
  }
  return {worst <= 1e-12, "max eigenvalue deviation " + sci(worst) + " over " + std::to_string(sets) +
                              " rate sets (tol 1e-12)"};
}

Verdict c2_d2q9_ad_diffusivity() {
  const std::vector<std::pair<double, double>> pairs = {{-2.0, 0.024}, {-1.0, 0.3}, {0.0, 0.1}, {1.0, 0.7}, {-3.0, 1.2}};
  const std::vector<std::array<double, 2>> speeds = {{0.0, 0.0}, {0.1, 0.0}, {0.07, 0.07}};
  double worst = 0.0;
  for (auto [alpha, s1] : pairs)
    for (const auto& V : speeds) {
      const auto m = d2q9_ad(alpha, -1.0, s1, 0.3, 0.2, 0.4, 0.6, V[0], V[1]);
      Background bg;
      bg.V = {V[0], V[1], 0.0};
      const double kappa = (alpha + 4.0) / 6.0 * s1;
      for (double th : {0.0, 0.6435, kPi / 4}) worst = std::max(worst, rel(fitted(m, bg, dir2(th), "density", 2), kappa));
    }
  return {worst <= 1e-6, "max relative error of a2 vs (alpha+4)/6 sigma1 " + sci(worst) + " (tol 1e-6)"};
}

Verdict c3_d2q9_ns_viscosity() {
  const auto m = fixtures::sample_model("D2Q9-NS");
  const double s4 = m.rates.sigma(4);
  double at_rest = 0.0, moving = 0.0;
  for (double th : {0.0, 0.4, kPi / 4}) at_rest = std::max(at_rest, rel(fitted(m, {}, dir2(th), "shear", 2), s4 / 3.0));
  for (double v : {0.05, 0.1}) {
    Background bg;
    bg.V = {v, 0.0, 0.0};
    moving = std::max(moving, rel(fitted(m, bg, {1, 0, 0}, "shear", 2), s4 / 3.0 * (1.0 - 3.0 * v * v)));
  }
  return {at_rest <= 1e-6 && moving <= 1e-5,
          "V = 0: " + sci(at_rest) + " (tol 1e-6); V parallel to k: " + sci(moving) + " (tol 1e-5)"};
}

Verdict c4_anomaly_cancellation() {
  double ad = 0.0;
  // A1 = 0 on the d1 = -1 branch
  for (auto [s1, s6] : {std::array{0.024, 0.1}, std::array{0.3, 0.5}}) {
    const auto m = d2q9_ad(-2.0, -1.0, s1, s1, s1, s6, s6);
    if (std::abs(anomaly_A1(-2.0, -1.0, s1, s1, s1)) > 1e-15) return {false, "A1 does not vanish at its root"};
    for (double th : thetas13()) ad = std::max(ad, std::abs(measure_anomalous_advection(m, dir2(th), dir2(th))));
  }
  // A2 = 0 on the 12 sigma1 sigma4 = 1 branch, d1 solved
  for (auto [s1, s3] : {std::array{0.024, 0.1}, std::array{0.2, 0.3}}) {
    const auto r = tune("D2Q9-AD", "zero-anomaly", "sigma14", {{"alpha", -2.0}, {"sigma1", s1}, {"sigma3", s3}});
    const auto m = build_model("D2Q9-AD", r.params, r.sigmas);
    for (double th : thetas13()) ad = std::max(ad, std::abs(measure_anomalous_advection(m, dir2(th), dir2(th))));
  }
  // D2Q9-NS: sigma3 = sigma4, sigma4 sigma6 = 1/12 leaves only an orientation-independent part
  double spread = 0.0, perp = 0.0, quartic = 0.0;
  for (double s4 : {0.1, 0.2, kRt12}) {
    const auto m = d2q9_ns(s4, s4, 1.0 / (12.0 * s4));
    if (!d2q9_ns_order3(s4, s4, 1.0 / (12.0 * s4)).isotropic) return {false, "order-3 coefficients not isotropic"};
    const double h0 = measure_anomalous_advection(m, dir2(0.0), dir2(0.0), "shear");
    for (double th : thetas13()) {
      const double h = measure_anomalous_advection(m, dir2(th), dir2(th), "shear");
      spread = std::max(spread, std::abs(h - h0));
      const Eigen::Vector3d vperp(-std::sin(th), std::cos(th), 0.0);
      perp = std::max(perp, std::abs(velocity_expansion(m, vperp, dir2(th), "shear")[3][1]));
      if (s4 == kRt12) quartic = std::max(quartic, std::abs(h));
    }
  }
  const bool ok = ad <= 1e-8 && spread <= 1e-8 && perp <= 1e-8 && quartic <= 1e-8;
  return {ok, "D2Q9-AD max |h| " + sci(ad) + "; D2Q9-NS orientation spread " + sci(spread) + ", cross-flow k^3 V " +
                  sci(perp) + ", |h| at sigma4 = sigma6 = 1/sqrt(12) " + sci(quartic) + " (tol 1e-8)"};
}

Verdict c5_d2q13_viscosity() {
  auto v2_coefficient = [](double q) {
    const auto m = d2q13(0.2, 0.5, 0.5, q);
    Background b0, b1;
    b1.V = {0.1, 0.0, 0.0};
    return (fitted(m, b1, {1, 0, 0}, "shear", 2) - fitted(m, b0, {1, 0, 0}, "shear", 2)) / 0.01;
  };
  const double tuned = std::abs(v2_coefficient(-7.0 / 6.0)), plain = std::abs(v2_coefficient(0.0));
  return {tuned <= 1e-8 && plain > 1e-3,
          "V^2 coefficient " + sci(tuned) + " at q = -7/6 (tol 1e-8), " + sci(plain) + " at q = 0 (> 1e-3)"};
}

Verdict c6_d2q13_quartic() {
  const auto m = d2q13(kRt12, kRt12, kRt12);
  const auto pw = plane_wave_relative_advection(m, 0.1, {13, 0}, 240);
  const double dev = std::abs(1.0 - pw.measured);
  double worst = 0.0;
  for (double s4 : {0.15, 0.2, 0.35}) {
    const auto mm = d2q13(s4, 1.0 / (12.0 * s4), 1.0 / (12.0 * s4));
    const double expect = (3.0 - 1.0) / 24.0 * (12.0 * s4 * s4 - 1.0);
    for (double th : thetas13())
      worst = std::max(worst, std::abs(measure_anomalous_advection(mm, dir2(th), dir2(th), "shear") - expect));
  }
  return {dev <= 1e-4 && worst <= 1e-6, "relative advection " + fmt("%.8f", pw.measured) + " at 13 k0 (tol 1e-4); " +
                                            "residual formula error " + sci(worst) + " (tol 1e-6)"};
}

Verdict c7_plane_wave_trend() {
  const auto m = d2q13(0.2, 0.5, 0.5);
  struct Row {
    std::array<int, 2> n;
    PlaneWaveResult r;
  };
  std::vector<Row> rows;
  for (auto n : {std::array{5, 12}, std::array{13, 0}, std::array{10, 24}, std::array{26, 0}})
    rows.push_back({n, plane_wave_relative_advection(m, 0.1, n, 240)});
  double worst = 0.0;
  std::string table;
  for (const auto& row : rows) {
    worst = std::max(worst, row.r.rel_error);
    table += std::string(table.empty() ? "" : ", ") + "(" + std::to_string(row.n[0]) + "," + std::to_string(row.n[1]) + ") " + fmt("%.5f", row.r.measured) + "/" +
             fmt("%.5f", row.r.theory);
  }
  auto anomaly = [&](int i) { return std::abs(1.0 - rows[i].r.measured); };
  const bool grows = anomaly(2) > anomaly(0) && anomaly(3) > anomaly(1);
  const bool oriented = std::abs(rows[0].r.measured - rows[1].r.measured) > 1e-4;
  return {grows && oriented && worst <= 5e-4, table + "; max sim-theory error " + sci(worst) + " (tol 5e-4)" +
                                                  (grows ? "" : "; anomaly does not grow") +
                                                  (oriented ? "" : "; orientations agree")};
}

double final_anisotropy(const std::vector<AnisotropyReport>& r) { return r.back().anisotropy; }

double higher_harmonics(const AnisotropyReport& r) {
  double s = 0.0;
  for (int m = 2; m < 9; ++m) s += r.e[m];
  return s / r.e[0];
}

Verdict c8_gaussian_dot() {
  const double s1 = 0.024;
  GaussianConfig cfg;
  const auto a1 = run_gaussian_dot(d2q9_ad(-2.0, -1.0, s1, s1, s1, 0.1, 0.1, 0.1), cfg);
  const auto t2 = tune("D2Q9-AD", "zero-anomaly", "sigma14",
                       {{"alpha", -2.0}, {"sigma1", s1}, {"sigma3", 0.1}, {"sigma6", 0.1}, {"sigma8", 0.1}});
  ParamMap p2 = t2.params;
  p2["vx"] = 0.1;
  const auto a2 = run_gaussian_dot(build_model("D2Q9-AD", p2, t2.sigmas), cfg);
  const auto un = run_gaussian_dot(d2q9_ad(-2.0, 0.0, s1, 0.5, 0.5, 0.5, 0.5, 0.1), cfg);
  const double r1 = final_anisotropy(un) / final_anisotropy(a1), r2 = final_anisotropy(un) / final_anisotropy(a2);
  return {r1 >= 10.0 && r2 >= 10.0, "anisotropy untuned " + sci(final_anisotropy(un)) + ", A1 = 0 " +
                                        sci(final_anisotropy(a1)) + " (ratio " + fmt("%.1f", r1) + "), A2 = 0 " +
                                        sci(final_anisotropy(a2)) + " (ratio " + fmt("%.1f", r2) + "), need >= 10"};
}

Verdict c9_gaussian_vortex() {
  const double nu = 0.0035, s4 = 3.0 * nu;
  GaussianConfig cfg;
  cfg.Nx = cfg.Ny = 301;
  cfg.steps = 9000;
  cfg.r0 = 8.0;
  cfg.g0 = 1e-2;
  cfg.chi = nu;
  cfg.V = {0.03, 0.0};
  const auto tuned = run_gaussian_vortex(d2q9_ns(0.5, s4, 1.0 / (12.0 * s4)), cfg);
  const auto plain = run_gaussian_vortex(d2q9_ns(0.5, s4, 0.5), cfg);
  const double ratio = final_anisotropy(plain) / final_anisotropy(tuned);
  const double ratio_high = higher_harmonics(plain.back()) / higher_harmonics(tuned.back());

  const double nu13 = 0.003, s13 = 4.0 * nu13 / 2.0;
  GaussianConfig c13;
  c13.Nx = c13.Ny = 363;
  c13.steps = 2770;
  c13.dump_every = 554;
  c13.r0 = 11.0;
  c13.g0 = 1e-2;
  c13.chi = nu13;
  c13.V = {0.0, 0.0};
  const auto still = run_gaussian_vortex(d2q13(s13, 1.0 / (12.0 * s13), 1.0 / (12.0 * s13)), c13);
  double worst13 = 0.0;
  for (const auto& r : still) worst13 = std::max(worst13, r.anisotropy);

  return {ratio >= 10.0 && worst13 <= 1e-3,
          "D2Q9 anisotropy arbitrary " + sci(final_anisotropy(plain)) + " / tuned " + sci(final_anisotropy(tuned)) +
              " = " + fmt("%.2f", ratio) + " (need >= 10; m >= 2 only: " + fmt("%.1f", ratio_high) +
              "); D2Q13 V = 0 max anisotropy " + sci(worst13) + " (tol 1e-3)"};
}

Verdict c10_3d_conditions() {
  double kappa_err = 0.0;
  for (const std::string name : {"D3Q15-AD", "D3Q19-AD"})
    for (double v : {0.0, 0.08}) {
      const auto m = fixtures::sample_model(name, {{"vx", v}, {"vy", -0.5 * v}, {"vz", 0.3 * v}});
      Background bg;
      bg.V = {v, -0.5 * v, 0.3 * v};
      const double alpha = m.param("alpha"), s1 = m.rates.sigma(1);
      const double kappa = name == "D3Q15-AD" ? (2.0 + alpha) / 3.0 * s1 : (alpha + 30.0) / 57.0 * s1;
      for (const auto& k : directions9()) kappa_err = std::max(kappa_err, rel(fitted(m, bg, k, "density", 2), kappa));
    }

  struct Case {
    std::string model;
    int which;
    double alpha, sigma1, x;
    bool trt;
  };
  const std::vector<Case> cases = {{"D3Q15-AD", 1, -1.0, 0.3, 0.4, false}, {"D3Q15-AD", 2, -1.0, 0.3, 0.0, false},
                                   {"D3Q19-AD", 1, -10.0, 0.3, 0.4, false}, {"D3Q19-AD", 2, -10.0, 0.3, 0.0, false},
                                   {"D3Q15-AD", 1, -1.0, 0.3, 0, true},      {"D3Q19-AD", 1, -10.0, 0.3, 0, true},
                                   {"D3Q15-AD", 2, -1.0, kRt12, 0, true},    {"D3Q19-AD", 2, -10.0, kRt12, 0, true}};
  double h = 0.0;
  for (const auto& c : cases) {
    const auto r = c.trt ? d3_trt(c.model, c.which, c.alpha, c.sigma1) : d3_conditions(c.model, c.which, c.alpha, c.sigma1, c.x);
    if (!r.feasible) return {false, c.model + " case infeasible: " + r.note};
    ParamMap params = {{"alpha", c.alpha}, {"beta", 1.0}, {"d1", r.d1.value_or(c.x)}};
    if (c.model == "D3Q19-AD") params["d2"] = r.d2.value_or(0.0);
    ParamMap rates = {{"sigma1", c.sigma1}, {"sigma5", r.sigma5}, {"sigma6", *r.sigma6}};
    rates = c.trt ? fill_rates(c.model, rates, c.sigma1, *r.sigma6) : fill_rates(c.model, rates, 0.5, 0.5);
    const auto m = build_model(c.model, params, rates);
    for (const auto& k : directions9()) h = std::max(h, std::abs(measure_anomalous_advection(m, k, k)));
  }
  return {kappa_err <= 1e-6 && h <= 1e-8,
          "diffusivity error " + sci(kappa_err) + " (tol 1e-6); max |h| over 8 parameter sets " + sci(h) + " (tol 1e-8)"};
}

double max_a4(const Model& m) {
  double r = 0.0;
  for (const auto& k : directions9()) r = std::max(r, std::abs(to_coefficients(taylor_coefficients(m, {}, k)).a4));
  return r;
}

Verdict c11_hyperdiffusivity() {
  double trt = 0.0, general = 0.0;
  for (const std::string name : {"D3Q15-AD", "D3Q19-AD"})
    trt = std::max(trt, max_a4(build_model(name, fixtures::sample_model(name).params,
                                           fill_rates(name, {}, kRt12, 1.0 / std::sqrt(3.0)))));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int samples = 0;
  for (const std::string name : {"D3Q15-AD", "D3Q19-AD"}) {
    int accepted = 0;
    while (accepted < 3) {
      const double alpha = name == "D3Q15-AD" ? -1.5 + 3.5 * u(rng) : -20.0 + 20.0 * u(rng);
      const double beta = 0.5 + 1.5 * u(rng), s1 = 0.05 + 0.95 * u(rng), s6 = 0.05 + 0.95 * u(rng);
      double s11 = 0, s5 = 0;
      try {
        std::tie(s11, s5) = hyperdiffusivity_null(name, alpha, beta, s1, s6);
      } catch (const DomainError&) {
        continue;
      }
      if (!(s11 > 0.0 && s5 > 0.0 && s11 < 20.0 && s5 < 20.0)) continue;
      ParamMap params = fixtures::sample_model(name).params;
      params["alpha"] = alpha;
      params["beta"] = beta;
      const auto m = build_model(name, params,
                                 fill_rates(name, {{"sigma1", s1}, {"sigma6", s6}, {"sigma11", s11}, {"sigma5", s5}}, 0.5, 0.5));
      general = std::max(general, max_a4(m));
      ++accepted;
      ++samples;
    }
  }
  return {trt <= 1e-8 && general <= 1e-8, "two-rate point max |a4| " + sci(trt) + ", " + std::to_string(samples) +
                                              " random samples max |a4| " + sci(general) + " (tol 1e-8)"};
}

Verdict c12_kernel_growth() {
  double worst = 0.0;
  for (const auto& name : model_names()) {
    ParamMap extra;
    if (name.find("-NS") == std::string::npos) {
      extra["vx"] = 0.05;
      if (name != "D2Q5") extra["vy"] = 0.02;
    }
    const auto m = fixtures::sample_model(name, extra);
    const auto g = kernel_growth_check(m, m.d() == 3 ? std::array<int, 3>{32, 4, 4} : std::array<int, 3>{32, 4, 1}, 1, 0.05);
    worst = std::max(worst, g.rel_error);
  }
  return {worst <= 1e-6, "max relative error of simulated vs tracked eigenvalue " + sci(worst) + " (tol 1e-6)"};
}

Verdict c13_structure() {
  std::vector<std::string> failures;
  for (const auto& name : model_names()) {
    const auto m = fixtures::sample_model(name);
    const int q = m.q();
    for (int k = 0; k < q; ++k)
      for (int l = k + 1; l < q; ++l) {
        Rational dot(0);
        for (int p = 0; p < q; ++p) dot = dot + m.basis.exact[k][p] * m.basis.exact[l][p];
        if (!dot.is_zero()) failures.push_back(name + " orthogonality");
      }
    for (int k = 0; k < q; ++k)
      for (int p = 0; p < q; ++p)
        if (m.basis.matrix(k, m.velocity_set.opposite[p]) != m.basis.parity[k] * m.basis.matrix(k, p))
          failures.push_back(name + " parity");
  }
  const auto m15 = fixtures::sample_model("D3Q15-AD"), m19 = fixtures::sample_model("D3Q19-AD");
  for (int k = 0; k < 15; ++k)
    for (int p = 0; p < 15; ++p)
      if (!(m15.basis.exact[k][p] == Rational(kReferenceD3Q15[k][p]))) failures.push_back("D3Q15 matrix");
  for (int k = 0; k < 19; ++k)
    for (int p = 0; p < 19; ++p)
      if (!(m19.basis.exact[k][p] == Rational(kReferenceD3Q19[k][p]))) failures.push_back("D3Q19 matrix");

  double naive = 0.0, mass = 0.0, momentum = 0.0;
  for (const auto& name : model_names()) {
    const bool ad = name.find("-NS") == std::string::npos;
    const auto m = fixtures::sample_model(name, ad ? ParamMap{{"vx", 0.08}, {"vy", -0.05}} : ParamMap{});
    LatticeState s(m, {6, 7, m.d() == 3 ? 5 : 1});
    initialize_equilibrium(s, oracles::wavy_fields(s, 0.1));
    for (std::int64_t n = 0; n < s.nodes(); ++n) s.f(m.q() - 1, n) += 1e-3 * std::cos(0.9 * n);
    LatticeState r = s;
    const double m0 = total_mass(s);
    const auto j0 = total_momentum(s);
    for (int t = 0; t < 20; ++t) {
      r.data() = oracles::naive_step(r);
      step(s);
    }
    for (std::size_t i = 0; i < s.data().size(); ++i) naive = std::max(naive, std::abs(s.data()[i] - r.data()[i]));
    mass = std::max(mass, std::abs(total_mass(s) - m0) / m0);
    if (!ad) {
      const auto j = total_momentum(s);
      for (int a = 0; a < 3; ++a) momentum = std::max(momentum, std::abs(j[a] - j0[a]) / m0);
    }
  }
  if (naive > 1e-14) failures.push_back("kernel vs naive");
  if (mass > 1e-12) failures.push_back("mass");
  if (momentum > 1e-12) failures.push_back("momentum");
  std::string detail = "kernel vs naive " + sci(naive) + " (tol 1e-14), mass drift " + sci(mass) + ", momentum drift " +
                       sci(momentum) + " (tol 1e-12), orthogonality/parity/3D matrices exact";
  if (!failures.empty()) detail += "; failed: " + failures.front();
  return {failures.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Verdict()>> criteria = {
      c1_k0_spectrum,      c2_d2q9_ad_diffusivity, c3_d2q9_ns_viscosity, c4_anomaly_cancellation, c5_d2q13_viscosity,
      c6_d2q13_quartic,    c7_plane_wave_trend,    c8_gaussian_dot,      c9_gaussian_vortex,      c10_3d_conditions,
      c11_hyperdiffusivity, c12_kernel_growth,     c13_structure};
  std::set<int> chosen;
  for (int i = 1; i < argc; ++i) chosen.insert(std::atoi(argv[i]));
  int failed = 0;
  for (int i = 0; i < static_cast<int>(criteria.size()); ++i) {
    if (!chosen.empty() && !chosen.count(i + 1)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i]();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %s  %s  [%.1f s]\n", i + 1, v.pass ? "PASS" : "FAIL", v.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !v.pass;
  }
  std::printf("%d criteria failed\n", failed);
  return 0;
}
