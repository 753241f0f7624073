#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fixtures.hpp"
#include "lbmlab/dispersion.hpp"
#include "lbmlab/theory.hpp"

using namespace lbmlab;

namespace {

const double kPi = std::acos(-1.0);
const double kRt12 = 1.0 / std::sqrt(12.0);

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

Model d2q9_ad(double alpha, double d1, double s1, double s3, double s4, double s6 = 0.5, double s8 = 0.5) {
  return build_model("D2Q9-AD", {{"alpha", alpha}, {"beta", 1.0}, {"d1", d1}, {"a", 0.0}},
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

Model model_from_tune(const std::string& name, const TuneResult& r) { return build_model(name, r.params, r.sigmas); }

}  // namespace

TEST_CASE("s and sigma conversions") {
  CHECK(sigma_from_s(1.0) == 0.5);
  CHECK(s_from_sigma(0.5) == 1.0);
  CHECK_THROWS(sigma_from_s(2.0));
  CHECK_THROWS(sigma_from_s(0.0));
  for (double s : {0.125, 0.25, 0.5, 1.0}) CHECK(s_from_sigma(sigma_from_s(s)) == s);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(1e-3, 2.0);
  for (int i = 0; i < 20000; ++i) {
    const double s = U(rng);
    const double back = s_from_sigma(sigma_from_s(s));
    REQUIRE(sigma_from_s(s) > 0.0);
    CHECK((back == s || back == std::nextafter(s, 0.0) || back == std::nextafter(s, 3.0)));
  }
}

TEST_CASE("predicted transport examples") {
  CHECK(predicted_transport("D2Q9-AD", {{"alpha", -2.0}}, {{1, 0.5}}).at("kappa") == doctest::Approx(1.0 / 6.0));
  const auto q13 = predicted_transport("D2Q13-NS", {{"alpha", -2.0}, {"c1", -1.0}, {"q", 0.0}}, {{3, 0.5}, {4, 0.5}});
  CHECK(q13.at("cs") == doctest::Approx(1.0).epsilon(1e-15));
  const auto ns = predicted_transport("D2Q9-NS", {}, {{4, 0.3}});
  CHECK(ns.at("nu_eff") == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(ns.at("nu_eff") == ns.at("nu0"));
  CHECK(predicted_transport("D3Q15-AD", {{"alpha", 1.0}}, {{1, 0.3}}).at("kappa") == doctest::Approx(0.3));
  CHECK(predicted_transport("D3Q19-AD", {{"alpha", -11.0}}, {{1, 0.3}}).at("kappa") == doctest::Approx(0.1));
  CHECK_THROWS_AS(predicted_transport("D4Q1", {}, {}), ConfigError);
}

TEST_CASE("closed-form transport agrees with dispersion fits") {
  SUBCASE("advection-diffusion diffusivities, with and without advection") {
    for (const std::string name : {"D2Q9-AD", "D3Q15-AD", "D3Q19-AD"}) {
      for (double v : {0.0, 0.08}) {
        const auto m = fixtures::sample_model(name);
        Background bg;
        bg.V = {v, -0.5 * v, m.d() == 3 ? 0.3 * v : 0.0};
        const double kappa = predicted_transport(name, m.params, henon_params(m)).at("kappa");
        for (const auto& dir : {Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0.6, 0.8, 0.0)})
          CHECK(fitted(m, bg, dir, "density", 2) == doctest::Approx(kappa).epsilon(1e-6));
      }
    }
  }
  SUBCASE("D2Q5 diffusivity depends on the advection velocity") {
    const auto m = fixtures::sample_model("D2Q5");
    Background bg;
    bg.V = {0.1, 0.05, 0.0};
    const auto p = predicted_transport("D2Q5", m.params, henon_params(m), bg.V);
    CHECK(fitted(m, bg, {1, 0, 0}, "density", 2) == doctest::Approx(p.at("kappa_xx")).epsilon(1e-6));
    CHECK(fitted(m, bg, {0, 1, 0}, "density", 2) == doctest::Approx(p.at("kappa_yy")).epsilon(1e-6));
  }
  SUBCASE("shear viscosity and sound speed of the athermal models") {
    for (const std::string name : {"D2Q9-NS", "D2Q13-NS"}) {
      const auto m = fixtures::sample_model(name);
      const auto p = predicted_transport(name, m.params, henon_params(m));
      for (double th : {0.0, 0.4}) {
        CHECK(fitted(m, {}, dir2(th), "shear", 2) == doctest::Approx(p.at("nu0")).epsilon(1e-6));
        CHECK(fitted(m, {}, dir2(th), "acoustic+", 1) == doctest::Approx(p.at("cs")).epsilon(1e-6));
      }
    }
  }
  SUBCASE("D2Q9-NS effective viscosity for advection along the wavevector") {
    const auto m = fixtures::sample_model("D2Q9-NS");
    for (double v : {0.05, 0.1}) {
      Background bg;
      bg.V = {v, 0.0, 0.0};
      const double nu = predicted_transport("D2Q9-NS", m.params, henon_params(m), bg.V).at("nu_eff");
      CHECK(fitted(m, bg, {1, 0, 0}, "shear", 2) == doctest::Approx(nu).epsilon(1e-5));
    }
  }
}

TEST_CASE("anomaly amplitudes") {
  for (double t : {0.05, 0.3, 1.7}) CHECK(std::abs(anomaly_A1(-2.0, -1.0, t, t, t)) < 1e-15);
  const double s1 = 0.2, s3 = 0.35, s4 = 0.1;
  CHECK(anomaly_A1(-2.0, -1.0, s1, s3, s4) == doctest::Approx(s1 * (2 * s1 - s3 - s4) / 3.0));
  CHECK_THROWS_AS(anomaly_A1(-2.0, 0.0, s1, s3, s4), DomainError);

  const double a = 0.15, b = 0.4;
  CHECK(anomaly_A2(-2.0, -1.0, a, b, 1.0 / (12.0 * a)) ==
        doctest::Approx((2.0 + 24.0 * a * b - 48.0 * a * a) / 72.0));
  CHECK_THROWS_AS(anomaly_A2(-2.0, -1.0, a, b, 0.3), DomainError);
}

TEST_CASE("measured anomalous advection on the two isotropic branches") {
  // d1 = -1 branch at alpha = -2: h = A1 for every orientation
  for (auto [s1, s3, s4] : {std::array{0.2, 0.35, 0.1}, std::array{0.4, 0.1, 0.25}}) {
    const auto m = d2q9_ad(-2.0, -1.0, s1, s3, s4);
    const double A1 = anomaly_A1(-2.0, -1.0, s1, s3, s4);
    for (double th : thetas13()) CHECK(measure_anomalous_advection(m, dir2(th), dir2(th)) == doctest::Approx(A1).epsilon(1e-9));
  }
  // 12 sigma1 sigma4 = 1 branch: the measured h has the opposite sign of A2
  for (auto [alpha, d1, s1, s3] : {std::array{-2.0, 0.5, 0.2, 0.3}, std::array{-1.0, 1.5, 0.1, 0.6}}) {
    const double s4 = 1.0 / (12.0 * s1);
    const auto m = d2q9_ad(alpha, d1, s1, s3, s4);
    const double A2 = anomaly_A2(alpha, d1, s1, s3, s4);
    for (double th : thetas13())
      CHECK(measure_anomalous_advection(m, dir2(th), dir2(th)) == doctest::Approx(-A2).epsilon(1e-9));
  }
  // zero of A1: no anomaly in any direction
  const auto m = d2q9_ad(-2.0, -1.0, 0.3, 0.3, 0.3);
  for (double th : thetas13()) CHECK(std::abs(measure_anomalous_advection(m, dir2(th), dir2(th))) <= 1e-8);
}

TEST_CASE("D2Q9-NS third-order coefficients") {
  const auto c = d2q9_ns_order3(0.3, 0.25, 1.0 / 3.0);
  CHECK(std::abs(c.g2) < 1e-16);
  for (double th : thetas13()) CHECK(std::abs(c.perpendicular(th)) < 1e-16);

  const auto q = d2q9_ns_order3(kRt12, kRt12, kRt12);
  CHECK(std::abs(q.g1) < 1e-16);
  CHECK(q.isotropic);
  for (double th : thetas13()) CHECK(std::abs(q.parallel(th)) < 1e-16);

  CHECK_FALSE(d2q9_ns_order3(0.3, 0.25, 1.0 / 3.0).isotropic);
  CHECK_THROWS_AS(d2q9_ns_order3(0.3, 0.25, 0.2, -1.0, 1.0), DomainError);
}

TEST_CASE("D2Q9-NS measured shear-wave anomaly") {
  // V along k: h = [16 s4 (s4 - s6) - (1 - 12 s4 s6) sin^2 2θ] / 24
  for (auto [s3, s4, s6] : {std::array{0.5, 0.1, 0.6}, std::array{0.2, 0.3, 0.15}}) {
    const auto m = d2q9_ns(s3, s4, s6);
    for (double th : {0.0, 0.3, kPi / 4}) {
      const double f2 = std::pow(std::sin(2 * th), 2);
      const double expect = (16 * s4 * (s4 - s6) - (1 - 12 * s4 * s6) * f2) / 24.0;
      CHECK(measure_anomalous_advection(m, dir2(th), dir2(th), "shear") == doctest::Approx(expect).epsilon(1e-8));
    }
  }
  // isotropy pair: orientation independent, equal to 16 s4 (s4 - s6) / 24
  const double s4 = 0.2, s6 = 1.0 / (12.0 * s4);
  const auto m = d2q9_ns(s4, s4, s6);
  for (double th : thetas13())
    CHECK(measure_anomalous_advection(m, dir2(th), dir2(th), "shear") ==
          doctest::Approx(16 * s4 * (s4 - s6) / 24.0).epsilon(1e-8));
}

TEST_CASE("D2Q13 third-order coefficients") {
  CHECK(std::abs(d2q13_order3(0.2, 0.5, 0.5, -1.0, -7.0 / 6.0).nu_v2) < 1e-16);
  CHECK(d2q13_order3(0.2, 0.5, 0.5, 0.0, 0.0).nu_v2 == doctest::Approx(12.0 * 7.0 / (77.0 * 3.0)));
  CHECK(std::abs(d2q13_order3(kRt12, 1 / (12 * kRt12), 1 / (12 * kRt12), -1.0, -7.0 / 6.0).isotropic_residual) < 1e-16);

  // zero numerator of the perpendicular term
  const double s4 = 0.5, s8 = 0.3, s6 = (10055.0 / s4 - 30888.0 * s8) / 89772.0;
  const auto p = d2q13_order3(s4, s6, s8, -1.0, 0.0);
  for (double th : thetas13()) CHECK(std::abs(p.perpendicular(th, 0.1)) < 1e-15);
}

TEST_CASE("D2Q13 measured residual advection at the isotropy condition") {
  for (double s4 : {0.15, 0.2, 0.35}) {
    const auto m = d2q13(s4, 1 / (12 * s4), 1 / (12 * s4));
    const double res = d2q13_order3(s4, 1 / (12 * s4), 1 / (12 * s4), -1.0, -7.0 / 6.0).isotropic_residual;
    CHECK(res == doctest::Approx((3.0 - 1.0) / 24.0 * (12 * s4 * s4 - 1)));
    for (double th : {0.0, 0.5, kPi / 4})
      CHECK(std::abs(measure_anomalous_advection(m, dir2(th), dir2(th), "shear") - res) <= 1e-6);
  }
}

TEST_CASE("D2Q13 viscosity is velocity independent at q = -7/6") {
  auto v2_coefficient = [](double q) {
    const auto m = d2q13(0.2, 0.5, 0.5, q);
    Background b0, b1;
    b1.V = {0.1, 0.0, 0.0};
    return (fitted(m, b1, {1, 0, 0}, "shear", 2) - fitted(m, b0, {1, 0, 0}, "shear", 2)) / 0.01;
  };
  CHECK(std::abs(v2_coefficient(-7.0 / 6.0)) <= 1e-8);
  CHECK(std::abs(v2_coefficient(0.0)) > 1e-3);
}

TEST_CASE("3D isotropy conditions") {
  const double t = kRt12;
  for (const std::string name : {"D3Q15-AD", "D3Q19-AD"}) {
    const auto r = d3_trt(name, 2, name == "D3Q15-AD" ? -1.0 : -10.0, t);
    CHECK(r.feasible);
    CHECK(*r.sigma6 == doctest::Approx(t).epsilon(1e-15));
    CHECK(r.sigma5 == doctest::Approx(t).epsilon(1e-15));
  }
  const auto bad = d3_conditions("D3Q15-AD", 1, 0.0, 0.5, 0.5);
  CHECK(bad.sigma5 == doctest::Approx(-2.5));
  CHECK_FALSE(bad.feasible);
  CHECK_THROWS_AS(d3_conditions("D3Q15-AD", 1, -1.0 / 3.0, 0.5, 0.5), DomainError);
  CHECK_THROWS_AS(d3_conditions("D3Q19-AD", 1, 5.0 / 3.0, 0.5, 0.5), DomainError);
}

TEST_CASE("3D isotropy conditions cancel the measured anomaly") {
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
  for (const auto& c : cases) {
    CAPTURE(c.model);
    CAPTURE(c.which);
    CAPTURE(c.trt);
    const auto r = c.trt ? d3_trt(c.model, c.which, c.alpha, c.sigma1) : d3_conditions(c.model, c.which, c.alpha, c.sigma1, c.x);
    REQUIRE(r.feasible);
    ParamMap params = {{"alpha", c.alpha}, {"beta", 1.0}, {"d1", r.d1.value_or(0.0)}};
    if (c.model == "D3Q19-AD") params["d2"] = r.d2.value_or(0.0);
    ParamMap rates = {{"sigma1", c.sigma1}, {"sigma5", r.sigma5}, {"sigma6", *r.sigma6}};
    // remaining rates: TRT parity split, else 1/2
    const auto proto = fixtures::sample_model(c.model);
    for (int row = 0; row < proto.q(); ++row) {
      const auto& sym = proto.rates.symbol[row];
      if (sym.empty()) continue;
      const std::string key = "sigma" + sym.substr(1);
      if (rates.count(key)) continue;
      rates[key] = c.trt ? (proto.basis.parity[row] < 0 ? c.sigma1 : *r.sigma6) : 0.5;
    }
    const auto m = build_model(c.model, params, rates);
    for (const auto& k : directions9()) CHECK(std::abs(measure_anomalous_advection(m, k, k)) <= 1e-8);
  }
}

TEST_CASE("null hyper-diffusivity") {
  for (const std::string name : {"D3Q15-AD", "D3Q19-AD"})
    for (double alpha : {-1.0, 2.0}) {
      const auto [s11, s5] = hyperdiffusivity_null(name, alpha, 1.5, kRt12, 1.0 / std::sqrt(3.0));
      CHECK(s11 == doctest::Approx(kRt12).epsilon(1e-14));
      CHECK(s5 == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
    }
  CHECK_THROWS_AS(hyperdiffusivity_null("D3Q15-AD", -1.0, 1.0, 0.25, 1.0 / 3.0), DomainError);
  CHECK_THROWS_AS(hyperdiffusivity_null("D3Q19-AD", -10.0, 1.0, 0.5, 1.0 / 6.0), DomainError);
}

TEST_CASE("tuning conditions vanish exactly at their condition") {
  const auto& c = tuning_condition("d2q9-ns/full");
  CHECK(c.residual(d2q9_ns(0.2, 0.2, 1.0 / 2.4)) < 1e-15);
  CHECK(c.residual(d2q9_ns(0.2, 0.3, 1.0 / 2.4)) > 1e-3);
  CHECK(tuning_condition("d2q9-ad/A1").residual(d2q9_ad(-2.0, -1.0, 0.3, 0.3, 0.3)) < 1e-15);
  CHECK_THROWS_AS(tuning_condition("no/such"), ConfigError);
  for (const auto& tc : tuning_conditions()) CHECK_FALSE(tc.description.empty());

  CHECK(normalized_residual({1.0, -1.0}) == 0.0);
  CHECK(normalized_residual({2.0, -1.0}) == doctest::Approx(0.5));
}

TEST_CASE("bracket_roots reports every root") {
  const auto r = bracket_roots([](double x) { return (x - 0.5) * (x - 2.0) * (x - 7.0); });
  REQUIRE(r.size() == 3);
  CHECK(r[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r[1] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(r[2] == doctest::Approx(7.0).epsilon(1e-14));
  CHECK(bracket_roots([](double x) { return x * x + 1.0; }).empty());
}

TEST_CASE("tune examples") {
  SUBCASE("D2Q9-NS quartic") {
    const auto r = tune("D2Q9-NS", "quartic", "", {});
    CHECK(r.sigmas.at("sigma4") == doctest::Approx(kRt12).epsilon(1e-15));
    CHECK(r.verified <= 1e-8);
  }
  SUBCASE("D2Q13 isotropic advection at sigma4 = 0.1") {
    const auto r = tune("D2Q13-NS", "isotropic-advection", "", {{"sigma4", 0.1}});
    CHECK(r.sigmas.at("sigma6") == doctest::Approx(5.0 / 6.0).epsilon(1e-14));
    CHECK(r.sigmas.at("sigma8") == doctest::Approx(5.0 / 6.0).epsilon(1e-14));
  }
  SUBCASE("D2Q9-AD zero anomaly with a requested diffusivity") {
    const auto r = tune("D2Q9-AD", "zero-anomaly", "d1", {{"kappa", 0.008}, {"sigma6", 0.1}, {"sigma8", 0.1}});
    CHECK(r.params.at("d1") == -1.0);
    CHECK(r.sigmas.at("sigma1") == doctest::Approx(0.024).epsilon(1e-14));
    CHECK(r.sigmas.at("sigma3") == doctest::Approx(0.024).epsilon(1e-10));
    CHECK(r.sigmas.at("sigma4") == doctest::Approx(0.024).epsilon(1e-10));
  }
  SUBCASE("every returned tuning is admissible and verified by dispersion") {
    const std::vector<std::tuple<std::string, std::string, std::string, ParamMap>> calls = {
        {"D2Q9-AD", "isotropic-advection", "sigma14", {{"sigma1", 0.2}, {"sigma3", 0.3}}},
        {"D2Q9-NS", "isotropic-advection", "full", {{"sigma4", 0.2}}},
        {"D2Q13-NS", "quartic", "", {}},
        {"D3Q19-AD", "isotropic-advection", "trt2", {{"sigma1", kRt12}}},
        {"D3Q15-AD", "null-hyperdiffusivity", "", {{"sigma1", kRt12}, {"sigma6", 1.0 / std::sqrt(3.0)}}}};
    for (const auto& [model, objective, route, fixed] : calls) {
      CAPTURE(model);
      CAPTURE(objective);
      const auto r = tune(model, objective, route, fixed);
      CHECK(r.verified <= 1e-8);
      for (const auto& [k, sigma] : r.sigmas) {
        CHECK(sigma > 0.0);
        const double s = s_from_sigma(sigma);
        CHECK((s > 0.0 && s < 2.0));
      }
      CHECK_NOTHROW(model_from_tune(model, r));
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(tune("D2Q9-NS", "bogus", "", {}), ConfigError);
    CHECK_THROWS_AS(tune("D2Q9-AD", "quartic", "d1", {}), DomainError);
    CHECK_THROWS_AS(tune("D2Q9-AD", "isotropic-advection", "", {}), ConfigError);
    CHECK_THROWS_AS(tune("D3Q15-AD", "isotropic-advection", "case1", {{"sigma1", 0.5}, {"sigma6", 0.5}, {"alpha", 0.0}}),
                    DomainError);
  }
}
