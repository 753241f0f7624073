#include "lbmlab/theory.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>

#include "lbmlab/dispersion.hpp"

namespace lbmlab {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

double sig(const HenonParams& s, int i, const char* who) {
  auto it = s.find(i);
  if (it == s.end()) throw ConfigError(std::string(who) + ": missing sigma" + std::to_string(i));
  return it->second;
}

double pget(const ParamMap& p, const std::string& k, const char* who) {
  auto it = p.find(k);
  if (it == p.end()) throw ConfigError(std::string(who) + ": missing parameter '" + k + "'");
  return it->second;
}

void nonsingular(double den, const std::string& what) {
  if (std::abs(den) < 1e-14) throw DomainError("singular denominator: " + what + " = 0");
}

double sin2(double x) { return std::sin(x) * std::sin(x); }

}  // namespace

double sigma_from_s(double s) {
  if (!(s > 0.0 && s < 2.0)) throw DomainError("relaxation rate " + fmt(s) + " not in (0,2)");
  return 1.0 / s - 0.5;
}

double s_from_sigma(double sigma) {
  if (!(sigma > 0.0)) throw DomainError("Henon parameter " + fmt(sigma) + " must be positive");
  return 1.0 / (sigma + 0.5);
}

HenonParams henon_params(const Model& model) {
  HenonParams out;
  for (int k = 0; k < model.q(); ++k) {
    const auto& sym = model.rates.symbol[k];
    if (sym.empty()) continue;
    out[std::stoi(sym.substr(1))] = model.rates.sigma(k);
  }
  return out;
}

ParamMap predicted_transport(const std::string& model, const ParamMap& params, const HenonParams& s,
                             const std::array<double, 3>& V) {
  const char* who = "predicted_transport";
  const double V2 = V[0] * V[0] + V[1] * V[1] + V[2] * V[2];
  if (model == "D2Q5") {
    const double al = pget(params, "alpha", who), s1 = sig(s, 1, who);
    return {{"kappa_xx", s1 * ((al + 4.0) / 10.0 - V[0] * V[0])}, {"kappa_yy", s1 * ((al + 4.0) / 10.0 - V[1] * V[1])}};
  }
  if (model == "D2Q9-AD") return {{"kappa", (pget(params, "alpha", who) + 4.0) / 6.0 * sig(s, 1, who)}};
  if (model == "D2Q9-NS") {
    const double nu0 = sig(s, 4, who) / 3.0;
    const double al = params.count("alpha") ? params.at("alpha") : -2.0;
    return {{"nu0", nu0}, {"nu_eff", nu0 * (1.0 - 3.0 * V2)}, {"cs", std::sqrt((al + 4.0) / 6.0)}};
  }
  if (model == "D2Q13-NS") {
    const double al = pget(params, "alpha", who), c1 = pget(params, "c1", who), q = pget(params, "q", who);
    const double nu0 = (c1 + 3.0) * sig(s, 4, who) / 4.0;
    const double nv = 12.0 * (7.0 + 6.0 * q) / (77.0 * (3.0 + c1));
    return {{"nu0", nu0},
            {"zeta0", (13.0 * c1 - al + 11.0) * sig(s, 3, who) / 26.0},
            {"cs", std::sqrt((al + 28.0) / 26.0)},
            {"nu_v2", nv},
            {"nu_eff", nu0 * (1.0 - nv * V2)}};
  }
  if (model == "D3Q15-AD") return {{"kappa", (2.0 + pget(params, "alpha", who)) / 3.0 * sig(s, 1, who)}};
  if (model == "D3Q19-AD") return {{"kappa", (pget(params, "alpha", who) + 30.0) / 57.0 * sig(s, 1, who)}};
  throw ConfigError("predicted_transport: unknown model '" + model + "'");
}

double anomaly_A1(double alpha, double d1, double s1, double s3, double s4) {
  if (d1 != -1.0) throw DomainError("anomaly_A1 requires d1 = -1, got " + fmt(d1));
  return (2.0 + alpha + 4.0 * (alpha * s3 - 2.0 * s4) * s1 + 8.0 * (4.0 + alpha) * s1 * s1) / 24.0;
}

double anomaly_A2(double alpha, double d1, double s1, double s3, double s4) {
  if (std::abs(12.0 * s1 * s4 - 1.0) > 1e-12)
    throw DomainError("anomaly_A2 requires sigma1 sigma4 = 1/12, got " + fmt(s1 * s4));
  return (7.0 - d1 + 3.0 * alpha + 12.0 * s1 * s3 * (1.0 - alpha + d1) - 24.0 * s1 * s1 * (4.0 + alpha)) / 72.0;
}

double NSOrder3::perpendicular(double theta) const { return (1.0 - 12.0 * sigma4 * sigma6) * std::sin(4.0 * theta) / 24.0; }

double NSOrder3::parallel(double theta) const {
  return (16.0 * sigma4 * (sigma4 - sigma6) + (1.0 - 12.0 * sigma4 * sigma6) * sin2(2.0 * theta)) / 24.0;
}

NSOrder3 d2q9_ns_order3(double s3, double s4, double s6, double alpha, double beta) {
  if (alpha != -2.0 || beta != 1.0)
    throw DomainError("d2q9_ns_order3 is only available for alpha = -2, beta = 1");
  NSOrder3 r;
  r.h0 = (1.0 - 3.0 * (s3 * s3 + s4 * s4)) / 27.0;
  r.h1 = (s3 + 3.0 * s4 - 2.0 * s6) * (s3 - s4) / 6.0;
  r.h3 = (s4 - 2.0 * s6) * (s3 - s4) / 3.0;
  r.h4 = (1.0 + 6.0 * s4 * (s3 + s4 - 2.0 * s6)) / 18.0;
  r.g1 = (1.0 - 6.0 * s6 * (s3 + s4)) / 24.0;
  r.g2 = (1.0 - 12.0 * s4 * s6) / 24.0;
  r.g3 = (1.0 + 12.0 * s6 * (s3 - 2.0 * s4)) / 24.0;
  r.sigma4 = s4;
  r.sigma6 = s6;
  r.isotropic = std::abs(s3 - s4) <= 1e-12 * std::max(s3, s4) && std::abs(12.0 * s4 * s6 - 1.0) <= 1e-12;
  return r;
}

double D2Q13Order3::perpendicular(double theta, double V) const { return perpendicular_amp * V * std::sin(4.0 * theta); }

double D2Q13Order3::parallel(double theta, double V) const {
  return parallel_f2 * V * sin2(2.0 * theta) + parallel_const * V;
}

D2Q13Order3 d2q13_order3(double s4, double s6, double s8, double c1, double q) {
  if (!(s4 > 0.0)) throw DomainError("d2q13_order3 requires sigma4 > 0");
  D2Q13Order3 r;
  r.nu_v2 = 12.0 * (7.0 + 6.0 * q) / (77.0 * (3.0 + c1));
  r.perpendicular_amp = (s4 * (89772.0 * s6 + 30888.0 * s8) - 10055.0) / 157080.0;
  r.parallel_f2 = s4 * ((128.0 - 306.0 * c1) / 85.0 * s6 + (306.0 * c1 + 182.0) / 85.0 * s8) - 31.0 / 102.0;
  r.parallel_const = s4 * (-(1.0 + c1) / 5.0 * s6 + (9.0 * c1 - 1.0) / 20.0 * s8) - (5.0 + 3.0 * c1) / 48.0 +
                     (3.0 + c1) / 2.0 * s4 * s4;
  r.isotropic_residual = (3.0 + c1) / 24.0 * (12.0 * s4 * s4 - 1.0);
  return r;
}

D3Assignment d3_conditions(const std::string& model, int which, double al, double s1, double x) {
  if (!(s1 > 0.0)) throw DomainError("d3_conditions: sigma1 must be positive");
  D3Assignment r;
  if (model == "D3Q15-AD" && which == 1) {
    nonsingular(1.0 + 3.0 * al, "1 + 3 alpha");
    const double s6 = x;
    r.d1 = -7.0 / 3.0;
    r.sigma6 = s6;
    r.sigma5 = 4.0 * s6 / (1.0 + 3.0 * al) - 6.0 * (2.0 + al) * s1 / (1.0 + 3.0 * al) +
               3.0 * (1.0 + al) / (4.0 * (1.0 + 3.0 * al) * s1);
  } else if (model == "D3Q15-AD" && which == 2) {
    const double d1 = x, den = 3.0 + 2.0 * d1 - 5.0 * al;
    nonsingular(den, "3 + 2 d1 - 5 alpha");
    r.d1 = d1;
    r.sigma6 = 1.0 / (12.0 * s1);
    r.sigma5 = 10.0 * (2.0 + al) * s1 / den - (15.0 * al - 2.0 * d1 + 17.0) / (12.0 * den * s1);
  } else if (model == "D3Q19-AD" && which == 1) {
    nonsingular(3.0 * al - 5.0, "3 alpha - 5");
    const double s6 = x;
    r.d1 = -2.0 / 3.0;
    r.d2 = 0.0;
    r.sigma6 = s6;
    r.sigma5 = 76.0 * s6 / (3.0 * al - 5.0) + 6.0 * (al + 30.0) * s1 / (5.0 - 3.0 * al) +
               3.0 * (11.0 + al) / (4.0 * (3.0 * al - 5.0) * s1);
  } else if (model == "D3Q19-AD" && which == 2) {
    const double d1 = x, den = 21.0 + 19.0 * d1 - 5.0 * al;
    nonsingular(den, "21 + 19 d1 - 5 alpha");
    r.d1 = d1;
    r.sigma6 = 1.0 / (12.0 * s1);
    r.sigma5 = 10.0 * (al + 30.0) * s1 / den - (279.0 - 19.0 * d1 + 15.0 * al) / (12.0 * den * s1);
  } else {
    throw ConfigError("d3_conditions: no case " + std::to_string(which) + " for model '" + model + "'");
  }
  if (!(r.sigma5 > 0.0)) {
    r.feasible = false;
    r.note = "sigma5 = " + fmt(r.sigma5) + " <= 0";
  }
  return r;
}

D3Assignment d3_trt(const std::string& model, int which, double al, double s1) {
  if (!(s1 > 0.0)) throw DomainError("d3_trt: sigma1 must be positive");
  D3Assignment r;
  if (which == 2) {
    if (model != "D3Q15-AD" && model != "D3Q19-AD") throw ConfigError("d3_trt: unknown model '" + model + "'");
    const double t = 1.0 / std::sqrt(12.0);
    if (std::abs(s1 - t) > 1e-12) {
      r.feasible = false;
      r.note = "TRT case 2 requires sigma1 = 1/sqrt(12)";
    }
    r.sigma6 = t;
    r.sigma5 = t;
    return r;
  }
  if (which != 1) throw ConfigError("d3_trt: no case " + std::to_string(which));
  double s6;
  if (model == "D3Q15-AD") {
    nonsingular(1.0 - al, "1 - alpha");
    s6 = (2.0 * (2.0 + al) * s1 - (1.0 + al) / (4.0 * s1)) / (1.0 - al);
    r.d1 = -7.0 / 3.0;
  } else if (model == "D3Q19-AD") {
    nonsingular(27.0 - al, "27 - alpha");
    s6 = (2.0 * (30.0 + al) * s1 - (11.0 + al) / (4.0 * s1)) / (27.0 - al);
    r.d1 = -2.0 / 3.0;
    r.d2 = 0.0;
  } else {
    throw ConfigError("d3_trt: unknown model '" + model + "'");
  }
  r.sigma6 = s6;
  r.sigma5 = s6;
  if (!(s6 > 0.0)) {
    r.feasible = false;
    r.note = "sigma6 = " + fmt(s6) + " <= 0";
  }
  return r;
}

std::pair<double, double> hyperdiffusivity_null(const std::string& model, double al, double be, double s1, double s6) {
  const double p = 12.0 * s1 * s6 - 1.0;
  nonsingular(p, "12 sigma1 sigma6 - 1");
  if (model == "D3Q15-AD") {
    nonsingular(8.0 * al + be, "8 alpha + beta");
    const double s11 = ((8.0 * al + be) + 14.0 * (al + 2.0) * (1.0 - 6.0 * s1 * s6)) / ((8.0 * al + be) * p) * s1;
    const double den = 5.0 * (al + 2.0) * (3.0 * al + 1.0) * (1.0 - 12.0 * s1 * s6) + 30.0 * (al + 1.0) + 2.0 * (be - 1.0);
    nonsingular(den, "D3Q15 sigma5 denominator");
    const double num = 60.0 * (al + 2.0) * (al + 2.0) * p * s1 * s1 - 960.0 * (al + 2.0) * s1 * s1 * s6 * s6 +
                       4.0 * (2.0 * be - 40.0 * al + 68.0 - 45.0 * al * al) * s1 * s6 + 15.0 * (al + 2.0) * al;
    return {s11, num / (4.0 * s1 * den)};
  }
  if (model == "D3Q19-AD") {
    nonsingular(2.0 * al + 5.0 * be, "2 alpha + 5 beta");
    const double A = al + 30.0;
    const double s11 = -s1 * (84.0 * A * s1 * s6 - 95.0 * be - 52.0 * al - 420.0) / (19.0 * (2.0 * al + 5.0 * be) * p);
    const double num = 1008.0 * A * A * s1 * s1 * s1 * s6 - 84.0 * (A * A + 304.0 * A * s6 * s6) * s1 * s1 +
                       4.0 * (32676.0 - 63.0 * al * al - 512.0 * al + 722.0 * be) * s6 * s1 + 21.0 * A * (al - 8.0);
    const double den = -4.0 * (84.0 * A * (3.0 * al - 5.0) * s1 * s6 - 21.0 * al * al - 722.0 * be - 937.0 * al - 546.0) * s1;
    nonsingular(den, "D3Q19 sigma5 denominator");
    return {s11, num / den};
  }
  throw ConfigError("hyperdiffusivity_null: unknown model '" + model + "'");
}

double normalized_residual(std::initializer_list<double> terms) {
  double sum = 0.0, mx = 0.0;
  for (double t : terms) {
    sum += t;
    mx = std::max(mx, std::abs(t));
  }
  return mx == 0.0 ? 0.0 : std::abs(sum) / mx;
}

const std::vector<TuningCondition>& tuning_conditions() {
  static const std::vector<TuningCondition> list = [] {
    std::vector<TuningCondition> c;
    auto S = [](const Model& m, int i) { return sig(henon_params(m), i, "tuning condition"); };
    c.push_back({"d2q9-ad/d1", "D2Q9-AD isotropic advection via d1 = -1",
                 [](const Model& m) { return normalized_residual({m.param("d1"), 1.0}); }});
    c.push_back({"d2q9-ad/A1", "D2Q9-AD zero anomaly on the d1 = -1 branch (A1 = 0)", [S](const Model& m) {
                   const double al = m.param("alpha"), s1 = S(m, 1), s3 = S(m, 3), s4 = S(m, 4);
                   return std::max(normalized_residual({m.param("d1"), 1.0}),
                                   normalized_residual({2.0 + al, 4.0 * al * s3 * s1, -8.0 * s4 * s1,
                                                        8.0 * (4.0 + al) * s1 * s1}));
                 }});
    c.push_back({"d2q9-ad/sigma14", "D2Q9-AD isotropic advection via 12 sigma1 sigma4 = 1",
                 [S](const Model& m) { return normalized_residual({12.0 * S(m, 1) * S(m, 4), -1.0}); }});
    c.push_back({"d2q9-ad/A2", "D2Q9-AD zero anomaly on the 12 sigma1 sigma4 = 1 branch (A2 = 0)", [S](const Model& m) {
                   const double al = m.param("alpha"), d1 = m.param("d1"), s1 = S(m, 1), s3 = S(m, 3), s4 = S(m, 4);
                   return std::max(normalized_residual({12.0 * s1 * s4, -1.0}),
                                   normalized_residual({7.0, -d1, 3.0 * al, 12.0 * s1 * s3 * (1.0 - al + d1),
                                                        -24.0 * s1 * s1 * (4.0 + al)}));
                 }});
    c.push_back({"d2q9-ns/shear", "D2Q9-NS shear isotropy 12 sigma4 sigma6 = 1",
                 [S](const Model& m) { return normalized_residual({12.0 * S(m, 4) * S(m, 6), -1.0}); }});
    c.push_back({"d2q9-ns/full", "D2Q9-NS isotropy sigma3 = sigma4 and 12 sigma4 sigma6 = 1", [S](const Model& m) {
                   return std::max(normalized_residual({S(m, 3), -S(m, 4)}),
                                   normalized_residual({12.0 * S(m, 4) * S(m, 6), -1.0}));
                 }});
    c.push_back({"d2q9-ns/quartic", "D2Q9-NS quartic 12 sigma4^2 = 1 with 12 sigma4 sigma6 = 1", [S](const Model& m) {
                   return std::max(normalized_residual({12.0 * S(m, 4) * S(m, 4), -1.0}),
                                   normalized_residual({12.0 * S(m, 4) * S(m, 6), -1.0}));
                 }});
    c.push_back({"d2q13/isotropy", "D2Q13 sigma6 = sigma8 = 1/(12 sigma4)", [S](const Model& m) {
                   return std::max(normalized_residual({12.0 * S(m, 4) * S(m, 6), -1.0}),
                                   normalized_residual({12.0 * S(m, 4) * S(m, 8), -1.0}));
                 }});
    c.push_back({"d2q13/quartic", "D2Q13 isotropy with sigma4 = 1/sqrt(12)", [S](const Model& m) {
                   return std::max({normalized_residual({12.0 * S(m, 4) * S(m, 4), -1.0}),
                                    normalized_residual({12.0 * S(m, 4) * S(m, 6), -1.0}),
                                    normalized_residual({12.0 * S(m, 4) * S(m, 8), -1.0})});
                 }});
    c.push_back({"d2q13/q", "D2Q13 velocity-independent viscosity q = -7/6",
                 [](const Model& m) { return normalized_residual({6.0 * m.param("q"), 7.0}); }});
    for (const char* name : {"D3Q15-AD", "D3Q19-AD"}) {
      const std::string n = name;
      const std::string tag = n == "D3Q15-AD" ? "d3q15" : "d3q19";
      c.push_back({tag + "/case1", n + " first isotropy case", [S, n](const Model& m) {
                     auto a = d3_conditions(n, 1, m.param("alpha"), S(m, 1), S(m, 6));
                     double r = std::max(normalized_residual({m.param("d1"), -*a.d1}),
                                         normalized_residual({S(m, 5), -a.sigma5}));
                     if (a.d2) r = std::max(r, std::abs(m.param("d2")));
                     return r;
                   }});
      c.push_back({tag + "/case2", n + " second isotropy case", [S, n](const Model& m) {
                     auto a = d3_conditions(n, 2, m.param("alpha"), S(m, 1), m.param("d1"));
                     return std::max(normalized_residual({S(m, 6), -*a.sigma6}),
                                     normalized_residual({S(m, 5), -a.sigma5}));
                   }});
      c.push_back({tag + "/hyper", n + " null hyper-diffusivity", [S, n](const Model& m) {
                     auto [s11, s5] = hyperdiffusivity_null(n, m.param("alpha"), m.param("beta"), S(m, 1), S(m, 6));
                     return std::max(normalized_residual({S(m, 11), -s11}), normalized_residual({S(m, 5), -s5}));
                   }});
    }
    return c;
  }();
  return list;
}

const TuningCondition& tuning_condition(const std::string& name) {
  for (const auto& c : tuning_conditions())
    if (c.name == name) return c;
  throw ConfigError("unknown tuning condition '" + name + "'");
}

std::vector<double> bracket_roots(const std::function<double(double)>& f, double lo, double hi, int scan,
                                  int iterations) {
  std::vector<double> roots;
  double xa = lo, fa = f(lo);
  if (fa == 0.0) roots.push_back(lo);
  for (int i = 1; i <= scan; ++i) {
    const double xb = lo + (hi - lo) * i / scan;
    const double fb = f(xb);
    if (fb == 0.0) {
      roots.push_back(xb);
    } else if (fa != 0.0 && std::isfinite(fa) && std::isfinite(fb) && (fa < 0.0) != (fb < 0.0)) {
      double a = xa, b = xb, ga = fa;
      for (int it = 0; it < iterations && b - a > 0.0; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const double gm = f(m);
        if (gm == 0.0) {
          a = b = m;
          break;
        }
        if ((gm < 0.0) == (ga < 0.0)) {
          a = m;
          ga = gm;
        } else {
          b = m;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    xa = xb;
    fa = fb;
  }
  return roots;
}

namespace {

struct Setup {
  std::string model;
  ParamMap params;
  ParamMap sigmas;  // "sigmaN" -> value
};

const std::map<std::string, ParamMap>& param_defaults() {
  static const std::map<std::string, ParamMap> d = {
      {"D2Q9-AD", {{"alpha", -2.0}, {"beta", 1.0}, {"d1", 0.0}, {"a", 0.0}}},
      {"D2Q9-NS", {{"alpha", -2.0}, {"beta", 1.0}}},
      {"D2Q13-NS", {{"alpha", -2.0}, {"beta", 1.0}, {"gamma", 0.0}, {"c1", -1.0}, {"q", -7.0 / 6.0}}},
      {"D3Q15-AD", {{"alpha", -1.0}, {"beta", 1.0}, {"d1", 0.0}}},
      {"D3Q19-AD", {{"alpha", -10.0}, {"beta", 1.0}, {"d1", 0.0}, {"d2", 0.0}}},
  };
  return d;
}

Setup split(const std::string& model, const ParamMap& fixed) {
  Setup s{model, {}, {}};
  auto it = param_defaults().find(model);
  if (it == param_defaults().end()) throw DomainError("tune: no tuning objectives for model '" + model + "'");
  auto syms = rate_symbols(model);
  std::set<std::string> rate_set(syms.begin(), syms.end());
  auto req = required_params(model);
  std::set<std::string> par_set(req.begin(), req.end());
  for (const auto& [k, v] : fixed) {
    if (k == "kappa" || k == "nu" || k == "vmax") continue;
    if (k.rfind("sigma", 0) == 0 && rate_set.count("s" + k.substr(5))) {
      if (!(v > 0.0)) throw DomainError("tune: " + k + " must be positive");
      s.sigmas[k] = v;
    } else if (k[0] == 's' && rate_set.count(k)) {
      s.sigmas["sigma" + k.substr(1)] = sigma_from_s(v);
    } else if (par_set.count(k)) {
      s.params[k] = v;
    } else {
      throw ConfigError("tune: unknown fixed key '" + k + "' for model " + model);
    }
  }
  for (const auto& [k, v] : it->second) s.params.emplace(k, v);
  return s;
}

bool has(const Setup& s, const std::string& k) { return s.sigmas.count(k) > 0; }

double need(const Setup& s, const std::string& k, const std::string& why) {
  auto it = s.sigmas.find(k);
  if (it == s.sigmas.end()) throw ConfigError("tune: " + k + " must be fixed (" + why + ")");
  return it->second;
}

void put(Setup& s, const std::string& k, double v, ParamMap& set) {
  auto it = s.sigmas.find(k);
  if (it != s.sigmas.end() && std::abs(it->second - v) > 1e-12 * std::max(1.0, std::abs(v)))
    throw DomainError("tune: fixed " + k + " = " + fmt(it->second) + " conflicts with required " + fmt(v));
  if (!(v > 0.0)) throw DomainError("tune: infeasible, " + k + " = " + fmt(v) + " <= 0 (s outside (0,2))");
  s.sigmas[k] = v;
  set[k] = v;
}

Model realize(const Setup& s) {
  ParamMap rates;
  for (const auto& sym : rate_symbols(s.model)) {
    const std::string key = "sigma" + sym.substr(1);
    auto it = s.sigmas.find(key);
    rates[key] = it == s.sigmas.end() ? 0.5 : it->second;
  }
  return build_model(s.model, s.params, rates);
}

std::vector<double> angles13() {
  std::vector<double> t(13);
  for (int i = 0; i < 13; ++i) t[i] = kPi / 2.0 * i / 12.0;
  return t;
}

std::vector<Eigen::Vector3d> directions9() {
  std::vector<Eigen::Vector3d> d = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {0, 1, 1},
                                    {1, 0, 1}, {1, 1, 1}, {1, 2, 3}, {3, -1, 2}};
  for (auto& v : d) v.normalize();
  return d;
}

// h over orientations with V parallel to k.
std::vector<double> h_values(const Model& m, const std::string& label) {
  std::vector<double> h;
  if (m.d() == 3) {
    for (const auto& k : directions9()) h.push_back(measure_anomalous_advection(m, k, k, label));
  } else {
    for (double t : angles13()) {
      Eigen::Vector3d k(std::cos(t), std::sin(t), 0.0);
      h.push_back(measure_anomalous_advection(m, k, k, label));
    }
  }
  return h;
}

double spread(const std::vector<double>& v) {
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

double max_abs(const std::vector<double>& v) {
  double r = 0.0;
  for (double x : v) r = std::max(r, std::abs(x));
  return r;
}

void check_stable(const Model& m, double vmax) {
  const int n = m.d() == 3 ? 13 : 41;
  auto grid = uniform_k_grid(m.d(), n);
  std::vector<Background> bgs(1);
  if (m.d() == 2) {
    for (double t : {0.0, kPi / 4.0}) {
      Background b;
      b.V = {vmax * std::cos(t), vmax * std::sin(t), 0.0};
      bgs.push_back(b);
    }
  } else {
    Background b;
    b.V = {vmax, 0.0, 0.0};
    bgs.push_back(b);
  }
  for (const auto& bg : bgs) {
    auto r = stability_scan(m, bg, grid, 1e-12);
    if (!r.unstable.empty())
      throw DomainError("tune: solution is linearly unstable (max |z| = " + fmt(r.overall_max) + " at |V| = " +
                        fmt(std::hypot(bg.V[0], bg.V[1])) + ")");
  }
}

}  // namespace

TuneResult tune(const std::string& model, const std::string& objective, const std::string& route,
                const ParamMap& fixed) {
  static const std::set<std::string> objectives = {"isotropic-advection", "zero-anomaly", "quartic",
                                                   "null-hyperdiffusivity"};
  if (!objectives.count(objective)) throw ConfigError("tune: unknown objective '" + objective + "'");
  Setup s = split(model, fixed);
  TuneResult res;
  ParamMap& set = res.sigmas;
  const double tol = 1e-8;
  auto unsupported = [&] {
    return DomainError("tune: objective '" + objective + "' is not available for " + model);
  };
  auto need_route = [&](std::initializer_list<const char*> allowed) {
    std::string list;
    for (const char* a : allowed) {
      if (route == a) return;
      list += std::string(list.empty() ? "" : ", ") + a;
    }
    throw ConfigError("tune: objective '" + objective + "' for " + model + " needs --route one of {" + list + "}");
  };
  if (fixed.count("kappa")) {
    const double al = s.params.at("alpha"), kap = fixed.at("kappa");
    const double f = model == "D2Q9-AD" ? (al + 4.0) / 6.0 : model == "D3Q15-AD" ? (2.0 + al) / 3.0
                   : model == "D3Q19-AD" ? (al + 30.0) / 57.0 : 0.0;
    if (f == 0.0) throw ConfigError("tune: kappa applies to advection-diffusion models only");
    put(s, "sigma1", kap / f, set);
  }
  if (fixed.count("nu")) {
    const double nu = fixed.at("nu");
    if (model == "D2Q9-NS") put(s, "sigma4", 3.0 * nu, set);
    else if (model == "D2Q13-NS") put(s, "sigma4", 4.0 * nu / (s.params.at("c1") + 3.0), set);
    else throw ConfigError("tune: nu applies to D2Q9-NS and D2Q13-NS only");
  }

  std::string cond;
  std::function<double(const Model&)> verify;

  if (model == "D2Q9-AD") {
    if (objective == "quartic" || objective == "null-hyperdiffusivity") throw unsupported();
    need_route({"d1", "sigma14"});
    const bool zero = objective == "zero-anomaly";
    if (route == "d1") {
      s.params["d1"] = -1.0;
      res.params["d1"] = -1.0;
      cond = zero ? "d2q9-ad/A1" : "d2q9-ad/d1";
    } else {
      put(s, "sigma4", 1.0 / (12.0 * need(s, "sigma1", "sigma4 = 1/(12 sigma1)")), set);
      cond = zero ? "d2q9-ad/A2" : "d2q9-ad/sigma14";
    }
    if (zero) {
      // unknowns among sigma1, sigma3, sigma4 (and d1 on the A2 branch), tied to one value
      std::vector<std::string> free;
      for (const char* k : {"sigma1", "sigma3", "sigma4"})
        if (!has(s, k)) free.push_back(k);
      const bool d1_free = route == "sigma14" && !fixed.count("d1");
      if (free.empty() && !d1_free) throw DomainError("tune: no free parameter left for " + objective);
      const double al = s.params.at("alpha");
      std::function<double(double)> f;
      Setup base = s;
      auto apply = [&](Setup& t, double x) {
        if (!free.empty())
          for (const auto& k : free) t.sigmas[k] = x;
        else t.params["d1"] = x;
      };
      f = [&](double x) {
        Setup t = base;
        apply(t, x);
        const double s1 = t.sigmas.at("sigma1"), s3 = t.sigmas.at("sigma3"), s4 = t.sigmas.at("sigma4");
        return route == "d1" ? anomaly_A1(al, -1.0, s1, s3, s4) : anomaly_A2(al, t.params.at("d1"), s1, s3, s4);
      };
      const bool sigma_unknown = !free.empty();
      auto roots = sigma_unknown ? bracket_roots(f, 1e-3, 10.0) : bracket_roots(f, -10.0, 10.0);
      if (roots.empty())
        throw DomainError("tune: infeasible, no root of the anomaly in the admissible range");
      std::vector<ParamMap> sols;
      for (double x : roots) {
        ParamMap p;
        if (sigma_unknown)
          for (const auto& k : free) p[k] = x;
        else p["d1"] = x;
        sols.push_back(p);
      }
      apply(s, roots.front());
      for (const auto& [k, v] : sols.front()) (k == "d1" ? res.params : set)[k] = v;
      res.alternatives.assign(sols.begin() + 1, sols.end());
      verify = [](const Model& m) { return max_abs(h_values(m, "density")); };
    } else {
      verify = [](const Model& m) { return spread(h_values(m, "density")); };
    }
  } else if (model == "D2Q9-NS") {
    if (objective == "null-hyperdiffusivity") throw unsupported();
    if (objective == "isotropic-advection") {
      need_route({"shear", "full"});
      const double s4 = need(s, "sigma4", "set sigma4 or nu");
      put(s, "sigma6", 1.0 / (12.0 * s4), set);
      if (route == "full") put(s, "sigma3", s4, set);
      cond = route == "full" ? "d2q9-ns/full" : "d2q9-ns/shear";
      const bool full = route == "full";
      verify = [full](const Model& m) {
        double r = spread(h_values(m, "shear"));
        if (full) r = std::max(r, spread(h_values(m, "acoustic+")));
        return r;
      };
    } else {
      const double t = 1.0 / std::sqrt(12.0);
      put(s, "sigma4", t, set);
      put(s, "sigma6", 1.0 / (12.0 * t), set);
      cond = "d2q9-ns/quartic";
      verify = [](const Model& m) { return max_abs(h_values(m, "shear")); };
    }
  } else if (model == "D2Q13-NS") {
    if (objective == "null-hyperdiffusivity") throw unsupported();
    if (objective == "isotropic-advection") {
      const double s4 = need(s, "sigma4", "set sigma4 or nu");
      put(s, "sigma6", 1.0 / (12.0 * s4), set);
      put(s, "sigma8", 1.0 / (12.0 * s4), set);
      cond = "d2q13/isotropy";
      verify = [](const Model& m) { return spread(h_values(m, "shear")); };
    } else {
      const double t = 1.0 / std::sqrt(12.0);
      put(s, "sigma4", t, set);
      put(s, "sigma6", 1.0 / (12.0 * t), set);
      put(s, "sigma8", 1.0 / (12.0 * t), set);
      cond = "d2q13/quartic";
      verify = [](const Model& m) { return max_abs(h_values(m, "shear")); };
    }
  } else {
    const std::string tag = model == "D3Q15-AD" ? "d3q15" : "d3q19";
    const double al = s.params.at("alpha");
    if (objective == "quartic") throw unsupported();
    if (objective == "null-hyperdiffusivity") {
      const double s1 = need(s, "sigma1", "set sigma1 or kappa"), s6 = need(s, "sigma6", "sigma6 is an input");
      auto [s11, s5] = hyperdiffusivity_null(model, al, s.params.at("beta"), s1, s6);
      put(s, "sigma11", s11, set);
      put(s, "sigma5", s5, set);
      cond = tag + "/hyper";
      verify = [](const Model& m) {
        double r = 0.0;
        for (const auto& k : directions9()) r = std::max(r, std::abs(to_coefficients(taylor_coefficients(m, {}, k)).a4));
        return r;
      };
    } else {
      need_route({"case1", "case2", "trt1", "trt2"});
      const double s1 = need(s, "sigma1", "set sigma1 or kappa");
      D3Assignment a;
      if (route == "case1") a = d3_conditions(model, 1, al, s1, need(s, "sigma6", "sigma6 is an input of case 1"));
      else if (route == "case2") a = d3_conditions(model, 2, al, s1, s.params.at("d1"));
      else a = d3_trt(model, route == "trt1" ? 1 : 2, al, s1);
      if (!a.feasible) throw DomainError("tune: infeasible, " + a.note);
      if (a.d1) s.params["d1"] = res.params["d1"] = *a.d1;
      if (a.d2) s.params["d2"] = res.params["d2"] = *a.d2;
      put(s, "sigma6", *a.sigma6, set);
      put(s, "sigma5", a.sigma5, set);
      if (route[0] == 't') {
        // two relaxation times: odd rows take sigma1, even rows sigma6
        Model probe = realize(s);
        for (int k = 0; k < probe.q(); ++k) {
          const auto& sym = probe.rates.symbol[k];
          if (sym.empty()) continue;
          put(s, "sigma" + sym.substr(1), probe.basis.parity[k] < 0 ? s1 : *a.sigma6, set);
        }
      }
      cond = tag + (route == "case1" || route == "trt1" ? "/case1" : "/case2");
      verify = [](const Model& m) { return max_abs(h_values(m, "density")); };
    }
  }

  for (const auto& [k, v] : s.params) res.params.emplace(k, v);
  Model m = realize(s);
  for (const auto& [k, v] : henon_params(m)) set.emplace("sigma" + std::to_string(k), v);
  res.condition = cond;
  const double r = tuning_condition(cond).residual(m);
  if (r > 1e-12) throw DomainError("tune: condition " + cond + " not satisfied (residual " + fmt(r) + ")");
  check_stable(m, fixed.count("vmax") ? fixed.at("vmax") : 0.1);
  res.verified = verify(m);
  if (!(res.verified <= tol))
    throw NumericalError("tune: dispersion verification failed for " + cond + " (measured " + fmt(res.verified) + ")");
  return res;
}

}  // namespace lbmlab
