#include "lbmlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace lbmlab {

Rational Rational::parse(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(std::stoll(s));
    return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  } catch (const std::exception&) {
    throw ConfigError("malformed rational '" + s + "'");
  }
}

namespace {

using Poly = std::function<Rational(Rational, Rational, Rational)>;

struct Catalog {
  ModelKind kind;
  std::string velocities;
  std::vector<Poly> rows;
  std::vector<std::string> labels;
  std::vector<std::string> rates;  // "" on conserved rows
  std::vector<std::string> params;
  int n_conserved;
};

Rational R(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }
Rational r2(Rational x, Rational y, Rational z) { return x * x + y * y + z * z; }

std::vector<Poly> d2q5_rows() {
  return {
      [](Rational, Rational, Rational) { return R(1); },
      [](Rational x, Rational, Rational) { return x; },
      [](Rational, Rational y, Rational) { return y; },
      [](Rational x, Rational y, Rational z) { return R(-4) + R(5) * r2(x, y, z); },
      [](Rational x, Rational y, Rational) { return x * x - y * y; },
  };
}

std::vector<Poly> d2q9_rows() {
  return {
      [](Rational, Rational, Rational) { return R(1); },
      [](Rational x, Rational, Rational) { return x; },
      [](Rational, Rational y, Rational) { return y; },
      [](Rational x, Rational y, Rational z) { return R(-4) + R(3) * r2(x, y, z); },
      [](Rational x, Rational y, Rational) { return x * x - y * y; },
      [](Rational x, Rational y, Rational) { return x * y; },
      [](Rational x, Rational y, Rational z) { return -(R(5) - R(3) * r2(x, y, z)) * x; },
      [](Rational x, Rational y, Rational z) { return -(R(5) - R(3) * r2(x, y, z)) * y; },
      [](Rational x, Rational y, Rational z) {
        Rational r = r2(x, y, z);
        return R(4) - R(3, 2) * (R(7) - R(3) * r) * r;
      },
  };
}

std::vector<Poly> d2q13_rows() {
  auto third = [](Rational r) { return R(1, 12) * (R(202) - R(189) * r + R(35) * r * r); };
  return {
      [](Rational, Rational, Rational) { return R(1); },
      [](Rational x, Rational, Rational) { return x; },
      [](Rational, Rational y, Rational) { return y; },
      [](Rational x, Rational y, Rational z) { return R(-28) + R(13) * r2(x, y, z); },
      [](Rational x, Rational y, Rational) { return x * x - y * y; },
      [](Rational x, Rational y, Rational) { return x * y; },
      [](Rational x, Rational y, Rational z) { return -(R(3) - r2(x, y, z)) * x; },
      [](Rational x, Rational y, Rational z) { return -(R(3) - r2(x, y, z)) * y; },
      [third](Rational x, Rational y, Rational z) { return third(r2(x, y, z)) * x; },
      [third](Rational x, Rational y, Rational z) { return third(r2(x, y, z)) * y; },
      [](Rational x, Rational y, Rational z) {
        Rational r = r2(x, y, z);
        return -R(1, 2) * (R(280) - R(361) * r + R(77) * r * r);
      },
      [](Rational x, Rational y, Rational z) {
        return -R(1, 12) * (R(65) - R(17) * r2(x, y, z)) * (x * x - y * y);
      },
      [](Rational x, Rational y, Rational z) {
        Rational r = r2(x, y, z);
        return -R(1, 24) * (R(288) - R(1162) * r + R(819) * r * r - R(137) * r * r * r);
      },
  };
}

std::vector<Poly> d3_common_rows(Rational e0, Rational e1) {
  return {
      [](Rational, Rational, Rational) { return R(1); },
      [](Rational x, Rational, Rational) { return x; },
      [](Rational, Rational y, Rational) { return y; },
      [](Rational, Rational, Rational z) { return z; },
      [=](Rational x, Rational y, Rational z) { return e0 + e1 * r2(x, y, z); },
      [](Rational x, Rational y, Rational z) { return R(2) * x * x - y * y - z * z; },
      [](Rational, Rational y, Rational z) { return y * y - z * z; },
      [](Rational x, Rational y, Rational) { return x * y; },
      [](Rational, Rational y, Rational z) { return y * z; },
      [](Rational x, Rational, Rational z) { return z * x; },
  };
}

std::vector<Poly> d3q15_rows() {
  auto rows = d3_common_rows(R(-2), R(1));
  auto f = [](Rational r) { return R(-13, 2) + R(5, 2) * r; };
  rows.push_back([f](Rational x, Rational y, Rational z) { return x * f(r2(x, y, z)); });
  rows.push_back([f](Rational x, Rational y, Rational z) { return y * f(r2(x, y, z)); });
  rows.push_back([f](Rational x, Rational y, Rational z) { return z * f(r2(x, y, z)); });
  rows.push_back([](Rational x, Rational y, Rational z) {
    Rational r = r2(x, y, z);
    return R(16) - R(55, 2) * r + R(15, 2) * r * r;
  });
  rows.push_back([](Rational x, Rational y, Rational z) { return x * y * z; });
  return rows;
}

std::vector<Poly> d3q19_rows() {
  auto rows = d3_common_rows(R(-30), R(19));
  auto f = [](Rational r) { return R(-9) + R(5) * r; };
  rows.push_back([f](Rational x, Rational y, Rational z) { return x * f(r2(x, y, z)); });
  rows.push_back([f](Rational x, Rational y, Rational z) { return y * f(r2(x, y, z)); });
  rows.push_back([f](Rational x, Rational y, Rational z) { return z * f(r2(x, y, z)); });
  rows.push_back([](Rational x, Rational y, Rational z) {
    return (R(2) * x * x - y * y - z * z) * (R(-5) + R(3) * r2(x, y, z));
  });
  rows.push_back([](Rational x, Rational y, Rational z) { return (y * y - z * z) * (R(-5) + R(3) * r2(x, y, z)); });
  rows.push_back([](Rational x, Rational y, Rational z) {
    Rational r = r2(x, y, z);
    return R(12) - R(53, 2) * r + R(21, 2) * r * r;
  });
  rows.push_back([](Rational x, Rational y, Rational z) { return x * (y * y - z * z); });
  rows.push_back([](Rational x, Rational y, Rational z) { return y * (z * z - x * x); });
  rows.push_back([](Rational x, Rational y, Rational z) { return z * (x * x - y * y); });
  return rows;
}

const Catalog& catalog(std::string_view name) {
  static const std::map<std::string, Catalog, std::less<>> table = [] {
    std::map<std::string, Catalog, std::less<>> t;
    t["D2Q5"] = {ModelKind::D2Q5, "D2Q5", d2q5_rows(),
                 {"rho", "jx", "jy", "E", "XX"},
                 {"", "s1", "s1", "s3", "s4"},
                 {"alpha"}, 1};
    t["D2Q9-AD"] = {ModelKind::D2Q9_AD, "D2Q9", d2q9_rows(),
                    {"rho", "jx", "jy", "E", "XX", "XY", "qx", "qy", "eps"},
                    {"", "s1", "s1", "s3", "s4", "s4", "s6", "s6", "s8"},
                    {"alpha", "beta", "d1", "a"}, 1};
    t["D2Q9-NS"] = {ModelKind::D2Q9_NS, "D2Q9", d2q9_rows(),
                    {"rho", "jx", "jy", "E", "XX", "XY", "qx", "qy", "eps"},
                    {"", "", "", "s3", "s4", "s4", "s6", "s6", "s8"},
                    {"alpha", "beta"}, 3};
    t["D2Q13-NS"] = {ModelKind::D2Q13_NS, "D2Q13", d2q13_rows(),
                     {"rho", "jx", "jy", "E", "XX", "XY", "qx", "qy", "Rx", "Ry", "E2", "XYZ", "E3"},
                     {"", "", "", "s3", "s4", "s4", "s6", "s6", "s8", "s8", "s10", "s12", "s11"},
                     {"alpha", "beta", "gamma", "c1", "q"}, 3};
    t["D3Q15-AD"] = {ModelKind::D3Q15_AD, "D3Q15", d3q15_rows(),
                     {"rho", "jx", "jy", "jz", "e", "pxx", "pww", "pxy", "pyz", "pzx", "qx", "qy", "qz", "eps", "mxyz"},
                     {"", "s1", "s1", "s1", "s5", "s6", "s6", "s6", "s6", "s6", "s11", "s11", "s11", "s14", "s15"},
                     {"alpha", "beta", "d1"}, 1};
    t["D3Q19-AD"] = {ModelKind::D3Q19_AD, "D3Q19", d3q19_rows(),
                     {"rho", "jx", "jy", "jz", "e", "pxx", "pww", "pxy", "pyz", "pzx", "qx", "qy", "qz", "pixx",
                      "piww", "eps", "mx", "my", "mz"},
                     {"", "s1", "s1", "s1", "s5", "s6", "s6", "s6", "s6", "s6", "s11", "s11", "s11", "s14", "s14",
                      "s16", "s17", "s17", "s17"},
                     {"alpha", "beta", "d1", "d2"}, 1};
    return t;
  }();
  auto it = table.find(name);
  if (it == table.end()) throw ConfigError("unknown model name '" + std::string(name) + "'");
  return it->second;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names = {"D2Q5", "D2Q9-AD", "D2Q9-NS", "D2Q13-NS", "D3Q15-AD", "D3Q19-AD"};
  return names;
}

VelocitySet velocity_set(std::string_view name) {
  VelocitySet vs;
  vs.name = std::string(name);
  if (name == "D2Q5" || name == "D2Q9" || name == "D2Q13") {
    static const std::vector<std::array<int, 3>> table1 = {
        {0, 0, 0},  {1, 0, 0},  {0, 1, 0},   {-1, 0, 0}, {0, -1, 0}, {1, 1, 0}, {-1, 1, 0},
        {-1, -1, 0}, {1, -1, 0}, {2, 0, 0},  {0, 2, 0},  {-2, 0, 0}, {0, -2, 0}};
    int q = name == "D2Q5" ? 5 : name == "D2Q9" ? 9 : 13;
    vs.dimension = 2;
    vs.velocities.assign(table1.begin(), table1.begin() + q);
  } else if (name == "D3Q15") {
    vs.dimension = 3;
    vs.velocities = {{0, 0, 0},  {1, 0, 0},   {-1, 0, 0}, {0, 1, 0},  {0, -1, 0},
                     {0, 0, 1},  {0, 0, -1},  {1, 1, 1},  {-1, 1, 1}, {1, -1, 1},
                     {-1, -1, 1}, {1, 1, -1}, {-1, 1, -1}, {1, -1, -1}, {-1, -1, -1}};
  } else if (name == "D3Q19") {
    vs.dimension = 3;
    vs.velocities = {{0, 0, 0},  {1, 0, 0},  {-1, 0, 0}, {0, 1, 0},   {0, -1, 0}, {0, 0, 1},  {0, 0, -1},
                     {1, 1, 0},  {-1, 1, 0}, {1, -1, 0}, {-1, -1, 0}, {0, 1, 1},  {0, -1, 1}, {0, 1, -1},
                     {0, -1, -1}, {1, 0, 1}, {1, 0, -1}, {-1, 0, 1},  {-1, 0, -1}};
  } else {
    throw ConfigError("unknown velocity set '" + std::string(name) + "'");
  }
  const int q = vs.size();
  vs.opposite.assign(q, -1);
  for (int p = 0; p < q; ++p)
    for (int r = 0; r < q; ++r) {
      const auto& a = vs.velocities[p];
      const auto& b = vs.velocities[r];
      if (a[0] == -b[0] && a[1] == -b[1] && a[2] == -b[2]) vs.opposite[p] = r;
    }
  return vs;
}

std::vector<std::string> rate_symbols(std::string_view name) {
  std::set<std::string> seen;
  std::vector<std::string> out;
  for (const auto& s : catalog(name).rates)
    if (!s.empty() && seen.insert(s).second) out.push_back(s);
  return out;
}

std::vector<std::string> required_params(std::string_view name) { return catalog(name).params; }

double Model::param(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end()) throw ConfigError("model " + name + " has no parameter '" + key + "'");
  return it->second;
}

std::array<double, 3> Model::advection_velocity() const {
  if (!advection_diffusion()) return {0.0, 0.0, 0.0};
  return {param("vx"), param("vy"), param("vz")};
}

Model build_model(std::string_view name, const ParamMap& params, const ParamMap& rates) {
  const Catalog& cat = catalog(name);
  Model m;
  m.kind = cat.kind;
  m.name = std::string(name);
  m.velocity_set = velocity_set(cat.velocities);
  m.n_conserved = cat.n_conserved;
  const int q = m.q();

  // parameters
  std::set<std::string> allowed(cat.params.begin(), cat.params.end());
  if (m.advection_diffusion()) allowed.insert({"vx", "vy", "vz"});
  for (const auto& [k, v] : params) {
    if (!allowed.count(k)) throw ConfigError("model " + m.name + " has no parameter '" + k + "'");
    if (!std::isfinite(v)) throw ConfigError("parameter '" + k + "' is not finite");
  }
  m.params = params;
  if (m.kind == ModelKind::D2Q9_NS) {
    m.params.emplace("alpha", -2.0);
    m.params.emplace("beta", 1.0);
  }
  if (m.advection_diffusion()) {
    m.params.emplace("vx", 0.0);
    m.params.emplace("vy", 0.0);
    m.params.emplace("vz", 0.0);
    if (m.d() == 2 && m.params.at("vz") != 0.0) throw ConfigError("vz must be 0 for a 2D model");
  }
  for (const auto& k : cat.params)
    if (!m.params.count(k)) throw ConfigError("missing parameter '" + k + "' for model " + m.name);

  auto get = [&](const char* k) { return m.params.count(k) ? m.params.at(k) : 0.0; };
  m.equilibrium = {m.n_conserved, get("alpha"), get("beta"), get("gamma"), get("c1"),
                   get("q"),      get("d1"),    get("d2"),   get("a")};

  // rates
  ParamMap s_of;
  auto symbols = rate_symbols(name);
  std::set<std::string> sym_set(symbols.begin(), symbols.end());
  for (const auto& [k, v] : rates) {
    std::string sym = k;
    double s = v;
    if (k.rfind("sigma", 0) == 0) {
      sym = "s" + k.substr(5);
      if (!(v > 0.0)) throw ConfigError("Henon parameter '" + k + "' must be positive");
      s = 1.0 / (v + 0.5);
    }
    if (!sym_set.count(sym)) throw ConfigError("model " + m.name + " has no rate '" + k + "'");
    if (s_of.count(sym)) throw ConfigError("rate '" + sym + "' given twice");
    if (!(s >= 0.0 && s <= 2.0)) throw ConfigError("rate out of range: " + sym + " = " + format_double(s) + " not in [0,2]");
    s_of[sym] = s;
  }
  for (const auto& sym : symbols)
    if (!s_of.count(sym)) throw ConfigError("missing rate '" + sym + "' for model " + m.name);

  m.rates.s = Eigen::VectorXd::Zero(q);
  m.rates.symbol = cat.rates;
  for (int k = 0; k < q; ++k)
    if (!cat.rates[k].empty()) m.rates.s[k] = s_of.at(cat.rates[k]);

  // basis
  auto& B = m.basis;
  B.labels = cat.labels;
  B.exact.assign(q, std::vector<Rational>(q));
  B.matrix.resize(q, q);
  for (int k = 0; k < q; ++k)
    for (int p = 0; p < q; ++p) {
      const auto& c = m.velocity_set.velocities[p];
      B.exact[k][p] = cat.rows[k](R(c[0]), R(c[1]), R(c[2]));
      B.matrix(k, p) = B.exact[k][p].to_double();
    }
  B.inverse = B.matrix.inverse();
  B.parity.assign(q, 1);
  for (int k = 0; k < q; ++k)
    for (int p = 0; p < q; ++p)
      if (!B.exact[k][p].is_zero()) {
        B.parity[k] = B.exact[k][m.velocity_set.opposite[p]] == B.exact[k][p] ? 1 : -1;
        break;
      }
  return m;
}

Eigen::VectorXd moments_from_f(const Model& model, const Eigen::VectorXd& f) {
  if (!f.allFinite()) throw DomainError("moments_from_f: non-finite input");
  return model.basis.matrix * f;
}

Eigen::VectorXd f_from_moments(const Model& model, const Eigen::VectorXd& m) {
  if (!m.allFinite()) throw DomainError("f_from_moments: non-finite input");
  return model.basis.inverse * m;
}

Eigen::VectorXd equilibrium_moments(const Model& model, const Eigen::VectorXd& conserved) {
  if (conserved.size() != model.n_conserved) throw DomainError("equilibrium_moments: wrong conserved vector size");
  Eigen::VectorXd out(model.q());
  equilibrium_moments<double>(model, conserved.data(), model.advection_velocity(), out.data());
  return out;
}

void write_model_file(std::ostream& os, const Model& model) {
  const int q = model.q();
  os << model.name << ' ' << q << ' ' << model.d() << ' ' << model.n_conserved << '\n';
  for (int k = 0; k < q; ++k) {
    for (int p = 0; p < q; ++p) os << (p ? " " : "") << model.basis.exact[k][p];
    os << '\n';
  }
  for (int k = 0; k < q; ++k) os << (k ? " " : "") << (model.basis.parity[k] > 0 ? '+' : '-');
  os << '\n';
  std::set<std::string> done;
  for (int k = 0; k < q; ++k) {
    const auto& sym = model.rates.symbol[k];
    if (sym.empty() || !done.insert(sym).second) continue;
    os << sym << '=' << format_double(model.rates.s[k]) << '\n';
  }
  for (const auto& [key, v] : model.params) os << key << '=' << format_double(v) << '\n';
}

Model read_model_file(std::istream& is) {
  std::string name;
  int q = 0, d = 0, nc = 0;
  if (!(is >> name >> q >> d >> nc)) throw ConfigError("model file: malformed header");
  std::vector<std::vector<Rational>> exact(q, std::vector<Rational>(q));
  for (auto& row : exact)
    for (auto& v : row) {
      std::string tok;
      if (!(is >> tok)) throw ConfigError("model file: truncated matrix");
      v = Rational::parse(tok);
    }
  std::vector<int> parity(q);
  for (auto& s : parity) {
    std::string tok;
    if (!(is >> tok) || (tok != "+" && tok != "-")) throw ConfigError("model file: malformed parity line");
    s = tok == "+" ? 1 : -1;
  }
  ParamMap params, rates;
  std::set<std::string> rate_set;
  for (const auto& s : rate_symbols(name)) rate_set.insert(s);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("model file: expected key=value, got '" + line + "'");
    std::string key = line.substr(0, eq);
    double v = 0;
    try {
      v = std::stod(line.substr(eq + 1));
    } catch (const std::exception&) {
      throw ConfigError("model file: bad value for '" + key + "'");
    }
    (rate_set.count(key) ? rates : params)[key] = v;
  }
  Model m = build_model(name, params, rates);
  if (m.q() != q || m.d() != d || m.n_conserved != nc) throw ConfigError("model file: header disagrees with " + name);
  if (m.basis.exact != exact) throw ConfigError("model file: matrix disagrees with " + name);
  if (m.basis.parity != parity) throw ConfigError("model file: parity disagrees with " + name);
  return m;
}

}  // namespace lbmlab
