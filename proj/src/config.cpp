#include <philap/config.hpp>

#include <philap/kernels.hpp>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace philap {

namespace pt = boost::property_tree;

namespace {

const double kPi = std::acos(-1.0);

// Accepted keys per section.
const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"problem", {"kind", "T", "M", "N"}},
      {"phi", {"variant", "a", "p"}},
      {"boundary", {"variant", "a_coef", "b_coef", "sigma", "sigma_frac", "g", "g_c", "g_k0", "g_k1"}},
      {"potential", {"name", "rho", "beta", "c"}},
      {"h", {"variant", "amplitude", "component"}},
      {"data", {"x", "y"}},
      {"solver", {"mode", "tol_grad", "tol_fix", "max_outer", "damping", "seed", "margin",
                  "anderson_memory", "check_samples", "inclusion"}},
      {"refine", {"levels"}},
      {"output", {"csv", "report", "table"}},
  };
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(field + ": expected a number, got '" + text + "'");
  }
  return v;
}

template <class I>
I to_integer(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  I v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(field + ": expected an integer, got '" + text + "'");
  }
  return v;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& key) const {
    if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'))) return trim(*v);
    return std::nullopt;
  }
  std::string require(const std::string& key) const {
    auto v = raw(key);
    if (!v || v->empty()) throw ConfigError(key + ": missing required field");
    return *v;
  }
  void str(const std::string& key, std::string& out) const {
    if (auto v = raw(key)) out = *v;
  }
  void num(const std::string& key, double& out) const {
    if (auto v = raw(key)) out = to_double(*v, key);
  }
  void num(const std::string& key, std::optional<double>& out) const {
    if (auto v = raw(key)) out = to_double(*v, key);
  }
  template <class I>
  void integer(const std::string& key, I& out) const {
    if (auto v = raw(key)) out = to_integer<I>(*v, key);
  }

 private:
  const pt::ptree& tree_;
};

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ", ";
    s += format_double(v[k]);
  }
  return s;
}

Vec data_vec(const std::vector<double>& v, int N, const std::string& field) {
  if (v.empty()) return Vec::Zero(N);
  if (static_cast<int>(v.size()) != N) {
    throw ConfigError(field + ": expected " + std::to_string(N) + " values");
  }
  return Eigen::Map<const Vec>(v.data(), N);
}

PotentialField pendulum(double rho, double beta) {
  // F(u) = rho [cos(beta - |u|) - cos beta - |u| sin beta].
  PotentialField f;
  f.name = "pendulum";
  const double sb = std::sin(beta), cb = std::cos(beta);
  f.value = [=](double, const Vec& u) {
    const double r = u.norm();
    return rho * (std::cos(beta - r) - cb - r * sb);
  };
  f.gradient = [=](double, const Vec& u) -> Vec {
    const double r = u.norm();
    if (r == 0.0) return Vec::Zero(u.size());
    return rho * (std::sin(beta - r) - sb) * u / r;
  };
  f.hessian = [=](double, const Vec& u) -> Mat {
    const auto n = u.size();
    const double r = u.norm();
    if (r < 1e-8) return Mat::Identity(n, n) * (-rho * cb);
    const Vec e = u / r;
    const double d2 = -rho * std::cos(beta - r);
    const double d1r = rho * (std::sin(beta - r) - sb) / r;
    return d2 * e * e.transpose() + d1r * (Mat::Identity(n, n) - e * e.transpose());
  };
  return f;
}

PotentialField periodic_cos(double rho) {
  PotentialField f;
  f.name = "periodic_cos";
  f.value = [=](double, const Vec& u) { return rho * (u.array().cos() - 1.0).sum(); };
  f.gradient = [=](double, const Vec& u) -> Vec { return -rho * u.array().sin().matrix(); };
  f.hessian = [=](double, const Vec& u) -> Mat {
    return Mat((-rho * u.array().cos()).matrix().asDiagonal());
  };
  return f;
}

PotentialField quadratic(double c) {
  PotentialField f;
  f.name = "quadratic";
  f.value = [=](double, const Vec& u) { return 0.5 * c * u.squaredNorm(); };
  f.gradient = [=](double, const Vec& u) -> Vec { return c * u; };
  f.hessian = [=](double, const Vec& u) -> Mat { return c * Mat::Identity(u.size(), u.size()); };
  return f;
}

}  // namespace

double Manufactured::u(double t) const {
  return 0.04 * std::sin(2.0 * kPi * t / T) + 0.1 * t * t;
}
double Manufactured::du(double t) const {
  return 0.08 * kPi / T * std::cos(2.0 * kPi * t / T) + 0.2 * t;
}
double Manufactured::ddu(double t) const {
  return -0.16 * kPi * kPi / (T * T) * std::sin(2.0 * kPi * t / T) + 0.2;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<double> parse_list(const std::string& text, const std::string& field) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(item, field));
  return out;
}

ProblemConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [section, body] : tree) {
    const auto it = schema().find(section);
    if (it == schema().end()) {
      if (body.empty()) throw ConfigError(section + ": key outside any section");
      throw ConfigError("[" + section + "]: unknown section");
    }
    for (const auto& kv : body) {
      if (!it->second.count(kv.first)) throw ConfigError(section + "." + kv.first + ": unknown key");
    }
  }

  const Reader r(tree);
  ProblemConfig c;
  r.str("problem.kind", c.kind);
  c.T = to_double(r.require("problem.T"), "problem.T");
  c.M = to_integer<int>(r.require("problem.M"), "problem.M");
  r.integer("problem.N", c.N);

  c.phi_variant = r.require("phi.variant");
  c.a = to_double(r.require("phi.a"), "phi.a");
  r.num("phi.p", c.p);

  c.boundary_variant = r.require("boundary.variant");
  r.num("boundary.a_coef", c.a_coef);
  r.num("boundary.b_coef", c.b_coef);
  r.num("boundary.sigma", c.sigma);
  r.num("boundary.sigma_frac", c.sigma_frac);
  r.str("boundary.g", c.g);
  r.num("boundary.g_c", c.g_c);
  r.num("boundary.g_k0", c.g_k0);
  r.num("boundary.g_k1", c.g_k1);

  r.str("potential.name", c.potential);
  r.num("potential.rho", c.rho);
  r.num("potential.beta", c.beta);
  r.num("potential.c", c.c);

  r.str("h.variant", c.h_variant);
  r.num("h.amplitude", c.amplitude);
  r.integer("h.component", c.component);

  if (auto v = r.raw("data.x")) c.x = parse_list(*v, "data.x");
  if (auto v = r.raw("data.y")) c.y = parse_list(*v, "data.y");

  r.str("solver.mode", c.solver_mode);
  r.num("solver.tol_grad", c.tol_grad);
  r.num("solver.tol_fix", c.tol_fix);
  r.integer("solver.max_outer", c.max_outer);
  r.num("solver.damping", c.damping);
  r.integer("solver.seed", c.seed);
  r.num("solver.margin", c.margin);
  r.integer("solver.anderson_memory", c.anderson_memory);
  r.integer("solver.check_samples", c.check_samples);
  r.str("solver.inclusion", c.inclusion);

  if (auto v = r.raw("refine.levels")) {
    c.levels.clear();
    for (double m : parse_list(*v, "refine.levels")) {
      if (m != std::floor(m)) throw ConfigError("refine.levels: expected integers");
      c.levels.push_back(static_cast<int>(m));
    }
  }

  r.str("output.csv", c.csv);
  r.str("output.report", c.report);
  r.str("output.table", c.table);
  return c;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  try {
    return parse_config(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string echo_config(const ProblemConfig& c) {
  std::ostringstream os;
  auto d = format_double;
  os << "[problem]\nkind = " << c.kind << "\nT = " << d(c.T) << "\nM = " << c.M
     << "\nN = " << c.N << "\n\n";
  os << "[phi]\nvariant = " << c.phi_variant << "\na = " << d(c.a) << "\np = " << d(c.p)
     << "\n\n";
  os << "[boundary]\nvariant = " << c.boundary_variant << "\na_coef = " << d(c.a_coef)
     << "\nb_coef = " << d(c.b_coef) << "\n";
  if (c.sigma) os << "sigma = " << d(*c.sigma) << "\n";
  if (c.sigma_frac) os << "sigma_frac = " << d(*c.sigma_frac) << "\n";
  os << "g = " << c.g << "\ng_c = " << d(c.g_c) << "\ng_k0 = " << d(c.g_k0)
     << "\ng_k1 = " << d(c.g_k1) << "\n\n";
  os << "[potential]\nname = " << c.potential << "\nrho = " << d(c.rho) << "\nbeta = "
     << d(c.beta) << "\nc = " << d(c.c) << "\n\n";
  os << "[h]\nvariant = " << c.h_variant << "\namplitude = " << d(c.amplitude)
     << "\ncomponent = " << c.component << "\n\n";
  os << "[data]\nx = " << join(c.x) << "\ny = " << join(c.y) << "\n\n";
  os << "[solver]\nmode = " << c.solver_mode << "\ntol_grad = " << d(c.tol_grad)
     << "\ntol_fix = " << d(c.tol_fix) << "\nmax_outer = " << c.max_outer
     << "\ndamping = " << d(c.damping) << "\nseed = " << c.seed << "\nmargin = " << d(c.margin)
     << "\nanderson_memory = " << c.anderson_memory << "\ncheck_samples = " << c.check_samples
     << "\ninclusion = " << c.inclusion << "\n\n";
  os << "[refine]\nlevels = ";
  for (std::size_t k = 0; k < c.levels.size(); ++k) os << (k ? ", " : "") << c.levels[k];
  os << "\n\n[output]\ncsv = " << c.csv << "\nreport = " << c.report << "\ntable = " << c.table
     << "\n";
  return os.str();
}

ProblemSpec to_spec(const ProblemConfig& c) {
  if (c.kind != "full" && c.kind != "auxiliary") {
    throw ConfigError("problem.kind: expected full or auxiliary, got '" + c.kind + "'");
  }
  if (!(c.T > 0.0)) throw ConfigError("problem.T: must be positive");
  if (c.M < 2) throw ConfigError("problem.M: must be >= 2");
  if (c.N < 1) throw ConfigError("problem.N: must be >= 1");
  if (!(c.a > 0.0)) throw ConfigError("phi.a: must be positive");

  ProblemSpec s;
  s.N = c.N;
  s.grid = Grid::make(c.T, c.M);
  if (c.phi_variant == "relativistic") {
    s.phi = PhiMap::relativistic(c.a);
  } else if (c.phi_variant == "p_relativistic") {
    if (!(c.p > 1.0)) throw ConfigError("phi.p: must exceed 1");
    s.phi = PhiMap::p_relativistic(c.p, c.a);
  } else {
    throw ConfigError("phi.variant: unknown variant '" + c.phi_variant + "'");
  }

  const double ta = c.T * c.a;
  const std::string& bv = c.boundary_variant;
  if (bv == "dirichlet") {
    s.boundary.set = ConvexSetK::point();
  } else if (bv == "neumann") {
    s.boundary.set = ConvexSetK::full_space();
  } else if (bv == "periodic") {
    s.boundary.set = ConvexSetK::diagonal();
  } else if (bv == "antiperiodic") {
    s.boundary.set = ConvexSetK::anti_diagonal();
  } else if (bv == "subspace") {
    try {
      s.boundary.set = ConvexSetK::subspace(c.a_coef, c.b_coef);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("boundary.a_coef: ") + e.what());
    }
  } else if (bv == "strip") {
    if (c.sigma.has_value() == c.sigma_frac.has_value()) {
      throw ConfigError("boundary.sigma: give exactly one of sigma, sigma_frac");
    }
    const double sigma = c.sigma ? *c.sigma : *c.sigma_frac * ta;
    if (!(sigma >= 0.0)) throw ConfigError("boundary.sigma: must be nonnegative");
    s.boundary.set = ConvexSetK::strip(sigma);
  } else {
    throw ConfigError("boundary.variant: unknown variant '" + bv + "'");
  }
  if (c.g == "none") {
    s.boundary.g = SmoothPart::none();
  } else if (c.g == "quadratic") {
    if (!(c.g_c >= 0.0)) throw ConfigError("boundary.g_c: must be nonnegative");
    s.boundary.g = SmoothPart::quadratic_difference(c.g_c);
  } else if (c.g == "exp_f") {
    s.boundary.g = SmoothPart::exp_difference();
  } else if (c.g == "robin") {
    if (!(c.g_k0 >= 0.0 && c.g_k1 >= 0.0)) throw ConfigError("boundary.g_k0: must be nonnegative");
    s.boundary.g = SmoothPart::robin(c.g_k0, c.g_k1);
  } else {
    throw ConfigError("boundary.g: unknown variant '" + c.g + "'");
  }

  if (c.potential == "zero") {
    s.potential = PotentialField::zero();
  } else if (c.potential == "pendulum") {
    s.potential = pendulum(c.rho, c.beta);
    // With sin(beta) = 0 and N = 1, F = +-rho (cos u - cos beta) is 2 pi periodic.
    if (c.N == 1 && std::sin(c.beta) == 0.0) s.periods = Vec::Constant(1, 2.0 * kPi);
  } else if (c.potential == "periodic_cos") {
    s.potential = periodic_cos(c.rho);
    s.periods = Vec::Constant(c.N, 2.0 * kPi);
  } else if (c.potential == "quadratic") {
    s.potential = quadratic(c.c);
  } else {
    throw ConfigError("potential.name: unknown potential '" + c.potential + "'");
  }
  if (c.is_auxiliary() && c.potential != "zero") {
    throw ConfigError("potential.name: auxiliary problems take no potential");
  }

  if (c.h_variant != "none" && (c.component < 1 || c.component > c.N)) {
    throw ConfigError("h.component: must lie in 1..N");
  }
  const int comp = c.component - 1;
  const int N = c.N;
  const double T = c.T, A = c.amplitude;
  if (c.h_variant == "none") {
  } else if (c.h_variant == "sin" || c.h_variant == "cos") {
    const bool use_sin = c.h_variant == "sin";
    s.h = [=](double t) {
      Vec v = Vec::Zero(N);
      const double arg = 2.0 * kPi * t / T;
      v[comp] = A * (use_sin ? std::sin(arg) : std::cos(arg));
      return v;
    };
    s.h_mean_zero = true;
  } else if (c.h_variant == "manufactured") {
    if (N != 1) throw ConfigError("h.variant: manufactured requires N = 1");
    const Manufactured m{T};
    const PhiMap phi = s.phi;
    s.h = [=](double t) {
      Vec y(1);
      y[0] = m.du(t);
      Vec v(1);
      v[0] = -phi.jacobian(y)(0, 0) * m.ddu(t) + m.u(t);
      return v;
    };
  } else {
    throw ConfigError("h.variant: unknown variant '" + c.h_variant + "'");
  }

  data_vec(c.x, N, "data.x");
  data_vec(c.y, N, "data.y");
  try {
    s.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("potential.name: ") + e.what());
  }
  return s;
}

SolverOptions to_solver_options(const ProblemConfig& c) {
  SolverOptions o;
  if (c.solver_mode == "auto") {
    o.mode = SolverMode::Auto;
  } else if (c.solver_mode == "minimize") {
    o.mode = SolverMode::Minimize;
  } else if (c.solver_mode == "critical_point") {
    o.mode = SolverMode::CriticalPoint;
  } else {
    throw ConfigError("solver.mode: unknown mode '" + c.solver_mode + "'");
  }
  o.tol_grad = c.tol_grad;
  o.tol_fix = c.tol_fix;
  o.max_outer = c.max_outer;
  o.damping = c.damping;
  o.seed = c.seed;
  o.margin = c.margin;
  o.anderson_memory = c.anderson_memory;
  o.check_samples = c.check_samples;
  o.inner.margin = c.margin;
  if (c.inclusion == "energy") {
    o.inner.inclusion_method = InclusionMethod::Energy;
  } else if (c.inclusion == "splitting") {
    o.inner.inclusion_method = InclusionMethod::Splitting;
  } else {
    throw ConfigError("solver.inclusion: unknown method '" + c.inclusion + "'");
  }
  try {
    o.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("solver: ") + e.what());
  }
  return o;
}

namespace {

ProblemConfig pendulum_base(double beta) {
  ProblemConfig c;
  c.T = 1.0;
  c.M = 800;
  c.potential = "pendulum";
  c.rho = 1.0;
  c.beta = beta;
  c.h_variant = "sin";
  c.amplitude = 2.0;
  c.boundary_variant = "periodic";
  return c;
}

}  // namespace

std::vector<PresetInfo> list_presets() {
  return {
      {"pendulum_anticoercive",
       "pendulum, beta = pi/2, periodic; anti-coercive, solved by energy minimization"},
      {"pendulum_semicoercive",
       "pendulum, beta = -pi/2, periodic; semi-coercive saddle, solved by the fixed-point route"},
      {"exp_steklov",
       "anti-coercive pendulum with Neumann-Steklov coupling f(x - y) = (exp|x - y|^2 - 1)/2"},
      {"strip_sigma_half", "strip |u(0) - u(T)| <= T a / 2 plus the exp coupling"},
      {"strip_sigma_wide", "strip wider than T a; the constraint never binds"},
      {"strip_sigma_zero", "strip of width 0, equivalent to periodic conditions"},
      {"periodic_cos", "periodic potential rho sum(cos u_i - 1), omega = 2 pi, periodic"},
      {"dirichlet_zero", "F = 0 with homogeneous Dirichlet data; solution u = 0"},
      {"dirichlet_frontier", "auxiliary Dirichlet problem with |y - x| = 0.9 T a"},
      {"dirichlet_infeasible_gap", "auxiliary Dirichlet problem with |y - x| = 1.1 T a"},
      {"manufactured_neumann", "auxiliary Neumann problem with a manufactured smooth solution"},
  };
}

ProblemConfig preset(const std::string& name) {
  ProblemConfig c;
  if (name == "pendulum_anticoercive") {
    c = pendulum_base(kPi / 2);
  } else if (name == "pendulum_semicoercive") {
    c = pendulum_base(-kPi / 2);
  } else if (name == "exp_steklov") {
    c = pendulum_base(kPi / 2);
    c.boundary_variant = "neumann";
    c.g = "exp_f";
  } else if (name == "strip_sigma_half" || name == "strip_sigma_wide" ||
             name == "strip_sigma_zero") {
    c = pendulum_base(kPi / 2);
    c.boundary_variant = "strip";
    c.g = "exp_f";
    c.sigma_frac = name == "strip_sigma_half" ? 0.5 : (name == "strip_sigma_wide" ? 2.0 : 0.0);
  } else if (name == "periodic_cos") {
    c.M = 400;
    c.potential = "periodic_cos";
    c.rho = 1.0;
    c.h_variant = "cos";
    c.amplitude = 1.0;
    c.boundary_variant = "periodic";
  } else if (name == "dirichlet_zero") {
    c.M = 200;
    c.boundary_variant = "dirichlet";
  } else if (name == "dirichlet_frontier" || name == "dirichlet_infeasible_gap") {
    c.kind = "auxiliary";
    c.boundary_variant = "dirichlet";
    c.x = {0.0};
    c.y = {name == "dirichlet_frontier" ? 0.9 : 1.1};
  } else if (name == "manufactured_neumann") {
    c.kind = "auxiliary";
    c.boundary_variant = "neumann";
    c.h_variant = "manufactured";
    c.levels = {100, 200, 400};
    const Manufactured m{c.T};
    const PhiMap phi = PhiMap::relativistic(c.a);
    c.x = {phi.phi(Vec::Constant(1, m.du(0.0)))[0]};
    c.y = {phi.phi(Vec::Constant(1, m.du(c.T)))[0]};
  } else {
    throw ConfigError("preset: unknown preset '" + name + "'");
  }
  return c;
}

void write_solution_csv(std::ostream& out, const ProblemSpec& spec, const GridFunction& u,
                        const EnergyMode& mode) {
  const int n = u.dim(), m = u.grid.M;
  out << "t";
  for (int c = 1; c <= n; ++c) out << ",u_" << c;
  for (int c = 1; c <= n; ++c) out << ",phi_du_" << c;
  out << "\n";
  const NodeMat flux = kernels::midpoint_flux(spec.phi, derivative(u));
  const EndpointPair ends = endpoint_fluxes(spec, u, mode);
  for (int i = 0; i <= m; ++i) {
    Vec p;
    if (i == 0) {
      p = ends.x;
    } else if (i == m) {
      p = ends.y;
    } else {
      p = 0.5 * (flux.row(i - 1) + flux.row(i)).transpose();
    }
    out << format_double(u.grid.node(i));
    for (int c = 0; c < n; ++c) out << "," << format_double(u.values(i, c));
    for (int c = 0; c < n; ++c) out << "," << format_double(p[c]);
    out << "\n";
  }
}

GridFunction read_solution_csv(std::istream& in, const ProblemSpec& spec) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("solution: empty file");
  const int n = spec.N;
  GridFunction u = GridFunction::zeros(spec.grid, n);
  int row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const std::vector<double> v = parse_list(line, "solution row " + std::to_string(row + 1));
    if (static_cast<int>(v.size()) != 1 + 2 * n) {
      throw ConfigError("solution row " + std::to_string(row + 1) + ": expected " +
                        std::to_string(1 + 2 * n) + " columns");
    }
    if (row > spec.grid.M) throw ConfigError("solution: more rows than grid nodes");
    for (int c = 0; c < n; ++c) u.values(row, c) = v[1 + c];
    ++row;
  }
  if (row != spec.grid.M + 1) {
    throw ConfigError("solution: expected " + std::to_string(spec.grid.M + 1) + " rows, got " +
                      std::to_string(row));
  }
  return u;
}

void write_report(std::ostream& out, const SolveReport& r, const std::optional<RunInfo>& run) {
  auto d = format_double;
  out << "[report]\nmode = " << r.mode << "\node_residual = " << d(r.ode_residual)
      << "\nboundary_residual = " << d(r.boundary_residual)
      << "\nboundary_distance = " << d(r.boundary_distance)
      << "\nboundary_tolerance = " << d(r.boundary_tolerance)
      << "\nboundary_ok = " << (r.boundary_ok ? "true" : "false")
      << "\nstrip_gap = " << d(r.strip_gap) << "\nstrip_ok = " << (r.strip_ok ? "true" : "false")
      << "\nfeasibility_margin = " << d(r.feasibility_margin) << "\n";
  if (r.flux_pair.x.size() > 0) {
    std::vector<double> fx(r.flux_pair.x.data(), r.flux_pair.x.data() + r.flux_pair.x.size());
    std::vector<double> fy(r.flux_pair.y.data(), r.flux_pair.y.data() + r.flux_pair.y.size());
    out << "flux_pair_x = " << join(fx) << "\nflux_pair_y = " << join(fy) << "\n";
  }
  out << "\n[energy]\npsi = " << d(r.energy.psi) << "\nj = " << d(r.energy.j_term)
      << "\nf = " << d(r.energy.f_term) << "\n";
  if (r.energy.quad_term) out << "quad = " << d(*r.energy.quad_term) << "\n";
  out << "total = " << d(r.energy.total) << "\n";
  if (run) {
    out << "\n[solver]\nmethod = " << run->solver << "\niterations = " << run->iterations
        << "\nresidual = " << d(run->residual) << "\ncritical_gap = " << d(run->critical_gap)
        << "\n";
  }
  if (r.strip_branches) {
    const StripBranches& b = *r.strip_branches;
    out << "\n[strip_branches]\nsteklov = " << (b.steklov ? "true" : "false")
        << "\ncontact = " << (b.contact ? "true" : "false") << "\ns = " << d(b.s)
        << "\nmismatch = " << d(b.mismatch) << "\nholding = " << b.holding() << "\n";
  }
  for (const NamedCheck& c : r.apriori_checks) {
    out << "\n[apriori." << c.name << "]\nstatus = " << to_string(c.status);
    if (c.status != NamedCheck::Status::Skipped) {
      out << "\nvalue = " << d(c.value) << "\nbound = " << d(c.bound);
    } else {
      out << "\nnote = " << c.note;
    }
    out << "\n";
  }
  if (r.regime) {
    out << "\n";
    write_regime(out, *r.regime);
  }
}

void write_regime(std::ostream& out, const RegimeReport& g) {
  out << "[regime]\nflags = ";
  for (std::size_t k = 0; k < g.flags.size(); ++k) out << (k ? ", " : "") << to_string(g.flags[k]);
  out << "\nlambda1 = " << (g.lambda1 ? format_double(*g.lambda1) : "unsupported")
      << "\nquadrature_noise = " << format_double(g.quadrature_noise)
      << "\nthreshold = " << format_double(g.threshold)
      << "\nphi_gap = " << format_double(g.phi_gap) << "\n";
  for (std::size_t k = 0; k < g.evidence.size(); ++k) {
    const RadialEvidence& e = g.evidence[k];
    out << "\n[regime.ray" << k << "]\ndirection = " << join(e.direction)
        << "\nradii = " << join(e.radii) << "\nintegral_F = " << join(e.integral_F)
        << "\nmax_F = " << join(e.max_F) << "\nmin_F = " << join(e.min_F) << "\n";
  }
}

void write_refine_table(std::ostream& out, const std::vector<RefineRow>& rows) {
  out << "M,ode_residual,boundary_residual,error,ratio\n";
  for (const RefineRow& r : rows) {
    out << r.M << "," << format_double(r.ode_residual) << "," << format_double(r.boundary_residual)
        << "," << format_double(r.error) << "," << (r.ratio ? format_double(*r.ratio) : "") << "\n";
  }
}

}  // namespace philap
