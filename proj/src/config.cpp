#include "psurf/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "psurf/errors.hpp"
#include "psurf/spline.hpp"

namespace psurf {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

struct Entry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;

  std::string name() const { return section + "." + key; }
  [[noreturn]] void fail(const std::string& why) const { throw ConfigError(name() + ": " + why, line); }
};

double to_double(const Entry& e, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    e.fail("expected a number, got '" + text + "'");
  }
  if (trim(text.substr(used)) != "" || !std::isfinite(v)) e.fail("expected a number, got '" + text + "'");
  return v;
}

long long to_integer(const Entry& e) {
  const double v = to_double(e, e.value);
  if (v != std::floor(v) || std::abs(v) > 1e15) e.fail("expected an integer, got '" + e.value + "'");
  return static_cast<long long>(v);
}

bool to_bool(const Entry& e) {
  const std::string v = lower(e.value);
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  e.fail("expected true or false, got '" + e.value + "'");
}

// "[a, b, c]" or "a, b, c"; empty brackets give an empty list.
std::vector<std::string> to_list(const Entry& e) {
  std::string v = trim(e.value);
  if (!v.empty() && v.front() == '[') {
    if (v.back() != ']') e.fail("unterminated list");
    v = v.substr(1, v.size() - 2);
  }
  std::vector<std::string> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) e.fail("empty list item");
    out.push_back(item);
  }
  return out;
}

Interval to_interval(const Entry& e) {
  const auto items = to_list(e);
  if (items.size() != 2) e.fail("expected [lo, hi]");
  const Interval r{to_double(e, items[0]), to_double(e, items[1])};
  if (!(r.lo < r.hi)) e.fail("interval must have lo < hi");
  return r;
}

void check_function(const Entry& e, const std::filesystem::path& base) {
  try {
    resolve_function(e.value, base);
  } catch (const ConfigError& err) {
    e.fail(err.what());
  } catch (const Error& err) {
    e.fail(err.what());
  }
}

double* tolerance_slot(Tolerances& t, const std::string& key) {
  static const std::vector<std::pair<std::string, double Tolerances::*>> slots = {
      {"twist", &Tolerances::twist},
      {"unitarity", &Tolerances::unitarity},
      {"birkhoff_residual", &Tolerances::birkhoff_residual},
      {"birkhoff_tail", &Tolerances::birkhoff_tail},
      {"two_splitting", &Tolerances::two_splitting},
      {"drift", &Tolerances::drift},
      {"curvature", &Tolerances::curvature},
      {"speed", &Tolerances::speed},
      {"sine_gordon", &Tolerances::sine_gordon},
      {"oracle_phi", &Tolerances::oracle_phi},
      {"oracle_frames", &Tolerances::oracle_frames},
      {"equivariance", &Tolerances::equivariance},
      {"monodromy_spread", &Tolerances::monodromy_spread},
      {"surface_residual", &Tolerances::surface_residual},
  };
  for (const auto& [name, member] : slots)
    if (name == key) return &(t.*member);
  return nullptr;
}

const std::set<std::string> kSuites = {"potential", "birkhoff", "geometry", "oracle", "symmetry"};

void apply(RunConfig& c, const Entry& e) {
  const std::string& s = e.section;
  const std::string& k = e.key;
  if (s == "potential") {
    if (k != "kind") e.fail("unknown key");
    const std::string v = lower(e.value);
    if (v == "normalized") c.kind = ConfigKind::Normalized;
    else if (v == "generalized") c.kind = ConfigKind::Generalized;
    else if (v == "amsler3") c.kind = ConfigKind::Amsler3;
    else e.fail("kind must be normalized, generalized or amsler3");
  } else if (s == "x" || s == "y") {
    AxisConfig& a = (s == "x") ? c.x : c.y;
    if (k == "function") {
      check_function(e, c.base_dir);
      a.function = e.value;
    } else if (k == "speed") {
      check_function(e, c.base_dir);
      a.speed = e.value;
    } else if (k == "domain") {
      a.domain = to_interval(e);
      a.has_domain = true;
    } else {
      e.fail("unknown key");
    }
  } else if (s == "gauge") {
    if (k != "x" && k != "y") e.fail("unknown key");
    check_function(e, c.base_dir);
    (k == "x" ? c.gauge_x : c.gauge_y) = e.value;
  } else if (s == "grid") {
    if (k == "nx" || k == "ny") {
      const long long n = to_integer(e);
      if (n < 2) e.fail("needs at least 2 nodes");
      (k == "nx" ? c.nx : c.ny) = static_cast<std::size_t>(n);
    } else if (k == "x") {
      c.grid_x = to_interval(e);
      c.has_grid_x = true;
    } else if (k == "y") {
      c.grid_y = to_interval(e);
      c.has_grid_y = true;
    } else {
      e.fail("unknown key");
    }
  } else if (s == "run") {
    if (k == "lambdas") {
      c.lambdas.clear();
      for (const auto& item : to_list(e)) {
        const double l = to_double(e, item);
        if (!(l > 0.0)) e.fail("lambda values must be positive");
        c.lambdas.push_back(l);
      }
      if (c.lambdas.empty()) e.fail("at least one lambda is required");
    } else if (k == "verify") {
      c.verify.clear();
      for (const auto& item : to_list(e)) {
        if (!kSuites.count(item)) e.fail("unknown suite '" + item + "'");
        c.verify.push_back(item);
      }
    } else if (k == "threads") {
      const long long n = to_integer(e);
      if (n < 1) e.fail("threads must be >= 1");
      c.threads = static_cast<unsigned>(n);
    } else if (k == "seed") {
      const long long n = to_integer(e);
      if (n < 0) e.fail("seed must be >= 0");
      c.seed = static_cast<unsigned long long>(n);
    } else {
      e.fail("unknown key");
    }
  } else if (s == "birkhoff") {
    const long long n = to_integer(e);
    if (k == "trunc") {
      if (n < 2) e.fail("trunc must be >= 2");
      c.trunc = static_cast<int>(n);
    } else if (k == "max_trunc") {
      if (n < 2) e.fail("max_trunc must be >= 2");
      c.max_trunc = static_cast<int>(n);
    } else {
      e.fail("unknown key");
    }
  } else if (s == "integration") {
    if (k != "steps") e.fail("unknown key");
    const long long n = to_integer(e);
    if (n < 1) e.fail("steps must be >= 1");
    c.steps = static_cast<int>(n);
  } else if (s == "tolerances") {
    double* slot = tolerance_slot(c.tol, k);
    if (!slot) e.fail("unknown tolerance");
    const double v = to_double(e, e.value);
    if (!(v > 0.0)) e.fail("tolerances must be positive");
    *slot = v;
  } else if (s == "outputs") {
    if (k == "obj") c.write_obj = to_bool(e);
    else if (k == "csv") c.write_csv = to_bool(e);
    else if (k == "drop_degenerate_faces") c.drop_degenerate_faces = to_bool(e);
    else if (k == "prefix") {
      if (e.value.empty() || e.value.find_first_of("/\\") != std::string::npos) e.fail("prefix must be a plain file stem");
      c.prefix = e.value;
    } else e.fail("unknown key");
  } else if (s == "symmetry") {
    if (k != "gamma") e.fail("unknown key");
    const std::string v = lower(e.value);
    if (v != "none" && v != "amsler3") e.fail("gamma must be none or amsler3");
    c.gamma = v;
  } else {
    throw ConfigError("unknown section [" + s + "]", e.line);
  }
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> read_table(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read table " + path.string());
  std::string line;
  if (!std::getline(is, line) || lower(trim(line)).rfind("t,value", 0) != 0)
    throw ConfigError(path.string() + ": header row 't,value' required");
  std::vector<double> t, v;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("missing comma");
      std::size_t u1 = 0, u2 = 0;
      const std::string a = trim(line.substr(0, comma)), b = trim(line.substr(comma + 1));
      const double ta = std::stod(a, &u1), vb = std::stod(b, &u2);
      if (u1 != a.size() || u2 != b.size()) throw std::invalid_argument("trailing text");
      if (!t.empty() && !(ta > t.back())) throw std::invalid_argument("t must increase");
      t.push_back(ta);
      v.push_back(vb);
    } catch (const std::exception& ex) {
      throw ConfigError(path.string() + ": bad row (" + ex.what() + ")", lineno);
    }
  }
  if (t.size() < 4) throw ConfigError(path.string() + ": at least 4 rows required");
  return {t, v};
}

RealFunction resolve_function(const std::string& spec, const std::filesystem::path& base_dir) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ConfigError("function '" + spec + "' must be builtin:<name> or table:<path>");
  const std::string kind = trim(spec.substr(0, colon));
  const std::string arg = trim(spec.substr(colon + 1));
  if (kind == "builtin") {
    try {
      return builtin_function(arg);
    } catch (const DomainError&) {
      throw ConfigError("unknown builtin function '" + arg + "'");
    }
  }
  if (kind == "table") {
    std::filesystem::path p(arg);
    if (p.is_relative()) p = base_dir / p;
    auto [t, v] = read_table(p);
    const auto spline = std::make_shared<CubicSpline>(CubicSpline::from_real(t, v));
    const double lo = t.front(), hi = t.back();
    return [spline, lo, hi](double x) {
      if (x < lo - 1e-12 || x > hi + 1e-12) throw DomainError("table function evaluated outside its range");
      return spline->real_at(std::clamp(x, lo, hi));
    };
  }
  throw ConfigError("function '" + spec + "' must be builtin:<name> or table:<path>");
}

RunConfig parse_config(std::istream& is, const std::filesystem::path& base_dir) {
  RunConfig c;
  c.base_dir = base_dir;
  std::set<std::string> seen;
  std::string section;
  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    std::string line = raw;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header", lineno);
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) throw ConfigError("empty section name", lineno);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", lineno);
    Entry e{section, lower(trim(line.substr(0, eq))), trim(line.substr(eq + 1)), lineno};
    if (section.empty()) throw ConfigError(e.key + ": key outside any section", lineno);
    if (e.key.empty()) throw ConfigError("missing key", lineno);
    if (e.value.empty()) e.fail("missing value");
    if (!seen.insert(e.name()).second) e.fail("duplicate key");
    apply(c, e);
  }

  // Kind-dependent defaults for keys the file left unset.
  if (c.kind == ConfigKind::Amsler3) {
    if (!seen.count("birkhoff.trunc")) c.trunc = 32;
    if (!seen.count("integration.steps")) c.steps = 4096;
    if (!seen.count("tolerances.birkhoff_residual")) c.tol.birkhoff_residual = 1e-6;
    if (!seen.count("tolerances.two_splitting")) c.tol.two_splitting = 1e-4;
    if (!seen.count("grid.nx")) c.nx = 101;
    if (!seen.count("grid.ny")) c.ny = 101;
    if (!seen.count("symmetry.gamma")) c.gamma = "amsler3";
    const Interval d = generalized_amsler_example().pair.domain_x;
    if (!c.x.has_domain) c.x.domain = d;
    if (!c.y.has_domain) c.y.domain = d;
  } else {
    if (c.x.function.empty()) throw ConfigError("x.function: required for kind " + std::string(c.kind == ConfigKind::Normalized ? "normalized" : "generalized"));
    if (c.y.function.empty()) throw ConfigError("y.function: required for kind " + std::string(c.kind == ConfigKind::Normalized ? "normalized" : "generalized"));
    if (!c.x.has_domain) throw ConfigError("x.domain: required");
    if (!c.y.has_domain) throw ConfigError("y.domain: required");
    if (!c.x.domain.contains(0.0) || !c.y.domain.contains(0.0))
      throw ConfigError("domain: must contain the basepoint 0");
  }
  if (!(c.gauge_x.empty() && c.gauge_y.empty()) && c.kind != ConfigKind::Generalized)
    throw ConfigError("gauge: only valid for kind generalized");
  if (c.max_trunc < c.trunc) throw ConfigError("birkhoff.max_trunc: must be >= trunc");
  if (!c.has_grid_x) c.grid_x = c.x.domain;
  if (!c.has_grid_y) c.grid_y = c.y.domain;
  if (c.grid_x.lo < c.x.domain.lo - 1e-12 || c.grid_x.hi > c.x.domain.hi + 1e-12)
    throw ConfigError("grid.x: must lie inside x.domain");
  if (c.grid_y.lo < c.y.domain.lo - 1e-12 || c.grid_y.hi > c.y.domain.hi + 1e-12)
    throw ConfigError("grid.y: must lie inside y.domain");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path.string());
  return parse_config(is, path.parent_path());
}

SymmetryDescriptor amsler3_symmetry() {
  const AmslerExample ex = generalized_amsler_example();
  SymmetryDescriptor d;
  d.gamma1 = ex.gamma1;
  d.gamma2 = ex.gamma2;
  d.wx = ex.wx;
  d.wy = ex.wy;
  return d;
}

BuiltProblem build_problem(const RunConfig& c) {
  BuiltProblem b;
  LaurentLoop init_x = LaurentLoop::identity(), init_y = LaurentLoop::identity();
  double base_x = c.x.domain.contains(0.0) ? 0.0 : c.x.domain.lo;
  double base_y = c.y.domain.contains(0.0) ? 0.0 : c.y.domain.lo;
  try {
    if (c.kind == ConfigKind::Amsler3) {
      b.pair = generalized_amsler_example(c.x.domain).pair;
      b.pair.domain_y = c.y.domain;
      b.description = "amsler3";
    } else {
      BoundaryAngles ba;
      ba.alpha = resolve_function(c.x.function, c.base_dir);
      ba.beta = resolve_function(c.y.function, c.base_dir);
      if (!c.x.speed.empty()) ba.a = resolve_function(c.x.speed, c.base_dir);
      if (!c.y.speed.empty()) ba.b = resolve_function(c.y.speed, c.base_dir);
      ba.domain_x = c.x.domain;
      ba.domain_y = c.y.domain;
      b.pair = normalized_from_boundary(ba);
      b.description = c.x.function + " / " + c.y.function;
      if (c.kind == ConfigKind::Generalized) {
        const RealFunction zero = [](double) { return 0.0; };
        const RealFunction tx = c.gauge_x.empty() ? zero : resolve_function(c.gauge_x, c.base_dir);
        const RealFunction ty = c.gauge_y.empty() ? zero : resolve_function(c.gauge_y, c.base_dir);
        const Mat2 gen = 0.5 * su2_basis(0);
        const Gauge qx = exponential_gauge(-1, gen, tx, numeric_derivative(tx, 1e-3));
        const Gauge qy = exponential_gauge(1, gen, ty, numeric_derivative(ty, 1e-3));
        b.pair = gauge_transform(b.pair, qx, qy);
        init_x = qx.q(base_x);
        init_y = qy.q(base_y);
        b.description += " (gauged)";
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainError& e) {
    throw ConfigError(std::string("potential: ") + e.what());
  }

  b.grid = GridSpec::uniform(c.grid_x, c.nx, c.grid_y, c.ny);
  b.options.birkhoff.trunc = c.trunc;
  b.options.birkhoff.max_trunc = c.max_trunc;
  b.options.birkhoff.tail_tol = c.tol.birkhoff_tail;
  b.options.birkhoff.residual_tol = c.tol.birkhoff_residual;
  b.options.integration.max_step = std::min(c.x.domain.length(), c.y.domain.length()) / c.steps;
  b.options.integration.drift_tol = c.tol.drift;
  b.options.init_x = init_x;
  b.options.init_y = init_y;
  b.options.base_x = base_x;
  b.options.base_y = base_y;
  b.options.threads = c.threads;
  if (c.gamma == "amsler3") b.symmetry = amsler3_symmetry();
  return b;
}

}  // namespace psurf
