#include "holext/config.hpp"

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string_view>

namespace holext {

ConfigError::ConfigError(const std::string& message, std::string key, int line, int column)
    : std::runtime_error([&] {
        std::string s = "config error";
        if (line > 0) s += " at line " + std::to_string(line) + ", column " + std::to_string(column);
        if (!key.empty()) s += " (" + key + ")";
        return s + ": " + message;
      }()),
      key_(std::move(key)),
      line_(line),
      column_(column) {}

namespace {

[[noreturn]] void fail(const YAML::Node& node, const std::string& key, const std::string& message) {
  const YAML::Mark mark = node.Mark();
  if (mark.is_null()) throw ConfigError(message, key);
  throw ConfigError(message, key, mark.line + 1, mark.column + 1);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void expect_map(const YAML::Node& node, const std::string& path) {
  if (!node.IsMap()) fail(node, path, "expected a mapping");
}

void check_keys(const YAML::Node& node, const std::string& path,
                std::initializer_list<std::string_view> allowed) {
  expect_map(node, path);
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(kv.first, join(path, key), "unknown key");
    }
  }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& path, const char* what) {
  if (!node.IsScalar()) fail(node, path, std::string("expected ") + what);
  try {
    return node.as<T>();
  } catch (const YAML::BadConversion&) {
    fail(node, path, std::string("expected ") + what);
  }
}

double number(const YAML::Node& node, const std::string& path) {
  const double v = scalar<double>(node, path, "a number");
  if (!std::isfinite(v)) fail(node, path, "expected a finite number");
  return v;
}

int integer(const YAML::Node& node, const std::string& path) {
  return scalar<int>(node, path, "an integer");
}

std::vector<double> numbers(const YAML::Node& node, const std::string& path) {
  std::vector<double> out;
  if (node.IsScalar()) {
    out.push_back(number(node, path));
    return out;
  }
  if (!node.IsSequence()) fail(node, path, "expected a number or a list of numbers");
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(number(node[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

// A list of numbers, or {linspace: [a, b, count]} / {logspace: [a, b, count]}.
std::vector<double> grid(const YAML::Node& node, const std::string& path) {
  if (node.IsSequence()) {
    auto v = numbers(node, path);
    if (v.empty()) fail(node, path, "grid must not be empty");
    return v;
  }
  if (!node.IsMap() || node.size() != 1) {
    fail(node, path, "expected a list or a single linspace/logspace entry");
  }
  const auto kind = node.begin()->first.as<std::string>();
  const YAML::Node args = node.begin()->second;
  const std::string sub = join(path, kind);
  if (kind != "linspace" && kind != "logspace") fail(node.begin()->first, sub, "unknown grid kind");
  if (!args.IsSequence() || args.size() != 3) fail(args, sub, "expected [start, stop, count]");
  const double a = number(args[0], sub + "[0]");
  const double b = number(args[1], sub + "[1]");
  const int count = integer(args[2], sub + "[2]");
  if (count < 2) fail(args[2], sub + "[2]", "count must be >= 2");
  if (kind == "logspace") {
    if (!(a > 0.0) || !(b > 0.0)) fail(args, sub, "logspace endpoints must be positive");
    return logspace(a, b, count);
  }
  return linspace(a, b, count);
}

// One point: a number (dimension 1) or a list of coordinates.
RealPoint real_point(const YAML::Node& node, const std::string& path) { return numbers(node, path); }

std::vector<RealPoint> real_points(const YAML::Node& node, const std::string& path) {
  if (!node.IsSequence() || node.size() == 0) fail(node, path, "expected a nonempty list of points");
  std::vector<RealPoint> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(real_point(node[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

// {x: [...], y: [...]} per point.
std::vector<ComplexPoint> complex_points(const YAML::Node& node, const std::string& path) {
  if (!node.IsSequence() || node.size() == 0) fail(node, path, "expected a nonempty list of points");
  std::vector<ComplexPoint> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    check_keys(node[i], p, {"x", "y"});
    if (!node[i]["x"] || !node[i]["y"]) fail(node[i], p, "a point needs both x and y");
    const auto x = numbers(node[i]["x"], p + ".x");
    const auto y = numbers(node[i]["y"], p + ".y");
    if (x.size() != y.size()) fail(node[i], p, "x and y differ in dimension");
    ComplexPoint z(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) z[j] = {x[j], y[j]};
    out.push_back(std::move(z));
  }
  return out;
}

double positive(const YAML::Node& node, const std::string& path) {
  const double v = number(node, path);
  if (!(v > 0.0)) fail(node, path, "must be positive");
  return v;
}

void parse_sequence(const YAML::Node& node, SequenceSpec& spec) {
  const std::string path = "sequence";
  check_keys(node, path, {"kind", "s", "c", "log_terms", "k_max"});
  if (node["kind"]) spec.kind = scalar<std::string>(node["kind"], "sequence.kind", "a string");
  if (spec.kind != "gevrey" && spec.kind != "geometric-gevrey" && spec.kind != "explicit") {
    fail(node["kind"], "sequence.kind", "expected gevrey, geometric-gevrey or explicit");
  }
  if (node["s"]) spec.s = number(node["s"], "sequence.s");
  if (node["c"]) spec.c = positive(node["c"], "sequence.c");
  if (node["k_max"]) {
    spec.k_max = integer(node["k_max"], "sequence.k_max");
    if (spec.k_max < 8 || spec.k_max > 16000) fail(node["k_max"], "sequence.k_max", "must be in [8, 16000]");
  }
  if (spec.kind == "explicit") {
    if (!node["log_terms"]) fail(node, path, "explicit sequences need log_terms");
    spec.log_terms = numbers(node["log_terms"], "sequence.log_terms");
    if (spec.log_terms.size() < 9) fail(node["log_terms"], "sequence.log_terms", "need at least 9 terms");
    if (spec.log_terms[0] != 0.0) fail(node["log_terms"], "sequence.log_terms", "ln M_0 must be 0");
    spec.k_max = static_cast<int>(spec.log_terms.size()) - 1;
  } else if (node["log_terms"]) {
    fail(node["log_terms"], "sequence.log_terms", "only allowed for explicit sequences");
  }
}

void parse_dual(const YAML::Node& node, DualSpec& spec) {
  check_keys(node, "dual", {"eta", "cap", "inject"});
  if (node["eta"]) spec.eta = positive(node["eta"], "dual.eta");
  if (node["cap"]) spec.cap = positive(node["cap"], "dual.cap");
  if (!(spec.cap > spec.eta)) fail(node, "dual.cap", "cap must exceed eta");
  if (node["inject"]) {
    const YAML::Node inj = node["inject"];
    check_keys(inj, "dual.inject", {"index", "delta"});
    if (!inj["index"] || !inj["delta"]) fail(inj, "dual.inject", "needs index and delta");
    spec.inject = InjectSpec{integer(inj["index"], "dual.inject.index"), number(inj["delta"], "dual.inject.delta")};
    if (spec.inject->index < 1) fail(inj["index"], "dual.inject.index", "must be >= 1");
  }
}

void parse_phi(const YAML::Node& node, PhiSpec& spec) {
  check_keys(node, "phi", {"family", "p", "dimension", "a"});
  if (node["family"]) spec.family = scalar<std::string>(node["family"], "phi.family", "a string");
  if (spec.family != "power") fail(node["family"], "phi.family", "only the power family is built in");
  if (node["p"]) {
    spec.p = positive(node["p"], "phi.p");
    if (!(spec.p > 1.0)) fail(node["p"], "phi.p", "must exceed 1");
  }
  if (node["dimension"]) {
    spec.dimension = integer(node["dimension"], "phi.dimension");
    if (spec.dimension < 1 || spec.dimension > 6) fail(node["dimension"], "phi.dimension", "must be in [1, 6]");
  }
  if (node["a"]) {
    spec.a = numbers(node["a"], "phi.a");
    if (spec.a.empty()) fail(node["a"], "phi.a", "must not be empty");
    for (double a : spec.a) {
      if (!(a >= 1.0)) fail(node["a"], "phi.a", "shift constants must be >= 1");
    }
  }
}

void parse_models(const YAML::Node& node, std::vector<ModelSpec>& models) {
  if (!node.IsSequence() || node.size() == 0) fail(node, "models", "expected a nonempty list");
  for (std::size_t i = 0; i < node.size(); ++i) {
    const std::string p = "models[" + std::to_string(i) + "]";
    const YAML::Node m = node[i];
    check_keys(m, p, {"name", "c", "scale", "poly", "dimension"});
    ModelSpec spec;
    if (!m["name"]) fail(m, p, "missing name");
    spec.name = scalar<std::string>(m["name"], p + ".name", "a string");
    if (spec.name != "gaussian" && spec.name != "cosine" && spec.name != "poly-gaussian" &&
        spec.name != "exp-square") {
      fail(m["name"], p + ".name", "expected gaussian, cosine, poly-gaussian or exp-square");
    }
    if (m["c"]) spec.c = number(m["c"], p + ".c");
    if (m["scale"]) spec.scale = number(m["scale"], p + ".scale");
    if (m["dimension"]) {
      spec.dimension = integer(m["dimension"], p + ".dimension");
      if (spec.dimension < 1) fail(m["dimension"], p + ".dimension", "must be >= 1");
    }
    if (spec.name == "poly-gaussian") {
      if (!m["poly"]) fail(m, p, "poly-gaussian needs poly");
      spec.poly = numbers(m["poly"], p + ".poly");
      if (spec.poly.empty()) fail(m["poly"], p + ".poly", "must not be empty");
    } else if (m["poly"]) {
      fail(m["poly"], p + ".poly", "only allowed for poly-gaussian");
    }
    if ((spec.name == "gaussian" && spec.c < 0.0) || (spec.name == "poly-gaussian" && !(spec.c > 0.0))) {
      fail(m["c"] ? m["c"] : m, p + ".c", "Gaussian rate out of range");
    }
    models.push_back(std::move(spec));
  }
}

void parse_indices(const YAML::Node& node, RunConfig& cfg) {
  check_keys(node, "indices", {"m", "eps", "delta"});
  if (node["m"]) {
    cfg.m.clear();
    const YAML::Node list = node["m"];
    if (list.IsScalar()) {
      cfg.m.push_back(integer(list, "indices.m"));
    } else if (list.IsSequence()) {
      for (std::size_t i = 0; i < list.size(); ++i) cfg.m.push_back(integer(list[i], "indices.m"));
    } else {
      fail(list, "indices.m", "expected an integer or a list");
    }
    if (cfg.m.empty()) fail(list, "indices.m", "must not be empty");
    for (int m : cfg.m) {
      if (m < 1) fail(list, "indices.m", "m must be >= 1");
    }
  }
  auto positives = [&](const char* key, std::vector<double>& out) {
    if (!node[key]) return;
    const std::string p = std::string("indices.") + key;
    out = numbers(node[key], p);
    if (out.empty()) fail(node[key], p, "must not be empty");
    for (double v : out) {
      if (!(v > 0.0)) fail(node[key], p, "values must be positive");
    }
  };
  positives("eps", cfg.eps);
  positives("delta", cfg.delta);
}

void parse_grids(const YAML::Node& node, GridSpecs& g) {
  check_keys(node, "grids", {"r", "x", "y", "R", "radii"});
  if (node["r"]) g.r = grid(node["r"], "grids.r");
  if (node["x"]) g.x = grid(node["x"], "grids.x");
  if (node["y"]) g.y = grid(node["y"], "grids.y");
  if (node["R"]) g.R = grid(node["R"], "grids.R");
  if (node["radii"]) g.radii = grid(node["radii"], "grids.radii");
  for (double r : g.r) {
    if (!(r >= 0.0)) fail(node["r"], "grids.r", "radii must be >= 0");
  }
  for (double r : g.R) {
    if (!(r >= 0.0)) fail(node["R"], "grids.R", "radii must be >= 0");
  }
  for (std::size_t i = 0; i < g.radii.size(); ++i) {
    if (!(g.radii[i] > 0.0) || (i > 0 && !(g.radii[i] > g.radii[i - 1]))) {
      fail(node["radii"], "grids.radii", "must be positive and increasing");
    }
  }
  if (node["radii"] && g.radii.size() < 4) fail(node["radii"], "grids.radii", "need at least 4 radii");
}

void parse_tolerances(const YAML::Node& node, Tolerances& t) {
  check_keys(node, "tolerances", {"lemma", "extend", "cauchy", "stability"});
  if (node["lemma"]) t.lemma = positive(node["lemma"], "tolerances.lemma");
  if (node["extend"]) t.extend = positive(node["extend"], "tolerances.extend");
  if (node["cauchy"]) t.cauchy = positive(node["cauchy"], "tolerances.cauchy");
  if (node["stability"]) t.stability = positive(node["stability"], "tolerances.stability");
}

void parse_verify(const YAML::Node& node, VerifySpec& v) {
  check_keys(node, "verify", {"alpha2_eps", "p_max", "growth_threshold"});
  if (node["alpha2_eps"]) {
    v.alpha2_eps = numbers(node["alpha2_eps"], "verify.alpha2_eps");
    for (double e : v.alpha2_eps) {
      if (!(e > 0.0)) fail(node["alpha2_eps"], "verify.alpha2_eps", "values must be positive");
    }
  }
  if (node["p_max"]) {
    v.p_max = integer(node["p_max"], "verify.p_max");
    if (v.p_max < 0) fail(node["p_max"], "verify.p_max", "must be >= 0");
  }
  if (node["growth_threshold"]) v.growth_threshold = number(node["growth_threshold"], "verify.growth_threshold");
}

void parse_extend(const YAML::Node& node, ExtendSpec& e) {
  check_keys(node, "extend", {"tol", "x", "y"});
  if (node["tol"]) e.tol = positive(node["tol"], "extend.tol");
  if (node["x"]) e.x = grid(node["x"], "extend.x");
  if (node["y"]) e.y = grid(node["y"], "extend.y");
}

int nodes_value(const YAML::Node& node, const std::string& path) {
  const int q = integer(node, path);
  if (q < 4) fail(node, path, "need at least 4 nodes");
  return q;
}

int alpha_value(const YAML::Node& node, const std::string& path) {
  const int a = integer(node, path);
  if (a < 0 || a > kDerivativeDepthCap) fail(node, path, "must be in [0, 60]");
  return a;
}

void parse_cauchy(const YAML::Node& node, CauchySpec& c) {
  check_keys(node, "cauchy", {"radius", "nodes", "points", "alpha_max"});
  if (node["radius"]) c.radius = positive(node["radius"], "cauchy.radius");
  if (node["nodes"]) c.nodes = nodes_value(node["nodes"], "cauchy.nodes");
  if (node["points"]) c.points = real_points(node["points"], "cauchy.points");
  if (node["alpha_max"]) c.alpha_max = alpha_value(node["alpha_max"], "cauchy.alpha_max");
}

void parse_roundtrip(const YAML::Node& node, RoundtripSpec& r) {
  check_keys(node, "roundtrip", {"radius", "nodes", "points", "alpha_max", "tail_tol", "tol", "z"});
  if (node["radius"]) r.radius = positive(node["radius"], "roundtrip.radius");
  if (node["nodes"]) r.nodes = nodes_value(node["nodes"], "roundtrip.nodes");
  if (node["points"]) r.points = real_points(node["points"], "roundtrip.points");
  if (node["alpha_max"]) r.alpha_max = alpha_value(node["alpha_max"], "roundtrip.alpha_max");
  if (node["tail_tol"]) r.tail_tol = positive(node["tail_tol"], "roundtrip.tail_tol");
  if (node["tol"]) r.tol = positive(node["tol"], "roundtrip.tol");
  if (node["z"]) r.z = complex_points(node["z"], "roundtrip.z");
}

RealPoint replicate(double v, int n) { return RealPoint(static_cast<std::size_t>(n), v); }

void apply_defaults(RunConfig& cfg) {
  const int n = cfg.phi.dimension;
  auto& g = cfg.grids;
  if (g.r.empty()) g.r = logspace(1e-6, 1e3, 500);
  if (g.x.empty()) g.x = linspace(-6.0, 6.0, 121);
  if (g.y.empty()) g.y = linspace(-6.0, 6.0, 121);
  if (g.R.empty()) g.R = linspace(0.01, 30.0, 3000);
  if (g.radii.empty()) g.radii = linspace(1.0, 100.0, 100);
  if (cfg.extend.x.empty()) cfg.extend.x = linspace(-5.0, 5.0, 101);
  if (cfg.extend.y.empty()) cfg.extend.y = linspace(-5.0, 5.0, 101);
  if (cfg.models.empty()) cfg.models.push_back(ModelSpec{"gaussian", 1.0, 1.0, {}, 0});
  for (auto& m : cfg.models) {
    if (m.dimension == 0) m.dimension = n;
  }
  auto default_points = [n] {
    return std::vector<RealPoint>{replicate(-2.0, n), replicate(0.0, n), replicate(1.5, n)};
  };
  if (cfg.cauchy.points.empty()) cfg.cauchy.points = default_points();
  if (cfg.roundtrip.points.empty()) cfg.roundtrip.points = default_points();
  if (cfg.roundtrip.z.empty()) {
    for (auto [x, y] : {std::pair{0.5, 1.0}, std::pair{-1.0, 0.5}, std::pair{1.5, -1.0}}) {
      cfg.roundtrip.z.emplace_back(static_cast<std::size_t>(n), std::complex<double>(x, y));
    }
  }
}

void check_dimensions(const YAML::Node& root, const RunConfig& cfg) {
  const int n = cfg.phi.dimension;
  for (std::size_t i = 0; i < cfg.models.size(); ++i) {
    if (cfg.models[i].dimension != n) {
      const YAML::Node at = root["models"] ? root["models"][i]["dimension"] : root;
      fail(at ? at : root, "models[" + std::to_string(i) + "].dimension",
           "model dimension " + std::to_string(cfg.models[i].dimension) +
               " does not match phi.dimension " + std::to_string(n));
    }
  }
  auto check_points = [&](const std::vector<RealPoint>& pts, const char* key) {
    for (const auto& p : pts) {
      if (static_cast<int>(p.size()) != n) fail(root, key, "point dimension does not match phi.dimension");
    }
  };
  check_points(cfg.cauchy.points, "cauchy.points");
  check_points(cfg.roundtrip.points, "roundtrip.points");
  for (const auto& z : cfg.roundtrip.z) {
    if (static_cast<int>(z.size()) != n) fail(root, "roundtrip.z", "point dimension does not match phi.dimension");
  }
  if (cfg.alpha_max > cfg.sequence.k_max) fail(root, "alpha_max", "exceeds sequence.k_max");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, {}, e.mark.line + 1, e.mark.column + 1);
  }
  RunConfig cfg;
  cfg.text = text;
  cfg.digest = sha256_hex(text);
  if (root.IsNull()) {
    apply_defaults(cfg);
    return cfg;
  }
  check_keys(root, "", {"sequence", "dual", "phi", "models", "indices", "grids", "tolerances", "verify",
                        "extend", "cauchy", "roundtrip", "alpha_max", "random_directions", "seed",
                        "threads", "out"});
  if (root["sequence"]) parse_sequence(root["sequence"], cfg.sequence);
  if (root["dual"]) parse_dual(root["dual"], cfg.dual);
  if (root["phi"]) parse_phi(root["phi"], cfg.phi);
  if (root["models"]) parse_models(root["models"], cfg.models);
  if (root["indices"]) parse_indices(root["indices"], cfg);
  if (root["grids"]) parse_grids(root["grids"], cfg.grids);
  if (root["tolerances"]) parse_tolerances(root["tolerances"], cfg.tolerances);
  if (root["verify"]) parse_verify(root["verify"], cfg.verify);
  if (root["extend"]) parse_extend(root["extend"], cfg.extend);
  if (root["cauchy"]) parse_cauchy(root["cauchy"], cfg.cauchy);
  if (root["roundtrip"]) parse_roundtrip(root["roundtrip"], cfg.roundtrip);
  if (root["alpha_max"]) cfg.alpha_max = alpha_value(root["alpha_max"], "alpha_max");
  if (root["random_directions"]) {
    cfg.random_directions = integer(root["random_directions"], "random_directions");
    if (cfg.random_directions < 0) fail(root["random_directions"], "random_directions", "must be >= 0");
  }
  if (root["seed"]) cfg.seed = scalar<std::uint64_t>(root["seed"], "seed", "a nonnegative integer");
  if (root["threads"]) {
    cfg.threads = integer(root["threads"], "threads");
    if (cfg.threads < 1) fail(root["threads"], "threads", "must be >= 1");
  }
  if (root["out"]) cfg.out = scalar<std::string>(root["out"], "out", "a path");
  apply_defaults(cfg);
  check_dimensions(root, cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

WeightSequence build_sequence(const SequenceSpec& spec) {
  if (spec.kind == "gevrey") return WeightSequence::gevrey(spec.s, spec.k_max);
  if (spec.kind == "geometric-gevrey") return WeightSequence::geometric_gevrey(spec.c, spec.s, spec.k_max);
  return WeightSequence(spec.log_terms);
}

PhiFamily build_phi(const PhiSpec& spec) { return PhiFamily::power(spec.p, spec.dimension, spec.a); }

ProductModel build_model(const ModelSpec& spec, int dimension) {
  const int n = spec.dimension > 0 ? spec.dimension : dimension;
  if (spec.name == "gaussian") return ProductModel::gaussian(spec.c, n, spec.scale);
  if (spec.name == "cosine") return ProductModel::cosine(n, spec.scale);
  if (spec.name == "poly-gaussian") return ProductModel::poly_gaussian(spec.poly, spec.c, n, spec.scale);
  if (spec.name == "exp-square") return ProductModel::exp_square(n, spec.scale);
  throw ConfigError("unknown model '" + spec.name + "'", "models.name");
}

}  // namespace holext
