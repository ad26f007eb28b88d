#include "holext/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>

#include "holext/associated_weight.hpp"
#include "holext/extension.hpp"
#include "holext/function_models.hpp"
#include "holext/phi_families.hpp"
#include "holext/restriction.hpp"
#include "holext/seminorms.hpp"
#include "holext/sequences.hpp"
#include "json.hpp"

namespace holext {

namespace {

using json = nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vec(std::span<const double> v) {
  json out = json::array();
  for (double x : v) out.push_back(num(x));
  return out;
}

json ivec(std::span<const int> v) { return json(std::vector<int>(v.begin(), v.end())); }

json zjson(const ComplexPoint& z) {
  json x = json::array(), y = json::array();
  for (const auto& c : z) {
    x.push_back(num(c.real()));
    y.push_back(num(c.imag()));
  }
  return {{"x", x}, {"y", y}};
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

struct Table {
  std::string file;
  std::string description;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row) {
    if (row.size() != columns.size()) throw std::logic_error("table " + file + ": row width mismatch");
    for (double v : row) {
      if (!std::isfinite(v)) throw std::logic_error("table " + file + ": non-finite cell");
    }
    rows.push_back(std::move(row));
  }
};

class Report {
 public:
  void check(const std::string& name, bool pass, double slack, std::vector<std::string> flags = {},
             json worst = json::object(), json detail = json::object()) {
    json c = {{"pass", pass}, {"slack", num(slack)}, {"flags", flags}, {"worst_case", std::move(worst)}};
    if (!detail.empty()) c["detail"] = std::move(detail);
    checks_[name] = std::move(c);
    pass_ = pass_ && pass;
    lines_.push_back((pass ? "PASS " : "FAIL ") + name);
  }

  Table& table(std::string file, std::string description, std::vector<std::string> columns) {
    tables_.push_back(Table{std::move(file), std::move(description), std::move(columns), {}});
    return tables_.back();
  }

  json& details() { return details_; }
  bool pass() const { return pass_; }
  const std::vector<std::string>& lines() const { return lines_; }

  void write(const std::filesystem::path& dir, const std::string& command, const RunConfig& cfg) const {
    std::filesystem::create_directories(dir);
    json tables = json::object();
    for (const auto& t : tables_) {
      tables[t.file] = {{"description", t.description}, {"columns", t.columns}, {"rows", t.rows.size()}};
      std::ofstream out(dir / t.file, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + (dir / t.file).string());
      for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
      out << '\n';
      for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
        out << '\n';
      }
    }
    json doc = {{"schema", 1},
                {"command", command},
                {"config_digest", cfg.digest},
                {"seed", cfg.seed},
                {"pass", pass_},
                {"checks", checks_},
                {"tables", tables},
                {"details", details_}};
    std::ofstream out(dir / (command + ".json"), std::ios::binary);
    if (!out) throw std::runtime_error("cannot write report json");
    out << doc.dump(2) << '\n';
  }

 private:
  json checks_ = json::object();
  std::deque<Table> tables_;
  json details_ = json::object();
  std::vector<std::string> lines_;
  bool pass_ = true;
};

struct Context {
  const RunConfig& cfg;
  int n;
  WeightSequence M;
  PhiFamily phi;
  std::vector<ProductModel> models;
  std::vector<std::string> keys;
  std::optional<DualSequence> K;
  std::optional<AssociatedWeight> W;
  bool weight_attempted = false;

  explicit Context(const RunConfig& c)
      : cfg(c), n(c.phi.dimension), M(build_sequence(c.sequence)), phi(build_phi(c.phi)) {
    for (std::size_t i = 0; i < c.models.size(); ++i) {
      models.push_back(build_model(c.models[i], n));
      std::string key = c.models[i].name;
      const auto dup = std::count_if(c.models.begin(), c.models.end(),
                                     [&](const ModelSpec& s) { return s.name == key; });
      if (dup > 1) key += "-" + std::to_string(i);
      keys.push_back(std::move(key));
    }
  }

  TensorGrid x_grid() const { return TensorGrid(cfg.grids.x, n); }
  ShiftSampling sampling() const { return ShiftSampling{cfg.random_directions, cfg.seed, cfg.threads}; }
};

// Fits K (with the configured injection) and builds w_K. On failure records a
// failing check and returns false.
bool prepare_weight(Context& ctx, Report& rep, const std::string& section) {
  if (ctx.W) return true;
  if (ctx.weight_attempted) {
    rep.check(section + "/weight", false, kNaN, {"w_K unavailable; see the dual checks"});
    return false;
  }
  ctx.weight_attempted = true;
  try {
    ctx.K = derive_dual(ctx.M, DualFitOptions{ctx.cfg.dual.eta, ctx.cfg.dual.cap, 1001});
  } catch (const std::exception& e) {
    rep.check(section + "/dual_fit", false, kNaN, {e.what()});
    return false;
  }
  if (const auto& inj = ctx.cfg.dual.inject) {
    if (inj->index >= ctx.K->m_max()) {
      throw ConfigError("index beyond the stored range of K", "dual.inject.index");
    }
    std::vector<double> terms(ctx.K->log_terms().begin(), ctx.K->log_terms().end());
    terms[inj->index] += inj->delta;
    ctx.K = DualSequence::from_terms(std::move(terms), ctx.K->log_t1(), ctx.K->log_t2());
  }
  const LogConvexityReport convex = check_log_convex(ctx.K->log_terms(), AssociatedWeight::kConvexitySlack);
  json worst = {{"first_violation", convex.first_violation ? json(*convex.first_violation) : json(nullptr)},
                {"min_margin", num(convex.min_margin)}};
  rep.check(section + "/K_log_convex", convex.pass, convex.min_margin, {}, worst);
  try {
    ctx.W.emplace(*ctx.K);
  } catch (const std::exception& e) {
    rep.check(section + "/weight", false, kNaN, {e.what()});
    return false;
  }
  return true;
}

json dual_json(const DualSequence& K) {
  return {{"t1", num(K.t1())}, {"t2", num(K.t2())}, {"ln_t1", num(K.log_t1())},
          {"ln_t2", num(K.log_t2())}, {"m_max", K.m_max()}};
}

std::vector<std::string> coord_columns(const char* prefix, int n) {
  std::vector<std::string> out;
  for (int j = 1; j <= n; ++j) out.push_back(prefix + std::to_string(j));
  return out;
}

template <class... Parts>
std::vector<std::string> concat(Parts&&... parts) {
  std::vector<std::string> out;
  (out.insert(out.end(), parts.begin(), parts.end()), ...);
  return out;
}

// Inserts the midpoint between every pair of neighbours: the refined grid
// contains the original one.
std::vector<double> refine(std::span<const double> axis) {
  std::vector<double> out;
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (i > 0) out.push_back(0.5 * (axis[i - 1] + axis[i]));
    out.push_back(axis[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------

void cmd_verify(Context& ctx, Report& rep) {
  const std::string s = "verify-sequences";
  const auto& M = ctx.M;
  const auto a1 = validate_alpha1(M);
  rep.check(s + "/alpha1", a1.pass, a1.min_margin, {},
            {{"first_violation", a1.first_violation ? json(*a1.first_violation) : json(nullptr)}});

  const auto growth = validate_growth(M, ctx.cfg.verify.growth_threshold);
  rep.check(s + "/growth", growth.pass, growth.final_value - growth.threshold, {"finite-sample proxy"},
            {{"checked_from", growth.checked_from}, {"checked_to", growth.checked_to},
             {"final_value", num(growth.final_value)}, {"tail_slope", num(growth.tail_slope)},
             {"increasing", growth.increasing}});

  for (const auto& c : validate_alpha2(M, ctx.cfg.verify.alpha2_eps)) {
    rep.check(s + "/alpha2[eps=" + fmt(c.epsilon) + "]", c.proxy_pass, kNaN, {"finite-sample proxy"},
              {{"argmax_k", c.argmax_k}},
              {{"a_eps", num(c.a_eps)}, {"ln_a_eps", num(c.log_a_eps)}, {"k_checked", c.k_checked},
               {"root_trend_last", num(c.root_trend.empty() ? kNaN : c.root_trend.back())}});
  }

  const int p_max = std::min(ctx.cfg.verify.p_max, M.k_max() / 2);
  const auto sup = check_supermultiplicative(M, p_max);
  rep.check(s + "/supermultiplicative", sup.pass, sup.min_margin, {},
            {{"p_max", p_max},
             {"first_violation", sup.first_violation ? json({sup.first_violation->first, sup.first_violation->second})
                                                     : json(nullptr)}});

  if (!prepare_weight(ctx, rep, s)) return;
  const auto& K = *ctx.K;
  const auto violations = dual_invariant_violations(K, M);
  rep.check(s + "/dual_invariants", violations.empty(), kNaN, violations);
  rep.details()["dual"] = dual_json(K);

  const int q_max = std::min(p_max, K.m_max() / 2);
  const auto sub = check_K_submultiplicative(K, q_max);
  rep.check(s + "/K_submultiplicative", sub.pass, sub.min_margin, {},
            {{"p_max", q_max},
             {"first_violation", sub.first_violation ? json({sub.first_violation->first, sub.first_violation->second})
                                                     : json(nullptr)}});

  auto& t = rep.table("verify-sequences_terms.csv",
                      "per index k: ln M_k, ln K_k, ln(k!/M_k), and the sandwich slack "
                      "ln t1 + k ln t2 - |ln(k!/M_k) - ln K_k|",
                      {"k", "ln_M", "ln_K", "ln_kfact_over_M", "sandwich_slack"});
  for (int k = 0; k <= std::min(M.k_max(), K.m_max()); ++k) {
    const double target = log_factorial(k) - M.log_term(k);
    t.add({double(k), M.log_term(k), K.log_term(k), target,
           K.log_t1() + k * K.log_t2() - std::abs(target - K.log_term(k))});
  }
}

void cmd_weight_table(Context& ctx, Report& rep) {
  const std::string s = "weight-table";
  if (!prepare_weight(ctx, rep, s)) return;
  const auto& W = *ctx.W;
  auto& t = rep.table("weight-table.csv",
                      "w_K over the r grid: trace index m*, w_K(r), the gap w_K(e t2^2 r) + 3 ln t1 - 2 w_K(r), "
                      "truncated = 1 when either evaluation hits the last stored index",
                      {"r", "m_star", "w", "lemma_gap", "truncated"});
  std::vector<std::pair<double, double>> sorted;
  for (double r : ctx.cfg.grids.r) {
    const WeightEval w = W.eval(r);
    const LemmaGap g = W.lemma_gap(r);
    t.add({r, double(w.trace_index), w.value, g.gap, (w.truncated || g.truncated) ? 1.0 : 0.0});
    sorted.emplace_back(r, w.value);
  }
  std::sort(sorted.begin(), sorted.end());
  double worst = std::numeric_limits<double>::infinity();
  double worst_r = 0.0;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double inc = sorted[i].second - sorted[i - 1].second;
    const double scaled = inc + 1e-12 * std::max(1.0, std::abs(sorted[i].second));
    if (scaled < worst) {
      worst = scaled;
      worst_r = sorted[i].first;
    }
  }
  if (sorted.size() < 2) worst = 0.0;
  rep.check(s + "/monotone", worst >= 0.0, worst, {}, {{"r", num(worst_r)}});

  double max_err = 0.0;
  int arg = 0;
  for (int N = 0; N < W.m_max() - 1; ++N) {
    const double err = std::abs(W.legendre_recover(N) - W.dual().log_term(N));
    if (err > max_err) {
      max_err = err;
      arg = N;
    }
  }
  rep.check(s + "/legendre", max_err <= 1e-9, 1e-9 - max_err, {}, {{"N", arg}, {"abs_error", num(max_err)}});
}

void cmd_lemma_scan(Context& ctx, Report& rep) {
  const std::string s = "lemma-scan";
  if (!prepare_weight(ctx, rep, s)) return;
  const auto& W = *ctx.W;
  auto& t = rep.table("lemma-scan.csv",
                      "lemma gap w_K(e t2^2 r) + 3 ln t1 - 2 w_K(r) over the r grid; truncated rows are "
                      "excluded from the check",
                      {"r", "gap", "truncated"});
  double min_gap = std::numeric_limits<double>::infinity();
  double arg_r = 0.0;
  std::size_t checked = 0, flagged = 0;
  for (double r : ctx.cfg.grids.r) {
    const LemmaGap g = W.lemma_gap(r);
    t.add({r, g.gap, g.truncated ? 1.0 : 0.0});
    if (g.truncated) {
      ++flagged;
      continue;
    }
    ++checked;
    if (g.gap < min_gap) {
      min_gap = g.gap;
      arg_r = r;
    }
  }
  std::vector<std::string> flags;
  if (flagged) flags.push_back(std::to_string(flagged) + " truncated points skipped");
  if (!checked) flags.push_back("no unflagged points");
  rep.check(s + "/lemma_gap", checked > 0 && min_gap >= -ctx.cfg.tolerances.lemma, min_gap, flags,
            {{"r", num(arg_r)}, {"gap", num(min_gap)}}, {{"checked", checked}, {"flagged", flagged}});
}

void cmd_phi_check(Context& ctx, Report& rep) {
  const std::string s = "phi-check";
  const auto& radii = ctx.cfg.grids.radii;
  for (int m : ctx.cfg.m) {
    const auto sl = check_superlinear(ctx.phi, m, radii);
    rep.check(s + "/superlinear[m=" + std::to_string(m) + "]", sl.pass, sl.min_increment,
              {"finite-sample proxy"}, {{"first_radius", num(sl.first_radius)}, {"last_radius", num(sl.last_radius)}});
    const auto sep = check_separation(ctx.phi, m, radii);
    rep.check(s + "/separation[m=" + std::to_string(m) + "]", sep.pass, sep.final_value - sep.threshold,
              {"finite-sample proxy"},
              {{"final_value", num(sep.final_value)}, {"min_increment", num(sep.min_increment)}});
  }
  if (!prepare_weight(ctx, rep, s)) return;
  auto& t = rep.table("phi-check_shift.csv",
                      "sampled shift constants b_{m,delta} with the argmax radius; diverging = 1 when the "
                      "per-R maximum still grows at the largest R",
                      {"m", "delta", "a_m", "b", "raw_max", "argmax_R", "diverging", "weight_truncated"});
  const TensorGrid xg = ctx.x_grid();
  for (int m : ctx.cfg.m) {
    for (double delta : ctx.cfg.delta) {
      const ShiftBound b = shift_bound(ctx.phi, *ctx.W, m, delta, ctx.cfg.grids.R, xg, ctx.sampling());
      t.add({double(m), delta, b.a_m, b.b, b.raw_max, b.argmax_R, b.diverging ? 1.0 : 0.0,
             b.weight_truncated ? 1.0 : 0.0});
      std::vector<std::string> flags;
      if (b.diverging) flags.push_back("diverging");
      if (b.weight_truncated) flags.push_back("weight truncated");
      rep.check(s + "/shift[m=" + std::to_string(m) + ",delta=" + fmt(delta) + "]", !b.diverging, kNaN, flags,
                {{"R", num(b.argmax_R)}, {"x", vec(b.argmax_x)}},
                {{"b", num(b.b)}, {"a_m", num(b.a_m)}, {"directions", b.directions}});
    }
  }
}

void cmd_extend_eval(Context& ctx, Report& rep) {
  const std::string s = "extend-eval";
  if (!prepare_weight(ctx, rep, s)) return;
  const auto& W = *ctx.W;
  const int n = ctx.n;
  const ZGrid grid(TensorGrid(ctx.cfg.extend.x, n), TensorGrid(ctx.cfg.extend.y, n));
  const int m0 = ctx.cfg.m.front();
  const double eps0 = ctx.cfg.eps.front();
  const double scale0 = 2.0 * eps0 * n * W.dual().t2();

  for (std::size_t i = 0; i < ctx.models.size(); ++i) {
    const auto& model = ctx.models[i];
    const std::string& key = ctx.keys[i];
    std::vector<ExtensionSample> samples;
    try {
      samples = extend_on_grid(model, grid, ctx.cfg.extend.tol, ctx.cfg.threads);
    } catch (const std::exception& e) {
      rep.check(s + "/extension[" + key + "]", false, kNaN, {e.what()});
      continue;
    }
    auto& t = rep.table(
        "extend-eval_" + key + ".csv",
        "T f at z = x + iy: value, exact entire value, grade N used, certified tail bound, rounding estimate, "
        "and ratio = (|value| + tail + rounding) exp(-phi_m(x) - w_K(2 eps n t2 |y|)) at the first (m, eps)",
        concat(coord_columns("x", n), coord_columns("y", n),
               std::vector<std::string>{"value_re", "value_im", "exact_re", "exact_im", "n_used", "tail_bound",
                                        "rounding", "ratio"}));
    double worst_excess = -std::numeric_limits<double>::infinity();
    std::size_t worst_i = 0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const auto& smp = samples[k];
      const auto exact = model.value(smp.z);
      RealPoint x(n), y(n);
      for (int j = 0; j < n; ++j) {
        x[j] = smp.z[j].real();
        y[j] = smp.z[j].imag();
      }
      const auto& r = smp.result;
      const double excess = std::abs(r.value - exact) - r.tail_bound - r.rounding_estimate;
      if (excess > worst_excess) {
        worst_excess = excess;
        worst_i = k;
      }
      const double modulus = std::abs(r.value) + r.tail_bound + r.rounding_estimate;
      const double ratio = modulus * std::exp(-ctx.phi(m0, x) - W.eval(scale0 * euclidean_norm(y)).value);
      std::vector<double> row(x);
      row.insert(row.end(), y.begin(), y.end());
      row.insert(row.end(), {r.value.real(), r.value.imag(), exact.real(), exact.imag(), double(r.n_used),
                             r.tail_bound, r.rounding_estimate, ratio});
      t.add(std::move(row));
    }
    rep.check(s + "/oracle[" + key + "]", worst_excess <= ctx.cfg.tolerances.extend,
              ctx.cfg.tolerances.extend - worst_excess, {}, {{"z", zjson(samples[worst_i].z)}, {"excess", num(worst_excess)}});

    for (int m : ctx.cfg.m) {
      for (double eps : ctx.cfg.eps) {
        const ForwardCheck f = forward_continuity_check(model, samples, ctx.M, W, ctx.phi, m, eps, ctx.x_grid(),
                                                        ctx.cfg.alpha_max, ctx.cfg.threads);
        std::vector<std::string> flags;
        if (!f.p_upper_certified) flags.push_back("p_upper not certified");
        if (f.growth.weight_truncated) flags.push_back("weight truncated");
        if (f.p_hat.boundary_flag) flags.push_back("p estimate on grid boundary");
        if (f.p_hat.order_flag) flags.push_back("p estimate at alpha_max");
        rep.check(s + "/growth[" + key + ",m=" + std::to_string(m) + ",eps=" + fmt(eps) + "]", f.pass,
                  f.growth.slack, flags,
                  {{"z", zjson(f.growth.argmax_z)}, {"ratio", num(f.growth.max_ratio)}},
                  {{"bound", num(f.growth.bound)}, {"p_upper", num(f.p_upper)}, {"p_hat", num(f.p_hat.value)},
                   {"weight_scale", num(f.growth.weight_scale)}, {"max_tail_bound", num(f.growth.max_tail_bound)}});
      }
    }
  }
}

void cmd_cauchy(Context& ctx, Report& rep) {
  const std::string s = "cauchy-recover";
  if (!prepare_weight(ctx, rep, s)) return;
  const auto& W = *ctx.W;
  const int n = ctx.n;
  const int m0 = ctx.cfg.m.front();
  const double eps0 = ctx.cfg.eps.front();
  const ShiftBound shift = shift_bound(ctx.phi, W, m0, eps0, ctx.cfg.grids.R, ctx.x_grid(), ctx.sampling());
  const ChainConstants k = chain_constants(m0, eps0, ctx.phi.shift_constant(m0), W.dual().t1(), W.dual().t2(), n,
                                           shift.b);
  rep.details()["chain_constants"] = {{"m", m0}, {"eps", num(eps0)}, {"b", num(k.b)}, {"c_m", num(k.c_m)},
                                      {"d", num(k.d)}, {"diverging", shift.diverging}};
  const auto alphas = multi_indices_up_to(n, ctx.cfg.cauchy.alpha_max);

  for (std::size_t i = 0; i < ctx.models.size(); ++i) {
    const auto& model = ctx.models[i];
    const std::string& key = ctx.keys[i];
    const AnalyticBound q = analytic_q_upper(model, W, eps0);
    const bool have_bound = std::isfinite(q.value);
    auto columns = concat(coord_columns("x", n), coord_columns("alpha", n),
                          std::vector<std::string>{"estimate", "oracle", "abs_error", "discrepancy"});
    if (have_bound) columns.push_back("certified_bound");
    auto& t = rep.table("cauchy-recover_" + key + ".csv",
                        "D^alpha f(x) from the trapezoid Cauchy rule (Q nodes) against the exact oracle, the "
                        "Q-vs-2Q discrepancy, and the certified restriction bound at the first (m, eps)",
                        columns);
    double max_err = 0.0, min_ratio = std::numeric_limits<double>::infinity();
    json worst_err, worst_bound;
    bool bound_ok = have_bound && q.certified && !shift.diverging;
    for (const auto& x : ctx.cfg.cauchy.points) {
      const TorusSamples samples(model, PolydiscContour(x, ctx.cfg.cauchy.radius, ctx.cfg.cauchy.nodes));
      const double phi_x = ctx.phi(m0, x);
      for (const auto& alpha : alphas) {
        const CauchyResult c = cauchy_derivative(samples, alpha);
        const double oracle = model.derivative(alpha, x);
        const double err = std::abs(c.value.real() - oracle);
        std::vector<double> row(x);
        row.insert(row.end(), alpha.begin(), alpha.end());
        row.insert(row.end(), {c.value.real(), oracle, err, c.discrepancy});
        if (err > max_err || worst_err.is_null()) {
          max_err = std::max(max_err, err);
          worst_err = {{"x", vec(x)}, {"alpha", ivec(alpha)}, {"abs_error", num(err)}};
        }
        if (have_bound) {
          const double bound = restriction_bound(q.value, k, W, ctx.M, alpha, phi_x).certified;
          row.push_back(bound);
          const double ratio = oracle == 0.0 ? std::numeric_limits<double>::infinity() : bound / std::abs(oracle);
          if (!(std::abs(oracle) <= bound)) bound_ok = false;
          if (ratio < min_ratio) {
            min_ratio = ratio;
            worst_bound = {{"x", vec(x)}, {"alpha", ivec(alpha)}, {"oracle", num(oracle)}, {"bound", num(bound)}};
          }
        }
        t.add(std::move(row));
      }
    }
    rep.check(s + "/accuracy[" + key + "]", max_err <= ctx.cfg.tolerances.cauchy,
              max_err > 0.0 ? ctx.cfg.tolerances.cauchy / max_err : kNaN, {}, worst_err);
    std::vector<std::string> flags;
    if (!have_bound) flags.push_back("no growth envelope");
    if (have_bound && !q.certified) flags.push_back("q_upper range-limited");
    if (shift.diverging) flags.push_back("shift bound diverging");
    rep.check(s + "/bound[" + key + "]", bound_ok, min_ratio, flags,
              worst_bound.is_null() ? json::object() : worst_bound, {{"q_upper", num(q.value)}});
  }
}

void cmd_roundtrip(Context& ctx, Report& rep) {
  const std::string s = "roundtrip";
  const int n = ctx.n;
  const auto& spec = ctx.cfg.roundtrip;
  for (std::size_t i = 0; i < ctx.models.size(); ++i) {
    const auto& model = ctx.models[i];
    const std::string& key = ctx.keys[i];
    RoundtripCheck r;
    try {
      r = roundtrip(model, model, spec.points, spec.alpha_max, CauchySettings{spec.radius, spec.nodes}, spec.tail_tol,
                    spec.tol, spec.z);
    } catch (const std::exception& e) {
      rep.check(s + "/roundtrip[" + key + "]", false, kNaN, {e.what()});
      continue;
    }
    auto& t = rep.table("roundtrip_" + key + ".csv",
                        "D^alpha f(x) recovered by the Cauchy rule from the extension T f, against the exact oracle",
                        concat(coord_columns("x", n), coord_columns("alpha", n),
                               std::vector<std::string>{"recovered", "exact", "abs_error"}));
    for (const auto& c : r.cases) {
      std::vector<double> row(c.x);
      row.insert(row.end(), c.alpha.begin(), c.alpha.end());
      row.insert(row.end(), {c.recovered, c.exact, c.error});
      t.add(std::move(row));
    }
    rep.check(s + "/roundtrip[" + key + "]", r.pass, r.max_forward_error > 0.0 ? spec.tol / r.max_forward_error : kNaN,
              {},
              {{"x", vec(r.worst.x)}, {"alpha", ivec(r.worst.alpha)}, {"abs_error", num(r.max_forward_error)},
               {"reverse_excess", num(r.max_reverse_excess)},
               {"reverse_z", r.worst_z.empty() ? json(nullptr) : zjson(r.worst_z)}},
              {{"reverse_points", r.reverse_points}});
  }
}

void cmd_backward(Context& ctx, Report& rep) {
  const std::string s = "backward";
  if (!prepare_weight(ctx, rep, s)) return;
  const auto& W = *ctx.W;
  BackwardSettings settings;
  settings.shift_R = ctx.cfg.grids.R;
  settings.shift_x = ctx.x_grid();
  settings.sampling = ctx.sampling();
  settings.cauchy = CauchySettings{ctx.cfg.cauchy.radius, ctx.cfg.cauchy.nodes};
  settings.alpha_max = ctx.cfg.alpha_max;

  auto& stab = rep.table("backward_stability.csv",
                         "b_{m,eps} at delta = eps on the configured grids and on grids refined by midpoint "
                         "insertion, with the relative change",
                         {"m", "eps", "b", "b_refined", "relative_change"});
  const auto refined_R = refine(ctx.cfg.grids.R);
  const TensorGrid refined_x(refine(ctx.cfg.grids.x), ctx.n);
  for (int m : ctx.cfg.m) {
    for (double eps : ctx.cfg.eps) {
      const ShiftBound b = shift_bound(ctx.phi, W, m, eps, settings.shift_R, settings.shift_x, settings.sampling);
      const ShiftBound b2 = shift_bound(ctx.phi, W, m, eps, refined_R, refined_x, settings.sampling);
      const double rel = std::abs(b2.b - b.b) / std::max(std::abs(b2.b), 1e-300);
      const double change = b2.b == b.b ? 0.0 : rel;
      stab.add({double(m), eps, b.b, b2.b, change});
      rep.check(s + "/b_stability[m=" + std::to_string(m) + ",eps=" + fmt(eps) + "]",
                change < ctx.cfg.tolerances.stability && !b.diverging && !b2.diverging,
                ctx.cfg.tolerances.stability - change, b.diverging || b2.diverging ? std::vector<std::string>{"diverging"}
                                                                                 : std::vector<std::string>{},
                {{"b", num(b.b)}, {"b_refined", num(b2.b)}});
    }
  }

  auto& t = rep.table("backward.csv",
                      "backward continuity per model index and (m, eps): b_{m,eps}, c_m, d_{m,eps}, analytic "
                      "q_{m+1,eps} upper bound, recovered p_{m, c_m t2 eps}, bound t1 e^d q_upper, slack",
                      {"model", "m", "eps", "b", "c_m", "d", "q_upper", "p_hat", "bound", "slack"});
  for (std::size_t i = 0; i < ctx.models.size(); ++i) {
    const auto& model = ctx.models[i];
    const std::string& key = ctx.keys[i];
    for (int m : ctx.cfg.m) {
      for (double eps : ctx.cfg.eps) {
        const BackwardCheck b =
            backward_continuity_check(model, ctx.M, W, ctx.phi, m, eps, ctx.x_grid(), settings, ctx.cfg.threads);
        std::vector<std::string> flags;
        if (!b.q_upper.certified) flags.push_back("q_upper not certified");
        if (b.shift.diverging) flags.push_back("shift bound diverging");
        if (b.p_hat.boundary_flag) flags.push_back("p estimate on grid boundary");
        if (b.p_hat.order_flag) flags.push_back("p estimate at alpha_max");
        if (std::isfinite(b.bound) && std::isfinite(b.slack)) {
          t.add({double(i), double(m), eps, b.shift.b, b.constants.c_m, b.constants.d, b.q_upper.value, b.p_hat.value,
                 b.bound, b.slack});
        }
        rep.check(s + "/continuity[" + key + ",m=" + std::to_string(m) + ",eps=" + fmt(eps) + "]", b.pass, b.slack,
                  flags, {{"x", vec(b.p_hat.arg_x)}, {"alpha", ivec(b.p_hat.arg_alpha)}, {"p_hat", num(b.p_hat.value)}},
                  {{"bound", num(b.bound)}, {"q_upper", num(b.q_upper.value)}, {"b", num(b.shift.b)},
                   {"c_m", num(b.constants.c_m)}, {"d", num(b.constants.d)}});
      }
    }
  }
}

using Command = void (*)(Context&, Report&);

const std::vector<std::pair<std::string, Command>>& table_of_commands() {
  static const std::vector<std::pair<std::string, Command>> t = {
      {"verify-sequences", cmd_verify}, {"weight-table", cmd_weight_table}, {"lemma-scan", cmd_lemma_scan},
      {"phi-check", cmd_phi_check},     {"extend-eval", cmd_extend_eval},   {"cauchy-recover", cmd_cauchy},
      {"roundtrip", cmd_roundtrip},
  };
  return t;
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : table_of_commands()) out.push_back(name);
    out.push_back("report");
    return out;
  }();
  return names;
}

int run(const std::string& command, const RunConfig& config, std::ostream& log) {
  const auto& table = table_of_commands();
  const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == command; });
  if (it == table.end() && command != "report") {
    log << "unknown command '" << command << "'\n";
    return kExitConfigError;
  }
  Report rep;
  try {
    Context ctx(config);
    auto guarded = [&](const std::string& name, Command fn) {
      try {
        fn(ctx, rep);
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception& e) {
        rep.check(name + "/error", false, kNaN, {e.what()});
      }
    };
    if (command == "report") {
      for (const auto& [name, fn] : table) guarded(name, fn);
      guarded("backward", cmd_backward);
    } else {
      guarded(it->first, it->second);
    }
    rep.write(config.out, command, config);
  } catch (const ConfigError& e) {
    log << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }
  for (const auto& line : rep.lines()) log << line << '\n';
  log << (rep.pass() ? "all checks passed" : "some checks failed") << '\n';
  return rep.pass() ? kExitPass : kExitCheckFailed;
}

}  // namespace holext
