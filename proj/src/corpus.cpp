#include "subcheck/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "subcheck/theorems.hpp"

namespace subcheck {

CorpusError::CorpusError(std::string path, std::string field, const std::string& message)
    : std::runtime_error(path + (field.empty() ? "" : ": " + field) + ": " + message),
      path_(std::move(path)),
      field_(std::move(field)) {}

namespace {

class Reader {
 public:
  explicit Reader(std::string path) : path_(std::move(path)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& message) const {
    throw CorpusError(path_, field, message);
  }

  void allow_keys(const toml::table& t, const std::string& prefix, std::initializer_list<std::string_view> keys) const {
    for (const auto& [k, v] : t) {
      if (std::find(keys.begin(), keys.end(), k.str()) == keys.end())
        fail(join(prefix, std::string(k.str())), "unknown key");
    }
  }

  const toml::table* table(const toml::table& t, const std::string& key, bool required) const {
    const toml::node* n = t.get(key);
    if (!n) {
      if (required) fail(key, "missing section");
      return nullptr;
    }
    if (!n->is_table()) fail(key, "expected a table");
    return n->as_table();
  }

  std::string string(const toml::table& t, const std::string& prefix, const std::string& key,
                     std::optional<std::string> fallback = std::nullopt) const {
    const toml::node* n = t.get(key);
    if (!n) {
      if (fallback) return *fallback;
      fail(join(prefix, key), "missing");
    }
    if (!n->is_string()) fail(join(prefix, key), "expected a string");
    return std::string(n->as_string()->get());
  }

  std::optional<std::int64_t> integer(const toml::table& t, const std::string& prefix, const std::string& key,
                                      bool required) const {
    const toml::node* n = t.get(key);
    if (!n) {
      if (required) fail(join(prefix, key), "missing");
      return std::nullopt;
    }
    if (!n->is_integer()) fail(join(prefix, key), "expected an integer");
    return n->as_integer()->get();
  }

  // A number, or a string holding a constant expression such as "pi/6".
  double constant(const toml::node& n, const std::string& field) const {
    if (n.is_integer()) return static_cast<double>(n.as_integer()->get());
    if (n.is_floating_point()) return n.as_floating_point()->get();
    if (n.is_string()) {
      try {
        return parse(n.as_string()->get(), 0).eval(std::vector<double>{});
      } catch (const std::exception& e) {
        fail(field, e.what());
      }
    }
    fail(field, "expected a number or a constant expression");
  }

  double number(const toml::table& t, const std::string& prefix, const std::string& key) const {
    const toml::node* n = t.get(key);
    if (!n) fail(join(prefix, key), "missing");
    return constant(*n, join(prefix, key));
  }

  std::pair<double, double> interval(const toml::node& n, const std::string& field) const {
    const toml::array* a = n.as_array();
    if (!a || a->size() != 2) fail(field, "expected [lo, hi]");
    const double lo = constant(*a->get(0), field + "[0]");
    const double hi = constant(*a->get(1), field + "[1]");
    if (!(lo < hi)) fail(field, "empty interval");
    return {lo, hi};
  }

  std::vector<std::vector<std::string>> span(const toml::table& t, const std::string& prefix,
                                             const std::string& key) const {
    std::vector<std::vector<std::string>> out;
    const toml::node* n = t.get(key);
    if (!n) return out;
    const std::string field = join(prefix, key);
    const toml::array* rows = n->as_array();
    if (!rows) fail(field, "expected an array of vectors");
    for (std::size_t i = 0; i < rows->size(); ++i) {
      const toml::array* row = rows->get(i)->as_array();
      const std::string rf = field + "[" + std::to_string(i) + "]";
      if (!row) fail(rf, "expected a vector");
      std::vector<std::string> v;
      for (std::size_t j = 0; j < row->size(); ++j) {
        const toml::node& e = *row->get(j);
        if (e.is_string()) v.emplace_back(e.as_string()->get());
        else if (e.is_integer()) v.push_back(std::to_string(e.as_integer()->get()));
        else if (e.is_floating_point()) v.push_back(fmt(e.as_floating_point()->get()));
        else fail(rf + "[" + std::to_string(j) + "]", "expected a number or an expression");
      }
      out.push_back(std::move(v));
    }
    return out;
  }

  static std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
  }

  static std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  }

 private:
  std::string path_;
};

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

bool reserved(const std::string& s) {
  static const std::set<std::string> words{"pi", "sin", "cos", "tan", "exp", "log", "sqrt", "abs"};
  if (words.count(s)) return true;
  if (s.size() >= 2 && s[0] == 'x') {
    const std::size_t start = s[1] == '_' ? 2 : 1;
    return start < s.size() && std::all_of(s.begin() + static_cast<long>(start), s.end(), ::isdigit);
  }
  return false;
}

std::string param_label(const std::string& name, const ParamMap& params) {
  if (params.empty()) return name;
  std::string out = name + "[";
  bool first = true;
  for (const auto& [k, v] : params) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    out += (first ? "" : ",") + k + "=" + buf;
    first = false;
  }
  return out + "]";
}

}  // namespace

CorpusEntry parse_entry(const std::string& text, const std::string& path) {
  const Reader r(path);
  toml::table root;
  try {
    root = toml::parse(text, path);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << e.description() << " (line " << e.source().begin.line << ", column " << e.source().begin.column << ")";
    r.fail("", msg.str());
  }
  r.allow_keys(root, "", {"name", "description", "map", "metric", "J", "params", "expected", "sampling"});

  CorpusEntry e;
  e.path = path;
  e.name = r.string(root, "", "name");
  if (e.name.empty()) r.fail("name", "must not be empty");
  e.description = r.string(root, "", "description", std::string());

  // [params] first: expressions elsewhere may refer to them.
  std::set<std::string> names;
  if (const toml::table* t = r.table(root, "params", false)) {
    for (const auto& [k, v] : *t) {
      const std::string key(k.str());
      const std::string field = "params." + key;
      if (!is_identifier(key) || reserved(key)) r.fail(field, "not a usable parameter name");
      std::vector<double> values;
      if (const toml::array* a = v.as_array()) {
        if (a->empty()) r.fail(field, "empty grid");
        for (std::size_t i = 0; i < a->size(); ++i) values.push_back(r.constant(*a->get(i), field + "[" + std::to_string(i) + "]"));
      } else {
        values.push_back(r.constant(v, field));
      }
      e.params.emplace_back(key, std::move(values));
      names.insert(key);
    }
    std::sort(e.params.begin(), e.params.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  }

  const toml::table& map = *r.table(root, "map", true);
  r.allow_keys(map, "map", {"source_dim", "target_dim", "components"});
  e.source_dim = static_cast<int>(*r.integer(map, "map", "source_dim", true));
  e.target_dim = static_cast<int>(*r.integer(map, "map", "target_dim", true));
  if (e.source_dim < 1) r.fail("map.source_dim", "must be positive");
  if (e.target_dim < 1 || e.target_dim > e.source_dim) r.fail("map.target_dim", "must be in [1, source_dim]");
  const toml::array* comps = map.get("components") ? map.get("components")->as_array() : nullptr;
  if (!comps) r.fail("map.components", "expected an array of expressions");
  for (std::size_t i = 0; i < comps->size(); ++i) {
    const std::string field = "map.components[" + std::to_string(i) + "]";
    if (!comps->get(i)->is_string()) r.fail(field, "expected a string");
    std::string text(comps->get(i)->as_string()->get());
    try {
      (void)parse(text, e.source_dim, names);
    } catch (const std::exception& ex) {
      r.fail(field, ex.what());
    }
    e.components.push_back(std::move(text));
  }
  if (static_cast<int>(e.components.size()) != e.target_dim)
    r.fail("map.components", "expected " + std::to_string(e.target_dim) + " components, found " +
                                 std::to_string(e.components.size()));

  if (const toml::table* t = r.table(root, "metric", false)) {
    r.allow_keys(*t, "metric", {"kind", "split", "warp"});
    e.metric.kind = r.string(*t, "metric", "kind");
    if (e.metric.kind == "product" || e.metric.kind == "warped_product") {
      const toml::array* s = t->get("split") ? t->get("split")->as_array() : nullptr;
      if (!s || s->size() != 2 || !s->get(0)->is_integer() || !s->get(1)->is_integer())
        r.fail("metric.split", "expected [n1, n2]");
      e.metric.n1 = static_cast<int>(s->get(0)->as_integer()->get());
      e.metric.n2 = static_cast<int>(s->get(1)->as_integer()->get());
      if (e.metric.n1 < 1 || e.metric.n2 < 1 || e.metric.n1 + e.metric.n2 != e.source_dim)
        r.fail("metric.split", "factor dimensions must be positive and sum to map.source_dim");
    } else if (e.metric.kind != "euclidean") {
      r.fail("metric.kind", "expected euclidean, product or warped_product");
    }
    if (e.metric.kind == "warped_product") {
      e.metric.warp = r.string(*t, "metric", "warp");
      try {
        const Expr w = parse(e.metric.warp, e.source_dim, names);
        if (w.max_variable() > e.metric.n1) r.fail("metric.warp", "warp may only depend on the first factor");
      } catch (const CorpusError&) {
        throw;
      } catch (const std::exception& ex) {
        r.fail("metric.warp", ex.what());
      }
    } else if (t->get("warp")) {
      r.fail("metric.warp", "only allowed for warped_product");
    }
  }

  if (const toml::table* t = r.table(root, "J", false)) {
    r.allow_keys(*t, "J", {"kind", "blocks"});
    e.j.kind = r.string(*t, "J", "kind");
    if (e.j.kind == "product") {
      const toml::array* b = t->get("blocks") ? t->get("blocks")->as_array() : nullptr;
      if (!b || b->empty()) r.fail("J.blocks", "expected an array of even block sizes");
      int total = 0;
      for (std::size_t i = 0; i < b->size(); ++i) {
        if (!b->get(i)->is_integer()) r.fail("J.blocks", "expected integers");
        const int n = static_cast<int>(b->get(i)->as_integer()->get());
        if (n < 2 || n % 2 != 0) r.fail("J.blocks", "block sizes must be even and positive");
        e.j.blocks.push_back(n);
        total += n;
      }
      if (total != e.source_dim) r.fail("J.blocks", "block sizes must sum to map.source_dim");
    } else if (e.j.kind != "standard") {
      r.fail("J.kind", "expected standard or product");
    }
  }
  if (e.source_dim % 2 != 0) r.fail("map.source_dim", "source of an almost complex structure must be even-dimensional");

  if (const toml::table* t = r.table(root, "expected", false)) {
    r.allow_keys(*t, "expected", {"verdict", "d1", "d2", "theta", "cos_theta", "d1_span", "d2_span"});
    if (t->get("verdict")) {
      const std::string v = r.string(*t, "expected", "verdict");
      e.expected.verdict = verdict_from_string(v);
      if (!e.expected.verdict) r.fail("expected.verdict", "unknown verdict '" + v + "'");
    }
    if (auto d = r.integer(*t, "expected", "d1", false)) e.expected.d1 = static_cast<int>(*d);
    if (auto d = r.integer(*t, "expected", "d2", false)) e.expected.d2 = static_cast<int>(*d);
    const int kernel = e.source_dim - e.target_dim;
    if (e.expected.d1 && e.expected.d2 && *e.expected.d1 + *e.expected.d2 != kernel)
      r.fail("expected", "d1 + d2 = " + std::to_string(*e.expected.d1 + *e.expected.d2) +
                             " but the kernel has dimension " + std::to_string(kernel));
    if (e.expected.d1 && (*e.expected.d1 < 0 || *e.expected.d1 > kernel)) r.fail("expected.d1", "out of range");
    if (e.expected.d2 && (*e.expected.d2 < 0 || *e.expected.d2 > kernel)) r.fail("expected.d2", "out of range");
    if (e.expected.d1 && *e.expected.d1 % 2 != 0) r.fail("expected.d1", "a J-invariant subspace is even-dimensional");
    for (const char* key : {"theta", "cos_theta"}) {
      if (!t->get(key)) continue;
      const std::string field = std::string("expected.") + key;
      const toml::node& n = *t->get(key);
      std::string text = n.is_string() ? std::string(n.as_string()->get())
                                       : Reader::fmt(r.constant(n, field));
      try {
        (void)parse(text, 0, names);
      } catch (const std::exception& ex) {
        r.fail(field, ex.what());
      }
      (std::string(key) == "theta" ? e.expected.theta : e.expected.cos_theta) = std::move(text);
    }
    if (!e.expected.theta.empty() && !e.expected.cos_theta.empty())
      r.fail("expected", "give theta or cos_theta, not both");
    e.expected.d1_span = r.span(*t, "expected", "d1_span");
    e.expected.d2_span = r.span(*t, "expected", "d2_span");
    for (const auto& [key, span, dim] : {std::tuple{"d1_span", &e.expected.d1_span, e.expected.d1},
                                         std::tuple{"d2_span", &e.expected.d2_span, e.expected.d2}}) {
      const std::string field = std::string("expected.") + key;
      for (std::size_t i = 0; i < span->size(); ++i) {
        if (static_cast<int>((*span)[i].size()) != e.source_dim)
          r.fail(field + "[" + std::to_string(i) + "]", "expected " + std::to_string(e.source_dim) + " entries");
        for (const auto& s : (*span)[i]) {
          try {
            (void)parse(s, 0, names);
          } catch (const std::exception& ex) {
            r.fail(field + "[" + std::to_string(i) + "]", ex.what());
          }
        }
      }
      if (!span->empty() && dim && static_cast<int>(span->size()) != *dim)
        r.fail(field, "has " + std::to_string(span->size()) + " vectors but the dimension is " + std::to_string(*dim));
    }
  }

  if (const toml::table* t = r.table(root, "sampling", false)) {
    r.allow_keys(*t, "sampling", {"points", "box", "bounds"});
    if (auto p = r.integer(*t, "sampling", "points", false)) {
      if (*p < 1) r.fail("sampling.points", "must be at least 1");
      e.sampling.points = static_cast<int>(*p);
    }
    if (const toml::node* b = t->get("box")) std::tie(e.sampling.lo, e.sampling.hi) = r.interval(*b, "sampling.box");
    if (const toml::node* b = t->get("bounds")) {
      const toml::table* bt = b->as_table();
      if (!bt) r.fail("sampling.bounds", "expected a table of intervals");
      for (const auto& [k, v] : *bt) {
        const std::string key(k.str());
        const std::string field = "sampling.bounds." + key;
        int idx = 0;
        if (!reserved(key) || key.rfind("x", 0) != 0) r.fail(field, "expected a variable name such as x1");
        idx = std::stoi(key.substr(key[1] == '_' ? 2 : 1));
        if (idx < 1 || idx > e.source_dim) r.fail(field, "variable out of range");
        e.sampling.bounds[idx] = r.interval(v, field);
      }
    }
  }
  return e;
}

CorpusEntry load_entry(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError(path.string(), "", "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_entry(ss.str(), path.string());
}

std::vector<std::filesystem::path> corpus_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  if (!std::filesystem::is_directory(dir)) throw CorpusError(dir.string(), "", "not a directory");
  for (const auto& de : std::filesystem::directory_iterator(dir))
    if (de.is_regular_file() && de.path().extension() == ".toml") out.push_back(de.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<EntryInstance> CorpusEntry::instances(const ParamMap& overrides) const {
  auto axes = params;
  for (const auto& [k, v] : overrides) {
    auto it = std::find_if(axes.begin(), axes.end(), [&](const auto& a) { return a.first == k; });
    if (it == axes.end()) throw CorpusError(path, "params." + k, "no such parameter in entry '" + name + "'");
    it->second = {v};
  }
  std::set<std::string> names;
  for (const auto& [k, v] : axes) names.insert(k);

  std::vector<ParamMap> grid{ParamMap{}};
  for (const auto& [k, values] : axes) {
    std::vector<ParamMap> next;
    for (const auto& base : grid)
      for (double v : values) {
        ParamMap m = base;
        m[k] = v;
        next.push_back(std::move(m));
      }
    grid = std::move(next);
  }

  auto constant = [&](const std::string& text, const ParamMap& pm, const std::string& field) {
    try {
      return parse(text, 0, names).eval(std::vector<double>{}, pm);
    } catch (const std::exception& ex) {
      throw CorpusError(path, field, ex.what());
    }
  };
  auto span_matrix = [&](const std::vector<std::vector<std::string>>& span, const ParamMap& pm,
                         const std::string& field) -> std::optional<Eigen::MatrixXd> {
    if (span.empty()) return std::nullopt;
    Eigen::MatrixXd m(source_dim, static_cast<Eigen::Index>(span.size()));
    for (std::size_t c = 0; c < span.size(); ++c)
      for (int i = 0; i < source_dim; ++i)
        m(i, static_cast<Eigen::Index>(c)) = constant(span[c][static_cast<std::size_t>(i)], pm, field);
    return m;
  };

  std::vector<EntryInstance> out;
  for (const ParamMap& pm : grid) {
    std::vector<Expr> exprs;
    for (const auto& c : components) exprs.push_back(parse(c, source_dim, names).bind(pm));
    MetricField g = MetricField::euclidean(source_dim);
    try {
      if (metric.kind == "product") g = MetricField::product(metric.n1, metric.n2);
      if (metric.kind == "warped_product")
        g = MetricField::warped_product(metric.n1, metric.n2, parse(metric.warp, source_dim, names).bind(pm));
    } catch (const std::exception& ex) {
      throw CorpusError(path, "metric", ex.what());
    }
    ComplexStructureField jf = standard_J(source_dim);
    if (j.kind == "product") {
      jf = standard_J(j.blocks.front());
      for (std::size_t i = 1; i < j.blocks.size(); ++i) jf = product_J(jf, standard_J(j.blocks[i]));
    }
    const std::string label = param_label(name, pm);
    std::optional<SubmersionMap> f;
    try {
      f.emplace(std::move(exprs), std::move(g), std::move(jf));
    } catch (const std::exception& ex) {
      throw CorpusError(path, "map", ex.what());
    }
    ExpectedValues ev;
    ev.verdict = expected.verdict;
    ev.d1 = expected.d1;
    ev.d2 = expected.d2;
    if (!expected.theta.empty()) ev.theta = constant(expected.theta, pm, "expected.theta");
    if (!expected.cos_theta.empty()) ev.cos_theta = constant(expected.cos_theta, pm, "expected.cos_theta");
    ev.d1_span = span_matrix(expected.d1_span, pm, "expected.d1_span");
    ev.d2_span = span_matrix(expected.d2_span, pm, "expected.d2_span");
    out.push_back(EntryInstance{label, pm, std::move(*f), std::move(ev), sampling});
  }
  return out;
}

std::vector<Eigen::VectorXd> EntryInstance::sample_points(std::uint64_t seed, int count) const {
  std::mt19937_64 rng(draw_seed(seed, label, 0, 0x706f696e7473ull));
  const int n = map.source_dim();
  std::vector<Eigen::VectorXd> out;
  for (int k = 0; k < count; ++k) {
    Eigen::VectorXd p(n);
    for (int i = 0; i < n; ++i) {
      auto it = sampling.bounds.find(i + 1);
      const auto [lo, hi] = it == sampling.bounds.end() ? std::pair{sampling.lo, sampling.hi} : it->second;
      p[i] = std::uniform_real_distribution<double>(lo, hi)(rng);
    }
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string dims_text(int d1, int d2) { return "(" + std::to_string(d1) + "," + std::to_string(d2) + ")"; }

}  // namespace

ExpectationDiff expected_vs_actual(const ExpectedValues& ex, const SemiSlantAnalysis& a, const SplitTolerances& tol) {
  ExpectationDiff diff;
  const int d1 = a.d1.size();
  const int d2 = a.d2.size();

  // Expected angle as a cosine and as an angle.
  std::optional<double> cos_e = ex.cos_theta;
  std::optional<double> theta_e = ex.theta;
  if (theta_e && !cos_e) cos_e = std::cos(*theta_e);
  if (cos_e && !theta_e) theta_e = std::acos(std::clamp(*cos_e, -1.0, 1.0));

  bool at_zero = false;
  bool at_right = false;
  if (cos_e) {
    at_zero = std::abs(std::abs(*cos_e) - 1.0) < kAngleTolerance;
    at_right = std::abs(*cos_e) < kAngleTolerance;
  }

  std::optional<Verdict> want = ex.verdict;
  std::optional<int> want_d1 = ex.d1;
  std::optional<int> want_d2 = ex.d2;
  std::optional<Eigen::MatrixXd> want_d1_span = ex.d1_span;
  std::optional<Eigen::MatrixXd> want_d2_span = ex.d2_span;
  const bool family = want && (*want == Verdict::SemiSlant || *want == Verdict::Slant);
  if (family && want != a.verdict && (at_zero || at_right)) {
    if (at_zero) {
      // D2 merges into D1
      want = Verdict::Invariant;
      if (want_d1 && want_d2) {
        want_d1 = *want_d1 + *want_d2;
        want_d2 = 0;
      }
      if (want_d1_span && want_d2_span) {
        Eigen::MatrixXd both(want_d1_span->rows(), want_d1_span->cols() + want_d2_span->cols());
        both << *want_d1_span, *want_d2_span;
        want_d1_span = both;
      } else if (want_d2_span) {
        want_d1_span = want_d2_span;
      }
      want_d2_span.reset();
      diff.annotations.push_back("boundary: cos theta = 1, D2 joins D1 and the map is invariant");
    } else {
      const bool no_d1 = want_d1 ? *want_d1 == 0 : *want == Verdict::Slant;
      want = no_d1 ? Verdict::AntiInvariant : Verdict::SemiInvariant;
      diff.annotations.push_back(std::string("boundary: cos theta = 0, D2 is anti-invariant and the map is ") +
                                 to_string(*want));
    }
  }

  if (want && *want != a.verdict)
    diff.mismatches.push_back(std::string("verdict: expected ") + to_string(*want) + ", got " + to_string(a.verdict));
  if ((want_d1 && *want_d1 != d1) || (want_d2 && *want_d2 != d2))
    diff.mismatches.push_back("dims: expected " + dims_text(want_d1.value_or(d1), want_d2.value_or(d2)) + ", got " +
                              dims_text(d1, d2));
  if (cos_e) {
    if (!a.theta) {
      diff.mismatches.push_back("theta: expected " + fmt(*theta_e) + ", got none (generic)");
    } else if (ex.cos_theta) {
      const double c = std::cos(*a.theta);
      if (!(std::abs(c - std::abs(*cos_e)) < kAngleTolerance))
        diff.mismatches.push_back("cos theta: expected " + fmt(std::abs(*cos_e)) + ", got " + fmt(c));
    } else if (!(std::abs(*a.theta - *theta_e) < kAngleTolerance) &&
               !(at_right && a.theta_is_right_angle(tol)) && !(at_zero && *a.theta == 0.0)) {
      diff.mismatches.push_back("theta: expected " + fmt(*theta_e) + ", got " + fmt(*a.theta));
    }
  }
  auto span_check = [&](const char* what, const std::optional<Eigen::MatrixXd>& span, const Frame& fr) {
    if (!span || span->cols() != fr.size() || fr.size() == 0) return;
    const double angle = subspace_angle(a.metric, fr.vectors, *span);
    if (!(angle < kAngleTolerance))
      diff.mismatches.push_back(std::string(what) + ": subspace angle " + fmt(angle) + " to the expected span");
  };
  span_check("D1", want_d1_span, a.d1);
  span_check("D2", want_d2_span, a.d2);
  return diff;
}

}  // namespace subcheck
