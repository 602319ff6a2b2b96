#include "subcheck/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace subcheck {

using Json = nlohmann::ordered_json;

const char* to_string(Command c) {
  switch (c) {
    case Command::Classify: return "classify";
    case Command::Check: return "check";
    case Command::CorpusVerify: return "corpus-verify";
  }
  return "?";
}

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Pass: return "pass";
    case RunStatus::Fail: return "fail";
    case RunStatus::Inconsistent: return "inconsistent";
  }
  return "?";
}

void validate(const RunConfig& config) {
  if (config.points && *config.points < 1) throw std::invalid_argument("--points must be at least 1");
  if (config.tolerance && !(*config.tolerance > 0.0)) throw std::invalid_argument("--tol must be positive");
  for (const auto& id : config.only)
    if (!find_check(id)) throw std::invalid_argument("unknown check id '" + id + "'");
}

std::vector<std::string> resolve_entry_paths(const std::vector<std::string>& paths) {
  namespace fs = std::filesystem;
  std::vector<std::string> out;
  const std::vector<std::string> roots = paths.empty() ? std::vector<std::string>{SUBCHECK_CORPUS_DIR} : paths;
  for (const auto& p : roots) {
    if (fs::is_directory(p)) {
      for (const auto& f : corpus_files(p)) out.push_back(f.string());
    } else {
      out.push_back(p);
    }
  }
  return out;
}

int ReportDocument::mismatches() const {
  int n = 0;
  for (const auto& in : instances) n += static_cast<int>(in.classification.mismatches.size());
  return n;
}

int ReportDocument::failed_checks() const {
  int n = 0;
  for (const auto& in : instances) {
    if (!in.suite) continue;
    for (const auto& c : in.suite->checks)
      if (c.verdict == CheckVerdict::Fail && !c.exploratory) ++n;
  }
  return n;
}

int ReportDocument::consistency_failures() const {
  int n = 0;
  for (const auto& in : instances) {
    if (!in.suite) continue;
    for (const auto& c : in.suite->checks)
      if (c.consistency_failure) ++n;
  }
  return n;
}

std::vector<std::string> ReportDocument::noise_limited() const {
  std::vector<std::string> out;
  for (const auto& in : instances) {
    if (!in.suite) continue;
    for (const auto& c : in.suite->checks)
      if (c.noise_limited) out.push_back(in.label + ": " + c.id);
  }
  return out;
}

RunStatus ReportDocument::status() const {
  if (consistency_failures() > 0) return RunStatus::Inconsistent;
  if (mismatches() > 0 || failed_checks() > 0) return RunStatus::Fail;
  return RunStatus::Pass;
}

int ReportDocument::exit_code() const {
  switch (status()) {
    case RunStatus::Pass: return 0;
    case RunStatus::Fail: return 1;
    case RunStatus::Inconsistent: return 3;
  }
  return 1;
}

namespace {

ClassifySummary classify_points(const EntryInstance& in, const std::vector<Eigen::VectorXd>& points,
                                bool has_expected) {
  ClassifySummary s;
  s.has_expected = has_expected;
  std::vector<double> thetas;
  bool consistent = true;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const SemiSlantAnalysis a = split_d1_d2(in.map, points[i]);
    s.point_verdicts.push_back(to_string(a.verdict));
    if (i == 0) {
      s.verdict = a.verdict;
      s.d1 = a.d1.size();
      s.d2 = a.d2.size();
      s.kernel_dim = a.kernel_dim();
    } else if (a.verdict != *s.verdict || a.d1.size() != s.d1) {
      consistent = false;
    }
    if (a.theta) thetas.push_back(*a.theta);
    s.submersion_residual = std::max(s.submersion_residual, a.submersion_residual);
    if (!has_expected) continue;
    const ExpectationDiff d = expected_vs_actual(in.expected, a);
    for (const auto& m : d.mismatches) s.mismatches.push_back("point " + std::to_string(i) + ": " + m);
    for (const auto& n : d.annotations)
      if (std::find(s.annotations.begin(), s.annotations.end(), n) == s.annotations.end()) s.annotations.push_back(n);
  }
  if (!consistent) s.verdict.reset();
  if (!thetas.empty()) {
    double sum = 0.0;
    for (double t : thetas) sum += t;
    s.theta = sum / static_cast<double>(thetas.size());
    const auto [lo, hi] = std::minmax_element(thetas.begin(), thetas.end());
    s.theta_spread = *hi - *lo;
  }
  return s;
}

bool has_expectation(const ExpectedValues& e) {
  return e.verdict || e.d1 || e.d2 || e.theta || e.cos_theta || e.d1_span || e.d2_span;
}

// Each override goes to the entries that declare it; a name no entry declares is an error.
ParamMap overrides_for(const CorpusEntry& e, const ParamMap& all) {
  ParamMap out;
  for (const auto& [k, v] : all)
    for (const auto& [name, values] : e.params)
      if (name == k) out[k] = v;
  return out;
}

}  // namespace

ReportDocument run_command(Command command, const RunConfig& config) {
  validate(config);
  ReportDocument doc;
  doc.command = command;
  doc.config = config;

  std::vector<CorpusEntry> entries;
  for (const auto& p : resolve_entry_paths(config.paths)) entries.push_back(load_entry(p));
  if (entries.empty()) throw CorpusError(config.paths.empty() ? SUBCHECK_CORPUS_DIR : config.paths.front(), "", "no entries");
  for (const auto& [k, v] : config.params) {
    const bool known = std::any_of(entries.begin(), entries.end(), [&](const CorpusEntry& e) {
      return std::any_of(e.params.begin(), e.params.end(), [&](const auto& p) { return p.first == k; });
    });
    if (!known) throw CorpusError(entries.front().path, "params." + k, "no loaded entry declares this parameter");
  }

  for (const auto& e : entries) {
    for (const auto& in : e.instances(overrides_for(e, config.params))) {
      InstanceReport r;
      r.entry = e.name;
      r.path = e.path;
      r.label = in.label;
      r.params = in.params;
      r.expected = in.expected;
      const auto points = in.sample_points(config.seed, config.points.value_or(in.sampling.points));
      r.points = static_cast<int>(points.size());
      r.classification = classify_points(in, points, has_expectation(in.expected));
      if (command != Command::Classify) {
        SuitePlan plan;
        plan.points = points;
        plan.seed = config.seed;
        plan.tolerance = config.tolerance;
        plan.only = config.only;
        plan.threads = config.threads;
        r.suite = run_suite(in.map, plan);
      }
      doc.instances.push_back(std::move(r));
    }
  }
  return doc;
}

namespace {

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

template <class T>
Json optional_json(const std::optional<T>& v) {
  if (!v) return nullptr;
  if constexpr (std::is_same_v<T, double>) return number(*v);
  else return Json(*v);
}

Json span_json(const std::optional<Eigen::MatrixXd>& m) {
  if (!m) return nullptr;
  Json out = Json::array();
  for (Eigen::Index c = 0; c < m->cols(); ++c) {
    Json v = Json::array();
    for (Eigen::Index r = 0; r < m->rows(); ++r) v.push_back(number((*m)(r, c)));
    out.push_back(std::move(v));
  }
  return out;
}

Json expected_json(const ExpectedValues& e) {
  return Json{{"verdict", e.verdict ? Json(to_string(*e.verdict)) : Json(nullptr)},
              {"d1", optional_json(e.d1)},
              {"d2", optional_json(e.d2)},
              {"theta", optional_json(e.theta)},
              {"cos_theta", optional_json(e.cos_theta)},
              {"d1_span", span_json(e.d1_span)},
              {"d2_span", span_json(e.d2_span)}};
}

Json catalog_json() {
  Json out = Json::array();
  for (const auto& s : check_catalog())
    out.push_back(Json{{"id", s.id},
                       {"kind", to_string(s.kind)},
                       {"anchor", s.statement},
                       {"hypothesis", s.hypothesis},
                       {"tolerance", s.tolerance},
                       {"kahler", s.kahler},
                       {"exploratory", s.exploratory}});
  return out;
}

int worst_point(const std::vector<double>& v) {
  if (v.empty()) return -1;
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

Json check_json(const CheckResult& c) {
  const CheckSpec& s = *find_check(c.id);
  return Json{{"id", c.id},
              {"kind", to_string(c.kind)},
              {"verdict", to_string(c.verdict)},
              {"anchor", s.statement},
              {"hypothesis", s.hypothesis},
              {"hypothesis_met", c.hypothesis_met},
              {"tolerance", c.tolerance},
              {"max_residual", number(c.max_residual)},
              {"max_direct", optional_json(c.max_direct)},
              {"worst_point", worst_point(c.per_point)},
              {"disagreements", c.disagreements},
              {"consistency_failure", c.consistency_failure},
              {"noise_limited", c.noise_limited},
              {"exploratory", c.exploratory},
              {"property_holds", optional_json(c.property_holds)},
              {"note", c.note}};
}

// Evaluated checks ranked by residual relative to tolerance.
std::vector<const CheckResult*> worst_checks(const SuiteReport& r, std::size_t count) {
  std::vector<const CheckResult*> out;
  for (const auto& c : r.checks)
    if (c.verdict == CheckVerdict::Pass || c.verdict == CheckVerdict::Fail) out.push_back(&c);
  std::stable_sort(out.begin(), out.end(), [](const CheckResult* a, const CheckResult* b) {
    return a->max_residual / a->tolerance > b->max_residual / b->tolerance;
  });
  if (out.size() > count) out.resize(count);
  return out;
}

Json instance_json(const InstanceReport& in) {
  const ClassifySummary& s = in.classification;
  Json params = Json::object();
  for (const auto& [k, v] : in.params) params[k] = number(v);
  Json cls{{"verdict", s.verdict ? Json(to_string(*s.verdict)) : Json(nullptr)},
           {"point_verdicts", s.point_verdicts},
           {"theta", optional_json(s.theta)},
           {"cos_theta", s.theta ? number(std::cos(*s.theta)) : Json(nullptr)},
           {"theta_spread", number(s.theta_spread)},
           {"d1", s.d1},
           {"d2", s.d2},
           {"kernel_dim", s.kernel_dim},
           {"submersion_residual", number(s.submersion_residual)},
           {"expected", s.has_expected ? expected_json(in.expected) : Json(nullptr)},
           {"mismatches", s.mismatches},
           {"annotations", s.annotations}};
  Json out{{"entry", in.entry}, {"path", in.path}, {"label", in.label}, {"params", params}, {"points", in.points},
           {"classification", cls}};
  if (!in.suite) {
    out["suite"] = nullptr;
    out["worst_residuals"] = Json::array();
    out["status"] = s.mismatches.empty() ? "pass" : "fail";
    return out;
  }
  const SuiteGates& g = in.suite->gates;
  Json checks = Json::array();
  bool failed = !s.mismatches.empty();
  bool inconsistent = false;
  for (const auto& c : in.suite->checks) {
    checks.push_back(check_json(c));
    failed |= c.verdict == CheckVerdict::Fail && !c.exploratory;
    inconsistent |= c.consistency_failure;
  }
  out["suite"] = Json{{"gates",
                       {{"kahler_defect", number(g.kahler_defect)},
                        {"kahler", g.kahler},
                        {"consistent_verdict", g.consistent_verdict},
                        {"semi_slant_family", g.semi_slant_family},
                        {"umbilical_residual", number(g.umbilical)},
                        {"umbilical", g.umbilical_met},
                        {"d1_integrable", optional_json(g.d1_integrable)}}},
                      {"checks", checks}};
  Json worst = Json::array();
  for (const CheckResult* c : worst_checks(*in.suite, 3))
    worst.push_back(Json{{"id", c->id}, {"max_residual", number(c->max_residual)}, {"tolerance", c->tolerance}});
  out["worst_residuals"] = worst;
  out["status"] = inconsistent ? "inconsistent" : failed ? "fail" : "pass";
  return out;
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string sci(double x) { return std::isfinite(x) ? fmt("%.3e", x) : "nan"; }

}  // namespace

std::string render_json(const ReportDocument& doc) {
  const RunConfig& c = doc.config;
  Json params = Json::object();
  for (const auto& [k, v] : c.params) params[k] = number(v);
  Json config{{"paths", c.paths},
              {"seed", c.seed},
              {"points", optional_json(c.points)},
              {"tolerance", optional_json(c.tolerance)},
              {"only", Json(std::vector<std::string>(c.only.begin(), c.only.end()))},
              {"params", params},
              {"threads", c.threads}};
  Json entries = Json::array();
  for (const auto& in : doc.instances) entries.push_back(instance_json(in));
  Json out{{"schema_version", "1"},
           {"tool", {{"name", "subcheck"}, {"version", SUBCHECK_VERSION}}},
           {"command", to_string(doc.command)},
           {"config", config},
           {"catalog", doc.command == Command::Classify ? Json::array() : catalog_json()},
           {"entries", entries},
           {"noise_limited", doc.noise_limited()},
           {"summary",
            {{"instances", doc.instances.size()},
             {"mismatches", doc.mismatches()},
             {"failed_checks", doc.failed_checks()},
             {"consistency_failures", doc.consistency_failures()}}},
           {"status", to_string(doc.status())},
           {"exit_code", doc.exit_code()}};
  return out.dump(2) + "\n";
}

std::string render_text(const ReportDocument& doc) {
  std::ostringstream os;
  char line[512];
  os << "subcheck " << SUBCHECK_VERSION << "  " << to_string(doc.command) << "  seed " << doc.config.seed << "\n\n";
  std::snprintf(line, sizeof line, "%-40s %-15s %12s %4s %4s %11s %7s  %s\n", "entry", "verdict", "theta", "d1", "d2",
                "submersion", "points", "expected");
  os << line;
  for (const auto& in : doc.instances) {
    const ClassifySummary& s = in.classification;
    const std::string expected = !s.has_expected ? "-" : s.mismatches.empty() ? "ok" : "MISMATCH";
    std::snprintf(line, sizeof line, "%-40s %-15s %12s %4d %4d %11s %7d  %s\n", in.label.c_str(),
                  s.verdict ? to_string(*s.verdict) : "mixed", s.theta ? fmt("%.9f", *s.theta).c_str() : "-", s.d1,
                  s.d2, sci(s.submersion_residual).c_str(), in.points, expected.c_str());
    os << line;
    for (const auto& a : s.annotations) os << "    note: " << a << "\n";
    for (const auto& m : s.mismatches) os << "    mismatch: " << m << "\n";
  }
  for (const auto& in : doc.instances) {
    if (!in.suite) continue;
    os << "\n" << in.label << "  (kahler defect " << sci(in.suite->gates.kahler_defect) << ")\n";
    std::snprintf(line, sizeof line, "  %-28s %-8s %11s %11s %9s  %s\n", "check", "verdict", "residual", "direct",
                  "tol", "flags");
    os << line;
    for (const auto& c : in.suite->checks) {
      std::string flags;
      if (c.exploratory) flags += "exploratory ";
      if (c.noise_limited) flags += "noise-limited ";
      if (c.consistency_failure) flags += "INCONSISTENT ";
      if (c.disagreements > 0) flags += "disagree=" + std::to_string(c.disagreements) + " ";
      if (!c.note.empty()) flags += c.note;
      std::snprintf(line, sizeof line, "  %-28s %-8s %11s %11s %9s  %s\n", c.id.c_str(), to_string(c.verdict),
                    sci(c.max_residual).c_str(), c.max_direct ? sci(*c.max_direct).c_str() : "-",
                    fmt("%.1e", c.tolerance).c_str(), flags.c_str());
      os << line;
    }
  }
  const auto noisy = doc.noise_limited();
  if (!noisy.empty()) {
    os << "\nnoise-limited at the requested tolerance:\n";
    for (const auto& n : noisy) os << "  " << n << "\n";
  } else if (doc.config.tolerance) {
    os << "\nnoise-limited at the requested tolerance: none\n";
  }
  os << "\n" << doc.instances.size() << " instances, " << doc.mismatches() << " mismatches, " << doc.failed_checks()
     << " failed checks, " << doc.consistency_failures() << " consistency failures\n";
  os << "status: " << to_string(doc.status()) << " (exit " << doc.exit_code() << ")\n";
  return os.str();
}

}  // namespace subcheck
