#pragma once

// Report assembly for the classify / check / corpus-verify commands.
// JSON rendering is the contract (schema/report.schema.json); text is a
// fixed-width summary table.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "subcheck/corpus.hpp"
#include "subcheck/theorems.hpp"

namespace subcheck {

enum class Command { Classify, Check, CorpusVerify };
const char* to_string(Command c);

enum class OutputFormat { Text, Json };

struct RunConfig {
  std::vector<std::string> paths;  // files or directories; empty = bundled corpus
  std::uint64_t seed = 42;
  std::optional<int> points;       // overrides each entry's sampling.points
  std::optional<double> tolerance; // overrides every check tolerance
  std::set<std::string> only;
  ParamMap params;
  OutputFormat format = OutputFormat::Text;
  int threads = 1;
};

/// Throws std::invalid_argument for points < 1, tolerance <= 0, unknown check ids.
void validate(const RunConfig& config);

struct ClassifySummary {
  std::optional<Verdict> verdict;  // unset when the points disagree
  std::vector<std::string> point_verdicts;
  std::optional<double> theta;     // mean over points
  double theta_spread = 0.0;       // max - min over points
  int d1 = 0;
  int d2 = 0;
  int kernel_dim = 0;
  double submersion_residual = 0.0;  // max over points
  bool has_expected = false;
  std::vector<std::string> mismatches;
  std::vector<std::string> annotations;
};

struct InstanceReport {
  std::string entry;
  std::string path;
  std::string label;
  ParamMap params;
  int points = 0;
  ExpectedValues expected;
  ClassifySummary classification;
  std::optional<SuiteReport> suite;
};

enum class RunStatus { Pass, Fail, Inconsistent };
const char* to_string(RunStatus s);

struct ReportDocument {
  Command command = Command::Classify;
  RunConfig config;
  std::vector<InstanceReport> instances;

  int mismatches() const;
  int failed_checks() const;  // non-exploratory Fail verdicts
  int consistency_failures() const;
  std::vector<std::string> noise_limited() const;  // "label: check id"
  RunStatus status() const;
  int exit_code() const;  // 0 pass, 1 fail, 3 inconsistent
};

/// Loads every entry named by the config and runs the command. Load errors
/// surface as CorpusError.
ReportDocument run_command(Command command, const RunConfig& config);

/// Deterministic: identical config and tool version give identical bytes.
std::string render_json(const ReportDocument& doc);
std::string render_text(const ReportDocument& doc);

/// Paths of the entry files named by `paths` (directories expand to their *.toml).
std::vector<std::string> resolve_entry_paths(const std::vector<std::string>& paths);

}  // namespace subcheck
