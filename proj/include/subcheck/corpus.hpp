#pragma once

// Declarative map definitions with expected classification results.
// File format: TOML, documented in docs/corpus-format.md.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "subcheck/expr.hpp"
#include "subcheck/submersion.hpp"

namespace subcheck {

/// Load or validation failure; `field` is a dotted path such as "expected.d1".
class CorpusError : public std::runtime_error {
 public:
  CorpusError(std::string path, std::string field, const std::string& message);
  const std::string& path() const { return path_; }
  const std::string& field() const { return field_; }

 private:
  std::string path_;
  std::string field_;
};

struct MetricSpec {
  std::string kind = "euclidean";  // euclidean | product | warped_product
  int n1 = 0;
  int n2 = 0;
  std::string warp;  // warped_product only
};

struct JSpec {
  std::string kind = "standard";  // standard | product
  std::vector<int> blocks;        // product only
};

struct ExpectedSpec {
  std::optional<Verdict> verdict;
  std::optional<int> d1;
  std::optional<int> d2;
  std::string theta;      // expression in the parameters
  std::string cos_theta;  // alternative to theta
  std::vector<std::vector<std::string>> d1_span;  // basis vectors, entries are expressions
  std::vector<std::vector<std::string>> d2_span;
};

struct SamplingSpec {
  int points = 20;
  double lo = -1.0;
  double hi = 1.0;
  std::map<int, std::pair<double, double>> bounds;  // 1-based variable -> interval
};

struct ExpectedValues {
  std::optional<Verdict> verdict;
  std::optional<int> d1;
  std::optional<int> d2;
  std::optional<double> theta;
  std::optional<double> cos_theta;
  std::optional<Eigen::MatrixXd> d1_span;
  std::optional<Eigen::MatrixXd> d2_span;
};

struct EntryInstance {
  std::string label;  // name, or name[k=v,...] for grid instances
  ParamMap params;
  SubmersionMap map;
  ExpectedValues expected;
  SamplingSpec sampling;

  /// Deterministic points from the sampling box.
  std::vector<Eigen::VectorXd> sample_points(std::uint64_t seed, int count) const;
};

struct CorpusEntry {
  std::string name;
  std::string description;
  std::string path;
  int source_dim = 0;
  int target_dim = 0;
  std::vector<std::string> components;
  MetricSpec metric;
  JSpec j;
  std::vector<std::pair<std::string, std::vector<double>>> params;  // sorted by name
  ExpectedSpec expected;
  SamplingSpec sampling;

  /// Expands the parameter grid (cartesian product, name order).
  /// `overrides` replace grid axes; unknown names are rejected.
  std::vector<EntryInstance> instances(const ParamMap& overrides = {}) const;
};

CorpusEntry load_entry(const std::filesystem::path& path);
CorpusEntry parse_entry(const std::string& text, const std::string& path = "<string>");

/// Every *.toml under `dir`, sorted by file name.
std::vector<std::filesystem::path> corpus_files(const std::filesystem::path& dir);

struct ExpectationDiff {
  std::vector<std::string> mismatches;
  std::vector<std::string> annotations;  // boundary members of the semi-slant family
  bool ok() const { return mismatches.empty(); }
};

/// Compares expected verdict, dims, angle and spans with an analysis. Angle
/// tolerance 1e-8. An expected semi-slant map whose angle sits at 0 or π/2
/// accepts the degenerate verdict (invariant, semi-invariant, ...) with an
/// annotation.
ExpectationDiff expected_vs_actual(const ExpectedValues& expected, const SemiSlantAnalysis& a,
                                   const SplitTolerances& tol = {});

inline constexpr double kAngleTolerance = 1e-8;

}  // namespace subcheck
