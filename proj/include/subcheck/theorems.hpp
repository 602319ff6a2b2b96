#pragma once

// Catalog of residual checks. Each check pairs a hypothesis gate with a
// pointwise condition; biconditional checks also evaluate the geometric side
// directly and require both zero-tests to agree on every draw.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "subcheck/oneill.hpp"
#include "subcheck/submersion.hpp"

namespace subcheck {

enum class CheckVerdict { Pass, Fail, Vacuous, Skipped };
const char* to_string(CheckVerdict v);

enum class CheckKind { Identity, Biconditional, Property };
const char* to_string(CheckKind k);

/// Residuals below this are rounding noise for every pipeline in the suite.
inline constexpr double kNoiseFloor = 1e-12;

struct CheckSpec {
  std::string id;
  std::string statement;   // the condition being checked, as a formula
  std::string hypothesis;  // gate description
  CheckKind kind = CheckKind::Identity;
  double tolerance = 1e-8;
  bool kahler = false;       // needs a Kähler source
  bool curvature = false;    // involves the Gauss-equation curvature route
  bool exploratory = false;  // reported, never counted as a failure
};

const std::vector<CheckSpec>& check_catalog();
const CheckSpec* find_check(const std::string& id);

struct CheckResult {
  std::string id;
  CheckKind kind = CheckKind::Identity;
  CheckVerdict verdict = CheckVerdict::Pass;
  double tolerance = 0.0;
  double max_residual = 0.0;           // condition side
  std::optional<double> max_direct;    // geometric side (biconditional only)
  std::vector<double> per_point;
  std::vector<double> per_point_direct;
  bool hypothesis_met = true;
  std::string note;
  bool exploratory = false;
  bool noise_limited = false;
  int disagreements = 0;               // draws where the two zero-tests differ
  bool consistency_failure = false;    // a disagreement above the noise floor
  std::optional<bool> property_holds;  // biconditional: every direct residual below tolerance
};

struct SuiteGates {
  double kahler_defect = 0.0;
  bool kahler = true;
  bool consistent_verdict = true;
  bool semi_slant_family = true;  // consistent and not generic
  double umbilical = 0.0;
  bool umbilical_met = true;
  std::optional<bool> d1_integrable;
};

struct SuitePlan {
  std::vector<Eigen::VectorXd> points;
  int draws = 2;                      // random field draws per point
  std::uint64_t seed = 42;
  std::optional<double> tolerance;    // overrides every check's tolerance
  std::set<std::string> only;         // empty = all checks
  int threads = 1;
  SplitTolerances split;
};

struct SuiteReport {
  SuiteGates gates;
  std::vector<CheckResult> checks;  // catalog order
};

/// Runs the catalog over the plan's points. Deterministic for a fixed plan,
/// independent of the thread count.
SuiteReport run_suite(const SubmersionMap& f, const SuitePlan& plan);

struct BiconditionalTally {
  int disagreements = 0;
  bool consistency_failure = false;
};

/// Compares the zero-tests of (condition, direct) residual pairs at `tol`.
/// A disagreement with both residuals under kNoiseFloor is not a consistency failure.
BiconditionalTally tally_biconditional(const std::vector<std::pair<double, double>>& draws, double tol);

/// Per-draw seed derived from (seed, check id, point index, salt).
std::uint64_t draw_seed(std::uint64_t seed, const std::string& id, std::size_t point, std::uint64_t salt = 0);

/// Worker count from SUBCHECK_THREADS (hardware concurrency when unset or invalid).
int default_thread_count();

}  // namespace subcheck
