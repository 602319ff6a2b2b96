#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "subcheck/report.hpp"

using namespace subcheck;

namespace {

ParamMap parse_params(const std::vector<std::string>& items) {
  ParamMap out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw std::invalid_argument("--param expects k=v, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    try {
      out[key] = parse(value, 0).eval(std::vector<double>{});
    } catch (const std::exception& e) {
      throw std::invalid_argument("--param " + key + ": " + e.what());
    }
  }
  return out;
}

std::set<std::string> split_ids(const std::vector<std::string>& items) {
  std::set<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string id;
    while (std::getline(ss, id, ','))
      if (!id.empty()) out.insert(id);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verifier for Riemannian submersions from almost Hermitian manifolds"};
  app.set_version_flag("--version", std::string("subcheck ") + SUBCHECK_VERSION);
  app.require_subcommand(1);

  std::vector<std::string> paths;
  std::uint64_t seed = 42;
  int points = 0;
  double tol = 0.0;
  std::vector<std::string> only;
  std::vector<std::string> params;
  std::string report = "text";

  auto add_common = [&](CLI::App* sub, bool paths_required) {
    auto* opt = sub->add_option("paths", paths, "Corpus entry files or directories");
    if (paths_required) opt->required();
    sub->add_option("--seed", seed, "Sampling and field-draw seed")->capture_default_str();
    sub->add_option("--points", points, "Sample points per instance (default: per entry)");
    sub->add_option("--param", params, "Parameter override k=v (repeatable)");
    sub->add_option("--report", report, "Output format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  };
  auto add_suite = [&](CLI::App* sub) {
    sub->add_option("--tol", tol, "Override every check tolerance");
    sub->add_option("--only", only, "Comma-separated check ids")->delimiter(',');
  };

  CLI::App* classify = app.add_subcommand("classify", "Classify the vertical distribution");
  add_common(classify, true);
  CLI::App* check = app.add_subcommand("check", "Classify and run the check suite");
  add_common(check, true);
  add_suite(check);
  CLI::App* verify = app.add_subcommand("corpus-verify", "Classify and check every entry (default: bundled corpus)");
  add_common(verify, false);
  add_suite(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const Command command = classify->parsed() ? Command::Classify
                          : check->parsed() ? Command::Check
                                            : Command::CorpusVerify;
  RunConfig config;
  config.paths = paths;
  config.seed = seed;
  if (points != 0) config.points = points;
  if (tol != 0.0) config.tolerance = tol;
  config.format = report == "json" ? OutputFormat::Json : OutputFormat::Text;
  config.threads = default_thread_count();

  try {
    config.only = split_ids(only);
    config.params = parse_params(params);
    if (points < 0) throw std::invalid_argument("--points must be at least 1");
    if (tol < 0.0) throw std::invalid_argument("--tol must be positive");
    const ReportDocument doc = run_command(command, config);
    std::cout << (config.format == OutputFormat::Json ? render_json(doc) : render_text(doc));
    return doc.exit_code();
  } catch (const CorpusError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
