#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <set>

#include "subcheck/corpus.hpp"

using namespace subcheck;

namespace {

const std::string kCorpus = SUBCHECK_CORPUS_DIR;

const char* kMinimal = R"(
name = "tiny"
[map]
source_dim = 4
target_dim = 2
components = ["x1", "x2"]
)";

std::string field_of(const std::string& text) {
  try {
    parse_entry(text, "mem.toml");
  } catch (const CorpusError& e) {
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("bundled corpus loads") {
  const auto files = corpus_files(kCorpus);
  CHECK(files.size() >= 12);
  std::set<std::string> names;
  for (const auto& p : files) {
    INFO(p.string());
    const CorpusEntry e = load_entry(p);
    CHECK(names.insert(e.name).second);
    CHECK(e.name == p.stem().string());
  }
  CHECK(load_entry(kCorpus + "/example5.toml").instances().size() == 3);
  CHECK(load_entry(kCorpus + "/example9.toml").instances().size() == 25);
}

TEST_CASE("bundled entries match their expectations") {
  std::set<Verdict> seen;
  for (const auto& p : corpus_files(kCorpus)) {
    for (const auto& in : load_entry(p).instances()) {
      for (const auto& q : in.sample_points(42, 5)) {
        const auto a = split_d1_d2(in.map, q);
        const auto d = expected_vs_actual(in.expected, a);
        INFO(in.label);
        for (const auto& m : d.mismatches) INFO(m);
        CHECK(d.ok());
        seen.insert(a.verdict);
      }
    }
  }
  CHECK(seen.size() == 6);
}

TEST_CASE("example 5 grid reproduces theta = alpha") {
  const auto inst = load_entry(kCorpus + "/example5.toml").instances();
  const double expected[] = {std::numbers::pi / 6, std::numbers::pi / 4, 1.0};
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const auto a = split_d1_d2(inst[i].map, inst[i].sample_points(1, 1).front());
    CHECK(std::abs(*a.theta - expected[i]) < 1e-8);
  }
}

TEST_CASE("boundary members of the semi-slant family") {
  const auto e = load_entry(kCorpus + "/example9.toml");
  const auto inst = e.instances({{"alpha", std::numbers::pi / 4}, {"beta", std::numbers::pi / 4}});
  REQUIRE(inst.size() == 1);
  const auto a = split_d1_d2(inst[0].map, Eigen::VectorXd::Zero(8));
  CHECK(a.verdict == Verdict::Invariant);
  const auto d = expected_vs_actual(inst[0].expected, a);
  CHECK(d.ok());
  REQUIRE(d.annotations.size() == 1);
  CHECK(d.annotations[0].find("cos theta = 1") != std::string::npos);

  const auto e7 = load_entry(kCorpus + "/example7.toml").instances().front();
  const auto d7 = expected_vs_actual(e7.expected, split_d1_d2(e7.map, Eigen::VectorXd::Zero(10)));
  CHECK(d7.ok());
  CHECK(d7.annotations.size() == 1);

  // near the corner cos theta = |sin(alpha + beta)| tends to 0
  const auto corner = e.instances({{"alpha", 1e-9}, {"beta", 1e-9}}).front();
  const auto ac = split_d1_d2(corner.map, Eigen::VectorXd::Zero(8));
  const auto dc = expected_vs_actual(corner.expected, ac);
  CHECK(dc.ok());
  CHECK(ac.verdict == Verdict::SemiInvariant);
  CHECK(std::abs(std::cos(*ac.theta) - std::abs(std::sin(2e-9))) < 1e-8);
}

TEST_CASE("parameter overrides") {
  const auto e = load_entry(kCorpus + "/example9.toml");
  const auto inst = e.instances({{"alpha", 0.3}, {"beta", 0.4}});
  REQUIRE(inst.size() == 1);
  CHECK(inst[0].label == "example9[alpha=0.3,beta=0.4]");
  const auto a = split_d1_d2(inst[0].map, inst[0].sample_points(3, 1).front());
  CHECK(std::abs(*a.theta - std::acos(std::sin(0.7))) < 1e-8);
  CHECK(e.instances({{"alpha", 0.3}}).size() == 5);
  CHECK_THROWS_AS(e.instances({{"gamma", 0.3}}), CorpusError);
}

TEST_CASE("mismatches are reported") {
  const auto in = load_entry(kCorpus + "/example6.toml").instances().front();
  const auto a = split_d1_d2(in.map, Eigen::VectorXd::Zero(8));
  ExpectedValues wrong = in.expected;
  wrong.theta = 0.7;
  CHECK(expected_vs_actual(wrong, a).mismatches.size() == 1);
  wrong = in.expected;
  wrong.verdict = Verdict::Slant;
  CHECK(!expected_vs_actual(wrong, a).ok());
  wrong = in.expected;
  wrong.d1 = 2;
  wrong.d2 = 4;
  CHECK(!expected_vs_actual(wrong, a).ok());
  wrong = in.expected;
  wrong.d1_span = Eigen::MatrixXd::Identity(8, 4);
  wrong.d1_span->col(0) = Eigen::VectorXd::Unit(8, 7);
  CHECK(!expected_vs_actual(wrong, a).ok());
}

TEST_CASE("sampling") {
  const auto in = load_entry(kCorpus + "/warped10.toml").instances().front();
  const auto p1 = in.sample_points(42, 50);
  const auto p2 = in.sample_points(42, 60);
  for (std::size_t i = 0; i < p1.size(); ++i) {
    CHECK(p1[i] == p2[i]);
    CHECK(std::abs(p1[i][0]) <= 0.5);
    CHECK(p1[i].cwiseAbs().maxCoeff() <= 1.0);
  }
  CHECK(in.sample_points(43, 1).front() != p1.front());
  const auto radial = load_entry(kCorpus + "/radial.toml").instances().front();
  for (const auto& p : radial.sample_points(1, 20)) CHECK((p[0] >= 1.0 && p[0] <= 2.0));
}

TEST_CASE("malformed entries are rejected with a field path") {
  CHECK(field_of(kMinimal) == "<no error>");
  CHECK(field_of(std::string(kMinimal) + "[expected]\nd1 = 4\nd2 = 2\n") == "expected");
  CHECK(field_of(std::string(kMinimal) + "[expected]\nd1 = 3\n") == "expected.d1");
  CHECK(field_of(std::string(kMinimal) + "[expected]\nverdict = \"wobbly\"\n") == "expected.verdict");
  CHECK(field_of(std::string(kMinimal) + "[expected]\ntheta = 1\ncos_theta = 0\n") == "expected");
  CHECK(field_of(std::string(kMinimal) + "[expected]\nd1_span = [[1, 0]]\n") == "expected.d1_span[0]");
  CHECK(field_of(std::string(kMinimal) + "[mystery]\n") == "mystery");
  CHECK(field_of(std::string(kMinimal) + "[sampling]\npoints = 0\n") == "sampling.points");
  CHECK(field_of(std::string(kMinimal) + "[sampling]\nbounds = { y1 = [0, 1] }\n") == "sampling.bounds.y1");
  CHECK(field_of(std::string(kMinimal) + "[sampling]\nbounds = { x9 = [0, 1] }\n") == "sampling.bounds.x9");
  CHECK(field_of(std::string(kMinimal) + "[metric]\nkind = \"warped_product\"\nsplit = [2, 2]\nwarp = \"exp(x3)\"\n") ==
        "metric.warp");
  CHECK(field_of(std::string(kMinimal) + "[metric]\nkind = \"product\"\nsplit = [1, 2]\n") == "metric.split");
  CHECK(field_of(std::string(kMinimal) + "[J]\nkind = \"product\"\nblocks = [2, 1]\n") == "J.blocks");
  CHECK(field_of(std::string(kMinimal) + "[params]\nx2 = 1\n") == "params.x2");
  CHECK(field_of(std::string(kMinimal) + "[params]\nk = \"1/(\"\n") == "params.k");
  CHECK(field_of("name = \"t\"\n[map]\nsource_dim = 4\ntarget_dim = 2\ncomponents = [\"x1\"]\n") == "map.components");
  CHECK(field_of("name = \"t\"\n[map]\nsource_dim = 4\ntarget_dim = 2\ncomponents = [\"x1\", \"x7\"]\n") ==
        "map.components[1]");
  CHECK(field_of("name = \"t\"\n[map]\nsource_dim = 3\ntarget_dim = 1\ncomponents = [\"x1\"]\n") == "map.source_dim");
  CHECK(field_of("name = \"t\"\n") == "map");
  CHECK(field_of("name = \"t\"\n[map\n") == "");
  CHECK_THROWS_AS(load_entry(kCorpus + "/does_not_exist.toml"), CorpusError);
  try {
    parse_entry("name = \"t\"\n[map\n", "broken.toml");
  } catch (const CorpusError& e) {
    CHECK(std::string(e.what()).find("broken.toml") != std::string::npos);
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
}
