#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kgc/scenario.hpp"

using namespace kgc;

namespace {

const CheckResult *find(const RunReport &r, std::string_view name) {
  for (const auto &c : r.checks)
    if (c.name == name)
      return &c;
  return nullptr;
}

std::string read(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

} // namespace

TEST_CASE("minimal constant-k config gets the defaults") {
  auto s = parse_scenario("name: k1\ndimension: 3\ncutoff: 0\nfamily:\n  kind: constant-k\n  k: 1\n");
  CHECK(s.name == "k1");
  CHECK(s.family.kind == FamilyKind::ConstantK);
  CHECK(s.family.k == 1.0);
  CHECK(s.r_start == 1.0);
  CHECK(s.r_end == 50.0);
  CHECK(s.grid == 490);
  CHECK(s.tolerance == 1e-9);
  CHECK(s.seed == 20240607);
  CHECK(s.checks == std::vector<std::string>{"audit"});
  const auto g = s.grid_radii();
  CHECK(g.size() == 490);
  CHECK(g.back() == 50.0);
  auto fg = build_family(s);
  CHECK(fg.field.Q0(3.0, {0, 0, 1}) == -1.0);
}

TEST_CASE("long/short-range config carries the power gauges") {
  auto s = parse_scenario(R"(name: ex
family:
  kind: example61
  lambda: 1
  epsilon: 0.5
  long_range: {coefficient: 1, exponent: 0.5}
  short_range: {coefficient: [0, 1], exponent: 1.5}
)");
  CHECK(s.family.kind == FamilyKind::Example61);
  CHECK(s.family.short_range.coefficient == cplx(0.0, 1.0));
  auto fg = build_family(s);
  CHECK(fg.gauges.h(16.0) == doctest::Approx(std::pow(16.0, -1.25)).epsilon(1e-15));
  CHECK(fg.gauges.F(std::exp(1.5)) == doctest::Approx(1.5));
}

TEST_CASE("config errors") {
  auto rejects = [](const std::string &text, const std::string &needle) {
    try {
      (void)parse_scenario(text);
      FAIL("accepted: " << text);
    } catch (const ConfigError &e) {
      INFO(e.what());
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  rejects("family:\n  kind: example61\n  epsilon: 3\n", "epsilon");
  rejects("name: x\nfamily:\n  kind: constant-k\n  kk: 1\n", "line 4");
  rejects("name: x\ncolour: red\n", "colour");
  rejects("family:\n  kind: nowhere\n", "nowhere");
  rejects("window: [5, 2]\n", "window");
  rejects("checks: [audit, sorcery]\n", "sorcery");
  rejects("grid: -3\n", "grid");
  rejects("name: [unclosed\n", "line");
  rejects("inner_radius: 2\nwindow: [1, 5]\n", "window");
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.yaml"), Error);
}

TEST_CASE("catalog round trip and canonical hash") {
  const auto &cat = scenario_catalog();
  REQUIRE(cat.size() == 5);
  for (const auto &s : cat) {
    const auto file = load_scenario(std::filesystem::path(KGC_SCENARIO_DIR) / "suite" / (s.name + ".yaml"));
    CHECK(file.canonical() == s.canonical());
  }
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  auto a = cat[0], b = cat[0];
  b.seed += 1;
  CHECK(a.canonical() != b.canonical());
}

TEST_CASE("constant-k run") {
  auto s = scenario_catalog()[0];
  REQUIRE(s.name == "kato");
  auto rep = run(s);
  CHECK(rep.exit_code() == 0);
  for (auto name : {"monotone-Mplus", "r2N", "classify", "dichotomy"}) {
    INFO(name);
    REQUIRE(find(rep, name));
    CHECK(find(rep, name)->status == CheckStatus::Pass);
  }
  // M+ column is identically 1.
  const std::string *series = nullptr;
  for (const auto &[n, body] : rep.csv)
    if (n.find("series") != std::string::npos)
      series = &body;
  REQUIRE(series);
  std::istringstream in(*series);
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("r,Mplus,", 0) == 0);
  int rows = 0;
  while (std::getline(in, line)) {
    const auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
    CHECK(std::stod(line.substr(c1 + 1, c2 - c1 - 1)) == doctest::Approx(1.0).epsilon(1e-8));
    ++rows;
  }
  CHECK(rows == 491);
}

TEST_CASE("gating and exit codes") {
  auto dec = load_scenario(std::filesystem::path(KGC_SCENARIO_DIR) / "demo" / "decreasing-shell.yaml");
  auto rep = run(dec);
  CHECK(rep.audit_failed);
  CHECK(rep.exit_code() == 3);
  REQUIRE(find(rep, "audit"));
  CHECK(find(rep, "audit")->status == CheckStatus::Fail);
  for (const auto &c : rep.checks) {
    if (c.name == "audit")
      continue;
    INFO(c.name);
    CHECK(c.status == CheckStatus::Skipped);
    REQUIRE_FALSE(c.details.empty());
    CHECK(c.details.front().rfind("skipped (hypotheses unmet): ", 0) == 0);
  }

  auto zero = load_scenario(std::filesystem::path(KGC_SCENARIO_DIR) / "demo" / "zero-slack.yaml");
  CHECK(run(zero).exit_code() == 2);

  Scenario lemma;
  lemma.name = "lemma";
  lemma.checks = {"lemmaA-suite"};
  auto lr = run(lemma);
  CHECK(lr.exit_code() == 0);
  REQUIRE(find(lr, "lemmaA-suite"));
  CHECK(find(lr, "lemmaA-suite")->status == CheckStatus::Pass);
}

TEST_CASE("emitted CSVs are byte-identical across runs") {
  const auto base = std::filesystem::temp_directory_path() / "kgc_determinism";
  std::filesystem::remove_all(base);
  auto s = scenario_catalog()[2];
  auto a = run(s), b = run(s);
  emit(a, base / "a");
  emit(b, base / "b");
  REQUIRE_FALSE(a.artifacts.empty());
  int csvs = 0;
  for (const auto &entry : std::filesystem::directory_iterator(base / "a")) {
    if (entry.path().extension() != ".csv")
      continue;
    ++csvs;
    const auto other = base / "b" / entry.path().filename();
    REQUIRE(std::filesystem::exists(other));
    CHECK(read(entry.path()) == read(other));
  }
  CHECK(csvs == 2);
  CHECK(a.config_hash == b.config_hash);
  CHECK(a.summary().find(std::to_string(s.seed)) != std::string::npos);
  std::filesystem::remove_all(base);
}
