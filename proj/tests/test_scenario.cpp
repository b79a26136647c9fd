#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rbsde/scenario.hpp"

using namespace rbsde;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kConstantClaim = R"json({
  "tree": {"depth": 2, "dt": 1.0},
  "kernel": {"mode": "explicit",
    "alpha": [[0.0, 0.5, 0.25, 0.25], [0.0, 0.25, 0.25, 0.5],
              [0.0, 0.5, 0.25, 0.25], [0.0, 0.25, 0.25, 0.5]]},
  "data": {"f": "0", "S": "none", "h": "1"},
  "horizon": {"mode": "bounded", "T": 2},
  "p_grid": [2.0],
  "experiments": ["solve", "oracle_check", "identities"],
  "seed": 7,
  "output_dir": "out"
})json";

RunReport run_text(const std::string& text, const fs::path& out, int threads = 1) {
  const auto cfg = ScenarioConfig::from_json_text(text);
  RunOptions opt;
  opt.out_dir_override = out.string();
  opt.threads = threads;
  return run_scenario(cfg, opt);
}

}  // namespace

TEST_CASE("constant-claim scenario: price one, everything passes") {
  const fs::path out = fs::temp_directory_path() / "rbsde_t1";
  fs::remove_all(out);
  const auto rep = run_text(kConstantClaim, out);
  CHECK(rep.exit_code == 0);
  bool saw_value = false;
  for (const auto& l : rep.lines) {
    if (l.rfind("FAIL", 0) == 0) {
      INFO(l);
      CHECK(false);
    }
    if (l == "Y_G(0 | alive) = 1") saw_value = true;
  }
  CHECK(saw_value);
  for (const char* f : {"report.txt", "norms.csv", "profiles.csv", "solution_f.csv",
                        "solution_g.csv"})
    CHECK(fs::exists(out / f));
  // 12 positive-mass states -> header + 12 rows.
  std::istringstream sg(slurp(out / "solution_g.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(sg, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 13);
}

TEST_CASE("byte-identical outputs across reruns and thread counts") {
  const fs::path a = fs::temp_directory_path() / "rbsde_da";
  const fs::path b = fs::temp_directory_path() / "rbsde_db";
  fs::remove_all(a);
  fs::remove_all(b);
  const auto r1 = run_text(kConstantClaim, a, 1);
  const auto r2 = run_text(kConstantClaim, b, 4);
  CHECK(r1.exit_code == 0);
  CHECK(r2.exit_code == 0);
  for (const char* f : {"report.txt", "norms.csv", "profiles.csv", "solution_f.csv",
                        "solution_g.csv"})
    CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("config errors and exit codes") {
  SUBCASE("malformed expression is a parse error") {
    std::string text = kConstantClaim;
    const auto pos = text.find("\"h\": \"1\"");
    text.replace(pos, 8, "\"h\": \"W +\"");
    const auto cfg = ScenarioConfig::from_json_text(text);
    RunOptions opt;
    opt.out_dir_override = (fs::temp_directory_path() / "rbsde_e1").string();
    CHECK_THROWS_AS(run_scenario(cfg, opt), ScenarioParseError);
  }
  SUBCASE("malformed JSON carries line and column") {
    try {
      ScenarioConfig::from_json_text("{\n  \"tree\": }");
      CHECK(false);
    } catch (const ScenarioParseError& e) {
      CHECK(e.line >= 1);
    }
  }
  SUBCASE("unknown experiment") {
    std::string text = kConstantClaim;
    const auto pos = text.find("\"identities\"");
    text.replace(pos, 12, "\"frobnicate\"");
    CHECK_THROWS_AS(ScenarioConfig::from_json_text(text), ScenarioParseError);
  }
  SUBCASE("stability requires data2") {
    std::string text = kConstantClaim;
    const auto pos = text.find("\"identities\"");
    text.replace(pos, 12, "\"stability\"");
    CHECK_THROWS_AS(ScenarioConfig::from_json_text(text), ScenarioParseError);
  }
  SUBCASE("zero survival atom is a model invariant violation") {
    std::string text = kConstantClaim;
    const auto pos = text.find("[0.0, 0.5, 0.25, 0.25]");
    text.replace(pos, 22, "[0.0, 0.75, 0.25, 0.0]");
    const auto cfg = ScenarioConfig::from_json_text(text);
    CHECK_THROWS_AS(
        [&] {
          RunOptions opt;
          opt.out_dir_override = (fs::temp_directory_path() / "rbsde_e2").string();
          run_scenario(cfg, opt);
        }(),
        ConstructionError);
  }
}

TEST_CASE("run_scenario_file maps failures to exit codes") {
  const fs::path dir = fs::temp_directory_path() / "rbsde_files";
  fs::create_directories(dir);
  {
    std::ofstream(dir / "bad.json") << "{ not json";
    const auto rep = run_scenario_file((dir / "bad.json").string(), {});
    CHECK(rep.exit_code == 2);
  }
  {
    std::string text = kConstantClaim;
    const auto pos = text.find("[0.0, 0.5, 0.25, 0.25]");
    text.replace(pos, 22, "[0.0, 0.75, 0.25, 0.0]");
    std::ofstream(dir / "dead.json") << text;
    RunOptions opt;
    opt.out_dir_override = (dir / "out3").string();
    const auto rep = run_scenario_file((dir / "dead.json").string(), opt);
    CHECK(rep.exit_code == 3);
    bool names_node = false;
    for (const auto& l : rep.lines)
      if (l.find("level=2") != std::string::npos) names_node = true;
    CHECK(names_node);
  }
  {
    const auto rep = run_scenario_file((dir / "missing.json").string(), {});
    CHECK(rep.exit_code == 2);
  }
}

TEST_CASE("data given as by-level tables") {
  std::string text = kConstantClaim;
  const auto pos = text.find("\"h\": \"1\"");
  text.replace(pos, 8, "\"h\": {\"table\": [[1.0], [1.0, 1.0], [1.0, 1.0, 1.0, 1.0]]}");
  const fs::path out = fs::temp_directory_path() / "rbsde_tab";
  fs::remove_all(out);
  const auto rep = run_text(text, out);
  CHECK(rep.exit_code == 0);
  bool saw_value = false;
  for (const auto& l : rep.lines)
    if (l == "Y_G(0 | alive) = 1") saw_value = true;
  CHECK(saw_value);

  std::string bad = kConstantClaim;
  const auto pos2 = bad.find("\"h\": \"1\"");
  bad.replace(pos2, 8, "\"h\": {\"table\": [[1.0], [1.0]]}");
  CHECK_THROWS_AS(run_text(bad, out), ScenarioParseError);
}

TEST_CASE("schema text mentions every experiment") {
  const auto s = config_schema();
  for (const char* e : {"solve", "oracle_check", "identities", "apriori", "stability",
                        "discounted", "limit_profile", "equivalent_check", "appendixA"})
    CHECK(s.find(e) != std::string::npos);
}

TEST_CASE("shortest round-trip formatting") {
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(5.0 / 12.0) == "0.4166666666666667");
  const double v = 0.1 + 0.2;
  CHECK(std::stod(format_double(v)) == v);
}
