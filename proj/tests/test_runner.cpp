#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mergo/runner.hpp"

using namespace mergo;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json demo() {
  return json::parse(R"({
    "seed": 1,
    "space": {"size": 4},
    "map": {"type": "cycle"},
    "filtration": {"direction": "decreasing",
                   "stages": ["singletons", {"blocks": [[0, 1], [2, 3]]}, "trivial"]},
    "observable": [1, 3, 5, 7],
    "checks": [{"type": "dominant", "p": 2},
               {"type": "maximal", "p": 2, "epsilon": [0.5, 1, 2, 4, 8]}]
  })");
}

json random_config() {
  return json::parse(R"({
    "space": {"size": 20, "weights": "random"},
    "maps": ["random", {"type": "power", "of": 0, "exponent": 3}],
    "filtrations": [
      {"direction": "increasing", "random_merge": {"stages": 3}},
      {"direction": "decreasing", "random_merge": {"stages": 2}},
      {"direction": "decreasing", "random_merge": {"stages": 2}}
    ],
    "observable": {"generator": {"distribution": "uniform", "dim": 2, "a": -1, "b": 2}},
    "process": "ergodic_martingale",
    "norm_q": "inf",
    "checks": [{"type": "dominant", "p": 2, "box": {"n_max": 12}}]
  })");
}

std::string config_error_path(json const &doc) {
  try {
    parse_config(doc);
  } catch (ConfigError const &e) {
    return e.path();
  }
  return "<accepted>";
}

fs::path fresh_dir(std::string const &name) {
  fs::path p = fs::temp_directory_path() / ("mergo_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(fs::path const &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE("the demo config passes every check and reaches its limit") {
  auto const out = run_experiment(parse_config(demo()));
  CHECK(out.all_satisfied);
  REQUIRE(out.reports.size() == 6);
  CHECK(out.reports[0].theorem_tag == "Thm2.4");
  CHECK(out.reports[1].theorem_tag == "Thm2.5");
  CHECK(out.reports.back().lhs == 0.0);
  auto const &last = out.trace.rows.back();
  CHECK(last.lp_error <= 1e-12);
  CHECK(last.sup_error <= 1e-12);
  CHECK(out.trace_csv.rfind("n1,n2,lp_error,sup_error\n", 0) == 0);

  json const reports = json::parse(out.reports_json);
  REQUIRE(reports.size() == 6);
  for (char const *key : {"theorem_tag", "lhs", "rhs", "constant", "p", "epsilon", "satisfied",
                          "margin", "truncation", "alpha", "f_norm", "hypothesis_l1", "orlicz"})
    CHECK(reports[0].contains(key));
  CHECK(reports[0]["epsilon"].is_null());
  CHECK(reports[1]["epsilon"] == 0.5);
}

TEST_CASE("validation errors are path-addressed") {
  json doc = demo();
  doc["checks"][0]["p"] = 1;
  CHECK(config_error_path(doc) == "checks[0].p");

  doc = demo();
  doc["checks"][1].erase("epsilon");
  CHECK(config_error_path(doc) == "checks[1].epsilon");

  doc = demo();
  doc["checks"][1]["epsilon"] = json::array({2, 1});
  CHECK(config_error_path(doc) == "checks[1].epsilon[1]");

  doc = demo();
  doc["observable"] = json::array({1, 2, 3});
  CHECK(config_error_path(doc) == "observable.values");

  doc = demo();
  doc["filtration"]["stages"] = json::array({"trivial", "singletons"});
  CHECK(config_error_path(doc) == "filtration.stages");

  doc = demo();
  doc["filtration"]["direction"] = "increasing";
  CHECK(config_error_path(doc) == "filtration.stages");

  doc = demo();
  doc["map"] = json{{"type", "permutation"}, {"map", {0, 0, 1, 2}}};
  CHECK(config_error_path(doc) == "map");

  doc = demo();
  doc["space"] = json{{"weights", {0.1, 0.2, 0.3, 0.4}}};
  CHECK(config_error_path(doc) == "map");  // a 4-cycle does not preserve these weights

  doc = demo();
  doc["spice"] = 1;
  CHECK(config_error_path(doc) == "spice");

  doc = demo();
  doc["checks"][0]["box"] = json{{"stages", {4}}};
  CHECK(config_error_path(doc) == "checks[0].box");

  doc = demo();
  doc["grid"] = json{{"n1", {1, 4, 2}}};
  CHECK(config_error_path(doc) == "grid.n1[2]");

  doc = demo();
  doc.erase("observable");
  CHECK(config_error_path(doc) == "observable");

  doc = random_config();
  doc["checks"][0]["p"] = 2.5;
  CHECK(config_error_path(doc) == "checks[0]");

  doc = random_config();
  doc["checks"].push_back(json{{"type", "maximal"}, {"p", 2}, {"epsilon", 1.0}});
  CHECK(config_error_path(doc) == "checks[1]");

  doc = demo();
  doc["weights"] = json{{"terms", {{{"amplitude", 1.0}, {"frequency", 1.5}}}}};
  CHECK(config_error_path(doc) == "weights.terms");
}

TEST_CASE("outputs are deterministic and follow the seed") {
  auto const a = run_experiment(parse_config(random_config(), 42));
  auto const b = run_experiment(parse_config(random_config(), 42));
  auto const c = run_experiment(parse_config(random_config(), 43));
  CHECK(a.trace_csv == b.trace_csv);
  CHECK(a.reports_json == b.reports_json);
  CHECK(a.manifest_json == b.manifest_json);
  CHECK(a.reports_json != c.reports_json);
  CHECK(a.all_satisfied);
  CHECK(json::parse(a.manifest_json)["seed"] == 42);
}

TEST_CASE("a manifest reparses into a config that reproduces the run") {
  for (json const &doc : {demo(), random_config()}) {
    auto const first = run_experiment(parse_config(doc, 7));
    auto const again = run_experiment(parse_config(json::parse(first.manifest_json)));
    CHECK(first.trace_csv == again.trace_csv);
    CHECK(first.reports_json == again.reports_json);
    CHECK(first.manifest_json == again.manifest_json);
  }
}

TEST_CASE("trace numbers reparse exactly") {
  auto const out = run_experiment(parse_config(random_config(), 3));
  std::istringstream in(out.trace_csv);
  std::string line;
  std::getline(in, line);
  std::size_t k = 0;
  while (std::getline(in, line)) {
    REQUIRE(k < out.trace.rows.size());
    std::istringstream fields(line);
    std::string n1, n2, lp, sup;
    std::getline(fields, n1, ',');
    std::getline(fields, n2, ',');
    std::getline(fields, lp, ',');
    std::getline(fields, sup, ',');
    CHECK(std::stoul(n1) == out.trace.rows[k].n1);
    CHECK(std::stoul(n2) == out.trace.rows[k].n2);
    CHECK(std::strtod(lp.c_str(), nullptr) == out.trace.rows[k].lp_error);
    CHECK(std::strtod(sup.c_str(), nullptr) == out.trace.rows[k].sup_error);
    ++k;
  }
  CHECK(k == out.trace.rows.size());
}

TEST_CASE("weighted runs trace against the joint-period average") {
  json doc = demo();
  doc["weights"] = json{{"terms", {{{"amplitude", 0.8}, {"frequency", 1.0 / 3.0}, {"phase", 0.2}}}}};
  auto const out = run_experiment(parse_config(doc));
  CHECK(out.trace.target_description.find("joint period") != std::string::npos);
  CHECK(out.reports[0].theorem_tag == "Thm4.1-dominant");
  CHECK(out.all_satisfied);
  // n1 = 12 = lcm(4, 3) at the last stage hits the reference exactly.
  bool found = false;
  for (auto const &row : out.trace.rows)
    if (row.n1 == 12 && row.n2 == 2) {
      found = true;
      CHECK(row.sup_error <= 1e-12);
    }
  CHECK(found);
}

TEST_CASE("run_command writes all files or none") {
  fs::path const cfg_dir = fresh_dir("cfg");
  fs::create_directories(cfg_dir);
  {
    std::ofstream(cfg_dir / "good.json") << demo().dump();
    json bad = demo();
    bad["checks"][0]["p"] = 1;
    std::ofstream(cfg_dir / "bad.json") << bad.dump();
    std::ofstream(cfg_dir / "broken.json") << "{ not json";
  }
  std::ostringstream out, err;

  fs::path const bad_out = fresh_dir("bad_out");
  CHECK(run_command(cfg_dir / "bad.json", bad_out.string(), std::nullopt, out, err) ==
        exit_code::validation);
  CHECK(err.str().find("checks[0].p") != std::string::npos);
  CHECK_FALSE(fs::exists(bad_out));
  CHECK(run_command(cfg_dir / "broken.json", bad_out.string(), std::nullopt, out, err) ==
        exit_code::validation);
  CHECK(run_command(cfg_dir / "missing.json", bad_out.string(), std::nullopt, out, err) ==
        exit_code::validation);
  CHECK_FALSE(fs::exists(bad_out));

  fs::path const a = fresh_dir("out_a"), b = fresh_dir("out_b");
  CHECK(run_command(cfg_dir / "good.json", a.string(), 9, out, err) == exit_code::success);
  CHECK(run_command(cfg_dir / "good.json", b.string(), 9, out, err) == exit_code::success);
  for (char const *name : {"trace.csv", "reports.json", "manifest.json"}) {
    REQUIRE(fs::exists(a / name));
    CHECK(slurp(a / name) == slurp(b / name));
  }
  std::size_t files = 0;
  for (auto const &e : fs::directory_iterator(a)) {
    (void)e;
    ++files;
  }
  CHECK(files == 3);

  // A run over the manifest reproduces the outputs.
  fs::path const c = fresh_dir("out_c");
  CHECK(run_command(a / "manifest.json", c.string(), std::nullopt, out, err) == exit_code::success);
  CHECK(slurp(a / "reports.json") == slurp(c / "reports.json"));

  for (auto const &p : {cfg_dir, a, b, c})
    fs::remove_all(p);
}

TEST_CASE("a violated bound exits with the failure code") {
  json doc = json::parse(R"({
    "space": 3, "map": "identity",
    "filtration": {"direction": "decreasing", "stages": ["trivial"]},
    "observable": [1, 1, 1],
    "weights": {"constant": 8},
    "checks": [{"type": "maximal", "p": 2, "epsilon": 8}]
  })");
  fs::path const dir = fresh_dir("cfg_violate");
  fs::create_directories(dir);
  std::ofstream(dir / "c.json") << doc.dump();
  std::ostringstream out, err;
  CHECK(run_command(dir / "c.json", (dir / "out").string(), std::nullopt, out, err) ==
        exit_code::failure);
  CHECK(err.str().find("Thm4.1-maximal violated") != std::string::npos);
  CHECK(fs::exists(dir / "out" / "reports.json"));
  fs::remove_all(dir);
}

TEST_CASE("gen fragments merge into valid configs") {
  for (char const *kind : {"space", "map", "filtration", "observable"}) {
    json const frag = generate_fragment(kind, 11, 6);
    CHECK(frag == generate_fragment(kind, 11, 6));
    json doc = json::parse(R"({
      "space": {"size": 6}, "map": "identity",
      "filtration": {"direction": "decreasing", "stages": ["singletons", "trivial"]},
      "observable": [1, 2, 3, 4, 5, 6]
    })");
    if (frag.contains("maps"))
      doc.erase("map");
    if (frag.contains("filtrations"))
      doc.erase("filtration");
    if (std::string(kind) == "space")
      doc["map"] = "identity";
    doc.update(frag);
    CHECK_NOTHROW(parse_config(doc));
  }
  CHECK_THROWS_AS(generate_fragment("banana", 1), ConfigError);
  std::ostringstream out, err;
  CHECK(gen_command("map", 3, 5, out, err) == exit_code::success);
  CHECK(json::parse(out.str()).contains("maps"));
}
