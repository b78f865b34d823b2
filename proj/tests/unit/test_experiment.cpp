#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "nlt/errors.hpp"
#include "nlt/experiment.hpp"

using namespace nlt;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("nltlab_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Run {
  int code;
  std::string out;
};

Run nltlab(const std::string& args) {
  const auto out = scratch() / "stdout.txt";
  const std::string cmd = std::string(NLTLAB_PATH) + " " + args + " > " + out.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out)};
}

fs::path write_config(const std::string& name, json j) {
  j["output_dir"] = (scratch() / "out").string();
  const auto p = scratch() / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

json tv_config() {
  return json::parse(R"({
    "experiment": "tv_monotonicity",
    "kernel": {"family": "exponential"},
    "scenarios": [{"kind": "random_bv", "seed": 3, "n_jumps": 8},
                  {"kind": "riemann", "u_left": 0.8, "u_right": 0.2}],
    "epsilons": [0.2, 0.1],
    "t_end": 0.3,
    "snapshots": 10
  })");
}

json cex_config() {
  return json::parse(R"({
    "experiment": "counterexample",
    "scenarios": [{"kind": "counterexample", "eps1": 1, "n_blocks": 1, "h": [1.0]}],
    "t_end": 0.02,
    "snapshots": 20
  })");
}

json verdict(const json& v, const std::string& name) {
  for (const auto& e : v["verdicts"]) {
    if (e["name"] == name) return e;
  }
  return json();
}

}  // namespace

TEST_CASE("catalog: five kinds, each with its claim") {
  const auto& cat = experiment_catalog();
  REQUIRE(cat.size() == 5);
  for (const auto& e : cat) {
    CHECK_FALSE(e.anchor.empty());
    CHECK(to_string(e.kind) == e.name);
  }
  const auto j = catalog_to_json();
  CHECK(j.size() == 5);
  CHECK(j[0].contains("anchor"));
}

TEST_CASE("parse_config: defaults are filled in") {
  const auto cfg = parse_config(tv_config());
  const auto& n = cfg.normalized;
  CHECK(n["cfl"] == 0.5);
  CHECK(n["grid"]["cells_per_eps"] == 32);
  CHECK(n["velocity"]["family"] == "greenshields");
  CHECK(n["scenarios"][0]["id"] == "random_bv_0");
  CHECK(n["tolerances"]["relative_tv"] == 0.02);
  CHECK(n["write_snapshots"] == "ends");
  // normalization is idempotent
  CHECK(parse_config(n).normalized == n);
  CHECK(default_label(cfg) == default_label(parse_config(n)));
}

TEST_CASE("parse_config: schema violations") {
  const auto reject = [](const std::function<void(json&)>& edit) {
    json j = tv_config();
    edit(j);
    CHECK_THROWS_AS(parse_config(j), ConfigError);
  };
  reject([](json& j) { j.erase("experiment"); });
  reject([](json& j) { j["experiment"] = "nope"; });
  reject([](json& j) { j["colour"] = "blue"; });
  reject([](json& j) { j["epsilons"] = json::array(); });
  reject([](json& j) { j["epsilons"] = {0.1, -0.2}; });
  reject([](json& j) { j.erase("t_end"); });
  reject([](json& j) { j["cfl"] = 1.5; });
  reject([](json& j) { j["grid"] = {{"cells_per_eps", 4}}; });
  reject([](json& j) { j["kernel"] = {{"family", "gaussian"}}; });
  reject([](json& j) { j["kernel"] = {{"family", "piecewise_linear"}, {"nodes", {{-1.0, 2.0}, {0.0, 0.0}}}}; });
  reject([](json& j) { j["scenarios"][0]["kind"] = "sawtooth"; });
  reject([](json& j) { j["scenarios"][1]["u_left"] = 1.2; });
  reject([](json& j) { j["scenarios"][1]["id"] = "random_bv_0"; });
  reject([](json& j) { j["tolerances"] = {{"speed", 1}}; });
  reject([](json& j) { j["write_snapshots"] = "some"; });
  reject([](json& j) { j["kernel"] = {{"family", "table"}, {"path", "/does/not/exist.csv"}}; });

  json c = cex_config();
  c["scenarios"][0]["n_blocks"] = 2;
  c["scenarios"][0]["h"] = {0.5, 0.25};
  c["scenarios"][0]["eps_ratio"] = 8;
  CHECK_THROWS_AS(parse_config(c), ConfigError);
}

TEST_CASE("cli: list prints five kinds, --json is machine readable") {
  const auto r = nltlab("list");
  CHECK(r.code == 0);
  for (const auto& e : experiment_catalog()) {
    CHECK(r.out.find(e.name) != std::string::npos);
    CHECK(r.out.find(e.anchor) != std::string::npos);
  }
  const auto j = nltlab("list --json");
  CHECK(j.code == 0);
  CHECK(json::parse(j.out).size() == 5);
}

TEST_CASE("cli: malformed config exits 1 and leaves no artifacts") {
  const auto p = scratch() / "broken.json";
  std::ofstream(p) << "{\"experiment\": \"tv_monotonicity\", ";
  CHECK(nltlab("--config " + p.string()).code == 1);
  json j = tv_config();
  j["epsilons"] = "many";
  const auto q = write_config("bad_eps.json", j);
  CHECK(nltlab("--config " + q.string()).code == 1);
  CHECK_FALSE(fs::exists(scratch() / "out"));
  CHECK(nltlab("").code == 1);
  CHECK(nltlab("--config " + (scratch() / "missing.json").string()).code == 1);
}

TEST_CASE("cli: tv_monotonicity with the exponential kernel passes") {
  const auto p = write_config("tv.json", tv_config());
  const auto r = nltlab("--quiet --label tv --config " + p.string());
  CHECK(r.code == 0);
  const auto dir = scratch() / "out" / "tv_monotonicity" / "tv";
  const auto v = json::parse(slurp(dir / "verdicts.json"));
  CHECK(verdict(v, "monotonicity")["verdict"] == "PASS");
  CHECK(v["all_as_expected"] == true);
  CHECK(slurp(dir / "series" / "tv_random_bv_0_eps0.csv").rfind("t,tv_w,tv_u,neg_part\n", 0) == 0);
  CHECK(slurp(dir / "snapshots" / "riemann_1_eps1_0000.csv").rfind("x_center,u,w\n", 0) == 0);
  CHECK(fs::exists(dir / "snapshots" / "riemann_1_eps1_0010.csv"));
  const auto m = json::parse(slurp(dir / "manifest.json"));
  CHECK(m["runs"].size() == 4);
  CHECK(m["runs"][0]["run"]["kind"] == "nonlocal");
}

TEST_CASE("cli: counter-example reports the expected monotonicity FAIL") {
  const auto p = write_config("cex.json", cex_config());
  const auto r = nltlab("--quiet --label cex --config " + p.string());
  CHECK(r.code == 0);
  const auto dir = scratch() / "out" / "counterexample" / "cex";
  const auto v = json::parse(slurp(dir / "verdicts.json"));
  const auto mono = verdict(v, "monotonicity[counterexample_0]");
  CHECK(mono["verdict"] == "FAIL");
  CHECK(mono["expected"] == "FAIL");
  CHECK(mono["value"].get<double>() > 0.0);
  CHECK(verdict(v, "initial_tv[counterexample_0]")["verdict"] == "PASS");
  const auto m = json::parse(slurp(dir / "manifest.json"));
  CHECK(m["runs"][0]["datum"]["blocks"][0]["boundary_height"] == true);
}

TEST_CASE("cli: unexpected verdicts exit 2") {
  json j = tv_config();
  j["kernel"] = {{"family", "uniform"}};
  j["scenarios"] = json::parse(R"([{"kind": "counterexample", "h": [1.0]}])");
  j.erase("epsilons");
  j["t_end"] = 0.02;
  j["tolerances"] = {{"relative_tv", 0.0}};
  const auto p = write_config("exit2.json", j);
  CHECK(nltlab("--quiet --label e2 --config " + p.string()).code == 2);
}

TEST_CASE("cli: identical configs give bit-identical artifacts at any --jobs") {
  const auto p = write_config("det.json", tv_config());
  REQUIRE(nltlab("--quiet --label a --jobs 1 --config " + p.string()).code == 0);
  REQUIRE(nltlab("--quiet --label b --jobs 4 --config " + p.string()).code == 0);
  const auto root = scratch() / "out" / "tv_monotonicity";
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), root / "a");
    std::string a = slurp(e.path()), b = slurp(root / "b" / rel);
    if (rel == "manifest.json" || rel == "verdicts.json") {
      // only the label differs
      auto ja = json::parse(a), jb = json::parse(b);
      ja.erase("label");
      jb.erase("label");
      CHECK(ja == jb);
    } else {
      CHECK_MESSAGE(a == b, rel.string());
    }
    ++files;
  }
  CHECK(files > 5);
}

TEST_CASE("cli: a manifest is enough to re-run") {
  const auto p = write_config("rerun.json", tv_config());
  REQUIRE(nltlab("--quiet --config " + p.string()).code == 0);
  const auto label = default_label(load_config(p));
  const auto manifest = scratch() / "out" / "tv_monotonicity" / label / "manifest.json";
  REQUIRE(fs::exists(manifest));
  const auto before = slurp(manifest);
  const auto copy = scratch() / "copied_manifest.json";
  fs::copy_file(manifest, copy, fs::copy_options::overwrite_existing);
  CHECK(nltlab("--quiet --config " + copy.string()).code == 0);
  CHECK(slurp(manifest) == before);
  CHECK(default_label(load_config(copy)) == label);
}
