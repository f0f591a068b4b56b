#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

namespace {

namespace fs = std::filesystem;

struct CmdResult {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "toposym_cli_tests";
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

CmdResult run_cli(const std::string& args) {
  fs::path out = work_dir() / "stdout.txt";
  fs::path err = work_dir() / "stderr.txt";
  std::string cmd = std::string(TOPOSYM_CLI_PATH) + " " + args + " > " + out.string() + " 2> " +
                    err.string();
  int status = std::system(cmd.c_str());
  CmdResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

nlohmann::json load(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

// ==== decide ====

TEST_CASE("decide blackboard follows the lone-source rule") {
  CmdResult yes = run_cli("decide --sources 1,2,2");
  CHECK(yes.code == 0);
  CHECK(contains(yes.out, "solvable (n_1=1)"));

  CmdResult no = run_cli("decide --sources 2,2");
  CHECK(no.code == 2);
  CHECK(contains(no.out, "unsolvable (min n_i=2>1)"));
}

TEST_CASE("decide message passing follows the gcd under adversarial ports") {
  CmdResult yes = run_cli("decide --model mp --sources 2,3");
  CHECK(yes.code == 0);
  CHECK(contains(yes.out, "solvable (gcd=1)"));

  CmdResult no = run_cli("decide --model mp --sources 2,4");
  CHECK(no.code == 2);
  CHECK(contains(no.out, "unsolvable (gcd=2)"));
}

TEST_CASE("decide refuses to judge fixed ports with gcd above 1") {
  CmdResult r = run_cli("decide --model mp --sources 2,2 --ports random:5");
  CHECK(r.code == 3);
  CHECK(contains(r.out, "unknown (fixed ports, gcd=2)"));

  CmdResult ok = run_cli("decide --model mp --sources 2,3 --ports random:5");
  CHECK(ok.code == 0);
}

TEST_CASE("decide without a configuration is invalid") {
  CmdResult r = run_cli("decide");
  CHECK(r.code == 1);
  CHECK(contains(r.err, "need --sources or --assignment"));
  CHECK(run_cli("decide --sources 1,0").code == 1);
  CHECK(run_cli("nonsense").code == 1);
}

TEST_CASE("decide reads assignment and port files") {
  fs::path cfg = work_dir() / "alpha.json";
  std::ofstream(cfg) << R"({"n": 3, "source_of": [1, 2, 2]})";
  CmdResult r = run_cli("decide --assignment " + cfg.string());
  CHECK(r.code == 0);
  CHECK(contains(r.out, "n_1=1"));

  fs::path ports = work_dir() / "ports.json";
  std::ofstream(ports) << R"({"n": 2, "target": [[1], [0]]})";
  CmdResult mp = run_cli("decide --model mp --sources 1,1 --ports " + ports.string());
  CHECK(mp.code == 0);

  fs::path bad = work_dir() / "bad_ports.json";
  std::ofstream(bad) << R"({"n": 2, "target": [[0], [0]]})";
  CHECK(run_cli("decide --model mp --sources 1,1 --ports " + bad.string()).code == 1);
}

// ==== analyze ====

TEST_CASE("analyze writes the exact curve as csv and json") {
  fs::path dir = work_dir() / "curve";
  CmdResult r = run_cli("analyze --sources 1,1 --task le --t 1..3 --out " + dir.string());
  CHECK(r.code == 0);
  std::string expected =
      "t,numerator,denominator,solving_count,total_count\n"
      "1,1,2,2,4\n"
      "2,3,4,12,16\n"
      "3,7,8,56,64\n";
  CHECK(r.out == expected);
  CHECK(slurp(dir / "curve.csv") == expected);
  nlohmann::json j = load(dir / "curve.json");
  CHECK(j["model"] == "blackboard");
  CHECK(j["rows"].size() == 3);
  CHECK(j["rows"][2]["numerator"] == "7");
}

TEST_CASE("analyze shows an all-zero column for paired sources") {
  fs::path dir = work_dir() / "curve_zero";
  CmdResult r = run_cli("analyze --sources 2,2 --task le --t 1..3 --out " + dir.string());
  CHECK(r.code == 0);
  CHECK(r.out ==
        "t,numerator,denominator,solving_count,total_count\n"
        "1,0,1,0,4\n"
        "2,0,1,0,16\n"
        "3,0,1,0,64\n");
}

TEST_CASE("analyze supports single times and empty ranges") {
  fs::path dir = work_dir() / "curve_single";
  CmdResult one = run_cli("analyze --sources 1,1 --t 2 --out " + dir.string());
  CHECK(one.code == 0);
  CHECK(contains(one.out, "2,3,4,12,16"));

  CmdResult empty = run_cli("analyze --sources 1,1 --t 3..2 --out " + dir.string());
  CHECK(empty.code == 0);
  CHECK(empty.out == "t,numerator,denominator,solving_count,total_count\n");
}

TEST_CASE("analyze reports the enumeration cap as exit 4") {
  CmdResult r = run_cli("analyze --sources 1,1 --t 13..13 --out " + (work_dir() / "x").string());
  CHECK(r.code == 4);
  CHECK(contains(r.err, "cap exceeded"));
}

// ==== simulate ====

TEST_CASE("simulate blackboard writes summary and trace") {
  fs::path dir = work_dir() / "sim_bb";
  CmdResult r = run_cli("simulate --sources 1,1 --trials 20 --seed 3 --trace --out " +
                        dir.string());
  CHECK(r.code == 0);
  CHECK(contains(r.out, "protocol=bb-le"));
  CHECK(contains(r.out, "success_rate=1"));

  nlohmann::json summary = load(dir / "summary.json");
  CHECK(summary["trials"] == 20);
  CHECK(summary["successes"] == 20);
  CHECK(summary["protocol"] == "bb-le");
  CHECK(summary["outcomes"]["decided"] == 20);

  std::istringstream trace(slurp(dir / "trace.jsonl"));
  std::string line;
  REQUIRE(std::getline(trace, line));
  nlohmann::json rec = nlohmann::json::parse(line);
  CHECK(rec.contains("round"));
  CHECK(rec.contains("party"));
  CHECK(rec.contains("class"));
  CHECK(rec.contains("output"));
}

TEST_CASE("simulate is reproducible from the seed") {
  fs::path a = work_dir() / "sim_a", b = work_dir() / "sim_b";
  CHECK(run_cli("simulate --sources 1,2,2 --trials 30 --seed 17 --out " + a.string()).code == 0);
  CHECK(run_cli("simulate --sources 1,2,2 --trials 30 --seed 17 --out " + b.string()).code == 0);
  CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
}

TEST_CASE("strict mode turns timeout-dominated runs into exit 4") {
  fs::path dir = work_dir() / "sim_strict";
  CmdResult r = run_cli("simulate --sources 2 --trials 4 --seed 1 --max-rounds 10 --strict --out " +
                        dir.string());
  CHECK(r.code == 4);
  nlohmann::json summary = load(dir / "summary.json");
  CHECK(summary["outcomes"]["timeout"] == 4);

  CmdResult lax = run_cli("simulate --sources 2 --trials 4 --seed 1 --max-rounds 10 --out " +
                          dir.string());
  CHECK(lax.code == 0);
}

TEST_CASE("simulate gcd election over random ports") {
  fs::path dir = work_dir() / "sim_gcd";
  CmdResult r = run_cli(
      "simulate --model mp --protocol gcd-le --sources 2,3 --ports random:7 --trials 25 "
      "--seed 2 --out " + dir.string());
  CHECK(r.code == 0);
  nlohmann::json summary = load(dir / "summary.json");
  CHECK(summary["trials"] == 25);
  CHECK(summary["successes"].get<int>() >= 24);
}

TEST_CASE("simulate matching counts perfect matchings as successes") {
  fs::path dir = work_dir() / "sim_match";
  CmdResult r = run_cli(
      "simulate --protocol matching --sources 2,3 --ports random:3 --trials 5 --seed 4 --out " +
      dir.string());
  CHECK(r.code == 0);
  nlohmann::json summary = load(dir / "summary.json");
  CHECK(summary["successes"] == 5);
}

TEST_CASE("simulate task-by-leader reports the computed outputs") {
  fs::path dir = work_dir() / "sim_task";
  CmdResult r = run_cli(
      "simulate --protocol task-by-leader --task max --inputs 3,1,2 --sources 1,1,1 "
      "--trials 3 --seed 5 --out " + dir.string());
  CHECK(r.code == 0);
  nlohmann::json summary = load(dir / "summary.json");
  CHECK(summary["outputs_trial0"] == nlohmann::json::array({"3", "3", "3"}));

  CmdResult bad = run_cli(
      "simulate --protocol task-by-leader --task mle:2 --sources 1,1,1 --trials 1 --seed 5 "
      "--out " + dir.string());
  CHECK(bad.code == 1);
}

// ==== complex ====

TEST_CASE("complex pi-output prints the projected task") {
  CmdResult r = run_cli("complex pi-output --n 3 --task le");
  CHECK(r.code == 0);
  CHECK(contains(r.out, "graph complex {"));
  CHECK(contains(r.out, "\"1:1\";"));
  CHECK(contains(r.out, "\"2:0\" -- \"3:0\";"));

  fs::path dir = work_dir() / "pi_out";
  CHECK(run_cli("complex pi-output --n 3 --task le --out " + dir.string()).code == 0);
  nlohmann::json j = load(dir / "pi_output.json");
  CHECK(j["n"] == 3);
  CHECK(j["facets"].size() == 6);
}

TEST_CASE("complex pi-tilde groups equal strings into facets") {
  CmdResult r = run_cli("complex pi-tilde --strings 01,01,11");
  CHECK(r.code == 0);
  CHECK(contains(r.out, "\"1:01\" -- \"2:01\";"));
  CHECK(contains(r.out, "\"3:11\";"));
  CHECK(run_cli("complex pi-tilde --strings 01,1").code == 1);
  CHECK(run_cli("complex pi-tilde --strings 0x").code == 1);

  // one round, one lone bit against a pair: two facets
  fs::path dir = work_dir() / "pi_tilde";
  CmdResult one = run_cli("complex pi-tilde --strings 0,1,1 --out " + dir.string());
  CHECK(one.code == 0);
  CHECK(contains(one.out, "\"1:0\";"));
  CHECK(contains(one.out, "\"2:1\" -- \"3:1\";"));
  CHECK(load(dir / "pi_tilde.json")["facets"].size() == 2);
}

TEST_CASE("complex realizations enumerates and saves the consistent tuples") {
  fs::path dir = work_dir() / "realz";
  CmdResult r = run_cli("complex realizations --n 2 --t 1 --out " + dir.string());
  CHECK(r.code == 0);
  CHECK(contains(r.out, "4 realizations"));
  nlohmann::json j = load(dir / "realizations.json");
  REQUIRE(j.size() == 4);
  CHECK(j[0]["strings"] == nlohmann::json::array({"0", "0"}));

  CmdResult capped = run_cli("complex realizations --sources 1,1 --t 13");
  CHECK(capped.code == 4);

  CmdResult lone = run_cli("complex realizations --n 1 --t 1");
  CHECK(lone.code == 0);
  CHECK(contains(lone.out, "2 realizations"));
}
