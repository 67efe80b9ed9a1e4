#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using budgetid::cli::run_cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "budgetid");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("budgetid_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write(const fs::path& dir, const std::string& name, const std::string& text) {
  const auto p = dir / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string f; std::getline(is, f, sep);) out.push_back(f);
  return out;
}

}  // namespace

TEST_CASE("csv and json tables") {
  budgetid::cli::Table t;
  t.columns = {"a", "b", "c", "d"};
  t.rows.push_back({0.1, std::int64_t{3}, std::vector<double>{1.0, 0.5}, std::monostate{}});
  CHECK(budgetid::cli::to_csv(t) == "a,b,c,d\n0.10000000000000001,3,1;0.5,\n");
  const auto j = budgetid::cli::to_json(t);
  CHECK(j[0]["a"] == 0.1);
  CHECK(j[0]["c"][1] == 0.5);
  CHECK(j[0]["d"].is_null());
}

TEST_CASE("config hash") {
  CHECK(budgetid::cli::fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(budgetid::cli::fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  const auto h = budgetid::cli::config_hash(nlohmann::json{{"x", 1}});
  CHECK(h.size() == 16);
  CHECK(h == budgetid::cli::config_hash(nlohmann::json::parse(R"({"x": 1})")));
}

TEST_CASE("difficulty command") {
  const auto dir = scratch("difficulty");
  const auto cfg = write(dir, "c.json", R"({"task": "bai", "family": "gaussian", "instance": [1, 0]})");
  const auto r = run({"--config", cfg.string(), "difficulty"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 2);
  const auto head = split(ls[0]);
  const auto row = split(ls[1]);
  CHECK(head[3] == "H");
  CHECK(row[3] == "8");
  CHECK(head[head.size() - 2] == "config_hash");
  CHECK(head.back() == "seed");
  // Byte-stable output.
  CHECK(run({"--config", cfg.string(), "difficulty"}).out == r.out);
}

TEST_CASE("difficulty compare column on a Bernoulli grid") {
  const auto dir = scratch("grid");
  const auto cfg = write(dir, "c.json",
                         R"({"task": "bai", "family": "bernoulli",
                             "instance_grid": {"lo": 0.05, "hi": 0.95, "n": 20}, "compare": true})");
  const auto r = run({"--config", cfg.string(), "difficulty"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 381);
  const auto head = split(ls[0]);
  const auto col = std::find(head.begin(), head.end(), "closed_vs_optimizer_gap") - head.begin();
  double worst = 0;
  for (std::size_t i = 1; i < ls.size(); ++i) worst = std::max(worst, std::stod(split(ls[i])[col]));
  CHECK(worst <= 1e-6);
}

TEST_CASE("usage and config errors exit with 2 and write nothing") {
  const auto dir = scratch("errors");
  const auto out = dir / "out";
  const auto bad = write(dir, "bad.json", R"({"task": "bai", )");
  CHECK(run({"--config", bad.string(), "--out", out.string(), "difficulty"}).code == 2);
  CHECK_FALSE(fs::exists(out));
  const auto unsupported = write(dir, "u.json", R"({"task": {"kind": "half_space", "normal": [1, -1]},
                                                   "family": "bernoulli", "instance": [0.6, 0.4]})");
  const auto r = run({"--config", unsupported.string(), "--out", out.string(), "difficulty"});
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());
  CHECK_FALSE(fs::exists(out));
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"bound", "gaussian-logk", "--K", "ten"}).code == 2);
  CHECK(run({}).code == 2);
}

TEST_CASE("simulate needs a seed") {
  const auto dir = scratch("sim");
  const auto cfg = write(dir, "s.json", R"({"task": "bai", "family": "bernoulli", "instance": [0.6, 0.4],
                                            "algorithm": "uniform", "T": 40, "n_reps": 2000})");
  CHECK(run({"--config", cfg.string(), "simulate"}).code == 2);
  const auto a = run({"--config", cfg.string(), "--seed", "9", "--workers", "1", "simulate"});
  const auto b = run({"--config", cfg.string(), "--seed", "9", "--workers", "4", "simulate"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.err.find("simulate:") != std::string::npos);
  CHECK(split(lines(a.out)[1]).back() == "9");
}

TEST_CASE("bound commands") {
  const auto bern = run({"bound", "bernoulli-two-arm", "--x-decades", "3:12"});
  REQUIRE(bern.code == 0);
  const auto ls = lines(bern.out);
  REQUIRE(ls.size() == 11);
  double prev = 0;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const double v = std::stod(split(ls[i])[2]);
    CHECK(v > prev);
    prev = v;
  }
  const auto g = run({"bound", "gaussian-logk", "--K", "10,100,1000"});
  REQUIRE(g.code == 0);
  const auto g_lines = lines(g.out);
  for (std::size_t i = 1; i < g_lines.size(); ++i) {
    const auto f = split(g_lines[i]);
    CHECK(std::stod(f[2]) >= std::stod(f[3]));
  }
  const auto p = run({"bound", "positivity", "--K", "5", "--sweep-ell"});
  REQUIRE(p.code == 0);
  CHECK(lines(p.out).size() > 5);
  CHECK(run({"bound", "halfspace", "--levels", "3"}).code == 0);
  CHECK(run({"bound", "bernoulli-two-arm", "--x-decades", "0:3"}).code == 2);
}

TEST_CASE("reproduce bundles") {
  const auto dir = scratch("reproduce");
  CHECK(run({"reproduce", "nope"}).code == 2);
  CHECK(run({"reproduce", "nope"}).err.find("sp-rate-ldp") != std::string::npos);
  const auto out = dir / "b";
  REQUIRE(run({"--out", out.string(), "reproduce", "bernoulli-limit"}).code == 0);
  const auto csv = slurp(out / "bernoulli-limit.csv");
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["seed"] == 1);
  CHECK(manifest["version"] == budgetid::cli::version());
  CHECK(manifest["config"]["kind"] == "bernoulli-two-arm");
  CHECK(manifest["config_hash"] == budgetid::cli::config_hash(manifest["config"]));
  REQUIRE(run({"--out", out.string(), "reproduce", "bernoulli-limit"}).code == 0);
  CHECK(slurp(out / "bernoulli-limit.csv") == csv);
  CHECK(csv.find('\r') == std::string::npos);

  const auto sp = dir / "sp";
  const auto cfg = write(dir, "reps.json", R"({"n_reps": 20000})");
  REQUIRE(run({"--config", cfg.string(), "--out", sp.string(), "reproduce", "sp-rate-ldp"}).code == 0);
  const auto head = split(lines(slurp(sp / "sp-rate-ldp.csv"))[0]);
  CHECK(std::find(head.begin(), head.end(), "h_hat") != head.end());
  CHECK(std::find(head.begin(), head.end(), "sp_rate_limit") != head.end());
  const auto json = nlohmann::json::parse(slurp(sp / "sp-rate-ldp.json"));
  CHECK(json["rows"].size() == 3);
  CHECK(json["rows"][0]["T"] == 100);
}

TEST_CASE("version and help") {
  const auto v = run({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out.rfind("v", 0) == 0);
  CHECK(run({"--help"}).code == 0);
}
