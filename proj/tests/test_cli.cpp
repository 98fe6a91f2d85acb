#include "doctest.h"

#include "qbm_cli/commands.hpp"
#include "qbm_cli/config.hpp"
#include "qbm_cli/output.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace qbm;
using namespace qbm::cli;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "qbm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// Exit status of the installed binary.
int shell(const std::string& args) {
  const std::string cmd = std::string(QBM_TOOL_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  return out;
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("qbm_cli_test_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("format_real is round-trip exact") {
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real(2.0) == "2");
  CHECK(std::stod(format_real(kPi)) == kPi);
}

TEST_CASE("CsvTable enforces the header width") {
  CsvTable t({"a", "b"});
  t.cell(1.5).cell(true);
  t.end_row();
  CHECK(t.str() == "a,b\n1.5,true\n");
  t.cell(1.0);
  CHECK_THROWS_AS(t.end_row(), std::logic_error);
}

TEST_CASE("parse_grid") {
  const auto g = parse_grid("0:1:5");
  REQUIRE(g.size() == 5);
  CHECK(g[1] == 0.25);
  CHECK(g[4] == 1.0);
  const auto phi = parse_grid("0:2:121", kPi);
  CHECK(phi.size() == 121);
  CHECK(phi.back() == 2 * kPi);
  CHECK(phi[45] == doctest::Approx(0.75 * kPi).epsilon(1e-15));
  CHECK(parse_grid("0.5", kPi) == std::vector<double>{0.5 * kPi});
  CHECK(parse_grid("0.1,0.3") == std::vector<double>{0.1, 0.3});
  CHECK(parse_grid("3:3:1") == std::vector<double>{3.0});
  CHECK_THROWS_AS(parse_grid("0:1"), ConfigError);
  CHECK_THROWS_AS(parse_grid("0:1:0"), ConfigError);
  CHECK_THROWS_AS(parse_grid("1:0:3"), ConfigError);
  CHECK_THROWS_AS(parse_grid("a,b"), ConfigError);
}

TEST_CASE("parse_init and parse_seed") {
  const auto u = parse_init("uniform:-2:2");
  CHECK(u.kind == InitSpec::Kind::uniform);
  CHECK(u.lo == -2.0);
  CHECK(u.hi == 2.0);
  const auto c = parse_init("constant:1");
  CHECK(c.kind == InitSpec::Kind::constant);
  CHECK(c.value == 1.0);
  CHECK_THROWS_AS(parse_init("gauss:0:1"), ConfigError);
  CHECK_THROWS_AS(parse_init("uniform:1"), ConfigError);
  CHECK(parse_seed("18446744073709551615") == 18446744073709551615ULL);
  CHECK_THROWS_AS(parse_seed("-1"), ConfigError);
  CHECK_THROWS_AS(parse_seed("12x"), ConfigError);
}

TEST_CASE("config_from_json") {
  nlohmann::json flat = {{"model", "hidden3q"}, {"r", 0.5},      {"phi", "0.75"},        {"starts", 4},
                         {"init", "uniform:-1:1"}, {"grid_r", "0:1:3"}, {"max_iter", 50}};
  const auto cfg = config_from_json("train", flat, std::string("99"));
  CHECK(*cfg.model == "hidden3q");
  CHECK(*cfg.r == 0.5);
  CHECK(*cfg.phi == 0.75 * kPi);
  CHECK(cfg.ms.n_starts == 4);
  CHECK(cfg.ms.seed == 99);
  CHECK(cfg.ms.init.kind == InitSpec::Kind::uniform);
  CHECK(cfg.grid_r->size() == 3);
  CHECK(cfg.bfgs.max_iter == 50);

  flat["seed"] = 7;
  CHECK(config_from_json("train", flat, std::string("99")).ms.seed == 7);
  CHECK(config_from_json("train", {{"grid-phi", {0.0, 0.5}}}, std::nullopt).grid_phi->back() == 0.5 * kPi);

  CHECK_THROWS_AS(config_from_json("train", {{"bogus", 1}}, std::nullopt), ConfigError);
  CHECK_THROWS_AS(config_from_json("train", {{"r", 1.5}}, std::nullopt), ConfigError);
  CHECK_THROWS_AS(config_from_json("train", {{"starts", 0}}, std::nullopt), ConfigError);
  CHECK_THROWS_AS(config_from_json("train", {{"model", "big"}}, std::nullopt), ConfigError);
  CHECK_THROWS_AS(config_from_json("train", {{"format", "xml"}}, std::nullopt), ConfigError);
  CHECK_THROWS_AS(config_from_json("train", {{"step", 0}}, std::nullopt), ConfigError);
  CHECK_THROWS_AS(config_from_json("train", nlohmann::json::array(), std::nullopt), ConfigError);
}

TEST_CASE("train examples") {
  SUBCASE("zero-moment target") {
    const auto res = invoke({"train", "--r", "0.70710678118654757", "--phi", "0.75"});
    CHECK(res.code == kOk);
    const auto rows = lines(res.out);
    REQUIRE(rows.size() == 2);
    const auto head = fields(rows[0]);
    const auto row = fields(rows[1]);
    REQUIRE(head.size() == row.size());
    CHECK(head[3] == "s_min_bits");
    CHECK(std::stod(row[3]) == doctest::Approx(2.0).epsilon(1e-3));
  }
  SUBCASE("first-quadrant target in JSON") {
    const auto res = invoke({"train", "--r", "0.5", "--phi", "0.25", "--format", "json"});
    CHECK(res.code == kOk);
    const auto j = nlohmann::json::parse(res.out);
    CHECK(j.at("s_min_bits").get<double>() < 0.01);
    CHECK(j.at("converged").get<bool>());
    CHECK(j.contains("a_Z1Z2"));
  }
  SUBCASE("missing target") { CHECK(invoke({"train"}).code == kConfigError); }
  SUBCASE("non-convergence") {
    CHECK(invoke({"train", "--r", "0.5", "--phi", "0.3", "--max-iter", "1"}).code == kNotConverged);
  }
}

TEST_CASE("hidden model training with several starts") {
  const auto res = invoke({"train", "--model", "hidden3q", "--r", "0.5", "--phi", "0.6", "--starts", "6", "--init",
                           "uniform:-2:2", "--seed", "4", "--format", "json"});
  REQUIRE(res.code != kConfigError);
  const auto j = nlohmann::json::parse(res.out);
  CHECK(j.at("starts").get<int>() == 6);
  CHECK(j.at("best_start").get<int>() < 6);
  CHECK(j.contains("a_Z2Z3"));
}

TEST_CASE("sweep output") {
  TempDir dir;
  const std::string out = dir.file("sweep.csv");
  const auto res = invoke({"sweep", "--grid-r", "0:1:3", "--grid-phi", "0:1.5:4", "--out", out});
  CHECK(res.code != kConfigError);
  const auto rows = lines(slurp(out));
  REQUIRE(rows.size() == 1 + 12);
  CHECK(rows[0] == "r,phi,s_min_bits,converged,grad_norm");
  // r-major order.
  CHECK(fields(rows[1])[0] == "0");
  CHECK(fields(rows[4])[0] == "0");
  CHECK(fields(rows[5])[0] == "0.5");
  CHECK(std::stod(fields(rows[2])[1]) == doctest::Approx(0.5 * kPi));

  const auto again = invoke({"sweep", "--grid-r", "0:1:3", "--grid-phi", "0:1.5:4", "--out", dir.file("again.csv")});
  CHECK(slurp(out) == slurp(dir.file("again.csv")));

  const auto json = invoke({"sweep", "--grid-r", "0.5", "--grid-phi", "0.25", "--format", "json"});
  const auto j = nlohmann::json::parse(json.out);
  REQUIRE(j.at("rows").size() == 1);
  for (const char* key : {"r", "phi", "s_min_bits", "converged", "grad_norm"}) CHECK(j["rows"][0].contains(key));
}

TEST_CASE("default sweep has the full grid") {
  TempDir dir;
  const std::string out = dir.file("full.csv");
  const auto res = invoke({"sweep", "--out", out, "--threads", "2"});
  CHECK(res.code != kConfigError);
  const auto rows = lines(slurp(out));
  CHECK(rows.size() == 1 + 21 * 121);
  double first_quadrant_min = 1e9;
  double near_7pi4 = -1;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const auto f = fields(rows[k]);
    const double r = std::stod(f[0]), phi = std::stod(f[1]), s = std::stod(f[2]);
    if (r > 0 && r < 1 && phi > 0 && phi < kPi / 2) first_quadrant_min = std::min(first_quadrant_min, s);
    if (std::abs(r - 0.7) < 1e-12 && std::abs(phi - 1.75 * kPi) < 1e-12) near_7pi4 = s;
  }
  CHECK(first_quadrant_min < 0.01);
  // The grid cell nearest (sqrt(2)/2, 7pi/4) sits at r = 0.7.
  CHECK(near_7pi4 == doctest::Approx(2.0).epsilon(1e-2));
}

TEST_CASE("baseline examples") {
  const auto rim = invoke({"baseline", "--mode", "r1", "--grid-phi", "0,0.25"});
  CHECK(rim.code == kOk);
  const auto rows = lines(rim.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "x,analytic_bits");
  CHECK(rows[1] == "0,0");
  CHECK(std::stod(fields(rows[2])[1]) == doctest::Approx(1.0).epsilon(1e-14));

  const auto diag = invoke({"baseline", "--mode", "phi3pi4", "--grid-r", "0.70710678118654757"});
  CHECK(std::stod(fields(lines(diag.out)[1])[1]) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(lines(invoke({"baseline"}).out).size() == 1 + 121);
  CHECK(invoke({"baseline", "--mode", "rim"}).code == kConfigError);
}

TEST_CASE("geometry examples") {
  TempDir dir;
  const std::string out = dir.file("geo.csv");
  const auto res = invoke({"geometry", "--grid-r", "0.5", "--grid-phi", "0.25,0.6666666666666666,0.75,1.25",
                           "--samples", "500", "--out", out});
  CHECK(res.code == kOk);
  const auto rows = lines(slurp(out));
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == "r,phi,a_star,b_star,det_hessian,boundary,fidelity,gap,singular");
  CHECK(fields(rows[1])[5] == "true");
  CHECK(fields(rows[2])[5] == "false");
  CHECK(std::stod(fields(rows[2])[4]) < 0.0);
  CHECK(fields(rows[3])[8] == "true");
  CHECK(fields(rows[4])[5] == "true");

  const auto cloud = lines(slurp(dir.file("geo_cloud.csv")));
  REQUIRE(cloud.size() == 501);
  CHECK(cloud[0] == "z1_plus_z2,x1_plus_x2,z1z2");
  for (std::size_t k = 1; k < cloud.size(); ++k) {
    const auto f = fields(cloud[k]);
    CHECK(std::abs(std::stod(f[0])) <= 2.0 + 1e-12);
    CHECK(std::abs(std::stod(f[1])) <= 2.0 + 1e-12);
    CHECK(std::abs(std::stod(f[2])) <= 1.0 + 1e-12);
  }
  CHECK(lines(invoke({"geometry"}).out).size() == 1 + 400);
}

TEST_CASE("symcheck") {
  const auto res = invoke({"symcheck", "--trials", "5", "--seed", "3"});
  CHECK(res.code == kOk);
  const auto rows = lines(res.out);
  REQUIRE(rows.size() == 1 + 5 * 16);
  CHECK(rows[0] == "op,r,phi,lhs_bits,rhs_bits,abs_diff");
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const auto f = fields(rows[k]);
    CHECK(std::stod(f[5]) < 1e-10);
    if (f[0] == "I1I2*I3") CHECK(f[5] == "0");
    if (f[0] == "X1X2*I3") {
      // lhs is taken at the mirrored angle, so it matches rhs only through the map.
      CHECK(std::abs(std::stod(f[3]) - std::stod(f[4])) < 1e-10);
    }
  }
  const auto visible = invoke({"symcheck", "--trials", "2", "--model", "visible2q"});
  CHECK(lines(visible.out).size() == 1 + 2 * 4);
}

TEST_CASE("gradcheck") {
  const auto vis = invoke({"gradcheck", "--trials", "20"});
  CHECK(vis.code == kOk);
  const auto rows = lines(vis.out);
  REQUIRE(rows.size() == 21);
  CHECK(rows[0] == "trial,r,phi,max_rel_err,max_abs_err_small");
  for (std::size_t k = 1; k < rows.size(); ++k) CHECK(std::stod(fields(rows[k])[3]) < 1e-6);
  CHECK(invoke({"gradcheck", "--trials", "10", "--model", "hidden3q"}).code == kOk);
  CHECK(invoke({"gradcheck", "--step", "0"}).code == kConfigError);
  // A huge step breaks agreement and is reported as a violation.
  CHECK(invoke({"gradcheck", "--trials", "3", "--step", "0.5"}).code == kPropertyViolation);
}

TEST_CASE("config file with flag overrides") {
  TempDir dir;
  const std::string cfg = dir.file("run.json");
  std::ofstream(cfg) << R"({"r": 0.5, "phi": 0.25, "format": "json", "seed": 11})";
  const auto from_file = invoke({"train", "--config", cfg});
  CHECK(from_file.code == kOk);
  CHECK(nlohmann::json::parse(from_file.out).at("r").get<double>() == 0.5);
  const auto overridden = invoke({"train", "--config", cfg, "--r", "0.6"});
  CHECK(nlohmann::json::parse(overridden.out).at("r").get<double>() == 0.6);

  std::ofstream(dir.file("bad.json")) << "{not json";
  CHECK(invoke({"train", "--config", dir.file("bad.json")}).code == kConfigError);
  CHECK(invoke({"train", "--config", dir.file("missing.json")}).code == kConfigError);
}

TEST_CASE("seed falls back to QBM_SEED") {
  ::setenv("QBM_SEED", "5", 1);
  const auto env = invoke({"symcheck", "--trials", "1"});
  const auto explicit_seed = invoke({"symcheck", "--trials", "1", "--seed", "5"});
  ::unsetenv("QBM_SEED");
  const auto bare = invoke({"symcheck", "--trials", "1"});
  CHECK(env.out == explicit_seed.out);
  CHECK(env.out != bare.out);
  ::setenv("QBM_SEED", "nope", 1);
  CHECK(invoke({"symcheck", "--trials", "1"}).code == kConfigError);
  ::unsetenv("QBM_SEED");
}

TEST_CASE("binary exit codes") {
  TempDir dir;
  CHECK(shell("--help") == 0);
  CHECK(shell("") == 1);
  CHECK(shell("frobnicate") == 1);
  CHECK(shell("train --r 0.5 --phi 0.25 --out " + dir.file("t.csv")) == 0);
  CHECK(fs::exists(dir.file("t.csv")));
  CHECK(shell("train --r 0.5 --phi 0.3 --max-iter 1") == 2);
  CHECK(shell("train --r 0.5") == 1);
  CHECK(shell("gradcheck --trials 2 --step 0.5") == 3);
  CHECK(shell("symcheck --trials 2") == 0);
  CHECK(shell("sweep --grid-r 0.5 --grid-phi 3") == 1);
}

TEST_CASE("outputs are byte-identical on rerun") {
  TempDir dir;
  const std::vector<std::string> commands{
      "train --model hidden3q --r 0.6 --phi 0.3 --starts 3 --init uniform:-2:2 --seed 9",
      "sweep --grid-r 0:1:4 --grid-phi 0:2:9 --starts 2 --init uniform:-1:1 --seed 2",
      "baseline --mode phi3pi4",
      "geometry --samples 2000 --seed 5",
      "symcheck --trials 4 --seed 8",
      "gradcheck --trials 4 --model hidden3q --seed 8",
  };
  for (std::size_t k = 0; k < commands.size(); ++k) {
    const std::string a = dir.file("a" + std::to_string(k) + ".csv");
    const std::string b = dir.file("b" + std::to_string(k) + ".csv");
    shell(commands[k] + " --out " + a + " --threads 1");
    shell(commands[k] + " --out " + b + " --threads 3");
    INFO(commands[k]);
    CHECK(fs::file_size(a) > 0);
    CHECK(slurp(a) == slurp(b));
  }
  CHECK(slurp(dir.file("a3_cloud.csv")) == slurp(dir.file("b3_cloud.csv")));
}
