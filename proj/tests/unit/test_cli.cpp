#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kCli = CFSLAB_CLI_PATH;

struct Run {
  int code;
  std::string out;
};

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("cfslab_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void put(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

Run run(const std::string& args, const fs::path& dir) {
  fs::path log = dir / "stdout.txt";
  std::string cmd = "'" + kCli + "' " + args + " > '" + log.string() + "' 2>&1";
  int st = std::system(cmd.c_str());
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, slurp(log)};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::stringstream ss(s);
  std::string l;
  while (std::getline(ss, l)) v.push_back(l);
  return v;
}

// psi_0 = identity, psi_1 = diag(2, 1), psi_2 = (1/sqrt 2) [[1, 1], [1, -1]]
const char* kThree = R"({"format": "cfslab.cfs", "version": 1, "n": 1, "N": 2, "weights": [1, 1, 1],
  "points": [
    [[1, 0], [0, 0], [0, 0], [1, 0]],
    [[2, 0], [0, 0], [0, 0], [1, 0]],
    [[0.70710678118654752, 0], [0.70710678118654752, 0], [0.70710678118654752, 0], [-0.70710678118654752, 0]]
  ]})";

const char* kOne = R"({"format": "cfslab.cfs", "version": 1, "n": 1, "N": 2, "weights": [2],
  "points": [[[1, 0], [0, 0], [0, 0], [1, 0]]]})";

}  // namespace

TEST_CASE("usage errors") {
  auto d = scratch("usage");
  CHECK(run("", d).code == 1);
  CHECK(run("frobnicate", d).code == 1);
  CHECK(run("classify", d).code == 1);
  CHECK(run("--help", d).code == 0);
  CHECK(run("--version", d).code == 0);
}

TEST_CASE("classify") {
  auto d = scratch("classify");
  put(d / "one.json", kOne);
  auto r = run("classify --config " + (d / "one.json").string() + " --out " + (d / "o1").string(), d);
  CHECK(r.code == 0);
  auto l = lines(slurp(d / "o1" / "classify.csv"));
  REQUIRE(l.size() == 2);
  CHECK(l[0] == "i,j,class,lagrangian,b_total");
  CHECK(l[1].rfind("0,0,spacelike,0,0", 0) == 0);

  put(d / "three.json", kThree);
  r = run("classify --config " + (d / "three.json").string() + " --out " + (d / "o3").string() + " --threads 2", d);
  CHECK(r.code == 0);
  l = lines(slurp(d / "o3" / "classify.csv"));
  REQUIRE(l.size() == 10);
  const char* want[9] = {"spacelike", "timelike",  "spacelike", "timelike", "timelike",
                         "spacelike", "spacelike", "spacelike", "spacelike"};
  for (int k = 0; k < 9; ++k) {
    std::vector<std::string> f;
    std::stringstream ss(l[k + 1]);
    std::string c;
    while (std::getline(ss, c, ',')) f.push_back(c);
    CHECK(f.at(2) == want[k]);
  }

  put(d / "broken.json", "{\"format\": \"cfslab.cfs\",");
  r = run("classify --config " + (d / "broken.json").string() + " --out " + d.string(), d);
  CHECK(r.code == 2);
  CHECK(r.out.find("line") != std::string::npos);
  CHECK(run("classify --config " + (d / "missing.json").string(), d).code == 5);
}

TEST_CASE("tolerance flags") {
  auto d = scratch("tol");
  put(d / "three.json", kThree);
  CHECK(run("classify --config " + (d / "three.json").string() + " --out " + d.string() + " --tol-eq 1e-6 --tol-real 1e-6", d).code == 0);
  CHECK(run("classify --config " + (d / "three.json").string() + " --out " + d.string() + " --tol-eq 0.5", d).code == 6);
}

TEST_CASE("action") {
  auto d = scratch("action");
  put(d / "one.json", kOne);
  CHECK(run("action --config " + (d / "one.json").string() + " --out " + d.string(), d).code == 0);
  auto j = nlohmann::json::parse(slurp(d / "action.json"));
  CHECK(j["action"].get<double>() == 0.0);
  CHECK(j["volume"].get<double>() == 2.0);

  put(d / "three.json", kThree);
  CHECK(run("action --config " + (d / "three.json").string() + " --out " + d.string() + " --kappa 0.5 --s-vol 1", d).code == 0);
  auto a = nlohmann::json::parse(slurp(d / "action.json"));
  // by hand: pairs (0,1), (1,0) contribute 4.5 each and (1,1) gives 112.5
  CHECK(a["action"].get<double>() == doctest::Approx(121.5).epsilon(1e-13));
  CHECK(a["el_residuals"].size() == 3);

  std::string doubled = kThree;
  doubled.replace(doubled.find("[1, 1, 1]"), 9, "[2, 2, 2]");
  put(d / "three2.json", doubled);
  CHECK(run("action --config " + (d / "three2.json").string() + " --out " + (d / "x2").string(), d).code == 0);
  auto b = nlohmann::json::parse(slurp(d / "x2" / "action.json"));
  CHECK(b["action"].get<double>() == doctest::Approx(4.0 * a["action"].get<double>()).epsilon(1e-14));

  CHECK(run("el --config " + (d / "three.json").string() + " --out " + d.string(), d).code == 0);
  CHECK(lines(slurp(d / "el.csv")).size() == 4);
  CHECK(run("el --config " + (d / "three.json").string() + " --kappa -1", d).code == 1);
}

TEST_CASE("observables") {
  auto d = scratch("obs");
  put(d / "three.json", kThree);
  put(d / "obs.json", R"({"regions": [[0], [1, 2]], "states": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]})");
  auto r = run("observables --config " + (d / "three.json").string() + " --out " + d.string() + " --obs " +
                   (d / "obs.json").string(),
               d);
  CHECK(r.code == 0);
  auto corr = lines(slurp(d / "correlation.csv"));
  CHECK(corr.size() == 4);
  CHECK(corr[0] == "i,0,1,2");
  auto j = nlohmann::json::parse(slurp(d / "observables.json"));
  CHECK(j["states"].size() == 2);
  CHECK(j["states"][0]["delocalized"].get<bool>());
  CHECK(j["regions"][0]["expectation_total"].get<double>() == doctest::Approx(1.0));

  put(d / "bad.json", R"({"states": [[[1, 0]]]})");
  CHECK(run("observables --config " + (d / "three.json").string() + " --out " + d.string() + " --obs " +
                (d / "bad.json").string(),
            d)
            .code == 2);
}

TEST_CASE("kernel") {
  auto d = scratch("kernel");
  put(d / "k.json", R"({"m": 1, "eps": [1e-3], "t": [0, 0.5, 2], "r": [0.1, 1]})");
  CHECK(run("kernel --config " + (d / "k.json").string() + " --out " + d.string(), d).code == 0);
  auto l = lines(slurp(d / "kernel.csv"));
  CHECK(l.size() == 7);
  CHECK(l[0].rfind("t,r,eps", 0) == 0);
  put(d / "k0.json", R"({"eps": [0], "t": [1], "r": [0]})");
  CHECK(run("kernel --config " + (d / "k0.json").string() + " --out " + d.string(), d).code == 3);
}

TEST_CASE("sea-sample") {
  auto d = scratch("sea");
  put(d / "min.json", R"({"k_cut": 0.1, "lattice": [[0, 0, 0, 0], [0.5, 0.1, 0, 0], [1, 0, 0, 0]]})");
  auto r = run("sea-sample --config " + (d / "min.json").string() + " --out " + d.string(), d);
  CHECK(r.code == 0);
  CHECK(r.out.find("N = 2 ") != std::string::npos);
  CHECK(run("classify --config " + (d / "sea.cfs.json").string() + " --out " + d.string(), d).code == 0);
  CHECK(lines(slurp(d / "classify.csv")).size() == 10);

  std::size_t prev = 0;
  std::regex nre("N = ([0-9]+) ");
  for (const char* cut : {"0.5", "1", "2"}) {
    put(d / "c.json", std::string(R"({"k_cut": )") + cut + R"(, "lattice": [[0, 0, 0, 0]]})");
    auto rr = run("sea-sample --config " + (d / "c.json").string() + " --out " + d.string(), d);
    std::smatch m;
    REQUIRE(std::regex_search(rr.out, m, nre));
    std::size_t N = std::stoul(m[1]);
    CHECK(N > prev);
    prev = N;
  }
  put(d / "big.json", R"({"k_cut": 50, "max_entries": 1e6, "lattice": [[0, 0, 0, 0]]})");
  auto big = run("sea-sample --config " + (d / "big.json").string() + " --out " + d.string(), d);
  CHECK(big.code == 4);
  CHECK(big.out.find("about") != std::string::npos);
}

TEST_CASE("sweep and fit") {
  auto d = scratch("sweep");
  put(d / "s.json", R"({"eps_list": [0.1, 0.05, 0.02, 0.01]})");
  auto dry = run("sweep --config " + (d / "s.json").string() + " --dry-run --eps-list 0.2,0.1,0.05 --box-len 4", d);
  CHECK(dry.code == 0);
  auto cfg = nlohmann::json::parse(dry.out);
  CHECK(cfg["eps_list"].size() == 3);
  CHECK(cfg["box_len"].get<double>() == 4.0);
  CHECK_FALSE(fs::exists(d / "sweep.csv"));

  CHECK(run("sweep --config " + (d / "s.json").string() + " --out " + (d / "a").string(), d).code == 0);
  CHECK(run("sweep --config " + (d / "s.json").string() + " --out " + (d / "b").string() + " --threads 3", d).code == 0);
  CHECK(slurp(d / "a" / "sweep.csv") == slurp(d / "b" / "sweep.csv"));
  CHECK(fs::exists(d / "a" / "fit.json"));
  CHECK(slurp(d / "a" / "sweep.svg").find("<svg") == 0);

  auto f = run("fit --config " + (d / "a" / "sweep.csv").string() + " --out " + (d / "f").string(), d);
  CHECK(f.code == 0);
  auto fa = nlohmann::json::parse(slurp(d / "a" / "fit.json"));
  auto ff = nlohmann::json::parse(slurp(d / "f" / "fit.json"));
  CHECK(fa["b"].get<double>() == ff["b"].get<double>());

  CHECK(run("sweep --config " + (d / "s.json").string() + " --eps-list 0.1,0.2,0.15 --dry-run", d).code == 6);
  put(d / "bad.json", R"({"eps_lst": [0.1]})");
  CHECK(run("sweep --config " + (d / "bad.json").string() + " --dry-run", d).code == 2);
  put(d / "two.json", R"({"eps_list": [0.1, 0.05]})");
  CHECK(run("sweep --config " + (d / "two.json").string() + " --out " + (d / "t").string(), d).code == 3);
  CHECK(fs::exists(d / "t" / "sweep.csv"));
}
