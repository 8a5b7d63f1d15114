#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dbkit/cli.hpp"
#include "json.hpp"

using namespace dbkit;
using nlohmann::json;

namespace {

struct RunResult {
  int code;
  std::string out, err;
};

RunResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("analyze a preset as json") {
  RunResult r = run({"analyze", "jr-a1", "--format", "json"});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["schema"] == 1);
  CHECK(j["constraints"].size() == 4);
  CHECK(j["constraints"][0]["provenance"] == "primary");
  CHECK(j["constraints"][1]["provenance"] == "secondary");
  CHECK(j["delta"]["entries"].size() == 4);
  // the (4,4) entry carries the derivative kernel: coeffs ["0", "2"]
  CHECK(j["delta"]["entries"][3][3]["coeffs"][1] == "2");
  CHECK(j["classification"]["fully_second_class"] == true);
  CHECK(j["commutators"].is_array());
  CHECK_FALSE(j["delta_inverse"].is_null());
}

TEST_CASE("analyze the gauge-invariant preset flags first-class content") {
  RunResult r = run({"analyze", "jr-wz"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("first-class directions remain (kernel dimension 2") != std::string::npos);
  CHECK(r.out.find("commutator") == std::string::npos);  // no table printed

  RunResult g = run({"analyze", "jr-wz-gaugefixed", "--format", "json"});
  REQUIRE(g.code == 0);
  json j = json::parse(g.out);
  CHECK(j["constraints"].size() == 6);
  CHECK(j["classification"]["fully_second_class"] == true);
  CHECK(j["commutators"].size() == 11);
}

TEST_CASE("parameter bindings reproduce the specialized chain") {
  RunResult sym = run({"analyze", "jr-symbolic", "--param", "a=1", "--param", "e=1",
                       "--format", "json"});
  RunResult a1 = run({"analyze", "jr-a1", "--format", "json"});
  REQUIRE(sym.code == 0);
  json js = json::parse(sym.out), ja = json::parse(a1.out);
  CHECK(js["constraints"] == ja["constraints"]);
  CHECK(js["delta"] == ja["delta"]);
  CHECK(js["commutators"] == ja["commutators"]);
}

TEST_CASE("identical invocations are byte-identical") {
  for (auto args : std::vector<std::vector<std::string>>{
           {"analyze", "jr-symbolic", "--format", "json"},
           {"analyze", "jr-wz-gaugefixed", "--format", "json"},
           {"verify", "ansatz", "--a", "2", "--e", "1", "--k", "0.7"},
           {"verify", "oracle", "--preset", "jr-a1", "--n", "128", "--seeds", "1"}}) {
    RunResult r1 = run(args);
    RunResult r2 = run(args);
    CHECK(r1.code == r2.code);
    CHECK(r1.out == r2.out);
  }
}

TEST_CASE("model files and gauge files load from disk") {
  std::string dir = "cli_test_tmp";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir + "/scalar.lag");
    f << "# free scalar\nfields phi;\nL = 1/2*dt(phi)^2 - 1/2*dx(phi)^2;\n";
  }
  RunResult r = run({"analyze", dir + "/scalar.lag", "--format", "json"});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["model"]["name"] == "scalar");
  CHECK(j["constraints"].empty());
  CHECK(j["commutators"].size() == 1);

  // gauge file on the gauge-invariant preset
  {
    std::ofstream f(dir + "/fix.gauge");
    f << "-dx(theta)\n-p_phi - dx(phi) - 2*A1 + A0 + dx(theta)\n";
  }
  RunResult g = run({"analyze", "jr-wz", "--gauge", dir + "/fix.gauge", "--format", "json"});
  REQUIRE(g.code == 0);
  CHECK(json::parse(g.out)["constraints"].size() == 6);
}

TEST_CASE("error paths and exit codes") {
  // unknown preset / missing file
  CHECK(run({"analyze", "jr-nope"}).code == 1);
  // parse error in a model file
  std::string dir = "cli_test_tmp";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir + "/bad.lag");
    f << "fields phi;\nL = phi^3;\n";
  }
  RunResult bad = run({"analyze", dir + "/bad.lag"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("non-quadratic") != std::string::npos);

  // incomplete gauge fixing obstructs the analysis: exit 2
  {
    std::ofstream f(dir + "/half.gauge");
    f << "-dx(theta)\n";
  }
  RunResult g = run({"analyze", "jr-wz", "--gauge", dir + "/half.gauge"});
  CHECK(g.code == 2);
  CHECK(g.err.find("gauge fixing incomplete") != std::string::npos);

  // domain error in the ansatz suite: exit 1
  RunResult a = run({"verify", "ansatz", "--a", "1", "--e", "1", "--k", "0.5"});
  CHECK(a.code == 1);
  CHECK(a.err.find("a > 1") != std::string::npos);

  // invalid flags exit 1
  CHECK(run({"verify", "oracle"}).code == 1);                    // missing --preset
  CHECK(run({"analyze", "jr-a1", "--format", "xml"}).code == 1); // bad format
  CHECK(run({"analyze", "jr-symbolic", "--param", "a=x"}).code == 1);
}

TEST_CASE("verify suites succeed on their defaults") {
  RunResult a = run({"verify", "ansatz", "--a", "2", "--e", "1", "--k", "0.7"});
  CHECK(a.code == 0);
  json ja = json::parse(a.out);
  CHECK(ja["pass"] == true);
  CHECK(ja["m2"] == 4.0);

  RunResult o = run({"verify", "oracle", "--preset", "jr-a1", "--n", "256", "--seeds", "1"});
  CHECK(o.code == 0);
  CHECK(json::parse(o.out)["pass"] == true);

  RunResult l = run({"verify", "lattice", "--preset", "jr-a1", "--n", "64", "--dt", "1e-3",
                     "--t-end", "0.5"});
  CHECK(l.code == 0);
  CHECK(json::parse(l.out)["pass"] == true);
}
