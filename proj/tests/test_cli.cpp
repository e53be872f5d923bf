#include <catch2/catch_amalgamated.hpp>

#include <gaussfock/cli.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gaussfock;
namespace fs = std::filesystem;
using Catch::Approx;

namespace {

fs::path test_dir() {
  const fs::path dir = fs::temp_directory_path() / "gaussfock_cli_tests";
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const std::string& name, const std::string& content) {
  const fs::path p = test_dir() / name;
  std::ofstream f(p);
  f << content;
  return p;
}

fs::path write_state(const std::string& name, const GaussianState& state) {
  return write_file(name, state_to_json(state).dump());
}

struct RunResult {
  int code = 0;
  json out;
};

RunResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream oss;
  RunResult r;
  r.code = cli::run(args, oss);
  if (!oss.str().empty()) r.out = json::parse(oss.str());
  return r;
}

}  // namespace

TEST_CASE("validate reports and exit codes", "[cli]") {
  const auto good = write_state("vac.json", vacuum(1));
  auto res = run_cli({"validate", good.string()});
  CHECK(res.code == 0);
  CHECK(res.out.at("verdict").get<bool>());
  CHECK(res.out.at("command") == "validate");

  const GaussianState half(ComplexVector::Zero(1),
                           RealBlockOperator(0.5 * Matrix::Identity(2, 2)),
                           TailModel::identity());
  const auto bad = write_state("half.json", half);
  res = run_cli({"validate", bad.string()});
  CHECK(res.code == 1);
  CHECK_FALSE(res.out.at("cond1_psd").get<bool>());
  CHECK_FALSE(res.out.at("verdict").get<bool>());
}

TEST_CASE("malformed input exits with code 2", "[cli]") {
  const auto broken = write_file("broken.json", "{ this is not json");
  CHECK(run_cli({"validate", broken.string()}).code == 2);
  CHECK(run_cli({"validate", (test_dir() / "absent.json").string()}).code == 2);
  const auto schema = write_file("noschema.json", R"({"modes": 1})");
  CHECK(run_cli({"validate", schema.string()}).code == 2);
  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("williamson subcommand", "[cli]") {
  const auto th = write_state("th3.json", thermal_state({3.0}));
  const auto res = run_cli({"williamson", th.string()});
  REQUIRE(res.code == 0);
  CHECK(res.out.at("verdict").get<bool>());
  const auto d = res.out.at("d").get<std::vector<double>>();
  REQUIRE(d.size() == 1);
  CHECK(d[0] == Approx(3.0).epsilon(1e-10));
  CHECK(res.out.at("symplectic_defect").get<double>() < 1e-10);
  CHECK(res.out.at("relative_reconstruction_defect").get<double>() < 1e-10);
}

TEST_CASE("spectrum subcommand", "[cli]") {
  const auto th = write_state("th3s.json", thermal_state({3.0}));
  const auto res = run_cli({"spectrum", th.string(), "--top", "5"});
  REQUIRE(res.code == 0);
  const auto& lines = res.out.at("lines");
  REQUIRE(lines.size() == 5);
  for (int k = 0; k < 5; ++k) {
    CHECK(lines[k].at("value").get<double>() ==
          Approx(0.5 * std::pow(0.5, k)).epsilon(1e-10));
    CHECK(lines[k].at("occupation").get<std::vector<int>>() == std::vector<int>{k});
  }
  CHECK(res.out.at("partial_sum").get<double>() == Approx(0.96875).epsilon(1e-10));
  CHECK(res.out.at("verdict").get<bool>());

  // no density matrix when the tail is not trace class
  const auto heavy = write_state("heavy.json", vacuum(1, TailModel::power(1.0, 0.9)));
  CHECK(run_cli({"spectrum", heavy.string()}).code == 1);
}

TEST_CASE("decompose subcommand", "[cli]") {
  const auto th = write_state("th3d.json", thermal_state({3.0}));
  const auto res = run_cli({"decompose", th.string()});
  REQUIRE(res.code == 0);
  CHECK(res.out.at("verdict").get<bool>());
  CHECK(res.out.at("relative_reconstruction_defect").get<double>() < 1e-10);
  CHECK(res.out.at("max_symplectic_defect").get<double>() < 1e-10);
}

TEST_CASE("displace emits a state and round trips", "[cli]") {
  std::mt19937_64 rng(401);
  const GaussianState original(ComplexVector::Zero(1),
                               RealBlockOperator(3.0 * Matrix::Identity(2, 2)),
                               TailModel::identity());
  const auto path = write_state("orig.json", original);

  const auto fwd = run_cli({"displace", path.string(), "--alpha", "[[0.25,-0.5]]"});
  REQUIRE(fwd.code == 0);
  // the output is a plain state document, chainable into other subcommands
  CHECK(fwd.out.contains("S0"));
  const auto mid = write_file("mid.json", fwd.out.dump());
  const auto back = run_cli({"displace", mid.string(), "--alpha", "[[-0.25,0.5]]"});
  REQUIRE(back.code == 0);

  const GaussianState restored = state_from_json(back.out);
  CHECK((restored.mean() - original.mean()).norm() < 1e-12);
  CHECK((restored.cov().mat() - original.cov().mat()).norm() < 1e-12);

  // displacement with support beyond the block is a hard error
  CHECK(run_cli({"displace", path.string(), "--alpha", "[[0,0],[1,0]]"}).code == 2);
}

TEST_CASE("conjugate subcommand", "[cli]") {
  const auto vac = write_state("vacc.json", vacuum(1));
  const auto mat = write_file("sq.json", "[[2.0, 0.0], [0.0, 0.5]]");
  const auto res = run_cli({"conjugate", vac.string(), "--symplectic", mat.string()});
  REQUIRE(res.code == 0);
  const GaussianState out = state_from_json(res.out);
  Matrix expect(2, 2);
  expect << 4.0, 0.0, 0.0, 0.25;
  CHECK((out.cov().mat() - expect).norm() < 1e-12);

  const auto notS = write_file("notsympl.json", "[[2.0, 0.0], [0.0, 2.0]]");
  CHECK(run_cli({"conjugate", vac.string(), "--symplectic", notS.string()}).code == 2);
}

TEST_CASE("tensor and marginal round trip", "[cli]") {
  const auto a = write_state("ta.json", vacuum(1));
  const auto b = write_state("tb.json", thermal_state({3.0}));
  const auto prod = run_cli({"tensor", a.string(), b.string()});
  REQUIRE(prod.code == 0);
  CHECK(prod.out.at("modes").get<int>() == 2);
  const auto prod_path = write_file("tab.json", prod.out.dump());

  const auto part = run_cli({"marginal", prod_path.string(), "--modes", "1"});
  REQUIRE(part.code == 0);
  const GaussianState back = state_from_json(part.out);
  CHECK((back.cov().mat() - thermal_state({3.0}).cov().mat()).norm() < 1e-12);

  CHECK(run_cli({"marginal", prod_path.string(), "--modes", "5"}).code == 2);
}

TEST_CASE("mix subcommand", "[cli]") {
  const auto a = write_state("ma.json", vacuum(1));
  const auto b = write_state("mb.json", thermal_state({3.0}));
  const auto res =
      run_cli({"mix", a.string(), b.string(), "--theta", "0.78539816339744831"});
  REQUIRE(res.code == 0);
  const GaussianState out = state_from_json(res.out);
  CHECK((out.cov().mat() - 2.0 * Matrix::Identity(2, 2)).norm() < 1e-12);

  // an invalid input state maps to exit code 1 (validation failure)
  const GaussianState half(ComplexVector::Zero(1),
                           RealBlockOperator(0.5 * Matrix::Identity(2, 2)),
                           TailModel::identity());
  const auto bad = write_state("mhalf.json", half);
  CHECK(run_cli({"mix", bad.string(), a.string(), "--theta", "0.3"}).code == 1);
}

TEST_CASE("purify subcommand", "[cli]") {
  const auto th = write_state("pth.json", thermal_state({3.0}));
  const auto res = run_cli({"purify", th.string()});
  REQUIRE(res.code == 0);
  const GaussianState pure = state_from_json(res.out);
  REQUIRE(pure.modes() == 2);
  CHECK(is_pure(pure));
  CHECK((marginal(pure, {0}).cov().mat() - thermal_state({3.0}).cov().mat())
            .cwiseAbs()
            .maxCoeff() < 1e-10);
}

TEST_CASE("tail classify subcommand", "[cli]") {
  const auto geo = write_file("tgeo.json", R"({"kind": "geometric", "a": 2.0, "r": 0.5})");
  auto res = run_cli({"tail", "classify", geo.string()});
  REQUIRE(res.code == 0);
  CHECK(res.out.at("cond2_hilbert_schmidt").get<bool>());
  CHECK(res.out.at("cond3_trace_class").get<bool>());
  CHECK_FALSE(res.out.at("witness").get<std::string>().empty());

  const auto pow = write_file("tpow.json", R"({"kind": "power", "a": 1.0, "p": 0.9})");
  res = run_cli({"tail", "classify", pow.string()});
  REQUIRE(res.code == 0);
  CHECK(res.out.at("cond2_hilbert_schmidt").get<bool>());
  CHECK_FALSE(res.out.at("cond3_trace_class").get<bool>());

  const auto junk = write_file("tjunk.json", R"({"kind": "exotic", "a": 1.0})");
  CHECK(run_cli({"tail", "classify", junk.string()}).code == 2);
}

TEST_CASE("oracle verify-weyl subcommand", "[cli]") {
  const auto res = run_cli(
      {"--seed", "7", "oracle", "verify-weyl", "--cutoff", "30", "--pairs", "3"});
  REQUIRE(res.code == 0);
  CHECK(res.out.at("pass").get<bool>());
  CHECK(res.out.at("max_residual").get<double>() < 1e-6);

  // the same seed reproduces the identical report
  const auto res2 = run_cli(
      {"--seed", "7", "oracle", "verify-weyl", "--cutoff", "30", "--pairs", "3"});
  CHECK(res.out == res2.out);
}

TEST_CASE("oracle verify-cf subcommand", "[cli]") {
  const auto vac = write_state("ovac.json", vacuum(1));
  const auto res = run_cli({"oracle", "verify-cf", vac.string(), "--cutoff", "25",
                            "--samples", "5", "--tol", "1e-8"});
  REQUIRE(res.code == 0);
  CHECK(res.out.at("pass").get<bool>());
  CHECK(res.out.at("max_abs_deviation").get<double>() < 1e-10);

  // the memory cap environment override turns an oversized request into a
  // capacity error (exit code 2)
  setenv("GAUSSFOCK_MEM_CAP", "16", 1);
  const auto capped = run_cli({"oracle", "verify-cf", vac.string(), "--cutoff", "25",
                               "--samples", "5"});
  unsetenv("GAUSSFOCK_MEM_CAP");
  CHECK(capped.code == 2);
}
