#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "support/random.hpp"

using namespace hardyiso;
using namespace hardyiso::testing;
using hardyiso::io::Json;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("hardyiso_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliResult run(const std::string& args) const {
    const fs::path out = dir_ / "stdout.txt";
    const fs::path err = dir_ / "stderr.txt";
    const std::string cmd = std::string(HARDYISO_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  fs::path write(const std::string& name, const Json& j) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << j.dump(2);
    return p;
  }

  static std::string data(const std::string& name) { return std::string(HARDYISO_DATA_DIR) + "/" + name; }

  fs::path dir_;
};

const std::string kPhiIJson = R"('{"lambda":{"re":0,"im":1},"a":{"re":0.5,"im":0.5}}')";

bool have_jsonschema() { return std::system("python3 -c 'import jsonschema' >/dev/null 2>&1") == 0; }

/// Validates each (schema name, instance file) pair; returns the validator's report.
std::string validate(const fs::path& dir, const std::vector<std::pair<std::string, fs::path>>& pairs) {
  Json list = Json::array();
  for (const auto& [schema, file] : pairs) list.push_back({std::string(HARDYISO_SCHEMA_DIR) + "/" + schema + ".schema.json", file.string()});
  std::ofstream(dir / "pairs.json") << list.dump();
  std::ofstream(dir / "check.py") << R"(import json, sys, jsonschema
bad = []
for schema, path in json.load(open(sys.argv[1])):
    validator = jsonschema.Draft202012Validator(json.load(open(schema)))
    for line in open(path).read().splitlines() if path.endswith('.jsonl') else [open(path).read()]:
        for err in validator.iter_errors(json.loads(line)):
            bad.append(path + ': ' + err.message)
print('\n'.join(bad[:20]))
sys.exit(1 if bad else 0)
)";
  const fs::path report = dir / "report.txt";
  const std::string cmd = "python3 " + (dir / "check.py").string() + " " + (dir / "pairs.json").string() + " >" +
                          report.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return status == 0 ? std::string() : "validation failed:\n" + slurp(report);
}

}  // namespace

TEST_F(Cli, ClassifyPhiI) {
  const CliResult r = run("classify --phi " + kPhiIJson);
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["kind"], "Parabolic");
  ASSERT_EQ(j["fixed_points"].size(), 1u);
  EXPECT_NEAR(j["fixed_points"][0]["re"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(j["fixed_points"][0]["im"].get<double>(), 0.0, 1e-12);
}

TEST_F(Cli, ClassifyFromFile) {
  const CliResult r = run("classify --phi " + data("psi_half.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["kind"], "Hyperbolic");
}

TEST_F(Cli, IterateThreeAtOrigin) {
  const CliResult r = run("iterate --phi " + kPhiIJson + R"( --n 3 --at '{"re":0,"im":0}')");
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  // (n - (n - i) z) / (n + i - n z) at z = 0, n = 3.
  const Complex expected = 3.0 / (3.0 + kI);
  EXPECT_NEAR(j["value"]["re"].get<double>(), expected.real(), 1e-14);
  EXPECT_NEAR(j["value"]["im"].get<double>(), expected.imag(), 1e-14);
  EXPECT_NEAR(expected.real(), 0.9, 1e-15);
  EXPECT_NEAR(expected.imag(), -0.3, 1e-15);
}

TEST_F(Cli, ComposeEvaluates) {
  const CliResult r = run("compose --outer " + kPhiIJson + " --inner " + kPhiIJson + R"( --at '{"re":0,"im":0}')");
  ASSERT_EQ(r.code, 0) << r.err;
  const Complex expected = 2.0 / (2.0 + kI);
  const Json j = Json::parse(r.out);
  EXPECT_NEAR(j["value"]["re"].get<double>(), expected.real(), 1e-14);
  EXPECT_NEAR(j["value"]["im"].get<double>(), expected.imag(), 1e-14);
}

TEST_F(Cli, CrownoverWritesEvidenceCsv) {
  const fs::path csv = dir_ / "ev.csv";
  const CliResult r = run("crownover --spec " + data("shift_psi_half.json") + " --evidence 1000 --out " + csv.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["verdict"], "NotCrownover");
  EXPECT_EQ(j["reason"], "HyperbolicSymbol");
  EXPECT_EQ(j["evidence_csv"], csv.string());
  std::istringstream in(slurp(csv));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "n,re_b,im_b,one_minus_abs,partial_sum");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 1000);
}

TEST_F(Cli, CrownoverEllipticAndConstructions) {
  CliResult r = run("crownover --spec " + data("rotation_pi_7.json") + " --evidence 500");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["verdict"], "Crownover");
  EXPECT_EQ(Json::parse(r.out)["evidence"]["growth"], "Linear");

  r = run("crownover --spec " + data("backward_phi_i.json") + " --evidence 100");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["reason"], "ConstructedDivergent");
}

TEST_F(Cli, OrbitCsvToStdout) {
  const CliResult r = run("orbit --phi " + data("phi_i.json") + " --n 10");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 11u);
  EXPECT_EQ(lines[1].substr(0, 2), "0,");
}

TEST_F(Cli, OrbitJsonAndCsv) {
  const fs::path csv = dir_ / "orbit.csv";
  const CliResult r = run("orbit --forward --phi " + data("phi_i.json") + " --n 2000 --csv " + csv.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["verdict"], "Blaschke");
  EXPECT_EQ(j["terms"], 2000);
  EXPECT_TRUE(fs::exists(csv));
}

TEST_F(Cli, UndeterminedExitCode) {
  // A zero 1e-5 off the commutant orbit leaves a residual between 10 tol and sqrt(tol).
  const IsometrySpec s1 = [] {
    IsometrySpec s;
    s.phi = DiscAutomorphism::hyperbolic_standard(0.5);
    s.psi_factors = {DiscAutomorphism{}};
    return s;
  }();
  IsometrySpec s2 = s1;
  s2.psi_factors = {DiscAutomorphism(1.0, Complex(0.0, 1e-5))};
  const CliResult r = run("equiv --tol 1e-8 --s1 " + write("s1.json", io::to_json(s1)).string() + " --s2 " +
                    write("s2.json", io::to_json(s2)).string());
  EXPECT_EQ(r.code, 3) << r.out << r.err;
  EXPECT_EQ(Json::parse(r.out)["decision"], "Undetermined");
}

TEST_F(Cli, EquivRoundTrip) {
  Rng rng(60);
  const auto s1 = random_spec(rng, random_hyperbolic(rng), 1);
  const auto s2 = transport(s1, random_automorphism(rng), random_unimodular(rng));
  const CliResult r = run("equiv --s1 " + write("s1.json", io::to_json(s1)).string() + " --s2 " +
                    write("s2.json", io::to_json(s2)).string());
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["decision"], "Equivalent");
  EXPECT_LE(j["witness"]["residual"].get<double>(), 1e-8);
}

TEST_F(Cli, CommutantAndConstruct) {
  CliResult r = run("commutant --phi " + kPhiIJson + " --t 0.5 --eta " + kPhiIJson);
  ASSERT_EQ(r.code, 0) << r.err;
  Json j = Json::parse(r.out);
  EXPECT_EQ(j["commutes"], true);
  EXPECT_TRUE(j.contains("element"));

  r = run("construct --phi " + kPhiIJson + " --kind nonzero --K 6");
  ASSERT_EQ(r.code, 0) << r.err;
  j = Json::parse(r.out)["construction"];
  EXPECT_EQ(j["indices"].size(), 6u);
  EXPECT_LT(j["double_sum_bound"].get<double>(), j["budget"].get<double>());

  r = run("construct --phi " + kPhiIJson + " --kind zero --N-trunc 512");
  ASSERT_EQ(r.code, 0) << r.err;
  j = Json::parse(r.out)["identity_check"];
  EXPECT_LE(j["defect"].get<double>(), j["bound"].get<double>());
}

TEST_F(Cli, ParseErrorsExitTwo) {
  for (const std::string args : {std::string("classify --phi '{\"lambda\":'"), std::string("classify --phi '{\"a\":1}'"),
                                 std::string("classify --bogus 1"), std::string("nosuchcommand"),
                                 std::string("iterate --phi " + kPhiIJson + " --n many")}) {
    const CliResult r = run(args);
    EXPECT_EQ(r.code, 2) << args;
    // A single line holding one JSON object.
    ASSERT_FALSE(r.err.empty()) << args;
    EXPECT_EQ(r.err.find('\n'), r.err.size() - 1) << args;
    const Json e = Json::parse(r.err);
    EXPECT_TRUE(e.contains("error"));
    EXPECT_TRUE(e.contains("message"));
  }
}

TEST_F(Cli, InvalidInputExitsFour) {
  CliResult r = run(R"(classify --phi '{"lambda":{"re":1,"im":0},"a":{"re":2,"im":0}}')");
  EXPECT_EQ(r.code, 4);
  EXPECT_EQ(Json::parse(r.err)["error"], "DomainError");

  IsometrySpec onto;
  onto.phi = DiscAutomorphism::hyperbolic_standard(0.5);
  r = run("crownover --spec " + write("onto.json", io::to_json(onto)).string());
  EXPECT_EQ(r.code, 4);
  EXPECT_EQ(Json::parse(r.err)["error"], "ZeroCodimension");

  r = run("construct --phi '{\"lambda\":{\"re\":0,\"im\":1},\"a\":{\"re\":0,\"im\":0}}'");
  EXPECT_EQ(r.code, 4);
  EXPECT_EQ(Json::parse(r.err)["error"], "WrongClass");

  r = run("verify --spec " + data("shift_phi_i.json") + " --N 100");
  EXPECT_EQ(r.code, 4);
}

TEST_F(Cli, VerifyIsDeterministic) {
  const std::string args = "verify --spec " + data("shift_phi_i.json") + " --seed 7 --trials 3 --degree 12 --N 1024";
  const CliResult a = run(args);
  const CliResult b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const Json j = Json::parse(a.out);
  EXPECT_EQ(j["reports"].size(), 3u);
  EXPECT_LE(j["max_rel_defect"].get<double>(), 1e-6);
  EXPECT_NE(run("verify --spec " + data("shift_phi_i.json") + " --seed 8 --trials 3 --degree 12 --N 1024").out, a.out);
}

TEST_F(Cli, RhoOutput) {
  const CliResult r = run("rho --phi " + data("phi_i.json") + " --psi " + data("psi_half.json") + " --p 4 --N 1024");
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_LE(j["spread"].get<double>(), 1e-9);
  const Complex closed = io::complex_from_json(j["rho_closed"]);
  const Complex numeric = io::complex_from_json(j["rho_numeric"]);
  EXPECT_LE(std::abs(closed - numeric), 1e-8);
}

TEST_F(Cli, OutputsMatchSchemas) {
  if (!have_jsonschema()) GTEST_SKIP() << "python3 jsonschema not available";
  std::vector<std::pair<std::string, fs::path>> pairs;
  auto capture = [&](const std::string& schema, const std::string& args) {
    const CliResult r = run(args);
    ASSERT_TRUE(r.code == 0 || r.code == 3) << args << "\n" << r.err;
    const fs::path p = dir_ / (std::to_string(pairs.size()) + ".json");
    std::ofstream(p) << r.out;
    pairs.emplace_back(schema, p);
  };
  capture("classification", "classify --phi " + data("phi_i.json"));
  capture("classification", "classify --phi " + data("psi_half.json"));
  capture("convergence", "orbit --phi " + data("phi_i.json") + " --n 100 --csv " + (dir_ / "o.csv").string());
  capture("crownover", "crownover --spec " + data("shift_phi_i.json") + " --evidence 200");
  capture("crownover", "crownover --spec " + data("rotation_pi_7.json") + " --evidence 200");
  capture("equivalence", "equiv --s1 " + data("shift_phi_i.json") + " --s2 " + data("shift_psi_half.json"));
  capture("equivalence", "equiv --s1 " + data("shift_phi_i.json") + " --s2 " + data("shift_phi_i.json"));
  capture("verify", "verify --spec " + data("backward_phi_i.json") + " --trials 2 --degree 4 --N 256 --N-trunc 64");
  capture("rho", "rho --phi " + data("phi_i.json") + " --psi " + data("psi_half.json"));
  capture("automorphism", "commutant --phi " + data("phi_i.json") + " --t 0.25 --out " + (dir_ / "c.json").string());
  // commutant writes its report to --out; validate the element it carries.
  const Json com = Json::parse(slurp(dir_ / "c.json"));
  std::ofstream(pairs.back().second) << com["element"].dump();

  const CliResult bad = run("classify --phi '{'");
  std::ofstream(dir_ / "err.json") << bad.err;
  pairs.emplace_back("error", dir_ / "err.json");

  for (const char* name : {"phi_i.json", "psi_half.json"}) pairs.emplace_back("automorphism", data(name));
  for (const char* name : {"shift_phi_i.json", "shift_psi_half.json", "rotation_pi_7.json", "backward_phi_i.json"}) {
    pairs.emplace_back("isometry_spec", data(name));
  }
  EXPECT_EQ(validate(dir_, pairs), "");
}

TEST_F(Cli, RandomSpecsMatchSchema) {
  if (!have_jsonschema()) GTEST_SKIP() << "python3 jsonschema not available";
  Rng rng(61);
  std::ofstream lines(dir_ / "specs.jsonl");
  std::vector<std::pair<std::string, fs::path>> pairs = {{"isometry_spec", dir_ / "specs.jsonl"}};
  for (int i = 0; i < 1000; ++i) {
    auto s = random_spec(rng, random_automorphism(rng), static_cast<std::size_t>(i % 4), 1.0 + uniform(rng, 0.0, 4.0));
    if (i % 10 == 0) s.infinite = construct_nonzero_intersection(DiscAutomorphism::hyperbolic_standard(0.5), 3);
    lines << io::to_json(s).dump() << '\n';
  }
  lines.close();
  // A sample of them also goes through the CLI, whose output must validate too.
  for (int i = 0; i < 20; ++i) {
    const auto s = random_spec(rng, i % 2 ? random_parabolic(rng) : random_elliptic(rng), 1 + i % 3);
    const fs::path spec = write("s" + std::to_string(i) + ".json", io::to_json(s));
    const CliResult r = run("crownover --evidence 64 --spec " + spec.string());
    ASSERT_EQ(r.code, 0) << r.err;
    const fs::path p = dir_ / ("c" + std::to_string(i) + ".json");
    std::ofstream(p) << r.out;
    pairs.emplace_back("crownover", p);
  }
  EXPECT_EQ(validate(dir_, pairs), "");
}
