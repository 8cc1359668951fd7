// SPDX-License-Identifier: Apache-2.0
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "relohm/cli.hpp"

namespace relohm::cli {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run_cli(const std::string& args) {
  const std::string cmd = std::string(RELOHM_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  CliRun r;
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class CliFiles : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("relohm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

RunConfig base_config(MaterialModel m, Vec3 v, std::vector<double> omega, std::vector<Vec3> k) {
  RunConfig cfg;
  cfg.model = std::move(m);
  cfg.velocity = v;
  cfg.omega_list = std::move(omega);
  cfg.k_list = std::move(k);
  return cfg;
}

SpatialTensor3 sigma_prime_from_row(const std::vector<std::string>& row) {
  SpatialTensor3 s;
  for (int i = 0; i < 9; ++i) {
    s(i / 3, i % 3) = cplx(std::stod(row[8 + 2 * i]), std::stod(row[9 + 2 * i]));
  }
  return s;
}

TEST(Parsing, ListsAndTriples) {
  EXPECT_EQ(parse_list("1, 2.5,-3", "x"), (std::vector<double>{1.0, 2.5, -3.0}));
  EXPECT_THROW(parse_list("1,,2", "x"), ParseError);
  EXPECT_THROW(parse_list("1,abc", "x"), ParseError);
  EXPECT_EQ(parse_triple("0.1,0.2,0.3", "v"), Vec3(0.1, 0.2, 0.3));
  EXPECT_THROW(parse_triple("1,2", "v"), ParseError);
  EXPECT_EQ(parse_triples("0,0,0;1,2,3", "k").size(), 2u);
  EXPECT_EQ(parse_complex_triple("1,0,0,1,2,-2", "E"),
            CVec3(cplx(1.0, 0.0), cplx(0.0, 1.0), cplx(2.0, -2.0)));
  EXPECT_EQ(parse_complex_triple("1,2,3", "E"), CVec3(1.0, 2.0, 3.0));
  EXPECT_THROW(parse_complex_triple("1,2,3,4", "E"), ParseError);
  EXPECT_EQ(parse_format("json"), OutputFormat::structured);
  EXPECT_THROW(parse_format("xml"), ParseError);
}

TEST(Grid, OmegaMajorProductThenPoints) {
  RunConfig cfg;
  cfg.omega_list = {1.0, 2.0};
  cfg.k_list = {Vec3::Zero(), Vec3::UnitX()};
  cfg.points = {{5.0, Vec3::UnitY()}};
  const auto g = cfg.grid();
  ASSERT_EQ(g.size(), 5u);
  EXPECT_EQ(g[1], (Wavevector4{1.0, Vec3::UnitX()}));
  EXPECT_EQ(g[2], (Wavevector4{2.0, Vec3::Zero()}));
  EXPECT_EQ(g[4], (Wavevector4{5.0, Vec3::UnitY()}));
}

TEST(Transform, ZeroVelocityLeavesSigma) {
  const CommandOutput out = cmd_transform(
      base_config(ConstantScalar{cplx(2.0, 0.5)}, Vec3::Zero(), {1.0}, {{0.3, 0.0, 0.0}}));
  ASSERT_EQ(out.exit_code, kExitOk);
  const auto rows = csv_rows(out.data);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0][0], "omega");
  const SpatialTensor3 s = sigma_prime_from_row(rows[1]);
  EXPECT_LT(relative_error(s, SpatialTensor3(cplx(2.0, 0.5) * CMat3::Identity())), 1e-15);
  EXPECT_LT(std::stod(rows[1][26]), 1e-12);
}

TEST(Transform, ScalarAtRestEigenvalues) {
  const cplx s0 = 2.0;
  const CommandOutput out = cmd_transform(
      base_config(ConstantScalar{s0}, {0.0, 0.6, 0.0}, {1.0}, {Vec3::Zero()}));
  ASSERT_EQ(out.exit_code, kExitOk);
  const SpatialTensor3 s = sigma_prime_from_row(csv_rows(out.data)[1]);
  EXPECT_LT(std::abs(s(1, 1) - 1.25 * s0), 1e-14);
  EXPECT_LT(std::abs(s(0, 0) - 0.8 * s0), 1e-14);
  EXPECT_LT(std::abs(s(2, 2) - 0.8 * s0), 1e-14);
  EXPECT_LT(std::abs(s(0, 1)), 1e-15);
}

TEST(Transform, Errors) {
  EXPECT_EQ(cmd_transform(base_config(ConstantScalar{1.0}, {1.5, 0, 0}, {1.0}, {})).exit_code,
            kExitConfig);
  EXPECT_NE(cmd_transform(base_config(ConstantScalar{1.0}, {1.5, 0, 0}, {1.0}, {}))
                .diagnostics.find("SpeedLimit"),
            std::string::npos);
  EXPECT_EQ(cmd_transform(base_config(ConstantScalar{1.0}, {0.5, 0, 0}, {0.5}, {{1.0, 0, 0}}))
                .exit_code,
            kExitDomain);
  EXPECT_EQ(cmd_transform(base_config(ConstantScalar{1.0}, Vec3::Zero(), {0.0}, {})).exit_code,
            kExitDomain);
  EXPECT_EQ(cmd_transform(base_config(ConstantScalar{1.0}, Vec3::Zero(), {1.0, 2.0}, {}))
                .exit_code,
            kExitConfig);
  RunConfig no_model;
  no_model.omega_list = {1.0};
  EXPECT_EQ(cmd_transform(no_model).exit_code, kExitConfig);
}

TEST(Sweep, DrudeAtRestMatchesClosedForm) {
  std::vector<double> omegas;
  for (int i = 1; i <= 10; ++i) omegas.push_back(0.3 * i);
  const Drude d{cplx(1.5, 0.0), 0.8};
  const CommandOutput out = cmd_sweep(base_config(d, Vec3::Zero(), omegas, {}));
  ASSERT_EQ(out.exit_code, kExitOk);
  const auto rows = csv_rows(out.data);
  ASSERT_EQ(rows.size(), 11u);
  EXPECT_EQ(rows[0].size(), 27u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double w = std::stod(rows[i][0]);
    const cplx expected = d.sigma0 / (1.0 - I * w * d.tau);
    const SpatialTensor3 s = sigma_prime_from_row(rows[i]);
    EXPECT_LT(std::abs(s(0, 0) - expected), 1e-15);
    EXPECT_LT(std::abs(s(2, 2) - expected), 1e-15);
  }
}

TEST(Sweep, HeaderColumnOrder) {
  const std::string h = csv_header_sweep();
  EXPECT_EQ(h.rfind("omega,kx,ky,kz,omega_prime,kpx,kpy,kpz,sp00_re,sp00_im,sp01_re", 0), 0u);
  EXPECT_NE(h.find("sp22_re,sp22_im,residual"), std::string::npos);
}

TEST(Sweep, ResonanceRowSkipped) {
  const CommandOutput out = cmd_sweep(base_config(ConstantScalar{1.0}, {0.5, 0.0, 0.0},
                                                  {0.5, 1.0}, {{1.0, 0.0, 0.0}}));
  ASSERT_EQ(out.exit_code, kExitOk);
  EXPECT_EQ(csv_rows(out.data).size(), 2u);
  EXPECT_NE(out.data.find("# skipped,0.5,1,0,0,BoostResonance"), std::string::npos);
  EXPECT_NE(out.diagnostics.find("BoostResonance"), std::string::npos);
}

TEST(Sweep, AllSkippedIsDomainError) {
  const CommandOutput out =
      cmd_sweep(base_config(ConstantScalar{1.0}, {0.5, 0.0, 0.0}, {0.5}, {{1.0, 0.0, 0.0}}));
  EXPECT_EQ(out.exit_code, kExitDomain);
}

TEST(Sweep, StructuredOutputIsLoadable) {
  RunConfig cfg =
      base_config(Drude{1.0, 1.0}, {0.2, 0.1, 0.0}, {0.5, 1.0}, {Vec3::Zero(), {0.4, 0, 0}});
  cfg.format = OutputFormat::structured;
  const CommandOutput out = cmd_sweep(cfg);
  ASSERT_EQ(out.exit_code, kExitOk);
  std::istringstream in(out.data);
  const MaterialModel m = load_model(in);
  ASSERT_TRUE(std::holds_alternative<Tabulated>(m));
  EXPECT_EQ(std::get<Tabulated>(m).samples.size(), 4u);
}

TEST(Sweep, RoundTripThroughTabulatedModel) {
  const Drude d{cplx(1.0, 0.2), 0.7};
  const Vec3 v(0.3, -0.2, 0.1);
  const std::vector<double> omegas = {0.5, 1.0, 2.0, 4.0};
  const std::vector<Vec3> ks = {Vec3::Zero(), {0.5, 0.0, 0.0}, {0.0, 1.0, -0.5}};
  for (OutputFormat format : {OutputFormat::csv, OutputFormat::structured}) {
    RunConfig forward = base_config(d, v, omegas, ks);
    forward.format = format;
    const CommandOutput out = cmd_sweep(forward);
    ASSERT_EQ(out.exit_code, kExitOk);
    std::istringstream in(out.data);
    const MaterialModel table = load_model(in);

    RunConfig back;
    back.model = table;
    back.velocity = -v;
    for (const auto& s : std::get<Tabulated>(table).samples) back.points.push_back(s.at);
    const CommandOutput ret = cmd_sweep(back);
    ASSERT_EQ(ret.exit_code, kExitOk);
    const auto rows = csv_rows(ret.data);
    ASSERT_EQ(rows.size(), omegas.size() * ks.size() + 1);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const Wavevector4 at{std::stod(rows[i][4]),
                           {std::stod(rows[i][5]), std::stod(rows[i][6]), std::stod(rows[i][7])}};
      const SpatialTensor3 original = evaluate(d, at);
      EXPECT_LT(relative_error(sigma_prime_from_row(rows[i]), original), 1e-9);
    }
  }
}

TEST(Output, SeventeenDigitsRoundTrip) {
  for (double x : {1.0 / 3.0, 0.1, 1e-300, -2.5e17, 1.0000000000000002}) {
    EXPECT_EQ(std::stod(num(x)), x);
  }
}

TEST(Verify, CleanAndFaulted) {
  RunConfig cfg;
  cfg.samples = 200;
  EXPECT_EQ(cmd_verify(cfg).exit_code, kExitOk);
  cfg.inject_fault = true;
  const CommandOutput bad = cmd_verify(cfg);
  EXPECT_EQ(bad.exit_code, kExitVerifyFailed);
  EXPECT_NE(bad.diagnostics.find("oracle-equivalence"), std::string::npos);
  cfg.samples = 0;
  EXPECT_EQ(cmd_verify(cfg).exit_code, kExitConfig);
}

TEST(Verify, DeterministicForFixedSeed) {
  RunConfig cfg;
  cfg.samples = 50;
  cfg.seed = 99;
  EXPECT_EQ(cmd_verify(cfg).data, cmd_verify(cfg).data);
  RunConfig other = cfg;
  other.seed = 100;
  EXPECT_NE(cmd_verify(cfg).data, cmd_verify(other).data);
}

TEST(Ohm, ZeroVelocityFormulasAgree) {
  RunConfig cfg = base_config(ConstantScalar{2.0}, Vec3::Zero(), {1.0}, {{0.5, 0.0, 0.0}});
  cfg.e_field = CVec3(0.0, 1.0, cplx(0.0, 1.0));
  cfg.format = OutputFormat::structured;
  const CommandOutput out = cmd_ohm(cfg);
  ASSERT_EQ(out.exit_code, kExitOk);
  const auto doc = nlohmann::json::parse(out.data);
  EXPECT_EQ(doc["generalized"]["j"], doc["textbook"]["j"]);
  EXPECT_EQ(doc["generalized"]["j"], doc["nonrelativistic"]["j"]);
  for (const auto& [name, value] : doc["differences"].items()) EXPECT_EQ(value, 0.0) << name;
}

TEST(Ohm, TransverseFieldGammaFactor) {
  RunConfig cfg = base_config(ConstantScalar{2.0}, {0.6, 0.0, 0.0}, {1.0}, {Vec3::Zero()});
  cfg.e_field = CVec3(0.0, 1.0, 0.0);
  cfg.format = OutputFormat::structured;
  const CommandOutput out = cmd_ohm(cfg);
  ASSERT_EQ(out.exit_code, kExitOk);
  const auto doc = nlohmann::json::parse(out.data);
  const double gen = doc["generalized"]["drift_current"][1][0];
  const double text = doc["textbook"]["drift_current"][1][0];
  const double nr = doc["nonrelativistic"]["drift_current"][1][0];
  EXPECT_NEAR(gen, 2.5, 1e-14);
  EXPECT_NEAR(text, 2.5, 1e-14);
  EXPECT_NEAR(gen / nr, 1.25, 1e-14);
}

TEST(Ohm, Errors) {
  DiagonalAnisotropic d;
  d.axes = {AxisResponse{1.0, {}}, AxisResponse{2.0, {}}, AxisResponse{3.0, {}}};
  RunConfig cfg = base_config(d, {0.3, 0.0, 0.0}, {1.0}, {Vec3::Zero()});
  cfg.e_field = CVec3(1.0, 0.0, 0.0);
  EXPECT_EQ(cmd_ohm(cfg).exit_code, kExitOk);
  cfg.formulas = {"textbook"};
  EXPECT_EQ(cmd_ohm(cfg).exit_code, kExitConfig);
  cfg.formulas = {"bogus"};
  EXPECT_EQ(cmd_ohm(cfg).exit_code, kExitConfig);
  cfg.formulas = {};
  cfg.e_field.reset();
  EXPECT_EQ(cmd_ohm(cfg).exit_code, kExitConfig);
}

TEST_F(CliFiles, BinaryExitCodes) {
  const std::string model = write("m.json", R"({"type": "constant-scalar", "sigma0": [2, 0]})");
  const std::string m = " --model " + model;

  const CliRun ok = run_cli("transform" + m + " --velocity 0,0,0 --omega 1 --k 0.5,0,0");
  EXPECT_EQ(ok.code, 0);
  EXPECT_EQ(csv_rows(ok.out).size(), 2u);
  EXPECT_EQ(run_cli("transform" + m + " --velocity 1.5,0,0 --omega 1").code, 2);
  EXPECT_EQ(run_cli("transform" + m + " --velocity 0.5,0,0 --omega 0.5 --k 1,0,0").code, 3);
  EXPECT_EQ(run_cli("transform --model " + path("missing.json") + " --omega 1").code, 2);
  EXPECT_EQ(run_cli("transform" + m + " --velocity 0.1,x,0 --omega 1").code, 2);
  EXPECT_EQ(run_cli("frobnicate").code, 2);
  EXPECT_EQ(run_cli("verify --samples 100").code, 0);
  EXPECT_EQ(run_cli("verify --samples 100 --inject-fault").code, 1);
  EXPECT_EQ(run_cli("verify --samples 0").code, 2);
  EXPECT_EQ(run_cli("verify --samples -5").code, 2);
  EXPECT_EQ(run_cli("sweep" + m + " --velocity 0.5,0,0 --omega 0.5 --k 1,0,0").code, 3);
  EXPECT_EQ(run_cli("ohm" + m + " --velocity 0.6,0,0 --omega 1 --E 0,1,0").code, 0);
}

TEST_F(CliFiles, BinaryConfigFileAndOutput) {
  write("drude.json", R"({"type": "drude", "sigma0": [1, 0], "tau": 0.5})");
  const std::string cfg = write("run.json", R"({"model": "drude.json", "velocity": [0.2, 0, 0],
    "omega": [1, 2], "k": [[0, 0, 0], [0.1, 0, 0]], "format": "csv"})");
  const std::string out = path("sweep.csv");
  ASSERT_EQ(run_cli("sweep --config " + cfg + " --output " + out).code, 0);
  std::ifstream in(out);
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_EQ(csv_rows(text.str()).size(), 5u);

  // Flags override the file.
  const CliRun r = run_cli("sweep --config " + cfg + " --omega 3");
  EXPECT_EQ(csv_rows(r.out).size(), 3u);

  // The written table is itself a model, keyed by the primed points.
  const auto row = csv_rows(text.str())[1];
  const std::string at = " --omega " + row[4] + " --k " + row[5] + "," + row[6] + "," + row[7];
  EXPECT_EQ(run_cli("transform --model " + out + " --velocity 0,0,0" + at).code, 0);
}

TEST_F(CliFiles, BinaryVerifyDeterministic) {
  const CliRun a = run_cli("verify --samples 50 --seed 5");
  const CliRun b = run_cli("verify --samples 50 --seed 5");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("suite,samples,max_residual,tolerance,status"), std::string::npos);
}

}  // namespace
}  // namespace relohm::cli
