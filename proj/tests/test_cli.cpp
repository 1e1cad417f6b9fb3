#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "hlab/cli.hpp"

namespace hlab {
namespace {

constexpr double kForceFailTolerance = 1e-30;

std::vector<std::string> suite_names(const VerificationReport& r) {
  std::vector<std::string> out;
  for (const SuiteResult& s : r.suites) out.push_back(s.name);
  return out;
}

std::vector<std::string> check_ids(const VerificationReport& r, const std::string& suite) {
  for (const SuiteResult& s : r.suites)
    if (s.name == suite) {
      std::vector<std::string> out;
      for (const CheckResult& c : s.checks) out.push_back(c.id);
      return out;
    }
  return {};
}

std::string json_of(const VerificationReport& r) {
  std::ostringstream os;
  emit_json(r, os);
  return os.str();
}

RunConfig quick_config(const std::string& solution) {
  RunConfig cfg;
  cfg.solution = solution;
  cfg.samples = 3;
  return cfg;
}

std::filesystem::path write_temp_config(const std::string& name, const std::string& body) {
  std::filesystem::path p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << body;
  return p;
}

TEST(RunSuites, SphereDefaultsPassEverySuite) {
  VerificationReport r = run_suites(quick_config("shrinking_sphere"));
  EXPECT_TRUE(r.pass);
  std::vector<std::string> names = suite_names(r);
  EXPECT_EQ(names.size(), 11u);
  EXPECT_EQ(names.front(), "flow");
  EXPECT_EQ(names.back(), "limits");
  for (const std::string& n : names) EXPECT_NE(n, "soliton");
  EXPECT_FALSE(r.sweep_rows.empty());
}

TEST(RunSuites, PlainFlatCoversAllTwelveSuites) {
  RunConfig cfg = quick_config("flat");
  cfg.params.dim = 2;
  VerificationReport r = run_suites(cfg);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.suites.size(), 12u);
}

TEST(RunSuites, ModifiedFlatSkipsPlainOnlySuites) {
  RunConfig cfg = quick_config("flat");
  cfg.params.affine = {0.4, -0.2};
  VerificationReport r = run_suites(cfg);
  EXPECT_TRUE(r.pass);
  std::set<std::string> names;
  for (const SuiteResult& s : r.suites) names.insert(s.name);
  EXPECT_TRUE(names.count("soliton"));
  EXPECT_FALSE(names.count("harnack-curvature"));
  EXPECT_FALSE(names.count("approx-conn"));
  EXPECT_FALSE(names.count("limits"));
}

TEST(RunSuites, BothCigarGaugesPass) {
  EXPECT_TRUE(run_suites(quick_config("cigar_flow")).pass);
  EXPECT_TRUE(run_suites(quick_config("cigar_static")).pass);
}

TEST(RunSuites, GaugeGatingSelectsChecksPerSolution) {
  RunConfig flow_cfg = quick_config("cigar_flow");
  flow_cfg.suites = {"harnack-ineq", "soliton", "bianchi"};
  VerificationReport flow = run_suites(flow_cfg);

  RunConfig static_cfg = quick_config("cigar_static");
  static_cfg.suites = {"harnack-ineq", "soliton", "bianchi"};
  VerificationReport stat = run_suites(static_cfg);

  std::vector<std::string> flow_ineq = check_ids(flow, "harnack-ineq");
  EXPECT_EQ(flow_ineq.size(), 4u);
  EXPECT_EQ(flow_ineq.back(), "steady-equality");
  std::vector<std::string> static_ineq = check_ids(stat, "harnack-ineq");
  EXPECT_EQ(static_ineq, std::vector<std::string>{"matrix-inequality"});

  std::vector<std::string> flow_soliton = check_ids(flow, "soliton");
  std::vector<std::string> static_soliton = check_ids(stat, "soliton");
  EXPECT_TRUE(std::count(flow_soliton.begin(), flow_soliton.end(), "time-evolution"));
  EXPECT_FALSE(std::count(static_soliton.begin(), static_soliton.end(), "time-evolution"));
  EXPECT_FALSE(std::count(flow_soliton.begin(), flow_soliton.end(), "contraction-evolution"));
  EXPECT_TRUE(std::count(static_soliton.begin(), static_soliton.end(), "contraction-evolution"));

  std::vector<std::string> flow_bianchi = check_ids(flow, "bianchi");
  std::vector<std::string> static_bianchi = check_ids(stat, "bianchi");
  EXPECT_TRUE(std::count(flow_bianchi.begin(), flow_bianchi.end(), "scalar-chain"));
  EXPECT_FALSE(std::count(static_bianchi.begin(), static_bianchi.end(), "scalar-chain"));

  EXPECT_TRUE(flow.pass);
  EXPECT_TRUE(stat.pass);
}

TEST(RunSuites, ModifiedSolutionsReportModifiedAnchors) {
  RunConfig cfg = quick_config("cigar_static");
  cfg.suites = {"flow", "deg-flow"};
  VerificationReport r = run_suites(cfg);
  EXPECT_EQ(r.suites[0].checks[0].anchor, "(3.1)");
  EXPECT_EQ(r.suites[1].checks[0].anchor, "(3.2)");

  VerificationReport plain = run_suites(quick_config("cigar_flow"));
  EXPECT_EQ(plain.suites[0].checks[0].anchor, "(1.1)");
}

TEST(RunSuites, ReportsAreDeterministic) {
  RunConfig cfg = quick_config("shrinking_sphere");
  cfg.stable_output = true;
  std::string a = json_of(run_suites(cfg));
  std::string b = json_of(run_suites(cfg));
  EXPECT_EQ(a, b);

  cfg.seed = 43;
  std::string c = json_of(run_suites(cfg));
  EXPECT_NE(a, c);
}

TEST(RunSuites, SuiteSelectionKeepsPerSuiteSampleStreams) {
  RunConfig all = quick_config("shrinking_sphere");
  all.stable_output = true;
  VerificationReport full = run_suites(all);

  RunConfig one = all;
  one.suites = {"deg-flow"};
  VerificationReport solo = run_suites(one);

  const SuiteResult* from_full = nullptr;
  for (const SuiteResult& s : full.suites)
    if (s.name == "deg-flow") from_full = &s;
  ASSERT_NE(from_full, nullptr);
  ASSERT_EQ(solo.suites.size(), 1u);
  for (std::size_t i = 0; i < from_full->checks.size(); ++i)
    EXPECT_EQ(solo.suites[0].checks[i].residual, from_full->checks[i].residual);
}

TEST(RunSuites, ThreadCountDoesNotChangeResults) {
  RunConfig cfg = quick_config("shrinking_sphere");
  cfg.suites = {"spacetime-curv"};
  cfg.stable_output = true;
  std::string base = json_of(run_suites(cfg));
  ::setenv("HARNACK_LAB_THREADS", "3", 1);
  std::string threaded = json_of(run_suites(cfg));
  ::setenv("HARNACK_LAB_THREADS", "1", 1);
  std::string serial = json_of(run_suites(cfg));
  ::unsetenv("HARNACK_LAB_THREADS");
  EXPECT_EQ(base, threaded);
  EXPECT_EQ(base, serial);
}

TEST(RunSuites, BadThreadEnvironmentIsAConfigError) {
  RunConfig cfg = quick_config("shrinking_sphere");
  cfg.suites = {"flow"};
  ::setenv("HARNACK_LAB_THREADS", "zero", 1);
  EXPECT_THROW(run_suites(cfg), ConfigError);
  ::unsetenv("HARNACK_LAB_THREADS");
}

TEST(RunSuites, ToleranceOverridesPickTheMostSpecificKey) {
  RunConfig cfg = quick_config("shrinking_sphere");
  cfg.suites = {"flow", "deg-flow"};
  cfg.tolerances["flow"] = 1e-3;
  cfg.tolerances["deg-flow.metric-evolution"] = 1e-4;
  VerificationReport r = run_suites(cfg);
  EXPECT_EQ(r.suites[0].checks[0].tolerance, 1e-3);
  EXPECT_EQ(r.suites[1].checks[0].tolerance, 1e-4);
  EXPECT_EQ(r.suites[1].checks[1].tolerance, 1e-9);
}

TEST(RunSuites, ImpossibleToleranceFailsTheReport) {
  RunConfig cfg = quick_config("shrinking_sphere");
  cfg.suites = {"flow"};
  cfg.tolerances["flow.evolution"] = kForceFailTolerance;
  VerificationReport r = run_suites(cfg);
  EXPECT_FALSE(r.pass);
  EXPECT_FALSE(r.suites[0].pass);
  EXPECT_FALSE(r.suites[0].checks[0].pass);
}

TEST(Validation, RejectionsNameTheOffendingKey) {
  RunConfig unknown = quick_config("shrinking_sphere");
  unknown.suites = {"flow", "nonsense"};
  EXPECT_THROW(
      {
        try {
          run_suites(unknown);
        } catch (const ConfigError& e) {
          EXPECT_NE(std::string(e.what()).find("nonsense"), std::string::npos);
          throw;
        }
      },
      ConfigError);

  RunConfig soliton = quick_config("shrinking_sphere");
  soliton.suites = {"soliton"};
  EXPECT_THROW(
      {
        try {
          run_suites(soliton);
        } catch (const ConfigError& e) {
          std::string what = e.what();
          EXPECT_NE(what.find("soliton"), std::string::npos);
          EXPECT_NE(what.find("shrinking_sphere"), std::string::npos);
          throw;
        }
      },
      ConfigError);

  RunConfig gauge = quick_config("cigar_static");
  gauge.suites = {"harnack-curvature"};
  EXPECT_THROW(
      {
        try {
          run_suites(gauge);
        } catch (const ConfigError& e) {
          std::string what = e.what();
          EXPECT_NE(what.find("harnack-curvature"), std::string::npos);
          EXPECT_NE(what.find("cigar_static"), std::string::npos);
          throw;
        }
      },
      ConfigError);

  RunConfig dup = quick_config("shrinking_sphere");
  dup.suites = {"flow", "flow"};
  EXPECT_THROW(run_suites(dup), ConfigError);

  RunConfig bad_solution = quick_config("torus");
  EXPECT_THROW(run_suites(bad_solution), ConfigError);
}

TEST(Validation, OrderBoundsAndPerSuiteMinimums) {
  RunConfig low = quick_config("shrinking_sphere");
  low.order = 3;
  EXPECT_THROW(run_suites(low), ConfigError);

  RunConfig high = quick_config("shrinking_sphere");
  high.order = 7;
  EXPECT_THROW(run_suites(high), ConfigError);

  RunConfig explicit_residual = quick_config("shrinking_sphere");
  explicit_residual.order = 4;
  explicit_residual.suites = {"deg-flow"};
  EXPECT_THROW(
      {
        try {
          run_suites(explicit_residual);
        } catch (const ConfigError& e) {
          EXPECT_NE(std::string(e.what()).find("order"), std::string::npos);
          throw;
        }
      },
      ConfigError);

  RunConfig defaulted = quick_config("shrinking_sphere");
  defaulted.order = 4;
  VerificationReport r = run_suites(defaulted);
  EXPECT_TRUE(r.pass);
  for (const std::string& n : suite_names(r)) {
    EXPECT_NE(n, "deg-flow");
    EXPECT_NE(n, "bianchi");
  }
}

TEST(Validation, TauMustLeaveASamplingWindow) {
  RunConfig cfg = quick_config("shrinking_sphere");
  cfg.tau = 0.05;
  EXPECT_TRUE(run_suites(cfg).pass);

  cfg.tau = 0.6;
  EXPECT_THROW(run_suites(cfg), ConfigError);

  cfg.tau = -0.1;
  EXPECT_THROW(run_suites(cfg), ConfigError);
}

TEST(Config, TomlRoundTrip) {
  std::istringstream in(R"(# sample configuration
solution = "flat"
dim = 3
c0 = 2.5
affine = [0.1, -0.2, 0.3]
tau = 0.01
order = 6
samples = 7
seed = 99
suites = ["flow", "deg-flow"]
format = "json"
out = "reports"
stable_output = true
approx_epsilon = 12.0
approx_delta = 0.5

[tolerances]
flow = 1e-7
"deg-flow.metric-evolution" = 1e-6

[sweep]
epsilon = [4.0, 16.0]
delta = [2.0, 4.0]

[curvature_sweep]
epsilon = [256.0, 512.0]
delta = [0.125, 0.125]
)");
  RunConfig cfg = parse_config(in);
  EXPECT_EQ(cfg.solution, "flat");
  EXPECT_EQ(cfg.params.dim, 3);
  EXPECT_EQ(cfg.params.c0, 2.5);
  EXPECT_EQ(cfg.params.affine, (std::vector<double>{0.1, -0.2, 0.3}));
  EXPECT_EQ(cfg.tau, 0.01);
  EXPECT_EQ(cfg.order, 6);
  EXPECT_EQ(cfg.samples, 7);
  EXPECT_EQ(cfg.seed, 99u);
  EXPECT_EQ(cfg.suites, (std::vector<std::string>{"flow", "deg-flow"}));
  EXPECT_EQ(cfg.format, "json");
  EXPECT_EQ(cfg.out_dir, "reports");
  EXPECT_TRUE(cfg.stable_output);
  EXPECT_EQ(cfg.approx_epsilon, 12.0);
  EXPECT_EQ(cfg.approx_delta, 0.5);
  EXPECT_EQ(cfg.tolerances.at("flow"), 1e-7);
  EXPECT_EQ(cfg.tolerances.at("deg-flow.metric-evolution"), 1e-6);
  ASSERT_EQ(cfg.schedule.size(), 2u);
  EXPECT_EQ(cfg.schedule[1], (std::pair<double, double>{16.0, 4.0}));
  ASSERT_EQ(cfg.curvature_schedule.size(), 2u);
}

TEST(Config, MalformedInputsThrowWithLineNumbers) {
  auto expect_error = [](const std::string& text, const std::string& needle) {
    std::istringstream in(text);
    try {
      parse_config(in);
      FAIL() << "expected ConfigError for: " << text;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_error("solution flat\n", "line 1");
  expect_error("order = what\n", "line 1");
  expect_error("\nsuites = [\"flow\", 3]\n", "line 2");
  expect_error("seed = 5\nseed = 6\n", "duplicate");
  expect_error("mystery = 1\n", "unknown key");
  expect_error("[sweep]\nepsilon = [2.0]\n", "delta");
  expect_error("[sweep]\nepsilon = [2.0]\ndelta = [1.0, 2.0]\n", "equal length");
}

TEST(Report, JsonSchemaKeepsStableKeyOrder) {
  RunConfig cfg = quick_config("shrinking_sphere");
  cfg.suites = {"flow"};
  cfg.stable_output = true;
  std::string json = json_of(run_suites(cfg));
  EXPECT_EQ(json.find("{\"config\": {\"solution\": "), 0u);
  EXPECT_NE(json.find("\"suites\": [{\"name\": \"flow\", \"checks\": "), std::string::npos);
  EXPECT_NE(json.find("{\"id\": \"evolution\", \"anchor\": \"(1.1)\", \"residual\": "),
            std::string::npos);
  EXPECT_NE(json.find("\"tolerance\": "), std::string::npos);
  EXPECT_NE(json.find("\"point\": ["), std::string::npos);
  EXPECT_NE(json.find("\"pass\": true, \"elapsed_ms\": 0}"), std::string::npos);
}

TEST(Report, SweepCsvHeaderIsStable) {
  RunConfig cfg = quick_config("shrinking_sphere");
  cfg.suites = {"limits"};
  VerificationReport r = run_suites(cfg);
  std::ostringstream os;
  emit_sweep_csv(r, os);
  std::string csv = os.str();
  EXPECT_EQ(csv.find("epsilon,delta,conn_err,curv_form_err,gamma000,target_gap\n"), 0u);
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')),
            1u + r.sweep_rows.size());
}

TEST(Report, EveryCheckCarriesExactlyOneAnchor) {
  for (const std::string& name : {"shrinking_sphere", "cigar_static"}) {
    VerificationReport r = run_suites(quick_config(name));
    for (const SuiteResult& s : r.suites)
      for (const CheckResult& c : s.checks) {
        EXPECT_FALSE(c.anchor.empty()) << s.name << "/" << c.id;
        EXPECT_TRUE(all_check_anchors().count(c.anchor)) << c.anchor;
      }
  }
}

TEST(Report, AnchorCatalogMatchesCheckedInManifest) {
  std::filesystem::path manifest =
      std::filesystem::path(HLAB_SOURCE_DIR) / "tests" / "data" / "anchor_manifest.txt";
  std::ifstream in(manifest);
  ASSERT_TRUE(in) << manifest;
  std::set<std::string> expected;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) expected.insert(line);
  EXPECT_EQ(all_check_anchors(), expected);
}

TEST(Cli, ExitCodesSeparateFailureFromConfigError) {
  RunConfig base;
  std::ostringstream out, err;
  std::vector<std::string> quick{"--suite", "flow", "--seed", "7"};
  EXPECT_EQ(run_cli(quick, out, err), 0);
  EXPECT_NE(out.str().find("PASS"), std::string::npos);

  std::ostringstream out2, err2;
  std::vector<std::string> missing{"--config", "/nonexistent/config.toml"};
  EXPECT_EQ(run_cli(missing, out2, err2), 2);
  EXPECT_NE(err2.str().find("config error"), std::string::npos);

  std::filesystem::path fail_cfg = write_temp_config("hlab_fail.toml",
                                                     "suites = [\"flow\"]\n"
                                                     "[tolerances]\n"
                                                     "flow = 1e-30\n");
  std::ostringstream out3, err3;
  std::vector<std::string> failing{"--config", fail_cfg.string()};
  EXPECT_EQ(run_cli(failing, out3, err3), 1);
  EXPECT_NE(out3.str().find("FAIL"), std::string::npos);
  std::filesystem::remove(fail_cfg);
}

TEST(Cli, FlagsOverrideConfigFileValues) {
  std::filesystem::path cfg = write_temp_config("hlab_base.toml",
                                                "solution = \"shrinking_sphere\"\n"
                                                "samples = 2\n"
                                                "suites = [\"flow\", \"deg-flow\"]\n"
                                                "format = \"text\"\n");
  std::ostringstream out, err;
  std::vector<std::string> args{"--config", cfg.string(),       "--suite", "flow",
                                "--seed",   "123",              "--format", "json",
                                "--stable-output"};
  EXPECT_EQ(run_cli(args, out, err), 0);
  std::string json = out.str();
  EXPECT_EQ(json.find("{\"config\": "), 0u);
  EXPECT_NE(json.find("\"seed\": 123"), std::string::npos);
  EXPECT_NE(json.find("\"suites\": [\"flow\"]"), std::string::npos);
  EXPECT_EQ(json.find("deg-flow"), std::string::npos);
  std::filesystem::remove(cfg);
}

TEST(Cli, OutDirectoryReceivesReportsAndSweep) {
  std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "hlab_cli_out_test";
  std::filesystem::remove_all(dir);
  std::ostringstream out, err;
  std::vector<std::string> args{"--suite", "limits", "--out", dir.string()};
  EXPECT_EQ(run_cli(args, out, err), 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "report.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "report.txt"));
  EXPECT_TRUE(std::filesystem::exists(dir / "sweep.csv"));
  std::filesystem::remove_all(dir);
}

TEST(Cli, HelpAndUnknownFlag) {
  std::ostringstream out, err;
  std::vector<std::string> help{"--help"};
  EXPECT_EQ(run_cli(help, out, err), 0);
  EXPECT_NE(out.str().find("usage"), std::string::npos);

  std::ostringstream out2, err2;
  std::vector<std::string> bad{"--frobnicate"};
  EXPECT_EQ(run_cli(bad, out2, err2), 2);
}

}  // namespace
}  // namespace hlab
