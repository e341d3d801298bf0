#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "kalman/cli.hpp"

namespace fs = std::filesystem;
using kalman::cli::Command;
using kalman::cli::parse_args;
using Args = std::vector<std::string>;

namespace {

struct Spawned {
  int exit_code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "kalman_cli_test";
  fs::create_directories(dir);
  return dir;
}

Spawned spawn(const std::string& args) {
  const fs::path out = scratch() / "stdout.txt";
  const fs::path err = scratch() / "stderr.txt";
  const std::string cmd =
      std::string(KFSIM_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

// Every flag the binary accepts, with a valid sample value ("" for switches).
const std::map<std::string, std::map<std::string, std::string>> kFlagSamples = {
    {"simulate",
     {{"--help", ""}, {"--dt", "0.2"}, {"--n-iter", "10"}, {"--sigma", "0.3"}, {"--seed", "4"},
      {"--mode", "toa"}, {"--anchors", "0,0;30,0;0,30"}, {"--paper-faithful", ""},
      {"--center-on-estimate", ""}, {"--trace", "t.csv"}, {"--plot", "p.svg"}}},
    {"bench",
     {{"--help", ""}, {"--runs", "3"}, {"--dt", "0.2"}, {"--n-iter", "10"}, {"--sigma", "0.3"},
      {"--seed", "4"}, {"--mode", "toa"}, {"--anchors", "0,0;30,0;0,30"},
      {"--paper-faithful", ""}, {"--center-on-estimate", ""}, {"--report", "r.txt"}}},
    {"paper-repro", {{"--help", ""}, {"--seed", "4"}, {"--trace", "t.csv"}, {"--plot", "p.svg"}}},
};

}  // namespace

TEST(ParseArgs, SimulateDefaults) {
  const auto cfg = parse_args(Args{"simulate"});
  EXPECT_EQ(cfg.command, Command::simulate);
  EXPECT_EQ(cfg.scenario.dt, 0.1);
  EXPECT_EQ(cfg.scenario.n_iter, 50u);
  EXPECT_EQ(cfg.scenario.sigma, 0.1);
  EXPECT_EQ(cfg.scenario.mode, kalman::MeasurementMode::direct_position);
  EXPECT_FALSE(cfg.scenario.paper_faithful);
  EXPECT_FALSE(cfg.scenario.center_on_estimate);
  EXPECT_FALSE(cfg.trace_path);
}

TEST(ParseArgs, MalformedNumberNamesFlag) {
  try {
    parse_args(Args{"simulate", "--dt", "abc"});
    FAIL() << "expected UsageError";
  } catch (const kalman::cli::UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("--dt"), std::string::npos);
  }
}

TEST(ParseArgs, PaperRepro) {
  const auto cfg = parse_args(Args{"paper-repro", "--seed", "7"});
  EXPECT_EQ(cfg.command, Command::paper_repro);
  EXPECT_EQ(cfg.scenario.seed, 7u);
  EXPECT_TRUE(cfg.scenario.paper_faithful);
  EXPECT_TRUE(cfg.scenario.center_on_estimate);
  EXPECT_EQ(cfg.scenario.dt, 0.1);
  EXPECT_EQ(cfg.scenario.n_iter, 50u);
}

TEST(ParseArgs, Overrides) {
  const auto cfg = parse_args(Args{"bench", "--runs", "12", "--mode", "toa", "--anchors", "1,2; 30,2 ;1,40",
                                   "--sigma", "0.5", "--report", "out/r.txt"});
  EXPECT_EQ(cfg.command, Command::bench);
  EXPECT_EQ(cfg.n_runs, 12u);
  EXPECT_EQ(cfg.scenario.mode, kalman::MeasurementMode::toa_trilateration);
  ASSERT_EQ(cfg.scenario.anchors.size(), 3u);
  EXPECT_EQ(cfg.scenario.anchors[1].position, kalman::Matrix::column({30, 2}));
  EXPECT_EQ(cfg.scenario.sigma, 0.5);
  EXPECT_EQ(*cfg.report_path, fs::path("out/r.txt"));
}

TEST(ParseArgs, UsageErrors) {
  for (const Args& bad : {Args{}, Args{"simulate", "--bogus"}, Args{"simulate", "--dt"},
                          Args{"simulate", "--dt", "-1"}, Args{"simulate", "--n-iter", "0"},
                          Args{"simulate", "--mode", "tdoa"}, Args{"bench"}, Args{"bench", "--runs", "0"},
                          Args{"simulate", "--anchors", "1,2;x"}, Args{"simulate", "--mode", "toa", "--anchors", "0,0;1,1"},
                          Args{"paper-repro", "--sigma", "0.2"}, Args{"frobnicate"}}) {
    EXPECT_THROW(parse_args(bad), kalman::cli::UsageError) << ::testing::PrintToString(bad);
  }
}

TEST(ParseArgs, Help) {
  const auto cfg = parse_args(Args{"simulate", "--help"});
  EXPECT_EQ(cfg.command, Command::help);
  EXPECT_NE(cfg.help_text.find("--n-iter"), std::string::npos);
  EXPECT_EQ(parse_args(Args{"--help"}).command, Command::help);
}

TEST(Binary, ExitCodes) {
  EXPECT_EQ(spawn("simulate").exit_code, 0);
  EXPECT_EQ(spawn("--help").exit_code, 0);
  const auto usage = spawn("simulate --dt abc");
  EXPECT_EQ(usage.exit_code, 2);
  EXPECT_NE(usage.err.find("--dt"), std::string::npos);
  EXPECT_EQ(spawn("simulate --unknown").exit_code, 2);
  // Collinear anchors pass flag validation but fail numerically.
  const auto runtime = spawn("simulate --mode toa --anchors '0,0;5,0;10,0'");
  EXPECT_EQ(runtime.exit_code, 1);
  EXPECT_NE(runtime.err.find("collinear"), std::string::npos);
  // Output path under a regular file cannot be created.
  std::ofstream(scratch() / "file") << "x";
  EXPECT_EQ(spawn("simulate --trace " + (scratch() / "file" / "t.csv").string()).exit_code, 1);
}

TEST(Binary, HelpAndFlagTableAgree) {
  const std::regex flag_re("--[a-z][a-z-]*");
  for (const auto& [command, samples] : kFlagSamples) {
    const auto help = spawn(command + " --help");
    ASSERT_EQ(help.exit_code, 0) << command;
    std::set<std::string> documented;
    for (std::sregex_iterator it(help.out.begin(), help.out.end(), flag_re), end; it != end; ++it) {
      documented.insert(it->str());
    }
    std::set<std::string> table;
    for (const auto& [flag, sample] : samples) table.insert(flag);
    EXPECT_EQ(documented, table) << command;

    for (const auto& [flag, sample] : samples) {
      if (flag == "--help") continue;
      Args args{command, flag};
      if (!sample.empty()) args.push_back(sample);
      if (command == "bench" && flag != "--runs") {
        args.push_back("--runs");
        args.push_back("2");
      }
      EXPECT_NO_THROW(parse_args(args)) << command << " " << flag;
    }
  }
}

TEST(Binary, PaperReproIsByteStable) {
  const fs::path a = scratch() / "a.csv";
  const fs::path b = scratch() / "b.csv";
  ASSERT_EQ(spawn("paper-repro --seed 7 --trace " + a.string()).exit_code, 0);
  ASSERT_EQ(spawn("paper-repro --seed 7 --trace " + b.string()).exit_code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(slurp(a), slurp(fs::path(KALMAN_TEST_DATA) / "paper_repro_seed7.csv"));
}

TEST(Binary, SimulateWritesArtifacts) {
  const fs::path dir = scratch() / "fresh" / "sub";
  fs::remove_all(scratch() / "fresh");
  const auto r = spawn("simulate --seed 3 --trace " + (dir / "t.csv").string() + " --plot " +
                       (dir / "p.svg").string());
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_TRUE(fs::exists(dir / "t.csv"));
  EXPECT_TRUE(fs::exists(dir / "p.svg"));
  EXPECT_NE(r.out.find("rmse_filtered_m"), std::string::npos);
}

TEST(Binary, BenchReport) {
  const fs::path report = scratch() / "bench.txt";
  ASSERT_EQ(spawn("bench --runs 20 --report " + report.string()).exit_code, 0);
  const std::string text = slurp(report);
  EXPECT_NE(text.find("runs                 20"), std::string::npos);
  const auto r = spawn("bench --runs 20");
  EXPECT_EQ(r.out, text);
}
