#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

int run(const std::string& args) {
  const std::string cmd = std::string(DPDP_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("dpdp_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string at(const std::string& name) const { return (dir / name).string(); }
  fs::path dir;
};

TEST_F(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("bogus"), 1);
  EXPECT_EQ(run("run --set nonsense=1"), 1);
  EXPECT_EQ(run("run --set replications=0"), 1);
  EXPECT_EQ(run("tune --betas 1,x"), 1);
  EXPECT_EQ(run("report"), 1);
}

TEST_F(Cli, RuntimeErrorsExitTwo) {
  EXPECT_EQ(run("run --set replications=1 --set max_epochs=2 --set policy=dsp"), 2);
  EXPECT_EQ(run("report " + at("missing.csv")), 2);
  EXPECT_EQ(run("run -c " + at("missing.cfg")), 2);
  std::ofstream(at("bad.txt")) << "not a scenario\n";
  EXPECT_EQ(run("run --scenario " + at("bad.txt")), 2);
}

TEST_F(Cli, GenerateRunReport) {
  const std::string small = "--set horizon_s=3600 --set arrival_prob=0.15 --set beta=300 ";
  ASSERT_EQ(run("generate " + small + "--seed 5 -o " + at("s.txt")), 0);
  ASSERT_EQ(run("generate " + small + "--seed 5 -n 3 -o " + at("many")), 0);
  EXPECT_EQ(slurp(at("s.txt")), slurp(dir / "many" / "scenario_5.txt"));
  EXPECT_TRUE(fs::exists(dir / "many" / "scenario_7.txt"));

  ASSERT_EQ(run("run " + small + "--set policy=dsp --scenario " + at("s.txt") + " --trace " + at("t.csv")), 0);
  EXPECT_EQ(slurp(at("t.csv")).rfind("time_s,idle,unassigned,", 0), 0u);

  ASSERT_EQ(run("run " + small + "--set replications=3 --csv " + at("r.csv") + " --jsonl " + at("r.jsonl")), 0);
  ASSERT_EQ(run("report " + at("r.csv") + " --summary " + at("a.csv") + " --density " + at("d.csv")), 0);
  ASSERT_EQ(run("report " + at("r.jsonl") + " --summary " + at("b.csv")), 0);
  EXPECT_EQ(slurp(at("a.csv")), slurp(at("b.csv")));
  EXPECT_EQ(slurp(at("d.csv")).rfind("bin_center_min,density\n", 0), 0u);
}

TEST_F(Cli, ConfigFileRoundTrip) {
  const std::string cli(DPDP_CLI);
  ASSERT_EQ(std::system((cli + " config --set beta=256 > " + at("c.cfg")).c_str()), 0);
  ASSERT_EQ(std::system((cli + " config -c " + at("c.cfg") + " > " + at("c2.cfg")).c_str()), 0);
  EXPECT_EQ(slurp(at("c.cfg")), slurp(at("c2.cfg")));
  EXPECT_NE(slurp(at("c.cfg")).find("beta = 256\n"), std::string::npos);
}

TEST_F(Cli, TuneWritesSurface) {
  ASSERT_EQ(run("tune -q --set horizon_s=3600 --set max_epochs=2000 --set arrival_prob=0.15 --set replications=2 --alphas 0.1 "
                "--betas 250,300 --set surface_csv=" + at("surf.csv")),
            0);
  const std::string surf = slurp(at("surf.csv"));
  EXPECT_EQ(surf.rfind("alpha,beta,failed,replications,penalty_per_request,", 0), 0u);
  EXPECT_EQ(std::count(surf.begin(), surf.end(), '\n'), 3);
}

}  // namespace
