#include <gtest/gtest.h>

#include <cstdlib>
#include <sys/wait.h>

#include "exbt/data/panel.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using exbt::testing::read_text;
using exbt::testing::write_text;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(EXBT_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = exbt::testing::temp_dir("cli");
    exbt::data::save_panel(exbt::testing::planted_panel(9, 700), dir_ / "panel.csv");
    write_text(dir_ / "exp.toml",
               "[data]\npanel = \"panel.csv\"\n[model]\nfamily = \"logistic\"\nlambda = 0.0005\n"
               "[experiment]\nseed = 5\n[search]\niterations = 3\n");
  }
  std::string cfg() const { return "--config " + (dir_ / "exp.toml").string(); }
  std::string out(const std::string& sub) const { return " --out " + (dir_ / sub).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, ValidateAndExitCodes) {
  EXPECT_EQ(run(cfg() + " validate"), 0);
  EXPECT_EQ(run("validate --panel " + (dir_ / "panel.csv").string()), 0);
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("cv"), 1);
  write_text(dir_ / "bad.toml", "[data]\npanel = \"panel.csv\"\nbogus = 1\n");
  EXPECT_EQ(run("--config " + (dir_ / "bad.toml").string() + " validate"), 1);
  write_text(dir_ / "missing.toml", "[data]\npanel = \"nope.csv\"\n");
  EXPECT_EQ(run("--config " + (dir_ / "missing.toml").string() + " validate"), 2);
  write_text(dir_ / "broken.csv", "date,price\n2020-01-01,1\n2020-01-01,2\n");
  EXPECT_EQ(run("validate --panel " + (dir_ / "broken.csv").string()), 2);
}

TEST_F(Cli, StageCommandsWriteArtifacts) {
  EXPECT_EQ(run(cfg() + out("pre") + " preprocess"), 0);
  EXPECT_TRUE(fs::exists(dir_ / "pre" / "feature_meta.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "pre" / "panel_transformed.csv"));
  EXPECT_EQ(run(cfg() + out("sel") + " select"), 0);
  const std::string sel = read_text(dir_ / "sel" / "selection.csv");
  EXPECT_EQ(sel.substr(0, sel.find('\n')), "column,lag,p_value,selected");
  EXPECT_NE(sel.find("signal,1,"), std::string::npos);
  EXPECT_EQ(run(cfg() + out("lab") + " label"), 0);
  EXPECT_TRUE(fs::exists(dir_ / "lab" / "targets.csv"));
}

TEST_F(Cli, CvIsDeterministicAndAuditClean) {
  EXPECT_EQ(run(cfg() + out("a") + " --jobs 1 cv --audit"), 0);
  EXPECT_EQ(run(cfg() + out("b") + " --jobs 4 cv"), 0);
  EXPECT_EQ(read_text(dir_ / "a" / "metrics.csv"), read_text(dir_ / "b" / "metrics.csv"));
  for (int f = 1; f <= 7; ++f) {
    EXPECT_TRUE(fs::exists(dir_ / "a" / ("trades_" + std::to_string(f) + ".csv")));
    EXPECT_TRUE(fs::exists(dir_ / "a" / ("selection_" + std::to_string(f) + ".csv")));
  }
  const std::string audit = read_text(dir_ / "a" / "audit.csv");
  EXPECT_EQ(audit.find(",1\n"), std::string::npos);
  EXPECT_EQ(run(cfg() + out("c") + " --cost 0.01 cv"), 0);
  EXPECT_NE(read_text(dir_ / "a" / "metrics.csv"), read_text(dir_ / "c" / "metrics.csv"));
}

TEST_F(Cli, BacktestTuneAndReport) {
  EXPECT_EQ(run(cfg() + out("bt") + " backtest"), 0);
  EXPECT_TRUE(fs::exists(dir_ / "bt" / "metrics.csv"));
  write_text(dir_ / "pred.csv", "date,prediction\n2019-01-01,0.9\n2019-01-02,0.1\n2019-01-03,0.8\n");
  EXPECT_EQ(run(cfg() + out("ext") + " backtest --predictions " + (dir_ / "pred.csv").string()), 0);
  write_text(dir_ / "gap.csv", "date,prediction\n2019-01-01,0.9\n2019-01-03,0.8\n");
  EXPECT_EQ(run(cfg() + out("gap") + " backtest --predictions " + (dir_ / "gap.csv").string()), 2);

  EXPECT_EQ(run(cfg() + out("tune") + " tune"), 0);
  EXPECT_TRUE(fs::exists(dir_ / "tune" / "trace.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "tune" / "best_model.toml"));
  EXPECT_TRUE(fs::exists(dir_ / "tune" / "metrics.csv"));

  EXPECT_EQ(run(cfg() + out("m1") + " cv"), 0);
  EXPECT_EQ(run(out("rep") + " report " + (dir_ / "m1" / "metrics.csv").string() + " " +
                (dir_ / "tune" / "metrics.csv").string()),
            0);
  for (const char* f : {"profit_by_split.csv", "profit_by_split.svg", "report.md"}) {
    EXPECT_TRUE(fs::exists(dir_ / "rep" / f)) << f;
  }
  EXPECT_EQ(run(out("rep2") + " report " + (dir_ / "none.csv").string()), 2);
}
