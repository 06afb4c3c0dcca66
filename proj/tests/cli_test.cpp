#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string output;  // stdout followed by stderr
};

Run run(const std::string& args) {
  const std::string command = std::string(SPAMFILTER_CLI) + " " + args + " 2>&1";
  Run result;
  FILE* pipe = ::popen(command.c_str(), "r");
  if (!pipe) return result;
  char buffer[4096];
  for (std::size_t n; (n = std::fread(buffer, 1, sizeof buffer, pipe)) > 0;) result.output.append(buffer, n);
  const int raw = ::pclose(pipe);
  result.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return result;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fs::temp_directory_path() / ("spamfilter_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(root_);
    fs::create_directories(root_);
    const auto made = run("fixture --seed 7 --legit 90 --spam 10 --out " + (root_ / "small").string());
    ASSERT_EQ(made.status, 0) << made.output;
  }
  static void TearDownTestSuite() { fs::remove_all(root_); }

  static std::string corpus() { return (root_ / "small").string(); }
  static std::string path(const std::string& name) { return (root_ / name).string(); }

  static fs::path root_;
};

fs::path CliTest::root_;

}  // namespace

TEST_F(CliTest, StatsOnFixture) {
  const auto r = run("stats --corpus " + corpus() + " --layout fixture");
  EXPECT_EQ(r.status, 0);
  EXPECT_TRUE(r.output.starts_with("legit=90 spam=10 rate=10.0% vocab=")) << r.output;
}

TEST_F(CliTest, EmptyCorpusIsAnInputError) {
  fs::create_directories(path("empty"));
  const auto r = run("stats --corpus " + path("empty"));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.output.find("empty corpus"), std::string::npos) << r.output;
}

TEST_F(CliTest, BadFlagsAreConfigErrors) {
  EXPECT_EQ(run("evaluate --corpus " + corpus() + " --lambda 0").status, 3);
  EXPECT_EQ(run("evaluate --corpus " + corpus() + " --classifier svm").status, 3);
  EXPECT_EQ(run("sweep --corpus " + corpus() + " --m-range 700:50:50").status, 3);
  EXPECT_EQ(run("sweep --corpus " + corpus() + " --m 100").status, 3);
  EXPECT_EQ(run("evaluate --corpus " + corpus() + " --classifier mb --k 0").status, 3);
  EXPECT_EQ(run("evaluate").status, 3);
  EXPECT_EQ(run("").status, 3);
}

TEST_F(CliTest, EvaluateWritesOneRowAndSummary) {
  const auto r = run("evaluate --corpus " + corpus() + " --layout fixture --m 50 --out " +
                     path("eval.csv"));
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("TCR"), std::string::npos);
  std::istringstream lines(slurp(path("eval.csv")));
  std::string header, columns, row, extra;
  std::getline(lines, header);
  std::getline(lines, columns);
  std::getline(lines, row);
  EXPECT_FALSE(std::getline(lines, extra));
  EXPECT_TRUE(header.starts_with("# spamfilter-report v1 ")) << header;
  EXPECT_EQ(columns, "classifier,lambda,m,k,seed,sr,sp,wacc_mean,werr_mean,baseline_werr,tcr,fold_waccs");
  EXPECT_TRUE(row.starts_with("nb,1,50,,1,")) << row;
}

TEST_F(CliTest, OracleHookReportsInfiniteCostRatio) {
  const auto r = run("evaluate --corpus " + corpus() + " --layout fixture --m 50 --classifier oracle");
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find(",inf,"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("# TCR            inf"), std::string::npos) << r.output;
}

TEST_F(CliTest, SweepIsByteIdenticalAcrossRuns) {
  const std::string args = "sweep --corpus " + corpus() + " --layout fixture --m-range 50:150:50 --out ";
  ASSERT_EQ(run(args + path("a.csv")).status, 0);
  ASSERT_EQ(run(args + path("b.csv")).status, 0);
  const auto a = slurp(path("a.csv"));
  EXPECT_EQ(a, slurp(path("b.csv")));
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 5);  // header, columns, 3 rows
}

TEST_F(CliTest, CompareWithItselfAndAcrossSeeds) {
  const std::string base = "evaluate --corpus " + corpus() + " --layout fixture --m 50 --out ";
  ASSERT_EQ(run(base + path("s1.csv")).status, 0);
  ASSERT_EQ(run(base + path("s2.csv") + " --seed 2").status, 0);

  const auto same = run("compare " + path("s1.csv") + " " + path("s1.csv"));
  EXPECT_EQ(same.status, 0) << same.output;
  EXPECT_NE(same.output.find("t=0.0000 df=9"), std::string::npos) << same.output;
  EXPECT_NE(same.output.find("not significant"), std::string::npos) << same.output;

  const auto mismatch = run("compare " + path("s1.csv") + " " + path("s2.csv"));
  EXPECT_EQ(mismatch.status, 3);
  EXPECT_NE(mismatch.output.find("fold plans differ"), std::string::npos) << mismatch.output;

  const auto missing = run("compare " + path("s1.csv") + " " + path("nope.csv"));
  EXPECT_EQ(missing.status, 2);
}

TEST_F(CliTest, CompareSelectsSweepRows) {
  const std::string common = " --corpus " + corpus() + " --layout fixture --m-range 50:100:50 --out ";
  ASSERT_EQ(run("sweep --classifier oracle" + common + path("oracle.csv")).status, 0);
  ASSERT_EQ(run("sweep --classifier legit" + common + path("legit.csv")).status, 0);
  EXPECT_EQ(run("compare " + path("oracle.csv") + " " + path("legit.csv")).status, 3);
  const auto r = run("compare " + path("oracle.csv") + " " + path("legit.csv") + " --m-a 100 --m-b 50");
  EXPECT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("\nsignificant"), std::string::npos) << r.output;
}
