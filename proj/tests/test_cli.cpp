#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kData = GROUPSIM_TEST_DATA;

int run(const std::string& args) {
    const std::string cmd =
        std::string(GROUPSIM_CLI) + " --log-level off " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("groupsim_cli_" + std::string(
                                      ::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, SimulateValidEventSucceeds) {
    EXPECT_EQ(run("simulate -e " + (kData / "event_valid.json").string() + " -o " + path("out")), 0);
    EXPECT_TRUE(fs::exists(path("out/trace.json")));
    EXPECT_TRUE(fs::exists(path("out/daily_totals.csv")));
}

TEST_F(Cli, SimulateIsByteIdentical) {
    const auto event = (kData / "event_valid.json").string();
    ASSERT_EQ(run("simulate -e " + event + " --seed 9 -o " + path("a")), 0);
    ASSERT_EQ(run("simulate -e " + event + " --seed 9 --threads 4 -o " + path("b")), 0);
    EXPECT_EQ(slurp(path("a/trace.json")), slurp(path("b/trace.json")));
    EXPECT_EQ(slurp(path("a/engagements.csv")), slurp(path("b/engagements.csv")));
}

TEST_F(Cli, MissingEventIsIoError) {
    EXPECT_EQ(run("simulate -e " + path("nope.json") + " -o " + path("out")), 4);
}

TEST_F(Cli, TruncatedEventIsValidationError) {
    EXPECT_EQ(run("simulate -e " + (kData / "event_truncated.json").string() + " -o " +
                  path("out")),
              2);
}

TEST_F(Cli, BadLayerIsValidationError) {
    EXPECT_EQ(run("simulate -e " + (kData / "event_valid.json").string() + " --layer 9 -o " +
                  path("out")),
              2);
}

TEST_F(Cli, UnwritableOutputIsIoError) {
    std::ofstream(path("blocker")) << "x";
    EXPECT_EQ(run("simulate -e " + (kData / "event_valid.json").string() + " -o " +
                  path("blocker/out")),
              4);
}

TEST_F(Cli, UnknownSubcommandIsUsageError) { EXPECT_EQ(run("frobnicate"), 2); }

TEST_F(Cli, DuplicateSeedsRejected) {
    EXPECT_EQ(run("replicate -e " + (kData / "event_valid.json").string() + " --seeds 1,1 -o " +
                  path("out")),
              2);
}

TEST_F(Cli, UnreachableRemoteOracleExitsThree) {
    const std::string cmd = "ORACLE_ENDPOINT=http://127.0.0.1:1/v1/chat/completions "
                            "ORACLE_API_KEY=k ORACLE_MODEL=m " +
                            std::string(GROUPSIM_CLI) +
                            " --log-level off --oracle remote simulate -e " +
                            (kData / "event_valid.json").string() + " -o " + path("out") +
                            " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    ASSERT_TRUE(WIFEXITED(status));
    EXPECT_EQ(WEXITSTATUS(status), 3);
}

TEST_F(Cli, FixturesReplicateEvaluatePipeline) {
    ASSERT_EQ(run("fixtures -o " + path("events") + " --count 3"), 0);
    EXPECT_TRUE(fs::exists(path("events/event_01.json")));
    EXPECT_TRUE(fs::exists(path("events/event_03.json")));
    ASSERT_EQ(run("replicate -e " + path("events/event_02.json") + " -k 3 -o " + path("rep")), 0);
    EXPECT_TRUE(fs::exists(path("rep/metrics.json")));
    EXPECT_TRUE(fs::exists(path("rep/replicates/seed_3/trace.json")));
    ASSERT_EQ(run("evaluate -t " + path("rep/replicates/seed_1/trace.json") + " -e " +
                  path("events/event_02.json") + " -o " + path("eval.json")),
              0);
    EXPECT_TRUE(fs::exists(path("eval.json")));
}

TEST_F(Cli, GenerateAgentsSavesGraph) {
    ASSERT_EQ(run("generate-agents --country CN --domain education --layer 3 --save-graph " +
                  path("graph") + " -o " + path("agents.json")),
              0);
    EXPECT_TRUE(fs::exists(path("graph/index.json")));
    EXPECT_TRUE(fs::exists(path("graph/CN_education.txt")));
    EXPECT_EQ(run("generate-agents --country FR --domain sports -o " + path("x.json")), 2);
}
