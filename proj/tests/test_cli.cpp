#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

namespace {

struct Result {
    int status = -1;
    std::string out;
};

Result run(const std::string& args) {
    Result r;
    const std::string cmd = std::string(APPORTION_CLI) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string sample(const std::string& name) { return std::string(SAMPLES_DIR) + "/" + name; }

std::string write_temp(const std::string& name, const std::string& body) {
    const std::string path = ::testing::TempDir() + name;
    std::ofstream(path) << body;
    return path;
}

}  // namespace

TEST(Cli, ApportionMethods) {
    const auto h = run("apportion --method hamilton --profile " + sample("census.json") + " --house 10");
    ASSERT_EQ(h.status, 0);
    const auto doc = nlohmann::json::parse(h.out);
    EXPECT_EQ(doc["seats"]["Ada"], 8);
    EXPECT_TRUE(doc["seed"].is_null());
    EXPECT_EQ(doc["quotas"]["Bel"], "11/25");
    for (const char* m : {"huntington-hill", "grimmett", "poisson", "cumulative"})
        EXPECT_EQ(run(std::string("apportion --method ") + m + " --profile " + sample("census.json") + " --house 7 --seed 2").status, 0)
            << m;
}

TEST(Cli, SameSeedSameBytes) {
    const std::string args = "apportion --method cumulative --profile " + sample("census.json") + " --house 12 --seed 99";
    EXPECT_EQ(run(args).out, run(args).out);
    const std::string round = "round --instance " + sample("three_step.json") + " --seed 5 --audit";
    const auto a = run(round);
    EXPECT_EQ(a.status, 0);
    EXPECT_EQ(a.out, run(round).out);
}

TEST(Cli, RoundReportsAudit) {
    const auto r = run("round --instance " + sample("three_step.json") + " --seed 8 --audit");
    ASSERT_EQ(r.status, 0);
    const auto doc = nlohmann::json::parse(r.out);
    EXPECT_EQ(doc["T"], 3);
    EXPECT_EQ(doc["edges"].size(), 3u);
}

TEST(Cli, ErrorExitCodes) {
    EXPECT_EQ(run("apportion --method hamilton --profile /nonexistent.json --house 3").status, 2);
    const auto bad = write_temp("bad_instance.json", R"({"a_nodes":["x"],"b_nodes":["y"],"T":1,
        "edges":[{"a":"x","b":"y","weights":["3/2"]}]})");
    EXPECT_EQ(run("round --instance " + bad + " --seed 1").status, 2);
    const auto heavy = write_temp("heavy.json", R"({"seats":2,"members":[{"name":"a","weight":10},
        {"name":"b","weight":1},{"name":"c","weight":1}]})");
    EXPECT_EQ(run("simulate --app sortition --config " + heavy + " --rounds 3 --seed 1").status, 3);
    EXPECT_EQ(run("apportion --method cumulative --profile " + sample("census.json") + " --house 9 --hmax 5 --seed 1").status,
              3);
}

TEST(Cli, VerifySuites) {
    for (const char* suite : {"theorem1", "pitfalls", "bijection"})
        EXPECT_EQ(run(std::string("verify --suite ") + suite).status, 0) << suite;
    EXPECT_EQ(run("verify --suite stats --samples 20000 --seed 3").status, 0);
}

TEST(Cli, SimulateWritesCsv) {
    const std::string csv = ::testing::TempDir() + "teaching.csv";
    ASSERT_EQ(run("simulate --app assignment --config " + sample("teaching.json") + " --rounds 4 --seed 2 --out " + csv).status, 0);
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "semester,faculty,course");
    const auto s = run("simulate --app sortition --config " + sample("commission.json") + " --rounds 20 --seed 2");
    ASSERT_EQ(s.status, 0);
    EXPECT_EQ(nlohmann::json::parse(s.out)["audit"]["violations"].size(), 0u);
}
