#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mpr/cli.hpp"

using namespace mpr;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream o, e;
    const int c = cli::run(args, o, e);
    return {c, o.str(), e.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("mpr_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string put(const std::string& name, const ScheduleMatrix& m) {
        const auto p = (dir_ / name).string();
        save_matrix(p, m);
        return p;
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_F(CliTest, GenKgIsBitIdenticalAcrossRuns) {
    const auto a = path("a.mat"), b = path("b.mat");
    ASSERT_EQ(run({"gen", "kg", "--k", "4", "--d", "1", "--n", "8", "--seed", "42", "-o", a}).code, 0);
    ASSERT_EQ(run({"gen", "kg", "--k", "4", "--d", "1", "--n", "8", "--seed", "42", "-o", b}).code, 0);
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_EQ(slurp(a + ".json"), slurp(b + ".json"));

    const auto meta = json::parse(slurp(a + ".json"));
    for (const char* key : {"k", "d", "n", "eps", "seed", "mode", "plan", "generator"}) EXPECT_TRUE(meta.contains(key)) << key;
    EXPECT_EQ(meta["seed"], 42);
    EXPECT_EQ(meta["generator"], kGeneratorName);
    std::size_t rows = 1;
    for (const auto& c : meta["plan"]) rows += c["t"].get<std::size_t>();
    const auto m = load_matrix(a);
    EXPECT_EQ(m.t(), rows);
    EXPECT_TRUE(is_kg_sim(m, {4, 1, 8}).pass);

    // no -o: matrix on stdout, identical bytes
    const auto r = run({"gen", "kg", "--k", "4", "--d", "1", "--n", "8", "--seed", "42"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, slurp(a));
}

TEST_F(CliTest, GenSelectorRowCount) {
    const auto r = run({"gen", "selector", "--k", "2", "--m", "1", "--d", "1", "--n", "4", "--eps", "1", "--seed", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto m = parse_matrix(r.out);
    EXPECT_EQ(m.t(), 4u);
    EXPECT_TRUE(is_selector(m, {2, 1, 1, 4}).pass);
}

TEST_F(CliTest, GenKgDegenerate) {
    const auto r = run({"gen", "kg", "--k", "2", "--d", "2", "--n", "4", "--seed", "0"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(parse_matrix(r.out), ScheduleMatrix::ones(1, 4));
}

TEST_F(CliTest, GenStagedResolves) {
    const auto r = run({"gen", "staged", "--d", "1", "--n", "5", "--seed", "3", "-o", path("s.mat")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto meta = json::parse(slurp(path("s.mat.json")));
    EXPECT_EQ(meta["stages"].size(), 4u);
    const auto m = load_matrix(path("s.mat"));
    for (std::uint32_t s = 0; s < 32; ++s) {
        std::vector<std::size_t> ids;
        for (std::size_t j = 0; j < 5; ++j)
            if ((s >> j) & 1U) ids.push_back(j + 1);
        EXPECT_TRUE(resolves(m, StationSet(ids), 1));
    }
}

TEST_F(CliTest, GenAutoSeedIsReported) {
    const auto r = run({"gen", "kg", "--k", "2", "--d", "1", "--n", "3"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.err.find("seed="), std::string::npos);
}

TEST_F(CliTest, VerifyExitCodes) {
    const auto id = put("id.mat", ScheduleMatrix::identity(3));
    auto r = run({"verify", "kg", id, "--k", "2", "--d", "1"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(json::parse(r.out)["pass"], true);

    const auto ones = put("ones.mat", ScheduleMatrix::ones(1, 2));
    r = run({"verify", "kg", ones, "--k", "2", "--d", "1"});
    EXPECT_EQ(r.code, 1);
    const auto rep = json::parse(r.out);
    EXPECT_EQ(rep["pass"], false);
    EXPECT_EQ(rep["counterexample"], json::array({1, 2}));

    r = run({"verify", "kg-def", ones, "--k", "2", "--d", "2"});
    EXPECT_EQ(r.code, 0);

    r = run({"verify", "selector", id, "--k", "2", "--m", "2", "--d", "1"});
    EXPECT_EQ(r.code, 0);
    r = run({"verify", "lt-leq", id, "--k", "2"});
    EXPECT_EQ(r.code, 0);
    r = run({"verify", "lt-exact", ones, "--k", "2"});
    EXPECT_EQ(r.code, 1);
}

TEST_F(CliTest, VerifyCapsAndErrors) {
    auto r = run({"verify", "selector", "--k", "20", "--n", "40"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("error"), std::string::npos);
    r = run({"verify", "nonsense", put("x.mat", ScheduleMatrix::identity(2)), "--k", "1"});
    EXPECT_EQ(r.code, 2);
    r = run({"verify", "kg", path("missing.mat"), "--k", "1"});
    EXPECT_EQ(r.code, 2);
    r = run({"verify", "kg", put("y.mat", ScheduleMatrix::identity(2)), "--k", "3"});
    EXPECT_EQ(r.code, 2);
}

TEST_F(CliTest, SimulateWritesCsv) {
    const auto f = put("ex.mat", ScheduleMatrix::from_rows({{1, 1, 1}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
    auto r = run({"simulate", f, "--active", "1,2,3", "--d", "2"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out,
              "slot,kind,num_transmitters,succeeded_stations\n"
              "1,conflict,3,\n"
              "2,success,1,1\n"
              "3,success,1,2\n"
              "4,success,1,3\n");
    EXPECT_NE(r.err.find("resolved=true slots_used=4"), std::string::npos);

    r = run({"simulate", f, "--active", "", "--d", "1"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.err.find("slots_used=n/a"), std::string::npos);

    r = run({"simulate", put("id.mat", ScheduleMatrix::identity(3)), "--active", "2", "--d", "1"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(count_lines(r.out), 4u);

    r = run({"simulate", put("o.mat", ScheduleMatrix::ones(1, 3)), "--active", "1,2", "--d", "1"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("resolved=false"), std::string::npos);

    EXPECT_EQ(run({"simulate", f, "--active", "1,x", "--d", "1"}).code, 2);
    EXPECT_EQ(run({"simulate", f, "--active", "4", "--d", "1"}).code, 2);
}

TEST_F(CliTest, SimulateStagesInOrder) {
    const auto a = put("a.mat", ScheduleMatrix::ones(1, 2));
    const auto b = put("b.mat", ScheduleMatrix::identity(2));
    const auto r = run({"simulate", a, b, "--active", "1,2", "--d", "1"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(count_lines(r.out), 4u);
}

TEST_F(CliTest, Bounds) {
    auto r = run({"bounds", "tsel", "--k", "4", "--m", "2", "--d", "1", "--n", "16"});
    ASSERT_EQ(r.code, 0);
    auto j = json::parse(r.out);
    EXPECT_NEAR(j["raw"].get<double>(), 214.53157858935848, 1e-9);
    EXPECT_EQ(j["integral"], 215);
    EXPECT_EQ(j["preconditions_met"], true);

    j = json::parse(run({"bounds", "tlt-leq", "--k", "9", "--d", "2", "--n", "216"}).out);
    EXPECT_NEAR(j["raw"].get<double>(), 2.972595109027346, 1e-12);
    EXPECT_EQ(j["integral"], 3);

    j = json::parse(run({"bounds", "tlt-exact", "--k", "8", "--d", "2", "--n", "100"}).out);
    EXPECT_EQ(j["preconditions_met"], false);

    j = json::parse(run({"bounds", "tkg", "--k", "4", "--d", "1", "--n", "8", "--eps", "0.5"}).out);
    EXPECT_EQ(j["integral"], 32);

    j = json::parse(run({"bounds", "p1p2", "--k", "2", "--m", "1", "--d", "1", "--p", "0.25"}).out);
    EXPECT_NEAR(j["P1"].get<double>(), 0.625, 1e-15);

    j = json::parse(run({"bounds", "claim1", "--k", "8", "--m", "4", "--d", "3"}).out);
    EXPECT_NEAR(j["raw"].get<double>(), 0.18106792754821907, 1e-15);

    EXPECT_EQ(run({"bounds", "claim1", "--k", "4", "--m", "4", "--d", "1"}).code, 2);
    EXPECT_EQ(run({"bounds", "nope", "--k", "4"}).code, 2);
}

TEST_F(CliTest, SweepConstructionLength) {
    const std::vector<std::string> args{"sweep", "--measurement", "construction_length", "--k", "16", "--d", "1,2,4,8",
                                        "--n", "256", "--eps", "0.5", "--seed", "9"};
    const auto r = run(args);
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream is(r.out);
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "k,d,n,eps,trial,measurement,value");
    std::vector<long long> vals;
    while (std::getline(is, line)) vals.push_back(std::stoll(line.substr(line.rfind(',') + 1)));
    ASSERT_EQ(vals.size(), 4u);
    for (std::size_t i = 1; i < vals.size(); ++i) EXPECT_LE(vals[i], vals[i - 1]);

    auto par = args;
    par.insert(par.end(), {"--workers", "4"});
    EXPECT_EQ(run(par).out, r.out);
}

TEST_F(CliTest, SweepGenAttemptsAndResiduals) {
    auto r = run({"sweep", "--measurement", "gen_attempts", "--k", "4", "--d", "1", "--n", "8", "--trials", "40",
                  "--seed", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream is(r.out);
    std::string line;
    std::getline(is, line);
    double total = 0;
    int rows = 0;
    while (std::getline(is, line)) {
        total += std::stod(line.substr(line.rfind(',') + 1));
        ++rows;
    }
    EXPECT_EQ(rows, 40);
    EXPECT_LE(total / rows, 2.0);

    r = run({"sweep", "--measurement", "residual_actives", "--k", "5", "--m", "3", "--d", "1", "--n", "10", "--trials",
             "30", "--seed", "6"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream is2(r.out);
    std::getline(is2, line);
    while (std::getline(is2, line)) EXPECT_LE(std::stoul(line.substr(line.rfind(',') + 1)), 2u);
}

TEST_F(CliTest, SweepResolutionSlotsAndSkips) {
    const auto r = run({"sweep", "--measurement", "resolution_slots", "--k", "2,5", "--d", "1,3", "--n", "4", "--trials",
                        "3", "--seed", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    // only (2,1,4) is legal: (2,3) has d>k, k=5 exceeds n
    EXPECT_EQ(count_lines(r.out), 4u);
    EXPECT_NE(r.err.find("skipping"), std::string::npos);
}

TEST_F(CliTest, ParseErrorsExitTwo) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"gen", "kg", "--k", "2"}).code, 2);
    EXPECT_EQ(run({"gen", "kg", "--k", "x", "--d", "1", "--n", "3"}).code, 2);
    EXPECT_EQ(run({"gen", "kg", "--k", "2", "--d", "1", "--n", "3", "--mode", "bogus"}).code, 2);
    EXPECT_EQ(run({"gen", "kg", "--k", "2", "--d", "1", "--n", "3", "--eps", "0"}).code, 2);
    EXPECT_EQ(run({"sweep", "--k", "2", "--d", "1", "--n", "3", "--measurement", "nope"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, BinaryRuns) {
    const std::string cmd = std::string(MPR_CLI_PATH) + " bounds tsel --k 4 --m 2 --d 1 --n 16 > " + path("b.txt");
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    EXPECT_EQ(json::parse(slurp(path("b.txt")))["integral"], 215);
    const std::string bad = std::string(MPR_CLI_PATH) + " verify selector --k 20 --n 40 2> " + path("e.txt");
    const int rc = std::system(bad.c_str());
    EXPECT_EQ(WEXITSTATUS(rc), 2);
}
