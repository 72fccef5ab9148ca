#include "cli.hpp"

#include "tenring/bench.hpp"
#include "tenring/io.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace tenring;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out, err;
};

Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "tenring");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("tenring_test_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

nlohmann::json read_json(const std::string& p) {
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

}  // namespace

TEST_F(Cli, SynthThenDecompose) {
    auto s = run({"synth", "--order", "3", "--dim", "12", "--rank", "3", "--seed", "5", "--out", path("x.dten"),
                  "--truth-cores", path("truth")});
    ASSERT_EQ(s.code, 0) << s.err;
    const DenseTensor x = load_tensor(path("x.dten"));
    EXPECT_EQ(exact_relative_error(x, load_cores(path("truth"))), 0.0);

    auto d = run({"decompose", path("x.dten"), "--variant", "ne", "--ranks", "3,3,3", "--max-iters", "100", "--seed",
                  "1", "--out", path("report.json"), "--cores-out", path("cores")});
    ASSERT_EQ(d.code, 0) << d.err;
    const auto j = read_json(path("report.json"));
    EXPECT_LE(j["final_error"].get<double>(), 1e-8);
    EXPECT_EQ(j["rel_errors"].size(), 100u);
    EXPECT_EQ(j["config"]["variant"], "ne");
    EXPECT_NEAR(exact_relative_error(x, load_cores(path("cores"))), j["final_error"].get<double>(), 1e-14);
}

TEST_F(Cli, ReportToStdoutAndNoErrorTracking) {
    ASSERT_EQ(run({"synth", "--dim", "6", "--rank", "2", "--out", path("x.dten")}).code, 0);
    auto d = run({"decompose", path("x.dten"), "--ranks", "2,2,2", "--max-iters", "3", "--error", "none"});
    ASSERT_EQ(d.code, 0) << d.err;
    const auto j = nlohmann::json::parse(d.out);
    EXPECT_TRUE(j["rel_errors"].empty());
    EXPECT_TRUE(j["final_error"].is_null());
    EXPECT_EQ(j["iter_seconds"].size(), 3u);
}

TEST_F(Cli, MissingRanksIsUsageError) {
    ASSERT_EQ(run({"synth", "--dim", "4", "--rank", "2", "--out", path("x.dten")}).code, 0);
    EXPECT_EQ(run({"decompose", path("x.dten")}).code, 2);
    EXPECT_EQ(run({"decompose", path("x.dten"), "--ranks", "2,2,2", "--variant", "svd"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(Cli, MalformedInputGivesErrorJson) {
    std::ofstream(path("bad.dten")) << "not a tensor";
    auto d = run({"decompose", path("bad.dten"), "--ranks", "2,2"});
    EXPECT_EQ(d.code, 1);
    const auto j = nlohmann::json::parse(d.err);
    EXPECT_EQ(j["error"]["kind"], "malformed_input");
    EXPECT_FALSE(j["error"]["message"].get<std::string>().empty());
}

TEST_F(Cli, WrongRankCountAndBudget) {
    ASSERT_EQ(run({"synth", "--dim", "4", "--rank", "2", "--out", path("x.dten")}).code, 0);
    auto d = run({"decompose", path("x.dten"), "--ranks", "2,2"});
    EXPECT_EQ(d.code, 1);
    EXPECT_EQ(nlohmann::json::parse(d.err)["error"]["kind"], "dimension_mismatch");
    auto s = run({"synth", "--dim", "1000", "--rank", "1", "--order", "3", "--out", path("big.dten")});
    EXPECT_EQ(s.code, 1);
    EXPECT_EQ(nlohmann::json::parse(s.err)["error"]["kind"], "budget_exceeded");
}

TEST_F(Cli, SynthIsDeterministicAndSized) {
    const std::vector<std::string> args{"synth", "--kind", "congruent", "--gamma", "0.9999999", "--eta", "1e-7",
                                        "--seed", "3"};
    auto a = args, b = args;
    a.insert(a.end(), {"--out", path("a.dten")});
    b.insert(b.end(), {"--out", path("b.dten")});
    ASSERT_EQ(run(a).code, 0);
    ASSERT_EQ(run(b).code, 0);
    EXPECT_EQ(fs::file_size(path("a.dten")), 4u + 4 + 4 + 3 * 8 + 8u * 100 * 100 * 100);
    std::ifstream fa(path("a.dten"), std::ios::binary), fb(path("b.dten"), std::ios::binary);
    EXPECT_TRUE(std::equal(std::istreambuf_iterator<char>(fa), {}, std::istreambuf_iterator<char>(fb)));
}

TEST_F(Cli, BenchWritesCsv) {
    auto r = run({"bench", "--experiment", "a2", "--cell", "N=5", "--max-iters", "2", "--trials", "2", "--out",
                  path("a2.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(path("a2.csv"));
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, tenring::kBenchCsvHeader);
    std::size_t rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    EXPECT_EQ(rows, 2u * 2 * 2);
    EXPECT_EQ(run({"bench", "--experiment", "c9"}).code, 2);
}
