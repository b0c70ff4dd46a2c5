#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class Cli : public ::testing::Test {
   protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("ns3_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }

    Outcome run(const std::string& args) {
        auto out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
        std::string cmd = std::string("NS3_THREADS=2 '") + NS3_CLI_PATH + "' " + args + " >'" + out.string() + "' 2>'" +
                          err.string() + "'";
        int status = std::system(cmd.c_str());
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
    }

    std::string path(const std::string& name) const { return "'" + (dir_ / name).string() + "'"; }

    /// Writes a small graph plus queries and answers into the test directory.
    void prepare() {
        ASSERT_EQ(run("synth-kg --entities 20 --relations 3 --edges 120 --valid-fraction 0.2 --test-fraction 0.2 --out " +
                      path("kg"))
                      .code,
                  0);
        ASSERT_EQ(run("gen-queries --kg " + path("kg") + " --types 2fp,2fc,3fd --per-type 3 --seed 5 --queries " +
                      path("q.txt") + " --answers " + path("a.tsv"))
                      .code,
                  0);
    }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, SynthAndStats) {
    ASSERT_EQ(run("synth-kg --entities 50 --relations 5 --edges 400 --kg-seed 7 --out " + path("kg")).code, 0);
    auto r = run("kg-stats --kg " + path("kg"));
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "entities\trelations\ttrain\tvalid\ttest\n50\t5\t324\t36\t40\n");
}

TEST_F(Cli, OracleReproducesSampledAnswers) {
    prepare();
    ASSERT_EQ(run("oracle --kg " + path("kg") + " --queries " + path("q.txt") + " --out " + path("again.tsv")).code, 0);
    EXPECT_EQ(slurp(dir_ / "a.tsv"), slurp(dir_ / "again.tsv"));
}

TEST_F(Cli, AnswerThenEvalWithExactOracle) {
    prepare();
    ASSERT_EQ(run("answer --kg " + path("kg") + " --queries " + path("q.txt") + " --out " + path("s.txt") +
                  " --predictor oracle:test --budget 8000 --cycle-cap 20")
                  .code,
              0);
    auto r = run("eval --kg " + path("kg") + " --queries " + path("q.txt") + " --scores " + path("s.txt") +
                 " --answers " + path("a.tsv") + " --tsv " + path("r.tsv"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("\"joint_true\""), std::string::npos);
    auto tsv = slurp(dir_ / "r.tsv");
    EXPECT_NE(tsv.find("all\tjoint_true\t"), std::string::npos);
    EXPECT_NE(tsv.find("all\tjoint_true\t9\t1.0\t1.0\t1.0\t1.0\n"), std::string::npos) << tsv;
}

TEST_F(Cli, ZeroBudgetIsConfigError) {
    prepare();
    auto r = run("answer --mode joint --budget 0 --kg " + path("kg") + " --queries " + path("q.txt") + " --out " +
                 path("s.txt"));
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(r.err.rfind("error\tconfig\t", 0), 0u) << r.err;
}

TEST_F(Cli, ErrorClassesMapToExitCodes) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("answer --kg x").code, 2);  // missing required options
    auto missing = run("kg-stats --kg " + path("nothing"));
    EXPECT_EQ(missing.code, 3);
    EXPECT_EQ(missing.err.rfind("error\tdata\t", 0), 0u);
    prepare();
    EXPECT_EQ(run("gen-queries --kg " + path("kg") + " --types 9zz --queries " + path("q2") + " --answers " +
                  path("a2"))
                  .code,
              2);
    {
        std::ofstream(dir_ / "bad.txt") << "# id=a, type=1p\n(q (f y) (r r0 (e nobody) (v y)))\n";
    }
    EXPECT_EQ(run("oracle --kg " + path("kg") + " --queries " + path("bad.txt") + " --out " + path("o.tsv")).code, 3);
    // A zero-removal graph has no hard answers anywhere: sampling gives up.
    ASSERT_EQ(run("synth-kg --entities 10 --edges 30 --valid-fraction 0 --test-fraction 0 --out " + path("flat")).code, 0);
    auto cap = run("gen-queries --kg " + path("flat") + " --types 2fp --per-type 1 --attempt-cap 5 --queries " +
                   path("q3") + " --answers " + path("a3"));
    EXPECT_EQ(cap.code, 4);
    EXPECT_NE(cap.err.find("warning\tshortfall\t2fp\t0/1"), std::string::npos);
}

TEST_F(Cli, BenchFromConfigIsReproducible) {
    std::string config = std::string("'") + NS3_CONFIG_DIR + "/desk.toml'";
    auto a = run("--config " + config + " bench --per-type 2 --out " + path("a") + " --threads 1");
    ASSERT_EQ(a.code, 0) << a.err;
    auto b = run("--config " + config + " bench --per-type 2 --out " + path("b") + " --threads 4");
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(slurp(dir_ / "a" / "report.json"), slurp(dir_ / "b" / "report.json"));
    auto report = slurp(dir_ / "a" / "report.json");
    EXPECT_NE(report.find("\"per_type\": 2"), std::string::npos);  // the flag overrides the file
    EXPECT_NE(report.find("\"predictor\": \"noisy:test:0.3:7\""), std::string::npos);  // the file overrides the default
}
