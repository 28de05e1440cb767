#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "fsdr/fsdr.hpp"
#include "test_support.hpp"

using namespace fsdr;
namespace fs = std::filesystem;

namespace {

struct CliResult {
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
        dir_ = fs::temp_directory_path() /
               ("fsdr_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    [[nodiscard]] std::string path(const std::string& name) const { return (dir_ / name).string(); }

    CliResult run(const std::string& args) const {
        const std::string cmd = std::string("\"") + FSDR_CLI_PATH + "\" " + args + " > \"" + path("stdout.txt") +
                                "\" 2> \"" + path("stderr.txt") + "\"";
        const int status = std::system(cmd.c_str());
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(path("stdout.txt")), slurp(path("stderr.txt"))};
    }

    fs::path dir_;
};

// Model I case (i) sample as x.csv and (mu, sigma) y.csv.
SimSample write_model_one(const Cli* t, const std::string& x, const std::string& y, int n) {
    SimDesign design;
    design.n = n;
    const auto s = generate(design);
    const auto& q = std::get<QuantileDistributions>(s.y);
    Matrix ym(n, 2);
    ym << q.mu, q.sigma;
    write_csv_matrix(x, s.x);
    write_csv_matrix(y, ym);
    (void)t;
    return s;
}

}  // namespace

TEST_F(Cli, EvalSelfDistanceCorrelationIsOne) {
    Rng rng(1);
    write_csv_matrix(path("a.csv"), fsdr::testing::random_normal(30, 2, rng));
    const auto r = run("eval --a " + path("a.csv") + " --b " + path("a.csv") + " --stat dcor");
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "1.0\n");
}

TEST_F(Cli, EvalTraceCorrelation) {
    write_csv_matrix(path("a.csv"), Matrix::Identity(3, 1));
    Matrix b(3, 1);
    b << 0, 1, 0;
    write_csv_matrix(path("b.csv"), b);
    const auto r = run("eval --a " + path("a.csv") + " --b " + path("b.csv") + " --stat trace");
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "0.0\n");
}

TEST_F(Cli, UsageErrorsExitOne) {
    const auto unknown = run("eval --bogus 1");
    EXPECT_EQ(unknown.code, 1);
    EXPECT_NE((unknown.out + unknown.err).find("Usage"), std::string::npos);
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("frobnicate").code, 1);
    EXPECT_EQ(run("simulate --model V").code, 1);
}

TEST_F(Cli, DataErrorsExitTwo) {
    const auto r = run("eval --a " + path("missing.csv") + " --b " + path("missing.csv"));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("missing.csv"), std::string::npos);
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
    std::ofstream(path("ragged.csv")) << "1,2\n3\n";
    EXPECT_EQ(run("eval --a " + path("ragged.csv") + " --b " + path("ragged.csv")).code, 2);
}

TEST_F(Cli, ParameterErrorsExitOne) {
    write_model_one(this, path("x.csv"), path("y.csv"), 30);
    const auto r = run("fit-linear --x " + path("x.csv") + " --y " + path("y.csv") + " --metric wasserstein --d 0");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("parameter error"), std::string::npos);
}

TEST_F(Cli, NumericalErrorsExitThree) {
    Matrix y = Matrix::Zero(8, 2);
    y.bottomRows(3) << 1, 0, 0, 1, 1, 1;
    write_csv_matrix(path("y.csv"), y);
    const auto r = run("distances --y " + path("y.csv") + " --metric lle --k 3 --m 1");
    EXPECT_EQ(r.code, 3) << r.err;
}

TEST_F(Cli, OrderPrintsDimensionAndCurves) {
    write_model_one(this, path("x.csv"), path("y.csv"), 200);
    const auto r = run("order --x " + path("x.csv") + " --y " + path("y.csv") + " --metric wasserstein --seed 1 --out " +
                       path("curves.csv"));
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "d_hat=1\n");
    const std::string curves = slurp(path("curves.csv"));
    EXPECT_EQ(curves.rfind("k,f_n,g_n,objective\n", 0), 0u);
    EXPECT_EQ(std::count(curves.begin(), curves.end(), '\n'), 11);
}

TEST_F(Cli, FitLinearMatchesLibraryAndIsDeterministic) {
    const auto s = write_model_one(this, path("x.csv"), path("y.csv"), 120);
    const std::string args = "fit-linear --x " + path("x.csv") + " --y " + path("y.csv") +
                             " --metric wasserstein --d 1 --dump-diagnostics --predictors " + path("z.csv") + " --out ";
    ASSERT_EQ(run(args + path("b1.csv")).code, 0);
    ASSERT_EQ(run(args + path("b2.csv")).code, 0);
    EXPECT_EQ(slurp(path("b1.csv")), slurp(path("b2.csv")));
    const auto fit = wire_fit(s.x, pairwise_distance_matrix(s.y, MetricSpec::wasserstein()), 1);
    EXPECT_EQ(read_csv_matrix(path("b1.csv")), fit.basis);
    EXPECT_EQ(read_csv_matrix(path("z.csv")), sufficient_predictors(s.x, fit));
    EXPECT_EQ(read_csv_matrix(path("b1.M_hat.csv")), fit.M_hat);
    EXPECT_EQ(read_csv_matrix(path("b1.singular_values.csv")).rows(), 10);

    // Same fit from a precomputed distance file.
    ASSERT_EQ(run("distances --y " + path("y.csv") + " --metric wasserstein --out " + path("d.csv")).code, 0);
    ASSERT_EQ(run("fit-linear --x " + path("x.csv") + " --dist " + path("d.csv") + " --d 1 --out " + path("b3.csv")).code,
              0);
    EXPECT_EQ(slurp(path("b3.csv")), slurp(path("b1.csv")));
}

TEST_F(Cli, DistancesAreDeterministic) {
    Rng rng(3);
    write_csv_matrix(path("y.csv"), fsdr::testing::random_normal(40, 3, rng));
    const std::string args = "distances --y " + path("y.csv") + " --metric isomap --k 6 --out ";
    ASSERT_EQ(run(args + path("d1.csv")).code, 0);
    ASSERT_EQ(run(args + path("d2.csv")).code, 0);
    EXPECT_EQ(slurp(path("d1.csv")), slurp(path("d2.csv")));
    const Matrix d = read_csv_matrix(path("d1.csv"));
    EXPECT_EQ(d.rows(), 40);
    EXPECT_TRUE(d == d.transpose());
}

TEST_F(Cli, NonlinearFitThenPredict) {
    Rng rng(4);
    const Matrix x = fsdr::testing::random_normal(40, 2, rng);
    write_csv_matrix(path("x.csv"), x);
    write_csv_matrix(path("y.csv"), Matrix(x.col(0).array().sin().matrix()));
    const auto fit = run("fit-nonlinear --x " + path("x.csv") + " --y " + path("y.csv") +
                         " --d 2 --sigma 1.0 --epsilon 0.001 --out " + path("fit"));
    ASSERT_EQ(fit.code, 0) << fit.err;
    for (const char* f : {"alpha.csv", "gamma.csv", "eigenvalues.csv", "x_train.csv", "params.csv", "predictors.csv"})
        EXPECT_TRUE(fs::exists(dir_ / "fit" / f)) << f;
    const auto pr = run("predict --fit " + path("fit") + " --x " + path("x.csv") + " --out " + path("pred.csv"));
    ASSERT_EQ(pr.code, 0) << pr.err;
    Matrix pred = read_csv_matrix(path("pred.csv"));
    pred.rowwise() -= pred.colwise().mean();
    EXPECT_LE((pred - read_csv_matrix(path("fit/predictors.csv"))).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_EQ(run("predict --fit " + path("nofit") + " --x " + path("x.csv")).code, 2);
}

TEST_F(Cli, SimulateWritesReplicateRows) {
    const auto r = run("simulate --model II --case ii --n 60 --reps 4 --method kwire --out " + path("s.csv"));
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string csv = slurp(path("s.csv"));
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
    EXPECT_NE(csv.find("\nmean,"), std::string::npos);
    EXPECT_NE(r.out.find("mean_rho2="), std::string::npos);
    ASSERT_EQ(run("simulate --model II --case ii --n 60 --reps 4 --method kwire --threads 3 --out " + path("t.csv")).code,
              0);
    EXPECT_EQ(slurp(path("t.csv")), csv);
}

TEST_F(Cli, DigitsPipelineSmall) {
    const fs::path data = fs::path(FSDR_DATA_DIR) / "optdigits.tes";
    if (!fs::exists(data)) GTEST_SKIP() << "optdigits.tes not present";
    const auto r = run("digits --train " + data.string() + " --test " + data.string() +
                       " --classes 1,7 --method wire --metric euclidean --out " + path("dg") + " --svg " +
                       path("dg/plot.svg"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("train="), std::string::npos);
    EXPECT_TRUE(fs::exists(dir_ / "dg" / "train_predictors.csv"));
    EXPECT_TRUE(fs::exists(dir_ / "dg" / "test_predictors.csv"));
    EXPECT_TRUE(fs::exists(dir_ / "dg" / "plot-train.svg"));
    EXPECT_TRUE(fs::exists(dir_ / "dg" / "plot-test.svg"));
    EXPECT_EQ(read_csv_matrix(dir_ / "dg" / "train_predictors.csv").cols(), 2);
    EXPECT_EQ(run("digits --train " + data.string() + " --test " + data.string() + " --classes x --out " + path("dg"))
                  .code,
              1);
}
