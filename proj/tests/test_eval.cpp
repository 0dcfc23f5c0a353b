#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "droso/error.hpp"
#include "droso/eval.hpp"
#include "droso/rng.hpp"
#include "oracles.hpp"
#include "synth_bench.hpp"

using namespace droso;

namespace {

std::vector<MatchResult> results_from(const std::vector<double>& confidence, const std::vector<bool>& correct) {
    std::vector<MatchResult> out;
    for (std::size_t i = 0; i < confidence.size(); ++i) {
        MatchResult m;
        m.query = i;
        m.confidence = confidence[i];
        m.correct = correct[i];
        out.push_back(m);
    }
    return out;
}

std::vector<MatchResult> random_results(Rng& rng, std::size_t n) {
    std::vector<double> conf(n);
    std::vector<bool> ok(n);
    for (std::size_t i = 0; i < n; ++i) {
        conf[i] = static_cast<double>(rng.below(5)) / 4.0;  // coarse grid forces ties
        ok[i] = rng.below(2) == 1;
    }
    return results_from(conf, ok);
}

}  // namespace

TEST(MatchCorrect, InclusiveTolerance) {
    EXPECT_TRUE(match_correct(12, 10, 2));
    EXPECT_FALSE(match_correct(13, 10, 2));
    EXPECT_TRUE(match_correct(10, 10, 0));
    EXPECT_TRUE(match_correct(8, 10, 2));
    EXPECT_FALSE(match_correct(7, 10, 2));
}

TEST(PrCurve, AllCorrect) {
    const auto r = results_from({.9, .5, .5, .1}, {true, true, true, true});
    const PRCurve c = pr_curve(r);
    EXPECT_EQ(c.points.back(), (CurvePoint{1.0, 1.0}));
    EXPECT_EQ(c.auc, 1.0);
}

TEST(PrCurve, NoneCorrect) {
    const PRCurve c = pr_curve(results_from({.9, .8, .3}, {false, false, false}));
    for (const auto& p : c.points) EXPECT_EQ(p.precision, 0.0);
    EXPECT_EQ(c.auc, 0.0);
}

TEST(PrCurve, FourResultExample) {
    const auto r = results_from({.9, .8, .7, .6}, {true, true, false, true});
    const PRCurve c = pr_curve(r);
    ASSERT_EQ(c.points.size(), 4u);
    EXPECT_EQ(c.points[0], (CurvePoint{0.25, 1.0}));
    EXPECT_EQ(c.points[1], (CurvePoint{0.5, 1.0}));
    EXPECT_EQ(c.points[2], (CurvePoint{0.5, 2.0 / 3.0}));
    EXPECT_EQ(c.points[3], (CurvePoint{0.75, 0.75}));
    const oracle::Curve want = oracle::pr_enumerate(r);
    EXPECT_EQ(c.auc, want.auc);
    EXPECT_NEAR(c.auc, 0.25 + 0.25 + 0.25 * (2.0 / 3.0 + 0.75) / 2.0, 1e-15);
}

TEST(PrCurve, MatchesEnumerationOracle) {
    Rng rng(77);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto r = random_results(rng, 1 + rng.below(10));
        const PRCurve c = pr_curve(r);
        const oracle::Curve want = oracle::pr_enumerate(r);
        EXPECT_EQ(c.points, want.points);
        EXPECT_EQ(c.auc, want.auc);
        EXPECT_GE(c.auc, 0.0);
        EXPECT_LE(c.auc, 1.0);
        for (std::size_t i = 1; i < c.points.size(); ++i) EXPECT_GE(c.points[i].recall, c.points[i - 1].recall);
    }
}

TEST(PrCurve, PermutingTiesKeepsAuc) {
    Rng rng(78);
    for (int trial = 0; trial < 200; ++trial) {
        auto r = random_results(rng, 2 + rng.below(30));
        const double auc = pr_curve(r).auc;
        for (int shuffle = 0; shuffle < 5; ++shuffle) {
            for (std::size_t i = r.size() - 1; i > 0; --i) std::swap(r[i], r[rng.below(i + 1)]);
            for (std::size_t i = 0; i < r.size(); ++i) r[i].query = i;
            EXPECT_EQ(pr_curve(r).auc, auc);
        }
    }
}

TEST(PrCurve, RejectsEmptyOrNonFinite) {
    EXPECT_THROW(pr_curve(std::vector<MatchResult>{}), DataError);
    auto r = results_from({0.5, std::nan("")}, {true, false});
    EXPECT_THROW(pr_curve(r), DataError);
}

TEST(PrCurve, CsvFormat) {
    const PRCurve c = pr_curve(results_from({.9, .8}, {true, false}));
    std::ostringstream out;
    write_pr_csv(out, c);
    EXPECT_EQ(out.str(), "recall,precision\n0.500000,1.000000\n0.500000,0.500000\n");

    std::vector<MatchResult> m{{3, 4, 5, 0.25, true}};
    std::ostringstream log;
    write_match_log(log, m);
    EXPECT_EQ(log.str(), "query,predicted,truth,confidence,correct\n3,4,5,0.250000,1\n");
}

class EvaluateTest : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        data_ = new bench::Data(bench::make(0.0, 0));
        ensemble_ = new Ensemble(bench::train(*data_, 8));
    }
    static void TearDownTestSuite() {
        delete ensemble_;
        delete data_;
    }
    static bench::Data* data_;
    static Ensemble* ensemble_;
};
bench::Data* EvaluateTest::data_ = nullptr;
Ensemble* EvaluateTest::ensemble_ = nullptr;

TEST_F(EvaluateTest, TrainingImagesGivePerfectCurve) {
    GroundTruth gt;
    const Evaluation e = evaluate(*ensemble_, data_->reference, gt);
    EXPECT_EQ(e.curve.auc, 1.0);
    EXPECT_EQ(e.correct_rate(), 1.0);
    for (std::size_t q = 0; q < e.matches.size(); ++q) {
        EXPECT_EQ(e.matches[q].query, q);
        EXPECT_EQ(e.matches[q].truth, q);
    }
}

TEST_F(EvaluateTest, SingleCorrectQuery) {
    GroundTruth gt;
    gt.mapping = {7};
    const Evaluation e = evaluate(*ensemble_, std::span(data_->reference).subspan(7, 1), gt);
    EXPECT_TRUE(e.matches[0].correct);
    EXPECT_EQ(e.curve.auc, 1.0);
}

TEST_F(EvaluateTest, DeterministicAcrossThreadCounts) {
    const auto noisy = bench::make(0.3, 10);
    GroundTruth gt;
    gt.tolerance = 1;
    setenv("DROSO_THREADS", "1", 1);
    const Evaluation a = evaluate(*ensemble_, noisy.queries, gt);
    setenv("DROSO_THREADS", "4", 1);
    const Evaluation b = evaluate(*ensemble_, noisy.queries, gt);
    unsetenv("DROSO_THREADS");
    EXPECT_EQ(a.matches, b.matches);
    EXPECT_EQ(a.curve.auc, b.curve.auc);
    for (const auto& m : a.matches) {
        const VoteResult v = vote(*ensemble_, noisy.queries[m.query]);
        EXPECT_EQ(m.predicted, v.place);
        EXPECT_EQ(m.confidence, *std::max_element(v.fused.begin(), v.fused.end()));
    }
}

TEST_F(EvaluateTest, MappingMustCoverQueries) {
    GroundTruth gt;
    gt.mapping = {0, 1};
    EXPECT_THROW(evaluate(*ensemble_, data_->queries, gt), DataError);
    EXPECT_THROW(evaluate(*ensemble_, std::vector<ImageVector>{}, GroundTruth{}), DataError);
}

TEST_F(EvaluateTest, BenchmarkStatistics) {
    const LatencyStats s = benchmark(*ensemble_, data_->queries[0], 20);
    EXPECT_EQ(s.iterations, 20u);
    EXPECT_GT(s.mean_ms, 0.0);
    EXPECT_GE(s.p95_ms, 0.0);
    EXPECT_DOUBLE_EQ(s.fps, 1000.0 / s.mean_ms);
    EXPECT_THROW(benchmark(*ensemble_, data_->queries[0], 9), ParameterError);
}
