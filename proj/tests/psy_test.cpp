#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "bubblelab/core/csv.hpp"
#include "bubblelab/core/rng.hpp"
#include "bubblelab/core/stats.hpp"
#include "bubblelab/core/time_series.hpp"
#include "bubblelab/errors.hpp"
#include "bubblelab/psy/psy.hpp"
#include "bubblelab/regress/adf.hpp"

namespace bl = bubblelab;
namespace bp = bubblelab::psy;

namespace {

bl::TimeSeries random_walk(std::uint64_t master, std::uint64_t stream, std::size_t T) {
    bl::RngStream rng(master, stream);
    std::vector<double> v(T);
    double level = 0.0;
    for (auto& x : v) {
        level += rng.normal();
        x = level;
    }
    return bl::TimeSeries(0, std::move(v), "rw");
}

bp::PsyConfig default_config(std::size_t T, std::size_t K = 1) {
    bp::PsyConfig cfg;
    cfg.r0_fraction = bp::default_r0(T);
    cfg.lag_K = K;
    return cfg;
}

}  // namespace

// --- window policy -------------------------------------------------------------

TEST(PsyConfigTest, DefaultR0FollowsRuleOfThumbFormula) {
    EXPECT_NEAR(bp::default_r0(372), 0.01 + 1.8 / std::sqrt(372.0), 1e-15);
    EXPECT_NEAR(bp::default_r0(372), 0.103326, 1e-6);
    EXPECT_NEAR(bp::default_r0(324), 0.11, 1e-12);  // 1.8/18 exactly
    EXPECT_NEAR(bp::default_r0(611), 0.0828203, 1e-6);
    EXPECT_THROW((void)bp::default_r0(29), bl::EngineError);
}

TEST(PsyConfigTest, MinimumWindowIsCeilingOfFractionTimesSample) {
    bp::PsyConfig cfg;
    cfg.lag_K = 1;
    cfg.r0_fraction = bp::default_r0(372);
    EXPECT_EQ(cfg.min_window_obs(372), 39u);  // ceil(38.44)
    cfg.r0_fraction = 0.11;
    EXPECT_EQ(cfg.min_window_obs(324), 36u);  // ceil(35.64)
    cfg.r0_fraction = 0.1;
    EXPECT_EQ(cfg.min_window_obs(300), 30u);  // exact product stays exact
    cfg.r0_fraction = bp::default_r0(300);
    EXPECT_EQ(cfg.min_window_obs(300), 35u);  // ceil(34.18)
}

TEST(PsyConfigTest, RejectsFractionBelowFloorAndWindowsTooSmallForLags) {
    bp::PsyConfig cfg;
    cfg.r0_fraction = 0.009;
    cfg.lag_K = 1;
    EXPECT_THROW((void)cfg.min_window_obs(300), bl::EngineError);
    cfg.r0_fraction = 0.01;  // window of 3 cannot host K+4 = 5
    EXPECT_THROW((void)cfg.min_window_obs(300), bl::EngineError);
    cfg.r0_fraction = 0.5;
    cfg.lag_K = 99;
    EXPECT_THROW((void)cfg.min_window_obs(300), bl::EngineError);
}

// --- backward statistic ----------------------------------------------------------

TEST(Bsadf, SingleAdmissibleWindowEqualsWindowedAdf) {
    const bl::TimeSeries y = random_walk(10, 0, 40);
    bp::PsyConfig cfg;
    cfg.r0_fraction = 0.5;
    cfg.lag_K = 1;
    ASSERT_EQ(cfg.min_window_obs(40), 20u);
    const double b = bp::bsadf(y, 19, cfg);
    const double a = bubblelab::regress::adf_t_stat(y, 0, 19, 1).t_stat;
    EXPECT_NEAR(b, a, 1e-10);
}

TEST(Bsadf, SupDominatesAnySingleWindowSharingTheEndpoint) {
    bl::TimeSeries y = random_walk(11, 0, 200);
    const std::vector<double> orig = y.values;
    for (std::size_t t = 160; t < 200; ++t) {
        y.values[t] = y.values[t - 1] * 1.05 + (orig[t] - orig[t - 1]) * 0.1;
    }
    const bp::PsyConfig cfg = default_config(200);
    const std::size_t minw = cfg.min_window_obs(200);
    const double b = bp::bsadf(y, 199, cfg);
    EXPECT_GE(b + 1e-10, bubblelab::regress::adf_t_stat(y, 200 - minw, 199, 1).t_stat);
    EXPECT_GE(b + 1e-10, bubblelab::regress::adf_t_stat(y, 0, 199, 1).t_stat);
    EXPECT_GE(b + 1e-10, bubblelab::regress::adf_t_stat(y, 150, 199, 1).t_stat);
}

TEST(Bsadf, RejectsEndpointsBeforeTheMinimumWindow) {
    const bl::TimeSeries y = random_walk(12, 0, 100);
    const bp::PsyConfig cfg = default_config(100);
    const std::size_t minw = cfg.min_window_obs(100);
    EXPECT_THROW((void)bp::bsadf(y, minw - 2, cfg), bl::EngineError);
    EXPECT_THROW((void)bp::bsadf(y, 100, cfg), bl::EngineError);
    EXPECT_NO_THROW((void)bp::bsadf(y, minw - 1, cfg));
}

TEST(Bsadf, NullMeanSitsWellAboveTheSingleWindowMean) {
    // A full-sample ADF t-statistic on a random walk has mean near -1.57.  Taking
    // the sup over all qualifying start dates shifts the location up by roughly
    // one unit, to about -0.61 at T = 300 (measured over large replications, with
    // the incremental and naive engines agreeing to 4e-15).  Freeze a band around
    // that location; a sign error or an off-by-one in the window sweep moves the
    // mean far outside it.
    const std::size_t T = 300;
    const bp::PsyConfig cfg = default_config(T);
    double sup_sum = 0.0;
    double full_sum = 0.0;
    const int reps = 200;
    for (int m = 0; m < reps; ++m) {
        const bl::TimeSeries y = random_walk(2100, static_cast<std::uint64_t>(m), T);
        sup_sum += bp::bsadf(y, T - 1, cfg);
        full_sum += bubblelab::regress::adf_t_stat(y, 0, T - 1, cfg.lag_K).t_stat;
    }
    const double mean_sup = sup_sum / reps;
    const double mean_full = full_sum / reps;
    EXPECT_GE(mean_sup, -0.9);
    EXPECT_LE(mean_sup, -0.3);
    EXPECT_GT(mean_sup, mean_full + 0.5);
}

// --- full recursive sweep ---------------------------------------------------------

TEST(Gsadf, EqualsTheMaximumOfTheBackwardSequence) {
    const bl::TimeSeries y = random_walk(13, 0, 250);
    const bp::ExplosiveTestResult r = bp::gsadf(y, default_config(250));
    double best = -1e300;
    for (double x : r.bsadf_sequence) {
        if (std::isfinite(x)) best = std::max(best, x);
    }
    EXPECT_EQ(r.gsadf, best);
    EXPECT_EQ(r.first_r2 + r.bsadf_sequence.size(), 250u);
}

TEST(Gsadf, NegativeOnDecayingDeterministicSeries) {
    // Sums of decaying exponentials are strictly decreasing and mean-reverting,
    // but are not an exact AR fit, so every window yields a proper negative
    // statistic. Three components keep the K=1 design non-degenerate.
    std::vector<double> two(60), three(60);
    for (std::size_t t = 0; t < 60; ++t) {
        const double a = std::pow(0.9, static_cast<double>(t));
        const double b = std::pow(0.7, static_cast<double>(t));
        const double c = std::pow(0.5, static_cast<double>(t));
        two[t] = 5.0 * a + 3.0 * b;
        three[t] = 5.0 * a + 3.0 * b + 2.0 * c;
    }
    bp::PsyConfig cfg;
    cfg.r0_fraction = 0.3;
    cfg.lag_K = 0;
    EXPECT_LT(bp::gsadf(bl::TimeSeries(0, two), cfg).gsadf, 0.0);
    cfg.lag_K = 1;
    EXPECT_LT(bp::gsadf(bl::TimeSeries(0, three), cfg).gsadf, 0.0);
}

TEST(Gsadf, ExplosiveTailProducesLargeStatistic) {
    bl::TimeSeries y = random_walk(14, 0, 300);
    const std::vector<double> orig = y.values;
    for (std::size_t t = 250; t < 300; ++t) {
        y.values[t] = 1.05 * y.values[t - 1] + 0.1 * (orig[t] - orig[t - 1]);
    }
    const bp::ExplosiveTestResult r = bp::gsadf(y, default_config(300));
    EXPECT_GT(r.gsadf, 3.0);
}

TEST(Gsadf, ShrinkingTheMinimumWindowNeverDecreasesTheStatistic) {
    const bl::TimeSeries y = random_walk(15, 0, 200);
    bp::PsyConfig wide = default_config(200);
    wide.r0_fraction = 0.25;
    bp::PsyConfig narrow = wide;
    narrow.r0_fraction = 0.10;
    EXPECT_GE(bp::gsadf(y, narrow).gsadf + 1e-12, bp::gsadf(y, wide).gsadf);
}

TEST(Gsadf, IncrementalKernelMatchesNaiveRefitOracle) {
    {
        const bl::TimeSeries y = random_walk(16, 0, 90);
        const bp::PsyConfig cfg = default_config(90, 1);
        const bp::ExplosiveTestResult fast = bp::gsadf(y, cfg, bp::Engine::Incremental);
        const bp::ExplosiveTestResult slow = bp::gsadf(y, cfg, bp::Engine::Naive);
        ASSERT_EQ(fast.bsadf_sequence.size(), slow.bsadf_sequence.size());
        for (std::size_t j = 0; j < fast.bsadf_sequence.size(); ++j) {
            EXPECT_NEAR(fast.bsadf_sequence[j], slow.bsadf_sequence[j], 1e-8) << "r2 offset " << j;
        }
        EXPECT_NEAR(fast.gsadf, slow.gsadf, 1e-8);
    }
    {
        // Keep innovation noise in the explosive tail: a noise-free AR(1) fits some
        // windows exactly, and near-zero residual variance amplifies rounding error
        // into meaninglessly huge statistics that no two algorithms reproduce alike.
        bl::TimeSeries y = random_walk(17, 0, 80);
        const std::vector<double> orig = y.values;
        for (std::size_t t = 60; t < 80; ++t) {
            y.values[t] = 1.06 * y.values[t - 1] + 0.05 + 0.2 * (orig[t] - orig[t - 1]);
        }
        bp::PsyConfig cfg = default_config(80, 0);
        const bp::ExplosiveTestResult fast = bp::gsadf(y, cfg, bp::Engine::Incremental);
        const bp::ExplosiveTestResult slow = bp::gsadf(y, cfg, bp::Engine::Naive);
        for (std::size_t j = 0; j < fast.bsadf_sequence.size(); ++j) {
            EXPECT_NEAR(fast.bsadf_sequence[j], slow.bsadf_sequence[j], 1e-8) << "r2 offset " << j;
        }
    }
}

// --- critical values ---------------------------------------------------------------

namespace {

/// Shared small critical-value table so the slow simulation runs once.
const bp::CriticalValueTable& small_null_table() {
    static const bp::CriticalValueTable table = [] {
        bp::PsyConfig cfg = default_config(300);
        return bp::simulate_critical_values(300, cfg, {0.10, 0.05, 0.01}, 500, 777);
    }();
    return table;
}

}  // namespace

TEST(CriticalValues, OrderedAcrossLevelsAndConsistentGrid) {
    const bp::CriticalValueTable& t = small_null_table();
    ASSERT_EQ(t.levels.size(), 3u);
    EXPECT_GT(t.gsadf_cv[2], t.gsadf_cv[1]);  // 1% above 5%
    EXPECT_GT(t.gsadf_cv[1], t.gsadf_cv[0]);  // 5% above 10%
    EXPECT_EQ(t.first_r2 + t.bsadf_cv[0].size(), t.T);
    EXPECT_EQ(t.first_r2, 34u);  // ceil(default r0 * 300) - 1
}

TEST(CriticalValues, NullNinetyFifthPercentileMatchesSimulatedFivePercentValue) {
    const bp::CriticalValueTable& table = small_null_table();
    std::vector<double> draws;
    const bp::PsyConfig cfg = default_config(300);
    for (int m = 0; m < 200; ++m) {
        draws.push_back(bp::gsadf(random_walk(4242, static_cast<std::uint64_t>(m), 300), cfg).gsadf);
    }
    const double q95 = bl::quantile_type7(draws, 0.95);
    EXPECT_NEAR(q95, table.gsadf_cv[1], 0.15);
}

TEST(CriticalValues, NullRejectionRateAtFivePercentStaysInBinomialBand) {
    const bp::CriticalValueTable& table = small_null_table();
    const bp::PsyConfig cfg = default_config(300);
    int rejections = 0;
    for (int m = 0; m < 200; ++m) {
        const double g = bp::gsadf(random_walk(9090, static_cast<std::uint64_t>(m), 300), cfg).gsadf;
        if (g > table.gsadf_cv[1]) ++rejections;
    }
    EXPECT_GE(rejections, 2);   // 1% of 200
    EXPECT_LE(rejections, 20);  // 10% of 200
}

TEST(CriticalValues, IdenticalForAnyWorkerCount) {
    const bp::PsyConfig cfg = default_config(120);
    const bp::CriticalValueTable a =
        bp::simulate_critical_values(120, cfg, {0.10, 0.05, 0.01}, 200, 55, 1);
    const bp::CriticalValueTable b =
        bp::simulate_critical_values(120, cfg, {0.10, 0.05, 0.01}, 200, 55, 3);
    ASSERT_EQ(a.gsadf_cv.size(), b.gsadf_cv.size());
    for (std::size_t i = 0; i < a.gsadf_cv.size(); ++i) {
        EXPECT_EQ(a.gsadf_cv[i], b.gsadf_cv[i]);
        for (std::size_t j = 0; j < a.bsadf_cv[i].size(); ++j) {
            EXPECT_EQ(a.bsadf_cv[i][j], b.bsadf_cv[i][j]);
        }
    }
}

TEST(CriticalValues, MedianLevelReproducesTheEmpiricalMedian) {
    const std::size_t T = 100;
    const bp::PsyConfig cfg = default_config(T);
    const std::uint64_t seed = 31;
    const bp::CriticalValueTable table = bp::simulate_critical_values(T, cfg, {0.5}, 201, seed);

    std::vector<double> draws;
    for (std::uint64_t m = 0; m < 201; ++m) {
        draws.push_back(bp::gsadf(random_walk(seed, m, T), cfg).gsadf);
    }
    EXPECT_EQ(table.gsadf_cv[0], bl::quantile_type7(draws, 0.5));
}

TEST(CriticalValues, RejectsTooFewReplicationsAndBadLevels) {
    const bp::PsyConfig cfg = default_config(100);
    EXPECT_THROW((void)bp::simulate_critical_values(100, cfg, {0.05}, 199, 1), bl::EngineError);
    EXPECT_THROW((void)bp::simulate_critical_values(100, cfg, {}, 200, 1), bl::EngineError);
    EXPECT_THROW((void)bp::simulate_critical_values(100, cfg, {1.5}, 200, 1), bl::EngineError);
}

// --- date stamping -----------------------------------------------------------------

namespace {

bp::CriticalValueTable flat_cv_table(std::size_t first_r2, std::size_t len, double value) {
    bp::CriticalValueTable t;
    t.T = first_r2 + len;
    t.levels = {0.05};
    t.gsadf_cv = {value};
    t.first_r2 = first_r2;
    t.bsadf_cv = {std::vector<double>(len, value)};
    return t;
}

}  // namespace

TEST(DateStamp, FindsMaximalRunsAboveTheCriticalSequence) {
    bp::ExplosiveTestResult r;
    r.first_r2 = 50;
    r.bsadf_sequence.assign(100, 0.0);
    for (std::size_t j = 10; j <= 30; ++j) r.bsadf_sequence[j] = 2.0;
    for (std::size_t j = 80; j <= 82; ++j) r.bsadf_sequence[j] = 3.0;
    r.gsadf = 3.0;
    const auto episodes = bp::date_stamp(r, flat_cv_table(50, 100, 1.0), 0.05);
    ASSERT_EQ(episodes.size(), 2u);
    EXPECT_EQ(episodes[0].start, 60u);
    EXPECT_EQ(episodes[0].end, 80u);
    EXPECT_EQ(episodes[1].start, 130u);
    EXPECT_EQ(episodes[1].end, 132u);
}

TEST(DateStamp, SequenceEntirelyBelowGivesNoEpisodes) {
    bp::ExplosiveTestResult r;
    r.first_r2 = 10;
    r.bsadf_sequence.assign(40, -0.5);
    EXPECT_TRUE(bp::date_stamp(r, flat_cv_table(10, 40, 1.0), 0.05).empty());
}

TEST(DateStamp, SinglePeriodEpisodesAreKept) {
    bp::ExplosiveTestResult r;
    r.first_r2 = 0;
    r.bsadf_sequence.assign(20, 0.0);
    r.bsadf_sequence[7] = 5.0;
    const auto episodes = bp::date_stamp(r, flat_cv_table(0, 20, 1.0), 0.05);
    ASSERT_EQ(episodes.size(), 1u);
    EXPECT_EQ(episodes[0].start, 7u);
    EXPECT_EQ(episodes[0].end, 7u);
}

TEST(DateStamp, MisalignedGridsAndUnknownLevelsAreErrors) {
    bp::ExplosiveTestResult r;
    r.first_r2 = 10;
    r.bsadf_sequence.assign(40, 0.0);
    EXPECT_THROW((void)bp::date_stamp(r, flat_cv_table(11, 40, 1.0), 0.05), bl::EngineError);
    EXPECT_THROW((void)bp::date_stamp(r, flat_cv_table(10, 39, 1.0), 0.05), bl::EngineError);
    EXPECT_THROW((void)bp::date_stamp(r, flat_cv_table(10, 40, 1.0), 0.01), bl::EngineError);
}

// --- serialization -----------------------------------------------------------------

TEST(CvSerialization, RoundTripsExactlyWithContractHeaders) {
    const bp::PsyConfig cfg = default_config(80);
    const bp::CriticalValueTable table =
        bp::simulate_critical_values(80, cfg, {0.10, 0.05, 0.01}, 200, 99);

    const auto dir = std::filesystem::temp_directory_path();
    const std::string scalar = (dir / "bl_cv_scalar.csv").string();
    const std::string seq = (dir / "bl_cv_seq.csv").string();
    bp::write_critical_values(table, scalar, seq);

    const bl::csv::Table raw_scalar = bl::csv::read_table(scalar);
    ASSERT_EQ(raw_scalar.header, (std::vector<std::string>{"level", "gsadf_cv"}));
    const bl::csv::Table raw_seq = bl::csv::read_table(seq);
    ASSERT_EQ(raw_seq.header, (std::vector<std::string>{"r2_index", "cv_10", "cv_05", "cv_01"}));

    const bp::CriticalValueTable back =
        bp::read_critical_values(scalar, seq, cfg.r0_fraction, cfg.lag_K, 200, 99);
    EXPECT_EQ(back.T, table.T);
    EXPECT_EQ(back.first_r2, table.first_r2);
    ASSERT_EQ(back.levels, table.levels);
    for (std::size_t i = 0; i < table.levels.size(); ++i) {
        EXPECT_EQ(back.gsadf_cv[i], table.gsadf_cv[i]);
        ASSERT_EQ(back.bsadf_cv[i].size(), table.bsadf_cv[i].size());
        for (std::size_t j = 0; j < table.bsadf_cv[i].size(); ++j) {
            EXPECT_EQ(back.bsadf_cv[i][j], table.bsadf_cv[i][j]);
        }
    }
    std::filesystem::remove(scalar);
    std::filesystem::remove(seq);
}

TEST(CvSerialization, CacheStemEncodesTheFullKey) {
    const std::string stem = bp::cv_cache_stem(372, bp::default_r0(372), 1, 2000, 42);
    EXPECT_NE(stem.find("T372"), std::string::npos);
    EXPECT_NE(stem.find("K1"), std::string::npos);
    EXPECT_NE(stem.find("n2000"), std::string::npos);
    EXPECT_NE(stem.find("s42"), std::string::npos);
    EXPECT_NE(stem.find(bl::csv::format_double(bp::default_r0(372))), std::string::npos);
}
