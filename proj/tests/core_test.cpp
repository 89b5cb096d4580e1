#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "bubblelab/core/csv.hpp"
#include "bubblelab/core/detrend.hpp"
#include "bubblelab/core/rng.hpp"
#include "bubblelab/core/time_series.hpp"
#include "bubblelab/errors.hpp"

namespace bl = bubblelab;

namespace {

std::filesystem::path temp_csv(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

// --- detrend_linear ---------------------------------------------------------

TEST(Detrend, PerfectlyLinearInputGivesZeroResiduals) {
    std::vector<double> v(40);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 2.0 + 3.0 * static_cast<double>(i);
    const bl::TimeSeries y(7, v, "lin");
    const bl::TimeSeries r = bl::detrend_linear(y);
    ASSERT_EQ(r.size(), y.size());
    EXPECT_EQ(r.start_index, 7);
    EXPECT_EQ(r.label, "lin");
    for (double x : r.values) EXPECT_NEAR(x, 0.0, 1e-12);
}

TEST(Detrend, HandSolvedThreePointOracle) {
    // OLS of (1, 2, 4) on (1, t): slope 3/2, intercept 5/6, residuals
    // (1/6, -1/3, 1/6) from the 2x2 normal equations.
    const bl::TimeSeries y(0, {1.0, 2.0, 4.0});
    const bl::TimeSeries r = bl::detrend_linear(y);
    EXPECT_NEAR(r.values[0], 1.0 / 6.0, 1e-12);
    EXPECT_NEAR(r.values[1], -1.0 / 3.0, 1e-12);
    EXPECT_NEAR(r.values[2], 1.0 / 6.0, 1e-12);
}

TEST(Detrend, ConstantSeriesGivesZeroResiduals) {
    const bl::TimeSeries y(3, std::vector<double>(25, 4.25));
    const bl::TimeSeries r = bl::detrend_linear(y);
    for (double x : r.values) EXPECT_NEAR(x, 0.0, 1e-12);
}

TEST(Detrend, ResidualsSumToZeroAndAreOrthogonalToTime) {
    bl::RngStream rng(99, 0);
    bl::TimeSeries y(100, rng.normals(211));
    for (std::size_t i = 0; i < y.size(); ++i) y.values[i] += 0.3 * static_cast<double>(i);
    const bl::TimeSeries r = bl::detrend_linear(y);
    double sum = 0.0;
    double dot_t = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        sum += r.values[i];
        dot_t += r.values[i] * static_cast<double>(i);
        scale += std::abs(r.values[i]) * static_cast<double>(i);
    }
    EXPECT_NEAR(sum, 0.0, 1e-9 * static_cast<double>(r.size()));
    EXPECT_NEAR(dot_t, 0.0, 1e-9 * std::max(scale, 1.0));
}

TEST(Detrend, Idempotent) {
    bl::RngStream rng(7, 1);
    const bl::TimeSeries y(0, rng.normals(150));
    const bl::TimeSeries once = bl::detrend_linear(y);
    const bl::TimeSeries twice = bl::detrend_linear(once);
    for (std::size_t i = 0; i < once.size(); ++i) {
        EXPECT_NEAR(twice.values[i], once.values[i], 1e-9);
    }
}

TEST(Detrend, RejectsSeriesShorterThanThree) {
    const bl::TimeSeries y(0, {1.0, 2.0});
    try {
        (void)bl::detrend_linear(y);
        FAIL() << "expected degenerate-input error";
    } catch (const bl::EngineError& e) {
        EXPECT_EQ(e.category(), bl::ErrorCategory::Data);
        EXPECT_EQ(e.code(), "degenerate_input");
    }
}

// --- RngStream ---------------------------------------------------------------

TEST(Rng, SameSeedAndStreamReproducesBitwise) {
    bl::RngStream a(123456789ULL, 42);
    bl::RngStream b(123456789ULL, 42);
    const auto va = a.normals(1000);
    const auto vb = b.normals(1000);
    ASSERT_EQ(va.size(), vb.size());
    for (std::size_t i = 0; i < va.size(); ++i) EXPECT_EQ(va[i], vb[i]);
}

TEST(Rng, DistinctStreamsDiverge) {
    bl::RngStream a(123456789ULL, 1);
    bl::RngStream b(123456789ULL, 2);
    const auto va = a.normals(64);
    const auto vb = b.normals(64);
    std::size_t differing = 0;
    for (std::size_t i = 0; i < va.size(); ++i) {
        if (va[i] != vb[i]) ++differing;
    }
    EXPECT_GT(differing, 60u);
}

TEST(Rng, DistinctMasterSeedsDiverge) {
    bl::RngStream a(1ULL, 5);
    bl::RngStream b(2ULL, 5);
    const auto va = a.normals(64);
    const auto vb = b.normals(64);
    std::size_t differing = 0;
    for (std::size_t i = 0; i < va.size(); ++i) {
        if (va[i] != vb[i]) ++differing;
    }
    EXPECT_GT(differing, 60u);
}

TEST(Rng, NormalSampleMomentsMatchStandardNormal) {
    bl::RngStream rng(20240917ULL, 3);
    const std::size_t n = 100000;
    const auto v = rng.normals(n);
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= static_cast<double>(n - 1);
    EXPECT_NEAR(mean, 0.0, 0.02);
    EXPECT_NEAR(var, 1.0, 0.03);
}

TEST(Rng, DrawSequenceInvariantToChunkPartition) {
    bl::RngStream whole(55ULL, 9);
    const auto all = whole.normals(100);

    bl::RngStream parts(55ULL, 9);
    std::vector<double> stitched;
    for (std::size_t chunk : {7u, 23u, 1u, 50u, 19u}) {
        const auto piece = parts.normals(chunk);
        stitched.insert(stitched.end(), piece.begin(), piece.end());
    }
    ASSERT_EQ(stitched.size(), all.size());
    for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(stitched[i], all[i]);
}

TEST(Rng, MixedDrawKindsStillPartitionInvariant) {
    // One engine word per variate regardless of kind: interleaving uniforms
    // and normals must not shift the underlying word sequence.
    bl::RngStream a(77ULL, 4);
    std::vector<double> seq_a;
    for (int i = 0; i < 50; ++i) {
        seq_a.push_back(a.uniform());
        seq_a.push_back(a.normal());
    }
    bl::RngStream b(77ULL, 4);
    std::vector<double> words;
    for (int i = 0; i < 100; ++i) words.push_back(b.uniform());
    // normal() is the inverse CDF of the same word stream's uniform.
    for (int i = 0; i < 50; ++i) {
        EXPECT_EQ(seq_a[2 * static_cast<std::size_t>(i)], words[2 * static_cast<std::size_t>(i)]);
    }
}

TEST(Rng, UniformsStrictlyInsideUnitInterval) {
    bl::RngStream rng(3ULL, 0);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(Rng, RademacherIsPlusMinusOneWithHalfProbability) {
    bl::RngStream rng(11ULL, 2);
    long sum = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const int r = rng.rademacher();
        ASSERT_TRUE(r == 1 || r == -1);
        sum += r;
    }
    // 4 sigma: sd of the sum is sqrt(n) ~ 316.
    EXPECT_LT(std::abs(sum), 4 * 317);
}

TEST(Rng, UniformIndexStaysInRange) {
    bl::RngStream rng(13ULL, 6);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) {
        const std::size_t k = rng.uniform_index(7);
        ASSERT_LT(k, 7u);
        ++counts[k];
    }
    for (int c : counts) EXPECT_GT(c, 9000);  // each bin ~10000, 4 sigma below
}

// --- TimeSeries / Frame -------------------------------------------------------

TEST(TimeSeries, AtTimeUsesAbsoluteIndex) {
    const bl::TimeSeries y(10, {1.0, 2.0, 3.0});
    EXPECT_EQ(y.at_time(10), 1.0);
    EXPECT_EQ(y.at_time(12), 3.0);
    EXPECT_EQ(y.end_index(), 12);
    EXPECT_THROW((void)y.at_time(13), bl::EngineError);
    EXPECT_THROW((void)y.at_time(9), bl::EngineError);
}

TEST(TimeSeries, SliceKeepsAbsoluteIndexing) {
    const bl::TimeSeries y(5, {0.0, 1.0, 2.0, 3.0, 4.0}, "x");
    const bl::TimeSeries s = y.slice(6, 8);
    EXPECT_EQ(s.start_index, 6);
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s.values[0], 1.0);
    EXPECT_EQ(s.values[2], 3.0);
    EXPECT_EQ(s.label, "x");
    EXPECT_THROW((void)y.slice(4, 8), bl::EngineError);
    EXPECT_THROW((void)y.slice(8, 6), bl::EngineError);
}

TEST(TimeSeries, RequireValidRejectsEmptyShortAndNonFinite) {
    EXPECT_THROW(bl::TimeSeries(0, {}).require_valid(), bl::EngineError);
    EXPECT_THROW(bl::TimeSeries(0, {1.0, 2.0}).require_valid(5), bl::EngineError);
    EXPECT_THROW(bl::TimeSeries(0, {1.0, std::nan(""), 2.0}).require_valid(), bl::EngineError);
    EXPECT_THROW(bl::TimeSeries(0, {1.0, std::numeric_limits<double>::infinity()}).require_valid(),
                 bl::EngineError);
    EXPECT_NO_THROW(bl::TimeSeries(0, {1.0, 2.0, 3.0}).require_valid(3));
}

TEST(Frame, ExtractThenReinsertIsIdentity) {
    bl::Frame f(100);
    f.add_column("a", {1.0, 2.0, 3.0});
    f.add_column("b", {4.0, 5.0, 6.0});
    const bl::TimeSeries a = f.series("a");
    EXPECT_EQ(a.start_index, 100);
    EXPECT_EQ(a.label, "a");

    bl::Frame g = f.without_column("a");
    g.add_column(a.label, a.values);
    EXPECT_TRUE(g.has_column("a"));
    const auto& round_tripped = g.column("a");
    ASSERT_EQ(round_tripped.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(round_tripped[i], f.column("a")[i]);
}

TEST(Frame, RejectsMisalignedAndDuplicateColumns) {
    bl::Frame f(0);
    f.add_column("a", {1.0, 2.0});
    try {
        f.add_column("b", {1.0, 2.0, 3.0});
        FAIL() << "expected alignment error";
    } catch (const bl::EngineError& e) {
        EXPECT_EQ(e.code(), "alignment");
    }
    try {
        f.add_column("a", {9.0, 9.0});
        FAIL() << "expected duplicate-column error";
    } catch (const bl::EngineError& e) {
        EXPECT_EQ(e.code(), "duplicate_column");
    }
    EXPECT_THROW((void)f.column("zzz"), bl::EngineError);
}

// --- CSV ----------------------------------------------------------------------

TEST(Csv, FormatDoubleRoundTripsBitExactly) {
    const std::vector<double> cases = {0.0,
                                       -0.0,
                                       0.1,
                                       1.0 / 3.0,
                                       -2.5e-308,
                                       1.7976931348623157e308,
                                       3.141592653589793,
                                       -1234.5678901234567,
                                       5e-324};
    for (double x : cases) {
        const std::string s = bl::csv::format_double(x);
        const double back = bl::csv::parse_double(s, "test");
        EXPECT_EQ(back, x) << "formatted as " << s;
    }
}

TEST(Csv, ParseDoubleRejectsTrailingGarbageAndNamesContext) {
    try {
        (void)bl::csv::parse_double("1.5x", "row 17, column 'tfp'");
        FAIL() << "expected parse error";
    } catch (const bl::EngineError& e) {
        EXPECT_EQ(e.category(), bl::ErrorCategory::Data);
        EXPECT_NE(std::string(e.what()).find("row 17"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("tfp"), std::string::npos);
    }
    EXPECT_THROW((void)bl::csv::parse_double("", "c"), bl::EngineError);
    EXPECT_THROW((void)bl::csv::parse_double("abc", "c"), bl::EngineError);
}

TEST(Csv, SeriesRoundTripIsExact) {
    bl::RngStream rng(2024ULL, 8);
    const bl::TimeSeries y(-3, rng.normals(57), "price");
    const auto path = temp_csv("bl_core_series.csv");
    bl::csv::write_series(path.string(), y);
    const bl::TimeSeries back = bl::csv::read_series(path.string());
    EXPECT_EQ(back.start_index, y.start_index);
    EXPECT_EQ(back.label, y.label);
    ASSERT_EQ(back.size(), y.size());
    for (std::size_t i = 0; i < y.size(); ++i) EXPECT_EQ(back.values[i], y.values[i]);
    std::filesystem::remove(path);
}

TEST(Csv, FrameRoundTripIsExactAndOrderPreserving) {
    bl::RngStream rng(2025ULL, 1);
    bl::Frame f(12);
    f.add_column("p", rng.normals(31));
    f.add_column("it_capital", rng.normals(31));
    f.add_column("tfp", rng.normals(31));
    const auto path = temp_csv("bl_core_frame.csv");
    bl::csv::write_frame(path.string(), f);
    const bl::Frame back = bl::csv::read_frame(path.string());
    EXPECT_EQ(back.start_index(), 12);
    ASSERT_EQ(back.n_cols(), 3u);
    EXPECT_EQ(back.name_at(0), "p");
    EXPECT_EQ(back.name_at(1), "it_capital");
    EXPECT_EQ(back.name_at(2), "tfp");
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t r = 0; r < 31; ++r) {
            EXPECT_EQ(back.column_at(c)[r], f.column_at(c)[r]);
        }
    }
    std::filesystem::remove(path);
}

TEST(Csv, ReadSeriesRejectsNonContiguousTime) {
    const auto path = temp_csv("bl_core_gap.csv");
    bl::csv::Table t;
    t.header = {"t", "y"};
    t.rows = {{"0", "1.0"}, {"1", "2.0"}, {"3", "4.0"}};
    bl::csv::write_table(path.string(), t);
    EXPECT_THROW((void)bl::csv::read_series(path.string()), bl::EngineError);
    std::filesystem::remove(path);
}

TEST(Csv, ReadTableRejectsRaggedRowsAndMissingFile) {
    const auto path = temp_csv("bl_core_ragged.csv");
    {
        std::FILE* fp = std::fopen(path.string().c_str(), "w");
        ASSERT_NE(fp, nullptr);
        std::fputs("t,a,b\n0,1.0\n", fp);
        std::fclose(fp);
    }
    EXPECT_THROW((void)bl::csv::read_table(path.string()), bl::EngineError);
    std::filesystem::remove(path);
    EXPECT_THROW((void)bl::csv::read_table("/nonexistent/nowhere.csv"), bl::EngineError);
}

TEST(Csv, ParseErrorNamesRowAndColumnOfBadCell) {
    const auto path = temp_csv("bl_core_badcell.csv");
    bl::csv::Table t;
    t.header = {"t", "tfp"};
    t.rows.resize(17, {"0", "1.0"});
    for (std::size_t i = 0; i < t.rows.size(); ++i) t.rows[i][0] = std::to_string(i);
    t.rows[16][1] = "not_a_number";
    bl::csv::write_table(path.string(), t);
    try {
        (void)bl::csv::read_frame(path.string());
        FAIL() << "expected parse error";
    } catch (const bl::EngineError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("row 17"), std::string::npos) << msg;
        EXPECT_NE(msg.find("'tfp'"), std::string::npos) << msg;
    }
    std::filesystem::remove(path);
}
