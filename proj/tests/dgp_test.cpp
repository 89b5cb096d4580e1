#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "bubblelab/core/csv.hpp"
#include "bubblelab/core/rng.hpp"
#include "bubblelab/core/stats.hpp"
#include "bubblelab/dgp/economy.hpp"
#include "bubblelab/dgp/profile.hpp"
#include "bubblelab/dgp/shape_analytics.hpp"
#include "bubblelab/dgp/stochastic.hpp"
#include "bubblelab/dgp/var_loading.hpp"
#include "bubblelab/errors.hpp"
#include "bubblelab/regress/ols.hpp"

namespace bl = bubblelab;
namespace bd = bubblelab::dgp;

namespace {

bd::TechShockProfile triangular_baseline(double delta_max = 0.15) {
    bd::TechShockProfile p;
    p.shape = bd::ShockShape::Triangular;
    p.delta_max = delta_max;
    p.T1 = 80;
    p.T2 = 200;
    p.tau = 30;
    return p;
}

bd::TechShockProfile with_shape(bd::ShockShape shape, double delta_max = 0.15) {
    bd::TechShockProfile p = triangular_baseline(delta_max);
    p.shape = shape;
    return p;
}

}  // namespace

// --- shock profiles -----------------------------------------------------------------

TEST(DeltaAt, TriangularOracleValues) {
    const bd::TechShockProfile p = triangular_baseline();
    EXPECT_NEAR(bd::delta_at(p, 95), 0.075, 1e-15);         // halfway up the ramp
    EXPECT_EQ(bd::delta_at(p, 79), 0.0);                    // off-support, one before adoption
    EXPECT_EQ(bd::delta_at(p, 110), 0.15);                  // the peak is attained exactly
    EXPECT_EQ(bd::delta_at(p, 201), 0.0);                   // off-support, one past maturation
    EXPECT_NEAR(bd::delta_at(p, 155), 0.15 * 45.0 / 90.0, 1e-15);  // halfway down
}

TEST(DeltaAt, AllShapesRespectSupportBoundsAndPeakNormalization) {
    for (const auto shape : {bd::ShockShape::Triangular, bd::ShockShape::Gaussian,
                             bd::ShockShape::Beta, bd::ShockShape::GammaLike}) {
        const bd::TechShockProfile p = with_shape(shape);
        EXPECT_EQ(bd::delta_at(p, p.T1 - 1), 0.0);
        EXPECT_EQ(bd::delta_at(p, p.T2 + 1), 0.0);
        double max_seen = 0.0;
        for (long t = p.T1; t <= p.T2; ++t) {
            const double d = bd::delta_at(p, t);
            EXPECT_GE(d, 0.0);
            EXPECT_LE(d, p.delta_max + 1e-12);
            max_seen = std::max(max_seen, d);
        }
        EXPECT_NEAR(max_seen, p.delta_max, 1e-9);
    }
}

TEST(DeltaAt, PathEvaluationMatchesPointwiseEvaluation) {
    for (const auto shape : {bd::ShockShape::Beta, bd::ShockShape::GammaLike}) {
        const bd::TechShockProfile p = with_shape(shape);
        const std::vector<double> path = bd::delta_path(p, 250);
        for (long t = 0; t < 250; ++t) {
            EXPECT_EQ(path[static_cast<std::size_t>(t)], bd::delta_at(p, t)) << "t=" << t;
        }
    }
}

TEST(DeltaAt, InvalidProfilesThrow) {
    bd::TechShockProfile p = triangular_baseline();
    p.T2 = p.T1;
    EXPECT_THROW((void)bd::delta_at(p, 100), bl::EngineError);
    p = triangular_baseline();
    p.tau = 0;
    EXPECT_THROW((void)bd::delta_at(p, 100), bl::EngineError);
    p = triangular_baseline();
    p.tau = 120;  // equal to the window width: the decline phase vanishes
    EXPECT_THROW((void)bd::delta_at(p, 100), bl::EngineError);
    p = triangular_baseline();
    p.delta_max = -0.1;
    EXPECT_THROW((void)bd::delta_at(p, 100), bl::EngineError);
    p = with_shape(bd::ShockShape::Beta);
    p.beta_a = 0.5;  // unbounded density at the left edge
    EXPECT_THROW((void)bd::delta_at(p, 100), bl::EngineError);
}

// --- discounted present value -------------------------------------------------------

TEST(PvTerm, VanishesAtMaturationAndForZeroProfiles) {
    const bd::TechShockProfile p = triangular_baseline();
    EXPECT_EQ(bd::pv_term(p, 0.95, 200), 0.0);
    EXPECT_EQ(bd::pv_term(p, 0.95, 250), 0.0);
    const bd::TechShockProfile zero = triangular_baseline(0.0);
    EXPECT_EQ(bd::pv_term(zero, 0.95, 100), 0.0);
}

TEST(PvTerm, MatchesBackwardRecursionOnRandomProfiles) {
    // T_t = rho^{-1} T_{t-1} - rho^{-1} delta_t, checked against direct
    // summation for 50 random (profile, date) pairs.
    bl::RngStream rng(4242, 0);
    const bd::ShockShape shapes[4] = {bd::ShockShape::Triangular, bd::ShockShape::Gaussian,
                                      bd::ShockShape::Beta, bd::ShockShape::GammaLike};
    for (int k = 0; k < 50; ++k) {
        bd::TechShockProfile p;
        p.shape = shapes[rng.uniform_index(4)];
        p.T1 = 5 + static_cast<long>(rng.uniform_index(36));
        const long width = 10 + static_cast<long>(rng.uniform_index(71));
        p.T2 = p.T1 + width;
        p.tau = 1 + static_cast<long>(rng.uniform_index(static_cast<std::size_t>(width - 1)));
        p.delta_max = 0.02 + 0.5 * rng.uniform();
        p.gaussian_sigma = 1.0 + 0.5 * static_cast<double>(width) * rng.uniform();
        const double rho = 0.90 + 0.09 * rng.uniform();
        const long t = p.T1 - 3 + static_cast<long>(rng.uniform_index(static_cast<std::size_t>(width + 6)));
        const double lhs = bd::pv_term(p, rho, t);
        const double rhs = (bd::pv_term(p, rho, t - 1) - bd::delta_at(p, t)) / rho;
        EXPECT_NEAR(lhs, rhs, 1e-10) << "shape " << static_cast<int>(p.shape) << " t=" << t;
    }
}

TEST(PvTerm, PointwiseIncreasingInDiscountDuringAdoption) {
    // The derivative in rho is sum_{j>=1} j rho^{j-1} delta_{t+1+j}, strictly
    // positive while some shock strictly beyond the successor date remains.
    // The triangular profile vanishes at T2 itself, so the last date with any
    // rho exposure is t = T2 - 3.
    const bd::TechShockProfile p = triangular_baseline();
    for (long t = p.T1; t <= p.T2 - 3; ++t) {
        EXPECT_GT(bd::pv_term(p, 0.97, t), bd::pv_term(p, 0.95, t)) << "t=" << t;
    }
    for (long t = p.T2 - 2; t <= p.T2 - 1; ++t) {
        EXPECT_GE(bd::pv_term(p, 0.97, t), bd::pv_term(p, 0.95, t));
    }
}

TEST(PvTerm, TruncatedHorizonConvergesToTheExactValue) {
    const bd::TechShockProfile p = triangular_baseline();
    const double exact = bd::pv_term(p, 0.95, 90);
    double previous = 0.0;
    for (std::size_t horizon : {0u, 5u, 20u, 60u, 200u}) {
        const double truncated = bd::pv_term(p, 0.95, 90, horizon);
        EXPECT_LE(previous, truncated + 1e-15);  // monotone in the horizon (delta >= 0)
        EXPECT_LE(truncated, exact + 1e-15);
        previous = truncated;
    }
    EXPECT_NEAR(bd::pv_term(p, 0.95, 90, 200), exact, 1e-15);  // support exhausted
}

TEST(SecondDifference, TriangularClosedFormOnRampUpInterior) {
    const bd::TechShockProfile p = triangular_baseline();
    const double rho = 0.95;
    const double width = static_cast<double>(p.T2 - p.T1);
    const double tau = static_cast<double>(p.tau);
    for (long t = p.T1 + 1; t <= p.T1 + p.tau - 1; ++t) {
        const double direct = bd::second_difference_pv(p, rho, t);
        const double closed_form =
            p.delta_max * std::pow(rho, static_cast<double>(p.T1 + p.tau - t)) *
            (-1.0 / tau + (std::pow(rho, width - tau) - 1.0) / (width - tau));
        EXPECT_LT(direct, 0.0) << "t=" << t;
        EXPECT_NEAR(direct, closed_form, 1e-9) << "t=" << t;
    }
}

TEST(SecondDifference, GaussianConvexLeftTailIsPositiveNearAdoption) {
    // With width sigma < tau the bell's left tail is strictly convex at the
    // adoption date, so the discounted path inherits positive curvature there.
    bd::TechShockProfile p = with_shape(bd::ShockShape::Gaussian);
    p.gaussian_sigma = 10.0;
    for (long t = p.T1 - 2; t <= p.T1 + 6; ++t) {
        EXPECT_GT(bd::second_difference_pv(p, 0.95, t), 0.0) << "t=" << t;
    }
}

TEST(SecondDifference, ZeroProfileHasZeroCurvature) {
    const bd::TechShockProfile zero = triangular_baseline(0.0);
    for (long t = 70; t <= 210; t += 10) {
        EXPECT_EQ(bd::second_difference_pv(zero, 0.95, t), 0.0);
    }
}

// --- present-value model ------------------------------------------------------------

TEST(PresentValueModel, LevelConstantMatchesItsDefiningFormula) {
    const bd::PresentValueModel m = bd::PresentValueModel::baseline();
    EXPECT_NEAR(m.kappa, 0.19851524334587256, 1e-12);
    EXPECT_NEAR(m.level_constant(), (m.kappa + m.c - m.r_bar) / (1.0 - m.rho), 1e-12);
    EXPECT_NEAR(m.level_constant(), 3.1703048669174512, 1e-9);
}

TEST(PresentValueModel, RejectsOutOfRangeParameters) {
    EXPECT_THROW((void)bd::kappa_from_rho(1.0), bl::EngineError);
    EXPECT_THROW((void)bd::kappa_from_rho(0.0), bl::EngineError);
    bd::PresentValueModel m = bd::PresentValueModel::baseline();
    m.phi = 1.0;
    EXPECT_THROW(m.require_valid(), bl::EngineError);
}

// --- simulated economies ------------------------------------------------------------

TEST(Economy, DeterministicTrendWhenAllShocksAreOff) {
    const bd::TechShockProfile zero = triangular_baseline(0.0);
    const bd::PresentValueModel m = bd::PresentValueModel::baseline();
    bl::RngStream rng(7, 0);
    const bd::SimulatedEconomy econ =
        bd::simulate_economy(zero, m, 250, 0.0, std::nullopt, 0.0, rng);
    const double C = m.level_constant();
    for (std::size_t t = 0; t < 250; ++t) {
        EXPECT_NEAR(econ.fundamental.values[t], C + m.c * static_cast<double>(t), 1e-9);
        EXPECT_EQ(econ.price.values[t], econ.fundamental.values[t]);
        EXPECT_EQ(econ.bubble.values[t], 0.0);
    }
}

TEST(Economy, PresentValueAndDriftIdentitiesHoldPathwise) {
    const bd::TechShockProfile p = triangular_baseline();
    const bd::PresentValueModel m = bd::PresentValueModel::baseline();
    bd::BubbleSpec bubble;
    bubble.start = 100;
    bubble.end = 200;
    bubble.b_init = 0.3;
    bubble.rho_bubble = 1.035;
    bubble.innovation_sd = 0.10;
    bubble.collapse_factor = 0.5;
    bl::RngStream rng(8, 0);
    const bd::SimulatedEconomy econ = bd::simulate_economy(p, m, 300, 0.10, bubble, 0.30, rng);
    const double C = m.level_constant();
    const double inv_rho = 1.0 / m.rho;
    for (std::size_t t = 0; t < 300; ++t) {
        const double f = econ.fundamental.values[t];
        const double d = econ.dividends.values[t];
        const double T = econ.pv_term.values[t];
        EXPECT_NEAR(f - d - C - T, 0.0, 1e-9) << "t=" << t;
        if (t >= 1) {
            const double delta = econ.delta.values[t];
            const double expected_drift =
                m.c + (1.0 - inv_rho) * delta + (inv_rho - 1.0) * econ.pv_term.values[t - 1];
            EXPECT_NEAR(econ.drift.values[t], expected_drift, 1e-9) << "t=" << t;
            EXPECT_NEAR(T, inv_rho * econ.pv_term.values[t - 1] - inv_rho * delta, 1e-9);
        }
    }
}

TEST(Economy, PostMaturationFundamentalIsARandomWalkWithBaselineDrift) {
    const bd::TechShockProfile p = triangular_baseline();
    const bd::PresentValueModel m = bd::PresentValueModel::baseline();
    bl::RngStream rng(9, 0);
    const bd::SimulatedEconomy econ = bd::simulate_economy(p, m, 300, 0.10, std::nullopt, 0.0, rng);
    const double C = m.level_constant();
    for (std::size_t t = static_cast<std::size_t>(p.T2) + 1; t < 300; ++t) {
        // The dividend innovation is recoverable exactly from the cumulation.
        const double eps = econ.dividends.values[t] - econ.dividends.values[t - 1] - m.c -
                           econ.delta.values[t];
        EXPECT_NEAR(econ.fundamental.values[t] - econ.fundamental.values[t - 1] - eps, m.c, 1e-9);
        EXPECT_NEAR(econ.fundamental.values[t], econ.dividends.values[t] + C, 1e-9);
    }
}

TEST(Economy, DriftExceedsBaselineThroughoutAdoptionForEveryShape) {
    const bd::PresentValueModel m = bd::PresentValueModel::baseline();
    for (const auto shape : {bd::ShockShape::Triangular, bd::ShockShape::Gaussian,
                             bd::ShockShape::Beta, bd::ShockShape::GammaLike}) {
        const bd::TechShockProfile p = with_shape(shape);
        bl::RngStream rng(10, 0);
        const bd::SimulatedEconomy econ =
            bd::simulate_economy(p, m, 300, 0.0, std::nullopt, 0.0, rng);
        // Strict dominance on [T1, T2 - 2]; at T2 - 1 the remaining present
        // value is the single maturation-date term, which vanishes for shapes
        // whose profile is zero at T2 (triangular, Beta), so only weak
        // dominance is guaranteed there. Beyond T2 the drift is exactly c.
        for (long t = p.T1; t <= p.T2 - 2; ++t) {
            EXPECT_GT(econ.drift.values[static_cast<std::size_t>(t)], m.c)
                << "shape " << static_cast<int>(shape) << " t=" << t;
        }
        EXPECT_GE(econ.drift.values[static_cast<std::size_t>(p.T2 - 1)], m.c - 1e-12);
        for (long t = p.T2; t < 300; ++t) {
            EXPECT_NEAR(econ.drift.values[static_cast<std::size_t>(t)], m.c, 1e-12);
        }
    }
}

TEST(Economy, DiscountedTermPeaksStrictlyBeforeTheShockPeak) {
    const bd::TechShockProfile p = triangular_baseline();
    const bd::PresentValueModel m = bd::PresentValueModel::baseline();
    bl::RngStream rng(11, 0);
    const bd::SimulatedEconomy econ = bd::simulate_economy(p, m, 300, 0.0, std::nullopt, 0.0, rng);
    const auto peak_of = [](const std::vector<double>& v) {
        return std::distance(v.begin(), std::max_element(v.begin(), v.end()));
    };
    EXPECT_LT(peak_of(econ.pv_term.values), peak_of(econ.delta.values));
    EXPECT_EQ(peak_of(econ.delta.values), p.T1 + p.tau);
}

TEST(Economy, NegativeReturnLoadingAmplifiesTheTechnologyComponent) {
    const bd::TechShockProfile p = triangular_baseline();
    const bd::PresentValueModel m = bd::PresentValueModel::baseline(0.95, 0.02, 0.06, -0.5);
    bl::RngStream rng(12, 0);
    const bd::SimulatedEconomy econ = bd::simulate_economy(p, m, 300, 0.0, std::nullopt, 0.0, rng);
    const double C = m.level_constant();
    for (std::size_t t = 0; t < 300; ++t) {
        const double gap = econ.fundamental.values[t] - econ.dividends.values[t] - C;
        const double T = econ.pv_term.values[t];
        EXPECT_NEAR(gap, 1.5 * T, 1e-9);
        if (T > 0.0) {
            EXPECT_GT(gap, T);
        }
    }
}

TEST(Economy, BubbleComponentFollowsItsThreeRegimes) {
    const bd::TechShockProfile zero = triangular_baseline(0.0);
    const bd::PresentValueModel m = bd::PresentValueModel::baseline();
    bd::BubbleSpec bubble;
    bubble.start = 50;
    bubble.end = 120;
    bubble.b_init = 0.3;
    bubble.rho_bubble = 1.035;
    bubble.innovation_sd = 0.0;  // noise off: the regimes are exact power laws
    bubble.collapse_factor = 0.5;
    bl::RngStream rng(13, 0);
    const bd::SimulatedEconomy econ = bd::simulate_economy(zero, m, 200, 0.0, bubble, 0.0, rng);
    for (long t = 0; t < 50; ++t) EXPECT_EQ(econ.bubble.values[static_cast<std::size_t>(t)], 0.0);
    EXPECT_EQ(econ.bubble.values[50], 0.3);
    for (long t = 51; t <= 120; ++t) {
        EXPECT_NEAR(econ.bubble.values[static_cast<std::size_t>(t)],
                    0.3 * std::pow(1.035, static_cast<double>(t - 50)), 1e-9);
    }
    const double apex = econ.bubble.values[120];
    for (long t = 121; t < 200; ++t) {
        EXPECT_NEAR(econ.bubble.values[static_cast<std::size_t>(t)],
                    apex * std::pow(0.5, static_cast<double>(t - 120)), 1e-9);
    }
    // Prices carry the bubble on top of the fundamental.
    for (std::size_t t = 0; t < 200; ++t) {
        EXPECT_EQ(econ.price.values[t], econ.fundamental.values[t] + econ.bubble.values[t]);
    }
}

TEST(Economy, SerializesToTheStandardFrameAndRoundTrips) {
    const bd::TechShockProfile p = triangular_baseline();
    const bd::PresentValueModel m = bd::PresentValueModel::baseline();
    bl::RngStream rng(14, 0);
    const bd::SimulatedEconomy econ = bd::simulate_economy(p, m, 120, 0.10, std::nullopt, 0.0, rng);
    const bl::Frame frame = econ.to_frame();
    const std::vector<std::string> expected = {"delta", "pv_term", "d", "f", "b", "p", "drift"};
    EXPECT_EQ(frame.names(), expected);
    EXPECT_EQ(frame.start_index(), 0);
    EXPECT_EQ(frame.n_rows(), 120u);

    const std::string path = ::testing::TempDir() + "economy_frame.csv";
    bl::csv::write_frame(path, frame);
    const bl::Frame back = bl::csv::read_frame(path);
    EXPECT_EQ(back.names(), expected);
    for (const auto& name : expected) {
        EXPECT_EQ(back.column(name), frame.column(name)) << name;
    }
}

// --- Bayesian learning --------------------------------------------------------------

TEST(Kalman, OneStepHandOracle) {
    const bd::KalmanState prior{0.0, 1.0};
    const bd::KalmanStep step = bd::kalman_step(prior, 0.5, 1.0, 1.0);
    EXPECT_NEAR(step.gain, 0.4, 1e-15);
    EXPECT_NEAR(step.innovation, 1.0, 1e-15);
    EXPECT_NEAR(step.next.delta_hat, 0.4, 1e-15);
    EXPECT_NEAR(step.next.P, 0.8, 1e-15);
}

TEST(Kalman, GainFormAndClosedFormVarianceUpdatesAgree) {
    bl::RngStream rng(99, 0);
    for (int k = 0; k < 100; ++k) {
        const double P = 2.0 * rng.uniform();
        const double g = 2.0 * rng.uniform() - 1.0;
        const double sigma_xi = 0.01 + rng.uniform();
        const bd::KalmanStep step = bd::kalman_step({rng.normal(), P}, g, sigma_xi, rng.normal());
        const double closed_form = P * sigma_xi * sigma_xi / (g * g * P + sigma_xi * sigma_xi);
        EXPECT_NEAR(step.next.P, closed_form, 1e-12);
        EXPECT_GE(step.next.P, 0.0);
        EXPECT_LE(step.next.P, P + 1e-15);
    }
}

namespace {

bd::StochasticTechSpec panel_spec(double delta_max, double cv, double sigma_xi = 0.005) {
    return bd::StochasticTechSpec::from_profile(triangular_baseline(delta_max), cv, sigma_xi);
}

}  // namespace

TEST(Stochastic, WeightFactoryNormalizesExactlyAndMatchesTheProfileMass) {
    const bd::StochasticTechSpec spec = panel_spec(0.04, 0.5);
    double sum = 0.0;
    for (double g : spec.g_star) sum += g;
    EXPECT_NEAR(sum, 1.0, 1e-12);
    // The discrete triangular mass is delta_max * (ramp sum + decline sum)
    //   = 0.04 * (15.5 + 44.5) = 2.4.
    EXPECT_NEAR(spec.mu_delta, 2.4, 1e-12);
    EXPECT_NEAR(spec.sigma_delta, 1.2, 1e-12);
    EXPECT_EQ(spec.g_star.size(), 201u);
}

TEST(Stochastic, DegeneratePriorReproducesTheDeterministicFilterPath) {
    const bd::StochasticTechSpec spec = panel_spec(0.04, 0.0);
    const bd::PresentValueModel m = bd::PresentValueModel::baseline();
    bl::RngStream rng(21, 0);
    const bd::StochasticSimulation sim =
        bd::simulate_stochastic_economy(spec, m, 300, 0.10, std::nullopt, rng);
    const std::vector<double> G = bd::discounted_weight_path(spec.g_star, m.rho, 300);
    for (std::size_t t = 0; t < 300; ++t) {
        EXPECT_EQ(sim.filter_path[t].delta_hat, spec.mu_delta);
        EXPECT_EQ(sim.filter_path[t].P, 0.0);
        EXPECT_NEAR(sim.economy.pv_term.values[t], spec.mu_delta * G[t], 1e-15);
        // Without ratio noise the price-dividend ratio is the level constant
        // plus the filtered present value, exactly.
        EXPECT_NEAR(sim.pd_ratio.values[t],
                    m.level_constant() + sim.economy.pv_term.values[t], 1e-12);
    }
    EXPECT_EQ(sim.delta_bar, spec.mu_delta);
}

TEST(Stochastic, PosteriorVarianceIsMonotoneNonIncreasingPathwise) {
    const bd::StochasticTechSpec spec = panel_spec(0.06, 0.75, 0.05);
    const bd::PresentValueModel m = bd::PresentValueModel::baseline();
    for (std::uint64_t rep = 0; rep < 50; ++rep) {
        bl::RngStream rng(22, rep);
        const bd::StochasticSimulation sim =
            bd::simulate_stochastic_economy(spec, m, 300, 0.10, std::nullopt, rng);
        for (std::size_t t = 1; t < 300; ++t) {
            EXPECT_LE(sim.filter_path[t].P, sim.filter_path[t - 1].P + 1e-15);
            EXPECT_GE(sim.filter_path[t].P, 0.0);
        }
    }
}

TEST(Stochastic, PosteriorMeanIsEmpiricallyAMartingale) {
    // mean(delta_hat_{t+h} - delta_hat_t) over replications should be within
    // three Monte-Carlo standard errors of zero.
    const bd::StochasticTechSpec spec = panel_spec(0.06, 0.5, 0.05);
    const bd::PresentValueModel m = bd::PresentValueModel::baseline();
    const std::size_t t0 = 100, t1 = 150;
    std::vector<double> diffs;
    diffs.reserve(1000);
    for (std::uint64_t rep = 0; rep < 1000; ++rep) {
        bl::RngStream rng(23, rep);
        const bd::StochasticSimulation sim =
            bd::simulate_stochastic_economy(spec, m, 200, 0.10, std::nullopt, rng);
        diffs.push_back(sim.filter_path[t1].delta_hat - sim.filter_path[t0].delta_hat);
    }
    const double mean_diff = bl::mean(diffs);
    const double se = std::sqrt(bl::sample_variance(diffs) / static_cast<double>(diffs.size()));
    EXPECT_LE(std::abs(mean_diff), 3.0 * se);
}

TEST(Stochastic, FilteredPresentValueIdentityAndRatioNoiseScale) {
    const bd::StochasticTechSpec spec = panel_spec(0.04, 0.5);
    const bd::PresentValueModel m = bd::PresentValueModel::baseline();
    bd::Ar1NoiseSpec noise;
    noise.persistence = 0.95;
    noise.innovation_sd = 0.15 * std::sqrt(1.0 - 0.95 * 0.95);
    bl::RngStream rng(24, 0);
    const bd::StochasticSimulation sim =
        bd::simulate_stochastic_economy(spec, m, 2000, 0.10, noise, rng);
    const double C = m.level_constant();
    std::vector<double> recovered_noise(2000);
    for (std::size_t t = 0; t < 2000; ++t) {
        EXPECT_NEAR(sim.economy.fundamental.values[t] -
                        sim.economy.dividends.values[t] - C - sim.economy.pv_term.values[t],
                    0.0, 1e-9);
        EXPECT_EQ(sim.economy.price.values[t], sim.economy.fundamental.values[t]);
        recovered_noise[t] = sim.pd_ratio.values[t] - C - sim.economy.pv_term.values[t];
    }
    // The ratio noise is a stationary AR(1) with unconditional sd 0.15.
    const double sd = std::sqrt(bl::sample_variance(recovered_noise));
    EXPECT_GT(sd, 0.10);
    EXPECT_LT(sd, 0.20);
}

TEST(Stochastic, CommonRandomNumbersAlignAcrossThePriorGrid) {
    // Re-simulating with the same stream but a different prior sd must reuse
    // the identical shock draws: the impact draw, signal noise, dividend
    // innovations, and ratio noise all line up, so paths differ only through
    // delta_bar.
    const bd::PresentValueModel m = bd::PresentValueModel::baseline();
    bd::Ar1NoiseSpec noise;
    noise.persistence = 0.95;
    noise.innovation_sd = 0.15 * std::sqrt(1.0 - 0.95 * 0.95);
    bl::RngStream rng_a(25, 7);
    const bd::StochasticSimulation base =
        bd::simulate_stochastic_economy(panel_spec(0.04, 0.0), m, 300, 0.10, noise, rng_a);
    bl::RngStream rng_b(25, 7);
    const bd::StochasticSimulation wide =
        bd::simulate_stochastic_economy(panel_spec(0.04, 0.5), m, 300, 0.10, noise, rng_b);

    const bd::StochasticTechSpec spec = panel_spec(0.04, 0.5);
    const double impact_gap = wide.delta_bar - base.delta_bar;
    auto weight_at = [&](std::size_t t) {
        return t < spec.g_star.size() ? spec.g_star[t] : 0.0;
    };
    double cumulative_gap = 0.0;
    for (std::size_t t = 1; t < 300; ++t) {
        // Observed signals differ exactly by the impact gap times the weight.
        const double obs_gap = wide.economy.delta.values[t] - base.economy.delta.values[t];
        EXPECT_NEAR(obs_gap, impact_gap * weight_at(t), 1e-12) << "t=" << t;
        cumulative_gap += obs_gap;
        EXPECT_NEAR(wide.economy.dividends.values[t] - base.economy.dividends.values[t],
                    cumulative_gap, 1e-9) << "t=" << t;
        // The ratio noise u_t is shared, so the ratio gap equals the filtered
        // present-value gap.
        EXPECT_NEAR(wide.pd_ratio.values[t] - base.pd_ratio.values[t],
                    wide.economy.pv_term.values[t] - base.economy.pv_term.values[t], 1e-12);
    }
}

// --- VAR loading --------------------------------------------------------------------

TEST(VarLoading, ZeroTransitionGivesZeroLoading) {
    const Eigen::MatrixXd Phi = Eigen::MatrixXd::Zero(3, 3);
    Eigen::VectorXd gamma(3);
    gamma << 1.0, -0.5, 2.0;
    const Eigen::VectorXd beta = bd::var_technology_loading(Phi, gamma, 0.95);
    EXPECT_NEAR(beta.norm(), 0.0, 1e-14);
}

TEST(VarLoading, ScalarCaseMatchesTheGeometricSeries) {
    Eigen::MatrixXd Phi(1, 1);
    Phi << 0.8;
    Eigen::VectorXd gamma(1);
    gamma << 2.0;
    const Eigen::VectorXd beta = bd::var_technology_loading(Phi, gamma, 0.95);
    EXPECT_NEAR(beta(0), 0.8 * 2.0 / (1.0 - 0.95 * 0.8), 1e-12);
}

TEST(VarLoading, MatchesDirectSeriesSummationIncludingComplexDominantPairs) {
    // A damped rotation has a complex dominant eigenvalue pair, the stress case
    // for power iteration; the loading must still match the truncated series
    // beta = sum_j rho^j (Phi^{j+1})' gamma.
    const double theta = 0.7;
    Eigen::MatrixXd Phi(2, 2);
    Phi << 0.9 * std::cos(theta), -0.9 * std::sin(theta), 0.9 * std::sin(theta),
        0.9 * std::cos(theta);
    Eigen::VectorXd gamma(2);
    gamma << 1.0, 0.5;
    const double rho = 0.95;
    const Eigen::VectorXd beta = bd::var_technology_loading(Phi, gamma, rho);
    Eigen::VectorXd series = Eigen::VectorXd::Zero(2);
    Eigen::MatrixXd power = Phi;  // Phi^{j+1} starting at j = 0
    double weight = 1.0;
    for (int j = 0; j < 2000; ++j) {
        series += weight * power.transpose() * gamma;
        power = Phi * power;
        weight *= rho;
    }
    EXPECT_NEAR((beta - series).norm(), 0.0, 1e-10);
}

TEST(VarLoading, SimulatedRegressionRecoversTheLoading) {
    // Simulate a stable 3-dim VAR, build the realized discounted sum of future
    // shocks, and regress it on the state. The coefficients must lie within
    // two HAC standard errors of the analytic loading (the regression error is
    // serially correlated by construction, being a moving sum of future
    // innovations).
    Eigen::MatrixXd Phi(3, 3);
    Phi << 0.5, 0.1, 0.0, 0.05, 0.6, 0.1, 0.0, 0.1, 0.4;
    Eigen::VectorXd gamma(3);
    gamma << 1.0, 0.5, -0.3;
    const double rho = 0.95;
    const Eigen::VectorXd beta = bd::var_technology_loading(Phi, gamma, rho);

    const std::size_t n_obs = 5000, tail = 600, burn = 100;
    const std::size_t total = n_obs + tail + burn;
    bl::RngStream rng(31, 0);
    std::vector<Eigen::Vector3d> x(total);
    x[0] = Eigen::Vector3d::Zero();
    for (std::size_t t = 1; t < total; ++t) {
        Eigen::Vector3d shock(rng.normal(), rng.normal(), rng.normal());
        x[t] = Phi * x[t - 1] + shock;
    }
    Eigen::VectorXd y(n_obs);
    Eigen::MatrixXd design = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(n_obs), 4);
    for (std::size_t i = 0; i < n_obs; ++i) {
        const std::size_t t = burn + i;
        double pv = 0.0, weight = 1.0;
        for (std::size_t j = 0; j < tail; ++j) {
            pv += weight * gamma.dot(x[t + 1 + j]);
            weight *= rho;
        }
        const auto row = static_cast<Eigen::Index>(i);
        y(row) = pv;
        for (int k = 0; k < 3; ++k) design(row, k + 1) = x[t](k);
    }
    const bl::regress::OlsFit fit = bl::regress::ols(y, design);
    const Eigen::VectorXd se = bl::regress::newey_west_se(fit, design, 40);
    for (int k = 0; k < 3; ++k) {
        EXPECT_NEAR(fit.coefficients(k + 1), beta(k), 2.0 * se(k + 1))
            << "coefficient " << k << " se " << se(k + 1);
    }
}

TEST(VarLoading, ExplosiveDiscountedSeriesThrows) {
    Eigen::MatrixXd Phi(2, 2);
    Phi << 1.2, 0.0, 0.0, 0.3;
    Eigen::VectorXd gamma(2);
    gamma << 1.0, 1.0;
    try {
        (void)bd::var_technology_loading(Phi, gamma, 0.9);  // radius 1.08
        FAIL() << "expected a nonconvergent-series error";
    } catch (const bl::EngineError& e) {
        EXPECT_EQ(e.code(), "nonconvergent_series");
        EXPECT_EQ(e.category(), bl::ErrorCategory::Numeric);
    }
    Eigen::VectorXd wrong_size(3);
    wrong_size << 1.0, 1.0, 1.0;
    EXPECT_THROW((void)bd::var_technology_loading(Phi, wrong_size, 0.9), bl::EngineError);
}

// --- cross-sectional aggregation ----------------------------------------------------

TEST(Aggregate, WeightedLoadingsScaleTheBaseProfile) {
    const bd::TechShockProfile p = triangular_baseline();
    const bl::TimeSeries base = bd::aggregate_heterogeneous({1.0, 1.0, 1.0}, {0.2, 0.3, 0.5}, p, 250);
    for (long t = 0; t < 250; ++t) {
        EXPECT_NEAR(base.values[static_cast<std::size_t>(t)], bd::delta_at(p, t), 1e-12);
    }
    const bl::TimeSeries mixed = bd::aggregate_heterogeneous({2.0, 0.0}, {0.5, 0.5}, p, 250);
    EXPECT_EQ(mixed.values, base.values);
    const bl::TimeSeries none = bd::aggregate_heterogeneous({0.0, 0.0}, {0.5, 0.5}, p, 250);
    for (double v : none.values) EXPECT_EQ(v, 0.0);
}

TEST(Aggregate, RejectsInvalidWeights) {
    const bd::TechShockProfile p = triangular_baseline();
    EXPECT_THROW((void)bd::aggregate_heterogeneous({1.0, 1.0}, {0.7, 0.7}, p, 100), bl::EngineError);
    EXPECT_THROW((void)bd::aggregate_heterogeneous({1.0, 1.0}, {-0.2, 1.2}, p, 100), bl::EngineError);
    EXPECT_THROW((void)bd::aggregate_heterogeneous({1.0}, {0.5, 0.5}, p, 100), bl::EngineError);
}

// --- shape analytics ----------------------------------------------------------------

TEST(ShapeAnalytics, ZeroShapeIntegratesToZero) {
    const auto out = bd::shape_analytics([](double) { return 0.0; }, 0.2, 0.5);
    for (double v : out.integrated) EXPECT_EQ(v, 0.0);
    for (double v : out.detrended) EXPECT_NEAR(v, 0.0, 1e-15);
    EXPECT_TRUE(std::isnan(out.drift_ratio));  // 0/0: no variation in the window
    EXPECT_GE(out.grid.size(), 2001u);
}

TEST(ShapeAnalytics, ConstantShapeHasAffineIntegralAndZeroDetrend) {
    const auto out = bd::shape_analytics([](double) { return 1.0; }, 0.1, 0.9);
    for (std::size_t i = 0; i < out.grid.size(); ++i) {
        EXPECT_NEAR(out.integrated[i], out.grid[i], 1e-12);
        EXPECT_NEAR(out.detrended[i], 0.0, 1e-10);
    }
}

TEST(ShapeAnalytics, DriftRatioHandOracleForAQuadraticShape) {
    // q(r) = r^2 on the full window [0, 1]: mean 1/3, numerator
    // ((2/3)^2 - (1/3)^2)/2 = 1/6, denominator 4/45, ratio 45/24.
    const auto out = bd::shape_analytics([](double r) { return r * r; }, 0.0, 1.0);
    EXPECT_NEAR(out.drift_ratio, 1.875, 1e-9);
}

TEST(ShapeAnalytics, ConvexIncreasingWindowsHavePositiveDriftRatio) {
    const auto quadratic = bd::shape_analytics([](double r) { return r * r; }, 0.2, 0.5);
    EXPECT_GT(quadratic.drift_ratio, 0.0);
    const auto exponential = bd::shape_analytics([](double r) { return std::exp(3.0 * r); }, 0.1, 0.6);
    EXPECT_GT(exponential.drift_ratio, 0.0);
}

TEST(ShapeAnalytics, AffineShapeHasZeroDriftRatio) {
    const auto out = bd::shape_analytics([](double r) { return 2.0 + 3.0 * r; }, 0.2, 0.8);
    EXPECT_NEAR(out.drift_ratio, 0.0, 1e-8);
}

TEST(ShapeAnalytics, RejectsDegenerateWindows) {
    const auto h = [](double r) { return r; };
    EXPECT_THROW((void)bd::shape_analytics(h, 0.5, 0.5), bl::EngineError);
    EXPECT_THROW((void)bd::shape_analytics(h, 0.6, 0.4), bl::EngineError);
    EXPECT_THROW((void)bd::shape_analytics(h, -0.1, 0.5), bl::EngineError);
    EXPECT_THROW((void)bd::shape_analytics(h, 0.5, 1.1), bl::EngineError);
}
