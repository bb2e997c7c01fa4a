// SPDX-License-Identifier: Apache-2.0
#include <fdacov/channel.hpp>
#include <fdacov/random.hpp>
#include <fdacov/schemes.hpp>

#include <boost/math/special_functions/erf.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace fdacov;

namespace {

const PolarPoint bob{7.0711, pi / 4};

ArrayGeometry default_array() { return ArrayGeometry(64, 3e9); }

} // namespace

TEST(Channel, OriginElementHasZeroPhase)
{
    const auto g = default_array();
    const PolarPoint p{3.0, 0.7};
    const cplx h = element_channel(g, 0, 3.2e9, p);
    EXPECT_DOUBLE_EQ(h.real(), path_gain(g, p.r));
    EXPECT_EQ(h.imag(), 0.0);
}

TEST(Channel, EntryMagnitudeIndependentOfFrequency)
{
    const auto g = default_array();
    UniformSource rng(5);
    for (int i = 0; i < 50; ++i) {
        const PolarPoint p{rng.open(0.5, 40.0), rng.open(-1.5, 1.5)};
        const auto k = static_cast<std::size_t>(rng.open(0.0, 63.99));
        const double f = rng.open(2.9e9, 3.1e9);
        EXPECT_NEAR(std::abs(element_channel(g, k, f, p)), path_gain(g, p.r), 1e-15);
    }
}

TEST(Channel, TwoElementBroadsidePhase)
{
    const ArrayGeometry g(2, 3e9);
    const cplx h = element_channel(g, 1, 3e9, {10.0, 0.0});
    // -2 pi f_c / c * d^2 / (2 r)
    EXPECT_NEAR(std::arg(h), -0.007848548197120222, 1e-15);
}

TEST(Channel, SquaredNormIsBetaSquaredOverN)
{
    const auto g = default_array();
    for (const auto& plan : {lpa_plan(g), linear_fda_plan(g, 1e6), random_fda_plan(g, 1e6, 7)}) {
        const auto h = channel_vector(g, plan, bob);
        const double beta = path_gain(g, bob.r);
        EXPECT_NEAR(h.squared_norm(), beta * beta / 64.0, 1e-14 * beta * beta);
        for (const auto& e : h.entries)
            EXPECT_NEAR(std::abs(e), beta / 64.0, 1e-16);
    }
}

TEST(Channel, LpaEqualsZeroIncrementLinear)
{
    const auto g = default_array();
    const auto a = channel_vector(g, lpa_plan(g), {12.0, 0.3});
    const auto b = channel_vector(g, linear_fda_plan(g, 0.0), {12.0, 0.3});
    for (std::size_t k = 0; k < g.size(); ++k)
        EXPECT_EQ(a.entries[k], b.entries[k]);
}

TEST(Channel, OffsetChangeIsLocal)
{
    const auto g = default_array();
    auto plan = random_fda_plan(g, 1e6, 3);
    const auto before = channel_vector(g, plan, {9.0, -0.2});
    plan.offsets_hz[17] += 2.5e5;
    const auto after = channel_vector(g, plan, {9.0, -0.2});
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (k == 17)
            EXPECT_NE(before.entries[k], after.entries[k]);
        else
            EXPECT_EQ(before.entries[k], after.entries[k]);
    }
}

TEST(Channel, PlanLengthMismatch)
{
    const auto g = default_array();
    auto plan = lpa_plan(ArrayGeometry(8, 3e9));
    EXPECT_THROW(channel_vector(g, plan, bob), std::invalid_argument);
}

TEST(Channel, MrtWeights)
{
    const auto g = default_array();
    const auto h = channel_vector(g, random_fda_plan(g, 1e6, 11), bob);
    const auto w = mrt_weights(h);
    double norm = 0.0;
    for (const auto& x : w)
        norm += std::norm(x);
    EXPECT_NEAR(norm, 1.0, 1e-12);
    EXPECT_NEAR(beam_gain(h, w), h.squared_norm(), 1e-14 * h.squared_norm());

    ChannelVector scaled = h;
    for (auto& e : scaled.entries)
        e *= 3.7;
    const auto w2 = mrt_weights(scaled);
    for (std::size_t k = 0; k < w.size(); ++k)
        EXPECT_NEAR(std::abs(w[k] - w2[k]), 0.0, 1e-15);

    ChannelVector zero = h;
    std::fill(zero.entries.begin(), zero.entries.end(), cplx{0.0, 0.0});
    EXPECT_THROW(mrt_weights(zero), std::domain_error);
}

TEST(Channel, BeamGainCauchySchwarz)
{
    const auto g = default_array();
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto plan = random_fda_plan(g, 1e6, seed);
        const auto w = mrt_weights(channel_vector(g, plan, bob));
        UniformSource rng(seed + 100);
        for (int i = 0; i < 50; ++i) {
            const PolarPoint p{rng.open(0.5, 50.0), rng.open(-1.5, 1.5)};
            const auto hx = channel_vector(g, plan, p);
            EXPECT_LE(beam_gain(hx, w), hx.squared_norm() * (1.0 + 1e-12));
        }
    }
}

TEST(Channel, BeamGainCommonPhaseInvariance)
{
    const auto g = default_array();
    const auto plan = random_fda_plan(g, 1e6, 4);
    const auto w = mrt_weights(channel_vector(g, plan, bob));
    auto hx = channel_vector(g, plan, {15.0, 0.2});
    const double before = beam_gain(hx, w);
    for (auto& e : hx.entries)
        e *= std::polar(1.0, 1.234);
    EXPECT_NEAR(beam_gain(hx, w), before, 1e-14 * before);
    EXPECT_THROW(beam_gain(hx, std::span<const cplx>(w).first(10)), std::invalid_argument);
}

TEST(Channel, BobSnrAtDefaults)
{
    const auto g = default_array();
    const LinkBudget budget{dbm_to_watts(20.0), dbm_to_watts(-60.0), dbm_to_watts(-60.0), 100, 1e-5};
    const auto h = channel_vector(g, lpa_plan(g), bob);
    const auto w = mrt_weights(h);
    EXPECT_NEAR(snr_bob(budget, h, w), 1.976174250578086, 1e-12);

    LinkBudget doubled = budget;
    doubled.transmit_power_w *= 2.0;
    EXPECT_NEAR(snr_bob(doubled, h, w), 2.0 * snr_bob(budget, h, w), 1e-12);
}

TEST(Channel, SnrScalesInverselyWithN)
{
    const LinkBudget budget{0.1, 1e-9, 1e-9, 100, 1e-5};
    double ref = 0.0;
    for (std::size_t n : {16u, 32u, 64u, 128u}) {
        const ArrayGeometry g(n, 3e9);
        const auto h = channel_vector(g, lpa_plan(g), bob);
        const double snr = snr_bob(budget, h, mrt_weights(h)) * static_cast<double>(n);
        if (ref == 0.0)
            ref = snr;
        EXPECT_NEAR(snr, ref, 1e-12 * ref);
    }
}

TEST(Channel, DbmConversion)
{
    EXPECT_DOUBLE_EQ(dbm_to_watts(30.0), 1.0);
    EXPECT_NEAR(dbm_to_watts(20.0), 0.1, 1e-17);
    EXPECT_NEAR(dbm_to_watts(-60.0), 1e-9, 1e-24);
    EXPECT_NEAR(watts_to_dbm(0.1), 20.0, 1e-12);
}

TEST(Channel, InverseQAgainstBoost)
{
    // independent route: Q^{-1}(p) = sqrt(2) erfc^{-1}(2p)
    for (int i = 0; i <= 200; ++i) {
        const double p = std::pow(10.0, -9.0 + (std::log10(0.5) + 9.0) * i / 200.0);
        const double ref = std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
        EXPECT_NEAR(inverse_q(p), ref, 1e-10 * std::max(1.0, std::abs(ref))) << "p=" << p;
    }
    EXPECT_NEAR(inverse_q(1e-5), 4.264890793922825, 1e-12);
    EXPECT_NEAR(inverse_q(1e-9), 5.997807015007687, 1e-12);
    EXPECT_NEAR(inverse_q(0.9), -1.2815515655446004, 1e-12);
    EXPECT_EQ(inverse_q(0.5), 0.0);
    EXPECT_THROW(inverse_q(0.0), std::domain_error);
    EXPECT_THROW(inverse_q(1.0), std::domain_error);
}

TEST(Channel, CovertRateValues)
{
    EXPECT_EQ(covert_rate(1.98, 100, 0.5).rate, std::log2(2.98));
    EXPECT_EQ(covert_rate(0.0, 100, 1e-5).rate, 0.0);
    EXPECT_NEAR(covert_rate(1.976174250578086, 100, 1e-5).rate, 0.9939376716128237, 1e-12);
    EXPECT_THROW(covert_rate(1.0, 100, 0.0), std::domain_error);
    EXPECT_THROW(covert_rate(1.0, 100, 1.0), std::domain_error);
    EXPECT_THROW(covert_rate(1.0, 0, 0.1), std::domain_error);
}

TEST(Channel, CovertRateClampsNegative)
{
    const auto r = covert_rate(0.01, 1, 1e-9);
    EXPECT_LT(r.unclamped, 0.0);
    EXPECT_EQ(r.rate, 0.0);
}

TEST(Channel, CovertRateMonotone)
{
    // the dispersion penalty grows like sqrt(snr) near 0, so only the
    // clamped rate is monotone in snr
    for (std::uint64_t L : {10u, 100u, 1000u}) {
        double prev = 0.0;
        for (int i = 0; i < 30; ++i) {
            const double r = covert_rate(0.01 * std::pow(1.5, i), L, 1e-5).rate;
            EXPECT_GE(r, prev);
            if (prev > 0.0) {
                EXPECT_GT(r, prev);
            }
            prev = r;
        }
    }
    for (double snr : {0.5, 2.0, 10.0}) {
        double prev = -1e9;
        for (int i = 0; i < 20; ++i) {
            const double r = covert_rate(snr, 10u + 50u * static_cast<std::uint64_t>(i), 1e-5).unclamped;
            EXPECT_GT(r, prev);
            prev = r;
        }
    }
}

TEST(Channel, NarrowbandWarning)
{
    const auto g = default_array();
    EXPECT_FALSE(exceeds_narrowband(g, random_fda_plan(g, 0.5e6, 1)));
    EXPECT_FALSE(exceeds_narrowband(g, linear_fda_plan(g, 0.5e6)));
    EXPECT_TRUE(exceeds_narrowband(g, linear_fda_plan(g, 2e6)));
}

TEST(Channel, SchemeNames)
{
    for (Scheme s : all_schemes)
        EXPECT_EQ(parse_scheme(to_string(s)), s);
    EXPECT_FALSE(parse_scheme("nope"));
}
