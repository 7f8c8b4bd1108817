#include <gtest/gtest.h>

#include <cmath>

#include "mldp/mldp.hpp"
#include "test_support.hpp"

using namespace mldp;
namespace ts = testing_support;

namespace {

KTupleDistribution doublet(std::vector<double> v) { return {2, 2, std::move(v)}; }

const MarkovModel& skewed() {
    static const auto m = build_model(doublet({0.4, 0.2, 0.2, 0.2}));
    return m;
}

}  // namespace

TEST(SandwichConstants, UniformModelHasZeroConstants) {
    const auto c = sandwich_constants(build_model(KTupleDistribution::uniform(2, 2)));
    EXPECT_NEAR(c.c_lower, 0.0, 1e-15);
    EXPECT_NEAR(c.c_upper, 0.0, 1e-15);
}

TEST(LikelihoodSandwich, UniformModelIsExact) {
    const auto m = build_model(KTupleDistribution::uniform(2, 2));
    ts::Rng rng(51);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t l = 2 + trial % 9;
        const auto s = likelihood_sandwich(m, ts::random_path(rng, 2, l));
        EXPECT_NEAR(s.exact, -static_cast<double>(l) * std::log(2.0), 1e-12);
        EXPECT_NEAR(s.lower, s.exact, 1e-12);
        EXPECT_NEAR(s.upper, s.exact, 1e-12);
    }
}

TEST(LikelihoodSandwich, SkewedModelAllShortPaths) {
    for (std::size_t l = 2; l <= 10; ++l)
        for (std::uint64_t i = 0; i < ipow(2, l); ++i) EXPECT_TRUE(likelihood_sandwich(skewed(), ts::path_at(2, l, i)).holds());
}

TEST(LikelihoodSandwich, RandomModelsAndPaths) {
    ts::Rng rng(52);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + trial % 2;
        const std::size_t s = 1 + trial % 3 / 2;
        const auto m = ts::random_positive_model(rng, n, s);
        const auto x = ts::random_path(rng, n, s + 1 + trial % 40);
        const auto w = likelihood_sandwich(m, x);
        EXPECT_TRUE(w.holds()) << w.lower << " " << w.exact << " " << w.upper;
    }
}

TEST(LikelihoodSandwich, Preconditions) {
    EXPECT_THROW(likelihood_sandwich(skewed(), SamplePath::from_letters(2, "a")), domain_error);
    const auto pm = build_model(KTupleDistribution::point_mass(2, 2, 0));
    EXPECT_THROW(likelihood_sandwich(pm, SamplePath::from_letters(2, "aa")), hypothesis_error);
}

TEST(Delta, PointMassClass) {
    for (std::size_t l = 2; l <= 10; ++l) {
        std::vector<Count> c{static_cast<Count>(l), 0, 0, 0};
        const double d = delta_exact(skewed(), EmpiricalMeasure(2, 2, c));
        const double ld = static_cast<double>(l);
        EXPECT_NEAR(d, (std::log(0.6) + (ld - 1.0) * std::log(2.0 / 3.0)) / ld, 1e-13);
    }
}

TEST(Delta, TenStepClassUnderUniformModel) {
    const auto m = build_model(KTupleDistribution::uniform(3, 2));
    const double d = delta_exact(m, EmpiricalMeasure(3, 2, {0, 1, 2, 2, 0, 1, 1, 2, 1}));
    EXPECT_NEAR(d, (std::log(210.0) - 10.0 * std::log(3.0)) / 10.0, 1e-13);
    EXPECT_NEAR(d, -0.563901535596362823, 1e-13);
}

TEST(Delta, UnachievableIsMinusInfinity) {
    EXPECT_EQ(delta_exact(skewed(), EmpiricalMeasure(2, 2, {1, 0, 0, 1})), -kInfinity);
}

TEST(Delta, TotalProbabilityIsOne) {
    ts::Rng rng(53);
    for (std::size_t n : {2u, 3u}) {
        for (std::size_t s : {1u, 2u}) {
            const auto m = ts::random_positive_model(rng, n, s);
            for (std::size_t l = s + 1; l <= (n == 2 ? 12u : 7u); ++l) {
                const auto census = enumerate_weighted_census(m, l);
                NeumaierSum total;
                for (const auto& e : census.entries()) total.add(std::exp(static_cast<double>(l) * class_delta(census, e)));
                EXPECT_NEAR(total.value(), 1.0, 1e-9);
            }
        }
    }
}

TEST(RateEnvelope, ShrinksWithLength) {
    const auto c = sandwich_constants(skewed());
    EXPECT_LT(rate_envelope(2, 1, 12, c), rate_envelope(2, 1, 4, c));
}

TEST(RateEnvelope, UniformLawAtExactLength) {
    const auto m = build_model(KTupleDistribution::uniform(2, 2));
    const auto row = delta_vs_rate(m, EmpiricalMeasure(2, 2, {1, 1, 1, 1}));
    EXPECT_NEAR(row.rate, 0.0, 1e-15);
    EXPECT_TRUE(row.pass);
}

TEST(RateEnvelope, EveryClassOfSkewedModel) {
    for (std::size_t l = 4; l <= 12; ++l)
        for (const auto& row : rate_report(skewed(), enumerate_weighted_census(skewed(), l)))
            EXPECT_TRUE(row.pass) << "l=" << l << " delta=" << row.delta << " rate=" << row.rate;
}

TEST(RateFunctions, ZeroAtTheModel) {
    EXPECT_NEAR(rate_doublet(skewed().mu(), skewed().mu()), 0.0, 1e-15);
    EXPECT_NEAR(rate_theta(skewed().mu(), skewed().mu()), 0.0, 1e-15);
    ts::Rng rng(54);
    const auto m = ts::random_positive_model(rng, 2, 2);
    EXPECT_NEAR(rate_ktuple(m.mu(), m.mu()), 0.0, 1e-15);
}

TEST(RateFunctions, ThetaIsInfiniteOffTheStationarySet) {
    EXPECT_EQ(rate_theta(doublet({0, 1, 0, 0}), skewed().mu()), kInfinity);
    ts::Rng rng(55);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + trial % 2;
        const auto theta = ts::random_distribution(rng, n, 2);
        ASSERT_FALSE(check_stationary(theta).is_stationary);
        EXPECT_EQ(rate_theta(theta, ts::random_positive_model(rng, n).mu()), kInfinity);
    }
}

TEST(RateFunctions, ThetaMatchesDoubletRateOnStationaryLaws) {
    ts::Rng rng(56);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 2 + trial % 2;
        const auto nu = ts::random_stationary(rng, n);
        const auto mu = ts::random_positive_model(rng, n).mu();
        EXPECT_TRUE(approx_equal(rate_theta(nu, mu), rate_doublet(nu, mu)));
        EXPECT_TRUE(approx_equal(rate_ktuple(nu, mu), rate_doublet(nu, mu)));
    }
}

TEST(RateFunctions, TwoStepChains) {
    ts::Rng rng(57);
    for (int trial = 0; trial < 200; ++trial) {
        const auto nu = ts::random_stationary(rng, 2, 2);
        const auto mu = ts::random_positive_model(rng, 2, 2).mu();
        const double r = rate_ktuple(nu, mu);
        EXPECT_GE(r, -1e-15);
        EXPECT_TRUE(approx_equal(r, conditional_relative_entropy_rows(nu, mu)));
    }
}

TEST(RateFunctions, RequirePositiveModel) {
    EXPECT_THROW(rate_doublet(skewed().mu(), doublet({0.5, 0, 0, 0.5})), hypothesis_error);
}

TEST(EventCheck, WholeSpace) {
    const EventSet all(HalfSpace{{0, 0, 0, 0}, 0.0});
    const auto rows = ldp_event_check(skewed(), all, {4, 8, 12});
    for (const auto& r : rows) {
        EXPECT_NEAR(r.exact, 0.0, 1e-12);
        EXPECT_TRUE(r.pass);
    }
    EXPECT_LE(-rows.back().rate_proxy, -rows.front().rate_proxy + 1e-15);
}

TEST(EventCheck, FrequentFirstSymbol) {
    // { nu : nu_bar(a) >= 0.9 } under mu_bar(a) = 0.6
    const EventSet gamma(HalfSpace{{1, 1, 0, 0}, 0.9});
    const auto rows = ldp_event_check(skewed(), gamma, {10, 11, 12, 13, 14, 15, 16});
    for (const auto& r : rows) {
        EXPECT_GT(r.classes_in_event, 0u);
        EXPECT_LT(r.exact, 0.0);
        EXPECT_LE(std::abs(r.exact - r.rate_proxy), r.tolerance);
        EXPECT_TRUE(r.pass);
    }
}

TEST(EventCheck, EmptyEventGivesMinusInfinity) {
    const EventSet gamma(L1Ball{{0.5, 0, 0, 0.5}, 0.0});
    for (const auto& r : ldp_event_check(skewed(), gamma, {2, 4, 6})) {
        EXPECT_EQ(r.classes_in_event, 0u);
        EXPECT_EQ(r.exact, -kInfinity);
        EXPECT_EQ(r.rate_proxy, -kInfinity);
    }
}

TEST(EventCheck, ClassUnionIsBracketedByItsBestClass) {
    ts::Rng rng(58);
    const auto m = ts::random_positive_model(rng, 2);
    for (std::size_t l = 4; l <= 12; ++l) {
        const auto census = enumerate_weighted_census(m, l);
        ClassList list;
        double best = -kInfinity;
        for (std::size_t i = 0; i < census.size(); i += 2) {
            const auto& e = census.entries()[i];
            const auto p = census.measure(e).as_distribution();
            list.members.emplace_back(p.values().begin(), p.values().end());
            best = std::max(best, class_delta(census, e));
        }
        const auto row = ldp_event_row(m, EventSet(list), census);
        EXPECT_GE(row.exact, best - 1e-12);
        EXPECT_LE(row.exact, best + log_census_size_bound(2, 1, l) / static_cast<double>(l));
    }
}
