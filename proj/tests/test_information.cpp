#include <gtest/gtest.h>

#include <cmath>

#include "mldp/mldp.hpp"
#include "test_support.hpp"

using namespace mldp;
namespace ts = testing_support;

namespace {

KTupleDistribution dist(std::size_t n, std::size_t k, std::vector<double> v) { return {n, k, std::move(v)}; }

const double kLog2 = std::log(2.0);

}  // namespace

TEST(Entropy, Examples) {
    EXPECT_NEAR(entropy(KTupleDistribution::uniform(2, 1)), kLog2, 1e-15);
    EXPECT_EQ(entropy(KTupleDistribution::point_mass(3, 2, 4)), 0.0);
    EXPECT_NEAR(entropy(dist(2, 1, {0.25, 0.75})), 0.562335144618808350, 1e-15);
}

TEST(RelativeEntropy, Examples) {
    const auto half = dist(2, 1, {0.5, 0.5});
    EXPECT_EQ(relative_entropy(half, half), 0.0);
    EXPECT_NEAR(relative_entropy(dist(2, 1, {1, 0}), half), kLog2, 1e-15);
    EXPECT_EQ(relative_entropy(half, dist(2, 1, {1, 0})), kInfinity);
}

TEST(LossJ, Examples) {
    const auto q = dist(3, 1, {0.2, 0.3, 0.5});
    EXPECT_NEAR(loss_J(q, q), entropy(q), 1e-15);
    EXPECT_NEAR(loss_J(KTupleDistribution::point_mass(3, 1, 1), q), -std::log(0.3), 1e-15);
    EXPECT_NEAR(loss_J(dist(2, 1, {0.25, 0.75}), dist(2, 1, {0.5, 0.5})), kLog2, 1e-15);
    EXPECT_EQ(loss_J(dist(2, 1, {0.5, 0.5}), dist(2, 1, {1, 0})), kInfinity);
}

TEST(ConditionalEntropy, Examples) {
    const std::vector<double> q{0.2, 0.3, 0.5};
    EXPECT_NEAR(conditional_entropy(ts::iid_model(q).mu()), entropy(dist(3, 1, q)), 1e-14);
    // Deterministic cycle a -> b -> c -> a.
    EXPECT_NEAR(conditional_entropy(dist(3, 2, {0, 1. / 3, 0, 0, 0, 1. / 3, 1. / 3, 0, 0})), 0.0, 1e-15);
    EXPECT_NEAR(conditional_entropy(dist(2, 2, {0.4, 0.2, 0.2, 0.2})), 0.659167373200865815, 1e-14);
}

TEST(ConditionalEntropy, RequiresStationarity) {
    EXPECT_THROW(conditional_entropy(dist(2, 2, {0, 1, 0, 0})), domain_error);
    EXPECT_THROW(conditional_entropy(KTupleDistribution::uniform(2, 1)), domain_error);
}

TEST(ConditionalRelativeEntropy, Examples) {
    ts::Rng rng(21);
    const auto nu = ts::random_stationary(rng, 3);
    EXPECT_NEAR(conditional_relative_entropy(nu, nu), 0.0, 1e-15);

    const std::vector<double> q{0.1, 0.6, 0.3}, p{0.3, 0.3, 0.4};
    EXPECT_NEAR(conditional_relative_entropy(ts::iid_model(q).mu(), ts::iid_model(p).mu()),
                relative_entropy(dist(3, 1, q), dist(3, 1, p)), 1e-14);
}

TEST(ConditionalRelativeEntropy, InfiniteWhenNotDominated) {
    const auto mu = dist(2, 2, {0.5, 0, 0, 0.5});
    const auto nu = dist(2, 2, {0.25, 0.25, 0.25, 0.25});
    EXPECT_EQ(conditional_relative_entropy(nu, mu), kInfinity);
    EXPECT_EQ(conditional_relative_entropy_rows(nu, mu), kInfinity);
}

TEST(InformationProperties, GibbsInequality) {
    ts::Rng rng(22);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 2 + trial % 4;
        const auto a = ts::random_distribution(rng, n, 2);
        const auto b = ts::random_distribution(rng, n, 2);
        EXPECT_GE(relative_entropy(a, b), 0.0);
        EXPECT_GT(relative_entropy(a, b), 0.0);
        EXPECT_NEAR(relative_entropy(a, a), 0.0, 1e-15);
    }
}

TEST(InformationProperties, DivergenceIsLossMinusEntropy) {
    ts::Rng rng(23);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 2 + trial % 3;
        const auto nu = trial % 2 ? ts::random_stationary(rng, n) : ts::random_distribution(rng, n, 2);
        const auto mu = ts::random_distribution(rng, n, 2);
        EXPECT_NEAR(relative_entropy(nu, mu), loss_J(nu, mu) - entropy(nu), 1e-12);
    }
}

TEST(InformationProperties, JointConvexity) {
    ts::Rng rng(24);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 2 + trial % 3;
        const auto n1 = ts::random_distribution(rng, n, 1), n2 = ts::random_distribution(rng, n, 1);
        const auto m1 = ts::random_distribution(rng, n, 1), m2 = ts::random_distribution(rng, n, 1);
        const double lam = ts::uniform(rng);
        std::vector<double> nv(n), mv(n);
        for (std::size_t i = 0; i < n; ++i) {
            nv[i] = lam * n1[i] + (1 - lam) * n2[i];
            mv[i] = lam * m1[i] + (1 - lam) * m2[i];
        }
        const double lhs = relative_entropy(dist(n, 1, nv), dist(n, 1, mv));
        EXPECT_LE(lhs, lam * relative_entropy(n1, m1) + (1 - lam) * relative_entropy(n2, m2) + 1e-14);
    }
}

TEST(InformationProperties, ConditionalQuantitiesNonnegative) {
    ts::Rng rng(25);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 2 + trial % 3;
        const std::size_t s = 1 + trial % 2;
        const auto nu = ts::random_stationary(rng, n, s);
        const auto mu = ts::random_stationary(rng, n, s);
        EXPECT_GE(conditional_entropy(nu), -1e-15);
        EXPECT_GE(conditional_relative_entropy(nu, mu), -1e-15);
    }
}

TEST(InformationProperties, DifferenceAndRowFormsAgree) {
    ts::Rng rng(26);
    for (std::size_t n : {2u, 3u}) {
        for (int trial = 0; trial < 1000; ++trial) {
            const auto nu = ts::random_stationary(rng, n);
            const auto mu = ts::random_positive_model(rng, n).mu();
            const double diff = conditional_relative_entropy(nu, mu);
            const double rows = conditional_relative_entropy_rows(nu, mu);
            EXPECT_TRUE(approx_equal(diff, rows)) << diff << " vs " << rows;
        }
    }
}

TEST(ProcessEntropy, Examples) {
    const std::vector<double> q{0.2, 0.8};
    EXPECT_NEAR(process_entropy(ts::iid_model(q)), entropy(dist(2, 1, q)), 1e-15);
    EXPECT_NEAR(process_entropy(build_model(dist(2, 2, {0, 0.5, 0.5, 0}))), 0.0, 1e-15);

    // A = [[.9,.1],[.2,.8]], stationary (2/3, 1/3).
    const auto m = build_model(dist(2, 2, {0.6, 0.2 / 3.0, 0.2 / 3.0, 0.8 / 3.0}));
    const double expected = (2.0 / 3.0) * entropy(dist(2, 1, {0.9, 0.1})) + (1.0 / 3.0) * entropy(dist(2, 1, {0.8, 0.2}));
    EXPECT_NEAR(process_entropy(m), expected, 1e-14);
    EXPECT_NEAR(process_entropy(m), 0.383522790107028120, 1e-14);
}

TEST(SmbStatistic, Examples) {
    const auto iid = build_model(KTupleDistribution::uniform(2, 2));
    ts::Rng rng(27);
    for (int trial = 0; trial < 20; ++trial)
        EXPECT_NEAR(smb_statistic(iid, ts::random_path(rng, 2, 1 + trial)), kLog2, 1e-14);

    const auto m = ts::random_positive_model(rng, 2, 2);
    const auto x = SamplePath::from_letters(2, "ba");
    EXPECT_NEAR(smb_statistic(m, x), -0.5 * std::log(m.mu_bar()[flat_index({1, 0}, 2)]), 1e-14);

    const auto pm = build_model(KTupleDistribution::point_mass(2, 2, 0));
    EXPECT_EQ(smb_statistic(pm, SamplePath::from_letters(2, "ab")), kInfinity);
}

TEST(SmbStatistic, MonteCarloMeanNearEntropyRate) {
    const auto m = build_model(dist(2, 2, {0.6, 0.2 / 3.0, 0.2 / 3.0, 0.8 / 3.0}));
    NeumaierSum total;
    for (std::uint64_t seed = 0; seed < 100; ++seed) total.add(smb_statistic(m, sample_path(m, 10000, seed)));
    EXPECT_NEAR(total.value() / 100.0, process_entropy(m), 0.02);
}
