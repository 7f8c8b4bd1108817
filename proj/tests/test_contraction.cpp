#include <gtest/gtest.h>

#include <cmath>

#include "mldp/mldp.hpp"
#include "test_support.hpp"

using namespace mldp;
namespace ts = testing_support;

namespace {

KTupleDistribution singleton(std::vector<double> v) { return {v.size(), 1, std::move(v)}; }

const MarkovModel& skewed() {
    static const auto m = build_model(KTupleDistribution(2, 2, {0.4, 0.2, 0.2, 0.2}));
    return m;
}

/// min over t of D_c(nu(t) || mu) with nu(t) = [[p - t, t], [t, q - t]], the
/// one-parameter family of stationary doublet laws with marginal (p, q).
double grid_minimum(const KTupleDistribution& phi, const MarkovModel& m, int points = 200000) {
    const double p = phi[0], q = phi[1];
    const double hi = std::min(p, q);
    double best = kInfinity;
    for (int i = 0; i <= points; ++i) {
        const double t = hi * static_cast<double>(i) / points;
        std::vector<double> v{p - t, t, t, q - t};
        for (auto& x : v) x = std::max(x, 0.0);
        const double total = v[0] + v[1] + v[2] + v[3];
        for (auto& x : v) x /= total;
        best = std::min(best, conditional_relative_entropy_rows(KTupleDistribution(2, 2, v), m.mu()));
    }
    return best;
}

}  // namespace

TEST(GObjective, Examples) {
    const auto phi = singleton({0.5, 0.5});
    EXPECT_NEAR(g_objective(phi, skewed(), std::vector<double>{1, 1}), 0.0, 1e-15);
    EXPECT_NEAR(g_objective(phi, skewed(), std::vector<double>{1, 2}), 0.0, 1e-15);
    EXPECT_NEAR(g_objective(phi, skewed(), std::vector<double>{1, 3}), -0.052680257828913151, 1e-15);
    EXPECT_NEAR(g_objective(singleton({0.2, 0.8}), skewed(), std::vector<double>{1, 2}), 0.172609243471068556, 1e-15);
}

TEST(GObjective, RejectsNonPositiveU) {
    EXPECT_THROW(g_objective(singleton({0.5, 0.5}), skewed(), std::vector<double>{1, 0}), domain_error);
    EXPECT_THROW(g_objective(singleton({0.5, 0.5}), skewed(), std::vector<double>{-1, 1}), domain_error);
}

TEST(GObjective, ScaleInvariant) {
    ts::Rng rng(61);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + trial % 3;
        const auto m = ts::random_positive_model(rng, n);
        const auto phi = KTupleDistribution(n, 1, ts::random_simplex(rng, n));
        std::vector<double> u(n), v(n);
        const double lam = std::exp(ts::uniform(rng, -3, 3));
        for (std::size_t i = 0; i < n; ++i) {
            u[i] = std::exp(ts::uniform(rng, -2, 2));
            v[i] = lam * u[i];
        }
        EXPECT_NEAR(g_objective(phi, m, u), g_objective(phi, m, v), 1e-12);
    }
}

TEST(Variational, StationaryMarginalGivesZero) {
    const auto sol = singleton_rate_variational(skewed().mu_bar(), skewed());
    EXPECT_NEAR(sol.value, 0.0, 1e-12);
    for (double u : sol.u_star) EXPECT_NEAR(u, 1.0, 1e-8);
    const auto con = singleton_rate_constrained(skewed().mu_bar(), skewed());
    EXPECT_NEAR(con.value, 0.0, 1e-12);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(con.argmin[i], skewed().mu()[i], 1e-10);
}

TEST(Variational, SkewedModelValue) {
    const auto phi = singleton({0.2, 0.8});
    const auto var = singleton_rate_variational(phi, skewed());
    const auto con = singleton_rate_constrained(phi, skewed());
    EXPECT_NEAR(var.value, 0.239495772703824184, 1e-10);
    EXPECT_NEAR(var.value, con.value, 1e-8);
    EXPECT_NEAR(var.nu_star[1], 0.140312423743284869, 1e-8);
    EXPECT_NEAR(grid_minimum(phi, skewed()), var.value, 1e-6);
}

TEST(Variational, OptimalityConstruction) {
    ts::Rng rng(62);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + trial % 3;
        const auto m = ts::random_positive_model(rng, n);
        const auto phi = KTupleDistribution(n, 1, ts::random_simplex(rng, n, 0.05));
        const auto sol = singleton_rate_variational(phi, m);
        EXPECT_LE(sol.residual, 1e-10);
        for (std::size_t i = 0; i < n; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < n; ++j) row += sol.b_matrix[i * n + j];
            EXPECT_NEAR(row, 1.0, 1e-14);
        }
        EXPECT_TRUE(check_stationary(sol.nu_star, 1e-9).is_stationary);
        const auto bar = marginalize(sol.nu_star);
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(bar[i], phi[i], 1e-14);
        // The value attained by nu* equals the supremum.
        EXPECT_NEAR(conditional_relative_entropy_rows(sol.nu_star, m.mu()), sol.value, 1e-9);
    }
}

TEST(Variational, DominatesFeasibleLaws) {
    // D_c(nu || mu) = D_c(nu || nu*) + g(u*) >= g(u*) for stationary nu with marginal phi.
    ts::Rng rng(63);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 3;
        const auto m = ts::random_positive_model(rng, n);
        const auto phi = KTupleDistribution(n, 1, ts::random_simplex(rng, n, 0.2));
        const auto sol = singleton_rate_variational(phi, m);
        // Null-space direction of the row/column sum constraints: a 2x2 alternating cycle.
        std::vector<double> v(sol.nu_star.values().begin(), sol.nu_star.values().end());
        const std::size_t i = trial % n, j = (trial + 1) % n;
        double eps = ts::uniform(rng, -1, 1);
        const double room = std::min({v[i * n + i], v[j * n + j], v[i * n + j], v[j * n + i]});
        eps *= 0.9 * room;
        v[i * n + i] += eps;
        v[j * n + j] += eps;
        v[i * n + j] -= eps;
        v[j * n + i] -= eps;
        const KTupleDistribution nu(n, 2, v);
        const double lhs = conditional_relative_entropy_rows(nu, m.mu());
        EXPECT_GE(lhs, sol.value - 1e-10);
        EXPECT_NEAR(lhs, conditional_relative_entropy_rows(nu, sol.nu_star) + sol.value, 1e-9);
    }
}

TEST(Variational, AgreesWithConstrainedSolver) {
    ts::Rng rng(64);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + trial % 2;
        const auto m = ts::random_positive_model(rng, n);
        const auto phi = KTupleDistribution(n, 1, ts::random_simplex(rng, n));
        const auto var = singleton_rate_variational(phi, m);
        const auto con = singleton_rate_constrained(phi, m);
        EXPECT_NEAR(var.value, con.value, 1e-8);
        EXPECT_NEAR(con.value, con.value_from_full_divergence, 1e-8);
        for (std::size_t k = 0; k < n * n; ++k) EXPECT_NEAR(var.nu_star[k], con.argmin[k], 1e-8);
        if (n == 2) {
            EXPECT_NEAR(grid_minimum(phi, m, 20000), var.value, 1e-5);
        }
    }
}

TEST(Variational, GridOracleTwoStates) {
    ts::Rng rng(65);
    for (int trial = 0; trial < 5; ++trial) {
        const auto m = ts::random_positive_model(rng, 2);
        const auto phi = KTupleDistribution(2, 1, ts::random_simplex(rng, 2, 0.1));
        EXPECT_NEAR(grid_minimum(phi, m), singleton_rate_variational(phi, m).value, 1e-6);
    }
}

TEST(Variational, SanovReduction) {
    ts::Rng rng(66);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + trial % 3;
        const auto q = ts::random_simplex(rng, n, 0.1);
        const auto m = ts::iid_model(q);
        const auto phi = KTupleDistribution(n, 1, ts::random_simplex(rng, n));
        const double expected = relative_entropy(phi, m.mu_bar());
        EXPECT_NEAR(singleton_rate_variational(phi, m).value, expected, 1e-8);
        EXPECT_NEAR(singleton_rate_constrained(phi, m).value, expected, 1e-8);
    }
}

TEST(Variational, BoundaryMarginal) {
    // phi with a zero coordinate: solved on the face, u* vanishes off the support.
    ts::Rng rng(67);
    const auto m = ts::random_positive_model(rng, 3);
    const auto phi = singleton({0.0, 0.3, 0.7});
    const auto var = singleton_rate_variational(phi, m);
    const auto con = singleton_rate_constrained(phi, m);
    EXPECT_EQ(var.u_star[0], 0.0);
    EXPECT_EQ(var.u_star[1], 1.0);
    EXPECT_NEAR(var.value, con.value, 1e-8);
    for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_EQ(var.nu_star[j], 0.0);
        EXPECT_EQ(var.nu_star[j * 3], 0.0);
    }
}

TEST(RowForm, AgreesWithColumnForm) {
    ts::Rng rng(68);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + trial % 2;
        const auto m = ts::random_positive_model(rng, n);
        const auto phi = KTupleDistribution(n, 1, ts::random_simplex(rng, n));
        const auto a = singleton_rate_variational(phi, m);
        const auto b = donsker_varadhan_row_form(phi, m);
        EXPECT_NEAR(a.value, b.value, 1e-6);
    }
}

TEST(Contraction, RequiresPositiveOneStepModel) {
    const auto pm = build_model(KTupleDistribution(2, 2, {0.5, 0, 0, 0.5}));
    EXPECT_THROW(singleton_rate_variational(singleton({0.5, 0.5}), pm), hypothesis_error);
    ts::Rng rng(69);
    const auto two_step = ts::random_positive_model(rng, 2, 2);
    EXPECT_THROW(singleton_rate_constrained(singleton({0.5, 0.5}), two_step), domain_error);
}

TEST(HandyIdentity, Examples) {
    const auto nu = cyclic_empirical(SamplePath::from_letters(3, "abaccbacbc"), 1).as_distribution();
    const std::vector<double> c{1, 2, 3};
    const auto h = handy_identity(nu, c);
    EXPECT_NEAR(h.by_first, 2.1, 1e-15);
    EXPECT_NEAR(h.by_second, 2.1, 1e-15);
    EXPECT_TRUE(h.holds);
    EXPECT_TRUE(handy_identity_check(nu, std::vector<double>{4, 4, 4}));

    const auto theta = doublet_empirical_raw(SamplePath::from_letters(2, "aab")).as_distribution();
    EXPECT_FALSE(handy_identity_check(theta, std::vector<double>{0, 1}));
}

TEST(HandyIdentity, HoldsForRandomStationaryLaws) {
    ts::Rng rng(70);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + trial % 3;
        const auto nu = ts::random_stationary(rng, n);
        std::vector<double> c(n);
        for (auto& v : c) v = ts::uniform(rng, -5, 5);
        const auto h = handy_identity(nu, c);
        EXPECT_NEAR(h.by_first, h.by_second, 1e-12);
    }
}

TEST(Contraction, CensusTrendTowardRate) {
    // -min{D_c(zeta || mu) : |zeta_bar - phi|_1 <= 1/l} approaches -J(phi) as l grows.
    const auto phi = singleton({0.25, 0.75});
    const double j = singleton_rate_variational(phi, skewed()).value;
    double previous_gap = kInfinity;
    for (std::size_t l : {4u, 8u, 16u}) {
        const auto census = enumerate_census(l, 2, 1);
        double best = kInfinity;
        for (const auto& e : census.entries()) {
            const auto zeta = census.measure(e).as_distribution();
            const auto bar = marginalize(zeta);
            if (std::abs(bar[0] - phi[0]) + std::abs(bar[1] - phi[1]) > 1.0 / static_cast<double>(l) + 1e-12) continue;
            best = std::min(best, rate_ktuple(zeta, skewed().mu()));
        }
        const double gap = std::abs(best - j);
        EXPECT_LE(gap, previous_gap + 1e-12);
        previous_gap = gap;
    }
    EXPECT_LT(previous_gap, 0.05);
}
