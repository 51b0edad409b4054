#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <kobalab/goldilocks.hpp>

using namespace kobalab;

namespace {
GoldilocksProfile power_profile(double a, double C = 1.0) { return GoldilocksProfile(OmegaSpec::power(C, a)); }

// Independent route: tanh-sinh over the whole interval, singular end included.
double g_tanh_sinh(double C, double a, double x) {
    boost::math::quadrature::tanh_sinh<double> ts;
    auto f = [&](double t) {
        const double q = C * std::pow(t, a - 1.0);
        return q * std::log(q);
    };
    return ts.integrate(f, 0.0, x);
}
}  // namespace

TEST(Omega, PowerLawValues) {
    EXPECT_NEAR(omega_eval(OmegaSpec::power(1, 0.5), 0.25), 0.5, 1e-15);
    EXPECT_NEAR(omega_eval(OmegaSpec::power(1, 1.0 / 3), 0.001), 0.1, 1e-15);
    EXPECT_NEAR(omega_eval(OmegaSpec::power(2, 0.5), 0.01), 0.2, 1e-15);
    EXPECT_THROW(omega_eval(OmegaSpec::power(1, 0.5), 0.0), std::domain_error);
}

TEST(Omega, SteepExponentNeedsOverride) {
    EXPECT_THROW(validate(OmegaSpec::power(1, 0.75)), std::invalid_argument);
    auto s = OmegaSpec::power(1, 0.75);
    s.allow_steep = true;
    EXPECT_NO_THROW(validate(s));
}

TEST(Admissibility, SqrtAndCubeRootPass) {
    for (double a : {0.5, 1.0 / 3}) {
        const auto s = OmegaSpec::power(1, a);
        const auto r = check_admissibility(s, default_admissibility_grid(s));
        EXPECT_TRUE(r.a_decreasing);
        EXPECT_TRUE(r.b_increasing);
        EXPECT_TRUE(r.c_integrable);
        EXPECT_TRUE(r.dominates_sqrt);
        EXPECT_TRUE(r.passed());
        EXPECT_TRUE(r.extrapolated);
    }
}

TEST(Admissibility, LinearWeightFailsAndIsDegenerate) {
    auto s = OmegaSpec::power(1, 1.0);
    s.allow_steep = true;
    const auto r = check_admissibility(s, default_admissibility_grid(s));
    EXPECT_FALSE(r.dominates_sqrt);
    EXPECT_TRUE(r.degenerate);
    EXPECT_FALSE(r.passed());
    GoldilocksProfile p(s);
    EXPECT_THROW(p.g(0.5), std::domain_error);
}

TEST(Admissibility, GridTooSmallRejected) {
    EXPECT_THROW(check_admissibility(OmegaSpec::power(1, 0.5), std::vector<double>(10, 0.1)), std::invalid_argument);
}

TEST(G, ClosedFormExamples) {
    const auto p = power_profile(0.5);
    EXPECT_NEAR(p.g(1.0), 2.0, 1e-14);
    EXPECT_NEAR(p.g(std::exp(-2.0)), 4.0 / std::exp(1.0), 1e-14);
    const auto q = power_profile(1.0 / 3);
    EXPECT_NEAR(q.g(std::exp(-3.0)), 12.0 / std::exp(1.0), 1e-13);
    // sqrt(x)(2 + log(1/x)) at 0.01
    EXPECT_NEAR(p.g(0.01), 0.1 * (2.0 + std::log(100.0)), 1e-15);
}

TEST(G, ClosedFormMatchesIndependentQuadrature) {
    for (double C : {1.0, 2.0})
        for (double a : {0.5, 1.0 / 3, 0.25}) {
            const auto p = power_profile(a, C);
            for (double x : {1e-6, 1e-3, 0.1, 0.5, 1.0}) {
                const double ref = g_tanh_sinh(C, a, x);
                EXPECT_NEAR(p.g(x), ref, 1e-9 * std::abs(ref)) << "C=" << C << " a=" << a << " x=" << x;
            }
        }
}

TEST(G, ClosedFormMatchesLibraryQuadrature) {
    for (double a : {0.5, 1.0 / 3}) {
        const auto p = power_profile(a);
        for (int k = 0; k <= 40; ++k) {
            const double x = std::pow(10.0, -8.0 + 8.0 * k / 40);
            EXPECT_NEAR(p.g_quadrature(x) / p.g(x), 1.0, 1e-8) << x;
        }
    }
}

TEST(G, TabulatedMatchesPowerLaw) {
    Tabulated tb;
    for (int k = 0; k <= 40; ++k) {
        const double t = std::pow(10.0, -9.0 + 9.0 * k / 40);
        tb.t.push_back(t);
        tb.w.push_back(std::sqrt(t));
    }
    OmegaSpec s;
    s.form = tb;
    s.t_max = 1.0;
    const GoldilocksProfile tab(s);
    const auto ref = power_profile(0.5);
    EXPECT_TRUE(tab.admissibility().passed());
    for (double x : {1e-6, 1e-3, 0.3, 0.9}) EXPECT_NEAR(tab.g(x) / ref.g(x), 1.0, 1e-9) << x;
    EXPECT_NEAR(tab.g_inverse(ref.g(0.2)), 0.2, 1e-8);
}

TEST(GInverse, Examples) {
    const auto p = power_profile(0.5);
    EXPECT_EQ(p.g_inverse(0.0), 0.0);
    EXPECT_NEAR(p.g_inverse(2.0), 1.0, 1e-8);
    EXPECT_THROW(p.g_inverse(2.5), std::domain_error);
    EXPECT_THROW(p.g_inverse(-1.0), std::domain_error);
}

TEST(GInverse, IdentityOnRandomPoints) {
    Rng rng(42);
    for (double a : {0.5, 1.0 / 3}) {
        const auto p = power_profile(a);
        for (int i = 0; i < 100; ++i) {
            const double x = rng.uniform();
            if (x == 0) continue;
            EXPECT_NEAR(p.g_inverse(p.g(x)), x, 1e-8);
            const double y = rng.uniform(0, p.g_max());
            EXPECT_NEAR(p.g(p.g_inverse(y)), y, 1e-8);
            EXPECT_LE(std::abs(p.g(p.g_inverse(y)) - y), 1e-10 * std::max(1.0, y));
        }
    }
}

TEST(Profile, Invariants) {
    for (double a : {0.5, 1.0 / 3, 0.25, 0.125}) {
        const auto p = power_profile(a);
        const auto inv = check_profile_invariants(p);
        EXPECT_TRUE(inv.g_increasing) << a;
        EXPECT_TRUE(inv.g_over_x_nonincreasing) << a;
        EXPECT_TRUE(inv.g_vanishes_at_zero) << a;
        EXPECT_GT(inv.min_g_over_omega, 0.0) << a;
    }
}

TEST(Profile, MConvexRatioBandStable) {
    for (double m : {2.0, 3.0}) {
        const auto p = power_profile(1.0 / m);
        const auto coarse = mconvex_ratio_band(p, m, 1e-6, 1e-1, 64);
        const auto fine = mconvex_ratio_band(p, m, 1e-6, 1e-1, 512);
        EXPECT_GT(coarse.min_ratio, 0.0);
        EXPECT_NEAR(fine.K / coarse.K, 1.0, 0.1);
        // closed form: (1-a)/a^2 (1/L + a), L = log(1/x)
        const double a = 1.0 / m;
        EXPECT_NEAR(fine.max_ratio, (1 - a) / (a * a) * (1 / std::log(10.0) + a), 1e-12);
    }
}

TEST(H, Examples) {
    const auto p = power_profile(0.5);
    const auto disc = DomainModel::unit_disc();
    const Point x{0.99};
    const Point y{cplx(0.99 - 0.5 * std::cos(0.3), 0.5 * std::sin(0.3))};
    ASSERT_NEAR(distance(x, y), 0.5, 1e-15);
    const auto h = h_eval(p, x, y, 1.0, disc);
    EXPECT_NEAR(h.h1, 0.5 / 0.6605170185988091, 1e-12);
    EXPECT_NEAR(h.h1, 0.75698, 1e-5);
    // g^{-1}(0.5) by a plain bisection on the closed form
    double lo = 1e-12, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (std::sqrt(mid) * (2 + std::log(1 / mid)) < 0.5 ? lo : hi) = mid;
    }
    EXPECT_NEAR(h.h2, lo / 0.01, 1e-9);
    EXPECT_NEAR(h.h2, 0.459, 2e-3);
    EXPECT_TRUE(h.h1_attains);
    EXPECT_DOUBLE_EQ(h.h, h.h1);
    const auto z = h_eval(p, x, x, 1.0, disc);
    EXPECT_EQ(z.h1, 0.0);
    EXPECT_EQ(z.h2, 0.0);
    EXPECT_EQ(z.h, 0.0);
}

TEST(H, SameSideOfOneAndOrdering) {
    // g(x)/x nonincreasing forces h1, h2 onto the same side of 1 with
    // h1 >= h2 below 1 and h1 <= h2 above 1.
    const auto disc = DomainModel::unit_disc();
    Rng rng(8);
    for (double a : {0.5, 1.0 / 3}) {
        const auto p = power_profile(a);
        for (int i = 0; i < 2000; ++i) {
            const Point x{std::polar(std::sqrt(rng.uniform()) * 0.999, rng.uniform(0, 2 * M_PI))};
            const Point y{std::polar(std::sqrt(rng.uniform()) * 0.999, rng.uniform(0, 2 * M_PI))};
            const double c = rng.uniform(0.05, 1.0);
            const auto h = h_eval(p, x, y, c, disc);
            if (h.saturated) continue;
            if (std::abs(h.h1 - 1) < 1e-9 || std::abs(h.h2 - 1) < 1e-9 || std::abs(h.h1 - h.h2) < 1e-9) continue;
            EXPECT_EQ(h.h1 > 1, h.h2 > 1);
            EXPECT_EQ(h.h1 > h.h2, h.h1 < 1);
        }
    }
}
