#include <gtest/gtest.h>

#include <kobalab/metric.hpp>
#include <kobalab/util.hpp>

using namespace kobalab;

namespace {
const DomainModel kDisc = DomainModel::unit_disc();
const DomainModel kBall = DomainModel::unit_ball(2);

// Disc point with |z| <= r drawn uniformly in area.
CVec random_point(Rng& rng, std::size_t n, double r) {
    CVec u = random_unit(rng, n);
    return u * (r * std::pow(rng.uniform(), 1.0 / (2.0 * n)));
}

// Hyperbolic half-length from the log form: 0.5 log((1+r)/(1-r)).
double atanh_log(double r) { return 0.5 * std::log((1 + r) / (1 - r)); }
}  // namespace

TEST(KappaExact, Examples) {
    const auto disc = MetricField::exact(kDisc);
    EXPECT_NEAR(kappa_exact(disc, CVec{0.0}, CVec{1.0}), 1.0, 1e-15);
    EXPECT_NEAR(kappa_exact(disc, CVec{0.5}, CVec{1.0}), 4.0 / 3.0, 1e-15);
    const auto ball = MetricField::exact(kBall);
    EXPECT_NEAR(kappa_exact(ball, CVec{0.5, 0.0}, CVec{0.0, 1.0}), 2.0 / std::sqrt(3.0), 1e-14);
}

TEST(KappaExact, WrongEstimatorThrows) {
    const auto f = MetricField::convex(DomainModel::ellipsoid(2));
    EXPECT_THROW(kappa_exact(f, CVec{0.0, 0.0}, CVec{1.0, 0.0}), std::invalid_argument);
    EXPECT_THROW(MetricField::exact(DomainModel::ellipsoid(2)), std::invalid_argument);
}

TEST(KappaBounds, Examples) {
    const auto disc = kappa_bounds(MetricField::convex(kDisc), CVec{0.0}, CVec{1.0});
    EXPECT_NEAR(disc.lower, 0.5, 1e-12);
    EXPECT_NEAR(disc.upper, 1.0, 1e-12);
    const auto ball = kappa_bounds(MetricField::convex(kBall), CVec{0.5, 0.0}, CVec{0.0, 1.0});
    EXPECT_NEAR(ball.lower, 1.0 / (2.0 * std::sqrt(0.75)), 1e-10);
    EXPECT_NEAR(ball.upper, 1.0 / std::sqrt(0.75), 1e-10);
    const auto ex = kappa_bounds(MetricField::exact(kBall), CVec{0.5, 0.0}, CVec{0.0, 1.0});
    EXPECT_NEAR(ex.lower, ball.upper, 1e-10);
    const auto ell = kappa_bounds(MetricField::convex(DomainModel::ellipsoid(2)), CVec{0.0, 0.0}, CVec{0.0, 1.0});
    EXPECT_NEAR(ell.lower, 0.5, 1e-8);
    EXPECT_NEAR(ell.upper, 1.0, 1e-8);
}

TEST(KappaBounds, SgLowerSharpensNearBoundary) {
    const GoldilocksProfile p(OmegaSpec::power(1, 0.5, 0.5));
    const auto f = MetricField::convex(kBall, p);
    // tangential direction at depth 1e-4: 1/(2 delta(z;v)) ~ 1/(2 sqrt(2e-4)), SG gives 0.5/sqrt(1e-4)
    const auto m = kappa_bounds(f, CVec{1.0 - 1e-4, 0.0}, CVec{0.0, 1.0});
    EXPECT_NEAR(m.lower, 0.5 / std::sqrt(1e-4), 1e-6);
    EXPECT_EQ(m.provenance, "sg_lower+convex_upper");
    EXPECT_LE(m.lower, m.upper);
}

TEST(KappaBounds, SandwichHoldsOnRandomSamples) {
    Rng rng(11);
    for (const auto* d : {&kDisc, &kBall}) {
        const auto exact = MetricField::exact(*d);
        const auto conv = MetricField::convex(*d);
        for (int i = 0; i < 10000; ++i) {
            const CVec z = random_point(rng, d->dim(), 0.999);
            const CVec v = random_unit(rng, d->dim()) * rng.uniform(0.1, 10.0);
            const double k = kappa_exact(exact, z, v);
            const auto b = kappa_bounds(conv, z, v);
            ASSERT_LE(b.lower, k * (1 + 1e-12));
            ASSERT_LE(k, b.upper + 1e-9);
        }
    }
}

TEST(KappaExact, DiscAutomorphismInvariance) {
    const auto f = MetricField::exact(kDisc);
    Rng rng(5);
    for (int i = 0; i < 500; ++i) {
        const cplx a = random_point(rng, 1, 0.95)[0];
        const cplx z = random_point(rng, 1, 0.95)[0];
        const cplx v = random_unit(rng, 1)[0];
        const cplx den = 1.0 - std::conj(a) * z;
        const cplx phi = (z - a) / den;
        const cplx dphi = (1.0 - std::norm(a)) / (den * den);
        EXPECT_NEAR(kappa_exact(f, CVec{z}, CVec{v}), kappa_exact(f, CVec{phi}, CVec{dphi * v}),
                    1e-10 * kappa_exact(f, CVec{z}, CVec{v}));
    }
}

TEST(KappaExact, BallUnitaryInvariance) {
    const auto f = MetricField::exact(kBall);
    Rng rng(6);
    for (int i = 0; i < 500; ++i) {
        // U = [[c, -conj(s)], [s, conj(c)]] with |c|^2 + |s|^2 = 1
        const CVec cs = random_unit(rng, 2);
        auto U = [&](const CVec& w) {
            return CVec{cs[0] * w[0] - std::conj(cs[1]) * w[1], cs[1] * w[0] + std::conj(cs[0]) * w[1]};
        };
        const CVec z = random_point(rng, 2, 0.95), v = random_unit(rng, 2);
        const double k = kappa_exact(f, z, v);
        EXPECT_NEAR(k, kappa_exact(f, U(z), U(v)), 1e-10 * k);
    }
}

TEST(CurveLength, DiscSegments) {
    const auto f = MetricField::exact(kDisc);
    EXPECT_NEAR(curve_kappa_length(f, Curve({CVec{-0.5}, CVec{0.5}}), Side::Upper), 2 * atanh_log(0.5), 1e-8);
    EXPECT_NEAR(curve_kappa_length(f, Curve({CVec{-0.9}, CVec{0.9}}), Side::Upper), 2 * atanh_log(0.9), 1e-8);
    EXPECT_EQ(curve_kappa_length(f, Curve({CVec{0.3}}), Side::Upper), 0.0);
    EXPECT_THROW(curve_kappa_length(f, Curve({CVec{0.0}, CVec{1.2}}), Side::Upper), std::domain_error);
}

TEST(CurveLength, SidesBracketAndRefinementStable) {
    const auto e = DomainModel::ellipsoid(2);
    const auto f = MetricField::convex(e);
    const CVec a{0.1, cplx(0.3, 0.2)}, b{cplx(0.7, -0.2), 0.4};
    const Curve one({a, b});
    std::vector<Point> pts;
    for (int i = 0; i <= 10; ++i) pts.push_back(lerp(a, b, i / 10.0));
    const Curve ten(pts);
    const double up1 = curve_kappa_length(f, one, Side::Upper), up10 = curve_kappa_length(f, ten, Side::Upper);
    const double lo1 = curve_kappa_length(f, one, Side::Lower);
    EXPECT_NEAR(up1, up10, 1e-6 * up1);
    EXPECT_LE(lo1, up1);
    EXPECT_GT(lo1, 0.0);
}

TEST(CurveLength, EuclidExamples) {
    EXPECT_EQ(curve_euclid_length(Curve({CVec{0.0}})), 0.0);
    EXPECT_DOUBLE_EQ(curve_euclid_length(Curve({CVec{0.0}, CVec{1.0}})), 1.0);
    EXPECT_DOUBLE_EQ(curve_euclid_length(Curve({CVec{0.0}, CVec{cplx(0, 1)}, CVec{cplx(1, 1)}})), 2.0);
}

TEST(Oracles, DiscExamples) {
    EXPECT_EQ(disc_distance_oracle(0.0, 0.0), 0.0);
    EXPECT_NEAR(disc_distance_oracle(0.0, 0.5), 0.5493061443340549, 1e-14);
    EXPECT_NEAR(disc_distance_oracle(-0.9, 0.9), 2.9444389791664403, 1e-13);
    EXPECT_THROW(disc_distance_oracle(1.0, 0.0), std::domain_error);
}

TEST(Oracles, BallMatchesDiscSliceAndRadialFormula) {
    Rng rng(9);
    for (int i = 0; i < 1000; ++i) {
        const cplx a = random_point(rng, 1, 0.999)[0], b = random_point(rng, 1, 0.999)[0];
        const double d = disc_distance_oracle(a, b);
        EXPECT_NEAR(ball_distance_oracle(CVec{a, 0.0}, CVec{b, 0.0}), d, 1e-10 * std::max(1.0, d));
        // pseudo-hyperbolic ratio route
        const double r = std::abs(a - b) / std::abs(1.0 - std::conj(a) * b);
        if (r < 0.999) {
            EXPECT_NEAR(d, atanh_log(r), 1e-10);
        }
    }
    EXPECT_NEAR(ball_distance_oracle(CVec{0.0, 0.0}, CVec{0.9, 0.0}), atanh_log(0.9), 1e-14);
}

TEST(Oracles, NearBoundaryStaysAccurate) {
    // a = 1 - e, b = -(1 - e): exact distance log((2 - e)/e).
    for (double e0 : {1e-6, 1e-9, 1e-12}) {
        const double a = 1 - e0, e = 1 - a;
        const double d = disc_distance_oracle(a, -a);
        EXPECT_NEAR(d, std::log((2 - e) / e), 1e-12 * d);
    }
}

TEST(Dini, Examples) {
    EXPECT_EQ(dini_upper_distance(kDisc, CVec{0.3}, CVec{0.3}), 0.0);
    EXPECT_NEAR(dini_upper_distance(kDisc, CVec{0.0}, CVec{0.5}), std::log(1 + std::sqrt(2.0)), 1e-14);
    EXPECT_NEAR(dini_upper_distance(kBall, CVec{0.0, 0.0}, CVec{0.9, 0.0}), std::log(1 + 1.8 / std::sqrt(0.1)), 1e-13);
    const auto cube = DomainModel::halfspaces({{CVec{1.0}, 1.0}, {CVec{-1.0}, 1.0}, {CVec{cplx(0, 1)}, 1.0}, {CVec{cplx(0, -1)}, 1.0}}, "square");
    EXPECT_THROW(dini_upper_distance(cube, CVec{0.0}, CVec{0.5}), std::invalid_argument);
}

TEST(Pisa, Examples) {
    EXPECT_EQ(pisa_bound(kDisc, 1, CVec{0.2}, CVec{0.2}, 1), 0.0);
    EXPECT_NEAR(pisa_bound(kDisc, 1, CVec{0.0}, CVec{0.5}, 1), 0.5 * std::log(1.5 * (1 + 0.5 / 0.5)), 1e-14);
    EXPECT_NEAR(pisa_bound(kDisc, 2, CVec{0.0}, CVec{0.5}, 1), std::log(1.5 * (1 + 0.5 / std::sqrt(0.5))), 1e-14);
}

TEST(Bundle, Examples) {
    const GoldilocksProfile p(OmegaSpec::power(1, 0.5));
    const auto zero = lower_distance_bundle(kDisc, &p, CVec{0.4}, CVec{0.4});
    for (const auto& b : zero.lower) EXPECT_EQ(b.value, 0.0) << b.id;

    const auto far = lower_distance_bundle(kDisc, &p, CVec{0.9}, CVec{-0.9});
    EXPECT_NEAR(far.find("convex_ratio")->value, 0.0, 1e-14);
    EXPECT_NEAR(far.find("ugly1")->value, 0.5 * std::log(1 + 1.8 / std::sqrt(0.1)), 1e-12);
    EXPECT_LE(far.best_lower(), disc_distance_oracle(0.9, -0.9));

    const auto near = lower_distance_bundle(kDisc, &p, CVec{0.5}, CVec{0.9});
    EXPECT_NEAR(near.find("convex_ratio")->value, 0.5 * std::log(5.0), 1e-12);
    EXPECT_NEAR(disc_distance_oracle(0.5, 0.9), atanh_log(0.4 / 0.55), 1e-14);
    EXPECT_LE(near.best_lower(), disc_distance_oracle(0.5, 0.9));
    EXPECT_TRUE(near.consistent());
}

TEST(Bundle, FinalConstantRule) {
    LowerBoundParams p;
    p.c_good = 2.0;
    p.c_ugly = 1.0;
    EXPECT_DOUBLE_EQ(p.final_constant(), 0.5);
    p.c_good = 1.0;
    EXPECT_DOUBLE_EQ(p.final_constant(), 0.25);
    p.c_final = 0.7;
    EXPECT_DOUBLE_EQ(p.final_constant(), 0.7);
}

TEST(Bundle, NoProfileMarksSgBoundsInapplicable) {
    const auto b = lower_distance_bundle(kDisc, nullptr, CVec{0.1}, CVec{0.5});
    EXPECT_FALSE(b.find("good1")->applicable);
    EXPECT_FALSE(b.find("final_h")->reason.empty());
    EXPECT_TRUE(b.find("ntr")->applicable);
}

TEST(Bundle, LowerBelowOracleDiniAndCurveUpper) {
    const GoldilocksProfile p(OmegaSpec::power(1, 0.5));
    Rng rng(21);
    for (const auto* d : {&kDisc, &kBall}) {
        const auto f = MetricField::exact(*d);
        for (int i = 0; i < 300; ++i) {
            const CVec x = random_point(rng, d->dim(), 0.999), y = random_point(rng, d->dim(), 0.999);
            auto b = lower_distance_bundle(*d, &p, x, y);
            add_curve_upper(b, curve_kappa_length(f, Curve({x, y}), Side::Upper));
            const double k = ball_distance_oracle(x, y);
            ASSERT_TRUE(b.consistent(1e-9));
            ASSERT_LE(b.best_lower(), k + 1e-9);
            ASSERT_LE(k, b.find("curve_up")->value + 1e-9);
        }
    }
}

TEST(Gromov, Examples) {
    auto dist = [](const Point& a, const Point& b) { return disc_distance_oracle(a[0], b[0]); };
    EXPECT_EQ(gromov_delta_estimate(dist, {CVec{0.0}, CVec{0.1}, CVec{0.2}}), 0.0);
    EXPECT_NEAR(gromov_delta_estimate(dist, {CVec{-0.8}, CVec{-0.2}, CVec{0.3}, CVec{0.9}}), 0.0, 1e-6);
    Rng rng(12);
    std::vector<Point> pts;
    for (int i = 0; i < 12; ++i) pts.push_back(random_point(rng, 1, 0.99));
    const double d = gromov_delta_estimate(dist, pts);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, std::log(1 + std::sqrt(2.0)) + 0.2);
}

TEST(Gromov, SampledModeIsDeterministic) {
    auto dist = [](const Point& a, const Point& b) { return disc_distance_oracle(a[0], b[0]); };
    Rng rng(13);
    std::vector<Point> pts;
    for (int i = 0; i < 30; ++i) pts.push_back(random_point(rng, 1, 0.99));
    EXPECT_EQ(gromov_delta_estimate(dist, pts, 4), gromov_delta_estimate(dist, pts, 4));
}
