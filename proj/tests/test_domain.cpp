#include <gtest/gtest.h>

#include <kobalab/domain.hpp>

using namespace kobalab;

namespace {

DomainModel unit_square_c1() {
    // |Re z| <= 1, |Im z| <= 1 in C^1
    return DomainModel::halfspaces({{CVec{1.0}, 1.0}, {CVec{-1.0}, 1.0}, {CVec{cplx(0, 1)}, 1.0}, {CVec{cplx(0, -1)}, 1.0}},
                                   "cube1");
}

// Brute-force oracle: min distance from p to a dense sampling of the
// ellipsoid boundary profile, using the rotational symmetry in each variable.
double ellipsoid_distance_bruteforce(double m, const Point& p) {
    const double r1 = std::abs(p[0]), r2 = std::abs(p[1]);
    double best = 1e300;
    const int N = 400000;
    for (int k = 0; k <= N; ++k) {
        const double th = 0.5 * M_PI * k / N;
        const double x = std::cos(th), y = std::pow(std::sin(th), 1.0 / m);
        best = std::min(best, std::hypot(x - r1, y - r2));
    }
    return best;
}

// Brute-force oracle for delta(p; v): dense polar scan with bisection per ray.
double directional_bruteforce(const DomainModel& d, const Point& p, const Direction& v) {
    double best = 1e300;
    const int N = 20000;
    for (int k = 0; k < N; ++k) {
        const CVec w = v * std::polar(1.0, 2 * M_PI * k / N);
        double lo = 0, hi = 10;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (contains(d, p + w * mid)) lo = mid; else hi = mid;
        }
        best = std::min(best, lo);
    }
    return best;
}

}  // namespace

TEST(Contains, DiscCenterAndBoundary) {
    const auto disc = DomainModel::unit_disc();
    EXPECT_TRUE(contains(disc, CVec{0.0}));
    EXPECT_FALSE(contains(disc, CVec{1.0}));
}

TEST(Contains, EllipsoidDefiningFunction) {
    const auto e = DomainModel::ellipsoid(2);
    EXPECT_TRUE(contains(e, CVec{0.9, 0.5}));  // 0.81 + 0.0625 < 1
    EXPECT_FALSE(contains(e, CVec{0.9, 0.7}));  // 0.81 + 0.2401 > 1
}

TEST(Contains, DimensionMismatchThrows) {
    EXPECT_THROW(contains(DomainModel::unit_disc(), CVec{0.0, 0.0}), std::invalid_argument);
}

TEST(BoundaryDistance, ClosedForms) {
    EXPECT_DOUBLE_EQ(boundary_distance(DomainModel::unit_disc(), CVec{0.0}), 1.0);
    EXPECT_DOUBLE_EQ(boundary_distance(unit_square_c1(), CVec{0.0}), 1.0);
    EXPECT_NEAR(boundary_distance(DomainModel::unit_ball(2), CVec{0.6, 0.0}), 0.4, 1e-15);
}

TEST(BoundaryDistance, OutsideThrows) {
    EXPECT_THROW(boundary_distance(DomainModel::unit_disc(), CVec{1.5}), std::domain_error);
}

TEST(BoundaryDistance, EllipsoidMatchesBruteForce) {
    const auto e = DomainModel::ellipsoid(2);
    Rng rng(11);
    for (int i = 0; i < 12; ++i) {
        const Point p = sample_interior(e, rng);
        const double oracle = ellipsoid_distance_bruteforce(2, p);
        // the oracle grid is itself accurate to ~1e-11 in distance
        EXPECT_NEAR(boundary_distance(e, p), oracle, 5e-10) << to_string(p);
        EXPECT_LE(boundary_distance(e, p), oracle + 1e-12);
    }
}

TEST(BoundaryDistance, EllipsoidM1AgreesWithBall) {
    const auto e = DomainModel::ellipsoid(1);
    const auto b = DomainModel::unit_ball(2);
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const Point p = sample_interior(b, rng);
        EXPECT_NEAR(boundary_distance(e, p), boundary_distance(b, p), 1e-8);
        const Direction v = random_unit(rng, 2);
        EXPECT_NEAR(directional_boundary_distance(e, p, v), directional_boundary_distance(b, p, v), 1e-8);
    }
}

TEST(DirectionalDistance, Examples) {
    EXPECT_NEAR(directional_boundary_distance(DomainModel::unit_disc(), CVec{0.0}, CVec{1.0}), 1.0, 1e-15);
    EXPECT_NEAR(directional_boundary_distance(unit_square_c1(), CVec{0.0}, CVec{1.0}), 1.0, 1e-15);
    EXPECT_NEAR(directional_boundary_distance(DomainModel::unit_ball(2), CVec{0.5, 0.0}, CVec{0.0, 1.0}),
                std::sqrt(0.75), 1e-15);
}

TEST(DirectionalDistance, ZeroDirectionThrows) {
    EXPECT_THROW(directional_boundary_distance(DomainModel::unit_disc(), CVec{0.0}, CVec{0.0}), std::invalid_argument);
}

TEST(DirectionalDistance, EllipsoidMatchesBruteForce) {
    const auto e = DomainModel::ellipsoid(2);
    Rng rng(5);
    for (int i = 0; i < 6; ++i) {
        const Point p = sample_interior(e, rng);
        const Direction v = random_unit(rng, 2);
        const double oracle = directional_bruteforce(e, p, v);
        EXPECT_NEAR(directional_boundary_distance(e, p, v), oracle, 1e-8 * oracle + 1e-7);
    }
}

TEST(DirectionalDistance, HalfspacesInC2) {
    std::vector<Face> faces;
    for (int k = 0; k < 4; ++k)
        for (double s : {1.0, -1.0}) {
            CVec a(2);
            a.set_real_coord(k, s);
            faces.push_back({a, 1.0});
        }
    const auto cube = DomainModel::halfspaces(faces, "cube2");
    EXPECT_NEAR(diameter(cube).value, 4.0, 1e-12);
    EXPECT_NEAR(cube.inradius(), 1.0, 1e-12);
    Rng rng(9);
    for (int i = 0; i < 5; ++i) {
        const Point p = sample_interior(cube, rng);
        const Direction v = random_unit(rng, 2);
        EXPECT_NEAR(directional_boundary_distance(cube, p, v), directional_bruteforce(cube, p, v), 1e-6);
    }
}

TEST(NearestDirection, Examples) {
    auto nd = nearest_boundary_direction(DomainModel::unit_disc(), CVec{0.5});
    EXPECT_NEAR(std::abs(nd.v[0] - cplx(1.0)), 0.0, 1e-15);
    nd = nearest_boundary_direction(DomainModel::unit_ball(2), CVec{0.6, 0.0});
    EXPECT_NEAR(norm(nd.v - CVec{1.0, 0.0}), 0.0, 1e-15);
    nd = nearest_boundary_direction(DomainModel::ellipsoid(2), CVec{0.9, 0.0});
    EXPECT_NEAR(norm(nd.v - CVec{1.0, 0.0}), 0.0, 1e-8);
    EXPECT_TRUE(nearest_boundary_direction(DomainModel::unit_disc(), CVec{0.0}).non_unique);
}

TEST(Diameter, Examples) {
    EXPECT_DOUBLE_EQ(diameter(DomainModel::unit_disc()).value, 2.0);
    EXPECT_DOUBLE_EQ(diameter(DomainModel::unit_ball(2)).value, 2.0);
    EXPECT_NEAR(diameter(unit_square_c1()).value, 2.0 * std::sqrt(2.0), 1e-12);
    // |z1|^2+|z2|^4=1: max |z|^2 = 1 - y^4 + y^2 at y^2 = 1/2 -> 5/4
    EXPECT_NEAR(diameter(DomainModel::ellipsoid(2)).value, 2.0 * std::sqrt(1.25), 1e-12);
}

TEST(Halfspaces, UnboundedRejected) {
    EXPECT_THROW(DomainModel::halfspaces({{CVec{1.0}, 1.0}, {CVec{-1.0}, 1.0}}), std::invalid_argument);
    EXPECT_THROW(DomainModel::halfspaces({{CVec{1.0}, 1.0}, {CVec{cplx(0, 1)}, 1.0}, {CVec{cplx(-1, -1)}, -5.0}}),
                 std::invalid_argument);
}

TEST(SamplePairs, BandAndDeterminism) {
    const auto disc = DomainModel::unit_disc();
    SampleRule rule;
    rule.count = 2;
    rule.delta_lo = 0.05;
    rule.delta_hi = 0.15;
    rule.seed = 7;
    const auto a = sample_pairs(disc, rule);
    const auto b = sample_pairs(disc, rule);
    ASSERT_EQ(a.size(), 2u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_TRUE(a[i].first == b[i].first && a[i].second == b[i].second);
        for (const auto& p : {a[i].first, a[i].second}) {
            const double dl = 1.0 - std::abs(p[0]);
            EXPECT_GE(dl, 0.05 - 1e-15);
            EXPECT_LE(dl, 0.15 + 1e-15);
        }
    }
}

TEST(SamplePairs, EllipsoidThinBand) {
    const auto e = DomainModel::ellipsoid(2);
    SampleRule rule;
    rule.count = 100;
    rule.delta_lo = 1e-3;
    rule.delta_hi = 1e-2;
    rule.seed = 1;
    const auto pairs = sample_pairs(e, rule);
    ASSERT_EQ(pairs.size(), 100u);
    for (const auto& [x, y] : pairs)
        for (const auto& p : {x, y}) {
            const double dl = boundary_distance(e, p);
            EXPECT_GE(dl, 1e-3);
            EXPECT_LE(dl, 1e-2);
        }
}

TEST(SamplePairs, InfeasibleBandRejected) {
    SampleRule rule;
    rule.count = 1;
    rule.delta_lo = 0.5;
    rule.delta_hi = 1.5;
    EXPECT_THROW(sample_pairs(DomainModel::unit_disc(), rule), std::invalid_argument);
}

class DomainInvariants : public ::testing::TestWithParam<int> {
protected:
    DomainModel model() const {
        switch (GetParam()) {
            case 0: return DomainModel::unit_disc();
            case 1: return DomainModel::unit_ball(2);
            case 2: return DomainModel::ellipsoid(2);
            case 3: return DomainModel::ellipsoid(3);
            default: return unit_square_c1();
        }
    }
};

TEST_P(DomainInvariants, DirectionalDominatesEuclidean) {
    const auto d = model();
    Rng rng(100 + GetParam());
    for (int i = 0; i < 5; ++i) {
        const Point p = sample_interior(d, rng);
        const double dp = boundary_distance(d, p);
        for (int j = 0; j < 200; ++j)
            EXPECT_LE(dp, directional_boundary_distance(d, p, random_unit(rng, d.dim())) + 1e-9);
        const auto nd = nearest_boundary_direction(d, p);
        EXPECT_NEAR(directional_boundary_distance(d, p, nd.v), dp, 1e-6);
    }
}

TEST_P(DomainInvariants, ScalingLaw) {
    const auto d = model();
    Rng rng(200 + GetParam());
    for (int i = 0; i < 20; ++i) {
        const Point p = sample_interior(d, rng);
        const Direction v = random_unit(rng, d.dim());
        const cplx c(rng.uniform(-3, 3), rng.uniform(-3, 3));
        EXPECT_NEAR(directional_boundary_distance(d, p, v * c) * std::abs(c), directional_boundary_distance(d, p, v), 1e-9);
    }
}

TEST_P(DomainInvariants, MonotoneAlongInwardNormal) {
    const auto d = model();
    Rng rng(300 + GetParam());
    for (int i = 0; i < 10; ++i) {
        const Point p = sample_interior(d, rng);
        const auto nd = nearest_boundary_direction(d, p);
        const double dp = boundary_distance(d, p);
        const double reach = std::min(0.5 * dp, 0.25 * distance(p, d.center()));
        double prev = dp;
        for (int k = 1; k <= 10; ++k) {
            const Point q = p - nd.v * (reach * k / 10.0);
            if (!contains(d, q)) break;
            const double dq = boundary_distance(d, q);
            EXPECT_GE(dq, prev - 1e-10);
            prev = dq;
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Models, DomainInvariants, ::testing::Range(0, 5));
