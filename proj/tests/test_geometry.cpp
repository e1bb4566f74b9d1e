#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lemma_checks.hpp"
#include "support.hpp"

using namespace superres;
using namespace testing_support;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST(UnitVector, NormalizesInput) {
    const UnitVector u(v2(3, 4));
    EXPECT_NEAR(u.vec().norm(), 1.0, 1e-12);
    EXPECT_NEAR(u[0], 0.6, 1e-15);
    EXPECT_THROW(UnitVector(v2(0, 0)), std::invalid_argument);
}

TEST(ProjectComplement, Examples) {
    EXPECT_TRUE(project_complement(v2(3, 4), UnitVector{1.0, 0.0}).isApprox(v2(0, 4)));
    EXPECT_TRUE(project_complement(v3(1, 1, 0), UnitVector{0.0, 0.0, 1.0}).isApprox(v3(1, 1, 0)));
}

TEST(ProjectComplement, PythagorasOrthogonalityIdempotence) {
    Rng rng(1);
    for (int trial = 0; trial < 500; ++trial) {
        const int k = 2 + trial % 2;
        const Vec u = random_vec(rng, k, 5.0);
        const UnitVector v = random_unit(rng, k);
        const Vec p = project_complement(u, v);
        EXPECT_NEAR(p.squaredNorm() + std::pow(u.dot(v.vec()), 2), u.squaredNorm(), 1e-10);
        EXPECT_NEAR(p.dot(v.vec()), 0.0, 1e-12 * (1 + u.norm()));
        EXPECT_LT((project_complement(p, v) - p).norm(), 1e-12 * (1 + u.norm()));
    }
}

TEST(OrthonormalComplement, IsOrthonormalAndOrthogonal) {
    Rng rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const int k = 2 + trial % 2;
        const UnitVector v = random_unit(rng, k);
        const Eigen::MatrixXd b = orthonormal_complement(v);
        ASSERT_EQ(b.rows(), k);
        ASSERT_EQ(b.cols(), k - 1);
        EXPECT_LT((b.transpose() * b - Eigen::MatrixXd::Identity(k - 1, k - 1)).norm(), 1e-12);
        EXPECT_LT((b.transpose() * v.vec()).norm(), 1e-12);
    }
}

TEST(Family2d, Examples) {
    const auto f2 = family_2d(2);
    ASSERT_EQ(f2.size(), 2u);
    EXPECT_NEAR(f2[0][0], 0.0, 1e-15);
    EXPECT_NEAR(f2[0][1], 1.0, 1e-15);
    EXPECT_NEAR(f2[1][0], -1.0, 1e-15);
    EXPECT_NEAR(f2[1][1], 0.0, 1e-15);

    const auto f4 = family_2d(4);
    EXPECT_NEAR(f4[2][0], -std::sqrt(2.0) / 2, 1e-15);
    EXPECT_NEAR(f4[2][1], std::sqrt(2.0) / 2, 1e-15);

    const auto f10 = family_2d(10);
    ASSERT_EQ(f10.size(), 10u);
    for (std::size_t i = 0; i < f10.size(); ++i)
        for (std::size_t j = i + 1; j < f10.size(); ++j) {
            // angle between direction lines, folded into [0, pi/2]
            const double angle = std::acos(std::clamp(f10[i].dot(f10[j].vec()), -1.0, 1.0));
            EXPECT_GE(std::min(angle, pi - angle), pi / 10 - 1e-12);
        }
    EXPECT_THROW(family_2d(0), std::invalid_argument);
}

TEST(Family3d, Examples) {
    const auto f1 = family_3d(1);
    ASSERT_EQ(f1.size(), 1u);
    EXPECT_LT((f1[0].vec() - v3(0, 1, 0)).norm(), 1e-15);

    const auto f2 = family_3d(2);
    ASSERT_EQ(f2.size(), 4u);
    const Vec target = v3(0.5, 0.5, std::sqrt(2.0) / 2);
    EXPECT_TRUE(std::any_of(f2.vectors.begin(), f2.vectors.end(),
                            [&](const UnitVector& v) { return (v.vec() - target).norm() < 1e-14; }));

    for (int N = 1; N <= 9; ++N) {
        const auto f = family_3d(N);
        EXPECT_EQ(f.size(), static_cast<std::size_t>(N * N));
        for (const auto& v : f.vectors) EXPECT_NEAR(v.vec().norm(), 1.0, 1e-12);
    }
    EXPECT_THROW(family_3d(0), std::invalid_argument);
}

TEST(AppendixFamily, Examples) {
    const auto f = appendix_family(2, pi / 6);
    ASSERT_EQ(f.size(), 3u);
    for (int q = 0; q < 3; ++q) {
        const double angle = (q + 1) * pi / 6;
        EXPECT_NEAR(f[static_cast<std::size_t>(q)][0], std::cos(angle), 1e-14);
        EXPECT_NEAR(f[static_cast<std::size_t>(q)][1], std::sin(angle), 1e-14);
    }
    // k = 3, theta = pi/4: grid angles {pi/4, pi/2}^2, first angle most significant
    const auto g = appendix_family(3, pi / 4);
    ASSERT_EQ(g.size(), 4u);
    const double r = std::sqrt(0.5);
    const std::vector<Vec> expected{v3(r, 0.5, 0.5), v3(r, 0, r), v3(0, r, r), v3(0, 0, 1)};
    for (std::size_t i = 0; i < 4; ++i) EXPECT_LT((g[i].vec() - expected[i]).norm(), 1e-15) << i;
    int pairs = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = i + 1; j < g.size(); ++j, ++pairs) EXPECT_GE(g[i].dot(g[j].vec()), -1e-12);
    // two members sharing the first angle sit closer than theta: 1/2 + sqrt(2)/4 > cos(pi/4)
    EXPECT_NEAR(g[0].dot(g[1].vec()), 0.5 + std::sqrt(2.0) / 4, 1e-15);
    EXPECT_EQ(pairs, 6);
    EXPECT_EQ(appendix_family(2, pi / 2 - 1e-9).size(), 1u);
    EXPECT_THROW(appendix_family(2, pi / 2), std::invalid_argument);
}

TEST(LemmaPairwiseDot, PlanarFamilyExhaustive) {
    const auto r = check_pairwise_dot(2);
    EXPECT_TRUE(r.ok()) << r.note;
}

TEST(LemmaPairwiseDot, SpatialFamilyNonnegative) {
    // the upper bound cos(theta) does not hold in 3D (see the k = 3 example above);
    // nonnegativity does
    for (int N = 1; N <= 8; ++N) {
        const auto f = appendix_family(3, pi / (2.0 * N + 1.0));
        ASSERT_EQ(f.grid, N);
        for (std::size_t i = 0; i < f.size(); ++i)
            for (std::size_t j = i + 1; j < f.size(); ++j) EXPECT_GE(f[i].dot(f[j].vec()), -1e-12);
    }
}

TEST(BestDirections, Examples) {
    DirectionFamily fam{2, 2, {UnitVector{1.0, 0.0}, UnitVector{0.0, 1.0}}};
    const auto a = best_directions({v2(0, 0), v2(1, 0)}, fam, 1);
    ASSERT_EQ(a.size(), 1u);
    EXPECT_EQ(a[0].index, 1u);
    EXPECT_NEAR(a[0].separation, 1.0, 1e-15);

    const auto b = best_directions({v2(0, 0), v2(0, 1)}, fam, 2);
    ASSERT_EQ(b.size(), 2u);
    EXPECT_EQ(b[0].index, 0u);
    EXPECT_NEAR(b[0].separation, 1.0, 1e-15);
    EXPECT_EQ(b[1].index, 1u);
    EXPECT_NEAR(b[1].separation, 0.0, 1e-15);

    EXPECT_THROW(best_directions({v2(0, 0)}, fam, 1), std::invalid_argument);
    EXPECT_THROW(best_directions({v2(0, 0), v2(0, 0)}, fam, 1), std::invalid_argument);
}

TEST(BestDirections, MatchesExhaustiveScoring) {
    Rng rng(3);
    const auto fam = family_2d(20);
    for (int trial = 0; trial < 50; ++trial) {
        const auto pts = separated_points(rng, 4, 2, 2.0, 0.05);
        // independent scoring: 1D projections onto the line direction (-v_y, v_x)
        std::vector<std::pair<double, std::size_t>> scores;
        for (std::size_t q = 0; q < fam.size(); ++q) {
            const Vec line = v2(-fam[q][1], fam[q][0]);
            double best = INFINITY;
            for (std::size_t i = 0; i < pts.size(); ++i)
                for (std::size_t j = i + 1; j < pts.size(); ++j)
                    best = std::min(best, std::abs(line.dot(pts[i] - pts[j])));
            scores.emplace_back(best, q);
        }
        std::stable_sort(scores.begin(), scores.end(), [](auto& x, auto& y) { return x.first > y.first; });
        const auto got = best_directions(pts, fam, 2);
        for (int r = 0; r < 2; ++r) {
            EXPECT_EQ(got[static_cast<std::size_t>(r)].index, scores[static_cast<std::size_t>(r)].second);
            EXPECT_NEAR(got[static_cast<std::size_t>(r)].separation, scores[static_cast<std::size_t>(r)].first, 1e-12);
        }
    }
}

TEST(ClosestPoints, SkewExampleAgainstGridSearch) {
    const Line l1{v3(0, 0, 0), UnitVector{1.0, 0.0, 0.0}};
    const Line l2{v3(0, 1, 1), UnitVector{0.0, 0.0, 1.0}};
    const auto cp = closest_points(l1, l2);
    EXPECT_FALSE(cp.parallel);
    EXPECT_LT(cp.on_first.norm(), 1e-15);
    EXPECT_LT((cp.on_second - v3(0, 1, 0)).norm(), 1e-15);
    EXPECT_NEAR(cp.distance, 1.0, 1e-15);

    double best = INFINITY;
    for (int a = -200; a <= 200; ++a)
        for (int b = -200; b <= 200; ++b) {
            const double lam = a * 0.01, t = b * 0.01;
            best = std::min(best, (v3(lam, 0, 0) - v3(0, 1, 1 + t)).norm());
        }
    EXPECT_NEAR(cp.distance, best, 1e-9);
}

TEST(ClosestPoints, IntersectingAndPlanarLines) {
    const auto o = closest_points(Line{v3(0, 0, 0), UnitVector{1.0, 2.0, 0.0}}, Line{v3(0, 0, 0), UnitVector{0.0, 1.0, 3.0}});
    EXPECT_LT(o.distance, 1e-15);
    EXPECT_LT(o.on_first.norm(), 1e-15);

    Rng rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        const Line a{random_vec(rng, 2, 3), random_unit(rng, 2)};
        const Line b{random_vec(rng, 2, 3), random_unit(rng, 2)};
        const auto cp = closest_points(a, b);
        if (cp.parallel) continue;
        EXPECT_LT(cp.distance, 1e-9);
        // both points lie on their lines
        EXPECT_NEAR(std::abs(project_complement(cp.on_first - a.point, a.direction).norm()), 0.0, 1e-9);
        EXPECT_NEAR(std::abs(project_complement(cp.on_second - b.point, b.direction).norm()), 0.0, 1e-9);
    }
}

TEST(ClosestPoints, BeatsRandomPointPairs) {
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const Line a{random_vec(rng, 3, 3), random_unit(rng, 3)};
        const Line b{random_vec(rng, 3, 3), random_unit(rng, 3)};
        const auto cp = closest_points(a, b);
        for (int i = 0; i < 100; ++i) {
            const Vec p = a.point + rng.uniform(-10, 10) * a.direction.vec();
            const Vec q = b.point + rng.uniform(-10, 10) * b.direction.vec();
            EXPECT_LE(cp.distance, (p - q).norm() + 1e-12);
        }
    }
}

TEST(ClosestPoints, ParallelFlag) {
    const auto cp = closest_points(Line{v3(0, 0, 0), UnitVector{1.0, 0.0, 0.0}}, Line{v3(0, 1, 0), UnitVector{-1.0, 0.0, 0.0}});
    EXPECT_TRUE(cp.parallel);
    EXPECT_NEAR(cp.distance, 1.0, 1e-15);
}

// Lemma suites

TEST(LemmaArea, MonteCarloBadNeighborhoodArea) {
    const auto r = check_area_bound(6);
    EXPECT_TRUE(r.ok()) << r.note;
}

TEST(LemmaArea, SphereAreas) {
    EXPECT_NEAR(sphere_area(0), 2.0, 1e-14);
    EXPECT_NEAR(sphere_area(1), 2 * pi, 1e-14);
    EXPECT_NEAR(sphere_area(2), 4 * pi, 1e-13);
}

TEST(LemmaPlanarFamily, SomeDirectionKeepsProjectedGaps) {
    for (int n = 2; n <= 5; ++n) EXPECT_EQ(separation_family_2d(n).size(), static_cast<std::size_t>(n * (n + 1) / 2));
    const auto r = check_planar_family(7);
    EXPECT_TRUE(r.ok()) << r.violations << " violations, " << r.note;
}

TEST(LemmaGoodDirections, AppendixFamilyHasNPlusOne) {
    const auto r = check_good_directions(8);
    EXPECT_TRUE(r.ok()) << r.violations << " violations, " << r.note;
}

TEST(LemmaProjectionSum, TwoCorrelatedDirections) {
    const auto r = check_projection_sum(9);
    EXPECT_TRUE(r.ok()) << r.violations << " violations, " << r.note;
}
