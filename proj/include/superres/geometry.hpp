#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace superres {

using Vec = Eigen::VectorXd;

/// A direction in R^k. Construction normalizes; the stored coordinates
/// always have unit Euclidean norm.
class UnitVector {
public:
    explicit UnitVector(const Vec& v) {
        const double norm = v.norm();
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw std::invalid_argument("UnitVector: zero or non-finite vector");
        coords_ = v / norm;
    }

    UnitVector(std::initializer_list<double> values)
        : UnitVector(Eigen::Map<const Vec>(values.begin(), static_cast<Eigen::Index>(values.size()))) {}

    const Vec& vec() const { return coords_; }
    int dimension() const { return static_cast<int>(coords_.size()); }
    double operator[](int i) const { return coords_[i]; }
    double dot(const Vec& u) const { return coords_.dot(u); }

private:
    Vec coords_;
};

struct DirectionFamily {
    int dimension = 0;
    int grid = 0; // the N the family was generated from
    std::vector<UnitVector> vectors;

    std::size_t size() const { return vectors.size(); }
    const UnitVector& operator[](std::size_t i) const { return vectors[i]; }
};

struct Line {
    Vec point;
    UnitVector direction;
};

// u - (u.v) v
inline Vec project_complement(const Vec& u, const UnitVector& v) {
    if (u.size() != v.dimension())
        throw std::invalid_argument("project_complement: dimension mismatch");
    return u - v.dot(u) * v.vec();
}

/// Direction of the line v^perp for a planar v = (cos t, sin t): (-sin t, cos t).
inline UnitVector perpendicular_2d(const UnitVector& v) {
    if (v.dimension() != 2)
        throw std::invalid_argument("perpendicular_2d: expected a planar vector");
    return UnitVector{-v[1], v[0]};
}

/// Orthonormal basis of v^perp, one column per basis vector (k x (k-1)).
/// In 2D the single column is perpendicular_2d(v).
inline Eigen::MatrixXd orthonormal_complement(const UnitVector& v) {
    const int k = v.dimension();
    if (k < 2) throw std::invalid_argument("orthonormal_complement: k must be >= 2");
    if (k == 2) return perpendicular_2d(v).vec();

    // Gram-Schmidt against the canonical axis least aligned with v.
    Eigen::MatrixXd basis(k, k - 1);
    Eigen::Index pivot = 0;
    v.vec().cwiseAbs().minCoeff(&pivot);
    Vec first = Vec::Zero(k);
    first[pivot] = 1.0;
    first = project_complement(first, v).normalized();
    basis.col(0) = first;
    if (k == 3) {
        Eigen::Vector3d a = v.vec(), b = first;
        basis.col(1) = a.cross(b).normalized();
        return basis;
    }
    int col = 1;
    for (int axis = 0; axis < k && col < k - 1; ++axis) {
        Vec e = Vec::Zero(k);
        e[axis] = 1.0;
        e = project_complement(e, v);
        for (int c = 0; c < col; ++c) e -= basis.col(c).dot(e) * basis.col(c);
        if (e.norm() > 1e-8) basis.col(col++) = e.normalized();
    }
    return basis;
}

/// {(cos q pi/N, sin q pi/N) : q = 1..N}
inline DirectionFamily family_2d(int N) {
    if (N < 1) throw std::invalid_argument("family_2d: N must be positive");
    DirectionFamily fam{2, N, {}};
    fam.vectors.reserve(static_cast<std::size_t>(N));
    for (int q = 1; q <= N; ++q) {
        const double theta = q * std::numbers::pi / N;
        fam.vectors.push_back(UnitVector{std::cos(theta), std::sin(theta)});
    }
    return fam;
}

/// N^2 vectors (cos p1 sin p2, sin p1 sin p2, cos p2) with p1, p2 on the grid
/// {pi/(2N), 2pi/(2N), ..., pi/2}; p1 is the outer loop.
inline DirectionFamily family_3d(int N) {
    if (N < 1) throw std::invalid_argument("family_3d: N must be positive");
    DirectionFamily fam{3, N, {}};
    fam.vectors.reserve(static_cast<std::size_t>(N) * static_cast<std::size_t>(N));
    for (int a = 1; a <= N; ++a) {
        const double p1 = a * std::numbers::pi / (2.0 * N);
        for (int b = 1; b <= N; ++b) {
            const double p2 = b * std::numbers::pi / (2.0 * N);
            fam.vectors.push_back(UnitVector{std::cos(p1) * std::sin(p2), std::sin(p1) * std::sin(p2),
                                             std::cos(p2)});
        }
    }
    return fam;
}

/// Point on the unit sphere of R^k from k-1 hyperspherical angles:
/// x1 = cos a1, x2 = sin a1 cos a2, ..., x_k = sin a1 ... sin a_{k-1}.
inline Vec spherical_point(const std::vector<double>& angles) {
    const auto k = static_cast<Eigen::Index>(angles.size()) + 1;
    Vec x(k);
    double sin_prod = 1.0;
    for (Eigen::Index i = 0; i + 1 < k; ++i) {
        x[i] = sin_prod * std::cos(angles[static_cast<std::size_t>(i)]);
        sin_prod *= std::sin(angles[static_cast<std::size_t>(i)]);
    }
    x[k - 1] = sin_prod;
    return x;
}

/// The spherical-coordinate grid with every angle in {theta, 2 theta, ..., N theta},
/// N = floor(pi / (2 theta)). Any two members satisfy v.w >= 0; for k = 2 also v.w <= cos(theta).
/// Ordered lexicographically in the angle indices, first angle most significant.
inline DirectionFamily appendix_family(int k, double theta) {
    if (k < 2) throw std::invalid_argument("appendix_family: k must be >= 2");
    if (!(theta > 0.0) || !(theta < std::numbers::pi / 2))
        throw std::invalid_argument("appendix_family: theta must lie in (0, pi/2)");
    const int N = static_cast<int>(std::floor(std::numbers::pi / (2.0 * theta)));
    if (N < 1) throw std::invalid_argument("appendix_family: empty grid");

    DirectionFamily fam{k, N, {}};
    std::vector<int> tau(static_cast<std::size_t>(k - 1), 1);
    std::vector<double> angles(tau.size());
    while (true) {
        for (std::size_t i = 0; i < tau.size(); ++i) angles[i] = tau[i] * theta;
        fam.vectors.emplace_back(spherical_point(angles));
        // odometer increment, last index fastest
        int pos = k - 2;
        while (pos >= 0 && tau[static_cast<std::size_t>(pos)] == N) tau[static_cast<std::size_t>(pos--)] = 1;
        if (pos < 0) break;
        ++tau[static_cast<std::size_t>(pos)];
    }
    return fam;
}

/// Planar family (cos 2q D, sin 2q D), D = pi / (n(n+1)), q = 1..n(n+1)/2.
/// Some member keeps every projected gap >= 2 d_min / (n(n+1)).
inline DirectionFamily separation_family_2d(int n) {
    if (n < 2) throw std::invalid_argument("separation_family_2d: n must be >= 2");
    const int count = n * (n + 1) / 2;
    const double delta = std::numbers::pi / (n * (n + 1));
    DirectionFamily fam{2, count, {}};
    for (int q = 1; q <= count; ++q)
        fam.vectors.push_back(UnitVector{std::cos(2 * q * delta), std::sin(2 * q * delta)});
    return fam;
}

inline double min_pairwise_distance(const std::vector<Vec>& points) {
    if (points.size() < 2) throw std::invalid_argument("min_pairwise_distance: need at least 2 points");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) best = std::min(best, (points[i] - points[j]).norm());
    return best;
}

/// min_{p != j} |P_{v^perp}(y_p) - P_{v^perp}(y_j)|
inline double min_projected_separation(const std::vector<Vec>& points, const UnitVector& v) {
    if (points.size() < 2) throw std::invalid_argument("min_projected_separation: need at least 2 points");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            best = std::min(best, project_complement(points[i] - points[j], v).norm());
    return best;
}

struct ScoredDirection {
    UnitVector direction;
    double separation;
    std::size_t index; // position in the family
};

/// The `count` family members whose complement keeps the points furthest
/// apart, sorted by decreasing separation; ties keep family order.
inline std::vector<ScoredDirection> best_directions(const std::vector<Vec>& points, const DirectionFamily& family,
                                                    std::size_t count) {
    if (points.size() < 2) throw std::invalid_argument("best_directions: need at least 2 points");
    if (family.size() == 0) throw std::invalid_argument("best_directions: empty family");
    if (count == 0 || count > family.size()) throw std::invalid_argument("best_directions: bad count");
    if (min_pairwise_distance(points) == 0.0) throw std::invalid_argument("best_directions: duplicate points");

    std::vector<ScoredDirection> scored;
    scored.reserve(family.size());
    for (std::size_t i = 0; i < family.size(); ++i)
        scored.push_back({family[i], min_projected_separation(points, family[i]), i});
    std::stable_sort(scored.begin(), scored.end(),
                     [](const ScoredDirection& a, const ScoredDirection& b) { return a.separation > b.separation; });
    scored.erase(scored.begin() + static_cast<std::ptrdiff_t>(count), scored.end());
    return scored;
}

struct ClosestPoints {
    Vec on_first;
    Vec on_second;
    double distance;
    bool parallel;
};

inline constexpr double kParallelTolerance = 1e-10;

/// Nearest pair of points between two lines. Parallel lines have no unique
/// answer; the minimum-norm parameter pair is returned and `parallel` is set.
inline ClosestPoints closest_points(const Line& l1, const Line& l2) {
    if (l1.point.size() != l2.point.size() || l1.direction.dimension() != l1.point.size() ||
        l2.direction.dimension() != l2.point.size())
        throw std::invalid_argument("closest_points: dimension mismatch");

    const Vec& d1 = l1.direction.vec();
    const Vec& d2 = l2.direction.vec();
    const Vec w0 = l1.point - l2.point;
    const double b = d1.dot(d2);
    const double d = d1.dot(w0);
    const double e = d2.dot(w0);

    double t = 0.0, u = 0.0;
    const bool parallel = std::abs(b) > 1.0 - kParallelTolerance;
    if (parallel) {
        t = -d / 2.0;
        u = b * d / 2.0;
    } else {
        const double denom = 1.0 - b * b;
        t = (b * e - d) / denom;
        u = (e - b * d) / denom;
    }
    ClosestPoints out{l1.point + t * d1, l2.point + u * d2, 0.0, parallel};
    out.distance = (out.on_first - out.on_second).norm();
    return out;
}

/// Surface area of the unit sphere S_{d} embedded in R^{d+1}.
inline double sphere_area(int d) {
    if (d < 0) throw std::invalid_argument("sphere_area: negative dimension");
    const double m = (d + 1) / 2.0;
    return 2.0 * std::pow(std::numbers::pi, m) / std::tgamma(m);
}

/// Membership in N(u, D): directions along which u keeps less than sin(D) of its length.
inline bool in_bad_neighborhood(const Vec& u, const UnitVector& v, double delta) {
    return project_complement(u, v).norm() < u.norm() * std::sin(delta);
}

} // namespace superres
