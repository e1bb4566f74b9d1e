#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "superres/superres.hpp"

namespace testing_support {

using superres::cplx;
using superres::DiscreteMeasure;
using superres::Rng;
using superres::Vec;

inline Vec random_vec(Rng& rng, int k, double scale = 1.0) {
    Vec v(k);
    for (int i = 0; i < k; ++i) v[i] = rng.uniform(-scale, scale);
    return v;
}

inline superres::UnitVector random_unit(Rng& rng, int k) {
    Vec v(k);
    do {
        for (int i = 0; i < k; ++i) v[i] = rng.normal();
    } while (v.norm() < 1e-3);
    return superres::UnitVector(v);
}

inline std::vector<Vec> random_points(Rng& rng, int n, int k, double scale) {
    std::vector<Vec> pts;
    for (int j = 0; j < n; ++j) pts.push_back(random_vec(rng, k, scale));
    return pts;
}

/// Points with pairwise distance at least `gap` inside the cube [-scale, scale]^k.
inline std::vector<Vec> separated_points(Rng& rng, int n, int k, double scale, double gap) {
    while (true) {
        auto pts = random_points(rng, n, k, scale);
        if (n < 2 || superres::min_pairwise_distance(pts) >= gap) return pts;
    }
}

inline DiscreteMeasure make_measure(const std::vector<Vec>& pts, const std::vector<cplx>& amps) {
    DiscreteMeasure m;
    m.dimension = static_cast<int>(pts.front().size());
    m.supports = pts;
    m.amplitudes = amps;
    return m;
}

inline std::vector<cplx> random_phases(Rng& rng, int n, double magnitude = 1.0) {
    std::vector<cplx> a;
    for (int j = 0; j < n; ++j) a.push_back(std::polar(magnitude, rng.uniform(0.0, 2.0 * std::numbers::pi)));
    return a;
}

/// Direct sum, written independently of the library's fourier().
inline cplx direct_fourier(const DiscreteMeasure& m, const Vec& w) {
    cplx s{};
    for (std::size_t j = 0; j < m.size(); ++j) {
        double phase = 0.0;
        for (Eigen::Index i = 0; i < w.size(); ++i) phase += m.supports[j][i] * w[i];
        s += m.amplitudes[j] * cplx(std::cos(phase), std::sin(phase));
    }
    return s;
}

/// max_j min_l |est_l - truth_j|
inline double max_support_error(const std::vector<Vec>& truth, const std::vector<Vec>& est) {
    double worst = 0.0;
    for (const auto& y : truth) {
        double best = INFINITY;
        for (const auto& z : est) best = std::min(best, (z - y).norm());
        worst = std::max(worst, best);
    }
    return worst;
}

inline Vec v2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

inline Vec v3(double x, double y, double z) {
    Vec v(3);
    v << x, y, z;
    return v;
}

inline Vec v1(double x) {
    Vec v(1);
    v << x;
    return v;
}

/// Ordinary least-squares slope of y on x.
inline double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

} // namespace testing_support
