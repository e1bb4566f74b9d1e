#pragma once

// Randomized checks of the projection lemmas. Each returns the number of
// violations and a note on the worst case; shared by the unit and acceptance suites.

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "support.hpp"

namespace testing_support {

struct CheckResult {
    int cases = 0;
    int violations = 0;
    std::string note;
    bool ok() const { return violations == 0 && cases > 0; }
};

/// Monte-Carlo area of N(u, D) against 2 D^{k-1} / (k-1) area(S_{k-2}), plus 3 standard errors.
inline CheckResult check_area_bound(std::uint64_t seed, int samples = 100000) {
    using namespace superres;
    Rng rng(seed);
    CheckResult r;
    double worst = -INFINITY;
    for (int k = 2; k <= 3; ++k)
        for (double delta : {0.05, 0.2, 0.5, 1.0, std::numbers::pi / 2}) {
            const UnitVector u = random_unit(rng, k);
            int hits = 0;
            for (int i = 0; i < samples; ++i)
                if (in_bad_neighborhood(u.vec(), random_unit(rng, k), delta)) ++hits;
            const double p = static_cast<double>(hits) / samples;
            const double total = sphere_area(k - 1);
            const double se = std::sqrt(p * (1 - p) / samples) * total;
            const double bound = 2.0 * std::pow(delta, k - 1) / (k - 1) * sphere_area(k - 2);
            const double excess = p * total - (bound + 3 * se);
            worst = std::max(worst, excess);
            ++r.cases;
            if (excess > 1e-12 * total) ++r.violations; // p == 1 at delta = pi/2 meets the bound exactly
        }
    std::ostringstream s;
    s << "max(area - bound - 3se) = " << worst;
    r.note = s.str();
    return r;
}

/// appendix_family pairwise dot products lie in [0, cos theta], exhaustive over N <= 8.
inline CheckResult check_pairwise_dot(int k_max = 3) {
    using namespace superres;
    CheckResult r;
    std::ostringstream s;
    for (int k = 2; k <= k_max; ++k) {
        int bad = 0, pairs = 0;
        double worst = -INFINITY;
        for (int N = 1; N <= 8; ++N) {
            const double theta = std::numbers::pi / (2.0 * N + 1.0);
            const auto f = appendix_family(k, theta);
            if (f.grid != N) ++bad;
            for (std::size_t i = 0; i < f.size(); ++i)
                for (std::size_t j = i + 1; j < f.size(); ++j) {
                    const double d = f[i].dot(f[j].vec());
                    worst = std::max(worst, d - std::cos(theta));
                    ++pairs;
                    if (d < -1e-12 || d > std::cos(theta) + 1e-12) ++bad;
                }
        }
        r.cases += pairs;
        r.violations += bad;
        s << (k > 2 ? "; " : "") << "k=" << k << ": " << bad << "/" << pairs << " pairs out of range, max(v.w - cos theta) = " << worst;
    }
    r.note = s.str();
    return r;
}

/// Planar family of n(n+1)/2 directions keeps some projected gap >= 2 d_min / (n(n+1)).
inline CheckResult check_planar_family(std::uint64_t seed, int trials = 200) {
    using namespace superres;
    Rng rng(seed);
    CheckResult r;
    double worst = INFINITY;
    for (int t = 0; t < trials; ++t) {
        const int n = 2 + t % 4;
        const auto pts = separated_points(rng, n, 2, 3.0, 1e-3);
        const double dmin = min_pairwise_distance(pts);
        double best = 0.0;
        for (const auto& v : separation_family_2d(n).vectors) best = std::max(best, min_projected_separation(pts, v));
        const double ratio = best / (2.0 * dmin / (n * (n + 1)));
        worst = std::min(worst, ratio);
        ++r.cases;
        if (ratio < 1 - 1e-12) ++r.violations;
    }
    r.note = "min ratio to bound = " + std::to_string(worst);
    return r;
}

/// appendix_family(k, 2D) holds n+1 directions with projected gap >= (2D/pi) d_min.
inline CheckResult check_good_directions(std::uint64_t seed, int trials = 200) {
    using namespace superres;
    Rng rng(seed);
    CheckResult r;
    int fewest = 1 << 30;
    for (int t = 0; t < trials; ++t) {
        const int n = 2 + t % 4;
        const int k = 2 + (t / 4) % 2;
        const auto pts = separated_points(rng, n, k, 3.0, 1e-3);
        const double dmin = min_pairwise_distance(pts);
        const double delta = std::numbers::pi / 8 * std::pow(2.0 / ((n + 2.0) * (n - 1.0)), 1.0 / (k - 1));
        int good = 0;
        for (const auto& v : appendix_family(k, 2 * delta).vectors)
            if (min_projected_separation(pts, v) >= 2 * delta / std::numbers::pi * dmin * (1 - 1e-12)) ++good;
        fewest = std::min(fewest, good - (n + 1));
        ++r.cases;
        if (good < n + 1) ++r.violations;
    }
    r.note = "min surplus over n+1 = " + std::to_string(fewest);
    return r;
}

/// |P_{v1^perp} u|^2 + |P_{v2^perp} u|^2 >= (1 - cos theta) |u|^2 when 0 <= v1.v2 <= cos theta.
inline CheckResult check_projection_sum(std::uint64_t seed, int trials = 1000) {
    using namespace superres;
    Rng rng(seed);
    CheckResult r;
    double worst = INFINITY;
    while (r.cases < trials) {
        const int k = 2 + r.cases % 2;
        const double theta = rng.uniform(0.05, std::numbers::pi / 2);
        const Vec u = random_vec(rng, k, 3.0);
        const UnitVector a = random_unit(rng, k);
        const UnitVector b = random_unit(rng, k);
        const double d = a.dot(b.vec());
        if (d < 0.0 || d > std::cos(theta)) continue;
        const double lhs = project_complement(u, a).squaredNorm() + project_complement(u, b).squaredNorm();
        const double slack = lhs - ((1 - std::cos(theta)) * u.squaredNorm() - 1e-10);
        worst = std::min(worst, slack);
        ++r.cases;
        if (slack < 0) ++r.violations;
    }
    r.note = "min slack = " + std::to_string(worst);
    return r;
}

} // namespace testing_support
