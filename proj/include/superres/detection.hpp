#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"
#include "model.hpp"
#include "spectral.hpp"

namespace superres {

struct DetectionConfig {
    double sigma = 0.0;
    int s_max = 8;   // sweep cap
    int N = 12;      // directions per family
    int dimension = 2;

    void validate() const {
        if (!(sigma >= 0.0)) throw std::invalid_argument("DetectionConfig: sigma must be >= 0");
        if (s_max < 1) throw std::invalid_argument("DetectionConfig: s_max must be >= 1");
        if (N < 1) throw std::invalid_argument("DetectionConfig: N must be >= 1");
    }
};

/// Source count at a fixed Hankel order: number of singular values strictly
/// above (s+1) sigma (they are sorted, so this is the largest such index).
inline int detect_fixed_s(const std::vector<double>& singular, int s, double sigma) {
    const double threshold = (s + 1) * sigma;
    int n = 0;
    while (n < static_cast<int>(singular.size()) && singular[static_cast<std::size_t>(n)] > threshold) ++n;
    return n;
}

inline int detect_fixed_s(const LineSamples& samples, double sigma) {
    return detect_fixed_s(singular_values(build_hankel(samples)), samples.order, sigma);
}

/// Everything one sweep over s = 1..s_max saw on one line.
struct LineSweep {
    int count = 0;                      // max over s
    int order = 0;                      // first s reaching `count` (0 if count == 0)
    std::vector<int> counts;            // counts[s-1]
    std::vector<LineSamples> samples;   // samples[s-1]
    std::vector<std::vector<double>> singular; // singular[s-1]

    /// Smallest s >= n whose fixed-order count equals n, if any.
    std::optional<int> order_for(int n) const {
        for (std::size_t i = 0; i < counts.size(); ++i)
            if (static_cast<int>(i) + 1 >= n && counts[i] == n) return static_cast<int>(i) + 1;
        return std::nullopt;
    }
};

namespace detail {

inline void record_order(LineSweep& sweep, LineSamples samples, double sigma) {
    const int s = samples.order;
    auto sv = singular_values(build_hankel(samples));
    const int n = detect_fixed_s(sv, s, sigma);
    sweep.counts.push_back(n);
    sweep.singular.push_back(std::move(sv));
    sweep.samples.push_back(std::move(samples));
    if (n > sweep.count) {
        sweep.count = n;
        sweep.order = s;
    }
}

} // namespace detail

/// Sweeping detection on a one-dimensional oracle: fresh order-s samples for
/// every s = 1..s_max, result is the largest fixed-order count.
inline LineSweep sweep_detect_1d(const Oracle& line, double sigma, int s_max) {
    if (line.dimension() != 1) throw std::invalid_argument("sweep_detect_1d: oracle must be one-dimensional");
    if (s_max < 1) throw std::invalid_argument("sweep_detect_1d: s_max must be >= 1");
    LineSweep sweep;
    for (int s = 1; s <= s_max; ++s) detail::record_order(sweep, sample_line(line, s), sigma);
    return sweep;
}

/// Sweeping detection on a recorded equispaced line of M samples: order s uses
/// the stride-floor((M-1)/2s) subsample, s = 1..min(floor((M-1)/2), s_max).
inline LineSweep sweep_detect_1d(const LineSamples& record, double sigma, int s_max) {
    if (s_max < 1) throw std::invalid_argument("sweep_detect_1d: s_max must be >= 1");
    const int top = std::min((record.count() - 1) / 2, s_max);
    if (top < 1) throw std::invalid_argument("sweep_detect_1d: need at least 3 samples");
    LineSweep sweep;
    for (int s = 1; s <= top; ++s) detail::record_order(sweep, subsample(record, s), sigma);
    return sweep;
}

struct DirectionReport {
    UnitVector direction;          // the projection direction v; data lives on v^perp
    int count = 0;
    std::vector<double> singular;  // singular values at the order that produced `count`
};

struct DetectionResult {
    int count = 0;
    std::vector<DirectionReport> per_direction;
    std::optional<std::size_t> winner; // first direction reaching `count`
};

/// One sweep per planar direction, kept for reuse by support recovery.
struct PlanarSweep {
    UnitVector direction; // v
    UnitVector line;      // spans v^perp
    LineSweep sweep;
};

inline std::vector<PlanarSweep> sweep_directions_2d(const Oracle& oracle, double sigma, int N, int s_max) {
    if (oracle.dimension() != 2) throw std::invalid_argument("detect_2d: oracle must be two-dimensional");
    const auto family = family_2d(N);
    std::vector<PlanarSweep> out;
    out.reserve(family.size());
    for (const auto& v : family.vectors) {
        const UnitVector u = perpendicular_2d(v);
        const SubspaceOracle line(oracle, u.vec());
        out.push_back({v, u, sweep_detect_1d(line, sigma, s_max)});
    }
    return out;
}

inline DetectionResult summarize(const std::vector<PlanarSweep>& sweeps) {
    DetectionResult result;
    for (std::size_t i = 0; i < sweeps.size(); ++i) {
        const auto& sw = sweeps[i].sweep;
        DirectionReport rep{sweeps[i].direction, sw.count, {}};
        if (sw.order > 0) rep.singular = sw.singular[static_cast<std::size_t>(sw.order - 1)];
        else if (!sw.singular.empty()) rep.singular = sw.singular.front();
        if (!result.winner || sw.count > result.count) {
            result.winner = i;
            result.count = sw.count;
        }
        result.per_direction.push_back(std::move(rep));
    }
    return result;
}

/// Two-dimensional sweep: 1D sweeping detection on v(theta_q)^perp for every
/// theta_q = q pi / N; the count is the maximum.
inline DetectionResult detect_2d(const Oracle& oracle, double sigma, int N, int s_max) {
    return summarize(sweep_directions_2d(oracle, sigma, N, s_max));
}

/// Three-dimensional sweep: detect_2d inside every plane v(p1, p2)^perp.
inline DetectionResult detect_3d(const Oracle& oracle, double sigma, int N, int s_max) {
    if (oracle.dimension() != 3) throw std::invalid_argument("detect_3d: oracle must be three-dimensional");
    const auto family = family_3d(N);
    DetectionResult result;
    for (std::size_t i = 0; i < family.size(); ++i) {
        const SubspaceOracle plane(oracle, orthonormal_complement(family[i]));
        auto inner = detect_2d(plane, sigma, N, s_max);
        DirectionReport rep{family[i], inner.count, {}};
        if (inner.winner) rep.singular = inner.per_direction[*inner.winner].singular;
        if (!result.winner || inner.count > result.count) {
            result.winner = i;
            result.count = inner.count;
        }
        result.per_direction.push_back(std::move(rep));
    }
    return result;
}

inline DetectionResult detect(const Oracle& oracle, const DetectionConfig& config) {
    config.validate();
    switch (oracle.dimension()) {
    case 1: {
        auto sw = sweep_detect_1d(oracle, config.sigma, config.s_max);
        DetectionResult r;
        r.count = sw.count;
        DirectionReport rep{UnitVector{1.0}, sw.count, {}};
        if (sw.order > 0) rep.singular = sw.singular[static_cast<std::size_t>(sw.order - 1)];
        r.per_direction.push_back(std::move(rep));
        r.winner = 0;
        return r;
    }
    case 2: return detect_2d(oracle, config.sigma, config.N, config.s_max);
    case 3: return detect_3d(oracle, config.sigma, config.N, config.s_max);
    default: throw std::invalid_argument("detect: dimension must be 1, 2 or 3");
    }
}

struct TailBoundReport {
    bool tail_bound_holds = true;          // sigma_{q,j} <= (s+1) sigma for all q, j > n
    double worst_tail_ratio = 0.0;         // max sigma_{q,j} / ((s+1) sigma) over the tail
    bool separation_condition = false;     // the d_min condition for the given zeta
    std::optional<bool> qstar_exists;      // checked only when the condition holds
    std::optional<std::size_t> qstar;      // first direction passing the n-th threshold
    double separation_threshold = 0.0;
};

/// Checks the two claims behind the planar sweep at a fixed order s:
/// every tail singular value stays below (s+1) sigma, and, when
/// d_min > (pi s n (n+1) / (2 Omega)) (n (s+1) / zeta^2 * sigma / m_min)^{1/(2n-2)},
/// some direction keeps the n-th singular value above it. zeta is a free
/// positive constant supplied by the caller.
inline TailBoundReport tail_bound_check(const MeasurementOracle& oracle, int s, const DirectionFamily& family,
                                       double zeta) {
    if (oracle.dimension() != 2) throw std::invalid_argument("tail_bound_check: oracle must be two-dimensional");
    const auto& mu = oracle.measure();
    const int n = static_cast<int>(mu.size());
    if (n < 2) throw std::invalid_argument("tail_bound_check: need n >= 2");
    if (s < n) throw std::invalid_argument("tail_bound_check: need s >= n");
    if (!(zeta > 0.0)) throw std::invalid_argument("tail_bound_check: zeta must be positive");

    const double sigma = oracle.sigma();
    const double threshold = (s + 1) * sigma;
    TailBoundReport rep;
    if (sigma > 0.0) {
        rep.separation_threshold =
            std::numbers::pi * s * n * (n + 1) / (2.0 * oracle.cutoff()) *
            std::pow(n * (s + 1) / (zeta * zeta) * sigma / min_amplitude(mu), 1.0 / (2.0 * n - 2.0));
    }
    rep.separation_condition = min_separation(mu) > rep.separation_threshold;

    bool found = false;
    for (std::size_t q = 0; q < family.size(); ++q) {
        const SubspaceOracle line(oracle, perpendicular_2d(family[q]).vec());
        const auto sv = singular_values(build_hankel(sample_line(line, s)));
        for (std::size_t j = static_cast<std::size_t>(n); j < sv.size(); ++j) {
            if (sv[j] > threshold) rep.tail_bound_holds = false;
            if (threshold > 0.0) rep.worst_tail_ratio = std::max(rep.worst_tail_ratio, sv[j] / threshold);
            else if (sv[j] > 0.0) rep.worst_tail_ratio = std::numeric_limits<double>::infinity();
        }
        if (!found && sv[static_cast<std::size_t>(n - 1)] > threshold) {
            found = true;
            rep.qstar = q;
        }
    }
    if (rep.separation_condition) rep.qstar_exists = found;
    return rep;
}

} // namespace superres
