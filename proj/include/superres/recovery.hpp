#pragma once

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

#include "detection.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "model.hpp"
#include "pencil.hpp"

namespace superres {

struct RecoveryConfig {
    int N = 12;
    int s_max = 8;
    double correlation_cap = std::cos(std::numbers::pi / 8); // |v1 . v2| <= cap
    int max_sources = 6;                                      // enumeration limit
    int pair_pool = 4; // pairs among this many best-separated projections are matched; lowest residual wins

    void validate() const {
        if (pair_pool < 1) throw std::invalid_argument("RecoveryConfig: pair_pool must be >= 1");
        if (N < 1) throw std::invalid_argument("RecoveryConfig: N must be >= 1");
        if (s_max < 1) throw std::invalid_argument("RecoveryConfig: s_max must be >= 1");
        if (!(correlation_cap > 0.0) || !(correlation_cap < 1.0))
            throw std::invalid_argument("RecoveryConfig: correlation cap must lie in (0, 1)");
    }
};

/// Deduplicated (omega, Y) pairs used for the final least-squares fit.
class SampleSet {
public:
    void add(const Vec& omega, cplx value) {
        if (keys_.insert(detail::make_key(omega)).second) samples_.push_back({omega, value});
    }
    void add(const LineSamples& line, const Eigen::MatrixXd& embed) {
        for (int t = 0; t < line.count(); ++t) add(embed * line.omega(t), line.values[t]);
    }
    void add(const LineSamples& line) {
        for (int t = 0; t < line.count(); ++t) add(line.omega(t), line.values[t]);
    }

    const std::vector<Sample>& samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }

private:
    std::vector<Sample> samples_;
    std::unordered_set<detail::OmegaKey, detail::OmegaKeyHash> keys_;
};

struct AmplitudeFit {
    std::vector<cplx> amplitudes;
    double residual = 0.0;
};

namespace detail {

inline Eigen::VectorXcd fourier_column(const Vec& location, const std::vector<Sample>& fit) {
    Eigen::VectorXcd col(static_cast<Eigen::Index>(fit.size()));
    for (std::size_t m = 0; m < fit.size(); ++m) col[static_cast<Eigen::Index>(m)] = std::polar(1.0, location.dot(fit[m].omega));
    return col;
}

inline Eigen::VectorXcd data_vector(const std::vector<Sample>& fit) {
    Eigen::VectorXcd y(static_cast<Eigen::Index>(fit.size()));
    for (std::size_t m = 0; m < fit.size(); ++m) y[static_cast<Eigen::Index>(m)] = fit[m].value;
    return y;
}

inline AmplitudeFit solve_fit(const Eigen::MatrixXcd& g, const Eigen::VectorXcd& y) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(g);
    qr.setThreshold(1e-10);
    if (qr.rank() < g.cols()) throw NumericalError("fit_amplitudes: rank-deficient Fourier matrix (coincident locations)");
    const Eigen::VectorXcd a = qr.solve(y);
    AmplitudeFit out;
    out.amplitudes.assign(a.data(), a.data() + a.size());
    out.residual = (g * a - y).norm();
    return out;
}

} // namespace detail

/// Least-squares amplitudes for fixed locations: minimizes |G a - Y|_2 with
/// G(m, j) = exp(i z_j . omega_m) over the given samples.
inline AmplitudeFit fit_amplitudes(const std::vector<Vec>& locations, const std::vector<Sample>& fit) {
    if (locations.empty()) throw std::invalid_argument("fit_amplitudes: no locations");
    if (fit.size() < locations.size()) throw std::invalid_argument("fit_amplitudes: fewer samples than locations");
    Eigen::MatrixXcd g(static_cast<Eigen::Index>(fit.size()), static_cast<Eigen::Index>(locations.size()));
    for (std::size_t j = 0; j < locations.size(); ++j) g.col(static_cast<Eigen::Index>(j)) = detail::fourier_column(locations[j], fit);
    return detail::solve_fit(g, detail::data_vector(fit));
}

inline AmplitudeFit fit_amplitudes(const std::vector<Vec>& locations, const Oracle& oracle,
                                   const std::vector<Vec>& omegas) {
    std::vector<Sample> fit;
    fit.reserve(omegas.size());
    for (const auto& w : omegas) fit.push_back({w, oracle.query(w)});
    return fit_amplitudes(locations, fit);
}

struct CandidateGrid {
    std::vector<Vec> points;                   // row-major over (j, p)
    std::vector<std::pair<int, int>> provenance; // (index in first projection, index in second)
    std::vector<bool> accepted;
    std::vector<double> gaps;                  // distance between the two closest points

    std::size_t index(int j, int p, int n) const { return static_cast<std::size_t>(j * n + p); }
};

/// Estimate recovered in one projection (a line for 2D data, a plane for 3D).
struct ProjectionEstimate {
    UnitVector direction;      // v; the estimate lives in v^perp
    int count = 0;             // detected source count in v^perp
    int order = 0;             // Hankel order used by the pencil (2D) / 0
    std::vector<Vec> points;   // recovered projected locations, ambient coordinates
    double separation = 0.0;   // min pairwise distance of `points`
    bool usable = false;       // passed the count gate and produced n points
};

struct RecoveryResult {
    std::vector<Vec> locations;
    std::vector<cplx> amplitudes;
    double residual = 0.0;
    UnitVector v1{1.0};
    UnitVector v2{1.0};
    double separation1 = 0.0;
    double separation2 = 0.0;
    std::vector<int> assignment; // location j pairs projection-1 index j with projection-2 index assignment[j]
    CandidateGrid candidates;
    std::vector<ProjectionEstimate> projections;
    std::size_t fit_size = 0;
    int detected = 0; // max count over the projections
};

namespace detail {

inline double separation_of(const std::vector<Vec>& pts) {
    return pts.size() < 2 ? std::numeric_limits<double>::infinity() : min_pairwise_distance(pts);
}

/// Candidate projection pairs. The first is the best-separated usable
/// projection (family order on ties) with the best-separated partner within
/// the correlation cap; then every other pair within the cap among the `pool`
/// best-separated usable projections, in order.
inline std::vector<std::pair<std::size_t, std::size_t>> pick_pairs(const std::vector<ProjectionEstimate>& proj,
                                                                   double cap, int pool) {
    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < proj.size(); ++i)
        if (proj[i].usable) usable.push_back(i);
    if (usable.size() < 2)
        throw InsufficientProjections(std::to_string(usable.size()) + " projection(s) passed the count gate");
    std::stable_sort(usable.begin(), usable.end(),
                     [&](std::size_t a, std::size_t b) { return proj[a].separation > proj[b].separation; });
    auto within_cap = [&](std::size_t a, std::size_t b) {
        return std::abs(proj[a].direction.dot(proj[b].direction.vec())) <= cap;
    };
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t k = 1; k < usable.size(); ++k)
        if (within_cap(usable[0], usable[k])) {
            pairs.emplace_back(usable[0], usable[k]);
            break;
        }
    if (pairs.empty()) throw InsufficientProjections("no second projection within the correlation cap");
    const std::size_t top = std::min(usable.size(), static_cast<std::size_t>(pool));
    for (std::size_t a = 0; a < top; ++a)
        for (std::size_t b = a + 1; b < top; ++b)
            if (within_cap(usable[a], usable[b]) && std::make_pair(usable[a], usable[b]) != pairs.front())
                pairs.emplace_back(usable[a], usable[b]);
    return pairs;
}

/// The primary pair: best separation, then the best second within the cap.
inline std::pair<std::size_t, std::size_t> pick_pair(const std::vector<ProjectionEstimate>& proj, double cap) {
    return pick_pairs(proj, cap, 1).front();
}

inline CandidateGrid build_candidates(const ProjectionEstimate& a, const ProjectionEstimate& b, bool gate) {
    const int n = static_cast<int>(a.points.size());
    const double limit = std::min(a.separation, b.separation);
    CandidateGrid grid;
    for (int j = 0; j < n; ++j) {
        for (int p = 0; p < n; ++p) {
            const auto cp = closest_points(Line{a.points[static_cast<std::size_t>(j)], a.direction},
                                           Line{b.points[static_cast<std::size_t>(p)], b.direction});
            grid.points.push_back((cp.on_first + cp.on_second) / 2.0);
            grid.provenance.emplace_back(j, p);
            grid.gaps.push_back(cp.distance);
            grid.accepted.push_back(!cp.parallel && (!gate || cp.distance < limit));
        }
    }
    return grid;
}

/// Exhaustive search over injective j -> p assignments restricted to accepted
/// candidates; lexicographic order, first minimum wins.
inline void enumerate_assignments(const CandidateGrid& grid, int n, const std::vector<Sample>& fit,
                                  RecoveryResult& out) {
    const Eigen::VectorXcd y = data_vector(fit);
    std::vector<Eigen::VectorXcd> columns(grid.points.size());
    for (std::size_t c = 0; c < grid.points.size(); ++c)
        if (grid.accepted[c]) columns[c] = fourier_column(grid.points[c], fit);

    for (int j = 0; j < n; ++j) {
        bool any = false;
        for (int p = 0; p < n; ++p) any = any || grid.accepted[grid.index(j, p, n)];
        if (!any) throw MatchingFailure("source " + std::to_string(j) + " has no accepted candidate", j);
    }

    double best = std::numeric_limits<double>::infinity();
    std::vector<int> current(static_cast<std::size_t>(n), -1), best_assignment;
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    AmplitudeFit best_fit;
    bool any_complete = false;
    Eigen::MatrixXcd g(y.size(), n);

    std::function<void(int)> visit = [&](int j) {
        if (j == n) {
            any_complete = true;
            for (int r = 0; r < n; ++r) g.col(r) = columns[grid.index(r, current[static_cast<std::size_t>(r)], n)];
            try {
                auto fit_result = solve_fit(g, y);
                if (fit_result.residual < best) {
                    best = fit_result.residual;
                    best_fit = std::move(fit_result);
                    best_assignment = current;
                }
            } catch (const NumericalError&) {
                // coincident candidates in this assignment; others may still work
            }
            return;
        }
        for (int p = 0; p < n; ++p) {
            if (used[static_cast<std::size_t>(p)] || !grid.accepted[grid.index(j, p, n)]) continue;
            used[static_cast<std::size_t>(p)] = true;
            current[static_cast<std::size_t>(j)] = p;
            visit(j + 1);
            used[static_cast<std::size_t>(p)] = false;
        }
    };
    visit(0);

    if (!any_complete) throw MatchingFailure("no injective assignment over accepted candidates", -1);
    if (best_assignment.empty()) throw NumericalError("every candidate assignment was rank deficient");
    out.assignment = best_assignment;
    out.amplitudes = best_fit.amplitudes;
    out.residual = best_fit.residual;
    out.locations.clear();
    for (int j = 0; j < n; ++j) out.locations.push_back(grid.points[grid.index(j, best_assignment[static_cast<std::size_t>(j)], n)]);
}

/// Match every candidate pair and keep the fit with the smallest residual
/// (earlier pair on ties). Rethrows the first pair's error if none matches.
inline void match_pairs(RecoveryResult& out, const std::vector<Sample>& fit, int n, bool gate, const RecoveryConfig& config) {
    const auto pairs = pick_pairs(out.projections, config.correlation_cap, config.pair_pool);
    std::exception_ptr first_error;
    bool matched = false;
    for (const auto& [i1, i2] : pairs) {
        const auto& a = out.projections[i1];
        const auto& b = out.projections[i2];
        RecoveryResult trial;
        trial.candidates = build_candidates(a, b, gate);
        try {
            enumerate_assignments(trial.candidates, n, fit, trial);
        } catch (const NumericalError&) {
            if (!first_error) first_error = std::current_exception();
            continue;
        }
        if (matched && !(trial.residual < out.residual)) continue;
        matched = true;
        out.locations = std::move(trial.locations);
        out.amplitudes = std::move(trial.amplitudes);
        out.residual = trial.residual;
        out.assignment = std::move(trial.assignment);
        out.candidates = std::move(trial.candidates);
        out.v1 = a.direction;
        out.v2 = b.direction;
        out.separation1 = a.separation;
        out.separation2 = b.separation;
    }
    if (!matched) std::rethrow_exception(first_error);
}

/// Planar recovery from precomputed per-direction sweeps.
inline RecoveryResult recover_planar(int n, const std::vector<PlanarSweep>& sweeps, const RecoveryConfig& config) {
    RecoveryResult out;
    SampleSet fit;
    for (const auto& ps : sweeps) {
        for (const auto& line : ps.sweep.samples) fit.add(line, ps.line.vec());
        out.detected = std::max(out.detected, ps.sweep.count);

        ProjectionEstimate est{ps.direction, ps.sweep.count, 0, {}, 0.0, false};
        if (ps.sweep.count == n) {
            const int order = ps.sweep.order_for(n).value_or(std::max(n, ps.sweep.order));
            if (order <= static_cast<int>(ps.sweep.samples.size())) {
                try {
                    const auto pencil = matrix_pencil(ps.sweep.samples[static_cast<std::size_t>(order - 1)], n);
                    for (double y : pencil.locations) est.points.push_back(y * ps.line.vec());
                    est.order = order;
                    est.separation = separation_of(est.points);
                    est.usable = est.separation > 0.0;
                } catch (const NumericalError&) {
                    est.usable = false;
                }
            }
        }
        out.projections.push_back(std::move(est));
    }

    out.fit_size = fit.size();
    match_pairs(out, fit.samples(), n, false, config);
    return out;
}

inline void check_source_count(int n, const RecoveryConfig& config) {
    if (n < 1) throw std::invalid_argument("recover: n must be >= 1");
    if (n > config.max_sources)
        throw std::invalid_argument("recover: n exceeds the exhaustive-enumeration limit of " +
                                    std::to_string(config.max_sources));
    if (n > config.s_max) throw std::invalid_argument("recover: s_max must be >= n");
}

} // namespace detail

/// Two-dimensional support recovery by projection onto lines v^perp,
/// Matrix Pencil on every line where exactly n sources are detected,
/// intersection of well-separated projection pairs, and an exhaustive
/// least-squares match over each n x n candidate grid.
inline RecoveryResult recover_2d(const Oracle& oracle, int n, double sigma, const RecoveryConfig& config = {}) {
    config.validate();
    detail::check_source_count(n, config);
    if (oracle.dimension() != 2) throw std::invalid_argument("recover_2d: oracle must be two-dimensional");
    return detail::recover_planar(n, sweep_directions_2d(oracle, sigma, config.N, config.s_max), config);
}

/// Three-dimensional support recovery: planar recovery inside every plane
/// v(p1, p2)^perp whose planar detection finds n sources, then back-projected
/// lines from well-separated plane pairs are paired by closest points.
/// A pair becomes a candidate only when its gap is below both separations.
inline RecoveryResult recover_3d(const Oracle& oracle, int n, double sigma, const RecoveryConfig& config = {},
                                 int plane_grid = 0) {
    config.validate();
    detail::check_source_count(n, config);
    if (oracle.dimension() != 3) throw std::invalid_argument("recover_3d: oracle must be three-dimensional");
    const auto family = family_3d(plane_grid > 0 ? plane_grid : config.N);

    RecoveryResult out;
    SampleSet fit;
    for (const auto& v : family.vectors) {
        const Eigen::MatrixXd basis = orthonormal_complement(v);
        const SubspaceOracle plane(oracle, basis);
        const auto sweeps = sweep_directions_2d(plane, sigma, config.N, config.s_max);
        int count = 0;
        for (const auto& ps : sweeps) {
            for (const auto& line : ps.sweep.samples) fit.add(line, basis * ps.line.vec());
            count = std::max(count, ps.sweep.count);
        }
        out.detected = std::max(out.detected, count);

        ProjectionEstimate est{v, count, 0, {}, 0.0, false};
        if (count == n) {
            try {
                const auto planar = detail::recover_planar(n, sweeps, config);
                for (const auto& p : planar.locations) est.points.push_back(basis * p);
                est.separation = detail::separation_of(est.points);
                est.usable = est.separation > 0.0;
            } catch (const NumericalError&) {
                est.usable = false;
            }
        }
        out.projections.push_back(std::move(est));
    }

    out.fit_size = fit.size();
    detail::match_pairs(out, fit.samples(), n, true, config);
    return out;
}

} // namespace superres
