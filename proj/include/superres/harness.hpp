#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "detection.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "model.hpp"
#include "random.hpp"
#include "recovery.hpp"

namespace superres {

enum class TrialMode { number, support };

inline const char* to_string(TrialMode m) { return m == TrialMode::number ? "number" : "support"; }

inline TrialMode parse_mode(const std::string& s) {
    if (s == "number") return TrialMode::number;
    if (s == "support") return TrialMode::support;
    throw std::invalid_argument("unknown mode '" + s + "' (expected number or support)");
}

/// |a_j| for random instances: constant m_min, or uniform in [m_min, m_max].
struct AmplitudeLaw {
    double m_min = 1.0;
    double m_max = 1.0;
};

struct TrialSpec {
    TrialMode mode = TrialMode::number;
    int dimension = 2;
    int n = 3;
    double cutoff = 1.0;
    double d_min = 0.5;
    double sigma = 1e-6;
    AmplitudeLaw amplitude;
    std::uint64_t seed = 0;
    int N = 12;        // directions per family
    int s_max = 8;
    int plane_grid = 0; // 3D family grid; 0 = N

    void validate() const {
        if (dimension < 1 || dimension > 3) throw std::invalid_argument("TrialSpec: dimension must be 1, 2 or 3");
        if (n < 2) throw std::invalid_argument("TrialSpec: n must be >= 2");
        if (!(cutoff > 0.0)) throw std::invalid_argument("TrialSpec: cutoff must be positive");
        if (!(d_min > 0.0)) throw std::invalid_argument("TrialSpec: d_min must be positive");
        if (!(sigma > 0.0)) throw std::invalid_argument("TrialSpec: sigma must be positive");
        if (!(amplitude.m_min > 0.0) || amplitude.m_max < amplitude.m_min)
            throw std::invalid_argument("TrialSpec: bad amplitude law");
        if (mode == TrialMode::support && dimension == 1)
            throw std::invalid_argument("TrialSpec: support trials need dimension 2 or 3");
    }
};

struct TrialRecord {
    TrialSpec spec;
    double log_srf = 0.0;       // log10(pi / (Omega d_min))
    double log_inv_sigma = 0.0; // log10(1 / sigma)
    bool success = false;
    int detected = 0;
    std::vector<double> errors; // e_j, support mode only
    double max_error = std::numeric_limits<double>::quiet_NaN();
    double wall_ms = 0.0;
    std::string failure;        // hard-failure message, if any
};

/// n points with minimum pairwise distance exactly d_min, clustered on the
/// d_min scale around the origin and inside the (n-1) pi / (2 Omega) ball,
/// with uniform random phases.
inline DiscreteMeasure random_instance(const TrialSpec& spec, int max_tries = 1000) {
    spec.validate();
    Rng rng(spec.seed);
    const int k = spec.dimension;
    const double ball = support_ball_radius(static_cast<std::size_t>(spec.n), spec.cutoff);
    const double radius = std::min(spec.n * spec.d_min / 2.0, ball);

    for (int attempt = 0; attempt < max_tries; ++attempt) {
        std::vector<Vec> pts;
        for (int j = 0; j < spec.n; ++j) {
            Vec p(k);
            do {
                for (int i = 0; i < k; ++i) p[i] = rng.uniform(-radius, radius);
            } while (p.norm() > radius);
            pts.push_back(p);
        }
        const double d = min_pairwise_distance(pts);
        if (d < 0.5 * spec.d_min) continue;
        Vec centroid = Vec::Zero(k);
        for (const auto& p : pts) centroid += p;
        centroid /= spec.n;
        const double scale = spec.d_min / d;
        double far = 0.0;
        for (auto& p : pts) {
            p = (p - centroid) * scale;
            far = std::max(far, p.norm());
        }
        if (far > ball) continue;

        DiscreteMeasure m;
        m.dimension = k;
        m.supports = std::move(pts);
        for (int j = 0; j < spec.n; ++j) {
            const double mag = spec.amplitude.m_max > spec.amplitude.m_min
                                   ? rng.uniform(spec.amplitude.m_min, spec.amplitude.m_max)
                                   : spec.amplitude.m_min;
            m.amplitudes.push_back(std::polar(mag, rng.uniform(0.0, 2.0 * std::numbers::pi)));
        }
        return m;
    }
    throw std::invalid_argument("random_instance: d_min too large for the support ball");
}

/// e_j = min_l |yhat_l - y_j| for every true source.
inline std::vector<double> support_errors(const std::vector<Vec>& truth, const std::vector<Vec>& estimate) {
    std::vector<double> e;
    for (const auto& y : truth) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& z : estimate) best = std::min(best, (z - y).norm());
        e.push_back(best);
    }
    return e;
}

/// Success iff every e_j is below a third of y_j's own nearest-neighbour distance.
inline bool support_success(const std::vector<Vec>& truth, const std::vector<double>& errors) {
    for (std::size_t j = 0; j < truth.size(); ++j) {
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < truth.size(); ++p)
            if (p != j) nearest = std::min(nearest, (truth[p] - truth[j]).norm());
        if (!(errors[j] < nearest / 3.0)) return false;
    }
    return true;
}

inline TrialRecord run_trial(const TrialSpec& spec) {
    const auto t0 = std::chrono::steady_clock::now();
    TrialRecord rec;
    rec.spec = spec;
    rec.log_srf = std::log10(srf(spec.d_min, spec.cutoff));
    rec.log_inv_sigma = -std::log10(spec.sigma);

    const DiscreteMeasure mu = random_instance(spec);
    const MeasurementOracle oracle(mu, spec.cutoff, spec.sigma, derive_seed(spec.seed, 0x6f7261636c65ULL));
    try {
        if (spec.mode == TrialMode::number) {
            DetectionConfig cfg{spec.sigma, spec.s_max, spec.N, spec.dimension};
            if (spec.dimension == 3 && spec.plane_grid > 0) {
                rec.detected = detect_3d(oracle, spec.sigma, spec.plane_grid, spec.s_max).count;
            } else {
                rec.detected = detect(oracle, cfg).count;
            }
            rec.success = rec.detected == spec.n;
        } else {
            RecoveryConfig cfg;
            cfg.N = spec.N;
            cfg.s_max = spec.s_max;
            const auto r = spec.dimension == 2 ? recover_2d(oracle, spec.n, spec.sigma, cfg)
                                               : recover_3d(oracle, spec.n, spec.sigma, cfg, spec.plane_grid);
            rec.detected = r.detected;
            rec.errors = support_errors(mu.supports, r.locations);
            rec.max_error = *std::max_element(rec.errors.begin(), rec.errors.end());
            rec.success = support_success(mu.supports, rec.errors);
        }
    } catch (const NumericalError& e) {
        rec.success = false;
        rec.failure = e.what();
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

/// Inclusive linear range lo..hi in `steps` points.
struct Axis {
    double lo = 0.0;
    double hi = 0.0;
    int steps = 1;

    double at(int i) const { return steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1); }
};

struct PhaseGrid {
    Axis log_srf{0.3, 1.2, 10};
    Axis log_inv_sigma{1.0, 12.0, 12};
};

struct PhaseConfig {
    TrialMode mode = TrialMode::number;
    int dimension = 2;
    int n = 3;
    double cutoff = 1.0;
    PhaseGrid grid;
    int trials = 20;           // per cell
    std::uint64_t seed = 0;
    int N = 12;
    int s_max = 8;
    int plane_grid = 0;
    AmplitudeLaw amplitude;
    unsigned threads = 1;
};

/// Logistic model P(success) = 1 / (1 + exp(-(b0 + b_srf x + b_sigma y))).
struct BoundaryFit {
    double intercept = 0.0;
    double b_srf = 0.0;
    double b_sigma = 0.0;
    double slope = std::numeric_limits<double>::quiet_NaN(); // d(log 1/sigma) / d(log SRF) on the boundary
    bool converged = false;
    int iterations = 0;
};

/// Logistic regression by iteratively reweighted least squares with a small
/// ridge on the two slopes (keeps separable data finite).
inline BoundaryFit fit_boundary(const std::vector<double>& x, const std::vector<double>& y,
                                const std::vector<bool>& success, double ridge = 1e-4, int max_iter = 100) {
    const auto m = static_cast<Eigen::Index>(x.size());
    if (y.size() != x.size() || success.size() != x.size()) throw std::invalid_argument("fit_boundary: size mismatch");
    BoundaryFit fit;
    if (m < 3) return fit;
    Eigen::MatrixXd a(m, 3);
    Eigen::VectorXd t(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        a(i, 0) = 1.0;
        a(i, 1) = x[static_cast<std::size_t>(i)];
        a(i, 2) = y[static_cast<std::size_t>(i)];
        t[i] = success[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
    }
    if (t.sum() == 0.0 || t.sum() == static_cast<double>(m)) return fit; // no boundary in the data

    Eigen::Vector3d beta = Eigen::Vector3d::Zero();
    Eigen::Matrix3d reg = Eigen::Matrix3d::Zero();
    reg(1, 1) = reg(2, 2) = ridge;
    for (int it = 1; it <= max_iter; ++it) {
        const Eigen::VectorXd eta = a * beta;
        Eigen::VectorXd p(m), w(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            p[i] = 1.0 / (1.0 + std::exp(-eta[i]));
            w[i] = std::max(p[i] * (1.0 - p[i]), 1e-12);
        }
        const Eigen::Matrix3d hess = a.transpose() * w.asDiagonal() * a + reg;
        const Eigen::Vector3d grad = a.transpose() * (t - p) - reg * beta;
        const Eigen::Vector3d step = hess.ldlt().solve(grad);
        beta += step;
        fit.iterations = it;
        if (!beta.allFinite()) break;
        if (step.norm() < 1e-10 * (1.0 + beta.norm())) {
            fit.converged = true;
            break;
        }
    }
    fit.intercept = beta[0];
    fit.b_srf = beta[1];
    fit.b_sigma = beta[2];
    if (beta.allFinite() && beta[2] != 0.0) fit.slope = -beta[1] / beta[2];
    return fit;
}

struct PhaseResult {
    std::vector<TrialRecord> records; // cell-major (SRF outer, sigma inner), then trial
    BoundaryFit boundary;
};

inline TrialSpec cell_spec(const PhaseConfig& cfg, int srf_index, int sigma_index, int trial) {
    const double log_srf = cfg.grid.log_srf.at(srf_index);
    const double log_inv_sigma = cfg.grid.log_inv_sigma.at(sigma_index);
    const auto cell = static_cast<std::uint64_t>(srf_index * cfg.grid.log_inv_sigma.steps + sigma_index);
    TrialSpec spec;
    spec.mode = cfg.mode;
    spec.dimension = cfg.dimension;
    spec.n = cfg.n;
    spec.cutoff = cfg.cutoff;
    spec.d_min = std::numbers::pi / (cfg.cutoff * std::pow(10.0, log_srf));
    spec.sigma = std::pow(10.0, -log_inv_sigma);
    spec.amplitude = cfg.amplitude;
    spec.seed = derive_seed(cfg.seed, cell, static_cast<std::uint64_t>(trial));
    spec.N = cfg.N;
    spec.s_max = cfg.s_max;
    spec.plane_grid = cfg.plane_grid;
    return spec;
}

inline PhaseResult phase_diagram(const PhaseConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("phase_diagram: trials must be >= 1");
    for (const Axis* ax : {&cfg.grid.log_srf, &cfg.grid.log_inv_sigma})
        if (ax->steps < 1 || !std::isfinite(ax->lo) || !std::isfinite(ax->hi))
            throw std::invalid_argument("phase_diagram: bad grid axis");

    const int ns = cfg.grid.log_srf.steps;
    const int nsig = cfg.grid.log_inv_sigma.steps;
    const std::size_t total = static_cast<std::size_t>(ns) * static_cast<std::size_t>(nsig) *
                              static_cast<std::size_t>(cfg.trials);
    std::vector<TrialSpec> specs;
    specs.reserve(total);
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < nsig; ++j)
            for (int t = 0; t < cfg.trials; ++t) specs.push_back(cell_spec(cfg, i, j, t));
    specs.front().validate();

    PhaseResult out;
    out.records.resize(total);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < total; i = next++) out.records[i] = run_trial(specs[i]);
    };
    const unsigned threads = std::max(1u, cfg.threads);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<double> x, y;
    std::vector<bool> s;
    for (const auto& r : out.records) {
        x.push_back(r.log_srf);
        y.push_back(r.log_inv_sigma);
        s.push_back(r.success);
    }
    out.boundary = fit_boundary(x, y, s);
    return out;
}

struct WitnessPair {
    TrialMode mode = TrialMode::number;
    DiscreteMeasure mu;
    DiscreteMeasure mu_hat;
    double tau = 0.0;
    double sigma = 0.0;
    double cutoff = 1.0;
    double sup = 0.0;          // max over the dense grid of |F(mu - mu_hat)|
    bool valid = false;        // sup < sigma
    bool admissible = false;   // mu_hat passes is_admissible against mu's measurement
    int search_steps = 0;
};

struct WitnessOptions {
    int dimension = 1;
    double tau_scale = 1.0;
    int grid_points = 10000;
    int search_budget = 2000;
    std::uint64_t seed = 0;
};

namespace detail {

inline double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

inline std::vector<Vec> axis_grid(int dimension, double cutoff, int points) {
    std::vector<Vec> out;
    out.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        Vec w = Vec::Zero(dimension);
        w[0] = points == 1 ? 0.0 : -cutoff + 2.0 * cutoff * i / (points - 1);
        out.push_back(w);
    }
    return out;
}

inline double grid_sup(const std::vector<double>& nodes, const std::vector<cplx>& a, const std::vector<Vec>& grid) {
    double sup = 0.0;
    for (const auto& w : grid) {
        cplx f{};
        for (std::size_t j = 0; j < nodes.size(); ++j) f += a[j] * std::polar(1.0, nodes[j] * w[0]);
        sup = std::max(sup, std::abs(f));
    }
    return sup;
}

} // namespace detail

/// Collinear pair mu, mu_hat (n vs n-1 sources for number mode, n vs n for
/// support mode) whose Fourier transforms agree to within sigma on the band.
/// Nodes are spaced tau apart on the first axis; gamma = mu - mu_hat carries
/// alternating binomial weights scaled so the smallest modulus is m_min.
inline WitnessPair witness(int n, double sigma, double m_min, double cutoff, TrialMode mode,
                           const WitnessOptions& opt = {}) {
    if (n < 2) throw std::invalid_argument("witness: n must be >= 2");
    if (!(sigma > 0.0) || !(sigma < m_min)) throw std::invalid_argument("witness: need 0 < sigma < m_min");
    if (!(cutoff > 0.0)) throw std::invalid_argument("witness: cutoff must be positive");
    if (opt.dimension < 1) throw std::invalid_argument("witness: dimension must be >= 1");
    if (opt.grid_points < 2) throw std::invalid_argument("witness: need at least 2 grid points");

    const double ratio = sigma / m_min;
    const bool number = mode == TrialMode::number;
    const int terms = number ? 2 * n - 1 : 2 * n;
    const double tau = opt.tau_scale * (number ? 0.81 : 0.49) * std::exp(-1.5) / cutoff *
                       std::pow(ratio, 1.0 / (terms - 1));

    std::vector<double> nodes;
    std::vector<cplx> gamma;
    for (int j = 1; j <= terms; ++j) {
        nodes.push_back(number ? (j - n) * tau : (j - n - 1) * tau);
        gamma.push_back(m_min * ((j % 2 == 0) ? 1.0 : -1.0) * detail::binomial(terms - 1, j - 1));
    }

    const auto grid = detail::axis_grid(opt.dimension, cutoff, opt.grid_points);
    double sup = detail::grid_sup(nodes, gamma, grid);
    int steps = 0;
    if (!(sup < sigma)) {
        // Random multiplicative perturbations keeping every |a_j| >= m_min.
        Rng rng(opt.seed);
        std::vector<cplx> best = gamma;
        double scale = 0.1;
        for (; steps < opt.search_budget && !(sup < sigma); ++steps) {
            std::vector<cplx> trial = best;
            for (auto& a : trial) {
                a *= std::polar(1.0 + scale * rng.uniform(-1.0, 1.0), scale * rng.uniform(-1.0, 1.0));
                if (std::abs(a) < m_min) a *= m_min / std::abs(a);
            }
            const double s = detail::grid_sup(nodes, trial, grid);
            if (s < sup) {
                sup = s;
                best = std::move(trial);
            } else if (steps % 100 == 99) {
                scale *= 0.5;
            }
        }
        gamma = std::move(best);
    }

    WitnessPair w;
    w.mode = mode;
    w.tau = tau;
    w.sigma = sigma;
    w.cutoff = cutoff;
    w.sup = sup;
    w.valid = sup < sigma;
    w.search_steps = steps;
    w.mu.dimension = w.mu_hat.dimension = opt.dimension;
    const int split = n; // first n nodes form mu
    for (int j = 0; j < terms; ++j) {
        Vec y = Vec::Zero(opt.dimension);
        y[0] = nodes[static_cast<std::size_t>(j)];
        if (j < split) {
            w.mu.supports.push_back(y);
            w.mu.amplitudes.push_back(gamma[static_cast<std::size_t>(j)]);
        } else {
            w.mu_hat.supports.push_back(y);
            w.mu_hat.amplitudes.push_back(-gamma[static_cast<std::size_t>(j)]);
        }
    }

    // W = 0 is one admissible noise realization of mu's measurement.
    const MeasurementOracle oracle(w.mu, cutoff, sigma, opt.seed, [](const Vec&) { return cplx{}; });
    w.admissible = is_admissible(w.mu_hat, oracle, grid);
    return w;
}

} // namespace superres
