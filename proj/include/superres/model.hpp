#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <mutex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "geometry.hpp"
#include "random.hpp"

namespace superres {

using cplx = std::complex<double>;

/// mu = sum_j a_j delta_{y_j} in R^k.
struct DiscreteMeasure {
    int dimension = 1;
    std::vector<Vec> supports;
    std::vector<cplx> amplitudes;

    std::size_t size() const { return supports.size(); }

    /// Checks list lengths, coordinate dimensions and that no amplitude vanishes.
    void validate() const {
        if (dimension < 1) throw std::invalid_argument("DiscreteMeasure: dimension must be >= 1");
        if (supports.size() != amplitudes.size())
            throw std::invalid_argument("DiscreteMeasure: supports and amplitudes differ in length");
        for (const auto& y : supports)
            if (y.size() != dimension) throw std::invalid_argument("DiscreteMeasure: support has wrong dimension");
        for (const auto& a : amplitudes)
            if (!(std::abs(a) > 0.0)) throw std::invalid_argument("DiscreteMeasure: zero amplitude");
    }
};

/// Radius (n-1) pi / (2 Omega) of the ball the sources are assumed to live in.
inline double support_ball_radius(std::size_t n, double cutoff) {
    return (static_cast<double>(n) - 1.0) * std::numbers::pi / (2.0 * cutoff);
}

inline bool within_support_ball(const DiscreteMeasure& m, double cutoff) {
    const double r = support_ball_radius(m.size(), cutoff);
    for (const auto& y : m.supports)
        if (y.norm() > r) return false;
    return true;
}

inline double min_amplitude(const DiscreteMeasure& m) {
    if (m.amplitudes.empty()) throw std::invalid_argument("min_amplitude: empty measure");
    double best = std::abs(m.amplitudes.front());
    for (const auto& a : m.amplitudes) best = std::min(best, std::abs(a));
    return best;
}

inline double min_separation(const DiscreteMeasure& m) { return min_pairwise_distance(m.supports); }

/// F mu(omega) = sum_j a_j exp(i y_j . omega)
inline cplx fourier(const DiscreteMeasure& m, const Vec& omega) {
    if (omega.size() != m.dimension) throw std::invalid_argument("fourier: dimension mismatch");
    cplx sum{0.0, 0.0};
    for (std::size_t j = 0; j < m.size(); ++j) sum += m.amplitudes[j] * std::polar(1.0, m.supports[j].dot(omega));
    return sum;
}

/// Orthogonal projection of the measure into the coordinates of an orthonormal basis.
inline DiscreteMeasure project_measure(const DiscreteMeasure& m, const Eigen::MatrixXd& basis) {
    if (basis.rows() != m.dimension) throw std::invalid_argument("project_measure: basis dimension mismatch");
    DiscreteMeasure out{static_cast<int>(basis.cols()), {}, m.amplitudes};
    out.supports.reserve(m.size());
    for (const auto& y : m.supports) out.supports.push_back(basis.transpose() * y);
    return out;
}

/// Source of band-limited Fourier data Y(omega), |omega| <= Omega.
class Oracle {
public:
    virtual ~Oracle() = default;
    virtual int dimension() const = 0;
    virtual double cutoff() const = 0;
    virtual cplx query(const Vec& omega) const = 0;

protected:
    void check_query(const Vec& omega) const {
        if (omega.size() != dimension()) throw std::invalid_argument("oracle query: dimension mismatch");
        if (omega.norm() > cutoff() * (1.0 + 1e-12))
            throw std::invalid_argument("oracle query: |omega| exceeds the cutoff frequency");
    }
};

namespace detail {

// Bit-exact key of a frequency vector (k <= 3); -0.0 folds onto +0.0.
struct OmegaKey {
    std::array<std::uint64_t, 3> bits{};
    int dim = 0;
    bool operator==(const OmegaKey&) const = default;
};

inline OmegaKey make_key(const Vec& omega) {
    if (omega.size() > 3) throw std::invalid_argument("oracle: dimensions above 3 are not supported");
    OmegaKey key;
    key.dim = static_cast<int>(omega.size());
    for (Eigen::Index i = 0; i < omega.size(); ++i) {
        const double v = omega[i] == 0.0 ? 0.0 : omega[i];
        key.bits[static_cast<std::size_t>(i)] = std::bit_cast<std::uint64_t>(v);
    }
    return key;
}

struct OmegaKeyHash {
    std::size_t operator()(const OmegaKey& k) const {
        std::uint64_t h = static_cast<std::uint64_t>(k.dim);
        for (auto b : k.bits) h = mix64(h ^ b);
        return static_cast<std::size_t>(h);
    }
};

} // namespace detail

/// Deterministic noise field: realization of W at omega, given sigma.
using NoiseField = std::function<cplx(const Vec& omega)>;

/// Synthetic measurement Y = F mu + W with |W(omega)| < sigma everywhere.
///
/// W is a fixed function of (seed, omega): real and imaginary parts are
/// independent uniform on (-sigma/sqrt2, sigma/sqrt2), derived by hashing the
/// bit pattern of omega. Each draw is memoized, so repeated and concurrent
/// queries at one omega see one value. A caller-supplied field replaces the
/// random one (it must respect the same bound).
class MeasurementOracle final : public Oracle {
public:
    MeasurementOracle(DiscreteMeasure measure, double cutoff, double sigma, std::uint64_t seed,
                      NoiseField custom_noise = {})
        : measure_(std::move(measure)), cutoff_(cutoff), sigma_(sigma), seed_(seed),
          custom_noise_(std::move(custom_noise)) {
        measure_.validate();
        if (!(cutoff_ > 0.0)) throw std::invalid_argument("MeasurementOracle: cutoff must be positive");
        if (!(sigma_ >= 0.0)) throw std::invalid_argument("MeasurementOracle: sigma must be >= 0");
    }

    int dimension() const override { return measure_.dimension; }
    double cutoff() const override { return cutoff_; }
    double sigma() const { return sigma_; }
    std::uint64_t seed() const { return seed_; }
    const DiscreteMeasure& measure() const { return measure_; }

    cplx query(const Vec& omega) const override {
        check_query(omega);
        return fourier(measure_, omega) + noise(omega);
    }

    /// W(omega); memoized.
    cplx noise(const Vec& omega) const {
        const auto key = detail::make_key(omega);
        {
            std::lock_guard lock(mutex_);
            if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        }
        const cplx w = draw(key, omega);
        std::lock_guard lock(mutex_);
        // first insert wins; a racing thread computed the same value anyway
        return cache_.try_emplace(key, w).first->second;
    }

    std::size_t cached_draws() const {
        std::lock_guard lock(mutex_);
        return cache_.size();
    }

private:
    cplx draw(const detail::OmegaKey& key, const Vec& omega) const {
        if (sigma_ == 0.0) {
            if (custom_noise_ && custom_noise_(omega) != cplx{})
                throw std::invalid_argument("MeasurementOracle: nonzero noise field with sigma = 0");
            return {};
        }
        if (custom_noise_) {
            const cplx w = custom_noise_(omega);
            if (!(std::abs(w) < sigma_)) throw std::invalid_argument("MeasurementOracle: noise field exceeds sigma");
            return w;
        }
        std::uint64_t h = mix64(seed_);
        for (int i = 0; i < key.dim; ++i) h = mix64(h ^ key.bits[static_cast<std::size_t>(i)]);
        const double re = 2.0 * open_unit(mix64(h ^ 0x1ULL)) - 1.0;
        const double im = 2.0 * open_unit(mix64(h ^ 0x2ULL)) - 1.0;
        return cplx{re, im} * (sigma_ / std::numbers::sqrt2);
    }

    DiscreteMeasure measure_;
    double cutoff_;
    double sigma_;
    std::uint64_t seed_;
    NoiseField custom_noise_;
    mutable std::mutex mutex_;
    mutable std::unordered_map<detail::OmegaKey, cplx, detail::OmegaKeyHash> cache_;
};

/// View of a parent oracle on the subspace spanned by an orthonormal basis:
/// query(c) = parent.query(B c). Holds a reference; the parent must outlive it.
class SubspaceOracle final : public Oracle {
public:
    SubspaceOracle(const Oracle& parent, Eigen::MatrixXd basis) : parent_(parent), basis_(std::move(basis)) {
        if (basis_.rows() != parent_.dimension())
            throw std::invalid_argument("restrict_to_subspace: basis dimension mismatch");
        if (basis_.cols() < 1 || basis_.cols() > basis_.rows())
            throw std::invalid_argument("restrict_to_subspace: bad basis size");
        const Eigen::MatrixXd gram = basis_.transpose() * basis_;
        if ((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() > 1e-10)
            throw std::invalid_argument("restrict_to_subspace: basis is not orthonormal");
    }

    int dimension() const override { return static_cast<int>(basis_.cols()); }
    double cutoff() const override { return parent_.cutoff(); }
    cplx query(const Vec& coords) const override {
        if (coords.size() != dimension()) throw std::invalid_argument("oracle query: dimension mismatch");
        return parent_.query(embed(coords));
    }

    Vec embed(const Vec& coords) const { return basis_ * coords; }
    const Eigen::MatrixXd& basis() const { return basis_; }

private:
    const Oracle& parent_;
    Eigen::MatrixXd basis_;
};

inline SubspaceOracle restrict_to_subspace(const Oracle& parent, const Eigen::MatrixXd& basis) {
    return SubspaceOracle(parent, basis);
}

/// Recorded (omega, Y(omega)) pair.
struct Sample {
    Vec omega;
    cplx value;
};

/// Replays recorded samples. Frequencies are matched on a grid of
/// 1e-9 * Omega so values written as decimal text still resolve; any
/// other frequency is rejected.
class ReplayOracle final : public Oracle {
public:
    ReplayOracle(int dimension, double cutoff, const std::vector<Sample>& samples)
        : dimension_(dimension), cutoff_(cutoff), quantum_(cutoff * 1e-9) {
        if (dimension_ < 1 || dimension_ > 3) throw std::invalid_argument("ReplayOracle: dimension must be 1..3");
        if (!(cutoff_ > 0.0)) throw std::invalid_argument("ReplayOracle: cutoff must be positive");
        for (const auto& s : samples) {
            if (s.omega.size() != dimension_) throw std::invalid_argument("ReplayOracle: sample dimension mismatch");
            table_[quantize(s.omega)] = s.value;
        }
        samples_ = samples;
    }

    int dimension() const override { return dimension_; }
    double cutoff() const override { return cutoff_; }
    cplx query(const Vec& omega) const override {
        check_query(omega);
        const auto it = table_.find(quantize(omega));
        if (it == table_.end()) throw std::invalid_argument("ReplayOracle: no recorded sample at the queried frequency");
        return it->second;
    }

    const std::vector<Sample>& samples() const { return samples_; }

private:
    detail::OmegaKey quantize(const Vec& omega) const {
        detail::OmegaKey key;
        key.dim = static_cast<int>(omega.size());
        for (Eigen::Index i = 0; i < omega.size(); ++i)
            key.bits[static_cast<std::size_t>(i)] = static_cast<std::uint64_t>(std::llround(omega[i] / quantum_));
        return key;
    }

    int dimension_;
    double cutoff_;
    double quantum_;
    std::unordered_map<detail::OmegaKey, cplx, detail::OmegaKeyHash> table_;
    std::vector<Sample> samples_;
};

/// Pass-through oracle that keeps every distinct query in first-seen order.
class RecordingOracle final : public Oracle {
public:
    explicit RecordingOracle(const Oracle& inner) : inner_(inner) {}

    int dimension() const override { return inner_.dimension(); }
    double cutoff() const override { return inner_.cutoff(); }
    cplx query(const Vec& omega) const override {
        const cplx y = inner_.query(omega);
        std::lock_guard lock(mutex_);
        if (seen_.try_emplace(detail::make_key(omega), y).second) log_.push_back({omega, y});
        return y;
    }

    std::vector<Sample> samples() const {
        std::lock_guard lock(mutex_);
        return log_;
    }

private:
    const Oracle& inner_;
    mutable std::mutex mutex_;
    mutable std::unordered_map<detail::OmegaKey, cplx, detail::OmegaKeyHash> seen_;
    mutable std::vector<Sample> log_;
};

struct AdmissibilityOptions {
    /// Also require candidate supports inside the (n-1) pi / (2 Omega) ball.
    bool require_support_ball = false;
};

/// Finite-grid surrogate of sigma-admissibility: max |F(candidate) - Y| < sigma
/// over `omegas` (<= when sigma == 0).
inline bool is_admissible(const DiscreteMeasure& candidate, const Oracle& oracle, const std::vector<Vec>& omegas,
                          double sigma, AdmissibilityOptions options = {}) {
    if (omegas.empty()) throw std::invalid_argument("is_admissible: empty frequency grid");
    if (candidate.dimension != oracle.dimension()) throw std::invalid_argument("is_admissible: dimension mismatch");
    if (options.require_support_ball && !within_support_ball(candidate, oracle.cutoff())) return false;
    double worst = 0.0;
    for (const auto& w : omegas) worst = std::max(worst, std::abs(fourier(candidate, w) - oracle.query(w)));
    return sigma == 0.0 ? worst <= 0.0 : worst < sigma;
}

inline bool is_admissible(const DiscreteMeasure& candidate, const MeasurementOracle& oracle,
                          const std::vector<Vec>& omegas, AdmissibilityOptions options = {}) {
    return is_admissible(candidate, oracle, omegas, oracle.sigma(), options);
}

/// Harmonic number: sum_{j=1}^k 1/j, zero for k = 0.
inline double xi(int k) {
    if (k < 0) throw std::invalid_argument("xi: k must be >= 0");
    double sum = 0.0;
    for (int j = k; j >= 1; --j) sum += 1.0 / j;
    return sum;
}

/// Super-resolution factor pi / (Omega d_min).
inline double srf(double d_min, double cutoff) {
    if (!(d_min > 0.0) || !(cutoff > 0.0)) throw std::invalid_argument("srf: inputs must be positive");
    return std::numbers::pi / (cutoff * d_min);
}

inline double snr(double m_min, double sigma) {
    if (!(m_min > 0.0) || !(sigma > 0.0)) throw std::invalid_argument("snr: inputs must be positive");
    return m_min / sigma;
}

struct BoundReport {
    int n = 0;
    int dimension = 0;
    double cutoff = 0.0;
    double sigma = 0.0;
    double m_min = 0.0;
    double number_upper = 0.0;  // separation guaranteeing correct number detection
    double number_lower = 0.0;  // separation at which a counterexample exists
    double support_upper = 0.0; // separation guaranteeing stable support recovery
    double support_lower = 0.0;
    double support_error_constant = 0.0; // C(k, n)

    /// Support error bound C(k,n)/Omega * SRF^{2n-2} * sigma/m_min at separation d_min.
    double support_error_bound(double d_min) const {
        return support_error_constant / cutoff * std::pow(srf(d_min, cutoff), 2 * n - 2) * sigma / m_min;
    }
};

/// Resolution-limit bounds for n sources in dimension k (or subspace dimension s).
inline BoundReport bounds(int n, int k, double cutoff, double sigma, double m_min) {
    if (n < 2) throw std::invalid_argument("bounds: n must be >= 2");
    if (k < 1) throw std::invalid_argument("bounds: dimension must be >= 1");
    if (!(cutoff > 0.0)) throw std::invalid_argument("bounds: cutoff must be positive");
    if (!(sigma > 0.0) || !(sigma < m_min)) throw std::invalid_argument("bounds: need 0 < sigma < m_min");

    constexpr double pi = std::numbers::pi;
    constexpr double e = std::numbers::e;
    const double ratio = sigma / m_min;
    const double num_root = std::pow(ratio, 1.0 / (2.0 * n - 2.0));
    const double supp_root = std::pow(ratio, 1.0 / (2.0 * n - 1.0));
    const double pairs = n * (n - 1.0);
    const double grid_factor = (n + 2.0) * (n - 1.0) / 2.0;

    BoundReport r;
    r.n = n;
    r.dimension = k;
    r.cutoff = cutoff;
    r.sigma = sigma;
    r.m_min = m_min;
    r.number_upper =
        4.4 * pi * e * std::pow(pi / 2.0, k - 1) * std::pow(pairs / pi, xi(k - 1)) / cutoff * num_root;
    r.number_lower = 0.81 * std::exp(-1.5) / cutoff * num_root;
    r.support_upper =
        5.88 * pi * e * std::pow(4.0, k - 1) * std::pow(grid_factor, xi(k - 1)) / cutoff * supp_root;
    r.support_lower = 0.49 * std::exp(-1.5) / cutoff * supp_root;
    const double base = std::pow(4.0, k - 1) * std::pow(grid_factor, xi(k - 1));
    r.support_error_constant =
        std::pow(base, 2 * n - 1) * n * std::pow(2.0, 4 * n - 2) * std::exp(2.0 * n) / std::sqrt(pi);
    return r;
}

} // namespace superres
