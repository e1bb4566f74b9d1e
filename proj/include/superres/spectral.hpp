#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "model.hpp"

namespace superres {

/// 2s+1 equispaced samples of Y along a line through the origin,
/// at abscissae z_t = start + t * step, t = 0..2s.
struct LineSamples {
    UnitVector direction{1.0};
    int order = 0; // s
    double start = 0.0;
    double step = 0.0;
    Eigen::VectorXcd values;

    double abscissa(int t) const { return start + t * step; }
    Vec omega(int t) const { return abscissa(t) * direction.vec(); }
    int count() const { return static_cast<int>(values.size()); }
};

/// Samples z_t = -Omega + t Omega / s, t = 0..2s, along `direction`.
/// z_t is computed as Omega (t - s) / s so the grid is exactly symmetric
/// and hits 0 at the centre.
inline LineSamples sample_line(const Oracle& oracle, const UnitVector& direction, int s) {
    if (s < 1) throw std::invalid_argument("sample_line: s must be >= 1");
    if (direction.dimension() != oracle.dimension())
        throw std::invalid_argument("sample_line: direction dimension mismatch");
    const double cutoff = oracle.cutoff();
    LineSamples out;
    out.direction = direction;
    out.order = s;
    out.start = -cutoff;
    out.step = cutoff / s;
    out.values.resize(2 * s + 1);
    for (int t = 0; t <= 2 * s; ++t) {
        const double z = cutoff * (t - s) / s;
        out.values[t] = oracle.query(z * direction.vec());
    }
    return out;
}

inline LineSamples sample_line(const Oracle& oracle, int s) {
    if (oracle.dimension() != 1) throw std::invalid_argument("sample_line: direction required for k > 1");
    return sample_line(oracle, UnitVector{1.0}, s);
}

struct HankelMatrix {
    int order = 0;
    Eigen::MatrixXcd entries; // (s+1) x (s+1), entries(i, j) = values[i + j]
};

inline HankelMatrix build_hankel(const LineSamples& samples) {
    const int s = samples.order;
    if (samples.count() != 2 * s + 1) throw std::invalid_argument("build_hankel: expected 2s+1 samples");
    HankelMatrix h{s, Eigen::MatrixXcd(s + 1, s + 1)};
    for (int i = 0; i <= s; ++i)
        for (int j = 0; j <= s; ++j) h.entries(i, j) = samples.values[i + j];
    return h;
}

/// Values below this fraction of the leading singular value are reported as 0.
inline constexpr double kSingularClamp = 1e-14;

/// Singular values of a complex matrix in decreasing order.
inline std::vector<double> singular_values(const Eigen::MatrixXcd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const Eigen::VectorXd sv = svd.singularValues();
    std::vector<double> out(sv.data(), sv.data() + sv.size());
    for (double v : out)
        if (!std::isfinite(v)) throw NumericalError("singular_values: SVD produced non-finite values");
    std::sort(out.begin(), out.end(), std::greater<>());
    if (!out.empty()) {
        const double floor = kSingularClamp * out.front();
        for (double& v : out)
            if (v < floor) v = 0.0;
    }
    return out;
}

inline std::vector<double> singular_values(const HankelMatrix& h) { return singular_values(h.entries); }

/// Stride used to pick 2s+1 equispaced entries out of M: floor((M-1) / (2s)).
inline int subsample_stride(int m, int s) {
    if (s < 1) throw std::invalid_argument("subsample: s must be >= 1");
    if (m < 2 * s + 1) throw std::invalid_argument("subsample: need at least 2s+1 samples");
    return (m - 1) / (2 * s);
}

/// Entries 0, q, 2q, ..., 2sq of M equispaced values, q = floor((M-1)/(2s)).
inline Eigen::VectorXcd subsample(const Eigen::VectorXcd& values, int s) {
    const int q = subsample_stride(static_cast<int>(values.size()), s);
    Eigen::VectorXcd out(2 * s + 1);
    for (int t = 0; t <= 2 * s; ++t) out[t] = values[t * q];
    return out;
}

/// Order-s view of a longer equispaced line record (start and step carried along).
inline LineSamples subsample(const LineSamples& full, int s) {
    const int q = subsample_stride(full.count(), s);
    LineSamples out;
    out.direction = full.direction;
    out.order = s;
    out.start = full.start;
    out.step = full.step * q;
    out.values = subsample(full.values, s);
    return out;
}

/// Arranges 1D recorded samples into an equispaced line record.
/// Rejects unsorted-after-sorting gaps that differ by more than 1e-6 of the step.
inline LineSamples line_from_samples(std::vector<Sample> samples) {
    if (samples.size() < 3) throw std::invalid_argument("line_from_samples: need at least 3 samples");
    for (const auto& s : samples)
        if (s.omega.size() != 1) throw std::invalid_argument("line_from_samples: samples must be one-dimensional");
    std::sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) { return a.omega[0] < b.omega[0]; });
    const auto m = static_cast<int>(samples.size());
    const double start = samples.front().omega[0];
    const double step = (samples.back().omega[0] - start) / (m - 1);
    if (!(step > 0.0)) throw std::invalid_argument("line_from_samples: degenerate frequency range");
    for (int t = 0; t < m; ++t)
        if (std::abs(samples[static_cast<std::size_t>(t)].omega[0] - (start + t * step)) > 1e-6 * step)
            throw std::invalid_argument("line_from_samples: samples are not equally spaced");
    LineSamples out;
    out.order = (m - 1) / 2;
    out.start = start;
    out.step = step;
    out.values.resize(m);
    for (int t = 0; t < m; ++t) out.values[t] = samples[static_cast<std::size_t>(t)].value;
    return out;
}

} // namespace superres
