#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "spectral.hpp"

namespace superres {

struct PencilResult {
    std::vector<double> locations;    // sorted increasing
    std::vector<cplx> eigenvalues;    // same order as locations
    double smallest_kept_singular = 0.0;
    double max_unimodularity_deviation = 0.0; // max | |z_j| - 1 |
    bool ill_conditioned = false;     // reduced H_u numerically singular
};

/// Relative singular-value floor below which the reduced H_u is treated as singular.
inline constexpr double kPencilConditionFloor = 1e-12;

/// Matrix Pencil estimate of n line locations from order-s samples.
///
/// H_u and H_l are the first and last s rows of the (s+1) x (s+1) Hankel
/// matrix. Both are truncated to rank n, the pencil is reduced to
/// U2* U1 S1 V1* V2 (for H_u) and S2 (for H_l), and the generalized
/// eigenvalues z of (H_l - z H_u) give the locations angle(z) / step,
/// with angle in (-pi, pi]. Locations beyond pi / step wrap around.
inline PencilResult matrix_pencil(const LineSamples& samples, int n) {
    const int s = samples.order;
    if (n < 1) throw std::invalid_argument("matrix_pencil: n must be >= 1");
    if (n > s) throw std::invalid_argument("matrix_pencil: n must not exceed s");
    const HankelMatrix h = build_hankel(samples);
    const Eigen::MatrixXcd upper = h.entries.topRows(s);
    const Eigen::MatrixXcd lower = h.entries.bottomRows(s);

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd_u(upper, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd_l(lower, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::MatrixXcd u1 = svd_u.matrixU().leftCols(n);
    const Eigen::MatrixXcd v1 = svd_u.matrixV().leftCols(n);
    const Eigen::VectorXd s1 = svd_u.singularValues().head(n);
    const Eigen::MatrixXcd u2 = svd_l.matrixU().leftCols(n);
    const Eigen::MatrixXcd v2 = svd_l.matrixV().leftCols(n);
    const Eigen::VectorXd s2 = svd_l.singularValues().head(n);
    if (!s1.allFinite() || !s2.allFinite()) throw NumericalError("matrix_pencil: SVD failed");

    const Eigen::MatrixXcd reduced_u = u2.adjoint() * u1 * s1.cast<cplx>().asDiagonal() * v1.adjoint() * v2;

    PencilResult out;
    out.smallest_kept_singular = std::min(s1.minCoeff(), s2.minCoeff());

    const Eigen::VectorXd ru_sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(reduced_u).singularValues();
    out.ill_conditioned = !(ru_sv.minCoeff() >= kPencilConditionFloor * ru_sv.maxCoeff()) || ru_sv.maxCoeff() == 0.0;

    Eigen::VectorXcd z(n);
    if (!out.ill_conditioned) {
        // H_l x = z H_u x  <=>  (H_u^{-1} H_l) x = z x
        const Eigen::MatrixXcd m = reduced_u.partialPivLu().solve(Eigen::MatrixXcd(s2.cast<cplx>().asDiagonal()));
        z = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(m, false).eigenvalues();
    } else {
        // Same pencil with the roles swapped: S2^{-1} H_u x = (1/z) x.
        if (!(s2.minCoeff() > kPencilConditionFloor * s2.maxCoeff()))
            throw NumericalError("matrix_pencil: both reduced pencil matrices are singular");
        const Eigen::MatrixXcd m = s2.cwiseInverse().cast<cplx>().asDiagonal() * reduced_u;
        const Eigen::VectorXcd mu = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(m, false).eigenvalues();
        for (int j = 0; j < n; ++j) {
            // an eigenvalue at 0 is an infinite z; keep its direction, flag via the radius
            z[j] = std::abs(mu[j]) > 0.0 ? cplx{1.0, 0.0} / mu[j] : cplx{std::numeric_limits<double>::infinity(), 0.0};
        }
    }
    if (!z.allFinite() && !out.ill_conditioned) throw NumericalError("matrix_pencil: eigen solver failed");

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> loc(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) loc[static_cast<std::size_t>(j)] = std::arg(z[j]) / samples.step;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return loc[static_cast<std::size_t>(a)] < loc[static_cast<std::size_t>(b)]; });
    for (int j : order) {
        out.locations.push_back(loc[static_cast<std::size_t>(j)]);
        out.eigenvalues.push_back(z[j]);
        out.max_unimodularity_deviation = std::max(out.max_unimodularity_deviation, std::abs(std::abs(z[j]) - 1.0));
    }
    return out;
}

} // namespace superres
