#pragma once

#include <cmath>
#include <functional>
#include <numbers>

#include "logsob/geometry.hpp"
#include "logsob/shapes.hpp"
#include "logsob/sparse.hpp"

namespace logsob::test {

inline constexpr double kPi = std::numbers::pi;

inline EmbeddedMesh circle_mesh(double r, int resolution) {
    ShapeSpec spec;
    spec.kind = ShapeKind::Circle;
    spec.radius = r;
    spec.resolution = resolution;
    return generate_shape(spec);
}

inline EmbeddedMesh sphere_mesh(double r, int resolution) {
    ShapeSpec spec;
    spec.kind = ShapeKind::Sphere2;
    spec.radius = r;
    spec.resolution = resolution;
    return generate_shape(spec);
}

inline EmbeddedMesh clifford_mesh(double r1, double r2, int resolution) {
    ShapeSpec spec;
    spec.kind = ShapeKind::CliffordTorus4;
    spec.radius = r1;
    spec.radius2 = r2;
    spec.resolution = resolution;
    return generate_shape(spec);
}

inline EmbeddedMesh torus_mesh(double major, double minor, int resolution) {
    ShapeSpec spec;
    spec.kind = ShapeKind::Torus3;
    spec.radius = major;
    spec.radius2 = minor;
    spec.resolution = resolution;
    return generate_shape(spec);
}

/// Composite Simpson quadrature over [0, 2pi); the independent oracle for
/// smooth circle integrands.
inline double simpson_periodic(const std::function<double(double)>& f, int intervals = 200000) {
    const double h = 2.0 * kPi / intervals;
    double sum = 0.0;
    for (int k = 0; k < intervals; ++k) {
        const double a = k * h;
        sum += f(a) + 4.0 * f(a + 0.5 * h) + f(a + h);
    }
    return sum * h / 6.0;
}

/// Dense copy for small-matrix spectral oracles.
inline Eigen::MatrixXd to_dense(const SparseSymMatrix& A) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(A.dim, A.dim);
    for (Eigen::Index i = 0; i < A.dim; ++i)
        for (Eigen::Index k = A.row_ptr[static_cast<std::size_t>(i)];
             k < A.row_ptr[static_cast<std::size_t>(i) + 1]; ++k)
            M(i, A.col_idx[static_cast<std::size_t>(k)]) = A.values[static_cast<std::size_t>(k)];
    return M;
}

/// Weighted root-mean-square of a per-vertex field norm.
inline double weighted_rms(const GeometryCache& cache, const ScalarField& field) {
    double acc = 0.0, total = 0.0;
    for (Eigen::Index i = 0; i < field.size(); ++i) {
        acc += cache.dual_measure(i) * field(i) * field(i);
        total += cache.dual_measure(i);
    }
    return std::sqrt(acc / total);
}

inline double weighted_rms_rows(const GeometryCache& cache, const AmbientField& field) {
    double acc = 0.0, total = 0.0;
    for (Eigen::Index i = 0; i < field.rows(); ++i) {
        acc += cache.dual_measure(i) * field.row(i).squaredNorm();
        total += cache.dual_measure(i);
    }
    return std::sqrt(acc / total);
}

} // namespace logsob::test
