#pragma once

#include <vector>

#include "logsob/mesh.hpp"

namespace logsob {

using ScalarField = Eigen::VectorXd;  // one value per vertex
using AmbientField = Eigen::MatrixXd; // V x N, one ambient vector per vertex

/// One cotangent-type edge of the Laplace-Beltrami stencil. For surfaces the
/// weight is (cot a + cot b)/2 over the two opposite angles; for curves 1/|e|.
struct LaplaceEdge {
    int i, j;
    double weight;
};

/// Per-vertex weighted least-squares quadric fit shared by the second
/// fundamental form and the scalar Hessian, so their difference carries a
/// common discretization bias.
struct FitStencil {
    std::vector<int> neighbors;
    // Maps neighbor values (v_j - v_i) to [a, b_1..b_n, Q_11, (Q_12,) Q_nn];
    // coordinate scaling is already folded in.
    Eigen::MatrixXd solve;
};

struct GeometryCache {
    const EmbeddedMesh* mesh = nullptr;
    int n = 0; // intrinsic dim
    int m = 0; // codimension

    // mixed-Voronoi vertex measure: integration weights and the pointwise
    // normalization of the Laplacian / mean curvature. Sums to total_measure.
    ScalarField dual_measure;
    // integral of the hat function (barycentric share): the consistent
    // normalization for the divergence pairing. Also sums to total_measure.
    ScalarField hat_measure;
    std::vector<Eigen::MatrixXd> tangent_basis; // per vertex, N x n orthonormal
    std::vector<Eigen::MatrixXd> normal_basis;  // per vertex, N x m orthonormal

    std::vector<LaplaceEdge> laplace_edges;
    ScalarField cell_measures;                 // per cell
    std::vector<Eigen::MatrixXd> cell_shape_gradients; // per cell, N x (n+1)
    // mixed-Voronoi share of each cell's measure assigned to each corner;
    // rows sum to the cell measure, columns to the dual measure
    Eigen::MatrixXd cell_vertex_share; // C x (n+1)

    AmbientField mean_curvature; // H_i = (Laplace-Beltrami of the coordinates)_i

    // second fundamental form: per vertex an N x (n(n+1)/2) matrix whose
    // columns are the ambient-valued entries [II_11, II_12, II_22] (n = 2)
    // or [II_11] (n = 1) in the tangent basis.
    std::vector<Eigen::MatrixXd> second_fundamental;

    std::vector<FitStencil> fit_stencils;

    // diagnostics, used to scale audit tolerances
    ScalarField ii_trace_defect; // |trace II_i - H_i| per vertex
    double max_frame_deviation = 0.0;
    double h_max = 0.0;
    double h_mean = 0.0;

    Eigen::Index num_vertices() const { return dual_measure.size(); }
    int sym_entries() const { return n * (n + 1) / 2; }
};

/// Builds dual measures, tangent/normal frames, cotangent edges, mean
/// curvature (Laplacian of the position coordinates) and the quadric-fit
/// second fundamental form. The mesh must outlive the cache.
GeometryCache build_geometry_cache(const EmbeddedMesh& mesh);

/// Per-vertex tangential gradient: measure-weighted average of the per-cell
/// affine gradients, projected onto the vertex tangent plane.
AmbientField gradient(const GeometryCache& cache, const ScalarField& f);

/// Adjoint of the per-cell gradient under the hat-measure pairing:
/// sum_i hat_i (div V)_i g_i = -sum_cells |c| <mean_c V^tan, grad g|_c>,
/// exactly, for every pair of fields.
ScalarField divergence(const GeometryCache& cache, const AmbientField& V);

/// Cotangent (n = 2) or second-difference (n = 1) Laplacian over the dual
/// measure; sign convention: applied to the coordinates it gives H, so on a
/// centered r-sphere H = -(n/r^2) x.
ScalarField laplace_beltrami(const GeometryCache& cache, const ScalarField& f);

AmbientField tangential_part(const GeometryCache& cache, const AmbientField& V);
AmbientField normal_part(const GeometryCache& cache, const AmbientField& V);

/// Quadric-fit Hessian in the tangent basis, one n x n symmetric matrix per
/// vertex, trace-corrected to match laplace_beltrami. raw_trace_defect, when
/// given, receives |Laplacian - trace of the raw fit| per vertex.
std::vector<Eigen::MatrixXd> hessian(const GeometryCache& cache, const ScalarField& u,
                                     ScalarField* raw_trace_defect = nullptr);

/// <II_i, y>: n x n matrix with entries <II_i(a,b), y>, y ambient.
Eigen::MatrixXd ii_contract(const GeometryCache& cache, Eigen::Index vertex,
                            const Eigen::VectorXd& y);

/// Cell-quadrature integral sum_c |c| <mean_c V^tan, grad f|_c>; the pairing
/// against which divergence is the exact adjoint.
double integrate_dot_grad(const GeometryCache& cache, const AmbientField& V, const ScalarField& f);

/// Weighted least-squares quadratic fit of samples (xi_j, value_j) around the
/// origin: value ~ a + b.xi + xi^T Q xi / 2. Returns [a, b, vech(Q)] like the
/// cache stencils. Exposed for direct testing on synthetic neighborhoods.
Eigen::VectorXd fit_quadric(const Eigen::MatrixXd& xi, const Eigen::VectorXd& values,
                            const Eigen::VectorXd& weights);

} // namespace logsob
