#pragma once

#include <vector>

#include "logsob/geometry.hpp"

namespace logsob {

/// Symmetric sparse matrix in compressed row storage. Assembly verifies
/// symmetry; Laplacian-type matrices also carry zero row sums.
struct SparseSymMatrix {
    Eigen::Index dim = 0;
    std::vector<Eigen::Index> row_ptr;
    std::vector<Eigen::Index> col_idx;
    std::vector<double> values;
    bool symmetric = false;

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    Eigen::VectorXd diagonal() const;
    double max_abs() const;
};

struct Triplet {
    Eigen::Index row, col;
    double value;
};

/// Sums duplicate entries, sorts rows, and checks symmetry to 1e-12 relative.
SparseSymMatrix build_sparse(Eigen::Index dim, std::vector<Triplet> triplets);

/// Stiffness matrix for u -> div(f grad u) in the dual-measure pairing:
/// (L_f u)_i approximates w_i * div(f grad u)(x_i). Off-diagonals are the
/// cotangent edge weights times a local average of f; diagonal is minus the
/// row sum, so constants are in the kernel exactly. Negative semidefinite.
SparseSymMatrix assemble_weighted_laplacian(const GeometryCache& cache, const ScalarField& f);

struct SolveReport {
    int iterations = 0;
    double relative_residual = 0.0;
    bool kernel_projection_applied = false;
};

/// Preconditioned conjugate gradient for the singular system L u = rhs with
/// per-component constant kernel. Requires per-component mean-zero rhs
/// (cokernel compatibility); returns u with dual-measure-weighted mean zero
/// per component.
std::pair<ScalarField, SolveReport> solve_mean_zero(const SparseSymMatrix& L,
                                                    const ScalarField& rhs,
                                                    const GeometryCache& cache,
                                                    double tol = 1e-10,
                                                    int max_iterations = 0);

/// Smallest eigenvalue of a symmetric 1x1 or 2x2 matrix, in closed form.
double sym_eig_min(const Eigen::MatrixXd& M);

/// Determinant of a symmetric 1x1 or 2x2 matrix, in closed form.
double sym_det(const Eigen::MatrixXd& M);

} // namespace logsob
