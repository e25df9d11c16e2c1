#include "logsob/sparse.hpp"

#include <algorithm>
#include <cmath>

namespace logsob {

Eigen::VectorXd SparseSymMatrix::apply(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        double acc = 0.0;
        for (Eigen::Index k = row_ptr[static_cast<std::size_t>(i)];
             k < row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
            acc += values[static_cast<std::size_t>(k)] * x(col_idx[static_cast<std::size_t>(k)]);
        }
        y(i) = acc;
    }
    return y;
}

Eigen::VectorXd SparseSymMatrix::diagonal() const {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index k = row_ptr[static_cast<std::size_t>(i)];
             k < row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
            if (col_idx[static_cast<std::size_t>(k)] == i) d(i) = values[static_cast<std::size_t>(k)];
        }
    }
    return d;
}

double SparseSymMatrix::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

namespace {

double entry_at(const SparseSymMatrix& A, Eigen::Index i, Eigen::Index j) {
    const auto begin = A.col_idx.begin() + A.row_ptr[static_cast<std::size_t>(i)];
    const auto end = A.col_idx.begin() + A.row_ptr[static_cast<std::size_t>(i) + 1];
    const auto it = std::lower_bound(begin, end, j);
    if (it == end || *it != j) return 0.0;
    return A.values[static_cast<std::size_t>(it - A.col_idx.begin())];
}

} // namespace

SparseSymMatrix build_sparse(Eigen::Index dim, std::vector<Triplet> triplets) {
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    SparseSymMatrix A;
    A.dim = dim;
    A.row_ptr.assign(static_cast<std::size_t>(dim) + 1, 0);
    for (std::size_t k = 0; k < triplets.size();) {
        std::size_t k2 = k;
        double sum = 0.0;
        while (k2 < triplets.size() && triplets[k2].row == triplets[k].row &&
               triplets[k2].col == triplets[k].col) {
            sum += triplets[k2].value;
            ++k2;
        }
        if (triplets[k].row < 0 || triplets[k].row >= dim || triplets[k].col < 0 ||
            triplets[k].col >= dim)
            throw Error(ErrorCode::IndexOutOfRange, "sparse entry out of range");
        A.col_idx.push_back(triplets[k].col);
        A.values.push_back(sum);
        ++A.row_ptr[static_cast<std::size_t>(triplets[k].row) + 1];
        k = k2;
    }
    for (std::size_t i = 0; i < static_cast<std::size_t>(dim); ++i) A.row_ptr[i + 1] += A.row_ptr[i];

    const double scale = A.max_abs();
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index k = A.row_ptr[static_cast<std::size_t>(i)];
             k < A.row_ptr[static_cast<std::size_t>(i) + 1]; ++k) {
            const Eigen::Index j = A.col_idx[static_cast<std::size_t>(k)];
            if (std::abs(A.values[static_cast<std::size_t>(k)] - entry_at(A, j, i)) >
                1e-12 * std::max(scale, 1.0))
                throw Error(ErrorCode::InvalidConfig, "matrix is not symmetric");
        }
    }
    A.symmetric = true;
    return A;
}

SparseSymMatrix assemble_weighted_laplacian(const GeometryCache& cache, const ScalarField& f) {
    if ((f.array() <= 0.0).any())
        throw Error(ErrorCode::NonpositiveDensity, "weighted Laplacian needs f > 0");
    std::vector<Triplet> triplets;
    triplets.reserve(cache.laplace_edges.size() * 4);
    for (const auto& e : cache.laplace_edges) {
        const double v = e.weight * 0.5 * (f(e.i) + f(e.j));
        triplets.push_back({e.i, e.j, v});
        triplets.push_back({e.j, e.i, v});
        triplets.push_back({e.i, e.i, -v});
        triplets.push_back({e.j, e.j, -v});
    }
    return build_sparse(cache.num_vertices(), std::move(triplets));
}

namespace {

// mean over each connected component, removed from kernel directions
void project_component_mean(Eigen::VectorXd& v, const std::vector<int>& labels, int ncomp) {
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(ncomp);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(ncomp);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        sums(labels[static_cast<std::size_t>(i)]) += v(i);
        counts(labels[static_cast<std::size_t>(i)]) += 1.0;
    }
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v(i) -= sums(labels[static_cast<std::size_t>(i)]) / counts(labels[static_cast<std::size_t>(i)]);
}

} // namespace

std::pair<ScalarField, SolveReport> solve_mean_zero(const SparseSymMatrix& L,
                                                    const ScalarField& rhs,
                                                    const GeometryCache& cache,
                                                    double tol, int max_iterations) {
    const Eigen::Index nv = L.dim;
    const auto& labels = cache.mesh->component_labels;
    const int ncomp = cache.mesh->num_components;

    // cokernel compatibility: per-component sums must vanish
    Eigen::VectorXd comp_sum = Eigen::VectorXd::Zero(ncomp);
    for (Eigen::Index i = 0; i < nv; ++i) comp_sum(labels[static_cast<std::size_t>(i)]) += rhs(i);
    const double l1 = rhs.lpNorm<1>();
    for (int c = 0; c < ncomp; ++c) {
        if (std::abs(comp_sum(c)) > 1e-10 * std::max(l1, 1e-300))
            throw Error(ErrorCode::IncompatibleRhs,
                        "rhs sum over component " + std::to_string(c) + " is " +
                            std::to_string(comp_sum(c)));
    }

    SolveReport report;
    report.kernel_projection_applied = true;

    // solve the positive-semidefinite system (-L) u = (-rhs)
    Eigen::VectorXd b = -rhs;
    project_component_mean(b, labels, ncomp); // make compatibility exact
    const double bnorm = b.norm();
    ScalarField u = ScalarField::Zero(nv);
    if (bnorm == 0.0) return {u, report};

    Eigen::VectorXd diag = (-1.0) * L.diagonal();
    for (Eigen::Index i = 0; i < nv; ++i)
        if (diag(i) <= 0.0) diag(i) = 1.0;

    const int cap = max_iterations > 0 ? max_iterations : 20 * static_cast<int>(nv);
    Eigen::VectorXd r = b; // x0 = 0
    Eigen::VectorXd z = r.cwiseQuotient(diag);
    project_component_mean(z, labels, ncomp);
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    double rnorm = r.norm();

    int it = 0;
    while (rnorm > tol * bnorm && it < cap) {
        Eigen::VectorXd q = (-1.0) * L.apply(p);
        const double pq = p.dot(q);
        if (pq <= 0.0) break; // kernel leak; the projection below restores it
        const double alpha = rz / pq;
        u += alpha * p;
        r -= alpha * q;
        project_component_mean(r, labels, ncomp);
        z = r.cwiseQuotient(diag);
        project_component_mean(z, labels, ncomp);
        const double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
        rnorm = r.norm();
        ++it;
    }
    report.iterations = it;
    report.relative_residual = rnorm / bnorm;
    if (rnorm > tol * bnorm)
        throw Error(ErrorCode::NoConvergence,
                    "CG stalled at relative residual " + std::to_string(rnorm / bnorm));

    // dual-measure-weighted mean zero per component
    Eigen::VectorXd wsum = Eigen::VectorXd::Zero(ncomp), wu = Eigen::VectorXd::Zero(ncomp);
    for (Eigen::Index i = 0; i < nv; ++i) {
        wsum(labels[static_cast<std::size_t>(i)]) += cache.dual_measure(i);
        wu(labels[static_cast<std::size_t>(i)]) += cache.dual_measure(i) * u(i);
    }
    for (Eigen::Index i = 0; i < nv; ++i)
        u(i) -= wu(labels[static_cast<std::size_t>(i)]) / wsum(labels[static_cast<std::size_t>(i)]);
    return {u, report};
}

double sym_eig_min(const Eigen::MatrixXd& M) {
    if (M.rows() == 1) return M(0, 0);
    const double a = M(0, 0), b = M(0, 1), c = M(1, 1);
    return 0.5 * (a + c) - std::sqrt(0.25 * (a - c) * (a - c) + b * b);
}

double sym_det(const Eigen::MatrixXd& M) {
    if (M.rows() == 1) return M(0, 0);
    return M(0, 0) * M(1, 1) - M(0, 1) * M(0, 1);
}

} // namespace logsob
