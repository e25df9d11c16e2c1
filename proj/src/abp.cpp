#include "logsob/abp.hpp"

#include <cmath>
#include <numbers>

#include "logsob/rng.hpp"

namespace logsob {

namespace {

constexpr double kPi = std::numbers::pi;

NormalBundleSample make_sample(const AbpState& state, const GeometryCache& cache, Eigen::Index i,
                               const Eigen::VectorXd& y, double psd_tol) {
    NormalBundleSample s;
    s.vertex = i;
    s.y = y;
    s.matrix = state.hess_potential[static_cast<std::size_t>(i)] - ii_contract(cache, i, y);
    s.min_eig = sym_eig_min(s.matrix);
    s.det = sym_det(s.matrix);
    s.psd_eps = psd_tol * (1.0 + s.matrix.cwiseAbs().maxCoeff());
    s.member = s.min_eig >= -s.psd_eps;
    s.phi = state.grad_potential.row(i).transpose() + y;
    return s;
}

} // namespace

AbpState prepare_abp(const GeometryCache& cache, const ScalarField& f, double solve_tol) {
    if (cache.mesh->num_components != 1)
        throw Error(ErrorCode::DisconnectedInput,
                    "the transport construction needs a connected mesh; split per component");
    for (Eigen::Index i = 0; i < f.size(); ++i)
        if (!(f(i) > 0.0))
            throw Error(ErrorCode::NonpositiveDensity, "density must be positive");

    AbpState state;
    state.cache = &cache;

    const double mass = cache.dual_measure.dot(f);
    state.density = f / mass;

    state.grad_density = gradient(cache, state.density);
    ScalarField pointwise(cache.num_vertices());
    for (Eigen::Index i = 0; i < cache.num_vertices(); ++i) {
        const double fi = state.density(i);
        const double wi = cache.dual_measure(i);
        const double hi_sq = cache.mean_curvature.row(i).squaredNorm();
        const double fisher_i = state.grad_density.row(i).squaredNorm() / fi;
        state.entropy0 += wi * fi * std::log(fi);
        state.fisher += wi * fisher_i;
        state.curvature += wi * fi * hi_sq;
        pointwise(i) = fi * std::log(fi) - fisher_i - fi * hi_sq;
    }
    state.alpha = -(state.entropy0 - state.fisher - state.curvature);

    ScalarField rhs(cache.num_vertices());
    for (Eigen::Index i = 0; i < cache.num_vertices(); ++i)
        rhs(i) = cache.dual_measure(i) * (pointwise(i) + state.alpha * state.density(i));

    const SparseSymMatrix L = assemble_weighted_laplacian(cache, state.density);
    auto [u, report] = solve_mean_zero(L, rhs, cache, solve_tol);
    state.potential = std::move(u);
    state.solve_report = report;

    state.grad_potential = gradient(cache, state.potential);
    state.laplacian_potential = laplace_beltrami(cache, state.potential);
    state.hess_potential = hessian(cache, state.potential, &state.hess_trace_defect);

    state.pde_residual.resize(cache.num_vertices());
    for (Eigen::Index i = 0; i < cache.num_vertices(); ++i) {
        const double fi = state.density(i);
        const double lhs = state.laplacian_potential(i) +
                           state.grad_density.row(i).dot(state.grad_potential.row(i)) / fi;
        const double rhs_pt = std::log(fi) -
                              state.grad_density.row(i).squaredNorm() / (fi * fi) -
                              cache.mean_curvature.row(i).squaredNorm() + state.alpha;
        state.pde_residual(i) = lhs - rhs_pt;
    }
    return state;
}

std::vector<NormalBundleSample> sample_A(const AbpState& state, const GeometryCache& cache,
                                         const SampleStrategy& strategy) {
    const int m = cache.m;
    std::vector<NormalBundleSample> samples;
    std::vector<Eigen::Index> verts;
    for (Eigen::Index i = 0; i < cache.num_vertices(); i += std::max(strategy.vertex_stride, 1))
        verts.push_back(i);

    if (strategy.kind == SampleStrategy::Kind::Grid) {
        const int p = strategy.grid_points;
        samples.reserve(verts.size() * static_cast<std::size_t>(std::pow(p, m)));
        for (Eigen::Index i : verts) {
            const auto& Nb = cache.normal_basis[static_cast<std::size_t>(i)];
            const Eigen::VectorXd h_coords =
                Nb.transpose() * cache.mean_curvature.row(i).transpose();
            Eigen::VectorXd z(m);
            std::vector<int> idx(static_cast<std::size_t>(m), 0);
            while (true) {
                for (int d = 0; d < m; ++d)
                    z(d) = -strategy.cap +
                           2.0 * strategy.cap * (idx[static_cast<std::size_t>(d)] + 0.5) / p;
                const Eigen::VectorXd y = Nb * (z - 2.0 * h_coords);
                samples.push_back(make_sample(state, cache, i, y, strategy.psd_tol));
                int d = 0;
                while (d < m && ++idx[static_cast<std::size_t>(d)] == p) {
                    idx[static_cast<std::size_t>(d)] = 0;
                    ++d;
                }
                if (d == m) break;
            }
        }
    } else {
        Rng rng(strategy.seed);
        const int per_vertex =
            std::max(1, static_cast<int>((strategy.count + static_cast<int>(verts.size()) - 1) /
                                         static_cast<int>(verts.size())));
        samples.reserve(verts.size() * static_cast<std::size_t>(per_vertex));
        for (Eigen::Index i : verts) {
            const auto& Nb = cache.normal_basis[static_cast<std::size_t>(i)];
            const Eigen::VectorXd two_h = 2.0 * cache.mean_curvature.row(i).transpose();
            for (int k = 0; k < per_vertex; ++k) {
                Eigen::VectorXd c(m);
                for (int d = 0; d < m; ++d) c(d) = strategy.sigma * rng.normal();
                Eigen::VectorXd y = Nb * c;
                if ((two_h + y).norm() > strategy.cap) continue; // outside the sampling cap
                samples.push_back(make_sample(state, cache, i, y, strategy.psd_tol));
            }
        }
    }
    return samples;
}

Lemma2Summary lemma2_check(const AbpState& state, const GeometryCache& cache,
                           const std::vector<NormalBundleSample>& samples) {
    const int n = cache.n;
    Lemma2Summary summary;
    summary.records.reserve(samples.size());
    for (const auto& s : samples) {
        if (!s.member) continue;
        ++summary.members;
        const Eigen::Index i = s.vertex;
        const double fi = state.density(i);

        Lemma2Record rec;
        rec.vertex = i;
        rec.det = s.det;

        const Eigen::VectorXd two_h_plus_y =
            2.0 * cache.mean_curvature.row(i).transpose() + s.y;
        const double phi_sq = s.phi.squaredNorm();
        const double exponent =
            -0.25 * two_h_plus_y.squaredNorm() + 0.25 * phi_sq + state.alpha - n;
        rec.bound = fi * std::exp(exponent);

        // measured allowance: II trace defect scales with |y|, plus the
        // pointwise PDE residual entering the chain
        rec.tol_exponent = cache.ii_trace_defect(i) * s.y.norm() +
                           std::abs(state.pde_residual(i)) + 1e-10;

        rec.chain_lhs = state.laplacian_potential(i) -
                        cache.mean_curvature.row(i).dot(s.y);
        rec.chain_rhs = std::log(fi) - 0.25 * two_h_plus_y.squaredNorm() + 0.25 * phi_sq +
                        state.alpha;
        const Eigen::VectorXd num = 2.0 * state.grad_density.row(i).transpose() +
                                    fi * state.grad_potential.row(i).transpose();
        rec.dropped_term = num.squaredNorm() / (4.0 * fi * fi);

        const double eps = s.psd_eps;
        const double floor = eps * (1.0 + std::abs(s.matrix.trace())) + eps * eps;
        rec.upper_violation = rec.det > rec.bound * std::exp(rec.tol_exponent) + floor;
        rec.lower_violation = rec.det < -floor;
        rec.margin = rec.det / rec.bound;

        summary.worst_margin =
            std::max(summary.worst_margin, rec.det / (rec.bound * std::exp(rec.tol_exponent)));
        if (rec.upper_violation) ++summary.upper_violations;
        if (rec.lower_violation) ++summary.lower_violations;
        summary.records.push_back(std::move(rec));
    }
    return summary;
}

ProbeResult lemma1_probe(const AbpState& state, const GeometryCache& cache,
                         const Eigen::VectorXd& xi, double psd_tol) {
    const EmbeddedMesh& mesh = *cache.mesh;
    Eigen::Index best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i) {
        const double v = state.potential(i) - mesh.vertices.row(i).dot(xi);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    const double tie_tol = 1e-12 * (1.0 + std::abs(best_val));
    int ties = 0;
    for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i) {
        const double v = state.potential(i) - mesh.vertices.row(i).dot(xi);
        if (i != best && v <= best_val + tie_tol) ++ties;
    }

    const Eigen::VectorXd residual = xi - state.grad_potential.row(best).transpose();
    const auto& T = cache.tangent_basis[static_cast<std::size_t>(best)];
    const auto& Nb = cache.normal_basis[static_cast<std::size_t>(best)];

    ProbeResult probe;
    probe.vertex = best;
    probe.ties = ties;
    probe.y = Nb * (Nb.transpose() * residual);
    probe.tangential_residual = (T * (T.transpose() * residual)).norm();

    const Eigen::MatrixXd M =
        state.hess_potential[static_cast<std::size_t>(best)] - ii_contract(cache, best, probe.y);
    probe.min_eig = sym_eig_min(M);
    probe.member = probe.min_eig >= -psd_tol * (1.0 + M.cwiseAbs().maxCoeff());
    return probe;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int points) {
    Eigen::VectorXd nodes(points), weights(points);
    for (int k = 0; k < (points + 1) / 2; ++k) {
        double x = std::cos(kPi * (k + 0.75) / (points + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Legendre recurrence for P_n(x) and P'_n(x)
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= points; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = points * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes(k) = -x;
        nodes(points - 1 - k) = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights(k) = w;
        weights(points - 1 - k) = w;
    }
    return {nodes, weights};
}

ReconstructionResult reconstruct_constant(const AbpState& state, const GeometryCache& cache,
                                          const QuadratureConfig& quad) {
    const int n = cache.n;
    const int m = cache.m;
    if (m > 2)
        throw Error(ErrorCode::UnsupportedSpec, "fiber quadrature supports codimension <= 2");
    if (std::erfc(0.5 * quad.cap) > 1e-9)
        throw Error(ErrorCode::QuadratureUnderflow,
                    "fiber cap " + std::to_string(quad.cap) + " truncates the Gaussian tail");

    auto [nodes, base_weights] = gauss_legendre(quad.points);
    const Eigen::VectorXd z = quad.cap * nodes;
    const Eigen::VectorXd wz = quad.cap * base_weights;

    ReconstructionResult result;
    result.fiber_expected = std::pow(4.0 * kPi, 0.5 * m);

    double assembled = 0.0;
    for (Eigen::Index i = 0; i < cache.num_vertices(); ++i) {
        const auto& Nb = cache.normal_basis[static_cast<std::size_t>(i)];
        const Eigen::VectorXd two_h = 2.0 * cache.mean_curvature.row(i).transpose();
        const Eigen::VectorXd h_coords = 0.5 * (Nb.transpose() * two_h);

        double fiber = 0.0;
        if (m == 1) {
            for (int k = 0; k < quad.points; ++k) {
                const Eigen::VectorXd y = Nb * (Eigen::VectorXd::Constant(1, z(k)) - 2.0 * h_coords);
                fiber += wz(k) * std::exp(-0.25 * (two_h + y).squaredNorm());
            }
        } else {
            for (int k = 0; k < quad.points; ++k) {
                for (int l = 0; l < quad.points; ++l) {
                    Eigen::VectorXd zc(2);
                    zc << z(k), z(l);
                    const Eigen::VectorXd y = Nb * (zc - 2.0 * h_coords);
                    fiber += wz(k) * wz(l) * std::exp(-0.25 * (two_h + y).squaredNorm());
                }
            }
        }
        result.max_fiber_rel_error =
            std::max(result.max_fiber_rel_error,
                     std::abs(fiber - result.fiber_expected) / result.fiber_expected);
        assembled += cache.dual_measure(i) * state.density(i) * fiber;
    }
    const double total = std::pow(4.0 * kPi, -0.5 * (n + m)) * assembled *
                         std::exp(state.alpha - n);
    result.value = std::log(total);
    return result;
}

} // namespace logsob
