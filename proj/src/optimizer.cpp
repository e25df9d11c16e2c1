#include "logsob/optimizer.hpp"

#include <cmath>
#include <numbers>

#include "logsob/rng.hpp"

namespace logsob {

namespace {

ScalarField exp_density(const ScalarField& g) {
    ScalarField f(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (!std::isfinite(g(i)) || std::abs(g(i)) > 700.0)
            throw Error(ErrorCode::Overflow, "log-density out of range at vertex " +
                                                 std::to_string(i));
        f(i) = std::exp(g(i));
    }
    return f;
}

double eval_deficit(const GeometryCache& cache, const ScalarField& g) {
    return deficit_theorem1(cache, exp_density(g)).deficit;
}

} // namespace

ScalarField gradient_transpose(const GeometryCache& cache, const AmbientField& S) {
    const EmbeddedMesh& mesh = *cache.mesh;
    const int n = cache.n;
    // project and divide by the dual measure (both parts of the forward map
    // are symmetric vertex-wise operations)
    AmbientField S2(S.rows(), S.cols());
    for (Eigen::Index i = 0; i < S.rows(); ++i) {
        const auto& T = cache.tangent_basis[static_cast<std::size_t>(i)];
        S2.row(i) = (T * (T.transpose() * S.row(i).transpose())).transpose() / cache.dual_measure(i);
    }
    ScalarField out = ScalarField::Zero(S.rows());
    for (Eigen::Index c = 0; c < mesh.num_cells(); ++c) {
        const auto& shape = cache.cell_shape_gradients[static_cast<std::size_t>(c)];
        Eigen::VectorXd t = Eigen::VectorXd::Zero(mesh.ambient_dim);
        for (int a = 0; a <= n; ++a)
            t += cache.cell_vertex_share(c, a) * S2.row(mesh.cells(c, a)).transpose();
        for (int a = 0; a <= n; ++a) out(mesh.cells(c, a)) += t.dot(shape.col(a));
    }
    return out;
}

ScalarField deficit_gradient(const GeometryCache& cache, const ScalarField& g) {
    const ScalarField f = exp_density(g);
    const int n = cache.n;
    const double dim_const = n + 0.5 * n * std::log(4.0 * std::numbers::pi);

    const double mass = cache.dual_measure.dot(f);
    const AmbientField grad_f = gradient(cache, f);

    // Fisher variation: dF = <2 w G/f, G(df)> - w |G|^2/f^2 df
    AmbientField S(f.size(), cache.mesh->ambient_dim);
    for (Eigen::Index i = 0; i < f.size(); ++i)
        S.row(i) = 2.0 * cache.dual_measure(i) / f(i) * grad_f.row(i);
    const ScalarField fisher_lin = gradient_transpose(cache, S);

    ScalarField out(f.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        const double wi = cache.dual_measure(i);
        const double fisher_df =
            fisher_lin(i) - wi * grad_f.row(i).squaredNorm() / (f(i) * f(i));
        out(i) = (std::log(mass) + 1.0) * wi * f(i)              // mass term
                 - wi * f(i) * (g(i) + dim_const + 1.0)          // entropy term
                 + f(i) * fisher_df                              // Fisher term
                 + wi * f(i) * cache.mean_curvature.row(i).squaredNorm(); // curvature term
    }
    return out;
}

ScalarField project_mass_constraint(const GeometryCache& cache, const ScalarField& g,
                                    const ScalarField& grad) {
    const ScalarField f = exp_density(g);
    ScalarField direction = cache.dual_measure.cwiseProduct(f);
    const double denom = direction.squaredNorm();
    if (denom == 0.0) return grad;
    return grad - (grad.dot(direction) / denom) * direction;
}

ScalarField random_smooth_field(const EmbeddedMesh& mesh, std::uint64_t seed, double amplitude) {
    Rng rng(seed);
    const int N = mesh.ambient_dim;
    double scale = 0.0;
    for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i)
        scale = std::max(scale, mesh.vertices.row(i).norm());
    if (scale == 0.0) scale = 1.0;

    const double c0 = rng.uniform(-1.0, 1.0);
    Eigen::VectorXd lin(N);
    for (int k = 0; k < N; ++k) lin(k) = rng.uniform(-1.0, 1.0);
    Eigen::MatrixXd quad(N, N);
    for (int k = 0; k < N; ++k)
        for (int l = k; l < N; ++l) {
            quad(k, l) = rng.uniform(-1.0, 1.0);
            quad(l, k) = quad(k, l);
        }

    ScalarField g(mesh.num_vertices());
    for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i) {
        const Eigen::VectorXd x = mesh.vertices.row(i).transpose() / scale;
        g(i) = amplitude * (c0 + lin.dot(x) + 0.5 * x.dot(quad * x));
    }
    return g;
}

namespace {

struct RunResult {
    std::vector<OptIterate> iterates;
    ScalarField g;
    double deficit = 0.0;
    bool converged = false;
    bool negative_flag = false;
};

RunResult run_descent(const GeometryCache& cache, const OptimizerConfig& config, ScalarField g) {
    RunResult run;
    if (config.mass_constrained) {
        const double mass = cache.dual_measure.dot(exp_density(g));
        g.array() -= std::log(mass);
    }
    double deficit = eval_deficit(cache, g);

    for (int iter = 0; iter < config.max_iterations; ++iter) {
        ScalarField grad = deficit_gradient(cache, g);
        if (config.mass_constrained) grad = project_mass_constraint(cache, g, grad);
        const double gn = grad.norm();

        run.iterates.push_back({deficit, gn, cache.dual_measure.dot(exp_density(g))});
        if (!std::isfinite(deficit) || deficit < -1e3)
            throw Error(ErrorCode::Diverged, "deficit diverged to " + std::to_string(deficit));
        if (deficit < -config.negative_floor) run.negative_flag = true;

        if (gn <= config.grad_tol) {
            run.converged = true;
            break;
        }

        // Armijo backtracking on the descent direction -grad
        double step = config.step0;
        bool accepted = false;
        for (int bt = 0; bt < config.max_backtracks; ++bt) {
            ScalarField g_next = g - step * grad;
            if (config.mass_constrained) {
                const double mass = cache.dual_measure.dot(exp_density(g_next));
                g_next.array() -= std::log(mass);
            }
            const double next = eval_deficit(cache, g_next);
            if (next <= deficit - 1e-4 * step * gn * gn) {
                g = std::move(g_next);
                deficit = next;
                accepted = true;
                break;
            }
            step *= config.shrink;
        }
        if (!accepted) break; // flat to machine precision along this direction
    }
    run.g = std::move(g);
    run.deficit = deficit;
    return run;
}

} // namespace

OptTrace minimize_deficit(const GeometryCache& cache, const OptimizerConfig& config,
                          const ScalarField* g0) {
    if (config.max_iterations < 1 || config.step0 <= 0.0 || config.restarts < 1)
        throw Error(ErrorCode::InvalidConfig, "optimizer needs step > 0 and iterations >= 1");

    OptTrace trace;
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < config.restarts; ++r) {
        ScalarField g;
        if (r == 0 && g0) {
            g = *g0;
        } else {
            g = random_smooth_field(*cache.mesh, config.seed + 0x9e3779b97f4a7c15ULL * (r + 1),
                                    config.init_amplitude);
        }
        RunResult run = run_descent(cache, config, std::move(g));
        trace.restarts.push_back(
            {r, run.deficit, static_cast<int>(run.iterates.size()), run.converged});
        trace.negative_deficit_flag = trace.negative_deficit_flag || run.negative_flag;
        if (run.deficit < best) {
            best = run.deficit;
            trace.iterations = std::move(run.iterates);
            trace.final_log_density = std::move(run.g);
            trace.final_deficit = run.deficit;
            trace.best_restart = r;
            trace.converged = run.converged;
        }
    }
    return trace;
}

} // namespace logsob
