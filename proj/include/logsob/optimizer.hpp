#pragma once

#include <cstdint>
#include <vector>

#include "logsob/functionals.hpp"

namespace logsob {

struct OptimizerConfig {
    double step0 = 1.0;
    double shrink = 0.5;
    int max_iterations = 500;
    double grad_tol = 1e-8;
    int restarts = 1;
    std::uint64_t seed = 0;
    bool mass_constrained = true;  // keep the total mass at 1
    double negative_floor = 1e-6;  // deficit below -floor flags a discretization bug
    int max_backtracks = 60;
    double init_amplitude = 0.5;   // scale of the random smooth initial log-density
};

struct OptIterate {
    double deficit = 0.0;
    double grad_norm = 0.0;
    double mass = 0.0;
};

struct RestartSummary {
    int restart = 0;
    double final_deficit = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct OptTrace {
    std::vector<OptIterate> iterations; // best restart's trajectory
    ScalarField final_log_density;
    double final_deficit = 0.0;
    int best_restart = 0;
    bool converged = false;
    bool negative_deficit_flag = false; // any iterate below -negative_floor
    std::vector<RestartSummary> restarts;
};

/// Analytic derivative of the Theorem-1 deficit with respect to g = log f,
/// assembled from the variations of each term (the Fisher term goes through
/// the transpose of the discrete gradient operator).
ScalarField deficit_gradient(const GeometryCache& cache, const ScalarField& g);

/// Removes the component that changes the total mass: projection onto
/// { dg : sum w f dg = 0 }.
ScalarField project_mass_constraint(const GeometryCache& cache, const ScalarField& g,
                                    const ScalarField& grad);

/// Transpose of the linear map f -> gradient(cache, f) (plain inner product
/// pairing). Used by the Fisher-term variation and by its tests.
ScalarField gradient_transpose(const GeometryCache& cache, const AmbientField& S);

/// Projected gradient descent with backtracking line search; the deficit is
/// nonincreasing along each run. `g0` seeds the first restart; later
/// restarts start from random smooth log-densities.
OptTrace minimize_deficit(const GeometryCache& cache, const OptimizerConfig& config,
                          const ScalarField* g0 = nullptr);

/// Smooth random field: quadratic polynomial in the scaled coordinates with
/// seeded coefficients. Deterministic given the seed.
ScalarField random_smooth_field(const EmbeddedMesh& mesh, std::uint64_t seed,
                                double amplitude = 0.5);

} // namespace logsob
