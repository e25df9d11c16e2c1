#pragma once

#include <vector>

#include "logsob/geometry.hpp"

namespace logsob {

enum class DeficitForm { Theorem1, Corollary2 };

/// Terms of one connected component, in the same form as the full report.
struct ComponentTerms {
    double entropy = 0.0;
    double fisher = 0.0;
    double curvature = 0.0;
    double mass = 0.0;
    double rhs = 0.0;     // mass * log(mass)
    double deficit = 0.0; // rhs - (entropy - fisher - curvature)
};

/// Every term of the inequality. In the Theorem1 (area measure) form:
///   entropy   = sum w f (log f + n + (n/2) log 4pi)
///   fisher    = sum w |grad f|^2 / f
///   curvature = sum w f |H|^2
/// and in the Corollary2 (Gaussian measure) form the same terms with
/// f -> phi, dvol -> dmu, |H|^2 -> |H + x_perp/2|^2 and no dimensional
/// constant. deficit = M log M - (entropy - fisher - curvature) >= 0 is the
/// inequality under test.
struct DeficitReport {
    DeficitForm form = DeficitForm::Theorem1;
    int intrinsic_dim = 0;
    double entropy_term = 0.0;
    double fisher_term = 0.0;
    double curvature_term = 0.0;
    double mass = 0.0;
    double rhs = 0.0;
    double deficit = 0.0;
    std::vector<ComponentTerms> components;
    Eigen::Index num_vertices = 0;
    double h_max = 0.0;
};

struct GaussianWeights {
    ScalarField values; // (4pi)^(-n/2) exp(-|x|^2/4) per vertex
    double total = 0.0; // mu(Sigma)
};

DeficitReport deficit_theorem1(const GeometryCache& cache, const ScalarField& f);

DeficitReport deficit_corollary2(const GeometryCache& cache, const ScalarField& phi);

GaussianWeights gaussian_weights(const GeometryCache& cache);

/// Total Gaussian measure mu(Sigma).
double gaussian_density(const GeometryCache& cache);

/// Per-vertex H + x_perp/2; zero exactly on self-shrinkers.
AmbientField shrinker_residual(const GeometryCache& cache);

/// f = (4pi)^(-n/2) exp(-|x|^2/4) phi and its inverse.
ScalarField to_density(const GeometryCache& cache, const ScalarField& phi);
ScalarField to_gaussian_form(const GeometryCache& cache, const ScalarField& f);

/// Term-wise union of per-component reports; rhs recomputed from the total
/// mass, which makes the union deficit exceed the component sum by the
/// log-concavity gap M log M - sum m_k log m_k.
DeficitReport combine_components(const std::vector<DeficitReport>& reports);

/// Pointwise residual of div(x_tan) = n + <H, x_perp>.
ScalarField section3_residual(const GeometryCache& cache);

/// Pointwise residual of the quadratic gradient identity
/// |grad phi/phi|^2 = |grad f/f|^2 + <grad f/f, x_tan> + |x_tan|^2/4.
ScalarField gradient_identity_residual(const GeometryCache& cache, const ScalarField& phi);

/// Computable upper bound on |deficit_theorem1(f) - deficit_corollary2(phi)|
/// for f = to_density(phi): the two evaluations differ exactly by
/// discrete-operator residuals, and this sums their absolute values.
double form_equivalence_scale(const GeometryCache& cache, const ScalarField& phi);

} // namespace logsob
