#pragma once

#include <cstdint>
#include <vector>

#include "logsob/functionals.hpp"
#include "logsob/sparse.hpp"

namespace logsob {

/// State of the transport construction behind the inequality: the density is
/// normalized to unit mass, alpha collects the integrated terms, and the
/// potential u solves div(f grad u) = f log f - |grad f|^2/f - f |H|^2 +
/// alpha f with mean zero.
struct AbpState {
    const GeometryCache* cache = nullptr;
    ScalarField density; // unit mass
    double alpha = 0.0;
    ScalarField potential;
    SolveReport solve_report;

    // derived fields reused by the samplers and checks
    AmbientField grad_density;
    AmbientField grad_potential; // tangential
    ScalarField laplacian_potential;
    std::vector<Eigen::MatrixXd> hess_potential; // trace-corrected
    ScalarField hess_trace_defect;
    ScalarField pde_residual; // pointwise divergence-form PDE residual

    double entropy0 = 0.0; // sum w f log f
    double fisher = 0.0;
    double curvature = 0.0;
};

/// Requires a connected mesh (split disconnected inputs per component first).
AbpState prepare_abp(const GeometryCache& cache, const ScalarField& f, double solve_tol = 1e-10);

/// Point of the normal bundle with its membership test for the set
/// A = { (x, y) : Hessian u(x) - <II(x), y> >= 0 }.
struct NormalBundleSample {
    Eigen::Index vertex = 0;
    Eigen::VectorXd y;      // ambient, lies in the normal space at the vertex
    Eigen::MatrixXd matrix; // M = Hessian u - <II, y>
    double min_eig = 0.0;
    double det = 0.0;
    bool member = false;
    double psd_eps = 0.0; // threshold used for the membership test
    Eigen::VectorXd phi;  // grad u + y
};

struct SampleStrategy {
    enum class Kind { Grid, Gaussian };
    Kind kind = Kind::Gaussian;
    int grid_points = 64;   // per normal dimension
    double cap = 12.0;      // |2H + y| <= cap
    int count = 10000;      // total Gaussian draws
    double sigma = 2.0;     // std dev per normal coordinate
    std::uint64_t seed = 1;
    int vertex_stride = 1;
    double psd_tol = 1e-8; // membership threshold scale: eps = psd_tol * (1 + |M|)
};

std::vector<NormalBundleSample> sample_A(const AbpState& state, const GeometryCache& cache,
                                         const SampleStrategy& strategy);

/// Jacobian bound margins for one member of A:
///   0 <= det M <= f exp(-|2H+y|^2/4 + |Phi|^2/4 + alpha - n)
/// up to the measured fit/PDE residuals at the vertex.
struct Lemma2Record {
    Eigen::Index vertex = 0;
    double det = 0.0;
    double bound = 0.0;        // the exponential upper bound
    double tol_exponent = 0.0; // measured residual allowance
    double margin = 0.0;       // det / bound
    bool upper_violation = false;
    bool lower_violation = false;
    // intermediate chain: lhs = Lap u - <H, y>, rhs = log f - |2H+y|^2/4 +
    // |Phi|^2/4 + alpha; slack should equal dropped - pde_residual
    double chain_lhs = 0.0;
    double chain_rhs = 0.0;
    double dropped_term = 0.0; // |2 grad f + f grad u|^2 / (4 f^2)
};

struct Lemma2Summary {
    std::vector<Lemma2Record> records;
    std::size_t members = 0;
    std::size_t upper_violations = 0;
    std::size_t lower_violations = 0;
    double worst_margin = 0.0; // max det/(bound * e^tol)
};

Lemma2Summary lemma2_check(const AbpState& state, const GeometryCache& cache,
                           const std::vector<NormalBundleSample>& samples);

/// Surjectivity probe: the minimizer of u - <x, xi> should split xi into
/// grad u + (normal vector) with membership in A.
struct ProbeResult {
    Eigen::Index vertex = 0;
    Eigen::VectorXd y;
    bool member = false;
    double min_eig = 0.0;
    double tangential_residual = 0.0;
    int ties = 0;
};

ProbeResult lemma1_probe(const AbpState& state, const GeometryCache& cache,
                         const Eigen::VectorXd& xi, double psd_tol = 1e-8);

struct QuadratureConfig {
    int points = 64; // Gauss-Legendre nodes per normal dimension
    double cap = 12.0;
};

/// Integrates the Jacobian upper bound over the normal fibers with
/// Gauss-Legendre quadrature and reassembles the normalization constant.
/// `value` is the log of the assembled integral, algebraically equal to
/// alpha - n - (n/2) log 4pi, the unit-mass deficit.
struct ReconstructionResult {
    double value = 0.0;
    double fiber_expected = 0.0;      // (4pi)^(m/2)
    double max_fiber_rel_error = 0.0; // worst vertex vs the exact fiber integral
};

ReconstructionResult reconstruct_constant(const AbpState& state, const GeometryCache& cache,
                                          const QuadratureConfig& quad = {});

/// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int points);

} // namespace logsob
