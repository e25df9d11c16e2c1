#include "logsob/report.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace logsob {

Json mesh_metadata(const EmbeddedMesh& mesh) {
    Json j;
    j["intrinsic_dim"] = mesh.intrinsic_dim;
    j["codim"] = mesh.codim();
    j["ambient_dim"] = mesh.ambient_dim;
    j["num_vertices"] = mesh.num_vertices();
    j["num_cells"] = mesh.num_cells();
    j["num_components"] = mesh.num_components;
    j["total_measure"] = total_measure(mesh);
    j["h_max"] = mesh_scale(mesh).max_edge;
    return j;
}

Json to_json(const DeficitReport& report) {
    Json j;
    j["form"] = report.form == DeficitForm::Theorem1 ? "theorem1" : "corollary2";
    j["entropy_term"] = report.entropy_term;
    j["fisher_term"] = report.fisher_term;
    j["curvature_term"] = report.curvature_term;
    j["mass"] = report.mass;
    j["rhs"] = report.rhs;
    j["deficit"] = report.deficit;
    Json comps = Json::array();
    for (const auto& c : report.components) {
        Json jc;
        jc["entropy"] = c.entropy;
        jc["fisher"] = c.fisher;
        jc["curvature"] = c.curvature;
        jc["mass"] = c.mass;
        jc["rhs"] = c.rhs;
        jc["deficit"] = c.deficit;
        comps.push_back(std::move(jc));
    }
    j["components"] = std::move(comps);
    j["num_vertices"] = report.num_vertices;
    j["h_max"] = report.h_max;
    return j;
}

Json to_json(const SolveReport& report) {
    Json j;
    j["iterations"] = report.iterations;
    j["relative_residual"] = report.relative_residual;
    j["kernel_projection_applied"] = report.kernel_projection_applied;
    return j;
}

Json to_json(const OptTrace& trace) {
    Json j;
    j["final_deficit"] = trace.final_deficit;
    j["best_restart"] = trace.best_restart;
    j["converged"] = trace.converged;
    j["negative_deficit_flag"] = trace.negative_deficit_flag;
    Json iters = Json::array();
    for (const auto& it : trace.iterations) {
        Json ji;
        ji["deficit"] = it.deficit;
        ji["grad_norm"] = it.grad_norm;
        ji["mass"] = it.mass;
        iters.push_back(std::move(ji));
    }
    j["iterations"] = std::move(iters);
    Json restarts = Json::array();
    for (const auto& r : trace.restarts) {
        Json jr;
        jr["restart"] = r.restart;
        jr["final_deficit"] = r.final_deficit;
        jr["iterations"] = r.iterations;
        jr["converged"] = r.converged;
        restarts.push_back(std::move(jr));
    }
    j["restarts"] = std::move(restarts);
    return j;
}

Json to_json(const ReconstructionResult& recon) {
    Json j;
    j["value"] = recon.value;
    j["fiber_expected"] = recon.fiber_expected;
    j["max_fiber_rel_error"] = recon.max_fiber_rel_error;
    return j;
}

Json lemma2_summary_json(const Lemma2Summary& summary, int bins) {
    Json j;
    j["members"] = summary.members;
    j["upper_violations"] = summary.upper_violations;
    j["lower_violations"] = summary.lower_violations;
    j["worst_margin"] = summary.worst_margin;

    double lo = 0.0, hi = 1.0;
    for (const auto& r : summary.records) {
        lo = std::min(lo, r.margin);
        hi = std::max(hi, r.margin);
    }
    Json hist = Json::array();
    std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
    const double width = (hi - lo) / bins;
    for (const auto& r : summary.records) {
        int b = width > 0 ? static_cast<int>((r.margin - lo) / width) : 0;
        b = std::clamp(b, 0, bins - 1);
        ++counts[static_cast<std::size_t>(b)];
    }
    for (int b = 0; b < bins; ++b) {
        Json jb;
        jb["margin_lo"] = lo + b * width;
        jb["margin_hi"] = lo + (b + 1) * width;
        jb["count"] = counts[static_cast<std::size_t>(b)];
        hist.push_back(std::move(jb));
    }
    j["margin_histogram"] = std::move(hist);
    return j;
}

ProbeStats accumulate_probes(const std::vector<ProbeResult>& probes) {
    ProbeStats stats;
    stats.total = probes.size();
    double sum = 0.0;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& p : probes) {
        if (p.member) ++stats.members;
        stats.max_tangential_residual = std::max(stats.max_tangential_residual, p.tangential_residual);
        sum += p.tangential_residual;
        worst = std::min(worst, p.min_eig);
        stats.ties += static_cast<std::size_t>(p.ties);
    }
    if (!probes.empty()) stats.mean_tangential_residual = sum / static_cast<double>(probes.size());
    stats.min_eig_worst = probes.empty() ? 0.0 : worst;
    return stats;
}

Json to_json(const ProbeStats& stats) {
    Json j;
    j["total"] = stats.total;
    j["members"] = stats.members;
    j["success_rate"] = stats.total ? static_cast<double>(stats.members) / static_cast<double>(stats.total) : 0.0;
    j["max_tangential_residual"] = stats.max_tangential_residual;
    j["mean_tangential_residual"] = stats.mean_tangential_residual;
    j["min_eig_worst"] = stats.min_eig_worst;
    j["ties"] = stats.ties;
    return j;
}

Json report_envelope(const std::string& command, const EmbeddedMesh& mesh, std::uint64_t seed,
                     Json result) {
    Json j;
    j["schema"] = kReportSchema;
    j["tool_version"] = kToolVersion;
    j["command"] = command;
    j["seed"] = seed;
    j["mesh"] = mesh_metadata(mesh);
    j["result"] = std::move(result);
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    out << text;
}

std::string csv_to_string(const std::vector<std::string>& header,
                          const std::vector<std::vector<double>>& rows) {
    std::ostringstream ss;
    ss.precision(17);
    for (std::size_t i = 0; i < header.size(); ++i) ss << (i ? "," : "") << header[i];
    ss << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) ss << (i ? "," : "") << row[i];
        ss << "\n";
    }
    return ss.str();
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    write_text(path, csv_to_string(header, rows));
}

} // namespace logsob
