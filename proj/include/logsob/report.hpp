#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "logsob/abp.hpp"
#include "logsob/functionals.hpp"
#include "logsob/optimizer.hpp"

namespace logsob {

inline constexpr const char* kReportSchema = "logsob-report/1";
inline constexpr const char* kToolVersion = "1.0.0";

using Json = nlohmann::ordered_json;

Json mesh_metadata(const EmbeddedMesh& mesh);

Json to_json(const DeficitReport& report);
Json to_json(const OptTrace& trace);
Json to_json(const SolveReport& report);
Json to_json(const ReconstructionResult& recon);

/// Histogram of Lemma-2 margins det/bound plus violation counts.
Json lemma2_summary_json(const Lemma2Summary& summary, int bins = 32);

/// Aggregate statistics over a batch of surjectivity probes.
struct ProbeStats {
    std::size_t total = 0;
    std::size_t members = 0;
    double max_tangential_residual = 0.0;
    double mean_tangential_residual = 0.0;
    double min_eig_worst = 0.0;
    std::size_t ties = 0;
};
ProbeStats accumulate_probes(const std::vector<ProbeResult>& probes);
Json to_json(const ProbeStats& stats);

/// Top-level payload wrapper: schema, version, mesh metadata, command echo,
/// seed, result. Deterministic for a fixed config and seed.
Json report_envelope(const std::string& command, const EmbeddedMesh& mesh, std::uint64_t seed,
                     Json result);

void write_text(const std::string& path, const std::string& text);

/// One row per line, comma separated, header first.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

std::string csv_to_string(const std::vector<std::string>& header,
                          const std::vector<std::vector<double>>& rows);

} // namespace logsob
