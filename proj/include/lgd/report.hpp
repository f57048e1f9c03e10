#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "lgd/model.hpp"
#include "lgd/pipeline.hpp"

namespace lgd {

inline constexpr const char* kEngineVersion = "1.0.0";
inline constexpr const char* kReportSchemaVersion = "1.0";

// Object with the eight ModelParams fields. Throws InputError on missing or
// non-numeric fields; validation of the values is left to LeverageModel.
ModelParams params_from_json(const nlohmann::json& j);
nlohmann::json params_to_json(const ModelParams& p);
ModelParams read_params_json(const std::filesystem::path& path);

// Report content. Keys are sorted and nothing depends on the wall clock, so
// equal artifacts give equal bytes.
nlohmann::json report_json(const RunArtifact& art);

// Writes report.json, lalpha_density.csv, tau_density.csv, kd_density.csv
// and, if requested, samples.csv into `dir` (created if missing).
void emit_report(const RunArtifact& art, const std::filesystem::path& dir, bool write_samples = false);

}  // namespace lgd
