#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "envelope/sweep.hpp"

namespace envelope {

// Writes sweep.csv, records.csv, report.json and plots/*.dat under outdir.
void emit_reports(const SweepResult& result, const std::filesystem::path& outdir);

nlohmann::json report_json(const SweepResult& result);

// Re-fits the err_W rates from an existing sweep.csv.
std::vector<std::pair<Variant, RateFit>> refit_csv(const std::filesystem::path& csv);

}  // namespace envelope
