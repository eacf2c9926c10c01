#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spdckit/config.hpp"
#include "spdckit/report.hpp"

namespace spdckit {

// Bundled presets: the uniform source, the three linear-chirp rates, the
// three apodized parameter sets, and the GA-optimized profile. Each carries
// published reference numbers that are printed next to the measured values
// and never fed back into the computation.

enum class ScenarioId {
    fig3_uniform,
    fig4_linear_a,
    fig4_linear_b,
    fig4_linear_c,
    fig5_apodized_a,
    fig5_apodized_b,
    fig5_apodized_c,
    fig7_optimized,
};

struct ReferenceValues {
    double period_um = 0.0;
    double fwhm_nm = 0.0;
    double visibility = 0.0;        // NaN: not quoted
    double envelope_fwhm_fs = 0.0;  // NaN: not quoted
    double fringe_period_fs = 0.0;
};

struct ScenarioInfo {
    ScenarioId id;
    const char* name;
    const char* summary;
    ProfileConfig profile;  // replaced by the GA result for the optimized entry
    ReferenceValues reference;
};

const std::vector<ScenarioInfo>& scenario_table();
const ScenarioInfo& scenario_info(ScenarioId id);

// maps the CLI string; throws ConfigError listing the valid names
ScenarioId parse_scenario(const std::string& name);

struct ScenarioResult {
    ScenarioId id;
    std::string name;
    CandidateReport report;
    bool optimized = false;
    OptimizationResult optimization;  // populated when optimized
    std::filesystem::path directory;
};

struct ScenarioOptions {
    bool write_svg = true;
};

// runs the preset on top of the base config and writes spectrum /
// interferogram / profile CSVs (and SVGs), the report, the metrics text, and
// the effective config into <output_dir>/<scenario name>/
ScenarioResult run_scenario(ScenarioId id, const RunConfig& base, const std::string& config_path,
                            const ScenarioOptions& opt = {});

// the human-readable block written to metrics.txt and printed by the CLI
std::string metrics_text(const ScenarioResult& r);

}  // namespace spdckit
