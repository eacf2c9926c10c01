#include "spdckit/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "spdckit/csv.hpp"
#include "spdckit/errors.hpp"
#include "spdckit/svg.hpp"

namespace spdckit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ProfileConfig linear(double rate) {
    ProfileConfig p;
    p.type = "linear";
    p.rate_per_mm = rate;
    return p;
}

ProfileConfig apodized(double alpha, double beta) {
    ProfileConfig p;
    p.type = "apodized";
    p.alpha = alpha;
    p.beta = beta;
    return p;
}

std::vector<ScenarioInfo> make_table() {
    ProfileConfig uniform;  // defaults to type "uniform"
    ProfileConfig poly;     // placeholder, replaced by the GA result
    poly.type = "polynomial";
    return {
        {ScenarioId::fig3_uniform, "fig3_uniform", "uniform poling at the calibrated period",
         uniform, {9.3, 1.65, kNaN, kNaN, 5.17}},
        {ScenarioId::fig4_linear_a, "fig4_linear_a", "linear chirp, rate 6e-4 per mm",
         linear(6e-4), {9.3, 27.0, kNaN, kNaN, 5.17}},
        {ScenarioId::fig4_linear_b, "fig4_linear_b", "linear chirp, rate 18e-4 per mm",
         linear(18e-4), {9.3, 88.0, kNaN, kNaN, 5.17}},
        {ScenarioId::fig4_linear_c, "fig4_linear_c", "linear chirp, rate 30e-4 per mm",
         linear(30e-4), {9.3, 136.0, kNaN, kNaN, 5.17}},
        {ScenarioId::fig5_apodized_a, "fig5_apodized_a",
         "apodized chirp, alpha 218.9, beta -1.99", apodized(218.9, -1.99),
         {9.3, 28.0, kNaN, kNaN, 5.17}},
        {ScenarioId::fig5_apodized_b, "fig5_apodized_b",
         "apodized chirp, alpha 66.5, beta -1.99", apodized(66.5, -1.99),
         {9.3, 84.0, kNaN, kNaN, 5.17}},
        {ScenarioId::fig5_apodized_c, "fig5_apodized_c",
         "apodized chirp, alpha 38.0, beta -1.99", apodized(38.0, -1.99),
         {9.3, 133.0, kNaN, kNaN, 5.17}},
        {ScenarioId::fig7_optimized, "fig7_optimized",
         "genetic search over asymmetric polynomial poling", poly,
         {9.3, 135.0, 0.903, 54.0, 5.17}},
    };
}

std::string fmt(double v, const char* f = "%.6g") {
    if (std::isnan(v)) return "n/a";
    char buf[48];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

void line(std::string& out, const std::string& label, const std::string& value,
          const std::string& reference = "") {
    char buf[160];
    if (reference.empty())
        std::snprintf(buf, sizeof buf, "  %-22s %s\n", label.c_str(), value.c_str());
    else
        std::snprintf(buf, sizeof buf, "  %-22s %-22s (reference %s)\n", label.c_str(),
                      value.c_str(), reference.c_str());
    out += buf;
}

}  // namespace

const std::vector<ScenarioInfo>& scenario_table() {
    static const std::vector<ScenarioInfo> table = make_table();
    return table;
}

const ScenarioInfo& scenario_info(ScenarioId id) {
    for (const auto& s : scenario_table())
        if (s.id == id) return s;
    throw ConfigError("scenario id out of range");
}

ScenarioId parse_scenario(const std::string& name) {
    std::string valid;
    for (const auto& s : scenario_table()) {
        if (name == s.name) return s.id;
        if (!valid.empty()) valid += ", ";
        valid += s.name;
    }
    throw ConfigError("unknown scenario '" + name + "' (valid: " + valid + ")");
}

ScenarioResult run_scenario(ScenarioId id, const RunConfig& base, const std::string& config_path,
                            const ScenarioOptions& opt) {
    const ScenarioInfo& info = scenario_info(id);

    ScenarioResult res;
    res.id = id;
    res.name = info.name;
    res.directory = std::filesystem::path(base.output_dir) / info.name;

    RunConfig cfg = base;
    if (id != ScenarioId::fig7_optimized) cfg.profile = info.profile;
    SimulationSetup setup = build_setup(cfg, config_path);

    ProfileSpec spec = setup.profile;
    if (id == ScenarioId::fig7_optimized) {
        res.optimized = true;
        res.optimization = optimize(setup.optimizer, setup.dispersion);
        spec = ProfileSpec{genome_to_profile(res.optimization.best), setup.period_um,
                           cfg.device_length_um};
        cfg.profile = profile_config_from_shape(spec.shape);
    }

    CandidateEvaluation ev = evaluate_candidate(spec, setup.dispersion, setup.grid,
                                                setup.interferometer, cfg.optimizer.min_domain_um);
    res.report = ev.report;

    const auto& dir = res.directory;
    csv::write_file(dir / "spectrum.csv", csv::spectrum_csv(ev.spectrum));
    csv::write_file(dir / "interferogram.csv", csv::interferogram_csv(ev.interferogram));
    csv::write_file(dir / "domains.csv", csv::domains_csv(ev.domains));
    csv::write_file(dir / "period.csv", csv::period_csv(spec));
    if (opt.write_svg) {
        csv::write_file(dir / "spectrum.svg",
                        svg::spectrum_svg(ev.spectrum, std::string(info.name) + ": spectrum"));
        csv::write_file(dir / "interferogram.svg",
                        svg::interferogram_svg(ev.interferogram,
                                               std::string(info.name) + ": interferogram"));
    }
    csv::write_file(dir / "report.json", report_to_json(res.report));
    csv::write_file(dir / "config.json", run_config_to_json(cfg));
    if (res.optimized) {
        csv::write_file(dir / "optimization.json",
                        optimization_to_json(res.optimization, setup.optimizer));
        csv::write_file(dir / "trace.csv", csv::trace_csv(res.optimization.trace));
        csv::write_file(dir / "best_profile.json", profile_config_to_json(cfg.profile));
    }
    csv::write_file(dir / "metrics.txt", metrics_text(res));
    return res;
}

std::string metrics_text(const ScenarioResult& r) {
    const ScenarioInfo& info = scenario_info(r.id);
    const CandidateReport& c = r.report;
    std::string out = std::string(info.name) + ": " + info.summary + "\n";
    line(out, "poling period", fmt(c.base_period_um, "%.6f") + " um calibrated",
         fmt(info.reference.period_um) + " um nominal");
    line(out, "device length", fmt(c.device_length_um, "%.0f") + " um");
    line(out, "domains",
         std::to_string(c.domain_count) + ", min " + fmt(c.min_domain_um, "%.3f") + " um, " +
             (c.feasible ? "feasible" : "INFEASIBLE"));
    line(out, "spectral fwhm", fmt(c.fwhm_nm, "%.4g") + " nm",
         fmt(info.reference.fwhm_nm) + " nm");
    if (std::isnan(info.reference.visibility))
        line(out, "visibility", fmt(c.visibility, "%.4f"));
    else
        line(out, "visibility", fmt(c.visibility, "%.4f"), fmt(info.reference.visibility));
    if (std::isnan(info.reference.envelope_fwhm_fs))
        line(out, "envelope fwhm", fmt(c.envelope_fwhm_fs, "%.4g") + " fs");
    else
        line(out, "envelope fwhm", fmt(c.envelope_fwhm_fs, "%.4g") + " fs",
             fmt(info.reference.envelope_fwhm_fs) + " fs");
    line(out, "envelope peak", fmt(c.envelope_peak_fs, "%.4f") + " fs");
    line(out, "envelope maxima", std::to_string(c.envelope_peak_count));
    line(out, "fringe period", fmt(c.measured_fringe_period_fs, "%.4f") + " fs",
         fmt(info.reference.fringe_period_fs) + " fs");
    line(out, "symmetry residual", fmt(c.symmetry_residual, "%.3e"));
    line(out, "total variation", fmt(c.intensity_total_variation, "%.4g"));
    if (r.optimized) {
        const auto& run = r.optimization;
        line(out, "generations",
             std::to_string(run.generations_run) + (run.stalled ? " (stalled)" : ""));
        line(out, "fitness evaluations", std::to_string(run.evaluations));
        line(out, "best fitness", fmt(run.best_fitness.total, "%.6g"));
        line(out, "refined fitness", fmt(run.refined.total, "%.6g"));
    }
    return out;
}

}  // namespace spdckit
