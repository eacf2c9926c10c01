#include "spdckit/report.hpp"

#include <cmath>
#include <limits>

#include "curve.hpp"
#include "json.hpp"
#include "spdckit/errors.hpp"

namespace spdckit {

namespace {

using nlohmann::json;

constexpr const char* kReportSchema = "spdckit-report v1";

json profile_json(const ProfileConfig& pc) {
    json p = {{"type", pc.type}};
    if (pc.type == "linear") p["rate_per_mm"] = pc.rate_per_mm;
    if (pc.type == "apodized") {
        p["alpha"] = pc.alpha;
        p["beta"] = pc.beta;
    }
    if (pc.type == "polynomial") {
        json terms = json::array();
        for (const auto& t : pc.terms) terms.push_back({{"alpha", t.alpha}, {"beta", t.beta}});
        p["terms"] = terms;
    }
    return p;
}

ProfileConfig profile_from(const json& p) {
    ProfileConfig pc;
    pc.type = p.at("type").get<std::string>();
    if (p.contains("rate_per_mm")) pc.rate_per_mm = p["rate_per_mm"].get<double>();
    if (p.contains("alpha")) pc.alpha = p["alpha"].get<double>();
    if (p.contains("beta")) pc.beta = p["beta"].get<double>();
    if (p.contains("terms"))
        for (const auto& t : p["terms"])
            pc.terms.push_back({t.at("alpha").get<double>(), t.at("beta").get<double>()});
    return pc;
}

// NaN has no JSON literal; it serializes as null and parses back to NaN
json put(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

double take(const json& j, const char* key) {
    const json& v = j.at(key);
    if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return v.get<double>();
}

}  // namespace

CandidateEvaluation evaluate_candidate(const ProfileSpec& spec, const DispersionModel& d,
                                       const SpectralGrid& grid,
                                       const InterferometerConfig& icfg,
                                       double constraint_limit_um) {
    CandidateEvaluation ev;
    CandidateReport& r = ev.report;

    r.profile = profile_config_from_shape(spec.shape);
    r.base_period_um = spec.base_period_um;
    r.device_length_um = spec.total_length_um;

    ev.domains = generate_domains(spec);
    const ConstraintReport cr = check_constraints(ev.domains, constraint_limit_um);
    r.domain_count = ev.domains.full_domain_count;
    r.min_domain_um = cr.min_domain_um;
    r.final_truncated = ev.domains.final_truncated;
    r.constraint_limit_um = constraint_limit_um;
    r.feasible = cr.feasible;

    ev.spectrum = compute_spectrum(ev.domains, d, grid);
    const BandwidthReport bw = bandwidth(ev.spectrum);
    r.fwhm_nm = bw.fwhm_nm;
    r.fwhm_rad_fs = bw.fwhm_rad_fs;
    r.peak_wavelengths_nm = bw.peak_wavelengths_nm;
    r.symmetry_residual = bw.symmetry_residual;
    r.intensity_total_variation = curve::total_variation(ev.spectrum.intensity);
    r.spectrum_truncated = bw.truncated;
    r.group_slope_fs = ev.spectrum.group_slope_fs;

    ev.interferogram = coincidence_scan(ev.spectrum, icfg);
    r.visibility = visibility(ev.interferogram);
    r.envelope_peak_fs = ev.interferogram.envelope_peak_fs;
    r.envelope_fwhm_fs = ev.interferogram.envelope_fwhm_fs;
    r.envelope_peak_count = count_envelope_peaks(ev.interferogram);
    r.measured_fringe_period_fs = ev.interferogram.measured_fringe_period_fs;
    r.nominal_fringe_period_fs = ev.interferogram.nominal_fringe_period_fs;
    r.envelope_truncated = ev.interferogram.envelope_truncated;

    return ev;
}

CandidateReport evaluate_candidate_report(const ProfileSpec& spec, const DispersionModel& d,
                                          const SpectralGrid& grid,
                                          const InterferometerConfig& icfg,
                                          double constraint_limit_um) {
    return evaluate_candidate(spec, d, grid, icfg, constraint_limit_um).report;
}

std::string report_to_json(const CandidateReport& r) {
    json j;
    j["schema"] = kReportSchema;
    j["profile"] = profile_json(r.profile);
    j["base_period_um"] = r.base_period_um;
    j["device_length_um"] = r.device_length_um;
    j["domains"] = {{"count", r.domain_count},
                    {"min_domain_um", r.min_domain_um},
                    {"final_truncated", r.final_truncated},
                    {"constraint_limit_um", r.constraint_limit_um},
                    {"feasible", r.feasible}};
    j["spectrum"] = {{"fwhm_nm", r.fwhm_nm},
                     {"fwhm_rad_fs", r.fwhm_rad_fs},
                     {"peak_wavelengths_nm", r.peak_wavelengths_nm},
                     {"symmetry_residual", r.symmetry_residual},
                     {"total_variation", r.intensity_total_variation},
                     {"truncated", r.spectrum_truncated},
                     {"group_slope_fs", r.group_slope_fs}};
    j["interferogram"] = {{"visibility", r.visibility},
                          {"envelope_peak_fs", r.envelope_peak_fs},
                          {"envelope_fwhm_fs", r.envelope_fwhm_fs},
                          {"envelope_peak_count", r.envelope_peak_count},
                          {"measured_fringe_period_fs", put(r.measured_fringe_period_fs)},
                          {"nominal_fringe_period_fs", r.nominal_fringe_period_fs},
                          {"envelope_truncated", r.envelope_truncated}};
    return j.dump(2) + "\n";
}

CandidateReport report_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("report is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("schema").get<std::string>() != kReportSchema)
            throw ConfigError("unsupported report schema '" +
                              j["schema"].get<std::string>() + "'");
        CandidateReport r;
        r.profile = profile_from(j.at("profile"));
        r.base_period_um = j.at("base_period_um").get<double>();
        r.device_length_um = j.at("device_length_um").get<double>();
        const json& d = j.at("domains");
        r.domain_count = d.at("count").get<std::size_t>();
        r.min_domain_um = d.at("min_domain_um").get<double>();
        r.final_truncated = d.at("final_truncated").get<bool>();
        r.constraint_limit_um = d.at("constraint_limit_um").get<double>();
        r.feasible = d.at("feasible").get<bool>();
        const json& s = j.at("spectrum");
        r.fwhm_nm = s.at("fwhm_nm").get<double>();
        r.fwhm_rad_fs = s.at("fwhm_rad_fs").get<double>();
        r.peak_wavelengths_nm = s.at("peak_wavelengths_nm").get<std::vector<double>>();
        r.symmetry_residual = s.at("symmetry_residual").get<double>();
        r.intensity_total_variation = s.at("total_variation").get<double>();
        r.spectrum_truncated = s.at("truncated").get<bool>();
        r.group_slope_fs = s.at("group_slope_fs").get<double>();
        const json& ig = j.at("interferogram");
        r.visibility = ig.at("visibility").get<double>();
        r.envelope_peak_fs = ig.at("envelope_peak_fs").get<double>();
        r.envelope_fwhm_fs = ig.at("envelope_fwhm_fs").get<double>();
        r.envelope_peak_count = ig.at("envelope_peak_count").get<int>();
        r.measured_fringe_period_fs = take(ig, "measured_fringe_period_fs");
        r.nominal_fringe_period_fs = ig.at("nominal_fringe_period_fs").get<double>();
        r.envelope_truncated = ig.at("envelope_truncated").get<bool>();
        return r;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("report is missing required fields: ") + e.what());
    }
}

std::string profile_config_to_json(const ProfileConfig& pc) {
    return profile_json(pc).dump(2) + "\n";
}

namespace {

json breakdown_json(const FitnessBreakdown& fb) {
    return {{"total", fb.total},          {"phase_term", fb.phase_term},
            {"symmetry_term", fb.symmetry_term}, {"fwhm_term", fb.fwhm_term},
            {"feasible", fb.feasible},    {"fwhm_nm", fb.fwhm_nm},
            {"min_domain_um", fb.min_domain_um}};
}

}  // namespace

std::string optimization_to_json(const OptimizationResult& run, const GaConfig& cfg) {
    json j;
    j["schema"] = "spdckit-optimization v1";
    j["config"] = {{"order_index", cfg.order_index},
                   {"population", cfg.population},
                   {"generations", cfg.generations},
                   {"tournament", cfg.tournament},
                   {"crossover_rate", cfg.crossover_rate},
                   {"blend_alpha", cfg.blend_alpha},
                   {"mutation_rate", cfg.mutation_rate},
                   {"mutation_sigma_frac", cfg.mutation_sigma_frac},
                   {"sigma_half_life", cfg.sigma_half_life},
                   {"elitism", cfg.elitism},
                   {"seed", cfg.seed},
                   {"alpha_limit", cfg.alpha_limit},
                   {"beta_limit", cfg.beta_limit},
                   {"target_fwhm_nm", cfg.target_fwhm_nm},
                   {"min_domain_um", cfg.min_domain_um},
                   {"fitness_grid", cfg.fitness_grid},
                   {"device_length_um", cfg.device_length_um},
                   {"warm_start", cfg.warm_start}};
    j["best_genome"] = run.best;
    j["best_profile"] = profile_json(profile_config_from_shape(genome_to_profile(run.best)));
    j["best_fitness"] = breakdown_json(run.best_fitness);
    j["refined"] = breakdown_json(run.refined);
    j["evaluations"] = run.evaluations;
    j["generations_run"] = run.generations_run;
    j["stalled"] = run.stalled;
    j["base_period_um"] = run.base_period_um;
    return j.dump(2) + "\n";
}

}  // namespace spdckit
