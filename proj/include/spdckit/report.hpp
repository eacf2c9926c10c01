#pragma once

#include <string>
#include <vector>

#include "spdckit/config.hpp"
#include "spdckit/interferometer.hpp"
#include "spdckit/jsa.hpp"
#include "spdckit/poling.hpp"

namespace spdckit {

// One profile pushed through the whole pipeline: domains, spectrum, phase,
// interferogram, and the headline figures of merit, in a single record that
// serializes losslessly to JSON.

struct CandidateReport {
    ProfileConfig profile;
    double base_period_um = 0.0;
    double device_length_um = 0.0;

    std::size_t domain_count = 0;  // full domains, before the truncated remainder
    double min_domain_um = 0.0;
    bool final_truncated = false;
    double constraint_limit_um = 0.0;
    bool feasible = false;

    double fwhm_nm = 0.0;
    double fwhm_rad_fs = 0.0;
    std::vector<double> peak_wavelengths_nm;
    double symmetry_residual = 0.0;
    double intensity_total_variation = 0.0;
    bool spectrum_truncated = false;
    double group_slope_fs = 0.0;

    double visibility = 0.0;
    double envelope_peak_fs = 0.0;
    double envelope_fwhm_fs = 0.0;
    int envelope_peak_count = 0;
    double measured_fringe_period_fs = 0.0;  // NaN at low contrast
    double nominal_fringe_period_fs = 0.0;
    bool envelope_truncated = false;
};

// the intermediate products alongside the report, for callers that also emit
// the curves
struct CandidateEvaluation {
    CandidateReport report;
    DomainSequence domains;
    JointSpectrum spectrum;
    Interferogram interferogram;
};

CandidateEvaluation evaluate_candidate(const ProfileSpec& spec, const DispersionModel& d,
                                       const SpectralGrid& grid,
                                       const InterferometerConfig& icfg,
                                       double constraint_limit_um = 4.0);

CandidateReport evaluate_candidate_report(const ProfileSpec& spec, const DispersionModel& d,
                                          const SpectralGrid& grid,
                                          const InterferometerConfig& icfg,
                                          double constraint_limit_um = 4.0);

// versioned JSON; parse(serialize(r)) reproduces r bit for bit, NaN included
std::string report_to_json(const CandidateReport& r);
CandidateReport report_from_json(const std::string& text);

// the config-file profile block on its own, pasteable into a run config
std::string profile_config_to_json(const ProfileConfig& pc);

// full optimizer run record: config echo, best genome and fitness breakdown,
// refined re-evaluation, stop diagnostics
std::string optimization_to_json(const OptimizationResult& run, const GaConfig& cfg);

}  // namespace spdckit
