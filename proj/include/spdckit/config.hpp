#pragma once

#include <limits>
#include <string>
#include <vector>

#include "spdckit/dispersion.hpp"
#include "spdckit/interferometer.hpp"
#include "spdckit/optimizer.hpp"
#include "spdckit/poling.hpp"

namespace spdckit {

struct ProfileConfig {
    std::string type = "uniform";  // uniform | linear | apodized | polynomial
    double rate_per_mm = 0.0;      // linear
    double alpha = 1.0;            // apodized
    double beta = 0.0;             // apodized
    std::vector<PolynomialTerm> terms;  // polynomial
};

// one JSON document drives a whole run; defaults reproduce the plain uniform
// source
struct RunConfig {
    std::string materials_file = "data/materials.json";
    std::string material_set;  // empty: library default
    double temperature_c = 25.0;
    double pump_wavelength_nm = 775.0;
    std::string pump_polarization = "H";
    bool swap_waveguide_axes = false;
    double offset_signal_h = 0.0;
    double offset_idler_v = 0.0;
    double offset_pump = 0.0;

    double device_length_um = 16500.0;
    double poling_period_um = 0.0;  // <= 0: calibrate at run time
    ProfileConfig profile;

    std::size_t grid_count = 16385;
    double grid_min_wavelength_nm = 1375.0;  // short-wavelength grid edge
    double grid_half_span_rad_fs =
        std::numeric_limits<double>::quiet_NaN();  // set: overrides the edge

    double bdl_thickness_per_delay = 0.0;  // informational, um per fs, 0 = unused
    double phase_group_ratio = 1.0;
    bool use_material_bdl_ratio = false;  // take the ratio from the BDL materials
    bool compensate_group_slope = true;

    double delay_start_fs = std::numeric_limits<double>::quiet_NaN();
    double delay_stop_fs = std::numeric_limits<double>::quiet_NaN();
    double delay_step_fs = std::numeric_limits<double>::quiet_NaN();

    GaConfig optimizer;

    std::string output_dir = "out";
};

RunConfig default_run_config();

// reads the JSON file; structural problems (unreadable file, bad JSON, wrong
// value types, unknown keys) are appended to issues; semantic checks live in
// validate_run_config
RunConfig load_run_config(const std::string& path, std::vector<std::string>& issues);

// value-range and consistency checks; empty result means usable
std::vector<std::string> validate_run_config(const RunConfig& cfg);

// the loaded config rendered back to JSON (written next to outputs so every
// result directory is self-describing)
std::string run_config_to_json(const RunConfig& cfg);

// materials paths are resolved against the config file location first, the
// working directory second
std::string resolve_against(const std::string& base_file, const std::string& relative);

// conversions between the config profile block and the shape variant, shared
// by the loader, the reports, and the CLI; throws ConfigError on an unknown
// type string
ProfileShape shape_from_profile_config(const ProfileConfig& pc);
ProfileConfig profile_config_from_shape(const ProfileShape& shape);

// reads a JSON file that is either a bare profile block ({"type": ...}) or a
// full run config, and returns the profile; throws ConfigError
ProfileConfig load_profile_config(const std::string& path);

// the dispersion-model options a config implies
DispersionOptions dispersion_options(const RunConfig& cfg);

// everything the pipeline needs, assembled from a validated config
struct SimulationSetup {
    DispersionModel dispersion;
    double period_um = 0.0;  // calibrated unless the config pinned it
    ProfileSpec profile;
    SpectralGrid grid;
    InterferometerConfig interferometer;
    GaConfig optimizer;
};

SimulationSetup build_setup(const RunConfig& cfg, const std::string& config_path);

}  // namespace spdckit
