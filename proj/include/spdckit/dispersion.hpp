#pragma once

#include <map>
#include <string>

#include "spdckit/core.hpp"

namespace spdckit {

// Refractive-index model forms. Coefficient names follow the cited sources in
// the materials data file.
enum class IndexForm {
    constant,                    // n = n0
    sellmeier_poles,             // n^2 = a0 + sum_j b_j lam^2 / (lam^2 - c_j)
    edwards_lawrence_ordinary,   // temperature-dependent congruent LiNbO3, o axis
    jundt_extraordinary,         // temperature-dependent congruent LiNbO3, e axis
};

struct SellmeierModel {
    std::string name;
    IndexForm form = IndexForm::constant;
    std::map<std::string, double> coeff;
    double valid_lo_um = 0.0;
    double valid_hi_um = 1e9;
    double temperature_c = 25.0;
    double index_offset = 0.0;  // additive tweak on n, models waveguide loading

    // effective index at a vacuum wavelength; throws std::out_of_range naming
    // the model when outside the validity window
    double refractive_index(double lambda_um) const;
};

// propagation constant n(omega) * omega / c in rad/um
double beta(const SellmeierModel& m, AngularFrequency omega);

// d(beta)/d(omega) in fs/um via 5-point central differences
double beta_prime(const SellmeierModel& m, AngularFrequency omega, double step_rad_fs = 1e-4);

struct MaterialLibrary {
    int version = 0;
    std::map<std::string, SellmeierModel> materials;
    struct RoleMap {
        std::string signal_h, idler_v, bdl_h, bdl_v;
    };
    std::map<std::string, RoleMap> sets;
    std::string default_set;
};

// parses the JSON materials file; throws ConfigError on malformed content
MaterialLibrary load_material_library(const std::string& path);

struct DispersionOptions {
    std::string set_name;            // empty: library default
    double temperature_c = 25.0;
    double pump_wavelength_nm = 775.0;
    char pump_polarization = 'H';    // 'H' or 'V'
    bool swap_waveguide_axes = false;
    double offset_signal_h = 0.0;    // additive index offsets per role
    double offset_idler_v = 0.0;
    double offset_pump = 0.0;
};

// Frozen per-run bundle of the five material roles plus the pump frequency.
struct DispersionModel {
    SellmeierModel signal_h;  // horizontally polarized photon of the pair
    SellmeierModel idler_v;   // vertically polarized photon of the pair
    SellmeierModel pump;
    SellmeierModel bdl_h;     // birefringent delay line axes
    SellmeierModel bdl_v;
    AngularFrequency pump_omega;

    AngularFrequency degenerate_omega() const { return {0.5 * pump_omega.value}; }
};

DispersionModel make_dispersion_model(const MaterialLibrary& lib, const DispersionOptions& opt);

// Bulk phase mismatch beta_H(w0+W) + beta_V(w0-W) - beta_p(2 w0) in rad/um.
// This is the argument of the per-domain amplitude kernel; the poling grating
// contributes only the domain sign flips.
double mismatch_bulk(const DispersionModel& d, double detuning_rad_fs);

// mismatch including the first-order grating vector of period period_um,
// mismatch_bulk + 2 pi / period_um; zero at degeneracy defines the
// calibrated poling period
double delta_beta(const DispersionModel& d, double detuning_rad_fs, double period_um);

// finds the period with delta_beta(d, 0, period) = 0 by bracketing + bisection;
// throws CalibrationError when the bracket does not contain a sign change
double calibrate_period(const DispersionModel& d, double lo_um = 2.0, double hi_um = 1000.0);

// pump index offset that moves the calibrated period onto target_period_um;
// throws CalibrationError when no offset in [-0.05, 0.05] works
double fit_pump_offset(const DispersionModel& d, double target_period_um);

struct GroupProperties {
    double inv_group_velocity_h;  // fs/um
    double inv_group_velocity_v;  // fs/um
    double dgd_per_length;        // fs/um, |1/u_H - 1/u_V|
};

GroupProperties group_properties(const DispersionModel& d);

struct BdlDelays {
    double phase_delay_fs;    // (beta_V - beta_H) * y / omega0
    double group_delay_fs;    // (beta'_V - beta'_H) * y
    double phase_group_ratio; // phase_delay / group_delay
};

// delays of a birefringent plate of the BDL material pair, thickness in um,
// evaluated at the degenerate frequency
BdlDelays bdl_delays(const DispersionModel& d, double thickness_um);

}  // namespace spdckit
