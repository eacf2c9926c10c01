#include "spdckit/dispersion.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "spdckit/errors.hpp"

namespace spdckit {

namespace {

double coeff_at(const SellmeierModel& m, const char* key) {
    auto it = m.coeff.find(key);
    if (it == m.coeff.end())
        throw ConfigError("material '" + m.name + "' is missing coefficient '" + key + "'");
    return it->second;
}

double n_squared_sellmeier_poles(const SellmeierModel& m, double lam) {
    const double l2 = lam * lam;
    double n2 = coeff_at(m, "a0");
    for (int j = 1;; ++j) {
        const std::string b = "b" + std::to_string(j);
        const std::string c = "c" + std::to_string(j);
        auto bi = m.coeff.find(b);
        if (bi == m.coeff.end()) break;
        auto ci = m.coeff.find(c);
        if (ci == m.coeff.end())
            throw ConfigError("material '" + m.name + "' has " + b + " without " + c);
        n2 += bi->second * l2 / (l2 - ci->second);
    }
    return n2;
}

double n_squared_edwards_lawrence(const SellmeierModel& m, double lam) {
    const double t = m.temperature_c;
    const double t0 = 24.5;
    const double f = (t - t0) * (t + t0 + 546.0);
    const double a1 = coeff_at(m, "a1"), a2 = coeff_at(m, "a2");
    const double a3 = coeff_at(m, "a3"), a4 = coeff_at(m, "a4");
    const double b1 = coeff_at(m, "b1"), b2 = coeff_at(m, "b2"), b3 = coeff_at(m, "b3");
    const double pole = a3 + b2 * f;
    return a1 + (a2 + b1 * f) / (lam * lam - pole * pole) + b3 * f - a4 * lam * lam;
}

double n_squared_jundt(const SellmeierModel& m, double lam) {
    const double t = m.temperature_c;
    const double f = (t - 24.5) * (t + 570.82);
    const double l2 = lam * lam;
    const double a1 = coeff_at(m, "a1"), a2 = coeff_at(m, "a2"), a3 = coeff_at(m, "a3");
    const double a4 = coeff_at(m, "a4"), a5 = coeff_at(m, "a5"), a6 = coeff_at(m, "a6");
    const double b1 = coeff_at(m, "b1"), b2 = coeff_at(m, "b2");
    const double b3 = coeff_at(m, "b3"), b4 = coeff_at(m, "b4");
    const double pole1 = a3 + b3 * f;
    return a1 + b1 * f + (a2 + b2 * f) / (l2 - pole1 * pole1) + (a4 + b4 * f) / (l2 - a5 * a5) -
           a6 * l2;
}

}  // namespace

double SellmeierModel::refractive_index(double lambda_um) const {
    if (!std::isfinite(lambda_um) || lambda_um <= 0.0)
        throw std::domain_error("wavelength must be positive, got " + std::to_string(lambda_um) +
                                " um (material '" + name + "')");
    if (lambda_um < valid_lo_um || lambda_um > valid_hi_um) {
        std::ostringstream os;
        os << "wavelength " << lambda_um * 1e3 << " nm outside validity window ["
           << valid_lo_um * 1e3 << ", " << valid_hi_um * 1e3 << "] nm of material '" << name
           << "'";
        throw std::out_of_range(os.str());
    }

    double n2 = 0.0;
    switch (form) {
        case IndexForm::constant:
            return coeff_at(*this, "n0") + index_offset;
        case IndexForm::sellmeier_poles:
            n2 = n_squared_sellmeier_poles(*this, lambda_um);
            break;
        case IndexForm::edwards_lawrence_ordinary:
            n2 = n_squared_edwards_lawrence(*this, lambda_um);
            break;
        case IndexForm::jundt_extraordinary:
            n2 = n_squared_jundt(*this, lambda_um);
            break;
    }
    if (!(n2 > 0.0))
        throw std::out_of_range("index form of material '" + name +
                                "' not positive definite at " + std::to_string(lambda_um) + " um");
    return std::sqrt(n2) + index_offset;
}

double beta(const SellmeierModel& m, AngularFrequency omega) {
    const double lambda_um = two_pi * speed_of_light_um_fs / omega.value;
    return m.refractive_index(lambda_um) * omega.value / speed_of_light_um_fs;
}

double beta_prime(const SellmeierModel& m, AngularFrequency omega, double step_rad_fs) {
    const double h = step_rad_fs;
    const double w = omega.value;
    const double fm2 = beta(m, {w - 2.0 * h});
    const double fm1 = beta(m, {w - h});
    const double fp1 = beta(m, {w + h});
    const double fp2 = beta(m, {w + 2.0 * h});
    return (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
}

namespace {

IndexForm parse_form(const std::string& s, const std::string& material) {
    if (s == "constant") return IndexForm::constant;
    if (s == "sellmeier_poles") return IndexForm::sellmeier_poles;
    if (s == "edwards_lawrence_ordinary") return IndexForm::edwards_lawrence_ordinary;
    if (s == "jundt_extraordinary") return IndexForm::jundt_extraordinary;
    throw ConfigError("material '" + material + "' has unknown index form '" + s + "'");
}

}  // namespace

MaterialLibrary load_material_library(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open materials file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("materials file '" + path + "' is not valid JSON: " + e.what());
    }

    MaterialLibrary lib;
    try {
        lib.version = j.at("version").get<int>();
        for (const auto& [name, jm] : j.at("materials").items()) {
            SellmeierModel m;
            m.name = name;
            m.form = parse_form(jm.at("form").get<std::string>(), name);
            for (const auto& [k, v] : jm.at("coefficients").items())
                m.coeff[k] = v.get<double>();
            const auto& win = jm.at("valid_um");
            m.valid_lo_um = win.at(0).get<double>();
            m.valid_hi_um = win.at(1).get<double>();
            if (!(m.valid_lo_um > 0.0) || !(m.valid_hi_um > m.valid_lo_um))
                throw ConfigError("material '" + name + "' has an empty validity window");
            lib.materials[name] = std::move(m);
        }
        for (const auto& [name, js] : j.at("sets").items()) {
            MaterialLibrary::RoleMap rm;
            rm.signal_h = js.at("signal_h").get<std::string>();
            rm.idler_v = js.at("idler_v").get<std::string>();
            rm.bdl_h = js.at("bdl_h").get<std::string>();
            rm.bdl_v = js.at("bdl_v").get<std::string>();
            for (const std::string& r : {rm.signal_h, rm.idler_v, rm.bdl_h, rm.bdl_v})
                if (!lib.materials.count(r))
                    throw ConfigError("set '" + name + "' references unknown material '" + r + "'");
            lib.sets[name] = std::move(rm);
        }
        lib.default_set = j.at("default_set").get<std::string>();
        if (!lib.sets.count(lib.default_set))
            throw ConfigError("default_set '" + lib.default_set + "' is not a defined set");
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("materials file '" + path + "' has invalid schema: " + e.what());
    }
    return lib;
}

DispersionModel make_dispersion_model(const MaterialLibrary& lib, const DispersionOptions& opt) {
    const std::string set_name = opt.set_name.empty() ? lib.default_set : opt.set_name;
    auto it = lib.sets.find(set_name);
    if (it == lib.sets.end()) throw ConfigError("unknown material set '" + set_name + "'");
    const auto& rm = it->second;

    DispersionModel d;
    d.signal_h = lib.materials.at(rm.signal_h);
    d.idler_v = lib.materials.at(rm.idler_v);
    d.bdl_h = lib.materials.at(rm.bdl_h);
    d.bdl_v = lib.materials.at(rm.bdl_v);
    if (opt.swap_waveguide_axes) std::swap(d.signal_h, d.idler_v);
    for (SellmeierModel* m : {&d.signal_h, &d.idler_v, &d.bdl_h, &d.bdl_v})
        m->temperature_c = opt.temperature_c;
    d.signal_h.index_offset += opt.offset_signal_h;
    d.idler_v.index_offset += opt.offset_idler_v;

    if (opt.pump_polarization != 'H' && opt.pump_polarization != 'V')
        throw ConfigError(std::string("pump polarization must be 'H' or 'V', got '") +
                          opt.pump_polarization + "'");
    d.pump = opt.pump_polarization == 'H' ? d.signal_h : d.idler_v;
    d.pump.index_offset += opt.offset_pump;
    d.pump_omega = wavelength_to_omega(opt.pump_wavelength_nm);
    return d;
}

double mismatch_bulk(const DispersionModel& d, double detuning_rad_fs) {
    const double w0 = d.degenerate_omega().value;
    return beta(d.signal_h, {w0 + detuning_rad_fs}) + beta(d.idler_v, {w0 - detuning_rad_fs}) -
           beta(d.pump, d.pump_omega);
}

double delta_beta(const DispersionModel& d, double detuning_rad_fs, double period_um) {
    if (!(period_um > 0.0)) throw std::domain_error("poling period must be positive");
    return mismatch_bulk(d, detuning_rad_fs) + two_pi / period_um;
}

double calibrate_period(const DispersionModel& d, double lo_um, double hi_um) {
    double glo = delta_beta(d, 0.0, lo_um);
    double ghi = delta_beta(d, 0.0, hi_um);
    if (glo == 0.0) return lo_um;
    if (ghi == 0.0) return hi_um;
    if ((glo > 0.0) == (ghi > 0.0)) {
        std::ostringstream os;
        os << "no poling period in [" << lo_um << ", " << hi_um
           << "] um cancels the degenerate mismatch (" << glo << " vs " << ghi << " rad/um)";
        throw CalibrationError(os.str());
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo_um + hi_um);
        const double gm = delta_beta(d, 0.0, mid);
        if (gm == 0.0 || hi_um - lo_um < 1e-12) return mid;
        if ((gm > 0.0) == (glo > 0.0)) {
            lo_um = mid;
            glo = gm;
        } else {
            hi_um = mid;
        }
    }
    return 0.5 * (lo_um + hi_um);
}

double fit_pump_offset(const DispersionModel& d, double target_period_um) {
    if (!(target_period_um > 0.0))
        throw CalibrationError("target poling period must be positive");
    auto residual = [&](double offset) {
        DispersionModel t = d;
        t.pump.index_offset += offset;
        return delta_beta(t, 0.0, target_period_um);
    };
    double lo = -0.05, hi = 0.05;
    double glo = residual(lo), ghi = residual(hi);
    if ((glo > 0.0) == (ghi > 0.0))
        throw CalibrationError("no pump index offset in [-0.05, 0.05] reaches the target period");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = residual(mid);
        if (gm == 0.0 || hi - lo < 1e-15) return mid;
        if ((gm > 0.0) == (glo > 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

GroupProperties group_properties(const DispersionModel& d) {
    const AngularFrequency w0 = d.degenerate_omega();
    GroupProperties g;
    g.inv_group_velocity_h = beta_prime(d.signal_h, w0);
    g.inv_group_velocity_v = beta_prime(d.idler_v, w0);
    g.dgd_per_length = std::abs(g.inv_group_velocity_h - g.inv_group_velocity_v);
    return g;
}

BdlDelays bdl_delays(const DispersionModel& d, double thickness_um) {
    const AngularFrequency w0 = d.degenerate_omega();
    BdlDelays b;
    b.phase_delay_fs = (beta(d.bdl_v, w0) - beta(d.bdl_h, w0)) * thickness_um / w0.value;
    b.group_delay_fs = (beta_prime(d.bdl_v, w0) - beta_prime(d.bdl_h, w0)) * thickness_um;
    b.phase_group_ratio = b.phase_delay_fs / b.group_delay_fs;
    return b;
}

}  // namespace spdckit
