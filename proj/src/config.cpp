#include "spdckit/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <variant>

#include "json.hpp"
#include "spdckit/errors.hpp"

namespace spdckit {

namespace {

using nlohmann::json;

// pulls known keys out of one JSON object, recording type problems and
// unknown keys as field-level issues
class Section {
  public:
    Section(const json* obj, std::string prefix, std::vector<std::string>& issues)
        : obj_(obj), prefix_(std::move(prefix)), issues_(issues) {}

    bool present() const { return obj_ != nullptr; }

    template <typename T>
    void get(const char* key, T& out, const char* type_name) {
        if (!obj_) return;
        seen_.insert(key);
        auto it = obj_->find(key);
        if (it == obj_->end()) return;
        try {
            out = it->get<T>();
        } catch (const json::exception&) {
            issues_.push_back(prefix_ + key + ": expected " + type_name);
        }
    }

    void get_optional_double(const char* key, double& out) {
        if (!obj_) return;
        seen_.insert(key);
        auto it = obj_->find(key);
        if (it == obj_->end()) return;
        if (it->is_null()) {
            out = std::numeric_limits<double>::quiet_NaN();
            return;
        }
        try {
            out = it->get<double>();
        } catch (const json::exception&) {
            issues_.push_back(prefix_ + key + ": expected a number or null");
        }
    }

    const json* subsection(const char* key) {
        if (!obj_) return nullptr;
        seen_.insert(key);
        auto it = obj_->find(key);
        if (it == obj_->end()) return nullptr;
        if (!it->is_object()) {
            issues_.push_back(prefix_ + key + ": expected an object");
            return nullptr;
        }
        return &*it;
    }

    void mark_seen(const char* key) { seen_.insert(key); }

    void finish() {
        if (!obj_) return;
        for (const auto& [key, value] : obj_->items())
            if (!seen_.count(key)) issues_.push_back(prefix_ + key + ": unknown key");
    }

  private:
    const json* obj_;
    std::string prefix_;
    std::vector<std::string>& issues_;
    std::set<std::string> seen_;
};

}  // namespace

RunConfig default_run_config() { return RunConfig{}; }

RunConfig load_run_config(const std::string& path, std::vector<std::string>& issues) {
    RunConfig cfg;
    std::ifstream in(path);
    if (!in) {
        issues.push_back("cannot open config file '" + path + "'");
        return cfg;
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        issues.push_back("config file '" + path + "' is not valid JSON: " + e.what());
        return cfg;
    }
    if (!j.is_object()) {
        issues.push_back("config root must be a JSON object");
        return cfg;
    }

    Section root(&j, "", issues);

    Section materials(root.subsection("materials"), "materials.", issues);
    materials.get("file", cfg.materials_file, "a string");
    materials.get("set", cfg.material_set, "a string");
    materials.get("temperature_c", cfg.temperature_c, "a number");
    materials.finish();

    Section pump(root.subsection("pump"), "pump.", issues);
    pump.get("wavelength_nm", cfg.pump_wavelength_nm, "a number");
    pump.get("polarization", cfg.pump_polarization, "a string");
    pump.get("index_offset", cfg.offset_pump, "a number");
    pump.finish();

    Section wg(root.subsection("waveguide"), "waveguide.", issues);
    wg.get("length_um", cfg.device_length_um, "a number");
    wg.get("swap_axes", cfg.swap_waveguide_axes, "a boolean");
    wg.get("offset_signal_h", cfg.offset_signal_h, "a number");
    wg.get("offset_idler_v", cfg.offset_idler_v, "a number");
    wg.get("poling_period_um", cfg.poling_period_um, "a number");
    wg.finish();

    const json* prof_obj = root.subsection("profile");
    Section prof(prof_obj, "profile.", issues);
    prof.get("type", cfg.profile.type, "a string");
    prof.get("rate_per_mm", cfg.profile.rate_per_mm, "a number");
    prof.get("alpha", cfg.profile.alpha, "a number");
    prof.get("beta", cfg.profile.beta, "a number");
    prof.mark_seen("terms");
    if (prof_obj && prof_obj->contains("terms")) {
        const json& terms = (*prof_obj)["terms"];
        if (!terms.is_array()) {
            issues.push_back("profile.terms: expected an array");
        } else {
            cfg.profile.terms.clear();
            for (std::size_t i = 0; i < terms.size(); ++i) {
                const json& t = terms[i];
                if (!t.is_object() || !t.contains("alpha") || !t.contains("beta")) {
                    issues.push_back("profile.terms[" + std::to_string(i) +
                                     "]: expected {alpha, beta}");
                    continue;
                }
                try {
                    cfg.profile.terms.push_back(
                        {t["alpha"].get<double>(), t["beta"].get<double>()});
                } catch (const json::exception&) {
                    issues.push_back("profile.terms[" + std::to_string(i) +
                                     "]: alpha and beta must be numbers");
                }
            }
        }
    }
    prof.finish();

    Section grid(root.subsection("grid"), "grid.", issues);
    grid.get("count", cfg.grid_count, "an integer");
    grid.get("min_wavelength_nm", cfg.grid_min_wavelength_nm, "a number");
    grid.get_optional_double("half_span_rad_fs", cfg.grid_half_span_rad_fs);
    grid.finish();

    Section ifm(root.subsection("interferometer"), "interferometer.", issues);
    ifm.get("phase_group_ratio", cfg.phase_group_ratio, "a number");
    ifm.get("bdl_thickness_per_delay", cfg.bdl_thickness_per_delay, "a number");
    ifm.get("use_material_ratio", cfg.use_material_bdl_ratio, "a boolean");
    ifm.get("compensate_group_slope", cfg.compensate_group_slope, "a boolean");
    ifm.get_optional_double("delay_start_fs", cfg.delay_start_fs);
    ifm.get_optional_double("delay_stop_fs", cfg.delay_stop_fs);
    ifm.get_optional_double("delay_step_fs", cfg.delay_step_fs);
    ifm.finish();

    Section ga(root.subsection("optimizer"), "optimizer.", issues);
    ga.get("order_index", cfg.optimizer.order_index, "an integer");
    ga.get("population", cfg.optimizer.population, "an integer");
    ga.get("generations", cfg.optimizer.generations, "an integer");
    ga.get("tournament", cfg.optimizer.tournament, "an integer");
    ga.get("crossover_rate", cfg.optimizer.crossover_rate, "a number");
    ga.get("blend_alpha", cfg.optimizer.blend_alpha, "a number");
    ga.get("mutation_rate", cfg.optimizer.mutation_rate, "a number");
    ga.get("mutation_sigma_frac", cfg.optimizer.mutation_sigma_frac, "a number");
    ga.get("sigma_half_life", cfg.optimizer.sigma_half_life, "an integer");
    ga.get("elitism", cfg.optimizer.elitism, "an integer");
    ga.get("seed", cfg.optimizer.seed, "an unsigned integer");
    ga.get("alpha_limit", cfg.optimizer.alpha_limit, "a number");
    ga.get("beta_limit", cfg.optimizer.beta_limit, "a number");
    ga.get("target_fwhm_nm", cfg.optimizer.target_fwhm_nm, "a number");
    ga.get("min_domain_um", cfg.optimizer.min_domain_um, "a number");
    ga.get("fitness_grid", cfg.optimizer.fitness_grid, "an integer");
    ga.get("stall_tol", cfg.optimizer.stall_tol, "a number");
    ga.get("stall_generations", cfg.optimizer.stall_generations, "an integer");
    ga.get("init_attempts", cfg.optimizer.init_attempts, "an integer");
    ga.get("warm_start", cfg.optimizer.warm_start, "a boolean");
    ga.finish();

    root.get("output_dir", cfg.output_dir, "a string");
    root.finish();

    return cfg;
}

std::vector<std::string> validate_run_config(const RunConfig& cfg) {
    std::vector<std::string> issues;
    auto bad = [&](const std::string& msg) { issues.push_back(msg); };

    if (!std::isfinite(cfg.temperature_c)) bad("materials.temperature_c: must be finite");
    if (!(cfg.pump_wavelength_nm > 0.0) || !std::isfinite(cfg.pump_wavelength_nm))
        bad("pump.wavelength_nm: must be positive");
    if (cfg.pump_polarization != "H" && cfg.pump_polarization != "V")
        bad("pump.polarization: must be \"H\" or \"V\"");
    if (!(cfg.device_length_um > 0.0) || !std::isfinite(cfg.device_length_um))
        bad("waveguide.length_um: must be positive");
    if (!std::isfinite(cfg.poling_period_um) || cfg.poling_period_um < 0.0)
        bad("waveguide.poling_period_um: must be >= 0 (0 calibrates at run time)");

    const std::string& t = cfg.profile.type;
    if (t != "uniform" && t != "linear" && t != "apodized" && t != "polynomial") {
        bad("profile.type: must be uniform, linear, apodized, or polynomial");
    } else if (t == "linear") {
        if (!std::isfinite(cfg.profile.rate_per_mm)) bad("profile.rate_per_mm: must be finite");
    } else if (t == "apodized") {
        if (!std::isfinite(cfg.profile.alpha) || cfg.profile.alpha == 0.0)
            bad("profile.alpha: must be finite and nonzero");
        if (!std::isfinite(cfg.profile.beta) || std::abs(cfg.profile.beta) >= 2.0)
            bad("profile.beta: must satisfy |beta| < 2 so every domain stays defined");
    } else if (t == "polynomial") {
        if (cfg.profile.terms.empty()) bad("profile.terms: polynomial profile needs terms");
        for (std::size_t i = 0; i < cfg.profile.terms.size(); ++i)
            if (!std::isfinite(cfg.profile.terms[i].alpha) ||
                !std::isfinite(cfg.profile.terms[i].beta))
                bad("profile.terms[" + std::to_string(i) + "]: values must be finite");
    }

    if (cfg.grid_count < 33 || cfg.grid_count % 2 == 0)
        bad("grid.count: must be odd and >= 33");
    if (cfg.grid_count > (1u << 24)) bad("grid.count: unreasonably large (max 2^24)");
    if (std::isnan(cfg.grid_half_span_rad_fs)) {
        if (!(cfg.grid_min_wavelength_nm > 0.0) ||
            !(cfg.grid_min_wavelength_nm < 2.0 * cfg.pump_wavelength_nm))
            bad("grid.min_wavelength_nm: must lie between 0 and the degenerate wavelength");
    } else if (!(cfg.grid_half_span_rad_fs > 0.0)) {
        bad("grid.half_span_rad_fs: must be positive when given");
    }

    if (!cfg.use_material_bdl_ratio &&
        (!(cfg.phase_group_ratio > 0.0) || !std::isfinite(cfg.phase_group_ratio)))
        bad("interferometer.phase_group_ratio: must be positive");
    if (!std::isnan(cfg.delay_start_fs) && !std::isnan(cfg.delay_stop_fs) &&
        !(cfg.delay_stop_fs > cfg.delay_start_fs))
        bad("interferometer.delay_stop_fs: must exceed delay_start_fs");
    if (!std::isnan(cfg.delay_step_fs) && !(cfg.delay_step_fs > 0.0))
        bad("interferometer.delay_step_fs: must be positive when given");

    const GaConfig& ga = cfg.optimizer;
    if (ga.order_index < 0 || ga.order_index > 63) bad("optimizer.order_index: must be in [0, 63]");
    if (ga.population < 4) bad("optimizer.population: must be >= 4");
    if (ga.generations < 1) bad("optimizer.generations: must be >= 1");
    if (ga.tournament < 1) bad("optimizer.tournament: must be >= 1");
    if (!(ga.crossover_rate >= 0.0 && ga.crossover_rate <= 1.0))
        bad("optimizer.crossover_rate: must be in [0, 1]");
    if (!(ga.mutation_rate >= 0.0 && ga.mutation_rate <= 1.0))
        bad("optimizer.mutation_rate: must be in [0, 1]");
    if (!(ga.blend_alpha >= 0.0)) bad("optimizer.blend_alpha: must be >= 0");
    if (!(ga.mutation_sigma_frac > 0.0)) bad("optimizer.mutation_sigma_frac: must be positive");
    if (ga.sigma_half_life < 0) bad("optimizer.sigma_half_life: must be >= 0");
    if (ga.elitism < 0 || ga.elitism >= ga.population)
        bad("optimizer.elitism: must be in [0, population)");
    if (!(ga.alpha_limit > 0.0)) bad("optimizer.alpha_limit: must be positive");
    if (!(ga.beta_limit > 0.0)) bad("optimizer.beta_limit: must be positive");
    if (!(ga.target_fwhm_nm > 0.0)) bad("optimizer.target_fwhm_nm: must be positive");
    if (!(ga.min_domain_um >= 0.0)) bad("optimizer.min_domain_um: must be >= 0");
    if (ga.fitness_grid < 33 || ga.fitness_grid % 2 == 0)
        bad("optimizer.fitness_grid: must be odd and >= 33");
    if (!(ga.stall_tol >= 0.0)) bad("optimizer.stall_tol: must be >= 0");
    if (ga.stall_generations < 0) bad("optimizer.stall_generations: must be >= 0");
    if (ga.init_attempts < 1) bad("optimizer.init_attempts: must be >= 1");

    if (cfg.output_dir.empty()) bad("output_dir: must not be empty");
    return issues;
}

std::string run_config_to_json(const RunConfig& cfg) {
    json j;
    j["materials"] = {{"file", cfg.materials_file},
                      {"set", cfg.material_set},
                      {"temperature_c", cfg.temperature_c}};
    j["pump"] = {{"wavelength_nm", cfg.pump_wavelength_nm},
                 {"polarization", cfg.pump_polarization},
                 {"index_offset", cfg.offset_pump}};
    j["waveguide"] = {{"length_um", cfg.device_length_um},
                      {"swap_axes", cfg.swap_waveguide_axes},
                      {"offset_signal_h", cfg.offset_signal_h},
                      {"offset_idler_v", cfg.offset_idler_v},
                      {"poling_period_um", cfg.poling_period_um}};
    json prof = {{"type", cfg.profile.type}};
    if (cfg.profile.type == "linear") prof["rate_per_mm"] = cfg.profile.rate_per_mm;
    if (cfg.profile.type == "apodized") {
        prof["alpha"] = cfg.profile.alpha;
        prof["beta"] = cfg.profile.beta;
    }
    if (cfg.profile.type == "polynomial") {
        json terms = json::array();
        for (const auto& t : cfg.profile.terms)
            terms.push_back({{"alpha", t.alpha}, {"beta", t.beta}});
        prof["terms"] = terms;
    }
    j["profile"] = prof;
    j["grid"] = {{"count", cfg.grid_count}, {"min_wavelength_nm", cfg.grid_min_wavelength_nm}};
    if (!std::isnan(cfg.grid_half_span_rad_fs))
        j["grid"]["half_span_rad_fs"] = cfg.grid_half_span_rad_fs;
    json ifm = {{"phase_group_ratio", cfg.phase_group_ratio},
                {"bdl_thickness_per_delay", cfg.bdl_thickness_per_delay},
                {"use_material_ratio", cfg.use_material_bdl_ratio},
                {"compensate_group_slope", cfg.compensate_group_slope}};
    auto put_opt = [&](const char* k, double v) {
        if (!std::isnan(v)) ifm[k] = v;
    };
    put_opt("delay_start_fs", cfg.delay_start_fs);
    put_opt("delay_stop_fs", cfg.delay_stop_fs);
    put_opt("delay_step_fs", cfg.delay_step_fs);
    j["interferometer"] = ifm;
    j["optimizer"] = {{"order_index", cfg.optimizer.order_index},
                      {"population", cfg.optimizer.population},
                      {"generations", cfg.optimizer.generations},
                      {"tournament", cfg.optimizer.tournament},
                      {"crossover_rate", cfg.optimizer.crossover_rate},
                      {"blend_alpha", cfg.optimizer.blend_alpha},
                      {"mutation_rate", cfg.optimizer.mutation_rate},
                      {"mutation_sigma_frac", cfg.optimizer.mutation_sigma_frac},
                      {"sigma_half_life", cfg.optimizer.sigma_half_life},
                      {"elitism", cfg.optimizer.elitism},
                      {"seed", cfg.optimizer.seed},
                      {"alpha_limit", cfg.optimizer.alpha_limit},
                      {"beta_limit", cfg.optimizer.beta_limit},
                      {"target_fwhm_nm", cfg.optimizer.target_fwhm_nm},
                      {"min_domain_um", cfg.optimizer.min_domain_um},
                      {"fitness_grid", cfg.optimizer.fitness_grid},
                      {"stall_tol", cfg.optimizer.stall_tol},
                      {"stall_generations", cfg.optimizer.stall_generations},
                      {"init_attempts", cfg.optimizer.init_attempts},
                      {"warm_start", cfg.optimizer.warm_start}};
    j["output_dir"] = cfg.output_dir;
    return j.dump(2) + "\n";
}

std::string resolve_against(const std::string& base_file, const std::string& relative) {
    namespace fs = std::filesystem;
    fs::path rel(relative);
    if (rel.is_absolute() || base_file.empty()) return relative;
    const fs::path sibling = fs::path(base_file).parent_path() / rel;
    if (fs::exists(sibling)) return sibling.string();
    return relative;
}

ProfileShape shape_from_profile_config(const ProfileConfig& pc) {
    if (pc.type == "uniform") return UniformProfile{};
    if (pc.type == "linear") return LinearChirpProfile{pc.rate_per_mm};
    if (pc.type == "apodized") return ApodizedChirpProfile{pc.alpha, pc.beta};
    if (pc.type == "polynomial") return AsymmetricPolynomialProfile{pc.terms};
    throw ConfigError("unknown profile type '" + pc.type + "'");
}

ProfileConfig profile_config_from_shape(const ProfileShape& shape) {
    ProfileConfig pc;
    if (std::holds_alternative<UniformProfile>(shape)) {
        pc.type = "uniform";
    } else if (const auto* lin = std::get_if<LinearChirpProfile>(&shape)) {
        pc.type = "linear";
        pc.rate_per_mm = lin->rate_per_mm;
    } else if (const auto* apo = std::get_if<ApodizedChirpProfile>(&shape)) {
        pc.type = "apodized";
        pc.alpha = apo->alpha;
        pc.beta = apo->beta;
    } else {
        pc.type = "polynomial";
        pc.terms = std::get<AsymmetricPolynomialProfile>(shape).terms;
    }
    return pc;
}

ProfileConfig load_profile_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open profile file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("profile file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw ConfigError("profile file root must be a JSON object");

    // a bare block carries "type"; anything else is treated as a run config
    if (!j.contains("type")) {
        std::vector<std::string> issues;
        const RunConfig cfg = load_run_config(path, issues);
        if (!issues.empty()) {
            std::string msg = "problems in '" + path + "':";
            for (const auto& s : issues) msg += "\n  " + s;
            throw ConfigError(msg);
        }
        return cfg.profile;
    }

    ProfileConfig pc;
    std::vector<std::string> issues;
    Section block(&j, "", issues);
    block.get("type", pc.type, "a string");
    block.get("rate_per_mm", pc.rate_per_mm, "a number");
    block.get("alpha", pc.alpha, "a number");
    block.get("beta", pc.beta, "a number");
    block.mark_seen("terms");
    if (j.contains("terms")) {
        const json& terms = j["terms"];
        if (!terms.is_array()) {
            issues.push_back("terms: expected an array");
        } else {
            for (std::size_t i = 0; i < terms.size(); ++i) {
                const json& t = terms[i];
                if (!t.is_object() || !t.contains("alpha") || !t.contains("beta")) {
                    issues.push_back("terms[" + std::to_string(i) + "]: expected {alpha, beta}");
                    continue;
                }
                try {
                    pc.terms.push_back({t["alpha"].get<double>(), t["beta"].get<double>()});
                } catch (const json::exception&) {
                    issues.push_back("terms[" + std::to_string(i) +
                                     "]: alpha and beta must be numbers");
                }
            }
        }
    }
    block.finish();
    if (!issues.empty()) {
        std::string msg = "problems in '" + path + "':";
        for (const auto& s : issues) msg += "\n  " + s;
        throw ConfigError(msg);
    }
    (void)shape_from_profile_config(pc);  // rejects unknown type strings
    return pc;
}

DispersionOptions dispersion_options(const RunConfig& cfg) {
    DispersionOptions opt;
    opt.set_name = cfg.material_set;
    opt.temperature_c = cfg.temperature_c;
    opt.pump_wavelength_nm = cfg.pump_wavelength_nm;
    opt.pump_polarization = cfg.pump_polarization.empty() ? 'H' : cfg.pump_polarization[0];
    opt.swap_waveguide_axes = cfg.swap_waveguide_axes;
    opt.offset_signal_h = cfg.offset_signal_h;
    opt.offset_idler_v = cfg.offset_idler_v;
    opt.offset_pump = cfg.offset_pump;
    return opt;
}

SimulationSetup build_setup(const RunConfig& cfg, const std::string& config_path) {
    SimulationSetup s;

    const MaterialLibrary lib =
        load_material_library(resolve_against(config_path, cfg.materials_file));
    s.dispersion = make_dispersion_model(lib, dispersion_options(cfg));

    s.period_um = cfg.poling_period_um > 0.0 ? cfg.poling_period_um
                                             : calibrate_period(s.dispersion);

    s.profile = ProfileSpec{shape_from_profile_config(cfg.profile), s.period_um,
                            cfg.device_length_um};

    double half_span = cfg.grid_half_span_rad_fs;
    if (std::isnan(half_span)) {
        half_span = wavelength_to_omega(cfg.grid_min_wavelength_nm).value -
                    s.dispersion.degenerate_omega().value;
        if (!(half_span > 0.0))
            throw ConfigError("grid.min_wavelength_nm must be shorter than degeneracy");
    }
    s.grid = make_symmetric_grid(cfg.grid_count, half_span);

    s.interferometer.phase_group_ratio =
        cfg.use_material_bdl_ratio ? bdl_delays(s.dispersion, 1000.0).phase_group_ratio
                                   : cfg.phase_group_ratio;
    s.interferometer.compensate_group_slope = cfg.compensate_group_slope;
    s.interferometer.delay_start_fs = cfg.delay_start_fs;
    s.interferometer.delay_stop_fs = cfg.delay_stop_fs;
    s.interferometer.delay_step_fs = cfg.delay_step_fs;

    s.optimizer = cfg.optimizer;
    s.optimizer.device_length_um = cfg.device_length_um;
    return s;
}

}  // namespace spdckit
