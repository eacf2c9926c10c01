#include <atomic>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "spdckit/config.hpp"
#include "spdckit/csv.hpp"
#include "spdckit/errors.hpp"
#include "spdckit/report.hpp"
#include "spdckit/scenario.hpp"
#include "spdckit/svg.hpp"

namespace {

using namespace spdckit;

RunConfig load_or_default(const std::string& path) {
    if (path.empty()) return default_run_config();
    std::vector<std::string> issues;
    RunConfig cfg = load_run_config(path, issues);
    const auto semantic = validate_run_config(cfg);
    issues.insert(issues.end(), semantic.begin(), semantic.end());
    if (!issues.empty()) {
        std::string msg = "config problems in '" + path + "':";
        for (const auto& s : issues) msg += "\n  " + s;
        throw ConfigError(msg);
    }
    return cfg;
}

// precedence: --out flag, then SPDCKIT_OUT_DIR, then the config value
void apply_out_dir(RunConfig& cfg, const std::string& cli_out) {
    if (!cli_out.empty()) {
        cfg.output_dir = cli_out;
        return;
    }
    if (const char* env = std::getenv("SPDCKIT_OUT_DIR"); env && *env) cfg.output_dir = env;
}

// --profile accepts a scenario name or a JSON file (bare profile block or
// full run config); empty keeps the config's own profile
ProfileConfig resolve_profile(const std::string& arg, const RunConfig& cfg) {
    if (arg.empty()) return cfg.profile;
    try {
        const ScenarioId id = parse_scenario(arg);
        if (id == ScenarioId::fig7_optimized)
            throw ConfigError(
                "fig7_optimized has no fixed profile; use run-scenario or optimize");
        return scenario_info(id).profile;
    } catch (const ConfigError&) {
        if (std::filesystem::exists(arg)) return load_profile_config(arg);
        throw;
    }
}

struct DelayRange {
    double start = 0.0, stop = 0.0, step = 0.0;
    bool set = false;
};

DelayRange parse_delay_range(const std::string& arg) {
    DelayRange r;
    if (arg.empty()) return r;
    std::istringstream in(arg);
    char c1 = 0, c2 = 0;
    if (!(in >> r.start >> c1 >> r.stop >> c2 >> r.step) || c1 != ':' || c2 != ':' ||
        !(in >> std::ws).eof())
        throw ConfigError("--delay-range must be start:stop:step in fs, got '" + arg + "'");
    if (!(r.step > 0.0) || !(r.stop > r.start))
        throw ConfigError("--delay-range needs stop > start and step > 0");
    r.set = true;
    return r;
}

struct CommonArgs {
    std::string config;
    std::string out;
    std::string profile;
    bool no_svg = false;
};

void add_common(CLI::App* sub, CommonArgs& a, bool with_profile = true) {
    sub->add_option("--config", a.config, "run config JSON file");
    sub->add_option("--out", a.out, "output directory (overrides config and SPDCKIT_OUT_DIR)");
    if (with_profile)
        sub->add_option("--profile", a.profile,
                        "scenario name or JSON file overriding the config profile");
    sub->add_flag("--no-svg", a.no_svg, "skip SVG plots");
}

int run_spectrum(const CommonArgs& a) {
    RunConfig cfg = load_or_default(a.config);
    apply_out_dir(cfg, a.out);
    cfg.profile = resolve_profile(a.profile, cfg);
    const SimulationSetup setup = build_setup(cfg, a.config);

    const DomainSequence seq = generate_domains(setup.profile);
    const JointSpectrum js = compute_spectrum(seq, setup.dispersion, setup.grid);
    const BandwidthReport bw = bandwidth(js);

    const std::filesystem::path dir(cfg.output_dir);
    csv::write_file(dir / "spectrum.csv", csv::spectrum_csv(js));
    if (!a.no_svg)
        csv::write_file(dir / "spectrum.svg", svg::spectrum_svg(js, cfg.profile.type + " spectrum"));
    csv::write_file(dir / "config.json", run_config_to_json(cfg));

    std::cout << "period_um        " << setup.period_um << "\n"
              << "domains          " << seq.full_domain_count << "\n"
              << "fwhm_nm          " << bw.fwhm_nm << "\n"
              << "fwhm_rad_fs      " << bw.fwhm_rad_fs << "\n"
              << "symmetry         " << bw.symmetry_residual << "\n"
              << "group_slope_fs   " << js.group_slope_fs << "\n"
              << "truncated        " << (bw.truncated ? "yes" : "no") << "\n"
              << "wrote            " << (dir / "spectrum.csv").string() << "\n";
    return 0;
}

int run_interferogram(const CommonArgs& a, const std::string& delay_range, bool no_comp) {
    RunConfig cfg = load_or_default(a.config);
    apply_out_dir(cfg, a.out);
    cfg.profile = resolve_profile(a.profile, cfg);
    if (no_comp) cfg.compensate_group_slope = false;
    const DelayRange dr = parse_delay_range(delay_range);
    if (dr.set) {
        cfg.delay_start_fs = dr.start;
        cfg.delay_stop_fs = dr.stop;
        cfg.delay_step_fs = dr.step;
    }
    const SimulationSetup setup = build_setup(cfg, a.config);

    const DomainSequence seq = generate_domains(setup.profile);
    const JointSpectrum js = compute_spectrum(seq, setup.dispersion, setup.grid);
    const Interferogram ig = coincidence_scan(js, setup.interferometer);

    const std::filesystem::path dir(cfg.output_dir);
    csv::write_file(dir / "interferogram.csv", csv::interferogram_csv(ig));
    if (!a.no_svg)
        csv::write_file(dir / "interferogram.svg",
                        svg::interferogram_svg(ig, cfg.profile.type + " interferogram"));
    csv::write_file(dir / "config.json", run_config_to_json(cfg));

    std::cout << "visibility       " << visibility(ig) << "\n"
              << "envelope_fwhm_fs " << ig.envelope_fwhm_fs << "\n"
              << "envelope_peak_fs " << ig.envelope_peak_fs << "\n"
              << "envelope_maxima  " << count_envelope_peaks(ig) << "\n"
              << "fringe_fs        " << ig.measured_fringe_period_fs << "\n"
              << "samples          " << ig.delay_fs.size() << "\n"
              << "wrote            " << (dir / "interferogram.csv").string() << "\n";
    return 0;
}

int run_optimize(const CommonArgs& a, const GaConfig& overrides, bool has_seed, bool has_gen,
                 bool has_pop, bool has_target, bool has_grid) {
    RunConfig cfg = load_or_default(a.config);
    apply_out_dir(cfg, a.out);
    SimulationSetup setup = build_setup(cfg, a.config);
    if (has_seed) setup.optimizer.seed = overrides.seed;
    if (has_gen) setup.optimizer.generations = overrides.generations;
    if (has_pop) setup.optimizer.population = overrides.population;
    if (has_target) setup.optimizer.target_fwhm_nm = overrides.target_fwhm_nm;
    if (has_grid) setup.optimizer.fitness_grid = overrides.fitness_grid;

    const OptimizationResult run = optimize(setup.optimizer, setup.dispersion);
    const ProfileConfig best = profile_config_from_shape(genome_to_profile(run.best));

    const std::filesystem::path dir(cfg.output_dir);
    csv::write_file(dir / "optimization.json", optimization_to_json(run, setup.optimizer));
    csv::write_file(dir / "best_profile.json", profile_config_to_json(best));
    csv::write_file(dir / "trace.csv", csv::trace_csv(run.trace));
    csv::write_file(dir / "config.json", run_config_to_json(cfg));

    std::cout << "generations      " << run.generations_run << (run.stalled ? " (stalled)" : "")
              << "\n"
              << "evaluations      " << run.evaluations << "\n"
              << "best_total       " << run.best_fitness.total << "\n"
              << "  phase_term     " << run.best_fitness.phase_term << "\n"
              << "  symmetry_term  " << run.best_fitness.symmetry_term << "\n"
              << "  fwhm_term      " << run.best_fitness.fwhm_term << "\n"
              << "best_fwhm_nm     " << run.best_fitness.fwhm_nm << "\n"
              << "refined_total    " << run.refined.total << "\n"
              << "min_domain_um    " << run.best_fitness.min_domain_um << "\n"
              << "wrote            " << (dir / "optimization.json").string() << "\n";
    return 0;
}

int run_scenarios(const CommonArgs& a, std::vector<std::string> names, bool all, int jobs) {
    RunConfig cfg = load_or_default(a.config);
    apply_out_dir(cfg, a.out);

    std::vector<ScenarioId> ids;
    if (all) {
        for (const auto& s : scenario_table()) ids.push_back(s.id);
    } else {
        if (names.empty())
            throw ConfigError("run-scenario needs scenario names or --all (valid: " +
                              [] {
                                  std::string v;
                                  for (const auto& s : scenario_table()) {
                                      if (!v.empty()) v += ", ";
                                      v += s.name;
                                  }
                                  return v;
                              }() +
                              ")");
        for (const auto& n : names) ids.push_back(parse_scenario(n));
    }

    const ScenarioOptions opt{!a.no_svg};
    std::vector<ScenarioResult> results(ids.size());
    std::vector<std::exception_ptr> errors(ids.size());

    if (jobs <= 1 || ids.size() == 1) {
        for (std::size_t i = 0; i < ids.size(); ++i) {
            results[i] = run_scenario(ids[i], cfg, a.config, opt);
            std::cout << metrics_text(results[i]) << "\n";
        }
        return 0;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= ids.size()) return;
            try {
                results[i] = run_scenario(ids[i], cfg, a.config, opt);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(jobs),
                                                        ids.size());
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        std::cout << metrics_text(results[i]) << "\n";
    }
    return 0;
}

int run_export_profile(const CommonArgs& a, std::size_t samples) {
    RunConfig cfg = load_or_default(a.config);
    apply_out_dir(cfg, a.out);
    cfg.profile = resolve_profile(a.profile, cfg);
    const SimulationSetup setup = build_setup(cfg, a.config);

    const DomainSequence seq = generate_domains(setup.profile);
    const ConstraintReport cr = check_constraints(seq, cfg.optimizer.min_domain_um);

    const std::filesystem::path dir(cfg.output_dir);
    csv::write_file(dir / "domains.csv", csv::domains_csv(seq));
    csv::write_file(dir / "period.csv", csv::period_csv(setup.profile, samples));

    std::cout << "period_um        " << setup.period_um << "\n"
              << "domains          " << seq.full_domain_count
              << (seq.final_truncated ? " (+1 truncated)" : "") << "\n"
              << "min_domain_um    " << cr.min_domain_um << "\n"
              << "feasible         " << (cr.feasible ? "yes" : "no") << "\n"
              << "wrote            " << (dir / "domains.csv").string() << ", "
              << (dir / "period.csv").string() << "\n";
    return 0;
}

int run_validate(const std::string& path) {
    std::vector<std::string> issues;
    const RunConfig cfg = load_run_config(path, issues);
    const auto semantic = validate_run_config(cfg);
    issues.insert(issues.end(), semantic.begin(), semantic.end());
    if (issues.empty()) {
        std::cout << "ok: " << path << "\n";
        return 0;
    }
    std::cerr << "config problems in '" << path << "':\n";
    for (const auto& s : issues) std::cerr << "  " << s << "\n";
    return 2;
}

int run_calibrate(const CommonArgs& a, bool fit_offset, double target_period) {
    const RunConfig cfg = load_or_default(a.config);
    const MaterialLibrary lib =
        load_material_library(resolve_against(a.config, cfg.materials_file));
    const DispersionModel d = make_dispersion_model(lib, dispersion_options(cfg));

    const double period = calibrate_period(d);
    const GroupProperties gp = group_properties(d);
    const BdlDelays bdl = bdl_delays(d, 1000.0);

    std::cout.precision(12);
    std::cout << "calibrated_period_um  " << period << "\n"
              << "bulk_mismatch_rad_um  " << mismatch_bulk(d, 0.0) << "\n"
              << "inv_group_h_fs_um     " << gp.inv_group_velocity_h << "\n"
              << "inv_group_v_fs_um     " << gp.inv_group_velocity_v << "\n"
              << "dgd_fs_per_um         " << gp.dgd_per_length << "\n"
              << "bdl_phase_group_ratio " << bdl.phase_group_ratio << "\n";
    if (fit_offset) {
        const double offset = fit_pump_offset(d, target_period);
        std::cout << "pump_offset_for_" << target_period << "um  " << offset << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"broadband photon-pair source simulation and poling optimization"};
    app.require_subcommand(1);

    CommonArgs sp_args;
    auto* sp = app.add_subcommand("spectrum", "joint spectral intensity and phase of a profile");
    add_common(sp, sp_args);

    CommonArgs ig_args;
    std::string ig_delay_range;
    bool ig_no_comp = false;
    auto* ig = app.add_subcommand("interferogram", "coincidence interferogram of a profile");
    add_common(ig, ig_args);
    ig->add_option("--delay-range", ig_delay_range, "start:stop:step in fs (default automatic)");
    ig->add_flag("--no-compensation", ig_no_comp, "keep the source group delay uncompensated");

    CommonArgs op_args;
    GaConfig op_over;
    auto* op = app.add_subcommand("optimize", "genetic search over asymmetric poling profiles");
    add_common(op, op_args, false);
    auto* op_seed = op->add_option("--seed", op_over.seed, "GA master seed");
    auto* op_gen = op->add_option("--generations", op_over.generations, "generation cap");
    auto* op_pop = op->add_option("--population", op_over.population, "population size");
    auto* op_tgt =
        op->add_option("--target-fwhm-nm", op_over.target_fwhm_nm, "bandwidth target in nm");
    auto* op_grid =
        op->add_option("--fitness-grid", op_over.fitness_grid, "grid samples per fitness call");

    CommonArgs sc_args;
    std::vector<std::string> sc_names;
    bool sc_all = false;
    int sc_jobs = 1;
    auto* sc = app.add_subcommand("run-scenario", "run bundled presets and report their metrics");
    add_common(sc, sc_args, false);
    sc->add_option("names", sc_names, "scenario names");
    sc->add_flag("--all", sc_all, "run every scenario");
    sc->add_option("--jobs", sc_jobs, "run scenarios concurrently");

    CommonArgs ex_args;
    std::size_t ex_samples = 513;
    auto* ex = app.add_subcommand("export-profile", "domain list and local period of a profile");
    add_common(ex, ex_args);
    ex->add_option("--samples", ex_samples, "rows in the period CSV");

    std::string va_path;
    auto* va = app.add_subcommand("validate-config", "check a run config without running");
    va->add_option("file", va_path, "config JSON file")->required();

    CommonArgs ca_args;
    bool ca_fit = false;
    double ca_target = 9.3;
    auto* ca = app.add_subcommand("calibrate-period", "poling period phase-matched at degeneracy");
    add_common(ca, ca_args, false);
    ca->add_flag("--fit-pump-offset", ca_fit,
                 "also fit the pump index offset that moves the period onto the target");
    ca->add_option("--target-period-um", ca_target, "target period for the offset fit");

    int rc = 0;
    try {
        app.parse(argc, argv);
        if (sp->parsed()) rc = run_spectrum(sp_args);
        if (ig->parsed()) rc = run_interferogram(ig_args, ig_delay_range, ig_no_comp);
        if (op->parsed())
            rc = run_optimize(op_args, op_over, !op_seed->empty(), !op_gen->empty(),
                              !op_pop->empty(), !op_tgt->empty(), !op_grid->empty());
        if (sc->parsed()) rc = run_scenarios(sc_args, sc_names, sc_all, sc_jobs);
        if (ex->parsed()) rc = run_export_profile(ex_args, ex_samples);
        if (va->parsed()) rc = run_validate(va_path);
        if (ca->parsed()) rc = run_calibrate(ca_args, ca_fit, ca_target);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
