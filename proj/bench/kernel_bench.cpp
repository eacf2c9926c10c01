// timing comparison of the telescoped amplitude kernel against the literal
// per-domain reference, and of the decomposed interferogram scan against the
// per-delay quadrature; also probes one GA fitness call, which bounds the
// optimizer's runtime budget

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "spdckit/config.hpp"
#include "spdckit/interferometer.hpp"
#include "spdckit/jsa.hpp"
#include "spdckit/optimizer.hpp"

using namespace spdckit;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

template <typename F>
double best_of(int reps, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double t0 = now_ms();
        fn();
        best = std::min(best, now_ms() - t0);
    }
    return best;
}

double max_rel_err(const std::vector<std::complex<double>>& a,
                   const std::vector<std::complex<double>>& b) {
    double peak = 0.0;
    for (const auto& v : a) peak = std::max(peak, std::abs(v));
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - b[i]) / peak);
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    std::string materials = SPDCKIT_SOURCE_DIR "/data/materials.json";
    if (argc > 1) materials = argv[1];

    RunConfig cfg = default_run_config();
    cfg.materials_file = materials;
    const SimulationSetup setup = build_setup(cfg, "");
    const DispersionModel& d = setup.dispersion;

    struct Case {
        const char* name;
        ProfileShape shape;
    };
    const Case cases[] = {
        {"uniform", UniformProfile{}},
        {"chirped 30e-4/mm", LinearChirpProfile{30e-4}},
    };

    std::printf("%-18s %9s %9s %12s %12s %9s %10s\n", "profile", "grid", "walls", "ref ms",
                "fast ms", "speedup", "max rel");
    for (const Case& c : cases) {
        const ProfileSpec spec{c.shape, setup.period_um, cfg.device_length_um};
        const DomainSequence seq = generate_domains(spec);
        for (std::size_t n : {std::size_t{2049}, std::size_t{16385}}) {
            const SpectralGrid grid = make_symmetric_grid(n, setup.grid.half_span);
            std::vector<std::complex<double>> ref, fast;
            const double t_ref = best_of(1, [&] { ref = amplitude_reference(seq, d, grid); });
            const double t_fast = best_of(3, [&] { fast = amplitude_fast(seq, d, grid); });
            std::printf("%-18s %9zu %9zu %12.2f %12.2f %8.1fx %10.2e\n", c.name, n,
                        seq.length_um.size() + 1, t_ref, t_fast, t_ref / t_fast,
                        max_rel_err(ref, fast));
        }
    }

    // decomposed scan vs literal quadrature, uniform source
    {
        const ProfileSpec spec{UniformProfile{}, setup.period_um, cfg.device_length_um};
        const DomainSequence seq = generate_domains(spec);
        const JointSpectrum js = compute_spectrum(seq, d, setup.grid);
        Interferogram ig;
        const double t_scan = best_of(1, [&] { ig = coincidence_scan(js, setup.interferometer); });

        std::vector<double> probe;
        for (std::size_t i = 0; i < ig.delay_fs.size(); i += ig.delay_fs.size() / 64)
            probe.push_back(ig.delay_fs[i]);
        std::vector<double> ref_rate;
        const double t_ref =
            best_of(1, [&] { ref_rate = coincidence_rate_reference(js, setup.interferometer, probe); });

        const double per_delay_scan = t_scan / static_cast<double>(ig.delay_fs.size());
        const double per_delay_ref = t_ref / static_cast<double>(probe.size());
        std::printf("\nscan: %zu delays in %.1f ms (%.3f ms/delay); quadrature %.3f ms/delay; "
                    "speedup %.1fx\n",
                    ig.delay_fs.size(), t_scan, per_delay_scan, per_delay_ref,
                    per_delay_ref / per_delay_scan);
    }

    // one GA fitness call at the optimizer's default grid
    {
        GaConfig ga;
        ga.device_length_um = cfg.device_length_um;
        const EvaluationContext ctx = make_context(d, ga);
        Genome g(2 * static_cast<std::size_t>(ga.order_index + 1), 0.0);
        g[0] = 0.042;  // near-linear chirp, representative cost
        for (std::size_t j = 1; j < g.size(); j += 2) g[j] = 1.0;
        FitnessBreakdown fb;
        const double t_fit = best_of(3, [&] { fb = evaluate_fitness(g, ctx); });
        std::printf("fitness: %.2f ms/eval at grid %zu (total %.4g, fwhm %.4g nm)\n", t_fit,
                    ga.fitness_grid, fb.total, fb.fwhm_nm);
    }
    return 0;
}
