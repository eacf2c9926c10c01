#include "spdckit/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "spdckit/errors.hpp"

namespace spdckit {

namespace {

// infeasible candidates rank strictly worse than any feasible one; the
// penalty scales with the weight sum so that rescaling all weights by a
// common factor preserves the full fitness ordering
constexpr double kInfeasiblePenalty = 1e6;

double penalty_total(const FitnessWeights& w, double violation) {
    const double scale = w.phase + w.symmetry + w.fwhm;
    return (scale > 0.0 ? scale : 1.0) * (kInfeasiblePenalty + violation);
}

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// engine identical on every platform; distributions are hand-rolled below
// because the standard does not pin their sequences
std::mt19937_64 child_stream(std::uint64_t seed, std::uint64_t generation, std::uint64_t slot) {
    std::uint64_t s = seed;
    (void)splitmix64(s);
    s ^= 0x9e3779b97f4a7c15ull * (generation + 1);
    (void)splitmix64(s);
    s ^= 0xbf58476d1ce4e5b9ull * (slot + 1);
    return std::mt19937_64(splitmix64(s));
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform_pm(std::mt19937_64& rng, double limit) {
    return (2.0 * uniform01(rng) - 1.0) * limit;
}

double gauss(std::mt19937_64& rng) {
    const double u1 = 1.0 - uniform01(rng);  // (0, 1]
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

std::size_t pick_index(std::mt19937_64& rng, std::size_t n) {
    const auto i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
    return i < n ? i : n - 1;
}

void clamp_genome(Genome& g, const GaConfig& cfg) {
    for (std::size_t j = 0; j * 2 < g.size(); ++j) {
        g[2 * j] = std::clamp(g[2 * j], -cfg.alpha_limit, cfg.alpha_limit);
        g[2 * j + 1] = std::clamp(g[2 * j + 1], -cfg.beta_limit, cfg.beta_limit);
    }
}

// random genome whose per-order deviation contribution stays bounded; high
// odd powers of |x| <= ~2 explode, so their amplitudes are tapered before the
// feasibility retry loop does the exact check
Genome draw_tapered(std::mt19937_64& rng, const GaConfig& cfg) {
    const std::size_t terms = static_cast<std::size_t>(cfg.order_index) + 1;
    Genome g(2 * terms);
    for (std::size_t j = 0; j < terms; ++j) {
        const double beta = uniform_pm(rng, cfg.beta_limit);
        const double xmax = std::max(std::abs(-0.5 * beta), std::abs(1.0 - 0.5 * beta));
        const double pw = std::pow(std::max(xmax, 1e-3), static_cast<double>(2 * j + 1));
        const double cap = std::min(cfg.alpha_limit, 0.5 / pw);
        g[2 * j] = uniform_pm(rng, cap);
        g[2 * j + 1] = beta;
    }
    return g;
}

bool min_domain_ok(const Genome& g, const EvaluationContext& ctx) {
    ProfileSpec spec{genome_to_profile(g), ctx.base_period_um, ctx.device_length_um};
    try {
        return profile_min_domain(spec, ctx.min_domain_um) >= ctx.min_domain_um;
    } catch (const ProfileError&) {
        return false;
    }
}

// linear-chirp equivalent whose phase-matched span lands near the bandwidth
// target; one such individual anchors the search in the right basin
Genome warm_start_genome(const EvaluationContext& ctx, const GaConfig& cfg) {
    const double omega0 = ctx.dispersion.degenerate_omega().value;
    const double nm_per_rad_fs = two_pi * speed_of_light_um_fs / (omega0 * omega0) * 1e3;
    const GroupProperties gp = group_properties(ctx.dispersion);
    const double slope = std::abs(gp.inv_group_velocity_h - gp.inv_group_velocity_v);
    const double span_rad_fs = cfg.target_fwhm_nm / nm_per_rad_fs;
    const double a1 = span_rad_fs * slope * ctx.base_period_um / two_pi;

    const std::size_t terms = static_cast<std::size_t>(cfg.order_index) + 1;
    Genome g(2 * terms, 0.0);
    for (std::size_t j = 0; j < terms; ++j) g[2 * j + 1] = 1.0;
    g[0] = a1;
    return g;
}

// truncated odd series of atanh(b x) / a with the same center slope as the
// linear anchor (a = b / a1); the analytic apodized family lies inside the
// polynomial genome space, so these seed the soft-edged basin directly
Genome apodized_anchor_genome(const Genome& linear_anchor, double b) {
    const double a1 = linear_anchor[0];
    Genome g(linear_anchor.size(), 0.0);
    double bpow = b;  // b^(2j+1)
    for (std::size_t j = 0; 2 * j < g.size(); ++j) {
        g[2 * j] = a1 * bpow / (static_cast<double>(2 * j + 1) * b);
        g[2 * j + 1] = 1.0;
        bpow *= b * b;
    }
    return g;
}

// asymmetric taper with a compensated (flat) residual antisymmetric phase,
// found by direct search on the decomposed interference envelope at a 135 nm
// bandwidth target. Alphas scale with the requested bandwidth through the
// linear-anchor slope; the beta offsets, which inject the even chirp
// correction, shrink by the same factor so the compensation stays matched to
// the chirp to first order.
Genome designed_anchor_genome(const Genome& linear_anchor) {
    static constexpr double alpha[12] = {0.0429126, 0.035149, 0.0804484, 0.180905,
                                         0.439075,  0.598645, 0.966741,  1.5309,
                                         5.00102,   13.8609,  52.9441,   53.3912};
    static constexpr double beta[12] = {1.0,     0.868472, 0.8617, 0.9142, 0.91625, 1.0108,
                                        1.05,    1.0,      1.0,    1.0,    1.0,     1.0};
    static constexpr double design_slope = 0.042157157966169402;
    const double rho = linear_anchor[0] / design_slope;
    Genome g(linear_anchor.size(), 0.0);
    std::size_t j = 0;
    for (; 2 * j + 1 < g.size() && j < 12; ++j) {
        g[2 * j] = alpha[j] * rho;
        g[2 * j + 1] = 1.0 + (beta[j] - 1.0) * rho;
    }
    for (; 2 * j + 1 < g.size(); ++j) g[2 * j + 1] = 1.0;
    return g;
}

std::vector<Genome> anchor_genomes(const EvaluationContext& ctx, const GaConfig& cfg) {
    const Genome lin = warm_start_genome(ctx, cfg);
    std::vector<Genome> anchors;
    anchors.push_back(lin);
    anchors.push_back(designed_anchor_genome(lin));
    for (double f : {0.94, 1.06}) {
        Genome g = designed_anchor_genome(lin);
        for (std::size_t j = 0; 2 * j < g.size(); ++j) g[2 * j] *= f;
        anchors.push_back(std::move(g));
    }
    for (double b : {1.99, 1.5}) anchors.push_back(apodized_anchor_genome(lin, b));
    for (double f : {0.8, 1.25}) {
        Genome g = lin;
        g[0] *= f;
        anchors.push_back(std::move(g));
    }
    return anchors;
}

}  // namespace

AsymmetricPolynomialProfile genome_to_profile(const Genome& g) {
    if (g.empty() || g.size() % 2 != 0)
        throw std::invalid_argument("genome must hold (alpha, beta) pairs");
    AsymmetricPolynomialProfile p;
    p.terms.resize(g.size() / 2);
    for (std::size_t j = 0; j < p.terms.size(); ++j) p.terms[j] = {g[2 * j], g[2 * j + 1]};
    return p;
}

Genome profile_to_genome(const AsymmetricPolynomialProfile& p) {
    Genome g(2 * p.terms.size());
    for (std::size_t j = 0; j < p.terms.size(); ++j) {
        g[2 * j] = p.terms[j].alpha;
        g[2 * j + 1] = p.terms[j].beta;
    }
    return g;
}

EvaluationContext make_context(const DispersionModel& d, const GaConfig& cfg) {
    if (cfg.fitness_grid < 33 || cfg.fitness_grid % 2 == 0)
        throw std::invalid_argument("fitness grid must be odd and >= 33");
    EvaluationContext ctx;
    ctx.dispersion = d;
    ctx.base_period_um = calibrate_period(d);
    ctx.device_length_um = cfg.device_length_um;
    double half_span = cfg.grid_half_span;
    if (std::isnan(half_span))
        half_span = wavelength_to_omega(1375.0).value - d.degenerate_omega().value;
    ctx.grid = make_symmetric_grid(cfg.fitness_grid, half_span);
    ctx.mismatch = mismatch_on_grid(d, ctx.grid);
    ctx.weights = cfg.weights;
    ctx.target_fwhm_nm = cfg.target_fwhm_nm;
    ctx.min_domain_um = cfg.min_domain_um;
    return ctx;
}

FitnessBreakdown evaluate_fitness(const Genome& g, const EvaluationContext& ctx) {
    FitnessBreakdown fb;
    ProfileSpec spec{genome_to_profile(g), ctx.base_period_um, ctx.device_length_um};

    // streaming feasibility first: degenerate genomes are rejected in one
    // cheap pass instead of materializing millions of near-zero domains
    try {
        fb.min_domain_um = profile_min_domain(spec, ctx.min_domain_um);
    } catch (const ProfileError&) {
        fb.total = penalty_total(ctx.weights, ctx.min_domain_um);
        return fb;
    }
    if (fb.min_domain_um < ctx.min_domain_um) {
        fb.total = penalty_total(ctx.weights, ctx.min_domain_um - fb.min_domain_um);
        return fb;
    }
    const DomainSequence seq = generate_domains(spec);

    try {
        const JointSpectrum js = compute_spectrum_with_mismatch(
            seq, ctx.mismatch, ctx.grid, ctx.dispersion.degenerate_omega().value);
        const BandwidthReport bw = bandwidth(js);
        // a band still above half max at a grid edge has no measurable width;
        // candidates must keep their spectrum inside the analysis window
        if (bw.truncated) throw AnalysisError("spectrum truncated at the fitness grid edge");
        fb.fwhm_nm = bw.fwhm_nm;

        // intensity-weighted mean-square residual phase across the emission
        // band. The weighting matters: every sample's phase counts in
        // proportion to the light it carries, so a candidate cannot park
        // spectral weight just below a support threshold where bad phase
        // would go unscored (a hard half-max cut is gameable in exactly that
        // way). The floor excludes far tails where the unwrapped phase is
        // numerically meaningless; the normalization keeps the term
        // dimensionless and comparable across grid resolutions, which the
        // refinement pass at doubled resolution relies on
        double phase_num = 0.0, phase_den = 0.0;
        for (std::size_t i = 0; i < ctx.grid.count; ++i) {
            if (js.intensity[i] < 0.05 || !std::isfinite(js.delta[i])) continue;
            phase_num += js.intensity[i] * js.delta[i] * js.delta[i];
            phase_den += js.intensity[i];
        }
        if (phase_den == 0.0) throw AnalysisError("no usable residual-phase samples");
        fb.phase_term = phase_num / phase_den;

        double num = 0.0, den = 0.0;
        const double inv_peak = 1.0 / js.peak_amplitude;
        for (std::size_t i = 0; i < ctx.grid.count; ++i) {
            const double a = std::abs(js.amplitude[i]) * inv_peak;
            const double b = std::abs(js.amplitude[ctx.grid.mirror_index(i)]) * inv_peak;
            num += (a - b) * (a - b);
            den += a * a;
        }
        fb.symmetry_term = num / den;

        const double rel = (fb.fwhm_nm - ctx.target_fwhm_nm) / ctx.target_fwhm_nm;
        fb.fwhm_term = rel * rel;

        fb.feasible = true;
        fb.total = ctx.weights.phase * fb.phase_term + ctx.weights.symmetry * fb.symmetry_term +
                   ctx.weights.fwhm * fb.fwhm_term;
    } catch (const AnalysisError&) {
        fb.feasible = false;
        fb.total = penalty_total(ctx.weights, ctx.min_domain_um);
    }
    return fb;
}

OptimizationResult optimize(const GaConfig& cfg, const DispersionModel& d) {
    if (cfg.population < 4) throw std::invalid_argument("population must be at least 4");
    if (cfg.elitism < 0 || cfg.elitism >= cfg.population)
        throw std::invalid_argument("elitism must stay below the population size");
    if (cfg.generations < 1) throw std::invalid_argument("need at least one generation");
    if (cfg.tournament < 1) throw std::invalid_argument("tournament size must be positive");
    if (cfg.order_index < 0) throw std::invalid_argument("order index must be non-negative");

    EvaluationContext ctx = make_context(d, cfg);
    const auto pop_size = static_cast<std::size_t>(cfg.population);
    const std::size_t genes = 2 * (static_cast<std::size_t>(cfg.order_index) + 1);

    OptimizationResult res;
    res.base_period_um = ctx.base_period_um;

    std::vector<Genome> pop(pop_size);
    std::vector<FitnessBreakdown> fit(pop_size);
    std::vector<char> fresh(pop_size, 1);  // needs evaluation

    std::vector<Genome> anchors;
    if (cfg.warm_start) anchors = anchor_genomes(ctx, cfg);
    for (std::size_t i = 0; i < pop_size; ++i) {
        auto rng = child_stream(cfg.seed, 0, i);
        if (i < anchors.size()) {
            Genome a = std::move(anchors[i]);
            clamp_genome(a, cfg);
            if (min_domain_ok(a, ctx)) {
                pop[i] = std::move(a);
                continue;
            }
        }
        Genome g;
        bool ok = false;
        for (int attempt = 0; attempt < cfg.init_attempts && !ok; ++attempt) {
            g = draw_tapered(rng, cfg);
            ok = min_domain_ok(g, ctx);
        }
        if (!ok) g.assign(genes, 0.0);  // uniform profile: always buildable
        pop[i] = std::move(g);
    }

    std::vector<double> best_history;
    std::vector<std::size_t> order(pop_size);

    int gen = 0;
    for (; gen < cfg.generations; ++gen) {
        std::uint64_t evals_this_gen = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : evals_this_gen)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(pop_size); ++i) {
            if (!fresh[static_cast<std::size_t>(i)]) continue;
            fit[static_cast<std::size_t>(i)] =
                evaluate_fitness(pop[static_cast<std::size_t>(i)], ctx);
            fresh[static_cast<std::size_t>(i)] = 0;
            ++evals_this_gen;
        }
        res.evaluations += evals_this_gen;

        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return fit[a].total < fit[b].total;
        });

        double mean = 0.0;
        for (const auto& f : fit) mean += f.total;
        mean /= static_cast<double>(pop_size);
        res.trace.push_back({gen, fit[order[0]].total, mean});
        best_history.push_back(fit[order[0]].total);

        const int lag = cfg.stall_generations;
        if (lag > 0 && gen >= lag &&
            best_history[static_cast<std::size_t>(gen - lag)] - best_history.back() <
                cfg.stall_tol) {
            res.stalled = true;
            ++gen;
            break;
        }
        if (gen + 1 == cfg.generations) {
            ++gen;
            break;
        }

        // breed the next generation
        const double sigma_scale =
            std::pow(0.5, static_cast<double>(cfg.sigma_half_life > 0 ? gen / cfg.sigma_half_life
                                                                      : 0));
        // mutation sigma follows the population's current spread per gene, so
        // kicks stay commensurate with the surviving candidates instead of
        // the full clamp range (which would be lethal for high odd orders)
        std::vector<double> gene_range(genes, 0.0);
        for (std::size_t gidx = 0; gidx < genes; ++gidx) {
            double lo = pop[0][gidx], hi = pop[0][gidx];
            for (std::size_t i = 1; i < pop_size; ++i) {
                lo = std::min(lo, pop[i][gidx]);
                hi = std::max(hi, pop[i][gidx]);
            }
            gene_range[gidx] = hi - lo;
        }
        std::vector<Genome> next(pop_size);
        std::vector<FitnessBreakdown> next_fit(pop_size);
        std::vector<char> next_fresh(pop_size, 1);
        for (std::size_t e = 0; e < static_cast<std::size_t>(cfg.elitism); ++e) {
            next[e] = pop[order[e]];
            next_fit[e] = fit[order[e]];
            next_fresh[e] = 0;
        }
        for (std::size_t slot = static_cast<std::size_t>(cfg.elitism); slot < pop_size; ++slot) {
            auto rng = child_stream(cfg.seed, static_cast<std::uint64_t>(gen) + 1, slot);
            auto tournament = [&]() -> const Genome& {
                std::size_t best = pick_index(rng, pop_size);
                for (int k = 1; k < cfg.tournament; ++k) {
                    const std::size_t c = pick_index(rng, pop_size);
                    if (fit[c].total < fit[best].total) best = c;
                }
                return pop[best];
            };
            const Genome& p1 = tournament();
            const Genome& p2 = tournament();
            Genome child(genes);
            if (uniform01(rng) < cfg.crossover_rate) {
                for (std::size_t gidx = 0; gidx < genes; ++gidx) {
                    const double u = -cfg.blend_alpha +
                                     uniform01(rng) * (1.0 + 2.0 * cfg.blend_alpha);
                    child[gidx] = p1[gidx] + u * (p2[gidx] - p1[gidx]);
                }
            } else {
                child = p1;
            }
            for (std::size_t gidx = 0; gidx < genes; ++gidx) {
                if (uniform01(rng) >= cfg.mutation_rate) continue;
                child[gidx] += gauss(rng) * cfg.mutation_sigma_frac * gene_range[gidx] *
                               sigma_scale;
            }
            clamp_genome(child, cfg);
            next[slot] = std::move(child);
        }
        pop = std::move(next);
        fit = std::move(next_fit);
        fresh = std::move(next_fresh);
    }

    res.generations_run = gen;

    std::size_t best_idx = 0;
    for (std::size_t i = 1; i < pop_size; ++i)
        if (fit[i].total < fit[best_idx].total) best_idx = i;
    res.best = pop[best_idx];
    res.best_fitness = fit[best_idx];

    GaConfig refined_cfg = cfg;
    refined_cfg.fitness_grid = 2 * cfg.fitness_grid - 1;
    const EvaluationContext fine = make_context(d, refined_cfg);
    res.refined = evaluate_fitness(res.best, fine);
    ++res.evaluations;
    return res;
}

}  // namespace spdckit
