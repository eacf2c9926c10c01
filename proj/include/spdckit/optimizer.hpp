#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "spdckit/dispersion.hpp"
#include "spdckit/jsa.hpp"
#include "spdckit/poling.hpp"

namespace spdckit {

// Genetic search over asymmetric odd-polynomial poling profiles. A genome is
// the flattened (alpha_j, beta_j) list of AsymmetricPolynomialProfile terms.
// Lower fitness is better; infeasible candidates get a constant penalty plus
// their constraint violation so the search can climb back out.

using Genome = std::vector<double>;

struct FitnessWeights {
    double phase = 1.0;     // mean-square residual antisymmetric phase over the support
    double symmetry = 1.0;  // squared L2 imbalance of |f| about degeneracy
    double fwhm = 1.0;      // squared relative bandwidth error
};

struct GaConfig {
    int order_index = 11;  // highest odd power is 2 * order_index + 1
    int population = 96;
    int generations = 300;
    int tournament = 3;
    double crossover_rate = 0.9;
    double blend_alpha = 0.5;          // BLX interval extension
    double mutation_rate = 0.05;       // per gene
    double mutation_sigma_frac = 0.1;  // times the gene range
    int sigma_half_life = 100;         // generations between sigma halvings
    int elitism = 2;
    std::uint64_t seed = 1;

    double alpha_limit = 500.0;
    double beta_limit = 3.0;

    double target_fwhm_nm = 135.0;
    double min_domain_um = 4.0;
    FitnessWeights weights;

    std::size_t fitness_grid = 4097;
    double grid_half_span = std::numeric_limits<double>::quiet_NaN();  // NaN: up to 1375 nm
    double device_length_um = 16500.0;

    double stall_tol = 1e-8;    // best-fitness improvement considered progress
    int stall_generations = 30;
    int init_attempts = 200;    // feasibility retries per initial individual
    bool warm_start = true;     // seed one near-linear chirp individual
};

struct FitnessBreakdown {
    double total = 0.0;
    double phase_term = 0.0;
    double symmetry_term = 0.0;
    double fwhm_term = 0.0;
    bool feasible = false;
    double fwhm_nm = 0.0;
    double min_domain_um = 0.0;
};

// per-run precomputation shared by every fitness call
struct EvaluationContext {
    DispersionModel dispersion;
    double base_period_um = 0.0;
    double device_length_um = 0.0;
    SpectralGrid grid;
    std::vector<double> mismatch;
    FitnessWeights weights;
    double target_fwhm_nm = 0.0;
    double min_domain_um = 0.0;
};

EvaluationContext make_context(const DispersionModel& d, const GaConfig& cfg);

AsymmetricPolynomialProfile genome_to_profile(const Genome& g);
Genome profile_to_genome(const AsymmetricPolynomialProfile& p);

FitnessBreakdown evaluate_fitness(const Genome& g, const EvaluationContext& ctx);

struct GenerationStat {
    int generation = 0;
    double best_total = 0.0;
    double mean_total = 0.0;  // over the whole population, penalties included
};

struct OptimizationResult {
    Genome best;
    FitnessBreakdown best_fitness;
    FitnessBreakdown refined;  // best genome on a doubled grid, convergence check
    std::vector<GenerationStat> trace;
    std::uint64_t evaluations = 0;
    int generations_run = 0;
    bool stalled = false;
    double base_period_um = 0.0;
};

// deterministic for a fixed config: every random draw comes from a stream
// seeded by (seed, generation, slot), and parallelism only covers the pure
// fitness evaluations
OptimizationResult optimize(const GaConfig& cfg, const DispersionModel& d);

}  // namespace spdckit
