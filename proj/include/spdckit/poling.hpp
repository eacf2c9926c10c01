#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "spdckit/core.hpp"

namespace spdckit {

// Poling profiles prescribe the local half-period l(z) = (base_period/2) *
// (1 + dev(z)) as a fractional deviation dev(z) from the calibrated base
// period. Domains are laid down sequentially from z = 0, each taking its
// length from dev at its own start coordinate, and the final domain is
// truncated so the lengths add up to the device length exactly.

struct UniformProfile {};

struct LinearChirpProfile {
    double rate_per_mm = 0.0;  // d(dev)/dz in 1/mm, dev = 0 at z = L/2
};

struct ApodizedChirpProfile {
    // dev(z) = atanh(beta * (z - L/2) / L) / alpha; slope beta/(alpha L) at
    // the center, diverging toward the ends as |beta| -> 2
    double alpha = 1.0;
    double beta = 0.0;
};

struct PolynomialTerm {
    double alpha = 0.0;  // amplitude of the odd power
    double beta = 1.0;   // center-offset factor of this power
};

struct AsymmetricPolynomialProfile {
    // dev(z) = sum_j alpha_j * ((z - beta_j L / 2) / L)^(2 j + 1), j = 0..order
    std::vector<PolynomialTerm> terms;
};

using ProfileShape =
    std::variant<UniformProfile, LinearChirpProfile, ApodizedChirpProfile,
                 AsymmetricPolynomialProfile>;

struct ProfileSpec {
    ProfileShape shape;
    double base_period_um = 0.0;
    double total_length_um = 0.0;
};

// fractional period deviation dev(z); throws ProfileError where the shape is
// undefined (apodized argument outside (-1, 1))
double profile_deviation(const ProfileSpec& spec, double z_um);

// local full poling period base_period * (1 + dev(z))
double local_period(const ProfileSpec& spec, double z_um);

struct DomainSequence {
    std::vector<double> length_um;   // L_m, m = 0..M-1 from the input facet
    std::vector<double> start_um;    // z_m, cumulative; start_um[0] == 0
    std::vector<std::int8_t> sign;   // (-1)^(m+1): -1, +1, -1, ... matching chi2 flips
    double total_length_um = 0.0;
    bool final_truncated = false;    // last domain clipped to end on the facet
    std::size_t full_domain_count = 0;  // domains laid at their prescribed length

    // shortest domain, ignoring a truncated final remainder (a mask-end
    // artifact, not a fabrication feature)
    double min_domain_um() const;
};

// lays out the sequence; throws ProfileError naming the domain index and
// position for non-positive or non-finite prescribed lengths
DomainSequence generate_domains(const ProfileSpec& spec);

// shortest non-truncated domain, walked without materializing the sequence.
// The walk stops once the running count guarantees a domain below limit_um
// (more than length/limit_um domains cannot all reach the limit), so
// degenerate profiles with near-zero local periods return quickly; the
// result is exact whenever it is >= limit_um. limit_um must be positive.
double profile_min_domain(const ProfileSpec& spec, double limit_um);

struct ConstraintReport {
    bool feasible = true;
    double min_domain_um = 0.0;
    double limit_um = 0.0;
    std::vector<std::size_t> violating_domains;  // indices into length_um
};

// checks every non-truncated domain against the fabrication limit
ConstraintReport check_constraints(const DomainSequence& seq, double limit_um = 4.0);

}  // namespace spdckit
