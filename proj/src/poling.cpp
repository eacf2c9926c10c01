#include "spdckit/poling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "spdckit/errors.hpp"

namespace spdckit {

namespace {

// x^(2j+1) as x * (x*x)^j; repeated IEEE multiplies keep the j = 0 case an
// exact pass-through so a single-term polynomial reproduces the linear chirp
// bit for bit
double odd_power(double x, std::size_t j) {
    double r = x;
    const double sq = x * x;
    for (std::size_t k = 0; k < j; ++k) r *= sq;
    return r;
}

double poly_deviation(const std::vector<PolynomialTerm>& terms, double z, double len) {
    double dev = 0.0;
    for (std::size_t j = 0; j < terms.size(); ++j) {
        const double x = (z - terms[j].beta * (0.5 * len)) / len;
        dev += terms[j].alpha * odd_power(x, j);
    }
    return dev;
}

struct DeviationVisitor {
    double z;
    double len;

    double operator()(const UniformProfile&) const { return 0.0; }

    double operator()(const LinearChirpProfile& p) const {
        // routed through the polynomial evaluator so the two parameterizations
        // stay interchangeable in tests and in the optimizer
        return poly_deviation({{p.rate_per_mm * 1e-3 * len, 1.0}}, z, len);
    }

    double operator()(const ApodizedChirpProfile& p) const {
        const double arg = p.beta * (z - 0.5 * len) / len;
        if (!(std::abs(arg) < 1.0))
            throw ProfileError("apodized profile argument " + std::to_string(arg) +
                                   " leaves (-1, 1) at z = " + std::to_string(z) + " um",
                               -1, z);
        return std::atanh(arg) / p.alpha;
    }

    double operator()(const AsymmetricPolynomialProfile& p) const {
        return poly_deviation(p.terms, z, len);
    }
};

}  // namespace

double profile_deviation(const ProfileSpec& spec, double z_um) {
    return std::visit(DeviationVisitor{z_um, spec.total_length_um}, spec.shape);
}

double local_period(const ProfileSpec& spec, double z_um) {
    return spec.base_period_um * (1.0 + profile_deviation(spec, z_um));
}

namespace {

// shared sequential layout; per_domain(m, z, lm, truncated) may return false
// to stop the walk early
template <class PerDomain>
void walk_domains(const ProfileSpec& spec, PerDomain&& per_domain) {
    if (!std::isfinite(spec.base_period_um) || spec.base_period_um <= 0.0)
        throw ProfileError("base period must be positive, got " +
                               std::to_string(spec.base_period_um) + " um",
                           -1, 0.0);
    if (!std::isfinite(spec.total_length_um) || spec.total_length_um <= 0.0)
        throw ProfileError("device length must be positive, got " +
                               std::to_string(spec.total_length_um) + " um",
                           -1, 0.0);

    const double len = spec.total_length_um;
    const double half = 0.5 * spec.base_period_um;

    double z = 0.0;
    std::size_t m = 0;
    while (z < len) {
        double lm;
        try {
            lm = half * (1.0 + profile_deviation(spec, z));
        } catch (const ProfileError& e) {
            throw ProfileError(e.what(), static_cast<int>(m), z);
        }
        if (!std::isfinite(lm) || lm <= 0.0)
            throw ProfileError("prescribed domain length " + std::to_string(lm) +
                                   " um is not positive at domain " + std::to_string(m) +
                                   ", z = " + std::to_string(z) + " um",
                               static_cast<int>(m), z);

        bool trunc = false;
        if (z + lm > len) {
            lm = len - z;
            trunc = true;
        }
        if (!per_domain(m, z, lm, trunc)) return;
        z = trunc ? len : z + lm;
        ++m;

        if (m > 10'000'000)
            throw ProfileError("domain count exceeds 10,000,000; profile is degenerate",
                               static_cast<int>(m), z);
    }
}

}  // namespace

DomainSequence generate_domains(const ProfileSpec& spec) {
    DomainSequence seq;
    const double estimate = spec.base_period_um > 0.0
                                ? spec.total_length_um / (0.5 * spec.base_period_um)
                                : 0.0;
    seq.length_um.reserve(static_cast<std::size_t>(std::max(estimate, 0.0)) + 2);
    seq.start_um.reserve(seq.length_um.capacity());
    seq.sign.reserve(seq.length_um.capacity());

    std::int8_t s = -1;  // first domain carries the flipped nonlinearity
    walk_domains(spec, [&](std::size_t, double z, double lm, bool trunc) {
        seq.length_um.push_back(lm);
        seq.start_um.push_back(z);
        seq.sign.push_back(s);
        s = static_cast<std::int8_t>(-s);
        seq.final_truncated = trunc;
        return true;
    });

    seq.total_length_um = spec.total_length_um;
    seq.full_domain_count = seq.length_um.size() - (seq.final_truncated ? 1 : 0);
    return seq;
}

double profile_min_domain(const ProfileSpec& spec, double limit_um) {
    if (!(limit_um > 0.0))
        throw std::invalid_argument("profile_min_domain needs a positive limit");
    // past this count at least one of the seen domains was below the limit,
    // because domains at or above it would overshoot the device length
    const double cap = spec.total_length_um / limit_um + 2.0;
    double min_len = std::numeric_limits<double>::infinity();
    double trunc_len = std::numeric_limits<double>::infinity();
    walk_domains(spec, [&](std::size_t m, double, double lm, bool trunc) {
        if (trunc)
            trunc_len = lm;
        else
            min_len = std::min(min_len, lm);
        return static_cast<double>(m) < cap;
    });
    // a profile made of a single clipped domain has no full domain to measure
    return std::isinf(min_len) ? trunc_len : min_len;
}

double DomainSequence::min_domain_um() const {
    if (length_um.empty()) return 0.0;
    const std::size_t n = full_domain_count > 0 ? full_domain_count : length_um.size();
    return *std::min_element(length_um.begin(), length_um.begin() + static_cast<long>(n));
}

ConstraintReport check_constraints(const DomainSequence& seq, double limit_um) {
    ConstraintReport rep;
    rep.limit_um = limit_um;
    rep.min_domain_um = seq.min_domain_um();
    const std::size_t n = seq.full_domain_count > 0 ? seq.full_domain_count : seq.length_um.size();
    for (std::size_t m = 0; m < n; ++m)
        if (seq.length_um[m] < limit_um) rep.violating_domains.push_back(m);
    rep.feasible = rep.violating_domains.empty();
    return rep;
}

}  // namespace spdckit
