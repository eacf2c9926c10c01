#include "spdckit/interferometer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "curve.hpp"
#include "spdckit/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace spdckit {

namespace {

bool allow_parallel() {
#ifdef _OPENMP
    return !omp_in_parallel();
#else
    return false;
#endif
}

// per-sample ingredients of the scan kernel, weights folded in
struct KernelTerms {
    std::vector<double> coeff;  // 2 w |f(W)| |f(-W)|
    std::vector<double> pair_phase;
    double constant = 0.0;      // C
    double t0 = 0.0;
    double center_estimate = 0.0;  // where the envelope should live
};

KernelTerms build_terms(const JointSpectrum& js, const InterferometerConfig& cfg) {
    if (!js.has_delta) throw AnalysisError("spectrum phase pipeline incomplete");
    const std::size_t n = js.grid.count;
    const auto w = curve::trapezoid_weights(n, js.grid.step);

    KernelTerms t;
    t.coeff.resize(n);
    t.pair_phase.resize(n);
    const double peak2 = js.peak_amplitude * js.peak_amplitude;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = js.grid.mirror_index(i);
        const double a = std::abs(js.amplitude[i]);
        const double b = std::abs(js.amplitude[j]);
        t.constant += w[i] * (a * a + b * b);
        t.coeff[i] = 2.0 * w[i] * a * b;

        const bool pair_defined = js.phase_defined[i] && js.phase_defined[j];
        if (pair_defined) {
            t.pair_phase[i] = cfg.compensate_group_slope ? js.delta[i]
                                                         : js.phase[i] - js.phase[j];
        } else if (a * b > 1e-10 * peak2) {
            throw AnalysisError(
                "undefined spectral phase on a sample with significant weight at detuning " +
                std::to_string(js.grid.detuning[i]) + " rad/fs");
        } else {
            t.pair_phase[i] = 0.0;
        }
    }
    t.t0 = cfg.compensate_group_slope ? -2.0 * js.group_slope_fs : 0.0;
    t.center_estimate = cfg.compensate_group_slope ? t.t0 : 2.0 * js.group_slope_fs;
    return t;
}

// I(tau) for a block of up to 4 delays in one sweep over the grid; one
// complex rotation per sample and delay
void envelope_block(const KernelTerms& t, const SpectralGrid& grid, const double* tau, int count,
                    double* out) {
    std::array<std::complex<double>, 4> acc{}, cur, rot;
    for (int j = 0; j < 4; ++j) {
        const double u = tau[std::min(j, count - 1)] - t.t0;
        cur[j] = std::polar(1.0, -grid.detuning[0] * u);
        rot[j] = std::polar(1.0, -grid.step * u);
    }
    const std::size_t n = grid.count;
    for (std::size_t i = 0; i < n; ++i) {
        const std::complex<double> base =
            t.coeff[i] * std::polar(1.0, t.pair_phase[i]);
        for (int j = 0; j < 4; ++j) {
            acc[j] += base * cur[j];
            cur[j] *= rot[j];
        }
    }
    for (int j = 0; j < count; ++j) out[j] = acc[j].real();
}

std::vector<double> envelope_values(const KernelTerms& t, const SpectralGrid& grid,
                                    const std::vector<double>& tau) {
    std::vector<double> out(tau.size());
    const std::ptrdiff_t blocks = static_cast<std::ptrdiff_t>((tau.size() + 3) / 4);
#pragma omp parallel for schedule(static) if (allow_parallel())
    for (std::ptrdiff_t b = 0; b < blocks; ++b) {
        const std::size_t i0 = static_cast<std::size_t>(b) * 4;
        const int count = static_cast<int>(std::min<std::size_t>(4, tau.size() - i0));
        envelope_block(t, grid, tau.data() + i0, count, out.data() + i0);
    }
    return out;
}

std::vector<double> linspace_step(double lo, double hi, double step) {
    const double span = hi - lo;
    if (!(span > 0.0) || !(step > 0.0))
        throw AnalysisError("delay range is empty or the step is not positive");
    const double count_f = span / step;
    if (count_f > 5e6) throw AnalysisError("delay grid would exceed 5e6 samples");
    const std::size_t n = static_cast<std::size_t>(count_f) + 1;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = lo + static_cast<double>(i) * step;
    return v;
}

// intensity-correlation time scale from the half-max width of the marginal
double correlation_time(const JointSpectrum& js) {
    const auto cross = curve::outer_level_crossings(js.grid.detuning, js.intensity, 0.5);
    const double width = cross.found ? cross.hi - cross.lo : 2.0 * js.grid.half_span;
    return width > 0.0 ? two_pi / width : two_pi / js.grid.step;
}

}  // namespace

Interferogram coincidence_scan(const JointSpectrum& js, const InterferometerConfig& cfg) {
    if (!(cfg.phase_group_ratio > 0.0))
        throw AnalysisError("phase/group ratio must be positive");
    const KernelTerms terms = build_terms(js, cfg);
    if (!(terms.constant > 0.0)) throw AnalysisError("spectrum carries no power");

    Interferogram ig;
    ig.constant = terms.constant;
    ig.fringe_omega = js.omega0 * cfg.phase_group_ratio;
    ig.nominal_fringe_period_fs = two_pi / ig.fringe_omega;
    ig.center_delay_fs = terms.t0;

    const double step =
        std::isnan(cfg.delay_step_fs) ? ig.nominal_fringe_period_fs / 16.0 : cfg.delay_step_fs;

    double lo = cfg.delay_start_fs, hi = cfg.delay_stop_fs;
    if (std::isnan(lo) || std::isnan(hi)) {
        // coarse |I| pass to bracket the envelope support, then a fine scan
        const double corr = correlation_time(js);
        const double spread = 1.25 * std::abs(2.0 * js.group_slope_fs) + 3.0 * corr;
        const double c0 = terms.center_estimate;
        const double coarse_step = std::max(corr / 8.0, spread / 2048.0);
        const auto coarse_tau = linspace_step(c0 - spread, c0 + spread, coarse_step);
        const auto coarse_env = envelope_values(terms, js.grid, coarse_tau);
        double peak = 0.0;
        for (double v : coarse_env) peak = std::max(peak, std::abs(v));
        if (!(peak > 0.0)) throw AnalysisError("interference envelope vanished in the coarse scan");
        std::size_t first = coarse_tau.size(), last = 0;
        for (std::size_t i = 0; i < coarse_tau.size(); ++i)
            if (std::abs(coarse_env[i]) >= 1e-3 * peak) {
                if (first == coarse_tau.size()) first = i;
                last = i;
            }
        const double margin = std::max({0.05 * (coarse_tau[last] - coarse_tau[first]),
                                        10.0 * ig.nominal_fringe_period_fs, 0.5 * corr});
        if (std::isnan(lo)) lo = coarse_tau[first] - margin;
        if (std::isnan(hi)) hi = coarse_tau[last] + margin;
    }

    ig.delay_fs = linspace_step(lo, hi, step);
    const auto ivals = envelope_values(terms, js.grid, ig.delay_fs);

    const std::size_t n = ig.delay_fs.size();
    ig.rate.resize(n);
    ig.envelope.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ig.constant + std::cos(ig.fringe_omega * ig.delay_fs[i]) * ivals[i];
        ig.rate[i] = std::max(0.0, r);
        ig.envelope[i] = std::abs(ivals[i]);
    }

    ig.envelope_peak_index =
        static_cast<std::size_t>(std::max_element(ig.envelope.begin(), ig.envelope.end()) -
                                 ig.envelope.begin());
    const std::size_t p = ig.envelope_peak_index;
    ig.envelope_peak_fs = ig.delay_fs[p];
    if (p > 0 && p + 1 < n) {
        const double denom = ig.envelope[p - 1] - 2.0 * ig.envelope[p] + ig.envelope[p + 1];
        if (denom < 0.0)
            ig.envelope_peak_fs =
                ig.delay_fs[p] + 0.5 * step * (ig.envelope[p - 1] - ig.envelope[p + 1]) / denom;
    }

    ig.visibility_decomposed = ig.envelope[p] / ig.constant;

    // independent route: literal quadrature at the same delay with the fringe
    // phase forced to its extremes
    {
        const double u = ig.delay_fs[p] - terms.t0;
        double r_plus = 0.0, r_minus = 0.0;
        const auto w = curve::trapezoid_weights(js.grid.count, js.grid.step);
        for (std::size_t i = 0; i < js.grid.count; ++i) {
            const std::size_t j = js.grid.mirror_index(i);
            const double a = std::abs(js.amplitude[i]);
            const double b = std::abs(js.amplitude[j]);
            const double ph = terms.pair_phase[i] - js.grid.detuning[i] * u;
            const double cosph = std::cos(ph);
            r_plus += w[i] * (a * a + b * b + 2.0 * a * b * cosph);
            r_minus += w[i] * (a * a + b * b - 2.0 * a * b * cosph);
        }
        ig.visibility_direct = std::abs(r_plus - r_minus) / (r_plus + r_minus);
    }

    const auto cross =
        curve::outer_level_crossings(ig.delay_fs, ig.envelope, 0.5 * ig.envelope[p]);
    ig.envelope_fwhm_fs = cross.found ? cross.hi - cross.lo : 0.0;
    ig.envelope_truncated = cross.lo_truncated || cross.hi_truncated;

    // fringe period from the rate zero crossings around the envelope peak
    ig.measured_fringe_period_fs = std::numeric_limits<double>::quiet_NaN();
    if (ig.envelope[p] > 1e-3 * ig.constant) {
        const double window = 4.0 * ig.nominal_fringe_period_fs;
        std::vector<double> crossings;
        for (std::size_t i = 1; i < n; ++i) {
            if (std::abs(ig.delay_fs[i] - ig.delay_fs[p]) > window) continue;
            const double y0 = ig.rate[i - 1] - ig.constant;
            const double y1 = ig.rate[i] - ig.constant;
            if ((y0 < 0.0 && y1 >= 0.0) || (y0 > 0.0 && y1 <= 0.0)) {
                const double t = y0 / (y0 - y1);
                crossings.push_back(ig.delay_fs[i - 1] + t * step);
            }
        }
        if (crossings.size() >= 3)
            ig.measured_fringe_period_fs =
                2.0 * (crossings.back() - crossings.front()) /
                static_cast<double>(crossings.size() - 1);
    }
    return ig;
}

std::vector<double> coincidence_rate_reference(const JointSpectrum& js,
                                               const InterferometerConfig& cfg,
                                               const std::vector<double>& delays_fs) {
    const KernelTerms terms = build_terms(js, cfg);
    const auto w = curve::trapezoid_weights(js.grid.count, js.grid.step);
    const double fringe_omega = js.omega0 * cfg.phase_group_ratio;

    std::vector<double> rate(delays_fs.size());
    for (std::size_t k = 0; k < delays_fs.size(); ++k) {
        const double tau = delays_fs[k];
        const double theta = fringe_omega * tau;
        const double u = tau - terms.t0;
        double acc = 0.0;
        for (std::size_t i = 0; i < js.grid.count; ++i) {
            const std::size_t j = js.grid.mirror_index(i);
            const double a = std::abs(js.amplitude[i]);
            const double b = std::abs(js.amplitude[j]);
            const double ph = theta + terms.pair_phase[i] - js.grid.detuning[i] * u;
            acc += w[i] * std::norm(a * std::polar(1.0, ph) + b);
        }
        rate[k] = acc;
    }
    return rate;
}

double visibility(const Interferogram& ig) {
    if (ig.delay_fs.size() >= 2) {
        const double step = ig.delay_fs[1] - ig.delay_fs[0];
        if (step * 8.0 > ig.nominal_fringe_period_fs)
            throw AnalysisError("fringes undersampled: step " + std::to_string(step) +
                                " fs exceeds 1/8 of the fringe period");
    }
    if (std::abs(ig.visibility_decomposed - ig.visibility_direct) > 1e-6)
        throw AnalysisError("visibility routes disagree: decomposed " +
                            std::to_string(ig.visibility_decomposed) + " vs direct " +
                            std::to_string(ig.visibility_direct));
    return ig.visibility_decomposed;
}

double fringe_period(const Interferogram& ig) {
    if (!(visibility(ig) >= 0.05))
        throw AnalysisError("contrast too low to measure a fringe period");
    if (!std::isfinite(ig.measured_fringe_period_fs))
        throw AnalysisError("no fringe zero crossings found near the envelope peak");
    return ig.measured_fringe_period_fs;
}

double envelope_fwhm(const Interferogram& ig) { return ig.envelope_fwhm_fs; }

int count_envelope_peaks(const Interferogram& ig, double rel_threshold) {
    const double peak = ig.envelope[ig.envelope_peak_index];
    return curve::count_local_maxima(ig.envelope, rel_threshold * peak);
}

PhaseRulerCheck phase_ruler_check(const JointSpectrum& js, const InterferometerConfig& cfg,
                                  double c0, double c2) {
    Interferogram base = coincidence_scan(js, cfg);

    InterferometerConfig pinned = cfg;
    pinned.delay_start_fs = base.delay_fs.front();
    pinned.delay_stop_fs = base.delay_fs.back();
    pinned.delay_step_fs = base.delay_fs.size() > 1 ? base.delay_fs[1] - base.delay_fs[0]
                                                    : base.nominal_fringe_period_fs / 16.0;

    const JointSpectrum shifted = with_injected_phase(js, c0, c2, 0.0);
    const Interferogram moved = coincidence_scan(shifted, pinned);

    const std::size_t n = std::min(base.rate.size(), moved.rate.size());
    double peak = 0.0, worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) peak = std::max(peak, base.rate[i]);
    for (std::size_t i = 0; i < n; ++i)
        worst = std::max(worst, std::abs(base.rate[i] - moved.rate[i]));
    return {peak > 0.0 ? worst / peak : 0.0};
}

}  // namespace spdckit
