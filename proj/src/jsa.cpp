#include "spdckit/jsa.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
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

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

// sin/cos for |u| <= 0.45 by Horner on u^2; truncation below 2e-14, cheaper
// than libm argument reduction in the per-wall hot loop
inline void small_sincos(double u, double& s, double& c) {
    const double u2 = u * u;
    s = u * (1.0 +
             u2 * (-1.0 / 6 +
                   u2 * (1.0 / 120 +
                         u2 * (-1.0 / 5040 +
                               u2 * (1.0 / 362880 +
                                     u2 * (-1.0 / 39916800 + u2 * (1.0 / 6227020800.0)))))));
    c = 1.0 + u2 * (-0.5 +
                    u2 * (1.0 / 24 +
                          u2 * (-1.0 / 720 +
                                u2 * (1.0 / 40320 +
                                      u2 * (-1.0 / 3628800 + u2 * (1.0 / 479001600.0))))));
}

// full-range sin/cos that the compiler can vectorize: Cody-Waite reduction
// by 2*pi (exact for |a| well past any db*z this kernel sees) followed by a
// half-angle Taylor pair; absolute error stays below ~5e-14, so the rebase
// walls it serves stay inside the kernel's 1e-10 accuracy budget
inline void range_sincos(double a, double& s, double& c) {
    constexpr double inv_two_pi = 0.15915494309189535;
    constexpr double p1 = 6.283185303211212;       // 2*pi, top 26 mantissa bits
    constexpr double p2 = 3.968374295837407e-09;   // next 26 bits
    constexpr double p3 = 2.2884754904439327e-17;  // remainder
    const double k = std::nearbyint(a * inv_two_pi);
    const double h = 0.5 * (((a - k * p1) - k * p2) - k * p3);
    const double h2 = h * h;
    const double sh =
        h * (1.0 +
             h2 * (-1.0 / 6 +
                   h2 * (1.0 / 120 +
                         h2 * (-1.0 / 5040 +
                               h2 * (1.0 / 362880 +
                                     h2 * (-1.0 / 39916800 +
                                           h2 * (1.0 / 6227020800.0 +
                                                 h2 * (-1.0 / 1307674368000.0 +
                                                       h2 * (1.0 / 355687428096000.0)))))))));
    const double ch =
        1.0 +
        h2 * (-0.5 +
              h2 * (1.0 / 24 +
                    h2 * (-1.0 / 720 +
                          h2 * (1.0 / 40320 +
                                h2 * (-1.0 / 3628800 +
                                      h2 * (1.0 / 479001600.0 +
                                            h2 * (-1.0 / 87178291200.0 +
                                                  h2 * (1.0 / 20922789888000.0 +
                                                        h2 * (-1.0 / 6402373705728000.0)))))))));
    s = 2.0 * sh * ch;
    c = 1.0 - 2.0 * sh * sh;
}

constexpr double kPolyMaxU = 0.45;
constexpr double kSmallMismatch = 1e-9;  // rad/um; below this the sinc form is used
constexpr unsigned kResyncInterval = 128;
constexpr std::size_t kPointBlock = 128;

// wall coordinates and telescoped weights of a domain sequence:
// f = (i/db) * sum_k g_k exp(-i db z_k) with g_0 = -s_0, g_k = s_{k-1} - s_k
// inside and g_M = s_{M-1}, which is the exact integral over the domains
struct WallData {
    std::vector<double> z;       // M+1 walls, z[0] = 0
    std::vector<double> weight;  // g_k, M+1 entries
    std::vector<double> dev;     // length - l_base per domain
    double l_base = 0.0;         // typical domain length; rotations split around it
};

WallData make_walls(const DomainSequence& seq) {
    const std::size_t m_count = seq.length_um.size();
    if (m_count == 0) throw AnalysisError("domain sequence is empty");
    WallData w;
    w.z.resize(m_count + 1);
    w.weight.resize(m_count + 1);
    w.z[0] = 0.0;
    for (std::size_t m = 0; m < m_count; ++m) w.z[m + 1] = w.z[m] + seq.length_um[m];

    w.weight[0] = -static_cast<double>(seq.sign[0]);
    for (std::size_t k = 1; k < m_count; ++k)
        w.weight[k] = static_cast<double>(seq.sign[k - 1] - seq.sign[k]);
    w.weight[m_count] = static_cast<double>(seq.sign[m_count - 1]);

    const std::size_t full = seq.full_domain_count > 0 ? seq.full_domain_count : m_count;
    double mean = 0.0;
    for (std::size_t m = 0; m < full; ++m) mean += seq.length_um[m];
    w.l_base = mean / static_cast<double>(full);

    w.dev.resize(m_count);
    for (std::size_t m = 0; m < m_count; ++m) w.dev[m] = seq.length_um[m] - w.l_base;
    return w;
}

std::complex<double> point_reference(const DomainSequence& seq, double db) {
    std::complex<double> acc(0.0, 0.0);
    const std::size_t m_count = seq.length_um.size();
    for (std::size_t m = 0; m < m_count; ++m) {
        const double lm = seq.length_um[m];
        const double amp = static_cast<double>(seq.sign[m]) * lm * sinc(0.5 * db * lm);
        acc += amp * std::polar(1.0, -db * (seq.start_um[m] + 0.5 * lm));
    }
    return acc;
}

// a block of grid points advances through the wall recurrence together in
// struct-of-arrays form, so the point loop is branch-free and vectorizes;
// every kResyncInterval-th wall, and any wall whose rotation could leave the
// polynomial range, restarts the recurrence exactly from e^{-i db z} instead
void point_block_fast(const WallData& w, const DomainSequence& seq, const double* db,
                      std::size_t count, std::complex<double>* out) {
    std::array<double, kPointBlock> d, base_re, base_im, e_re, e_im, tot_re, tot_im;

    double dmax = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
        const double raw = db[j];
        const double dj = std::abs(raw) < kSmallMismatch ? 1.0 : raw;  // slot redone below
        d[j] = dj;
        dmax = std::max(dmax, std::abs(dj));
        base_re[j] = std::cos(dj * w.l_base);
        base_im[j] = -std::sin(dj * w.l_base);
        e_re[j] = 1.0;
        e_im[j] = 0.0;
        tot_re[j] = w.weight[0];
        tot_im[j] = 0.0;
    }

    const std::size_t m_count = w.dev.size();
    for (std::size_t k = 0; k < m_count; ++k) {
        const double g = w.weight[k + 1];
        const bool rebase =
            ((k + 1) % kResyncInterval) == 0 || std::abs(w.dev[k]) * dmax > kPolyMaxU;
        if (!rebase) [[likely]] {
            const double nd = -w.dev[k];
            for (std::size_t j = 0; j < count; ++j) {
                double s, c;
                small_sincos(nd * d[j], s, c);
                const double tr = e_re[j] * base_re[j] - e_im[j] * base_im[j];
                const double ti = e_re[j] * base_im[j] + e_im[j] * base_re[j];
                e_re[j] = tr * c - ti * s;
                e_im[j] = tr * s + ti * c;
                tot_re[j] += g * e_re[j];
                tot_im[j] += g * e_im[j];
            }
        } else {
            const double z1 = w.z[k + 1];
            for (std::size_t j = 0; j < count; ++j) {
                double s, c;
                range_sincos(d[j] * z1, s, c);
                e_re[j] = c;
                e_im[j] = -s;
                tot_re[j] += g * e_re[j];
                tot_im[j] += g * e_im[j];
            }
        }
    }

    for (std::size_t j = 0; j < count; ++j) {
        if (std::abs(db[j]) < kSmallMismatch)
            out[j] = point_reference(seq, db[j]);
        else
            out[j] = std::complex<double>(0.0, 1.0 / d[j]) *
                     std::complex<double>(tot_re[j], tot_im[j]);
    }
}

void validate_mismatch(const std::vector<double>& mm, const SpectralGrid& grid) {
    if (mm.size() != grid.count)
        throw std::invalid_argument("mismatch array has " + std::to_string(mm.size()) +
                                    " samples for a grid of " + std::to_string(grid.count));
}

}  // namespace

std::vector<double> mismatch_on_grid(const DispersionModel& d, const SpectralGrid& grid) {
    std::vector<double> mm(grid.count);
    const double w0 = d.degenerate_omega().value;
    const double beta_pump = beta(d.pump, d.pump_omega);
    for (std::size_t i = 0; i < grid.count; ++i) {
        const double det = grid.detuning[i];
        mm[i] = beta(d.signal_h, {w0 + det}) + beta(d.idler_v, {w0 - det}) - beta_pump;
    }
    return mm;
}

std::vector<std::complex<double>> amplitude_reference_with_mismatch(
    const DomainSequence& seq, const std::vector<double>& mismatch_rad_um,
    const SpectralGrid& grid) {
    validate_mismatch(mismatch_rad_um, grid);
    if (seq.length_um.empty()) throw AnalysisError("domain sequence is empty");
    std::vector<std::complex<double>> out(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) out[i] = point_reference(seq, mismatch_rad_um[i]);
    return out;
}

std::vector<std::complex<double>> amplitude_fast_with_mismatch(
    const DomainSequence& seq, const std::vector<double>& mismatch_rad_um,
    const SpectralGrid& grid) {
    validate_mismatch(mismatch_rad_um, grid);
    const WallData walls = make_walls(seq);
    std::vector<std::complex<double>> out(grid.count);
    const std::ptrdiff_t blocks =
        static_cast<std::ptrdiff_t>((grid.count + kPointBlock - 1) / kPointBlock);
#pragma omp parallel for schedule(static) if (allow_parallel())
    for (std::ptrdiff_t b = 0; b < blocks; ++b) {
        const std::size_t i0 = static_cast<std::size_t>(b) * kPointBlock;
        const std::size_t count = std::min<std::size_t>(kPointBlock, grid.count - i0);
        point_block_fast(walls, seq, mismatch_rad_um.data() + i0, count, out.data() + i0);
    }
    return out;
}

std::vector<std::complex<double>> amplitude_reference(const DomainSequence& seq,
                                                      const DispersionModel& d,
                                                      const SpectralGrid& grid) {
    return amplitude_reference_with_mismatch(seq, mismatch_on_grid(d, grid), grid);
}

std::vector<std::complex<double>> amplitude_fast(const DomainSequence& seq,
                                                 const DispersionModel& d,
                                                 const SpectralGrid& grid) {
    return amplitude_fast_with_mismatch(seq, mismatch_on_grid(d, grid), grid);
}

void unwrap_phase(JointSpectrum& js) {
    const std::size_t n = js.grid.count;
    if (js.amplitude.size() != n) throw AnalysisError("spectrum has no amplitude to unwrap");
    js.phase.assign(n, std::numeric_limits<double>::quiet_NaN());
    js.phase_defined.assign(n, 0);

    const double thresh = 1e-12 * js.peak_amplitude;
    for (std::size_t i = 0; i < n; ++i)
        js.phase_defined[i] = std::abs(js.amplitude[i]) > thresh ? 1 : 0;

    // walk outward from the center; each defined sample continues the branch
    // of the last defined one, undefined samples are skipped and left NaN
    const std::size_t center = js.grid.zero_index();
    auto walk = [&](std::ptrdiff_t step) {
        double prev_raw = 0.0, prev_unwrapped = 0.0;
        bool have = false;
        for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(center);
             i >= 0 && i < static_cast<std::ptrdiff_t>(n); i += step) {
            const auto iu = static_cast<std::size_t>(i);
            if (!js.phase_defined[iu]) continue;
            const double raw = std::arg(js.amplitude[iu]);
            if (!have) {
                js.phase[iu] = raw;
                have = true;
            } else {
                js.phase[iu] = prev_unwrapped + std::remainder(raw - prev_raw, two_pi);
            }
            prev_raw = raw;
            prev_unwrapped = js.phase[iu];
        }
    };
    walk(+1);
    walk(-1);
    js.has_phase = true;
}

void residual_phase(JointSpectrum& js) {
    if (!js.has_phase) throw AnalysisError("unwrap_phase must run before residual_phase");
    const std::size_t n = js.grid.count;

    // the slope is fit to the antisymmetric phase difference rather than to
    // the raw phase: chirped sources carry a large even (quadratic) phase
    // that would leak into a direct linear fit whenever the intensity weights
    // are not symmetric about degeneracy, leaving a spurious linear term in
    // delta. The difference cancels even orders exactly, and is odd by
    // construction, so the fit goes through the origin.
    double sxx = 0.0, sxy = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = js.grid.mirror_index(i);
        if (!js.phase_defined[i] || !js.phase_defined[j]) continue;
        if (js.intensity[i] < 0.5) continue;
        const double w = js.intensity[i];
        const double x = js.grid.detuning[i];
        const double y = js.phase[i] - js.phase[j];
        sxx += w * x * x;
        sxy += w * x * y;
        ++used;
    }
    if (used < 5)
        throw AnalysisError("group slope fit needs at least 5 half-maximum samples, got " +
                            std::to_string(used));
    if (!(sxx > 0.0))
        throw AnalysisError("group slope fit is degenerate; spectral support too narrow");
    // the phase difference spans both halves, so its slope is twice dphi/dOmega
    js.group_slope_fs = 0.5 * sxy / sxx;

    js.delta.assign(n, std::numeric_limits<double>::quiet_NaN());
    const double t = 2.0 * js.group_slope_fs;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = js.grid.mirror_index(i);
        if (js.phase_defined[i] && js.phase_defined[j])
            js.delta[i] = (js.phase[i] - js.phase[j]) - t * js.grid.detuning[i];
    }
    js.has_delta = true;
}

namespace {

JointSpectrum finish_spectrum(JointSpectrum js) {
    const std::size_t n = js.grid.count;
    js.peak_amplitude = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        js.peak_amplitude = std::max(js.peak_amplitude, std::abs(js.amplitude[i]));
    if (!(js.peak_amplitude > 0.0))
        throw AnalysisError("joint spectral amplitude vanishes on the whole grid");
    js.intensity.resize(n);
    const double inv = 1.0 / (js.peak_amplitude * js.peak_amplitude);
    for (std::size_t i = 0; i < n; ++i) js.intensity[i] = std::norm(js.amplitude[i]) * inv;
    unwrap_phase(js);
    residual_phase(js);
    return js;
}

}  // namespace

JointSpectrum compute_spectrum_with_mismatch(const DomainSequence& seq,
                                             const std::vector<double>& mismatch_rad_um,
                                             const SpectralGrid& grid, double omega0) {
    JointSpectrum js;
    js.grid = grid;
    js.omega0 = omega0;
    js.amplitude = amplitude_fast_with_mismatch(seq, mismatch_rad_um, grid);
    return finish_spectrum(std::move(js));
}

JointSpectrum compute_spectrum(const DomainSequence& seq, const DispersionModel& d,
                               const SpectralGrid& grid) {
    JointSpectrum js;
    js.grid = grid;
    js.omega0 = d.degenerate_omega().value;
    js.amplitude = amplitude_fast(seq, d, grid);
    return finish_spectrum(std::move(js));
}

BandwidthReport bandwidth(const JointSpectrum& js) {
    if (js.intensity.size() != js.grid.count)
        throw AnalysisError("spectrum has no intensity for bandwidth analysis");
    BandwidthReport rep;

    const auto cross = curve::outer_level_crossings(js.grid.detuning, js.intensity, 0.5);
    if (!cross.found) throw AnalysisError("no half-maximum crossings found");
    rep.fwhm_rad_fs = cross.hi - cross.lo;
    rep.truncated = cross.lo_truncated || cross.hi_truncated;
    // lower detuning edge is the long-wavelength edge
    rep.fwhm_nm = omega_to_wavelength_nm({js.omega0 + cross.lo}) -
                  omega_to_wavelength_nm({js.omega0 + cross.hi});

    const std::size_t n = js.grid.count;
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (js.intensity[i] > 0.8 && js.intensity[i] > js.intensity[i - 1] &&
            js.intensity[i] >= js.intensity[i + 1])
            rep.peak_wavelengths_nm.push_back(
                omega_to_wavelength_nm({js.omega0 + js.grid.detuning[i]}));

    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::abs(js.amplitude[i]);
        const double b = std::abs(js.amplitude[js.grid.mirror_index(i)]);
        num += std::abs(a - b);
        den += a + b;
    }
    rep.symmetry_residual = den > 0.0 ? num / den : 0.0;
    return rep;
}

JointSpectrum with_injected_phase(const JointSpectrum& js, double c0, double c2, double c3) {
    JointSpectrum out;
    out.grid = js.grid;
    out.omega0 = js.omega0;
    out.amplitude = js.amplitude;
    for (std::size_t i = 0; i < out.grid.count; ++i) {
        const double w = out.grid.detuning[i];
        out.amplitude[i] *= std::polar(1.0, c0 + c2 * w * w + c3 * w * w * w);
    }
    return finish_spectrum(std::move(out));
}

}  // namespace spdckit
