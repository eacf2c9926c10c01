#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "spdckit/core.hpp"
#include "spdckit/dispersion.hpp"
#include "spdckit/errors.hpp"
#include "spdckit/jsa.hpp"
#include "spdckit/poling.hpp"

using namespace spdckit;

namespace {

constexpr double kPeriod = 9.2186003166085152;  // calibrated for the default stack at 775 nm
constexpr double kLength = 16500.0;
constexpr double kHalfPeriod = kPeriod / 2.0;
constexpr double kHalfSpan = 0.15466933690512578;

std::string materials_path() { return std::string(SPDCKIT_SOURCE_DIR) + "/data/materials.json"; }

const DispersionModel& default_model() {
    static const DispersionModel d = [] {
        const MaterialLibrary lib = load_material_library(materials_path());
        return make_dispersion_model(lib, DispersionOptions{});
    }();
    return d;
}

// equally spaced alternating domains starting on a negative one, built
// directly so the wall positions are exact double products m * l
DomainSequence uniform_sequence(std::size_t m_count, double l) {
    DomainSequence seq;
    seq.length_um.assign(m_count, l);
    seq.start_um.resize(m_count);
    seq.sign.resize(m_count);
    for (std::size_t m = 0; m < m_count; ++m) {
        seq.start_um[m] = static_cast<double>(m) * l;
        seq.sign[m] = (m % 2 == 0) ? -1 : +1;
    }
    seq.total_length_um = static_cast<double>(m_count) * l;
    seq.final_truncated = false;
    seq.full_domain_count = m_count;
    return seq;
}

// closed form for a uniform grating: the domain sum telescopes to a geometric
// series, f(db) = -l sinc(u/2) e^{-iu/2} e^{i chi (M-1)/2} sin(M chi/2) / sin(chi/2)
// with u = db*l and chi = pi - u reduced mod 2 pi. Long double throughout; an
// odd M keeps the reduction free of half-turn sign flips.
std::complex<double> dirichlet_oracle(double db, double l, std::size_t m_count) {
    const long double pi_l = 3.14159265358979323846264338327950288L;
    const long double u = static_cast<long double>(db) * static_cast<long double>(l);
    const long double chi = std::remainder(pi_l - u, 2.0L * pi_l);
    const long double m = static_cast<long double>(m_count);
    const long double dirichlet =
        std::fabs(chi) < 1e-18L ? m : std::sin(0.5L * m * chi) / std::sin(0.5L * chi);
    const long double s = u == 0.0L ? 1.0L : std::sin(0.5L * u) / (0.5L * u);
    const long double mag = -static_cast<long double>(l) * s * dirichlet;
    const long double phase = -0.5L * u + 0.5L * chi * (m - 1.0L);
    return {static_cast<double>(mag * std::cos(phase)),
            static_cast<double>(mag * std::sin(phase))};
}

const JointSpectrum& uniform_spectrum() {
    static const JointSpectrum js = [] {
        const DomainSequence seq = generate_domains({UniformProfile{}, kPeriod, kLength});
        const SpectralGrid grid = make_symmetric_grid(16385, kHalfSpan);
        return compute_spectrum(seq, default_model(), grid);
    }();
    return js;
}

// Gaussian envelope centered off degeneracy with a polynomial spectral phase
// s0 W + q W^2 + c W^3; drives the phase pipeline with known inputs
JointSpectrum synthetic_spectrum(const SpectralGrid& grid, double center, double sigma,
                                 double s0, double q, double c) {
    JointSpectrum js;
    js.grid = grid;
    js.omega0 = 1.2152590756831311;
    js.amplitude.resize(grid.count);
    js.peak_amplitude = 0.0;
    for (std::size_t i = 0; i < grid.count; ++i) {
        const double x = grid.detuning[i];
        const double t = (x - center) / sigma;
        const double mag = std::exp(-0.5 * t * t);
        js.amplitude[i] = std::polar(mag, s0 * x + q * x * x + c * x * x * x);
        js.peak_amplitude = std::max(js.peak_amplitude, mag);
    }
    js.intensity.resize(grid.count);
    const double inv = 1.0 / (js.peak_amplitude * js.peak_amplitude);
    for (std::size_t i = 0; i < grid.count; ++i)
        js.intensity[i] = std::norm(js.amplitude[i]) * inv;
    unwrap_phase(js);
    residual_phase(js);
    return js;
}

// weighted <x^4>/<x^2> over the same samples the group slope fit uses; a
// least squares line through the origin fit to x^3 picks up exactly this
double curvature_ratio(const JointSpectrum& js) {
    double s2 = 0.0, s4 = 0.0;
    for (std::size_t i = 0; i < js.grid.count; ++i) {
        const std::size_t j = js.grid.mirror_index(i);
        if (!js.phase_defined[i] || !js.phase_defined[j]) continue;
        if (js.intensity[i] < 0.5) continue;
        const double w = js.intensity[i];
        const double x = js.grid.detuning[i];
        s2 += w * x * x;
        s4 += w * x * x * x * x;
    }
    return s4 / s2;
}

}  // namespace

TEST_CASE("uniform grating amplitude matches the geometric series closed form") {
    const std::size_t m_count = 401;
    const DomainSequence seq = uniform_sequence(m_count, kHalfPeriod);
    const SpectralGrid grid = make_symmetric_grid(1025, 0.12);
    const std::vector<double> mm = mismatch_on_grid(default_model(), grid);

    const auto ref = amplitude_reference_with_mismatch(seq, mm, grid);
    const auto fast = amplitude_fast_with_mismatch(seq, mm, grid);

    std::vector<std::complex<double>> oracle(grid.count);
    double peak = 0.0;
    for (std::size_t i = 0; i < grid.count; ++i) {
        oracle[i] = dirichlet_oracle(mm[i], kHalfPeriod, m_count);
        peak = std::max(peak, std::abs(oracle[i]));
    }
    REQUIRE(peak > 100.0);  // the QPM peak is near M l 2/pi, sanity on the setup
    // the wall sum cancels hundreds of O(1) terms near the sinc zeros, so the
    // fast kernel's accuracy is relative to the peak there, not per sample
    for (std::size_t i = 0; i < grid.count; ++i) {
        const double tol = 1e-10 * std::abs(oracle[i]) + 3e-12 * peak;
        CHECK(std::abs(ref[i] - oracle[i]) <= tol);
        CHECK(std::abs(fast[i] - oracle[i]) <= tol);
    }
}

TEST_CASE("amplitude magnitude at exact quasi-phase matching") {
    const std::size_t m_count = 401;
    const DomainSequence seq = uniform_sequence(m_count, kHalfPeriod);
    const SpectralGrid grid = make_symmetric_grid(3, 1e-3);
    const std::vector<double> mm(grid.count, -pi / kHalfPeriod);
    const double want = kHalfPeriod * (2.0 / pi) * static_cast<double>(m_count);
    CHECK(std::abs(amplitude_reference_with_mismatch(seq, mm, grid)[1]) ==
          doctest::Approx(want).epsilon(1e-10));
    CHECK(std::abs(amplitude_fast_with_mismatch(seq, mm, grid)[1]) ==
          doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("single domain amplitude is the bare boxcar integral") {
    DomainSequence seq;
    seq.length_um = {7.3};
    seq.start_um = {0.0};
    seq.sign = {-1};
    seq.total_length_um = 7.3;
    seq.full_domain_count = 1;

    const SpectralGrid grid = make_symmetric_grid(5, 1.0);
    const std::vector<double> mm = {-0.9, -0.3, 1e-12, 0.4, 0.8};
    const auto ref = amplitude_reference_with_mismatch(seq, mm, grid);
    const auto fast = amplitude_fast_with_mismatch(seq, mm, grid);
    for (std::size_t i = 0; i < mm.size(); ++i) {
        const double u = mm[i] * 7.3;
        const std::complex<double> want =
            -7.3 * (std::sin(0.5 * u) / (0.5 * u)) * std::polar(1.0, -0.5 * u);
        CHECK(std::abs(ref[i] - want) <= 1e-12 * std::abs(want));
        CHECK(std::abs(fast[i] - want) <= 1e-12 * std::abs(want));
    }
}

TEST_CASE("zero mismatch integrates the signed poling profile") {
    DomainSequence seq;
    seq.length_um = {3.0, 4.5, 5.0, 2.5, 6.0, 8.0};
    seq.start_um = {0.0, 3.0, 7.5, 12.5, 15.0, 21.0};
    seq.sign = {-1, +1, -1, +1, -1, +1};
    seq.total_length_um = 29.0;
    seq.full_domain_count = 6;

    const SpectralGrid grid = make_symmetric_grid(3, 1.0);
    const std::vector<double> mm(grid.count, 0.0);
    for (const auto& f : {amplitude_reference_with_mismatch(seq, mm, grid),
                          amplitude_fast_with_mismatch(seq, mm, grid)}) {
        for (std::size_t i = 0; i < grid.count; ++i) {
            CHECK(f[i].real() == 1.0);  // -3 + 4.5 - 5 + 2.5 - 6 + 8
            CHECK(f[i].imag() == 0.0);
        }
    }
}

TEST_CASE("fast kernel agrees with the per-domain reference on chirped devices") {
    const SpectralGrid grid = make_symmetric_grid(2049, kHalfSpan);
    const std::vector<double> mm = mismatch_on_grid(default_model(), grid);
    for (const ProfileShape& shape :
         {ProfileShape{LinearChirpProfile{3.0e-3}}, ProfileShape{ApodizedChirpProfile{218.9, -1.99}}}) {
        const DomainSequence seq = generate_domains({shape, kPeriod, kLength});
        const auto ref = amplitude_reference_with_mismatch(seq, mm, grid);
        const auto fast = amplitude_fast_with_mismatch(seq, mm, grid);
        double peak = 0.0;
        for (const auto& f : ref) peak = std::max(peak, std::abs(f));
        REQUIRE(peak > 0.0);
        for (std::size_t i = 0; i < grid.count; ++i) {
            const double tol = 1e-10 * std::abs(ref[i]) + 3e-12 * peak;
            CHECK(std::abs(fast[i] - ref[i]) <= tol);
        }
    }
}

TEST_CASE("spectrum pipeline on the uniform source") {
    const JointSpectrum& js = uniform_spectrum();
    const SpectralGrid& grid = js.grid;

    CHECK(js.peak_amplitude > 0.0);
    CHECK(js.intensity[grid.zero_index()] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(js.has_phase);
    CHECK(js.has_delta);

    // the walls telescope to e^{-i db z}, so the unwrapped phase tracks
    // -db(W) L/2 and the fitted slope is half the device group delay mismatch
    const GroupProperties gp = group_properties(default_model());
    CHECK(js.group_slope_fs ==
          doctest::Approx(-0.5 * gp.dgd_per_length * kLength).epsilon(1e-4));

    CHECK(js.delta[grid.zero_index()] == 0.0);
    std::size_t checked = 0, lobe = 0;
    for (std::size_t i = 0; i < grid.count; ++i) {
        const std::size_t j = grid.mirror_index(i);
        if (!js.phase_defined[i] || !js.phase_defined[j]) {
            CHECK(std::isnan(js.delta[i]));
            continue;
        }
        if (js.delta[j] != -js.delta[i]) ++checked;  // antisymmetric bit for bit
        if (js.intensity[i] >= 0.5 && std::abs(js.delta[i]) > 1e-3) ++lobe;
    }
    CHECK(checked == 0);
    CHECK(lobe == 0);

    const BandwidthReport rep = bandwidth(js);
    CHECK(rep.fwhm_nm == doctest::Approx(1.584983515).epsilon(2e-3));
    CHECK(rep.peak_wavelengths_nm.size() == 1);
    CHECK(rep.peak_wavelengths_nm[0] == doctest::Approx(1550.0).epsilon(1e-3));
    CHECK_FALSE(rep.truncated);
    // the L1 imbalance is dominated by far sinc sidelobes, where the mismatch
    // curvature decorrelates mirrored samples; the central lobe is symmetric
    CHECK(rep.symmetry_residual < 0.15);
}

TEST_CASE("group slope fit recovers the linear coefficient plus the weighted cubic leak") {
    const SpectralGrid grid = make_symmetric_grid(1025, 0.05);
    const double s0 = -3.7, c = 8.0e4;
    const JointSpectrum js = synthetic_spectrum(grid, 0.0, 0.015, s0, 0.0, c);

    const double want = s0 + c * curvature_ratio(js);
    CHECK(js.group_slope_fs == doctest::Approx(want).epsilon(1e-10));

    const double excess = js.group_slope_fs - s0;
    for (std::size_t i = 0; i < grid.count; ++i) {
        if (std::isnan(js.delta[i]) || std::abs(grid.detuning[i]) > 0.03) continue;
        const double x = grid.detuning[i];
        const double expect = 2.0 * c * x * x * x - 2.0 * excess * x;
        CHECK(js.delta[i] == doctest::Approx(expect).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("even phase terms cannot bias the group slope") {
    // the envelope sits off center, so intensity weights are lopsided; a fit
    // to the raw phase would leak the quadratic term into the slope, the
    // mirror difference cancels it structurally
    const SpectralGrid grid = make_symmetric_grid(1025, 0.05);
    const double s0 = -3.7, c = 2.0e4;
    const JointSpectrum plain = synthetic_spectrum(grid, 0.004, 0.015, s0, 0.0, c);
    const JointSpectrum quad = synthetic_spectrum(grid, 0.004, 0.015, s0, 300.0, c);

    CHECK(plain.group_slope_fs ==
          doctest::Approx(s0 + c * curvature_ratio(plain)).epsilon(1e-10));
    CHECK(quad.group_slope_fs == doctest::Approx(plain.group_slope_fs).epsilon(1e-9));
    for (std::size_t i = 0; i < grid.count; ++i) {
        if (std::isnan(plain.delta[i]) || std::isnan(quad.delta[i])) continue;
        CHECK(quad.delta[i] == doctest::Approx(plain.delta[i]).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("injected even phase leaves intensity, bandwidth and residual alone") {
    const JointSpectrum& js = uniform_spectrum();
    const JointSpectrum even = with_injected_phase(js, 0.4, 1.5e4, 0.0);

    double worst = 0.0;
    for (std::size_t i = 0; i < js.grid.count; ++i)
        worst = std::max(worst, std::abs(even.intensity[i] - js.intensity[i]));
    CHECK(worst < 1e-13);

    CHECK(even.group_slope_fs == doctest::Approx(js.group_slope_fs).epsilon(1e-9));
    CHECK(bandwidth(even).fwhm_nm == doctest::Approx(bandwidth(js).fwhm_nm).epsilon(1e-12));
    for (std::size_t i = 0; i < js.grid.count; ++i) {
        if (std::isnan(js.delta[i]) || js.intensity[i] < 0.5) continue;
        CHECK(even.delta[i] == doctest::Approx(js.delta[i]).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("injected cubic phase shifts the slope by its weighted projection") {
    const JointSpectrum& js = uniform_spectrum();
    const double c3 = 1.0e8;
    const JointSpectrum cubic = with_injected_phase(js, 0.0, 0.0, c3);
    // the fit is linear in the phase, so the slope moves by exactly the
    // projection of c3 W^3 onto W under the fit weights
    CHECK(cubic.group_slope_fs - js.group_slope_fs ==
          doctest::Approx(c3 * curvature_ratio(js)).epsilon(1e-6));
}

TEST_CASE("input validation of the amplitude kernels") {
    const SpectralGrid grid = make_symmetric_grid(5, 1.0);
    const DomainSequence seq = uniform_sequence(8, 4.5);
    const std::vector<double> short_mm(4, 0.1);
    CHECK_THROWS_AS((void)amplitude_reference_with_mismatch(seq, short_mm, grid),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)amplitude_fast_with_mismatch(seq, short_mm, grid),
                    std::invalid_argument);

    const DomainSequence empty;
    const std::vector<double> mm(5, 0.1);
    CHECK_THROWS_AS((void)amplitude_reference_with_mismatch(empty, mm, grid), AnalysisError);
    CHECK_THROWS_AS((void)amplitude_fast_with_mismatch(empty, mm, grid), AnalysisError);

    JointSpectrum bare;
    bare.grid = grid;
    CHECK_THROWS_AS(unwrap_phase(bare), AnalysisError);
    bare.amplitude.assign(grid.count, {1.0, 0.0});
    CHECK_THROWS_AS(residual_phase(bare), AnalysisError);  // unwrap must run first
}

TEST_CASE("undefined samples propagate as NaN through the phase pipeline") {
    JointSpectrum js;
    js.grid = make_symmetric_grid(9, 1.0);
    js.amplitude.assign(9, {1.0, 0.0});
    js.amplitude[2] = 0.0;
    js.peak_amplitude = 1.0;
    js.intensity.assign(9, 1.0);
    js.intensity[2] = 0.0;
    unwrap_phase(js);
    residual_phase(js);

    CHECK(js.phase_defined[2] == 0);
    CHECK(std::isnan(js.phase[2]));
    CHECK(std::isnan(js.delta[2]));
    CHECK(std::isnan(js.delta[js.grid.mirror_index(2)]));
    CHECK(js.delta[js.grid.zero_index()] == 0.0);
}

TEST_CASE("too narrow spectral support rejects the slope fit") {
    const SpectralGrid grid = make_symmetric_grid(257, 0.1);
    CHECK_THROWS_AS((void)synthetic_spectrum(grid, 0.0, 1e-4, 1.0, 0.0, 0.0), AnalysisError);
}

TEST_CASE("bandwidth flags spectra clipped by the grid") {
    const DomainSequence seq = generate_domains({UniformProfile{}, kPeriod, kLength});
    const SpectralGrid grid = make_symmetric_grid(257, 4e-4);
    const JointSpectrum js = compute_spectrum(seq, default_model(), grid);
    CHECK(bandwidth(js).truncated);
}

TEST_CASE("bandwidth is stable under grid refinement") {
    const DomainSequence seq = generate_domains({LinearChirpProfile{3.0e-3}, kPeriod, kLength});
    const DispersionModel& d = default_model();
    const double coarse = bandwidth(compute_spectrum(seq, d, make_symmetric_grid(2049, kHalfSpan))).fwhm_nm;
    const double fine = bandwidth(compute_spectrum(seq, d, make_symmetric_grid(4097, kHalfSpan))).fwhm_nm;
    CHECK(std::abs(fine - coarse) / fine < 1e-3);
}

TEST_CASE("precomputed mismatch path matches the model path") {
    const DispersionModel& d = default_model();
    const DomainSequence seq = generate_domains({UniformProfile{}, kPeriod, kLength});
    const SpectralGrid grid = make_symmetric_grid(257, 0.01);
    const std::vector<double> mm = mismatch_on_grid(d, grid);
    for (std::size_t i = 0; i < grid.count; i += 16)
        CHECK(mm[i] == doctest::Approx(mismatch_bulk(d, grid.detuning[i])).epsilon(1e-14));

    const JointSpectrum a = compute_spectrum(seq, d, grid);
    const JointSpectrum b =
        compute_spectrum_with_mismatch(seq, mm, grid, d.degenerate_omega().value);
    for (std::size_t i = 0; i < grid.count; ++i) CHECK(a.amplitude[i] == b.amplitude[i]);
    CHECK(a.group_slope_fs == b.group_slope_fs);
}
