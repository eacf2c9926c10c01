#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "spdckit/core.hpp"
#include "spdckit/dispersion.hpp"
#include "spdckit/errors.hpp"
#include "spdckit/interferometer.hpp"
#include "spdckit/jsa.hpp"
#include "spdckit/poling.hpp"

using namespace spdckit;

namespace {

constexpr double kPeriod = 9.2186003166085152;
constexpr double kLength = 16500.0;
constexpr double kHalfSpan = 0.15466933690512578;
constexpr double kOmega0 = 1.2152590756831311;

std::string materials_path() { return std::string(SPDCKIT_SOURCE_DIR) + "/data/materials.json"; }

const DispersionModel& default_model() {
    static const DispersionModel d = [] {
        const MaterialLibrary lib = load_material_library(materials_path());
        return make_dispersion_model(lib, DispersionOptions{});
    }();
    return d;
}

const JointSpectrum& uniform_spectrum() {
    static const JointSpectrum js = [] {
        const DomainSequence seq = generate_domains({UniformProfile{}, kPeriod, kLength});
        return compute_spectrum(seq, default_model(), make_symmetric_grid(16385, kHalfSpan));
    }();
    return js;
}

const Interferogram& uniform_scan() {
    static const Interferogram ig = coincidence_scan(uniform_spectrum(), InterferometerConfig{});
    return ig;
}

// Gaussian pair spectrum with a controlled spectral phase; center shifts the
// envelope off degeneracy to break the mirror symmetry on demand
JointSpectrum synthetic_spectrum(double center, double sigma, double s0, double c3) {
    JointSpectrum js;
    js.grid = make_symmetric_grid(2049, 0.1);
    js.omega0 = kOmega0;
    js.amplitude.resize(js.grid.count);
    js.peak_amplitude = 0.0;
    for (std::size_t i = 0; i < js.grid.count; ++i) {
        const double x = js.grid.detuning[i];
        const double t = (x - center) / sigma;
        const double mag = std::exp(-0.5 * t * t);
        js.amplitude[i] = std::polar(mag, s0 * x + c3 * x * x * x);
        js.peak_amplitude = std::max(js.peak_amplitude, mag);
    }
    js.intensity.resize(js.grid.count);
    const double inv = 1.0 / (js.peak_amplitude * js.peak_amplitude);
    for (std::size_t i = 0; i < js.grid.count; ++i)
        js.intensity[i] = std::norm(js.amplitude[i]) * inv;
    unwrap_phase(js);
    residual_phase(js);
    return js;
}

}  // namespace

TEST_CASE("symmetric flat-phase pairs interfere with unit visibility") {
    const JointSpectrum js = synthetic_spectrum(0.0, 0.01, 0.0, 0.0);
    InterferometerConfig cfg;  // grid through tau = 0, where the envelope peaks
    cfg.delay_start_fs = -20.0;
    cfg.delay_stop_fs = 20.0;
    cfg.delay_step_fs = 0.25;
    const Interferogram ig = coincidence_scan(js, cfg);
    CHECK(visibility(ig) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(ig.envelope_peak_fs) < 0.5);
    CHECK(count_envelope_peaks(ig) == 1);
}

TEST_CASE("asymmetric spectrum or odd phase degrades visibility") {
    const JointSpectrum shifted = synthetic_spectrum(0.004, 0.01, 0.0, 0.0);
    CHECK(visibility(coincidence_scan(shifted, InterferometerConfig{})) < 1.0 - 1e-3);

    const JointSpectrum cubic = synthetic_spectrum(0.0, 0.01, 0.0, 4.0e6);
    CHECK(visibility(coincidence_scan(cubic, InterferometerConfig{})) < 1.0 - 1e-3);
}

TEST_CASE("decomposed scan matches the literal quadrature reference") {
    const JointSpectrum& js = uniform_spectrum();
    InterferometerConfig cfg;
    cfg.delay_start_fs = 4440.0;
    cfg.delay_stop_fs = 4520.0;
    const Interferogram ig = coincidence_scan(js, cfg);
    const auto ref = coincidence_rate_reference(js, cfg, ig.delay_fs);

    REQUIRE(ref.size() == ig.rate.size());
    const double tol = 2.5e-9 * ig.constant;
    for (std::size_t i = 0; i < ref.size(); ++i)
        CHECK(std::abs(ig.rate[i] - ref[i]) <= tol);
}

TEST_CASE("uniform source envelope is the group delay triangle") {
    const Interferogram& ig = uniform_scan();
    const GroupProperties gp = group_properties(default_model());
    const double dgd = gp.dgd_per_length * kLength;

    // the compensation parks the envelope at the source group delay mismatch
    CHECK(ig.center_delay_fs == doctest::Approx(dgd).epsilon(1e-3));
    CHECK(ig.envelope_peak_fs == doctest::Approx(dgd).epsilon(1e-3));
    // Fourier pair of the squared sinc marginal: a triangle of half-base L*D,
    // whose half-max width equals L*D
    CHECK(ig.envelope_fwhm_fs == doctest::Approx(dgd).epsilon(0.02));
    CHECK(count_envelope_peaks(ig) == 1);
    CHECK_FALSE(ig.envelope_truncated);

    CHECK(visibility(ig) == doctest::Approx(0.9935).epsilon(2e-3));
    CHECK(std::abs(ig.visibility_decomposed - ig.visibility_direct) < 1e-6);

    CHECK(ig.nominal_fringe_period_fs == doctest::Approx(5.1702434755713568).epsilon(1e-14));
    CHECK(fringe_period(ig) == doctest::Approx(5.1702434755713568).epsilon(3e-3));
}

TEST_CASE("quartz phase to group ratio rescales the fringes only") {
    const JointSpectrum& js = uniform_spectrum();
    const BdlDelays bdl = bdl_delays(default_model(), 1000.0);

    InterferometerConfig cfg;
    cfg.delay_start_fs = 4440.0;
    cfg.delay_stop_fs = 4520.0;
    cfg.delay_step_fs = 0.3;  // shared grid, the envelope must not notice the ratio
    cfg.phase_group_ratio = bdl.phase_group_ratio;
    const Interferogram quartz = coincidence_scan(js, cfg);

    cfg.phase_group_ratio = 1.0;
    const Interferogram ideal = coincidence_scan(js, cfg);

    CHECK(quartz.nominal_fringe_period_fs ==
          doctest::Approx(two_pi / (kOmega0 * bdl.phase_group_ratio)).epsilon(1e-12));
    CHECK(quartz.visibility_decomposed ==
          doctest::Approx(ideal.visibility_decomposed).epsilon(1e-12));
    CHECK(fringe_period(quartz) ==
          doctest::Approx(quartz.nominal_fringe_period_fs).epsilon(3e-3));
}

TEST_CASE("uncompensated scan parks the envelope at the raw group slope") {
    const JointSpectrum& js = uniform_spectrum();
    InterferometerConfig cfg;
    cfg.compensate_group_slope = false;
    cfg.delay_start_fs = 2.0 * js.group_slope_fs - 50.0;
    cfg.delay_stop_fs = 2.0 * js.group_slope_fs + 50.0;
    const Interferogram raw = coincidence_scan(js, cfg);

    CHECK(raw.center_delay_fs == 0.0);
    CHECK(raw.envelope_peak_fs == doctest::Approx(2.0 * js.group_slope_fs).epsilon(1e-3));
    // the linear phase only translates the envelope, contrast is unchanged
    CHECK(raw.visibility_decomposed ==
          doctest::Approx(uniform_scan().visibility_decomposed).scale(1.0).epsilon(2e-4));
}

TEST_CASE("uniform optical loss cancels out of every figure of merit") {
    const JointSpectrum& js = uniform_spectrum();
    JointSpectrum lossy = js;
    for (auto& a : lossy.amplitude) a *= 0.32;
    lossy.peak_amplitude = 0.32 * js.peak_amplitude;
    // normalized intensity and phase are untouched by a flat loss

    const Interferogram a = uniform_scan();
    const Interferogram b = coincidence_scan(lossy, InterferometerConfig{});

    CHECK(b.constant == doctest::Approx(0.32 * 0.32 * a.constant).epsilon(1e-12));
    CHECK(visibility(b) == doctest::Approx(visibility(a)).epsilon(1e-12));
    CHECK(envelope_fwhm(b) == doctest::Approx(envelope_fwhm(a)).epsilon(1e-12));
    // the parabolic refinement divides by a near-cancelling curvature at the
    // triangle apex, so the peak position is looser than the ratios above
    CHECK(b.envelope_peak_fs == doctest::Approx(a.envelope_peak_fs).epsilon(1e-7));
    CHECK(fringe_period(b) == doctest::Approx(fringe_period(a)).epsilon(1e-12));
}

TEST_CASE("even spectral phase does not move the interferogram") {
    const PhaseRulerCheck check =
        phase_ruler_check(uniform_spectrum(), InterferometerConfig{}, 0.7, 1.0e4);
    CHECK(check.max_rate_shift < 1e-9);
}

TEST_CASE("chirped source shows envelope beating") {
    const DomainSequence seq = generate_domains({LinearChirpProfile{3.0e-3}, kPeriod, kLength});
    const JointSpectrum js =
        compute_spectrum(seq, default_model(), make_symmetric_grid(16385, kHalfSpan));
    const Interferogram ig = coincidence_scan(js, InterferometerConfig{});
    CHECK(count_envelope_peaks(ig) >= 2);
    CHECK(visibility(ig) == doctest::Approx(0.5236).epsilon(2e-3));
}

TEST_CASE("scan validation rejects broken configurations") {
    const JointSpectrum js = synthetic_spectrum(0.0, 0.01, 0.0, 0.0);

    InterferometerConfig bad_ratio;
    bad_ratio.phase_group_ratio = 0.0;
    CHECK_THROWS_AS((void)coincidence_scan(js, bad_ratio), AnalysisError);

    InterferometerConfig empty;
    empty.delay_start_fs = 10.0;
    empty.delay_stop_fs = 10.0;
    CHECK_THROWS_AS((void)coincidence_scan(js, empty), AnalysisError);

    InterferometerConfig huge;
    huge.delay_start_fs = 0.0;
    huge.delay_stop_fs = 1.0e9;
    huge.delay_step_fs = 0.1;
    CHECK_THROWS_AS((void)coincidence_scan(js, huge), AnalysisError);

    JointSpectrum incomplete;
    incomplete.grid = js.grid;
    incomplete.amplitude = js.amplitude;
    CHECK_THROWS_AS((void)coincidence_scan(incomplete, InterferometerConfig{}), AnalysisError);
}

TEST_CASE("visibility runs its own consistency gates") {
    const JointSpectrum js = synthetic_spectrum(0.0, 0.01, 0.0, 0.0);

    InterferometerConfig coarse;
    coarse.delay_step_fs = 1.0;  // fringe period is 5.17 fs, needs 8 per period
    CHECK_THROWS_AS((void)visibility(coincidence_scan(js, coarse)), AnalysisError);

    Interferogram rigged = coincidence_scan(js, InterferometerConfig{});
    rigged.visibility_direct += 1e-4;
    CHECK_THROWS_AS((void)visibility(rigged), AnalysisError);
}

TEST_CASE("fringe period measurement needs contrast") {
    // envelope parked off degeneracy: mirror samples stay defined but their
    // products carry almost no weight, so the fringes drown in the constant
    const JointSpectrum js = synthetic_spectrum(0.03, 0.012, 0.0, 0.0);
    const Interferogram ig = coincidence_scan(js, InterferometerConfig{});
    CHECK(ig.visibility_decomposed < 0.05);
    CHECK_THROWS_AS((void)fringe_period(ig), AnalysisError);
}

TEST_CASE("undefined phase with weight is refused") {
    JointSpectrum js = synthetic_spectrum(0.0, 0.01, 0.0, 0.0);
    js.phase_defined[js.grid.zero_index() + 5] = 0;  // simulate an unwrap hole mid lobe
    CHECK_THROWS_AS((void)coincidence_scan(js, InterferometerConfig{}), AnalysisError);
}
