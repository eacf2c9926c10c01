#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "spdckit/core.hpp"
#include "spdckit/dispersion.hpp"
#include "spdckit/errors.hpp"

using namespace spdckit;

namespace {

std::string materials_path() { return std::string(SPDCKIT_SOURCE_DIR) + "/data/materials.json"; }

DispersionModel default_model() {
    const MaterialLibrary lib = load_material_library(materials_path());
    return make_dispersion_model(lib, DispersionOptions{});
}

}  // namespace

// Index goldens evaluated with 40-digit arithmetic straight from the cited
// Sellmeier coefficients at 25 C.
TEST_CASE("refractive indices of the congruent LiNbO3 axes") {
    const DispersionModel d = default_model();
    CHECK(d.signal_h.refractive_index(1.550) ==
          doctest::Approx(2.2112382802786866).epsilon(1e-12));
    CHECK(d.idler_v.refractive_index(1.550) ==
          doctest::Approx(2.1378801256208528).epsilon(1e-12));
    CHECK(d.signal_h.refractive_index(0.775) ==
          doctest::Approx(2.2586283645776728).epsilon(1e-12));
    CHECK(d.idler_v.refractive_index(0.775) ==
          doctest::Approx(2.1787240026774807).epsilon(1e-12));
    CHECK(d.signal_h.refractive_index(1.375) ==
          doctest::Approx(2.2175123242892033).epsilon(1e-12));
    CHECK(d.signal_h.refractive_index(1.725) ==
          doctest::Approx(2.2054988885844372).epsilon(1e-12));
}

TEST_CASE("quartz delay line indices") {
    const DispersionModel d = default_model();
    CHECK(d.bdl_h.refractive_index(1.550) ==
          doctest::Approx(1.5276959401669075).epsilon(1e-12));
    CHECK(d.bdl_v.refractive_index(1.550) ==
          doctest::Approx(1.5361702921941505).epsilon(1e-12));
}

TEST_CASE("propagation constants at 1550 nm") {
    const DispersionModel d = default_model();
    const AngularFrequency w = wavelength_to_omega(1550.0);
    CHECK(beta(d.signal_h, w) == doctest::Approx(8.9636257247226452).epsilon(1e-12));
    CHECK(beta(d.idler_v, w) == doctest::Approx(8.6662561250401232).epsilon(1e-12));
}

TEST_CASE("beta grows monotonically across the signal band") {
    const DispersionModel d = default_model();
    double prev_h = 0.0, prev_v = 0.0;
    for (double nm = 1725.0; nm >= 1375.0; nm -= 10.0) {
        const AngularFrequency w = wavelength_to_omega(nm);
        const double bh = beta(d.signal_h, w);
        const double bv = beta(d.idler_v, w);
        CHECK(bh > prev_h);
        CHECK(bv > prev_v);
        prev_h = bh;
        prev_v = bv;
    }
}

TEST_CASE("bulk mismatch and calibrated poling period") {
    const DispersionModel d = default_model();
    CHECK(mismatch_bulk(d, 0.0) == doctest::Approx(-0.68157693048689894).epsilon(1e-12));
    const double period = calibrate_period(d);
    CHECK(period == doctest::Approx(9.2186003166085152).epsilon(1e-12));
    // the calibrated period cancels the bulk mismatch at degeneracy
    CHECK(std::abs(delta_beta(d, 0.0, period)) < 1e-12);
}

TEST_CASE("pump index offset reproducing a nominal period") {
    const MaterialLibrary lib = load_material_library(materials_path());
    const DispersionModel d = make_dispersion_model(lib, DispersionOptions{});
    const double off = fit_pump_offset(d, 9.3);
    CHECK(off == doctest::Approx(-0.00073582829456977166).epsilon(1e-9));

    DispersionOptions opt;
    opt.offset_pump = off;
    const DispersionModel shifted = make_dispersion_model(lib, opt);
    CHECK(calibrate_period(shifted) == doctest::Approx(9.3).epsilon(1e-10));
}

TEST_CASE("group velocities and walkoff") {
    const DispersionModel d = default_model();
    const GroupProperties gp = group_properties(d);
    // 5-point finite differences agree with the symbolic derivative to 1e-15;
    // the tolerance here covers the implementation's step choice
    CHECK(gp.inv_group_velocity_h == doctest::Approx(7.551255993011314).epsilon(1e-10));
    CHECK(gp.inv_group_velocity_v == doctest::Approx(7.2797901053317489).epsilon(1e-10));
    CHECK(gp.dgd_per_length == doctest::Approx(0.27146588767956548).epsilon(1e-9));
    CHECK(gp.dgd_per_length * 16500.0 == doctest::Approx(4479.1871467128304).epsilon(1e-9));
}

TEST_CASE("delay line phase and group delays") {
    const DispersionModel d = default_model();
    const BdlDelays b = bdl_delays(d, 1000.0);
    CHECK(b.phase_delay_fs == doctest::Approx(28.267395663579193).epsilon(1e-9));
    CHECK(b.group_delay_fs == doctest::Approx(31.247262728720138).epsilon(1e-8));
    CHECK(b.phase_group_ratio == doctest::Approx(0.90463590071836677).epsilon(1e-8));
    // delays scale linearly in thickness
    const BdlDelays twice = bdl_delays(d, 2000.0);
    CHECK(twice.phase_delay_fs == doctest::Approx(2.0 * b.phase_delay_fs).epsilon(1e-12));
    CHECK(twice.group_delay_fs == doctest::Approx(2.0 * b.group_delay_fs).epsilon(1e-12));
}

TEST_CASE("validity windows are enforced") {
    const DispersionModel d = default_model();
    CHECK_THROWS_AS(d.signal_h.refractive_index(0.1), std::out_of_range);
    CHECK_THROWS_AS(d.signal_h.refractive_index(25.0), std::out_of_range);
    // the thrown message names the offending model so config errors are
    // traceable to the materials file
    try {
        d.signal_h.refractive_index(0.1);
        FAIL("expected out_of_range");
    } catch (const std::out_of_range& e) {
        CHECK(std::string(e.what()).find(d.signal_h.name) != std::string::npos);
    }
}

TEST_CASE("material library loading errors") {
    CHECK_THROWS_AS(load_material_library("/nonexistent/materials.json"), ConfigError);
}

TEST_CASE("axis swap exchanges the waveguide roles") {
    const MaterialLibrary lib = load_material_library(materials_path());
    DispersionOptions opt;
    opt.swap_waveguide_axes = true;
    const DispersionModel normal = make_dispersion_model(lib, DispersionOptions{});
    const DispersionModel swapped = make_dispersion_model(lib, opt);
    CHECK(swapped.signal_h.name == normal.idler_v.name);
    CHECK(swapped.idler_v.name == normal.signal_h.name);
}

TEST_CASE("index offsets shift the effective index additively") {
    const MaterialLibrary lib = load_material_library(materials_path());
    DispersionOptions opt;
    opt.offset_signal_h = 3e-3;
    const DispersionModel base = make_dispersion_model(lib, DispersionOptions{});
    const DispersionModel loaded = make_dispersion_model(lib, opt);
    CHECK(loaded.signal_h.refractive_index(1.550) ==
          doctest::Approx(base.signal_h.refractive_index(1.550) + 3e-3).epsilon(1e-13));
}
