#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "spdckit/core.hpp"

using namespace spdckit;

TEST_CASE("wavelength to angular frequency at reference points") {
    // golden values from a 40-digit mpmath evaluation of 2 pi c / lambda
    CHECK(wavelength_to_omega(1550.0).value ==
          doctest::Approx(1.2152590756831311).epsilon(1e-14));
    CHECK(wavelength_to_omega(775.0).value ==
          doctest::Approx(2.4305181513662623).epsilon(1e-14));
    // the pump sits at exactly twice the degenerate frequency
    CHECK(wavelength_to_omega(775.0).value ==
          doctest::Approx(2.0 * wavelength_to_omega(1550.0).value).epsilon(1e-15));
}

TEST_CASE("wavelength round trip") {
    for (double nm : {450.3, 775.0, 1375.0, 1550.0, 1725.0, 22000.0}) {
        const AngularFrequency w = wavelength_to_omega(nm);
        CHECK(omega_to_wavelength_nm(w) == doctest::Approx(nm).epsilon(1e-13));
    }
}

TEST_CASE("wavelength conversion rejects unphysical input") {
    CHECK_THROWS_AS(wavelength_to_omega(0.0), std::domain_error);
    CHECK_THROWS_AS(wavelength_to_omega(-1550.0), std::domain_error);
    CHECK_THROWS_AS(wavelength_to_omega(std::numeric_limits<double>::quiet_NaN()),
                    std::domain_error);
    CHECK_THROWS_AS(wavelength_to_omega(std::numeric_limits<double>::infinity()),
                    std::domain_error);
    CHECK_THROWS_AS(omega_to_wavelength_nm({0.0}), std::domain_error);
    CHECK_THROWS_AS(omega_to_wavelength_nm({-1.0}), std::domain_error);
}

TEST_CASE("fringe period of the pair-frequency carrier") {
    CHECK(fringe_period_fs(wavelength_to_omega(1550.0)) ==
          doctest::Approx(5.1702434755713568).epsilon(1e-14));
    CHECK(fringe_period_fs(wavelength_to_omega(1500.0)) ==
          doctest::Approx(5.0034614279722807).epsilon(1e-14));
}

TEST_CASE("symmetric grid layout") {
    const SpectralGrid g = make_symmetric_grid(5, 1.0);
    REQUIRE(g.count == 5);
    CHECK(g.step == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g.detuning[0] == -1.0);
    CHECK(g.detuning[1] == -0.5);
    CHECK(g.detuning[2] == 0.0);
    CHECK(g.detuning[3] == 0.5);
    CHECK(g.detuning[4] == 1.0);
    CHECK(g.zero_index() == 2);
    CHECK(g.mirror_index(0) == 4);
    CHECK(g.mirror_index(4) == 0);
}

TEST_CASE("grid mirror symmetry is exact in floating point") {
    // the analysis pipeline pairs W with -W by index, so the negation must be
    // bit exact, not merely within rounding
    const SpectralGrid g = make_symmetric_grid(16385, 0.15466933690512578);
    REQUIRE(g.count == 16385);
    CHECK(g.detuning[g.zero_index()] == 0.0);
    for (std::size_t i = 0; i < g.count; ++i) {
        CHECK(g.detuning[g.mirror_index(i)] == -g.detuning[i]);
    }
    CHECK(g.detuning.front() == -g.half_span);
    CHECK(g.detuning.back() == g.half_span);
}

TEST_CASE("grid construction rejects invalid shapes") {
    CHECK_THROWS_AS(make_symmetric_grid(4, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_symmetric_grid(1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_symmetric_grid(0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_symmetric_grid(33, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_symmetric_grid(33, -0.1), std::invalid_argument);
}
