#include "spdckit/core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spdckit {

AngularFrequency wavelength_to_omega(double wavelength_nm) {
    if (!std::isfinite(wavelength_nm) || wavelength_nm <= 0.0)
        throw std::domain_error("wavelength must be positive and finite, got " +
                                std::to_string(wavelength_nm) + " nm");
    const double lambda_um = wavelength_nm * 1e-3;
    return {two_pi * speed_of_light_um_fs / lambda_um};
}

double omega_to_wavelength_nm(AngularFrequency omega) {
    if (!std::isfinite(omega.value) || omega.value <= 0.0)
        throw std::domain_error("angular frequency must be positive and finite, got " +
                                std::to_string(omega.value) + " rad/fs");
    return two_pi * speed_of_light_um_fs / omega.value * 1e3;
}

double fringe_period_fs(AngularFrequency omega) {
    if (!std::isfinite(omega.value) || omega.value <= 0.0)
        throw std::domain_error("angular frequency must be positive and finite");
    return two_pi / omega.value;
}

SpectralGrid make_symmetric_grid(std::size_t count, double half_span) {
    if (count < 3 || count % 2 == 0)
        throw std::invalid_argument("grid count must be odd and >= 3, got " +
                                    std::to_string(count));
    if (!std::isfinite(half_span) || half_span <= 0.0)
        throw std::invalid_argument("grid half span must be positive");

    SpectralGrid g;
    g.count = count;
    g.half_span = half_span;
    const std::size_t half = count / 2;
    g.step = half_span / static_cast<double>(half);
    g.detuning.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        // k * step with integer k keeps the mirror sample an exact negation
        const double k = static_cast<double>(i) - static_cast<double>(half);
        g.detuning[i] = k * g.step;
    }
    return g;
}

}  // namespace spdckit
