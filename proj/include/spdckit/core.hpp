#pragma once

#include <cstddef>
#include <vector>

// Internal unit system: length in um, time in fs, angular frequency in rad/fs.
// Wavelengths cross the API boundary in nm (vacuum).

namespace spdckit {

inline constexpr double speed_of_light_um_fs = 0.299792458;
inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double two_pi = 2.0 * pi;

struct AngularFrequency {
    double value = 0.0;  // rad/fs, absolute optical frequency
};

struct Detuning {
    double value = 0.0;  // rad/fs, signed offset from the degenerate frequency
};

// vacuum wavelength in nm -> absolute angular frequency; throws std::domain_error
// for non-positive or non-finite input
AngularFrequency wavelength_to_omega(double wavelength_nm);

// inverse of wavelength_to_omega; throws std::domain_error for omega <= 0
double omega_to_wavelength_nm(AngularFrequency omega);

// period of cos(omega * tau) in fs
double fringe_period_fs(AngularFrequency omega);

// Uniform symmetric detuning grid. Samples are k * step for k in [-half, half]
// so the zero sample is exact and samples[mirror_index(i)] == -samples[i]
// bit for bit.
struct SpectralGrid {
    std::size_t count = 0;
    double half_span = 0.0;   // rad/fs
    double step = 0.0;        // rad/fs
    std::vector<double> detuning;

    std::size_t zero_index() const { return count / 2; }
    std::size_t mirror_index(std::size_t i) const { return count - 1 - i; }
};

// count must be odd and >= 3, half_span > 0; throws std::invalid_argument
SpectralGrid make_symmetric_grid(std::size_t count, double half_span);

}  // namespace spdckit
