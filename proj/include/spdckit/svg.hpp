#pragma once

#include <string>

#include "spdckit/interferometer.hpp"
#include "spdckit/jsa.hpp"

namespace spdckit::svg {

// Self-contained SVG plots (no external assets, fixed light palette).

// dual axis: normalized intensity on the left, residual phase delta on the
// right, wavelength along the bottom
std::string spectrum_svg(const JointSpectrum& js, const std::string& title);

// coincidence rate with the envelope band, plus a fringe zoom inset around
// the envelope peak
std::string interferogram_svg(const Interferogram& ig, const std::string& title);

}  // namespace spdckit::svg
