#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "spdckit/core.hpp"
#include "spdckit/jsa.hpp"

namespace spdckit {

// Coincidence rate of the polarization interferometer vs the birefringent
// delay line group delay tau:
//   R(tau) = C + cos(w0 * ratio * tau) * I(tau)
//   C      = sum_W w |f(W)|^2 + |f(-W)|^2
//   I(tau) = 2 sum_W w |f(W)||f(-W)| exp(i p(W)) exp(-i W (tau - t0))
// with p = delta and t0 = -2 * group_slope in compensated mode (the BDL takes
// out the linear part of the pair phase and the envelope lands at the group
// delay offset), or p = Delta and t0 = 0 raw. I is real because p is odd and
// the magnitude product is even in W.

struct InterferometerConfig {
    double delay_start_fs = std::numeric_limits<double>::quiet_NaN();  // NaN: automatic
    double delay_stop_fs = std::numeric_limits<double>::quiet_NaN();
    double delay_step_fs = std::numeric_limits<double>::quiet_NaN();   // NaN: fringe period / 16

    // phase delay accumulated per unit group delay in the BDL; 1 is an ideal
    // dispersion-free line, the quartz value comes from bdl_delays
    double phase_group_ratio = 1.0;

    bool compensate_group_slope = true;
};

struct Interferogram {
    std::vector<double> delay_fs;
    std::vector<double> rate;      // R(tau), clamped at 0 against rounding
    std::vector<double> envelope;  // |I(tau)|

    double constant = 0.0;         // C
    double fringe_omega = 0.0;     // w0 * phase_group_ratio, rad/fs
    double nominal_fringe_period_fs = 0.0;
    double center_delay_fs = 0.0;  // t0 used by the kernel

    std::size_t envelope_peak_index = 0;
    double envelope_peak_fs = 0.0;  // parabolic-refined peak position
    double envelope_fwhm_fs = 0.0;  // outermost half-max crossings of |I|
    bool envelope_truncated = false;

    double visibility_decomposed = 0.0;  // max |I| / C over the scan
    double visibility_direct = 0.0;      // two-phase direct quadrature at the same delay
    double measured_fringe_period_fs = 0.0;  // from rate zero crossings, NaN at low contrast
};

// decomposed scan; parallel over delay samples. The spectrum must have its
// phase pipeline complete. Throws AnalysisError when a sample with undefined
// phase still carries weight.
Interferogram coincidence_scan(const JointSpectrum& js, const InterferometerConfig& cfg);

// literal |a e^{i theta} + b|^2 quadrature per sample and delay, no
// decomposition; serial correctness reference for the scan
std::vector<double> coincidence_rate_reference(const JointSpectrum& js,
                                               const InterferometerConfig& cfg,
                                               const std::vector<double>& delays_fs);

// the checked visibility: decomposed and direct routes must agree to 1e-6,
// otherwise AnalysisError; also rejects scans sampled coarser than 8 points
// per fringe period
double visibility(const Interferogram& ig);

// measured fringe period near the envelope peak; AnalysisError when the
// contrast is too low to carry fringes (visibility < 0.05)
double fringe_period(const Interferogram& ig);

// half-max width of |I|; the truncation flag on the interferogram marks a
// delay axis that clipped the envelope
double envelope_fwhm(const Interferogram& ig);

// local maxima of the envelope above rel_threshold * peak; > 1 flags beating
int count_envelope_peaks(const Interferogram& ig, double rel_threshold = 0.1);

struct PhaseRulerCheck {
    double max_rate_shift = 0.0;  // max |R' - R| / peak R after injecting c0 + c2 W^2
};

// an even spectral phase must not move the interferogram; returns the
// worst-case relative shift on the same delay axis
PhaseRulerCheck phase_ruler_check(const JointSpectrum& js, const InterferometerConfig& cfg,
                                  double c0, double c2);

}  // namespace spdckit
