#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "spdckit/core.hpp"
#include "spdckit/dispersion.hpp"
#include "spdckit/poling.hpp"

namespace spdckit {

// Two-photon joint spectral amplitude along the degenerate diagonal,
// f(W) = sum_m s_m int_{z_m}^{z_m + L_m} exp(-i db(W) z) dz,
// where db is the bulk mismatch beta_H(w0+W) + beta_V(w0-W) - beta_p and the
// alternating domain signs s_m carry the quasi-phase-matching. Evaluated
// against the signed detuning W of the horizontally polarized photon.

struct JointSpectrum {
    SpectralGrid grid;
    double omega0 = 0.0;  // rad/fs, degenerate frequency

    std::vector<std::complex<double>> amplitude;  // f(W), um
    std::vector<double> intensity;                // |f|^2 normalized to unit peak
    double peak_amplitude = 0.0;                  // max |f|, um

    // unwrapped phase; samples with |f| <= 1e-12 * peak are flagged undefined
    // and carry NaN
    std::vector<double> phase;
    std::vector<std::uint8_t> phase_defined;
    bool has_phase = false;

    // antisymmetric residual: delta(W) = [phase(W) - phase(-W)] - 2 s W with s
    // the fitted group slope; NaN where either side is undefined
    std::vector<double> delta;
    double group_slope_fs = 0.0;  // s, fs
    bool has_delta = false;
};

// exact per-domain sum, one sinc and complex exponential per domain; serial,
// kept as the correctness reference
std::vector<std::complex<double>> amplitude_reference(const DomainSequence& seq,
                                                      const DispersionModel& d,
                                                      const SpectralGrid& grid);

// same quantity through the telescoped wall sum,
// f = (i/db) sum_k g_k exp(-i db z_k), with an incremental per-wall rotation
// (small-angle polynomial plus periodic exact resync) swept over blocks of
// grid points; parallel over blocks, and an order of magnitude faster than
// the reference at equal accuracy (see the kernel_bench target)
std::vector<std::complex<double>> amplitude_fast(const DomainSequence& seq,
                                                 const DispersionModel& d,
                                                 const SpectralGrid& grid);

// variants taking a precomputed bulk mismatch array (one value per grid
// sample); the optimizer reuses one such array across a whole run
std::vector<std::complex<double>> amplitude_reference_with_mismatch(
    const DomainSequence& seq, const std::vector<double>& mismatch_rad_um,
    const SpectralGrid& grid);
std::vector<std::complex<double>> amplitude_fast_with_mismatch(
    const DomainSequence& seq, const std::vector<double>& mismatch_rad_um,
    const SpectralGrid& grid);

// bulk mismatch sampled on a grid; helper shared by the spectrum and the
// optimizer
std::vector<double> mismatch_on_grid(const DispersionModel& d, const SpectralGrid& grid);

// fills phase / phase_defined by unwrapping arg f from W = 0 outward in both
// directions, skipping undefined samples
void unwrap_phase(JointSpectrum& js);

// fits the group slope to the antisymmetric phase difference
// phase(W) - phase(-W) through the origin, weighted by intensity over samples
// with intensity >= 0.5, and fills delta; throws AnalysisError with fewer
// than 5 usable samples. The difference cancels even phase orders exactly, so
// a chirp's quadratic phase cannot bias the slope even when the intensity
// weights are lopsided. delta is antisymmetric and delta(0) == 0 bit for bit.
void residual_phase(JointSpectrum& js);

// full pipeline: fast amplitude, normalization, unwrap, residual
JointSpectrum compute_spectrum(const DomainSequence& seq, const DispersionModel& d,
                               const SpectralGrid& grid);
JointSpectrum compute_spectrum_with_mismatch(const DomainSequence& seq,
                                             const std::vector<double>& mismatch_rad_um,
                                             const SpectralGrid& grid, double omega0);

struct BandwidthReport {
    double fwhm_rad_fs = 0.0;
    double fwhm_nm = 0.0;                     // between the outermost half-max crossings
    std::vector<double> peak_wavelengths_nm;  // local maxima above 0.8 of peak
    double symmetry_residual = 0.0;           // L1 imbalance of |f| about W = 0, in [0, 1]
    bool truncated = false;                   // intensity >= 0.5 at a grid edge
};

BandwidthReport bandwidth(const JointSpectrum& js);

// multiplies f by exp(i (c0 + c2 W^2 + c3 W^3)) and reruns the phase
// pipeline; exercises the phase conventions in tests
JointSpectrum with_injected_phase(const JointSpectrum& js, double c0, double c2, double c3);

}  // namespace spdckit
