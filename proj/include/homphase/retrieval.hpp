#pragma once

#include "homphase/forward_model.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace homphase {

struct RetrievalConfig
{
    std::size_t gs_iterations = 200;
    std::size_t gp_iterations = 100;
    std::size_t adapted_iterations = 50;
    double gp_step_size = 0.5;
    std::size_t gp_max_halvings = 20;
    double adapted_threshold_fraction = 0.2; // of max measured |G|
    std::size_t restarts = 8;
    std::uint64_t seed = 0;
    double convergence_tolerance = 1e-10; // a stage ends once the residual changes less than this
    double intensity_mask_fraction = 0.1; // of peak sqrt(I1 I2)
    double consistency_tolerance = 0.05;  // allowed excess of the raw V above 1
    double cluster_distance = 0.05;       // rad, weighted RMS
    double ambiguity_tolerance = 1e-9;

    void validate() const;
};

/// Measured |g(omega)| = sqrt(I1 I2) on its grid.
struct SpectralMagnitude
{
    FrequencyGrid grid;
    std::vector<double> values;

    SpectralMagnitude(FrequencyGrid g, std::vector<double> v);
    static SpectralMagnitude from_spectra(const IntensitySpectrum &i1, const IntensitySpectrum &i2);
};

struct RetrievalResult
{
    PhaseSpectrum psd;                     // unwrapped, detrended, in the selected orientation
    std::vector<double> residual_history;  // winning restart, one entry per iteration
    std::size_t restart_index = 0;
    bool flipped = false;
    // The two orientations of the winner are indistinguishable within ambiguity_tolerance.
    bool ambiguous = false;
    double fitted_amplitude = 1.0;         // scale applied to the measured |G|
    double residual = 0.0;
    double alternate_residual = 0.0;       // residual of the other orientation
    double delay_offset = 0.0;             // s; the dip was translated by -delay_offset
    double flip_center = 0.0;              // rad/s
    std::vector<double> restart_residuals; // best orientation per restart
};

/// One Gerchberg-Saxton iteration: transform, impose |G|, transform back, impose |g|.
SpectralSeries gs_step(const SpectralSeries &g_k, std::span<const double> target_g_mag,
                       std::span<const double> target_G_mag);

/// Time-domain substitution shared by every step: the current g'_k.
SpectralSeries substituted_spectrum(const SpectralSeries &g_k, std::span<const double> target_G_mag);

/**
 * Distance Z(phase) = sum_i |a_i exp(i phase_i) - b_i|^2 between the candidate
 * |g| exp(i phase) and g'_k, with both scaled by 1 / max|g| so that step sizes
 * are dimensionless.
 */
double gp_distance(std::span<const double> phase, std::span<const double> target_g_mag, const SpectralSeries &g_prime);

/// dZ/dphase_i = 2 a_i |b_i| sin(phase_i - arg b_i) in the same scaling as gp_distance.
std::vector<double> gp_gradient(std::span<const double> phase, std::span<const double> target_g_mag,
                                const SpectralSeries &g_prime);

/// One generalized-projection step of fixed size along -dZ/dphase.
SpectralSeries gp_step(const SpectralSeries &g_k, std::span<const double> target_g_mag,
                       std::span<const double> target_G_mag, double step_size);

/**
 * G-S step in which delays with target |G| below `threshold` get the blended
 * magnitude |G|^2 / 2 + (1 - |G| / 2) |G_k| instead of |G|.
 */
SpectralSeries adapted_gs_step(const SpectralSeries &g_k, std::span<const double> target_g_mag,
                               std::span<const double> target_G_mag, double threshold);

/// RMS of |FT(g)| - measured over delays where measured >= threshold.
double residual(const SpectralSeries &g_candidate, std::span<const double> measured_G_mag, double threshold = 0.0);

/// Removes the weighted least-squares affine fit a + b omega.
PhaseSpectrum detrend(const PhaseSpectrum &psd, std::span<const double> weights);

/// psi'(omega) = -psi(2 center - omega), linearly interpolated, constant beyond the grid ends.
PhaseSpectrum flip_candidate(const PhaseSpectrum &psd, double center);

/// Removes 2 pi jumps walking outward from `anchor`.
std::vector<double> unwrap_phase(std::span<const double> phase, std::size_t anchor);

std::vector<bool> intensity_mask(std::span<const double> magnitude, double fraction);

double weighted_rms_distance(std::span<const double> a, std::span<const double> b, std::span<const double> weights,
                             const std::vector<bool> &mask);

double spectral_centroid(const FrequencyGrid &grid, std::span<const double> weights);

/// Measured |G| resampled on the conjugate time grid, dip minimum translated to tau = 0.
struct MeasuredCorrelation
{
    TimeGrid grid;
    std::vector<double> magnitude;
    double delay_offset = 0.0;
};

MeasuredCorrelation correlation_from_dip(const DipPattern &dip, const StateCombination &combo,
                                         const FrequencyGrid &freq, const RetrievalConfig &config);

RetrievalResult run_retrieval(const SpectralMagnitude &measured_g_mag, const DipPattern &measured_dip,
                              const StateCombination &combo, const RetrievalConfig &config);

} // namespace homphase
