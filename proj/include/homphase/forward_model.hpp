#pragma once

#include "homphase/grid.hpp"

#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace homphase {

// Nonnegative intensity I(omega), arbitrary units.
struct IntensitySpectrum
{
    FrequencyGrid grid;
    std::vector<double> values;

    IntensitySpectrum(FrequencyGrid g, std::vector<double> v);
};

// Phase in radians; used both for phase spectra and for the phase spectrum difference.
struct PhaseSpectrum
{
    FrequencyGrid grid;
    std::vector<double> values;

    PhaseSpectrum(FrequencyGrid g, std::vector<double> v);
};

struct SingleSingle
{
};
// Single photon against a coherent packet of relative magnitude |A|.
struct SingleCoherent
{
    double magnitude = 1.0;
};
struct CoherentCoherent
{
    double magnitude_1 = 1.0;
    double magnitude_2 = 1.0;
};

using StateCombination = std::variant<SingleSingle, SingleCoherent, CoherentCoherent>;

void validate(const StateCombination &combo);

/// Factor f in N_c = 1 - f V. Lies in (0, 1]; equals 1 only for two single photons.
double visibility_factor(const StateCombination &combo);

/// Normalized coincidence samples. Delays are in seconds and strictly increasing;
/// std_errors, when present, has one entry per delay.
struct DipPattern
{
    std::vector<double> delays;
    std::vector<double> nc;
    std::optional<std::vector<double>> std_errors;

    DipPattern(std::vector<double> d, std::vector<double> n, std::optional<std::vector<double>> se = std::nullopt);
    std::size_t size() const { return delays.size(); }
};

struct NormalizedIntensity
{
    IntensitySpectrum spectrum;
    double area; // domega * sum(I) of the raw input
};

/// Rescales to domega * sum(I) = 1 and reports the raw area.
NormalizedIntensity normalize_intensity(const IntensitySpectrum &intensity);

/// sqrt(I1 I2) of the unit-area spectra: the measurable |g(omega)|.
std::vector<double> spectral_magnitude(const IntensitySpectrum &i1, const IntensitySpectrum &i2);

/**
 * Cross-spectral density g = sqrt(I1 I2) exp(i dphi) built from unit-area
 * copies of the two spectra. Bins where sqrt(I1 I2) vanishes are exactly 0.
 */
SpectralSeries cross_spectral_density(const IntensitySpectrum &i1, const IntensitySpectrum &i2,
                                      const PhaseSpectrum &psd);

struct ModeMatching
{
    TimeGrid grid;
    std::vector<double> values; // V(tau_m) = |G(tau_m)|^2
};

ModeMatching mode_matching(const SpectralSeries &g);

/// Direct summation of the cross-correlation at an arbitrary delay.
cplx cross_correlation_at(const SpectralSeries &g, double tau);

/// Absolute coincidence probability P_AB for each V sample.
std::vector<double> coincidence_probability(std::span<const double> mode_matching, double eta_a, double eta_b,
                                            const StateCombination &combo);

DipPattern normalized_coincidence(std::vector<double> delays, std::span<const double> mode_matching,
                                  const StateCombination &combo);

/// Noiseless dip at arbitrary delays (seconds), summing the correlation integral directly.
DipPattern synthesize_dip(const IntensitySpectrum &i1, const IntensitySpectrum &i2, const PhaseSpectrum &psd,
                          const StateCombination &combo, std::vector<double> delays);

/// Linear interpolation of samples (xs strictly increasing) onto a grid, zero outside [xs.front(), xs.back()].
std::vector<double> resample_linear(std::span<const double> xs, std::span<const double> ys,
                                    const FrequencyGrid &grid);

} // namespace homphase
