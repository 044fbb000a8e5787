#pragma once

#include "homphase/forward_model.hpp"

#include <span>
#include <string>
#include <vector>

namespace homphase {

// Conversions between ordinary frequency in THz / delay in ps and the internal rad/s, s.
double thz_to_omega(double thz);
double omega_to_thz(double omega);
double ps_to_s(double ps);
double s_to_ps(double s);

struct PhasePresetParams
{
    double center = 0.0;    // rad/s; reference point of the preset
    double slope = 0.0;     // rad per (rad/s), linear preset
    double curvature = 0.0; // rad per (rad/s)^2, quadratic preset
    double amplitude = 1.0; // rad, inverted-n
    double half_width = 0.0; // rad/s, inverted-n outer breakpoints at center -/+ half_width
    std::vector<double> table_omega; // custom-table abscissae (rad/s, increasing)
    std::vector<double> table_phase; // custom-table values (rad)
};

/// Names accepted by make_phase_preset.
const std::vector<std::string> &phase_preset_names();

/**
 * Deterministic phase functions on a grid:
 *   flat         0
 *   linear       slope (w - center)
 *   quadratic    curvature (w - center)^2
 *   inverted-n   piecewise linear 0 -> -A -> +A -> 0 through the breakpoints
 *                center - W, center - W/3, center + W/3, center + W; 0 outside
 *   custom-table linear interpolation of the table, constant beyond its ends
 */
PhaseSpectrum make_phase_preset(const std::string &name, const FrequencyGrid &grid, const PhasePresetParams &params);

/// Gaussian intensity with the given intensity FWHM (rad/s), peak 1.
IntensitySpectrum gaussian_spectrum(const FrequencyGrid &grid, double center, double fwhm);

} // namespace homphase
