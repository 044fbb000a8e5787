#pragma once

// Shared synthetic scenario: Gaussian spectra near 1550 nm, an inverted-N
// phase difference and the delay designs used by the retrieval and ensemble
// checks.

#include "homphase/forward_model.hpp"
#include "homphase/presets.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace fixture {

constexpr double kCenterThz = 193.19;
constexpr double kFwhmGhz = 150.0;
// Inverted-N breakpoints sit at +-90 GHz around a point 20 GHz above the spectral peak.
constexpr double kPresetOffsetGhz = 20.0;
constexpr double kPresetHalfWidthGhz = 90.0;

inline homphase::FrequencyGrid grid(std::size_t n = 2048, double spacing_ghz = 4.0)
{
    return homphase::FrequencyGrid(homphase::thz_to_omega(kCenterThz), homphase::thz_to_omega(spacing_ghz * 1e-3), n);
}

inline homphase::IntensitySpectrum spectrum(const homphase::FrequencyGrid &g, double center_thz = kCenterThz)
{
    return homphase::gaussian_spectrum(g, homphase::thz_to_omega(center_thz), homphase::thz_to_omega(kFwhmGhz * 1e-3));
}

inline homphase::PhaseSpectrum inverted_n(const homphase::FrequencyGrid &g, double amplitude = 1.0,
                                          double offset_ghz = kPresetOffsetGhz)
{
    homphase::PhasePresetParams p;
    p.center = homphase::thz_to_omega(kCenterThz + offset_ghz * 1e-3);
    p.amplitude = amplitude;
    p.half_width = homphase::thz_to_omega(kPresetHalfWidthGhz * 1e-3);
    return homphase::make_phase_preset("inverted-n", g, p);
}

/// Delays in seconds from picosecond values, sorted.
inline std::vector<double> delays_ps(std::vector<double> ps)
{
    std::sort(ps.begin(), ps.end());
    for (double &t : ps)
        t = homphase::ps_to_s(t);
    return ps;
}

/// 41 delays: 0.5 ps steps over +-6 ps, sparser wings to 16 ps and two far baseline points at +-25 ps.
inline std::vector<double> measurement_delays()
{
    std::vector<double> ps;
    for (int k = -12; k <= 12; ++k)
        ps.push_back(0.5 * k);
    for (double t : {7.0, 8.0, 9.0, 10.0, 12.0, 14.0, 16.0, 25.0})
    {
        ps.push_back(t);
        ps.push_back(-t);
    }
    return delays_ps(std::move(ps));
}

/// Uniform delays from -limit to +limit ps.
inline std::vector<double> uniform_delays(double limit_ps, double step_ps)
{
    std::vector<double> ps;
    const auto n = static_cast<int>(std::lround(limit_ps / step_ps));
    for (int k = -n; k <= n; ++k)
        ps.push_back(k * step_ps);
    return delays_ps(std::move(ps));
}

} // namespace fixture
