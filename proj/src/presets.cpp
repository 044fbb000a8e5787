#include "homphase/presets.hpp"

#include "homphase/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace homphase {

namespace {

constexpr double kTwoPiTera = 2.0 * std::numbers::pi * 1e12;

double interpolate_clamped(std::span<const double> xs, std::span<const double> ys, double x)
{
    if (x <= xs.front())
        return ys.front();
    if (x >= xs.back())
        return ys.back();
    const auto j = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
    const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return ys[j - 1] + t * (ys[j] - ys[j - 1]);
}

} // namespace

double thz_to_omega(double thz) { return kTwoPiTera * thz; }
double omega_to_thz(double omega) { return omega / kTwoPiTera; }
double ps_to_s(double ps) { return ps * 1e-12; }
double s_to_ps(double s) { return s * 1e12; }

const std::vector<std::string> &phase_preset_names()
{
    static const std::vector<std::string> names{"flat", "linear", "quadratic", "inverted-n", "custom-table"};
    return names;
}

PhaseSpectrum make_phase_preset(const std::string &name, const FrequencyGrid &grid, const PhasePresetParams &params)
{
    const std::size_t n = grid.size();
    std::vector<double> phase(n, 0.0);
    if (name == "flat")
    {
    }
    else if (name == "linear")
    {
        for (std::size_t i = 0; i < n; ++i)
            phase[i] = params.slope * (grid.omega(i) - params.center);
    }
    else if (name == "quadratic")
    {
        for (std::size_t i = 0; i < n; ++i)
        {
            const double x = grid.omega(i) - params.center;
            phase[i] = params.curvature * x * x;
        }
    }
    else if (name == "inverted-n")
    {
        if (!(params.half_width > 0.0))
            throw InputError("inverted-n preset needs a positive half width");
        const double w = params.half_width;
        const double a = params.amplitude;
        const std::vector<double> xs{-w, -w / 3.0, w / 3.0, w};
        const std::vector<double> ys{0.0, -a, a, 0.0};
        for (std::size_t i = 0; i < n; ++i)
            phase[i] = interpolate_clamped(xs, ys, grid.omega(i) - params.center);
    }
    else if (name == "custom-table")
    {
        const auto &xs = params.table_omega;
        const auto &ys = params.table_phase;
        if (xs.empty() || xs.size() != ys.size())
            throw InputError("custom-table preset needs a nonempty table with matching columns");
        for (std::size_t i = 1; i < xs.size(); ++i)
        {
            if (!(xs[i] > xs[i - 1]))
                throw InputError("custom-table frequencies must be strictly increasing");
        }
        for (std::size_t i = 0; i < n; ++i)
            phase[i] = interpolate_clamped(xs, ys, grid.omega(i));
    }
    else
    {
        throw InputError("unknown phase preset '" + name + "'");
    }
    return PhaseSpectrum(grid, std::move(phase));
}

IntensitySpectrum gaussian_spectrum(const FrequencyGrid &grid, double center, double fwhm)
{
    if (!(fwhm > 0.0))
        throw InputError("gaussian spectrum needs a positive FWHM");
    const double sigma = fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        const double x = (grid.omega(i) - center) / sigma;
        v[i] = std::exp(-0.5 * x * x);
    }
    return IntensitySpectrum(grid, std::move(v));
}

} // namespace homphase
