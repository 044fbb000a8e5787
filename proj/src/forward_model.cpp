#include "homphase/forward_model.hpp"

#include "homphase/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace homphase {

namespace {

constexpr double kModeMatchingSlack = 1e-9;

void require_same_grid(const FrequencyGrid &a, const FrequencyGrid &b, const char *what)
{
    if (!(a == b))
        throw InputError(std::string(what) + ": spectra are on different frequency grids");
}

void check_mode_matching(std::span<const double> v)
{
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        if (!std::isfinite(v[i]) || v[i] < 0.0 || v[i] > 1.0 + kModeMatchingSlack)
            throw InputError("mode matching degree out of [0, 1] at sample " + std::to_string(i) + ": " +
                             std::to_string(v[i]));
    }
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

} // namespace

IntensitySpectrum::IntensitySpectrum(FrequencyGrid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v))
{
    if (values.size() != grid.size())
        throw InputError("intensity spectrum length does not match its grid");
    bool any_positive = false;
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        if (!std::isfinite(values[i]) || values[i] < 0.0)
            throw InputError("intensity must be finite and nonnegative (sample " + std::to_string(i) + ")");
        any_positive = any_positive || values[i] > 0.0;
    }
    if (!any_positive)
        throw InputError("intensity spectrum is identically zero");
}

PhaseSpectrum::PhaseSpectrum(FrequencyGrid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v))
{
    if (values.size() != grid.size())
        throw InputError("phase spectrum length does not match its grid");
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        if (!std::isfinite(values[i]))
            throw InputError("phase must be finite (sample " + std::to_string(i) + ")");
    }
}

DipPattern::DipPattern(std::vector<double> d, std::vector<double> n, std::optional<std::vector<double>> se)
    : delays(std::move(d)), nc(std::move(n)), std_errors(std::move(se))
{
    if (delays.size() != nc.size())
        throw InputError("dip: delay and coincidence columns differ in length");
    if (std_errors && std_errors->size() != delays.size())
        throw InputError("dip: std error column differs in length");
    for (std::size_t i = 0; i < delays.size(); ++i)
    {
        if (!std::isfinite(delays[i]) || !std::isfinite(nc[i]))
            throw InputError("dip: non-finite value at row " + std::to_string(i));
        if (nc[i] < 0.0)
            throw InputError("dip: negative normalized coincidence at row " + std::to_string(i));
        if (i > 0 && !(delays[i] > delays[i - 1]))
            throw InputError("dip: delays must be strictly increasing (row " + std::to_string(i) + ")");
        if (std_errors && (!std::isfinite((*std_errors)[i]) || (*std_errors)[i] < 0.0))
            throw InputError("dip: invalid std error at row " + std::to_string(i));
    }
}

void validate(const StateCombination &combo)
{
    std::visit(
        [](const auto &c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, SingleCoherent>)
            {
                if (!positive_finite(c.magnitude))
                    throw InputError("coherent magnitude |A| must be positive and finite");
            }
            else if constexpr (std::is_same_v<T, CoherentCoherent>)
            {
                if (!positive_finite(c.magnitude_1) || !positive_finite(c.magnitude_2))
                    throw InputError("coherent magnitudes |A1|, |A2| must be positive and finite");
            }
        },
        combo);
}

double visibility_factor(const StateCombination &combo)
{
    validate(combo);
    return std::visit(
        [](const auto &c) -> double {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, SingleSingle>)
                return 1.0;
            else if constexpr (std::is_same_v<T, SingleCoherent>)
                return 2.0 / (c.magnitude * c.magnitude + 2.0);
            else
            {
                const double a1 = c.magnitude_1 * c.magnitude_1;
                const double a2 = c.magnitude_2 * c.magnitude_2;
                return 2.0 * a1 * a2 / (2.0 * a1 * a2 + a1 * a1 + a2 * a2);
            }
        },
        combo);
}

NormalizedIntensity normalize_intensity(const IntensitySpectrum &intensity)
{
    double sum = 0.0;
    for (double v : intensity.values)
        sum += v;
    const double area = sum * intensity.grid.spacing();
    std::vector<double> scaled(intensity.values.size());
    for (std::size_t i = 0; i < scaled.size(); ++i)
        scaled[i] = intensity.values[i] / area;
    return {IntensitySpectrum(intensity.grid, std::move(scaled)), area};
}

std::vector<double> spectral_magnitude(const IntensitySpectrum &i1, const IntensitySpectrum &i2)
{
    require_same_grid(i1.grid, i2.grid, "spectral_magnitude");
    const auto n1 = normalize_intensity(i1);
    const auto n2 = normalize_intensity(i2);
    std::vector<double> mag(i1.grid.size());
    for (std::size_t i = 0; i < mag.size(); ++i)
        mag[i] = std::sqrt(n1.spectrum.values[i] * n2.spectrum.values[i]);
    return mag;
}

SpectralSeries cross_spectral_density(const IntensitySpectrum &i1, const IntensitySpectrum &i2,
                                      const PhaseSpectrum &psd)
{
    require_same_grid(i1.grid, psd.grid, "cross_spectral_density");
    const auto mag = spectral_magnitude(i1, i2);
    std::vector<cplx> g(mag.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        g[i] = mag[i] > 0.0 ? std::polar(mag[i], psd.values[i]) : cplx(0.0, 0.0);
    return SpectralSeries(i1.grid, std::move(g));
}

ModeMatching mode_matching(const SpectralSeries &g)
{
    const DelaySeries G = forward_transform(g);
    std::vector<double> v(G.size());
    for (std::size_t m = 0; m < v.size(); ++m)
        v[m] = std::norm(G.values[m]);
    return {G.grid, std::move(v)};
}

// The carrier exp(i w_c tau) is factored out of the sum; it has unit modulus
// and is restored at the end so the result equals the literal sum.
cplx cross_correlation_at(const SpectralSeries &g, double tau)
{
    if (!std::isfinite(tau))
        throw InputError("cross_correlation_at: delay must be finite");
    cplx acc(0.0, 0.0);
    for (std::size_t n = 0; n < g.size(); ++n)
        acc += g.values[n] * std::polar(1.0, g.grid.offset(n) * tau);
    return g.grid.spacing() * acc * std::polar(1.0, g.grid.center() * tau);
}

std::vector<double> coincidence_probability(std::span<const double> mode_matching, double eta_a, double eta_b,
                                            const StateCombination &combo)
{
    if (!(eta_a > 0.0 && eta_a <= 1.0) || !(eta_b > 0.0 && eta_b <= 1.0))
        throw InputError("detection efficiencies must lie in (0, 1]");
    validate(combo);
    check_mode_matching(mode_matching);
    const double eta = eta_a * eta_b;
    std::vector<double> p(mode_matching.size());
    for (std::size_t i = 0; i < p.size(); ++i)
    {
        const double v = mode_matching[i];
        p[i] = std::visit(
            [&](const auto &c) -> double {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, SingleSingle>)
                    return 0.5 * eta * (1.0 - v);
                else if constexpr (std::is_same_v<T, SingleCoherent>)
                {
                    const double a2 = c.magnitude * c.magnitude;
                    return 0.25 * eta * (2.0 * a2 * (1.0 - v) + a2 * a2);
                }
                else
                {
                    const double a1 = c.magnitude_1 * c.magnitude_1;
                    const double a2 = c.magnitude_2 * c.magnitude_2;
                    return 0.25 * eta * (2.0 * a1 * a2 * (1.0 - v) + a1 * a1 + a2 * a2);
                }
            },
            combo);
    }
    return p;
}

DipPattern normalized_coincidence(std::vector<double> delays, std::span<const double> mode_matching,
                                  const StateCombination &combo)
{
    if (delays.size() != mode_matching.size())
        throw InputError("normalized_coincidence: delays and mode matching differ in length");
    check_mode_matching(mode_matching);
    const double f = visibility_factor(combo);
    std::vector<double> nc(mode_matching.size());
    for (std::size_t i = 0; i < nc.size(); ++i)
        nc[i] = std::max(0.0, 1.0 - f * mode_matching[i]);
    return DipPattern(std::move(delays), std::move(nc));
}

DipPattern synthesize_dip(const IntensitySpectrum &i1, const IntensitySpectrum &i2, const PhaseSpectrum &psd,
                          const StateCombination &combo, std::vector<double> delays)
{
    validate(combo);
    const SpectralSeries g = cross_spectral_density(i1, i2, psd);
    std::vector<double> v(delays.size());
    for (std::size_t k = 0; k < delays.size(); ++k)
        v[k] = std::min(std::norm(cross_correlation_at(g, delays[k])), 1.0 + kModeMatchingSlack);
    return normalized_coincidence(std::move(delays), v, combo);
}

std::vector<double> resample_linear(std::span<const double> xs, std::span<const double> ys,
                                    const FrequencyGrid &grid)
{
    if (xs.size() != ys.size() || xs.size() < 2)
        throw InputError("resample_linear: need at least two (x, y) samples of equal length");
    for (std::size_t i = 1; i < xs.size(); ++i)
    {
        if (!(xs[i] > xs[i - 1]))
            throw InputError("resample_linear: abscissae must be strictly increasing (row " + std::to_string(i) +
                             ")");
    }
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
        const double w = grid.omega(i);
        if (w < xs.front() || w > xs.back())
            continue;
        auto hi = std::upper_bound(xs.begin(), xs.end(), w);
        if (hi == xs.end())
        {
            out[i] = ys.back();
            continue;
        }
        const std::size_t j = static_cast<std::size_t>(hi - xs.begin());
        const double t = (w - xs[j - 1]) / (xs[j] - xs[j - 1]);
        out[i] = ys[j - 1] + t * (ys[j] - ys[j - 1]);
    }
    return out;
}

} // namespace homphase
