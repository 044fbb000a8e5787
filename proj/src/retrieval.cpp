#include "homphase/retrieval.hpp"

#include "homphase/detector.hpp"
#include "homphase/error.hpp"

// Boost 1.74 pchip calls isnan unqualified; it needs the global declaration.
#include <math.h>

#include <boost/math/interpolators/pchip.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

namespace homphase {

namespace {

constexpr double kPi = std::numbers::pi;

void require_length(std::size_t expected, std::size_t got, const char *what)
{
    if (expected != got)
        throw InputError(std::string(what) + ": length " + std::to_string(got) + " does not match grid size " +
                         std::to_string(expected));
}

cplx unit_phase(cplx z)
{
    const double r = std::abs(z);
    return r > 0.0 ? z / r : cplx(1.0, 0.0);
}

double max_of(std::span<const double> v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

std::size_t argmax(std::span<const double> v)
{
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

double wrap(double x) { return x - 2.0 * kPi * std::floor((x + kPi) / (2.0 * kPi)); }

// Frequency-domain substitution: keep the phase of g', impose |g|.
SpectralSeries impose_spectral_magnitude(const SpectralSeries &g_prime, std::span<const double> target_g_mag)
{
    std::vector<cplx> out(g_prime.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = target_g_mag[i] * unit_phase(g_prime.values[i]);
    return SpectralSeries(g_prime.grid, std::move(out));
}

std::vector<double> phases_of(const SpectralSeries &g)
{
    std::vector<double> p(g.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        p[i] = std::arg(unit_phase(g.values[i]));
    return p;
}

std::vector<double> gp_update(std::span<const double> phase, std::span<const double> target_g_mag,
                              const SpectralSeries &g_prime, double step_size)
{
    const auto grad = gp_gradient(phase, target_g_mag, g_prime);
    std::vector<double> next(phase.size());
    for (std::size_t i = 0; i < next.size(); ++i)
        next[i] = phase[i] - step_size * grad[i];
    return next;
}

SpectralSeries with_phase(const FrequencyGrid &grid, std::span<const double> magnitude, std::span<const double> phase)
{
    std::vector<cplx> out(magnitude.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = std::polar(magnitude[i], phase[i]);
    return SpectralSeries(grid, std::move(out));
}

void check_targets(const SpectralSeries &g_k, std::span<const double> target_g_mag,
                   std::span<const double> target_G_mag)
{
    require_length(g_k.size(), target_g_mag.size(), "target |g|");
    require_length(g_k.size(), target_G_mag.size(), "target |G|");
}

} // namespace

void RetrievalConfig::validate() const
{
    if (gs_iterations + gp_iterations + adapted_iterations == 0)
        throw InputError("retrieval: empty iteration schedule");
    if (!(gp_step_size > 0.0))
        throw InputError("retrieval: gp step size must be positive");
    if (!(adapted_threshold_fraction > 0.0 && adapted_threshold_fraction < 1.0))
        throw InputError("retrieval: adapted threshold fraction must lie in (0, 1)");
    if (restarts < 1)
        throw InputError("retrieval: at least one restart is required");
    if (!(convergence_tolerance > 0.0))
        throw InputError("retrieval: convergence tolerance must be positive");
    if (!(intensity_mask_fraction > 0.0 && intensity_mask_fraction < 1.0))
        throw InputError("retrieval: intensity mask fraction must lie in (0, 1)");
    if (!(consistency_tolerance >= 0.0) || !(cluster_distance >= 0.0) || !(ambiguity_tolerance >= 0.0))
        throw InputError("retrieval: tolerances must be nonnegative");
}

SpectralMagnitude::SpectralMagnitude(FrequencyGrid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v))
{
    require_length(grid.size(), values.size(), "spectral magnitude");
    for (double x : values)
    {
        if (!std::isfinite(x) || x < 0.0)
            throw InputError("spectral magnitude must be finite and nonnegative");
    }
}

SpectralMagnitude SpectralMagnitude::from_spectra(const IntensitySpectrum &i1, const IntensitySpectrum &i2)
{
    return SpectralMagnitude(i1.grid, spectral_magnitude(i1, i2));
}

SpectralSeries substituted_spectrum(const SpectralSeries &g_k, std::span<const double> target_G_mag)
{
    require_length(g_k.size(), target_G_mag.size(), "target |G|");
    DelaySeries G = forward_transform(g_k);
    for (std::size_t m = 0; m < G.size(); ++m)
        G.values[m] = target_G_mag[m] * unit_phase(G.values[m]);
    return inverse_transform(G);
}

SpectralSeries gs_step(const SpectralSeries &g_k, std::span<const double> target_g_mag,
                       std::span<const double> target_G_mag)
{
    check_targets(g_k, target_g_mag, target_G_mag);
    return impose_spectral_magnitude(substituted_spectrum(g_k, target_G_mag), target_g_mag);
}

double gp_distance(std::span<const double> phase, std::span<const double> target_g_mag, const SpectralSeries &g_prime)
{
    require_length(g_prime.size(), phase.size(), "gp phase");
    require_length(g_prime.size(), target_g_mag.size(), "target |g|");
    const double scale = max_of(target_g_mag);
    if (!(scale > 0.0))
        return 0.0;
    double z = 0.0;
    for (std::size_t i = 0; i < phase.size(); ++i)
        z += std::norm(std::polar(target_g_mag[i] / scale, phase[i]) - g_prime.values[i] / scale);
    return z;
}

std::vector<double> gp_gradient(std::span<const double> phase, std::span<const double> target_g_mag,
                                const SpectralSeries &g_prime)
{
    require_length(g_prime.size(), phase.size(), "gp phase");
    require_length(g_prime.size(), target_g_mag.size(), "target |g|");
    const double scale = max_of(target_g_mag);
    std::vector<double> grad(phase.size(), 0.0);
    if (!(scale > 0.0))
        return grad;
    for (std::size_t i = 0; i < grad.size(); ++i)
    {
        const cplx b = g_prime.values[i] / scale;
        const double a = target_g_mag[i] / scale;
        grad[i] = 2.0 * a * std::abs(b) * std::sin(phase[i] - std::arg(unit_phase(b)));
    }
    return grad;
}

SpectralSeries gp_step(const SpectralSeries &g_k, std::span<const double> target_g_mag,
                       std::span<const double> target_G_mag, double step_size)
{
    check_targets(g_k, target_g_mag, target_G_mag);
    if (!(step_size > 0.0))
        throw InputError("gp_step: step size must be positive");
    const SpectralSeries g_prime = substituted_spectrum(g_k, target_G_mag);
    const auto phase = phases_of(g_k);
    return with_phase(g_k.grid, target_g_mag, gp_update(phase, target_g_mag, g_prime, step_size));
}

SpectralSeries adapted_gs_step(const SpectralSeries &g_k, std::span<const double> target_g_mag,
                               std::span<const double> target_G_mag, double threshold)
{
    check_targets(g_k, target_g_mag, target_G_mag);
    if (!(threshold >= 0.0))
        throw InputError("adapted_gs_step: threshold must be nonnegative");
    DelaySeries G = forward_transform(g_k);
    for (std::size_t m = 0; m < G.size(); ++m)
    {
        const double measured = target_G_mag[m];
        const double current = std::abs(G.values[m]);
        const double mag =
            measured < threshold ? 0.5 * measured * measured + (1.0 - 0.5 * measured) * current : measured;
        G.values[m] = mag * unit_phase(G.values[m]);
    }
    return impose_spectral_magnitude(inverse_transform(G), target_g_mag);
}

double residual(const SpectralSeries &g_candidate, std::span<const double> measured_G_mag, double threshold)
{
    require_length(g_candidate.size(), measured_G_mag.size(), "measured |G|");
    const DelaySeries G = forward_transform(g_candidate);
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t m = 0; m < G.size(); ++m)
    {
        if (measured_G_mag[m] < threshold)
            continue;
        const double d = std::abs(G.values[m]) - measured_G_mag[m];
        sum += d * d;
        ++n;
    }
    return n == 0 ? 0.0 : std::sqrt(sum / static_cast<double>(n));
}

PhaseSpectrum detrend(const PhaseSpectrum &psd, std::span<const double> weights)
{
    require_length(psd.grid.size(), weights.size(), "detrend weights");
    std::size_t nonzero = 0;
    double sw = 0.0, sx = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i)
    {
        if (!std::isfinite(weights[i]) || weights[i] < 0.0)
            throw InputError("detrend: weights must be finite and nonnegative");
        if (weights[i] > 0.0)
            ++nonzero;
        sw += weights[i];
        sx += weights[i] * psd.grid.offset(i);
    }
    if (nonzero < 2)
        throw InputError("detrend: need at least two samples with nonzero weight");

    // Centered abscissa keeps the 2x2 normal equations diagonal.
    const double xbar = sx / sw;
    double sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i)
    {
        const double x = psd.grid.offset(i) - xbar;
        sy += weights[i] * psd.values[i];
        sxx += weights[i] * x * x;
        sxy += weights[i] * x * psd.values[i];
    }
    const double intercept = sy / sw;
    const double slope = sxy / sxx;
    std::vector<double> out(psd.values.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = psd.values[i] - intercept - slope * (psd.grid.offset(i) - xbar);
    return PhaseSpectrum(psd.grid, std::move(out));
}

PhaseSpectrum flip_candidate(const PhaseSpectrum &psd, double center)
{
    const FrequencyGrid &grid = psd.grid;
    if (!std::isfinite(center) || !grid.contains(center))
        throw InputError("flip_candidate: center lies outside the grid span");
    const std::size_t n = grid.size();
    // Fractional index of the center; the reflection of sample i sits at 2c - i.
    const double c = (center - grid.lowest()) / grid.spacing();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        const double u = 2.0 * c - static_cast<double>(i);
        double value;
        if (u <= 0.0)
            value = psd.values.front();
        else if (u >= static_cast<double>(n - 1))
            value = psd.values.back();
        else
        {
            const auto j = static_cast<std::size_t>(std::floor(u));
            const double t = u - static_cast<double>(j);
            value = t == 0.0 ? psd.values[j] : (1.0 - t) * psd.values[j] + t * psd.values[j + 1];
        }
        out[i] = -value;
    }
    return PhaseSpectrum(grid, std::move(out));
}

std::vector<double> unwrap_phase(std::span<const double> phase, std::size_t anchor)
{
    std::vector<double> out(phase.begin(), phase.end());
    if (out.empty())
        return out;
    anchor = std::min(anchor, out.size() - 1);
    for (std::size_t i = anchor + 1; i < out.size(); ++i)
        out[i] = out[i - 1] + wrap(phase[i] - out[i - 1]);
    for (std::size_t i = anchor; i-- > 0;)
        out[i] = out[i + 1] + wrap(phase[i] - out[i + 1]);
    return out;
}

std::vector<bool> intensity_mask(std::span<const double> magnitude, double fraction)
{
    const double cut = fraction * max_of(magnitude);
    std::vector<bool> mask(magnitude.size());
    for (std::size_t i = 0; i < mask.size(); ++i)
        mask[i] = magnitude[i] > 0.0 && magnitude[i] >= cut;
    return mask;
}

double weighted_rms_distance(std::span<const double> a, std::span<const double> b, std::span<const double> weights,
                             const std::vector<bool> &mask)
{
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        if (!mask[i])
            continue;
        const double d = a[i] - b[i];
        num += weights[i] * d * d;
        den += weights[i];
    }
    return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

double spectral_centroid(const FrequencyGrid &grid, std::span<const double> weights)
{
    double sw = 0.0, sx = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i)
    {
        sw += weights[i];
        sx += weights[i] * grid.offset(i);
    }
    if (!(sw > 0.0))
        throw InputError("spectral centroid: weights are identically zero");
    return grid.center() + sx / sw;
}

MeasuredCorrelation correlation_from_dip(const DipPattern &dip, const StateCombination &combo,
                                         const FrequencyGrid &freq, const RetrievalConfig &config)
{
    if (dip.size() < 4)
        throw InputError("dip needs at least 4 delay points");
    const double f = visibility_factor(combo);

    std::vector<double> mag(dip.size());
    std::vector<std::size_t> offending;
    for (std::size_t i = 0; i < dip.size(); ++i)
    {
        const double v = (1.0 - dip.nc[i]) / f;
        double allowed = config.consistency_tolerance;
        if (dip.std_errors)
            allowed = std::max(allowed, 3.0 * (*dip.std_errors)[i] / f);
        if (v > 1.0 + allowed)
            offending.push_back(i);
        mag[i] = std::sqrt(std::max(0.0, v));
    }
    if (!offending.empty())
    {
        std::ostringstream msg;
        msg << "dip implies mode matching above 1 for the chosen state combination at delays (ps):";
        for (std::size_t i : offending)
            msg << ' ' << dip.delays[i] * 1e12;
        throw NumericalError(msg.str());
    }
    if (!(max_of(mag) > 0.0))
        throw NumericalError("dip shows no interference; |G| is identically zero and carries no phase");

    const std::size_t deepest = static_cast<std::size_t>(std::min_element(dip.nc.begin(), dip.nc.end()) - dip.nc.begin());
    const double offset = dip.delays[deepest];
    std::vector<double> shifted(dip.size());
    for (std::size_t i = 0; i < shifted.size(); ++i)
        shifted[i] = dip.delays[i] - offset;

    const TimeGrid tg = conjugate_time_grid(freq);
    if (shifted.front() < tg.tau(0) || shifted.back() > tg.tau(tg.size() - 1))
        throw InputError("dip delay range exceeds the time grid span; use a finer frequency spacing");

    const double lo = shifted.front(), hi = shifted.back();
    boost::math::interpolators::pchip<std::vector<double>> interp(std::move(shifted), std::vector<double>(mag));
    std::vector<double> out(tg.size(), 0.0);
    for (std::size_t m = 0; m < tg.size(); ++m)
    {
        const double t = tg.tau(m);
        if (t >= lo && t <= hi)
            out[m] = std::max(0.0, interp(t));
    }
    return {tg, std::move(out), offset};
}

namespace {

struct RestartRun
{
    SpectralSeries g;
    std::vector<double> history;
    double amplitude;
};

// Iteration state for one restart. It works on h_n = (-1)^n g_n, for which the grid transforms reduce
// to bare DFTs: |G_m| = dw |DFT+(h)_m|, and the time-domain substitution G'_m = A_m G_m / |G_m| maps
// back to h'_n = DFT-(A u)_n / (N dw), where u is the unit phase of DFT+(h). Every substitution and the
// GP distance only see moduli and phase differences, so the alternating sign never needs undoing
// until the end.
class ScheduleState
{
public:
    ScheduleState(const SpectralMagnitude &measured, std::vector<double> initial_phase)
        : grid_(measured.grid), magnitude_(measured.values), h_(magnitude_.size()), spectrum_(h_.size()),
          back_(h_.size()), delay_mag_(h_.size())
    {
        for (std::size_t i = 0; i < h_.size(); ++i)
            h_[i] = std::polar(magnitude_[i], initial_phase[i]) * alternating_sign(i);
        inverse_scale_ = 1.0 / (static_cast<double>(h_.size()) * grid_.spacing());
    }

    // Transforms the current estimate; must precede the queries and substitutions below.
    void transform()
    {
        unscaled_dft(+1, h_, spectrum_);
        for (std::size_t m = 0; m < spectrum_.size(); ++m)
            delay_mag_[m] = grid_.spacing() * std::abs(spectrum_[m]);
    }

    const std::vector<double> &delay_magnitude() const { return delay_mag_; }

    // h' for the delay-domain magnitudes `mag`, left in back_.
    void substitute(const std::vector<double> &mag)
    {
        std::vector<cplx> y(spectrum_.size());
        for (std::size_t m = 0; m < y.size(); ++m)
            y[m] = mag[m] * unit_phase(spectrum_[m]);
        unscaled_dft(-1, y, back_);
        for (cplx &z : back_)
            z *= inverse_scale_;
    }

    void impose_magnitude()
    {
        for (std::size_t i = 0; i < h_.size(); ++i)
            h_[i] = magnitude_[i] * unit_phase(back_[i]);
    }

    // One backtracking gradient step on Z against the substituted spectrum in back_.
    void gp_descent(double initial_step, std::size_t max_halvings)
    {
        const SpectralSeries g_prime(grid_, back_);
        std::vector<double> current(h_.size());
        for (std::size_t i = 0; i < h_.size(); ++i)
            current[i] = std::arg(unit_phase(h_[i]));
        const double z0 = gp_distance(current, magnitude_, g_prime);
        double step = initial_step;
        for (std::size_t k = 0; k <= max_halvings; ++k, step *= 0.5)
        {
            auto next = gp_update(current, magnitude_, g_prime, step);
            if (gp_distance(next, magnitude_, g_prime) < z0)
            {
                for (std::size_t i = 0; i < h_.size(); ++i)
                    h_[i] = std::polar(magnitude_[i], next[i]);
                return;
            }
        }
    }

    SpectralSeries estimate() const
    {
        std::vector<cplx> g(h_.size());
        for (std::size_t i = 0; i < g.size(); ++i)
            g[i] = h_[i] * alternating_sign(i);
        return SpectralSeries(grid_, std::move(g));
    }

private:
    static double alternating_sign(std::size_t i) { return i % 2 == 0 ? 1.0 : -1.0; }

    FrequencyGrid grid_;
    std::vector<double> magnitude_;
    std::vector<cplx> h_;
    std::vector<cplx> spectrum_;
    std::vector<cplx> back_;
    std::vector<double> delay_mag_;
    double inverse_scale_ = 1.0;
};

double rms_difference(const std::vector<double> &model, const std::vector<double> &target, double threshold,
                      double scale)
{
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t m = 0; m < model.size(); ++m)
    {
        if (target[m] < threshold)
            continue;
        const double d = model[m] - scale * target[m];
        sum += d * d;
        ++count;
    }
    return count == 0 ? 0.0 : std::sqrt(sum / static_cast<double>(count));
}

// Least-squares s in sum (s target - model)^2.
double fitted_scale(const std::vector<double> &model, const std::vector<double> &target)
{
    double num = 0.0, den = 0.0;
    for (std::size_t m = 0; m < model.size(); ++m)
    {
        num += model[m] * target[m];
        den += target[m] * target[m];
    }
    return den > 0.0 && num > 0.0 ? num / den : 0.0;
}

RestartRun run_schedule(const SpectralMagnitude &measured, const std::vector<double> &measured_G,
                        const RetrievalConfig &config, std::size_t restart)
{
    const std::size_t n = measured.grid.size();
    SplitMix64 rng(SplitMix64::derive(config.seed, restart));
    std::vector<double> phase(n);
    for (double &p : phase)
        p = -kPi + 2.0 * kPi * rng.uniform();
    ScheduleState state(measured, std::move(phase));

    const double peak = max_of(measured_G);
    double amplitude = 1.0 / peak;
    std::vector<double> target(n);
    auto set_amplitude = [&](double s) {
        amplitude = s;
        for (std::size_t m = 0; m < n; ++m)
            target[m] = s * measured_G[m];
    };
    set_amplitude(amplitude);
    // Relative to the measured peak, so the same delays count for every amplitude.
    const double threshold = config.adapted_threshold_fraction * peak;

    std::vector<double> history;
    history.reserve(config.gs_iterations + config.gp_iterations + config.adapted_iterations + 1);

    // Each iteration records the residual of the incoming estimate, then advances it.
    auto run_stage = [&](std::size_t iterations, bool free_scale, auto &&advance) {
        double previous = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < iterations; ++k)
        {
            state.transform();
            const auto &model = state.delay_magnitude();
            // G-S ignores the overall scale of the target, so its progress is judged at the best-fitting one.
            const double r = free_scale ? rms_difference(model, measured_G, threshold, fitted_scale(model, measured_G))
                                        : rms_difference(model, measured_G, threshold, amplitude);
            history.push_back(r);
            if (std::abs(previous - r) < config.convergence_tolerance)
                break;
            previous = r;
            advance();
        }
    };

    run_stage(config.gs_iterations, true, [&] {
        state.substitute(target);
        state.impose_magnitude();
    });

    state.transform();
    if (const double s = fitted_scale(state.delay_magnitude(), measured_G); s > 0.0)
        set_amplitude(s);

    run_stage(config.gp_iterations, false, [&] {
        state.substitute(target);
        state.gp_descent(config.gp_step_size, config.gp_max_halvings);
    });

    const double blend_threshold = config.adapted_threshold_fraction * max_of(target);
    std::vector<double> blended(n);
    run_stage(config.adapted_iterations, false, [&] {
        const auto &model = state.delay_magnitude();
        for (std::size_t m = 0; m < n; ++m)
        {
            const double a = target[m];
            blended[m] = a < blend_threshold ? 0.5 * a * a + (1.0 - 0.5 * a) * model[m] : a;
        }
        state.substitute(blended);
        state.impose_magnitude();
    });

    state.transform();
    history.push_back(rms_difference(state.delay_magnitude(), measured_G, threshold, amplitude));
    return {state.estimate(), std::move(history), amplitude};
}

struct Candidate
{
    std::size_t restart;
    bool flipped;
    double residual;
    double other_residual;
    std::vector<double> psd; // detrended
};

} // namespace

RetrievalResult run_retrieval(const SpectralMagnitude &measured_g_mag, const DipPattern &measured_dip,
                              const StateCombination &combo, const RetrievalConfig &config)
{
    config.validate();
    validate(combo);
    const FrequencyGrid &grid = measured_g_mag.grid;
    const std::vector<double> &weights = measured_g_mag.values;
    if (!(max_of(weights) > 0.0))
        throw InputError("measured |g| is identically zero");

    const MeasuredCorrelation corr = correlation_from_dip(measured_dip, combo, grid, config);
    const std::vector<bool> mask = intensity_mask(weights, config.intensity_mask_fraction);
    const double center = spectral_centroid(grid, weights);
    const std::size_t anchor = argmax(weights);

    std::vector<Candidate> candidates;
    std::vector<RestartRun> runs;
    candidates.reserve(2 * config.restarts);
    runs.reserve(config.restarts);
    for (std::size_t r = 0; r < config.restarts; ++r)
    {
        runs.push_back(run_schedule(measured_g_mag, corr.magnitude, config, r));
        const RestartRun &run = runs.back();

        std::vector<double> target(corr.magnitude.size());
        for (std::size_t m = 0; m < target.size(); ++m)
            target[m] = run.amplitude * corr.magnitude[m];
        const double threshold = config.adapted_threshold_fraction * max_of(target);

        const PhaseSpectrum psi(grid, unwrap_phase(phases_of(run.g), anchor));
        const PhaseSpectrum flip = flip_candidate(psi, center);
        const double res = residual(with_phase(grid, weights, psi.values), target, threshold);
        const double res_flip = residual(with_phase(grid, weights, flip.values), target, threshold);
        candidates.push_back({r, false, res, res_flip, detrend(psi, weights).values});
        candidates.push_back({r, true, res_flip, res, detrend(flip, weights).values});
    }

    // Group near-identical solutions and take the best member of the cluster with the lowest mean residual.
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return candidates[a].residual < candidates[b].residual; });
    struct Cluster
    {
        std::size_t representative;
        double residual_sum = 0.0;
        std::size_t members = 0;
    };
    std::vector<Cluster> clusters;
    for (std::size_t idx : order)
    {
        bool placed = false;
        for (Cluster &c : clusters)
        {
            if (weighted_rms_distance(candidates[idx].psd, candidates[c.representative].psd, weights, mask) <
                config.cluster_distance)
            {
                c.residual_sum += candidates[idx].residual;
                ++c.members;
                placed = true;
                break;
            }
        }
        if (!placed)
            clusters.push_back({idx, candidates[idx].residual, 1});
    }
    const Cluster *best = &clusters.front();
    for (const Cluster &c : clusters)
    {
        if (c.residual_sum / static_cast<double>(c.members) <
            best->residual_sum / static_cast<double>(best->members))
            best = &c;
    }

    const Candidate &win = candidates[best->representative];
    RetrievalResult result{.psd = PhaseSpectrum(grid, win.psd)};
    result.residual_history = runs[win.restart].history;
    result.restart_index = win.restart;
    result.flipped = win.flipped;
    result.residual = win.residual;
    result.alternate_residual = win.other_residual;
    result.ambiguous = std::abs(win.residual - win.other_residual) <= config.ambiguity_tolerance;
    result.fitted_amplitude = runs[win.restart].amplitude;
    result.delay_offset = corr.delay_offset;
    result.flip_center = center;
    for (std::size_t r = 0; r < config.restarts; ++r)
        result.restart_residuals.push_back(std::min(candidates[2 * r].residual, candidates[2 * r + 1].residual));
    return result;
}

} // namespace homphase
