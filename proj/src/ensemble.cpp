#include "homphase/ensemble.hpp"

#include "homphase/error.hpp"
#include "homphase/io.hpp"
#include "homphase/presets.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

namespace homphase {

namespace {

constexpr double kPi = std::numbers::pi;

struct RunOutcome
{
    bool ok = false;
    std::vector<double> phase;
    bool engine_agreed = false;
    bool ambiguous = false;
    std::string error;
};

double quantile_sorted(const std::vector<double> &sorted, double q)
{
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double t = pos - static_cast<double>(lo);
    return sorted[lo] + t * (sorted[hi] - sorted[lo]);
}

bool in_band(double omega, const FrequencyBand &band) { return omega >= band.low && omega <= band.high; }

void check_band(const FrequencyGrid &grid, const FrequencyBand &band)
{
    if (!(band.low <= band.high) || !std::isfinite(band.low) || !std::isfinite(band.high))
        throw InputError("band: lower edge must not exceed the upper edge");
    if (band.low < grid.lowest() || band.high > grid.highest())
        throw InputError("band [" + format_number(omega_to_thz(band.low)) + ", " +
                         format_number(omega_to_thz(band.high)) + "] THz lies outside the grid span [" +
                         format_number(omega_to_thz(grid.lowest())) + ", " +
                         format_number(omega_to_thz(grid.highest())) + "] THz");
}

} // namespace

void EnsembleSpec::validate() const
{
    if (n_runs < 2)
        throw InputError("ensemble: n_runs must be at least 2");
    const FrequencyGrid &grid = scenario.truth.grid;
    if (!(scenario.intensity_1.grid == grid) || !(scenario.intensity_2.grid == grid))
        throw InputError("ensemble: spectra and truth must share one frequency grid");
    if (scenario.delays.empty())
        throw InputError("ensemble: no delays");
    check_band(grid, band);
    if (!(bin_width > 0.0) || !std::isfinite(bin_width))
        throw InputError("ensemble: histogram bin width must be positive");
    budget.validate();
    retrieval.validate();
    homphase::validate(scenario.combo);
}

double PhaseDistribution::bin_center(std::size_t bin) const
{
    const double lo = -kPi + static_cast<double>(bin) * bin_width;
    return 0.5 * (lo + std::min(lo + bin_width, kPi));
}

std::uint64_t run_seed(std::uint64_t base_seed, std::size_t run) { return base_seed ^ static_cast<std::uint64_t>(run); }
std::uint64_t counting_seed(std::uint64_t seed) { return SplitMix64::derive(seed, 0); }
std::uint64_t retrieval_seed(std::uint64_t seed) { return SplitMix64::derive(seed, 1); }

PhaseDistribution run_ensemble(const EnsembleSpec &spec)
{
    spec.validate();
    const EnsembleScenario &sc = spec.scenario;
    const FrequencyGrid &grid = sc.truth.grid;
    const std::size_t n = grid.size();

    const SpectralMagnitude magnitude = SpectralMagnitude::from_spectra(sc.intensity_1, sc.intensity_2);
    const DipPattern true_dip = synthesize_dip(sc.intensity_1, sc.intensity_2, sc.truth, sc.combo, sc.delays);
    const std::vector<bool> mask = intensity_mask(magnitude.values, spec.retrieval.intensity_mask_fraction);
    const PhaseSpectrum reference = detrend(sc.truth, magnitude.values);

    std::vector<RunOutcome> outcomes(spec.n_runs);
    auto run_one = [&](std::size_t j) {
        RunOutcome &out = outcomes[j];
        try
        {
            const std::uint64_t seed = run_seed(spec.base_seed, j);
            CountingBudget budget = spec.budget;
            budget.seed = counting_seed(seed);
            RetrievalConfig config = spec.retrieval;
            config.seed = retrieval_seed(seed);

            const DipPattern measured = estimate_dip(simulate_counts(true_dip, budget, sc.combo));
            const RetrievalResult result = run_retrieval(magnitude, measured, sc.combo, config);

            const PhaseSpectrum flipped = detrend(flip_candidate(result.psd, result.flip_center), magnitude.values);
            const double d_same = weighted_rms_distance(result.psd.values, reference.values, magnitude.values, mask);
            const double d_flip = weighted_rms_distance(flipped.values, reference.values, magnitude.values, mask);
            out.engine_agreed = d_same <= d_flip;
            out.phase = out.engine_agreed ? result.psd.values : flipped.values;
            out.ambiguous = result.ambiguous;
            out.ok = true;
        }
        catch (const std::exception &e)
        {
            out.error = e.what();
        }
    };

    std::size_t workers = spec.threads != 0 ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, spec.n_runs);
    if (workers <= 1)
    {
        for (std::size_t j = 0; j < spec.n_runs; ++j)
            run_one(j);
    }
    else
    {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
        {
            pool.emplace_back([&] {
                for (std::size_t j = next++; j < spec.n_runs; j = next++)
                    run_one(j);
            });
        }
    }

    PhaseDistribution dist{grid, reference};
    dist.bin_width = spec.bin_width;
    dist.bin_count = static_cast<std::size_t>(std::ceil(2.0 * kPi / spec.bin_width));
    for (std::size_t j = 0; j < outcomes.size(); ++j)
    {
        RunOutcome &o = outcomes[j];
        if (!o.ok)
        {
            dist.failures.push_back({j, o.error});
            continue;
        }
        dist.run_indices.push_back(j);
        dist.runs.push_back(std::move(o.phase));
        dist.engine_orientation_matches += o.engine_agreed ? 1 : 0;
        dist.ambiguous_runs += o.ambiguous ? 1 : 0;
    }
    if (dist.runs.empty())
    {
        std::ostringstream msg;
        msg << "ensemble: all " << spec.n_runs << " runs failed; first failure (run " << dist.failures.front().run
            << "): " << dist.failures.front().message;
        throw NumericalError(msg.str());
    }

    dist.histogram.assign(n * dist.bin_count, 0);
    dist.quantile_05.resize(n);
    dist.quantile_50.resize(n);
    dist.quantile_95.resize(n);
    std::vector<double> column(dist.runs.size());
    for (std::size_t i = 0; i < n; ++i)
    {
        for (std::size_t r = 0; r < dist.runs.size(); ++r)
        {
            const double x = dist.runs[r][i];
            column[r] = x;
            const double wrapped = x - 2.0 * kPi * std::floor((x + kPi) / (2.0 * kPi));
            const auto bin = std::min(static_cast<std::size_t>((wrapped + kPi) / dist.bin_width), dist.bin_count - 1);
            ++dist.histogram[i * dist.bin_count + bin];
        }
        std::sort(column.begin(), column.end());
        dist.quantile_05[i] = quantile_sorted(column, 0.05);
        dist.quantile_50[i] = quantile_sorted(column, 0.50);
        dist.quantile_95[i] = quantile_sorted(column, 0.95);
    }
    return dist;
}

double coverage_statistic(const PhaseDistribution &dist, const PhaseSpectrum &truth, double halfwidth,
                          const FrequencyBand &band)
{
    if (!(truth.grid == dist.grid))
        throw InputError("coverage: truth and distribution grids differ");
    if (std::isnan(halfwidth) || halfwidth < 0.0)
        throw InputError("coverage: halfwidth must be nonnegative");
    check_band(dist.grid, band);
    std::size_t inside = 0, total = 0;
    for (std::size_t i = 0; i < dist.grid.size(); ++i)
    {
        if (!in_band(dist.grid.omega(i), band))
            continue;
        for (const auto &run : dist.runs)
        {
            ++total;
            if (std::abs(run[i] - truth.values[i]) <= halfwidth)
                ++inside;
        }
    }
    if (total == 0)
        throw InputError("coverage: the band contains no grid frequency");
    return static_cast<double>(inside) / static_cast<double>(total);
}

std::string heatmap_csv(const PhaseDistribution &dist, const std::optional<FrequencyBand> &band)
{
    std::string out = "freq_thz,phase_bin_center,count\n";
    for (std::size_t i = 0; i < dist.grid.size(); ++i)
    {
        if (band && !in_band(dist.grid.omega(i), *band))
            continue;
        const std::string f = format_converted(omega_to_thz(dist.grid.omega(i)));
        for (std::size_t b = 0; b < dist.bin_count; ++b)
        {
            if (const auto c = dist.count(i, b); c != 0)
                out += f + ',' + format_number(dist.bin_center(b)) + ',' + std::to_string(c) + '\n';
        }
    }
    return out;
}

std::string quantiles_csv(const PhaseDistribution &dist, const std::optional<FrequencyBand> &band)
{
    std::string out = "freq_thz,truth,q05,q50,q95\n";
    for (std::size_t i = 0; i < dist.grid.size(); ++i)
    {
        if (band && !in_band(dist.grid.omega(i), *band))
            continue;
        out += format_converted(omega_to_thz(dist.grid.omega(i))) + ',' + format_number(dist.reference.values[i]) + ',' +
               format_number(dist.quantile_05[i]) + ',' + format_number(dist.quantile_50[i]) + ',' +
               format_number(dist.quantile_95[i]) + '\n';
    }
    return out;
}

} // namespace homphase
