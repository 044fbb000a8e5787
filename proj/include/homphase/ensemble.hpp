#pragma once

#include "homphase/detector.hpp"
#include "homphase/retrieval.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace homphase {

/// Ground truth shared by every run of an ensemble.
struct EnsembleScenario
{
    IntensitySpectrum intensity_1;
    IntensitySpectrum intensity_2;
    PhaseSpectrum truth;
    StateCombination combo = CoherentCoherent{};
    std::vector<double> delays; // s, strictly increasing
};

/// Closed frequency interval in rad/s.
struct FrequencyBand
{
    double low = 0.0;
    double high = 0.0;
};

struct EnsembleSpec
{
    std::size_t n_runs = 1000;
    std::uint64_t base_seed = 0;
    CountingBudget budget;
    EnsembleScenario scenario;
    RetrievalConfig retrieval;
    FrequencyBand band;
    double bin_width = 0.02; // rad
    std::size_t threads = 0; // 0: one per hardware thread

    void validate() const;
};

struct RunFailure
{
    std::size_t run;
    std::string message;
};

/**
 * Reconstructed phases of every successful run, aligned to the orientation of
 * the truth, plus per-frequency histograms and quantile curves.
 */
struct PhaseDistribution
{
    FrequencyGrid grid;
    PhaseSpectrum reference;               // detrended truth the runs were aligned to
    std::vector<std::vector<double>> runs; // successful runs in index order
    std::vector<std::size_t> run_indices;
    std::vector<RunFailure> failures;

    double bin_width = 0.02;
    std::size_t bin_count = 0; // bins cover [-pi, pi); the last one may be narrower
    std::vector<std::uint32_t> histogram; // frequency-major: histogram[i * bin_count + b]

    std::vector<double> quantile_05;
    std::vector<double> quantile_50;
    std::vector<double> quantile_95;

    std::size_t engine_orientation_matches = 0; // runs where the engine's own choice agreed with the truth
    std::size_t ambiguous_runs = 0;

    std::size_t n_runs() const { return runs.size(); }
    std::uint32_t count(std::size_t frequency, std::size_t bin) const { return histogram[frequency * bin_count + bin]; }
    double bin_center(std::size_t bin) const;
};

/// Per-run sub-seeds: run j uses base_seed ^ j, split into a counting and a retrieval stream.
std::uint64_t run_seed(std::uint64_t base_seed, std::size_t run);
std::uint64_t counting_seed(std::uint64_t run_seed);
std::uint64_t retrieval_seed(std::uint64_t run_seed);

PhaseDistribution run_ensemble(const EnsembleSpec &spec);

/// Fraction of (run, in-band frequency) pairs with |phase - truth| <= halfwidth.
double coverage_statistic(const PhaseDistribution &dist, const PhaseSpectrum &truth, double halfwidth,
                          const FrequencyBand &band);

/// Long-form `freq_thz,phase_bin_center,count`, frequency-major, zero counts omitted.
std::string heatmap_csv(const PhaseDistribution &dist, const std::optional<FrequencyBand> &band = std::nullopt);

/// `freq_thz,truth,q05,q50,q95` per frequency.
std::string quantiles_csv(const PhaseDistribution &dist, const std::optional<FrequencyBand> &band = std::nullopt);

} // namespace homphase
