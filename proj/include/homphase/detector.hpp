#pragma once

#include "homphase/forward_model.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace homphase {

/**
 * SplitMix64 (Steele, Lea & Flood 2014): a 64-bit counter passed through a
 * fixed finalizer. Every output is a pure function of (seed, call index), so
 * streams are reproducible on every platform, and derive() gives cheap
 * independent sub-streams.
 */
class SplitMix64
{
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()()
    {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    static std::uint64_t mix(std::uint64_t z)
    {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Seed for sub-stream `index` of `seed`.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t index)
    {
        return mix(seed + 0x9E3779B97F4A7C15ULL * (index + 1));
    }

private:
    std::uint64_t state_;
};

struct CountingBudget
{
    double repetition_rate = 36.88e6;   // pulses / s
    double single_rate_target = 1.3e6;  // counts / s per detector
    double duration_per_point = 90.0;   // s
    double dead_time = 0.0;             // s
    std::uint64_t seed = 0;
    bool use_dead_time = false;
    // When false the baseline is the exact expectation instead of a noisy estimate.
    bool baseline_noise = true;
    // Reference points lie beyond this multiple of the dip half-width from its center.
    double baseline_halfwidth_multiple = 3.0;

    void validate() const;
    std::uint64_t pulses_per_point() const;
    double single_probability() const;
};

struct CountRecord
{
    std::vector<double> delays;
    std::vector<std::uint64_t> counts_a;
    std::vector<std::uint64_t> counts_b;
    std::vector<std::uint64_t> coincidences;
    std::vector<bool> is_reference;
    std::uint64_t pulses_per_point = 0;
    // Summed over the reference points; divide by baseline_points for the per-point baseline.
    std::uint64_t baseline_coincidences = 0;
    std::size_t baseline_points = 0;
    bool baseline_noisy = true;
};

/// Non-paralyzable dead time: r / (1 + r t).
double apply_dead_time(double ideal_rate, double dead_time);

/**
 * Draws one Binomial(n_pulses, p_baseline * N_c(tau)) coincidence count per
 * delay, with p_baseline the product of the two single-detection
 * probabilities implied by the budget. Deterministic in budget.seed.
 */
CountRecord simulate_counts(const DipPattern &true_nc, const CountingBudget &budget, const StateCombination &combo);

/// Coincidences divided by the baseline, with binomial error propagation.
DipPattern estimate_dip(const CountRecord &record);

/// Indices of dip samples usable as the large-delay baseline.
std::vector<bool> reference_points(const DipPattern &dip, double halfwidth_multiple);

} // namespace homphase
