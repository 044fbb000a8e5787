#include "homphase/detector.hpp"

#include "homphase/error.hpp"

#include <boost/random/binomial_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace homphase {

namespace {

std::uint64_t draw_binomial(SplitMix64 &rng, std::uint64_t n, double p)
{
    if (p <= 0.0 || n == 0)
        return 0;
    if (p >= 1.0)
        return n;
    boost::random::binomial_distribution<long long, double> dist(static_cast<long long>(n), p);
    return static_cast<std::uint64_t>(dist(rng));
}

} // namespace

void CountingBudget::validate() const
{
    if (!(repetition_rate > 0.0) || !std::isfinite(repetition_rate))
        throw InputError("budget: repetition rate must be positive");
    if (!(duration_per_point > 0.0) || !std::isfinite(duration_per_point))
        throw InputError("budget: duration per point must be positive");
    if (!(single_rate_target > 0.0) || !(single_rate_target < repetition_rate))
        throw InputError("budget: single rate must be positive and below the repetition rate");
    if (!(dead_time >= 0.0) || !std::isfinite(dead_time))
        throw InputError("budget: dead time must be nonnegative");
    if (!(baseline_halfwidth_multiple > 0.0))
        throw InputError("budget: baseline half-width multiple must be positive");
}

std::uint64_t CountingBudget::pulses_per_point() const
{
    return static_cast<std::uint64_t>(std::llround(repetition_rate * duration_per_point));
}

double CountingBudget::single_probability() const
{
    const double rate = use_dead_time ? apply_dead_time(single_rate_target, dead_time) : single_rate_target;
    return rate / repetition_rate;
}

double apply_dead_time(double ideal_rate, double dead_time)
{
    if (!(ideal_rate >= 0.0) || !(dead_time >= 0.0))
        throw InputError("dead time: rate and dead time must be nonnegative");
    if (std::isinf(ideal_rate))
        return dead_time > 0.0 ? 1.0 / dead_time : ideal_rate;
    return ideal_rate / (1.0 + ideal_rate * dead_time);
}

std::vector<bool> reference_points(const DipPattern &dip, double halfwidth_multiple)
{
    const std::size_t n = dip.size();
    std::vector<bool> ref(n, true);
    if (n == 0)
        return ref;

    std::size_t deepest = 0;
    for (std::size_t i = 1; i < n; ++i)
    {
        if (dip.nc[i] < dip.nc[deepest])
            deepest = i;
    }
    const double depth = 1.0 - dip.nc[deepest];
    if (!(depth > 0.0))
        return ref;

    // Half-width at half depth, at least half the local delay spacing.
    double lo = dip.delays[deepest], hi = dip.delays[deepest];
    for (std::size_t i = 0; i < n; ++i)
    {
        if (1.0 - dip.nc[i] >= 0.5 * depth)
        {
            lo = std::min(lo, dip.delays[i]);
            hi = std::max(hi, dip.delays[i]);
        }
    }
    double halfwidth = 0.5 * (hi - lo);
    if (n > 1)
    {
        const std::size_t j = deepest + 1 < n ? deepest + 1 : deepest - 1;
        halfwidth = std::max(halfwidth, 0.5 * std::abs(dip.delays[j] - dip.delays[deepest]));
    }
    const double center = 0.5 * (hi + lo);
    for (std::size_t i = 0; i < n; ++i)
        ref[i] = std::abs(dip.delays[i] - center) > halfwidth_multiple * halfwidth;
    return ref;
}

CountRecord simulate_counts(const DipPattern &true_nc, const CountingBudget &budget, const StateCombination &combo)
{
    budget.validate();
    validate(combo);
    const std::uint64_t pulses = budget.pulses_per_point();
    if (pulses == 0)
        throw InputError("budget: no pulses per point");

    const double p_single = budget.single_probability();
    const double p_baseline = p_single * p_single;

    CountRecord rec;
    rec.delays = true_nc.delays;
    rec.pulses_per_point = pulses;
    rec.baseline_noisy = budget.baseline_noise;
    rec.is_reference = reference_points(true_nc, budget.baseline_halfwidth_multiple);

    SplitMix64 rng(budget.seed);
    const std::size_t n = true_nc.size();
    rec.counts_a.resize(n);
    rec.counts_b.resize(n);
    rec.coincidences.resize(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        const double p_ab = p_baseline * true_nc.nc[i];
        if (!(p_ab >= 0.0 && p_ab <= 1.0))
            throw NumericalError("coincidence probability " + std::to_string(p_ab) + " out of [0, 1] at delay index " +
                                 std::to_string(i) + "; budget is inconsistent");
        rec.counts_a[i] = draw_binomial(rng, pulses, p_single);
        rec.counts_b[i] = draw_binomial(rng, pulses, p_single);
        rec.coincidences[i] = draw_binomial(rng, pulses, p_ab);
    }

    for (std::size_t i = 0; i < n; ++i)
    {
        if (!rec.is_reference[i])
            continue;
        ++rec.baseline_points;
        if (budget.baseline_noise)
            rec.baseline_coincidences += rec.coincidences[i];
    }
    if (rec.baseline_points == 0)
        throw InputError("no baseline reference delays beyond " + std::to_string(budget.baseline_halfwidth_multiple) +
                         "x the dip half-width; extend the delay range");
    if (!budget.baseline_noise)
    {
        rec.baseline_coincidences = static_cast<std::uint64_t>(
            std::llround(static_cast<double>(pulses) * p_baseline * static_cast<double>(rec.baseline_points)));
    }
    return rec;
}

DipPattern estimate_dip(const CountRecord &record)
{
    if (record.baseline_points == 0 || record.baseline_coincidences == 0)
        throw NumericalError("zero baseline coincidences; cannot normalize the dip");
    const double n = static_cast<double>(record.pulses_per_point);
    const double k = static_cast<double>(record.baseline_points);
    const double baseline = static_cast<double>(record.baseline_coincidences) / k;
    const double var_baseline = record.baseline_noisy ? baseline * (1.0 - baseline / n) / k : 0.0;

    std::vector<double> nc(record.delays.size()), se(record.delays.size());
    for (std::size_t i = 0; i < nc.size(); ++i)
    {
        const double c = static_cast<double>(record.coincidences[i]);
        nc[i] = c / baseline;
        // One pseudo-count keeps the error finite and nonzero when nothing was detected.
        const double c_eff = std::max(c, 1.0);
        const double var_c = c_eff * (1.0 - c_eff / n);
        se[i] = std::sqrt(var_c + nc[i] * nc[i] * var_baseline) / baseline;
    }
    return DipPattern(record.delays, std::move(nc), std::move(se));
}

} // namespace homphase
