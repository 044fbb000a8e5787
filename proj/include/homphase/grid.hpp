#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace homphase {

using cplx = std::complex<double>;

/**
 * Uniform angular-frequency lattice, stored fft-shifted:
 * sample i sits at omega_i = center + (i - N/2) * spacing.
 *
 * N must be a power of two and at least 8.
 */
class FrequencyGrid
{
public:
    FrequencyGrid(double center_frequency, double spacing, std::size_t count);

    double center() const { return center_; }
    double spacing() const { return spacing_; }
    std::size_t size() const { return count_; }

    double omega(std::size_t i) const
    {
        return center_ + (static_cast<double>(i) - static_cast<double>(count_ / 2)) * spacing_;
    }
    // Offset from the center; better conditioned than omega(i) - center().
    double offset(std::size_t i) const
    {
        return (static_cast<double>(i) - static_cast<double>(count_ / 2)) * spacing_;
    }
    double lowest() const { return omega(0); }
    double highest() const { return omega(count_ - 1); }
    bool contains(double w) const { return w >= lowest() && w <= highest(); }

    std::vector<double> omegas() const;

    bool operator==(const FrequencyGrid &) const = default;

private:
    double center_;
    double spacing_;
    std::size_t count_;
};

/**
 * Delay lattice conjugate to a FrequencyGrid: tau_m = (m - N/2) * spacing
 * with spacing = 2 pi / (N * domega). The conjugate center frequency is kept
 * so the inverse transform can restore the carrier.
 */
class TimeGrid
{
public:
    double spacing() const { return spacing_; }
    std::size_t size() const { return count_; }
    double tau(std::size_t m) const
    {
        return (static_cast<double>(m) - static_cast<double>(count_ / 2)) * spacing_;
    }
    double span() const { return spacing_ * static_cast<double>(count_); }
    std::vector<double> taus() const;

    FrequencyGrid conjugate() const;

    bool operator==(const TimeGrid &) const = default;

private:
    friend TimeGrid conjugate_time_grid(const FrequencyGrid &freq);
    TimeGrid(double spacing, std::size_t count, double conjugate_center, double conjugate_spacing)
        : spacing_(spacing), count_(count), conjugate_center_(conjugate_center),
          conjugate_spacing_(conjugate_spacing)
    {
    }

    double spacing_;
    std::size_t count_;
    double conjugate_center_;
    double conjugate_spacing_;
};

template <class Grid>
struct ComplexSeries
{
    Grid grid;
    std::vector<cplx> values;

    ComplexSeries(Grid g, std::vector<cplx> v);
    std::size_t size() const { return values.size(); }
};

using SpectralSeries = ComplexSeries<FrequencyGrid>;
using DelaySeries = ComplexSeries<TimeGrid>;

extern template struct ComplexSeries<FrequencyGrid>;
extern template struct ComplexSeries<TimeGrid>;

TimeGrid conjugate_time_grid(const FrequencyGrid &freq);

// G(tau_m) = domega * sum_n g(omega_n) exp(+i omega_n tau_m)
DelaySeries forward_transform(const SpectralSeries &g);

// g(omega_n) = dtau / (2 pi) * sum_m G(tau_m) exp(-i omega_n tau_m)
SpectralSeries inverse_transform(const DelaySeries &G);

/// Bare unnormalized DFT, out_m = sum_n in_n exp(sign 2 pi i n m / N), with no grid factors.
/// `out` must already have the size of `in`.
void unscaled_dft(int sign, const std::vector<cplx> &in, std::vector<cplx> &out);

bool is_power_of_two(std::size_t n);

} // namespace homphase
