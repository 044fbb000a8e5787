#include "homphase/grid.hpp"

#include "homphase/error.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

namespace homphase {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
class PlanCache
{
public:
    ~PlanCache()
    {
        for (auto &[n, p] : plans_)
        {
            fftw_destroy_plan(p.positive);
            fftw_destroy_plan(p.negative);
        }
    }

    // Unnormalized DFT with exp(+2 pi i n m / N) (sign = +1) or exp(-...) (sign = -1).
    void execute(int sign, const std::vector<cplx> &in, std::vector<cplx> &out)
    {
        const Plans &p = get(in.size());
        auto *src = reinterpret_cast<fftw_complex *>(const_cast<cplx *>(in.data()));
        auto *dst = reinterpret_cast<fftw_complex *>(out.data());
        fftw_execute_dft(sign > 0 ? p.positive : p.negative, src, dst);
    }

private:
    struct Plans
    {
        fftw_plan positive;
        fftw_plan negative;
    };

    const Plans &get(std::size_t n)
    {
        std::lock_guard lock(mutex_);
        auto it = plans_.find(n);
        if (it != plans_.end())
            return it->second;
        std::vector<cplx> a(n), b(n);
        auto *pa = reinterpret_cast<fftw_complex *>(a.data());
        auto *pb = reinterpret_cast<fftw_complex *>(b.data());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        Plans p{fftw_plan_dft_1d(static_cast<int>(n), pa, pb, FFTW_BACKWARD, flags),
                fftw_plan_dft_1d(static_cast<int>(n), pa, pb, FFTW_FORWARD, flags)};
        return plans_.emplace(n, p).first->second;
    }

    std::mutex mutex_;
    std::map<std::size_t, Plans> plans_;
};

PlanCache &plan_cache()
{
    static PlanCache cache;
    return cache;
}

void require_finite(const std::vector<cplx> &values, const char *what)
{
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag()))
            throw NumericalError(std::string(what) + ": non-finite value at sample " + std::to_string(i));
    }
}

double alternating(std::size_t k) { return (k % 2 == 0) ? 1.0 : -1.0; }

// exp(i sign w_c tau_m). The phase reaches ~1e5 rad on optical grids, so it is
// formed and reduced in extended precision before rounding to double.
cplx carrier(int sign, double wc, double dw, std::size_t n, std::size_t m)
{
    constexpr long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    const long double tau = (static_cast<long double>(m) - static_cast<long double>(n / 2)) * two_pi /
                            (static_cast<long double>(n) * dw);
    long double phase = static_cast<long double>(wc) * tau;
    phase -= two_pi * std::nearbyint(phase / two_pi);
    return std::polar(1.0, static_cast<double>(sign * phase));
}

} // namespace

void unscaled_dft(int sign, const std::vector<cplx> &in, std::vector<cplx> &out)
{
    if (out.size() != in.size())
        throw InputError("unscaled_dft: output size does not match input");
    plan_cache().execute(sign, in, out);
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

FrequencyGrid::FrequencyGrid(double center_frequency, double spacing, std::size_t count)
    : center_(center_frequency), spacing_(spacing), count_(count)
{
    if (!std::isfinite(center_frequency))
        throw InputError("frequency grid: center must be finite");
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw InputError("frequency grid: spacing must be positive and finite");
    if (count < 8 || !is_power_of_two(count))
        throw InputError("frequency grid: count must be a power of two >= 8, got " + std::to_string(count));
}

std::vector<double> FrequencyGrid::omegas() const
{
    std::vector<double> w(count_);
    for (std::size_t i = 0; i < count_; ++i)
        w[i] = omega(i);
    return w;
}

std::vector<double> TimeGrid::taus() const
{
    std::vector<double> t(count_);
    for (std::size_t m = 0; m < count_; ++m)
        t[m] = tau(m);
    return t;
}

FrequencyGrid TimeGrid::conjugate() const { return FrequencyGrid(conjugate_center_, conjugate_spacing_, count_); }

TimeGrid conjugate_time_grid(const FrequencyGrid &freq)
{
    const double n = static_cast<double>(freq.size());
    return TimeGrid(2.0 * std::numbers::pi / (n * freq.spacing()), freq.size(), freq.center(), freq.spacing());
}

template <class Grid>
ComplexSeries<Grid>::ComplexSeries(Grid g, std::vector<cplx> v) : grid(std::move(g)), values(std::move(v))
{
    if (values.size() != grid.size())
        throw InputError("series length " + std::to_string(values.size()) + " does not match grid size " +
                         std::to_string(grid.size()));
}

template struct ComplexSeries<FrequencyGrid>;
template struct ComplexSeries<TimeGrid>;

// With omega_n = w_c + (n - N/2) dw and tau_m = (m - N/2) dt, dw dt = 2 pi / N:
//   omega_n tau_m = w_c tau_m + 2 pi n m / N - pi n - pi m + pi N / 2
// and N/2 is even for every admissible N, so the last term drops out.
DelaySeries forward_transform(const SpectralSeries &g)
{
    require_finite(g.values, "forward_transform");
    const std::size_t n = g.size();
    const TimeGrid tg = conjugate_time_grid(g.grid);

    std::vector<cplx> in(n), out(n);
    for (std::size_t k = 0; k < n; ++k)
        in[k] = g.values[k] * alternating(k);
    plan_cache().execute(+1, in, out);

    const double dw = g.grid.spacing();
    const double wc = g.grid.center();
    for (std::size_t m = 0; m < n; ++m)
        out[m] *= dw * alternating(m) * carrier(+1, wc, dw, n, m);
    return DelaySeries(tg, std::move(out));
}

SpectralSeries inverse_transform(const DelaySeries &G)
{
    require_finite(G.values, "inverse_transform");
    const std::size_t n = G.size();
    const FrequencyGrid fg = G.grid.conjugate();
    const double wc = fg.center();

    std::vector<cplx> in(n), out(n);
    for (std::size_t m = 0; m < n; ++m)
        in[m] = G.values[m] * alternating(m) * carrier(-1, wc, fg.spacing(), n, m);
    plan_cache().execute(-1, in, out);

    const double scale = G.grid.spacing() / (2.0 * std::numbers::pi);
    for (std::size_t k = 0; k < n; ++k)
        out[k] *= scale * alternating(k);
    return SpectralSeries(fg, std::move(out));
}

} // namespace homphase
