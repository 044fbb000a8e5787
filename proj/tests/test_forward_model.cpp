#include "homphase/error.hpp"
#include "homphase/forward_model.hpp"
#include "homphase/io.hpp"
#include "homphase/presets.hpp"
#include "homphase/retrieval.hpp"
#include "fixtures.hpp"
#include "golden.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <numbers>
#include <random>

using namespace homphase;

namespace {

constexpr double kPi = std::numbers::pi;

double equivalent_width(const DipPattern &dip)
{
    // Trapezoidal area of 1 - N_c divided by its peak.
    double area = 0.0, peak = 0.0;
    for (std::size_t k = 0; k < dip.size(); ++k)
    {
        peak = std::max(peak, 1.0 - dip.nc[k]);
        if (k > 0)
            area += 0.5 * ((1.0 - dip.nc[k]) + (1.0 - dip.nc[k - 1])) * (dip.delays[k] - dip.delays[k - 1]);
    }
    return area / peak;
}

} // namespace

TEST_CASE("cross spectral density of identical spectra with flat phase is the normalized intensity")
{
    const FrequencyGrid grid = fixture::grid(256);
    const IntensitySpectrum I = fixture::spectrum(grid);
    const SpectralSeries g = cross_spectral_density(I, I, make_phase_preset("flat", grid, {}));
    double area = 0.0;
    for (double v : I.values)
        area += v;
    area *= grid.spacing();
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
        CHECK(g.values[i].imag() == 0.0);
        CHECK(g.values[i].real() == doctest::Approx(I.values[i] / area).epsilon(1e-14));
    }
}

TEST_CASE("zero intensity bins stay zero whatever the phase")
{
    const FrequencyGrid grid(0.0, 1.0, 16);
    std::vector<double> a(16, 1.0), b(16, 2.0), phase(16, 1.3);
    a[5] = 0.0;
    b[9] = 0.0;
    const SpectralSeries g =
        cross_spectral_density(IntensitySpectrum(grid, a), IntensitySpectrum(grid, b), PhaseSpectrum(grid, phase));
    CHECK(g.values[5] == cplx(0.0, 0.0));
    CHECK(g.values[9] == cplx(0.0, 0.0));
    CHECK(std::arg(g.values[0]) == doctest::Approx(1.3));
}

TEST_CASE("cross spectral density of two Gaussians with quadratic phase")
{
    const FrequencyGrid grid(0.0, 0.05, 256);
    std::vector<double> i1(256), i2(256), phase(256);
    long double a1 = 0.0L, a2 = 0.0L;
    for (std::size_t i = 0; i < 256; ++i)
    {
        const double w = grid.omega(i);
        i1[i] = std::exp(-w * w);
        i2[i] = std::exp(-w * w / 4.0);
        phase[i] = 0.3 * w * w;
        a1 += i1[i];
        a2 += i2[i];
    }
    a1 *= grid.spacing();
    a2 *= grid.spacing();
    const SpectralSeries g =
        cross_spectral_density(IntensitySpectrum(grid, i1), IntensitySpectrum(grid, i2), PhaseSpectrum(grid, phase));
    for (std::size_t i = 0; i < 256; ++i)
    {
        const double w = grid.omega(i);
        const double modulus = std::exp(-5.0 * w * w / 8.0) / static_cast<double>(std::sqrt(a1 * a2));
        CHECK(std::abs(g.values[i]) == doctest::Approx(modulus).epsilon(1e-12));
        if (modulus > 1e-200)
            CHECK(std::abs(g.values[i] / std::abs(g.values[i]) - std::polar(1.0, 0.3 * w * w)) < 1e-12);
    }
}

TEST_CASE("mode matching of identical packets peaks at one")
{
    const FrequencyGrid grid = fixture::grid(1024);
    const IntensitySpectrum I = fixture::spectrum(grid);
    const ModeMatching V = mode_matching(cross_spectral_density(I, I, fixture::inverted_n(grid)));
    CHECK(V.values[512] <= 1.0 + 1e-9);
    const ModeMatching flat = mode_matching(cross_spectral_density(I, I, make_phase_preset("flat", grid, {})));
    CHECK(flat.values[512] == doctest::Approx(1.0).epsilon(1e-12));
    for (double v : flat.values)
        CHECK((v >= 0.0 && v <= 1.0 + 1e-9));
}

TEST_CASE("disjoint spectra do not interfere")
{
    const FrequencyGrid grid(0.0, 1.0, 64);
    std::vector<double> a(64, 0.0), b(64, 0.0);
    for (std::size_t i = 0; i < 32; ++i)
        a[i] = 1.0 + i;
    for (std::size_t i = 32; i < 64; ++i)
        b[i] = 2.0;
    const ModeMatching V = mode_matching(
        cross_spectral_density(IntensitySpectrum(grid, a), IntensitySpectrum(grid, b), PhaseSpectrum(grid, std::vector<double>(64, 0.0))));
    for (double v : V.values)
        CHECK(v == 0.0);
}

TEST_CASE("Gaussian mode matching follows exp(-sigma^2 tau^2)")
{
    const FrequencyGrid grid = fixture::grid(2048);
    const double sigma = thz_to_omega(0.05);
    std::vector<double> I(grid.size());
    for (std::size_t i = 0; i < I.size(); ++i)
        I[i] = std::exp(-0.5 * std::pow(grid.offset(i) / sigma, 2));
    const IntensitySpectrum spec(grid, I);
    const SpectralSeries g = cross_spectral_density(spec, spec, PhaseSpectrum(grid, std::vector<double>(I.size(), 0.0)));
    const ModeMatching V = mode_matching(g);
    for (std::size_t m : {1024u, 1025u, 1030u, 1040u, 1050u, 1000u, 990u, 1012u})
    {
        const std::complex<double> G = oracle::correlation(grid, g.values, oracle::tau(grid, m));
        CHECK(V.values[m] == doctest::Approx(std::norm(G)).epsilon(1e-6));
        const double tau = V.grid.tau(m);
        CHECK(V.values[m] == doctest::Approx(std::exp(-sigma * sigma * tau * tau)).epsilon(1e-6));
    }
}

TEST_CASE("coincidence probability closed forms")
{
    const std::vector<double> one{1.0}, zero{0.0};
    CHECK(coincidence_probability(one, 1.0, 1.0, SingleSingle{})[0] == 0.0);
    CHECK(coincidence_probability(zero, 1.0, 1.0, SingleSingle{})[0] == doctest::Approx(0.5));
    CHECK(coincidence_probability(zero, 1.0, 1.0, SingleCoherent{1.0})[0] == doctest::Approx(0.75));
    CHECK(coincidence_probability(one, 1.0, 1.0, CoherentCoherent{1.0, 1.0})[0] == doctest::Approx(0.5));
    CHECK(coincidence_probability(zero, 0.5, 0.4, SingleSingle{})[0] == doctest::Approx(0.1));
    CHECK_THROWS_AS(coincidence_probability(std::vector<double>{1.1}, 1.0, 1.0, SingleSingle{}), InputError);
    CHECK_THROWS_AS(coincidence_probability(std::vector<double>{-0.1}, 1.0, 1.0, SingleSingle{}), InputError);
    CHECK_THROWS_AS(coincidence_probability(zero, 1.0, 1.0, SingleCoherent{0.0}), InputError);
    CHECK_THROWS_AS(coincidence_probability(zero, 1.0, 1.0, CoherentCoherent{1.0, -2.0}), InputError);
    CHECK_THROWS_AS(coincidence_probability(zero, 0.0, 1.0, SingleSingle{}), InputError);
}

TEST_CASE("normalized coincidence equals the ratio of coincidence probabilities")
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> mag(0.1, 3.0), vis(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial)
    {
        const StateCombination combos[] = {SingleSingle{}, SingleCoherent{mag(rng)}, CoherentCoherent{mag(rng), mag(rng)}};
        const double v = vis(rng);
        for (const auto &combo : combos)
        {
            const double p = coincidence_probability(std::vector<double>{v}, 0.7, 0.9, combo)[0];
            const double p_inf = coincidence_probability(std::vector<double>{0.0}, 0.7, 0.9, combo)[0];
            const DipPattern d = normalized_coincidence({0.0}, std::vector<double>{v}, combo);
            CHECK(d.nc[0] == doctest::Approx(p / p_inf).epsilon(1e-12));
        }
    }
}

TEST_CASE("normalized coincidence at full mode matching")
{
    const std::vector<double> one{1.0};
    CHECK(normalized_coincidence({0.0}, one, SingleSingle{}).nc[0] == 0.0);
    CHECK(normalized_coincidence({0.0}, one, CoherentCoherent{1.0, 1.0}).nc[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normalized_coincidence({0.0}, one, CoherentCoherent{2.5, 2.5}).nc[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normalized_coincidence({0.0}, one, SingleCoherent{1.0}).nc[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(visibility_factor(CoherentCoherent{1.0, 2.0}) == doctest::Approx(8.0 / 25.0).epsilon(1e-15));
    CHECK(normalized_coincidence({0.0}, one, CoherentCoherent{1.0, 2.0}).nc[0] == doctest::Approx(0.68).epsilon(1e-15));
    CHECK_THROWS_AS(normalized_coincidence({0.0}, std::vector<double>{1.5}, SingleSingle{}), InputError);
}

TEST_CASE("visibility factor bounds")
{
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> mag(0.01, 10.0);
    CHECK(visibility_factor(SingleSingle{}) == 1.0);
    for (int k = 0; k < 1000; ++k)
    {
        const double a = mag(rng), b = mag(rng);
        const double sc = visibility_factor(SingleCoherent{a});
        const double cc = visibility_factor(CoherentCoherent{a, b});
        CHECK((sc > 0.0 && sc < 1.0));
        CHECK((cc > 0.0 && cc <= 0.5 + 1e-15));
        CHECK(visibility_factor(CoherentCoherent{a, a}) == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(cc <= visibility_factor(CoherentCoherent{a, a}) + 1e-15);
    }
}

TEST_CASE("flat phase coherent dip bottoms at one half")
{
    const FrequencyGrid grid = fixture::grid(1024);
    const IntensitySpectrum I = fixture::spectrum(grid);
    const DipPattern dip = synthesize_dip(I, I, make_phase_preset("flat", grid, {}), CoherentCoherent{1.0, 1.0},
                                          fixture::uniform_delays(10.0, 0.25));
    const auto lowest = std::min_element(dip.nc.begin(), dip.nc.end());
    CHECK(*lowest == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(dip.delays[static_cast<std::size_t>(lowest - dip.nc.begin())] == 0.0);
    // Away from the centre the dip follows 1 - exp(-sigma^2 tau^2) / 2.
    const double sigma = thz_to_omega(fixture::kFwhmGhz * 1e-3) / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    for (std::size_t k = 0; k < dip.size(); k += 5)
    {
        const double st = sigma * dip.delays[k];
        CHECK(dip.nc[k] == doctest::Approx(1.0 - 0.5 * std::exp(-st * st)).epsilon(1e-9));
    }
}

TEST_CASE("linear phase translates the dip")
{
    const FrequencyGrid grid = fixture::grid(1024);
    const IntensitySpectrum I = fixture::spectrum(grid);
    const double tau0 = ps_to_s(1.37);
    PhasePresetParams lin;
    lin.center = grid.center();
    lin.slope = tau0;
    std::vector<double> delays{-3.1e-12, -1.37e-12, -0.2e-12, 0.0, 0.55e-12, 2.9e-12};
    std::vector<double> moved(delays);
    for (double &t : moved)
        t += tau0;
    const DipPattern shifted = synthesize_dip(I, I, make_phase_preset("linear", grid, lin), SingleSingle{}, delays);
    const DipPattern flat = synthesize_dip(I, I, make_phase_preset("flat", grid, {}), SingleSingle{}, moved);
    for (std::size_t k = 0; k < delays.size(); ++k)
        CHECK(shifted.nc[k] == doctest::Approx(flat.nc[k]).epsilon(1e-10));
    CHECK(shifted.nc[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
}

TEST_CASE("direct dip synthesis matches the grid transform on grid delays")
{
    const FrequencyGrid grid = fixture::grid(1024);
    const IntensitySpectrum I = fixture::spectrum(grid);
    const PhaseSpectrum psd = fixture::inverted_n(grid);
    const ModeMatching V = mode_matching(cross_spectral_density(I, I, psd));
    std::vector<double> delays, expected;
    for (std::size_t m = 480; m < 560; m += 3)
    {
        delays.push_back(V.grid.tau(m));
        expected.push_back(1.0 - 0.5 * V.values[m]);
    }
    const DipPattern dip = synthesize_dip(I, I, psd, CoherentCoherent{}, delays);
    for (std::size_t k = 0; k < delays.size(); ++k)
        CHECK(dip.nc[k] == doctest::Approx(expected[k]).epsilon(1e-12));
}

TEST_CASE("inverted-N phase makes the dip shallower, wider and asymmetric")
{
    const FrequencyGrid grid = fixture::grid(2048);
    const IntensitySpectrum I = fixture::spectrum(grid);
    const auto delays = fixture::uniform_delays(20.0, 0.1);
    const DipPattern flat = synthesize_dip(I, I, make_phase_preset("flat", grid, {}), SingleSingle{}, delays);
    const DipPattern shaped = synthesize_dip(I, I, fixture::inverted_n(grid), SingleSingle{}, delays);

    const double flat_min = *std::min_element(flat.nc.begin(), flat.nc.end());
    const double shaped_min = *std::min_element(shaped.nc.begin(), shaped.nc.end());
    CHECK(shaped_min > flat_min + 0.1);
    // The integral of V is phase independent, so a shallower dip must be wider.
    CHECK(equivalent_width(shaped) > 1.2 * equivalent_width(flat));
    // Summed over the whole delay window.
    const ModeMatching v_flat = mode_matching(cross_spectral_density(I, I, make_phase_preset("flat", grid, {})));
    const ModeMatching v_shaped = mode_matching(cross_spectral_density(I, I, fixture::inverted_n(grid)));
    const double area_flat = std::accumulate(v_flat.values.begin(), v_flat.values.end(), 0.0);
    const double area_shaped = std::accumulate(v_shaped.values.begin(), v_shaped.values.end(), 0.0);
    CHECK(area_shaped == doctest::Approx(area_flat).epsilon(1e-12));

    double asymmetry = 0.0;
    const std::size_t n = delays.size();
    for (std::size_t k = 0; k < n; ++k)
        asymmetry = std::max(asymmetry, std::abs(shaped.nc[k] - shaped.nc[n - 1 - k]));
    CHECK(asymmetry > 0.05);

    golden::check_csv("inverted_n_dip.csv", dip_csv(synthesize_dip(I, I, fixture::inverted_n(grid), CoherentCoherent{},
                                                                  fixture::measurement_delays())),
                      1e-12);
}

TEST_CASE("global phase leaves the mode matching unchanged")
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    const FrequencyGrid grid = fixture::grid(512);
    const IntensitySpectrum I = fixture::spectrum(grid);
    std::vector<double> phase(grid.size());
    for (double &p : phase)
        p = 0.3 * u(rng);
    const ModeMatching base = mode_matching(cross_spectral_density(I, I, PhaseSpectrum(grid, phase)));
    for (int trial = 0; trial < 5; ++trial)
    {
        const double c = 10.0 * u(rng);
        std::vector<double> moved(phase);
        for (double &p : moved)
            p += c;
        const ModeMatching V = mode_matching(cross_spectral_density(I, I, PhaseSpectrum(grid, moved)));
        for (std::size_t m = 0; m < V.values.size(); ++m)
            CHECK(std::abs(V.values[m] - base.values[m]) < 1e-12);
    }
}

TEST_CASE("point reflection with negation leaves |G| unchanged for symmetric |g|")
{
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const FrequencyGrid grid = fixture::grid(512);
    const IntensitySpectrum I = fixture::spectrum(grid);
    for (int trial = 0; trial < 5; ++trial)
    {
        // Random smooth phase: a few cosines with random frequencies and offsets.
        std::vector<double> phase(grid.size(), 0.0), reflected(grid.size(), 0.0);
        for (int c = 0; c < 4; ++c)
        {
            const double k = 3.0 * u(rng) / thz_to_omega(0.1), p0 = 3.0 * u(rng), a = u(rng);
            for (std::size_t i = 0; i < grid.size(); ++i)
            {
                phase[i] += a * std::cos(k * grid.offset(i) + p0);
                reflected[i] -= a * std::cos(-k * grid.offset(i) + p0);
            }
        }
        const ModeMatching A = mode_matching(cross_spectral_density(I, I, PhaseSpectrum(grid, phase)));
        const ModeMatching B = mode_matching(cross_spectral_density(I, I, PhaseSpectrum(grid, reflected)));
        for (std::size_t m = 0; m < A.values.size(); ++m)
            CHECK(std::abs(A.values[m] - B.values[m]) < 1e-12);
    }
}

TEST_CASE("dip returns to one at large delay")
{
    const FrequencyGrid grid = fixture::grid(1024);
    const IntensitySpectrum I = fixture::spectrum(grid);
    for (const StateCombination &combo : {StateCombination{SingleSingle{}}, StateCombination{SingleCoherent{0.7}},
                                          StateCombination{CoherentCoherent{1.0, 1.3}}})
    {
        // The inverted-N kinks leave slowly decaying tails, so only smooth phases are used here.
        PhasePresetParams chirp;
        chirp.center = grid.center();
        chirp.curvature = 2e-24;
        for (const PhaseSpectrum &psd : {make_phase_preset("flat", grid, {}), make_phase_preset("quadratic", grid, chirp)})
        {
            const DipPattern d = synthesize_dip(I, I, psd, combo, {-100e-12, -60e-12, 60e-12, 100e-12});
            for (double v : d.nc)
                CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("noiseless dips stay between 1 - f and 1")
{
    const FrequencyGrid grid = fixture::grid(512);
    const IntensitySpectrum I = fixture::spectrum(grid);
    const IntensitySpectrum J = fixture::spectrum(grid, fixture::kCenterThz + 0.03);
    const StateCombination combo = SingleCoherent{1.4};
    const DipPattern d = synthesize_dip(I, J, fixture::inverted_n(grid), combo, fixture::uniform_delays(15.0, 0.3));
    for (double v : d.nc)
        CHECK((v <= 1.0 + 1e-12 && v >= 1.0 - visibility_factor(combo) - 1e-12));
}

TEST_CASE("forward model rejects mismatched grids")
{
    const FrequencyGrid a = fixture::grid(256), b = fixture::grid(512);
    CHECK_THROWS_AS(spectral_magnitude(fixture::spectrum(a), fixture::spectrum(b)), InputError);
    CHECK_THROWS_AS(cross_spectral_density(fixture::spectrum(a), fixture::spectrum(a), fixture::inverted_n(b)), InputError);
    CHECK_THROWS_AS(IntensitySpectrum(a, std::vector<double>(256, 0.0)), InputError);
    CHECK_THROWS_AS(DipPattern({1.0, 0.5}, {1.0, 1.0}), InputError);
}

TEST_CASE("linear resampling with zero extension")
{
    const FrequencyGrid grid(10.0, 1.0, 8); // 6..13
    const std::vector<double> xs{7.5, 9.0, 11.0}, ys{1.0, 4.0, 0.0};
    const auto out = resample_linear(xs, ys, grid);
    const std::vector<double> expected{0.0, 0.0, 2.0, 4.0, 2.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < out.size(); ++i)
        CHECK(out[i] == doctest::Approx(expected[i]));
}
