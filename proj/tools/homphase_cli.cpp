// homphase: command-line front end for dip synthesis, counting simulation,
// phase retrieval, ensembles and preset phase generation.
//
// Exit status: 0 success, 2 invalid input, 3 numerical failure, 1 anything else.

#include "homphase/detector.hpp"
#include "homphase/ensemble.hpp"
#include "homphase/error.hpp"
#include "homphase/io.hpp"
#include "homphase/presets.hpp"
#include "homphase/retrieval.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace homphase;
using nlohmann::json;

namespace {

struct GridOptions
{
    std::optional<double> center_thz;
    double spacing_ghz = 4.0;
    std::size_t size = 2048;

    void attach(CLI::App *app)
    {
        app->add_option("--center-thz", center_thz, "Grid center frequency (THz); defaults to the spectra's center");
        app->add_option("--spacing-ghz", spacing_ghz, "Grid spacing (GHz)")->capture_default_str();
        app->add_option("--size", size, "Number of grid samples, a power of two")->capture_default_str();
    }

    FrequencyGrid make(double fallback_center_thz) const
    {
        return FrequencyGrid(thz_to_omega(center_thz.value_or(fallback_center_thz)), thz_to_omega(1e-3 * spacing_ghz),
                             size);
    }
};

// Either two spectrum files or one Gaussian shared by both arms.
struct SpectraOptions
{
    std::string file_a;
    std::string file_b;
    std::vector<double> gaussian; // center THz, FWHM GHz

    void attach(CLI::App *app)
    {
        auto *a = app->add_option("--spectrum-a", file_a, "Spectrum CSV of arm A (freq_thz,intensity)");
        auto *b = app->add_option("--spectrum-b", file_b, "Spectrum CSV of arm B (freq_thz,intensity)");
        auto *g = app->add_option("--gaussian", gaussian, "Gaussian spectra for both arms: CENTER_THZ FWHM_GHZ")
                      ->expected(2);
        a->needs(b);
        b->needs(a);
        g->excludes(a)->excludes(b);
    }

    struct Loaded
    {
        std::optional<SpectrumSamples> a, b;
        double center_thz = 0.0;
    };

    Loaded load() const
    {
        Loaded out;
        if (!file_a.empty())
        {
            out.a = read_spectrum_samples(file_a);
            out.b = read_spectrum_samples(file_b);
            check_overlap(*out.a, *out.b);
            out.center_thz = omega_to_thz(0.5 * (out.a->omega.front() + out.a->omega.back()));
        }
        else if (gaussian.size() == 2)
        {
            if (!(gaussian[1] > 0.0))
                throw InputError("--gaussian: FWHM must be positive");
            out.center_thz = gaussian[0];
        }
        else
        {
            throw InputError("give either --spectrum-a/--spectrum-b or --gaussian");
        }
        return out;
    }

    std::pair<IntensitySpectrum, IntensitySpectrum> on_grid(const Loaded &l, const FrequencyGrid &grid) const
    {
        if (l.a)
            return {resample_spectrum(*l.a, grid), resample_spectrum(*l.b, grid)};
        const IntensitySpectrum g = gaussian_spectrum(grid, thz_to_omega(gaussian[0]), thz_to_omega(1e-3 * gaussian[1]));
        return {g, g};
    }
};

struct ComboOptions
{
    std::string name = "coherent-coherent";
    double magnitude_1 = 1.0;
    double magnitude_2 = 1.0;

    void attach(CLI::App *app)
    {
        app->add_option("--combo", name, "single-single, single-coherent or coherent-coherent")->capture_default_str();
        app->add_option("--magnitude-1", magnitude_1, "|A| (single-coherent) or |A1| (coherent-coherent)")
            ->capture_default_str();
        app->add_option("--magnitude-2", magnitude_2, "|A2| (coherent-coherent)")->capture_default_str();
    }

    StateCombination make() const { return parse_combo(name, magnitude_1, magnitude_2); }
};

struct PresetOptions
{
    std::string name;
    std::optional<double> center_thz;
    double slope_ps = 0.0;
    double curvature_ps2 = 0.0;
    double amplitude = 1.0;
    double half_width_ghz = 0.0;
    std::string table;

    void attach(CLI::App *app, bool required)
    {
        auto *p = app->add_option("--preset", name, "flat, linear, quadratic, inverted-n or custom-table");
        if (required)
            p->required();
        app->add_option("--preset-center-thz", center_thz, "Reference frequency of the preset (THz)");
        app->add_option("--slope-ps", slope_ps, "Linear preset slope (rad per rad/ps)");
        app->add_option("--curvature-ps2", curvature_ps2, "Quadratic preset curvature (rad per (rad/ps)^2)");
        app->add_option("--amplitude", amplitude, "inverted-n amplitude (rad)")->capture_default_str();
        app->add_option("--half-width-ghz", half_width_ghz, "inverted-n outer half width (GHz)");
        app->add_option("--table", table, "custom-table CSV (freq_thz,phase_rad)")->check(CLI::ExistingFile);
    }

    PhaseSpectrum make(const FrequencyGrid &grid) const
    {
        PhasePresetParams p;
        p.center = center_thz ? thz_to_omega(*center_thz) : grid.center();
        p.slope = slope_ps * 1e-12;
        p.curvature = curvature_ps2 * 1e-24;
        p.amplitude = amplitude;
        p.half_width = thz_to_omega(1e-3 * half_width_ghz);
        if (name == "custom-table")
        {
            if (table.empty())
                throw InputError("custom-table needs --table");
            const PhaseSpectrum t = read_psd(table, grid);
            return t;
        }
        return make_phase_preset(name, grid, p);
    }
};

std::vector<double> parse_delays(const std::string &spec)
{
    json j;
    if (spec.find(':') != std::string::npos)
    {
        std::vector<double> parts;
        std::size_t start = 0;
        while (true)
        {
            const std::size_t colon = spec.find(':', start);
            parts.push_back(parse_number(spec.substr(start, colon == std::string::npos ? colon : colon - start), "--delays-ps"));
            if (colon == std::string::npos)
                break;
            start = colon + 1;
        }
        if (parts.size() != 3)
            throw InputError("--delays-ps: expected START:STOP:STEP");
        j = {{"start_ps", parts[0]}, {"stop_ps", parts[1]}, {"step_ps", parts[2]}};
    }
    else
    {
        j = json::array();
        std::size_t start = 0;
        while (true)
        {
            const std::size_t comma = spec.find(',', start);
            j.push_back(parse_number(spec.substr(start, comma == std::string::npos ? comma : comma - start), "--delays-ps"));
            if (comma == std::string::npos)
                break;
            start = comma + 1;
        }
    }
    return delays_from_json(j);
}

json read_json(const std::string &path)
{
    const std::string text = read_text(path);
    try
    {
        return json::parse(text);
    }
    catch (const json::parse_error &e)
    {
        throw InputError(path + ": " + e.what());
    }
}

// simulate ------------------------------------------------------------------

struct SimulateCommand
{
    SpectraOptions spectra;
    GridOptions grid;
    ComboOptions combo;
    PresetOptions preset;
    std::string psd_file;
    std::string delays;
    std::string budget_file;
    bool default_budget = false;
    std::optional<double> duration_s;
    std::optional<double> baseline_multiple;
    std::optional<std::uint64_t> seed;
    std::string out_dir;

    void attach(CLI::App *app)
    {
        spectra.attach(app);
        grid.attach(app);
        combo.attach(app);
        preset.attach(app, false);
        app->add_option("--psd", psd_file, "Phase spectrum difference CSV (freq_thz,phase_rad)")
            ->check(CLI::ExistingFile);
        app->add_option("--delays-ps", delays, "START:STOP:STEP or a comma-separated list (ps)")->required();
        auto *bf = app->add_option("--budget", budget_file, "Counting budget JSON; enables shot-noise simulation")
                       ->check(CLI::ExistingFile);
        auto *pb = app->add_flag("--default-budget", default_budget, "Simulate counts with the default budget");
        bf->excludes(pb);
        app->add_option("--duration-s", duration_s, "Override the counting time per delay (s)");
        app->add_option("--baseline-multiple", baseline_multiple,
                        "Reference delays lie beyond this multiple of the dip half-width");
        app->add_option("--seed", seed, "Seed for the counting simulation (required with a budget)");
        app->add_option("--out", out_dir, "Output directory")->required();
    }

    int run() const
    {
        const auto loaded = spectra.load();
        const FrequencyGrid g = grid.make(loaded.center_thz);
        const auto [i1, i2] = spectra.on_grid(loaded, g);
        const StateCombination c = combo.make();
        if (psd_file.empty() == preset.name.empty())
            throw InputError("give exactly one of --psd and --preset");
        const PhaseSpectrum psd = psd_file.empty() ? preset.make(g) : read_psd(psd_file, g);
        const std::vector<double> taus = parse_delays(delays);

        std::optional<CountingBudget> budget;
        if (!budget_file.empty())
            budget = budget_from_json(read_json(budget_file));
        else if (default_budget)
            budget = CountingBudget{};
        if ((duration_s || baseline_multiple) && !budget)
            throw InputError("--duration-s and --baseline-multiple need --budget or --default-budget");
        if (duration_s)
            budget->duration_per_point = *duration_s;
        if (baseline_multiple)
            budget->baseline_halfwidth_multiple = *baseline_multiple;
        if (budget)
        {
            if (!seed)
                throw InputError("--seed is required when simulating counts");
            budget->seed = *seed;
            budget->validate();
        }

        OutputSet out(out_dir);
        const DipPattern dip = synthesize_dip(i1, i2, psd, c, taus);
        out.add("dip_true.csv", dip_csv(dip));
        out.add("psd_true.csv", psd_csv(psd));
        json info = {{"combo", combo_name(c)}, {"delays", dip.size()}};
        if (budget)
        {
            const CountRecord rec = simulate_counts(dip, *budget, c);
            const DipPattern measured = estimate_dip(rec);
            out.add("dip_measured.csv", dip_csv(measured, rec));
            json refs = json::array();
            for (std::size_t i = 0; i < rec.delays.size(); ++i)
            {
                if (rec.is_reference[i])
                    refs.push_back(s_to_ps(rec.delays[i]));
            }
            info["budget"] = to_json(*budget);
            info["pulses_per_point"] = rec.pulses_per_point;
            info["baseline_coincidences"] = rec.baseline_coincidences;
            info["reference_delays_ps"] = refs;
        }
        out.add("simulation.json", info.dump(2) + "\n");
        out.commit();
        return 0;
    }
};

// retrieve ------------------------------------------------------------------

struct RetrieveCommand
{
    SpectraOptions spectra;
    GridOptions grid;
    ComboOptions combo;
    std::string dip_file;
    std::string config_file;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> restarts;
    std::string out_dir;

    void attach(CLI::App *app)
    {
        spectra.attach(app);
        grid.attach(app);
        combo.attach(app);
        app->add_option("--dip", dip_file, "Dip CSV (delay_ps,nc[,stderr])")->required()->check(CLI::ExistingFile);
        app->add_option("--config", config_file, "Retrieval configuration JSON")->check(CLI::ExistingFile);
        app->add_option("--seed", seed, "Seed for the random restarts")->required();
        app->add_option("--restarts", restarts, "Number of random restarts");
        app->add_option("--out", out_dir, "Output directory")->required();
    }

    int run() const
    {
        const auto loaded = spectra.load();
        const FrequencyGrid g = grid.make(loaded.center_thz);
        const auto [i1, i2] = spectra.on_grid(loaded, g);
        const StateCombination c = combo.make();
        const DipPattern dip = read_dip(dip_file);
        if (dip.size() < 16)
            throw InputError(dip_file + ": retrieval needs at least 16 delay points, found " +
                             std::to_string(dip.size()));
        RetrievalConfig config = config_file.empty() ? RetrievalConfig{}
                                                     : retrieval_config_from_json(read_json(config_file));
        config.seed = *seed;
        if (restarts)
            config.restarts = *restarts;
        config.validate();

        const RetrievalResult r = run_retrieval(SpectralMagnitude::from_spectra(i1, i2), dip, c, config);

        json restart_residuals = r.restart_residuals;
        const json diagnostics = {{"flipped", r.flipped},
                                  {"ambiguous", r.ambiguous},
                                  {"fitted_amplitude", r.fitted_amplitude},
                                  {"winning_restart", r.restart_index},
                                  {"residual", r.residual},
                                  {"alternate_residual", r.alternate_residual},
                                  {"delay_offset_ps", s_to_ps(r.delay_offset)},
                                  {"flip_center_thz", omega_to_thz(r.flip_center)},
                                  {"restart_residuals", restart_residuals},
                                  {"combo", combo_name(c)},
                                  {"config", to_json(config)}};
        OutputSet out(out_dir);
        out.add("psd.csv", psd_csv(r.psd));
        out.add("residual_history.csv", residual_history_csv(r.residual_history));
        out.add("diagnostics.json", diagnostics.dump(2) + "\n");
        out.commit();
        return 0;
    }
};

// ensemble ------------------------------------------------------------------

struct EnsembleCommand
{
    std::string spec_file;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n_runs;
    std::optional<std::size_t> threads;
    std::string out_dir;

    void attach(CLI::App *app)
    {
        app->add_option("--spec", spec_file, "Ensemble JSON")->required()->check(CLI::ExistingFile);
        app->add_option("--seed", seed, "Base seed; run j uses seed ^ j")->required();
        app->add_option("--runs", n_runs, "Override the number of runs");
        app->add_option("--threads", threads, "Worker threads (0: all hardware threads)");
        app->add_option("--out", out_dir, "Output directory")->required();
    }

    int run() const
    {
        EnsembleSpec spec = ensemble_spec_from_json(read_json(spec_file), fs::path(spec_file).parent_path());
        spec.base_seed = *seed;
        if (n_runs)
            spec.n_runs = *n_runs;
        if (threads)
            spec.threads = *threads;
        spec.validate();

        const PhaseDistribution dist = run_ensemble(spec);
        const double coverage = coverage_statistic(dist, dist.reference, 0.1, spec.band);
        for (const auto &f : dist.failures)
            std::cerr << "run " << f.run << " failed: " << f.message << '\n';

        OutputSet out(out_dir);
        out.add("heatmap.csv", heatmap_csv(dist));
        out.add("quantiles.csv", quantiles_csv(dist));
        out.add("summary.json", summary_json(dist, spec, coverage).dump(2) + "\n");
        out.commit();
        std::cout << "runs " << dist.n_runs() << "/" << spec.n_runs << ", coverage at 0.1 rad " << coverage << '\n';
        return 0;
    }
};

// gen-phase -----------------------------------------------------------------

struct GenPhaseCommand
{
    GridOptions grid;
    PresetOptions preset;
    std::string out_file;

    void attach(CLI::App *app)
    {
        grid.attach(app);
        preset.attach(app, true);
        app->add_option("--out", out_file, "Output CSV")->required();
    }

    int run() const
    {
        if (!grid.center_thz)
            throw InputError("gen-phase needs --center-thz");
        const FrequencyGrid g = grid.make(*grid.center_thz);
        const PhaseSpectrum psd = preset.make(g);
        const fs::path path(out_file);
        OutputSet out(path.has_parent_path() ? path.parent_path() : fs::path("."));
        out.add(path.filename().string(), psd_csv(psd));
        out.commit();
        return 0;
    }
};

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Phase spectrum difference from Hong-Ou-Mandel dips"};
    app.require_subcommand(1);

    SimulateCommand simulate;
    RetrieveCommand retrieve;
    EnsembleCommand ensemble;
    GenPhaseCommand gen_phase;
    auto *sim_app = app.add_subcommand("simulate", "Synthesize a dip and optionally simulate photon counting");
    auto *ret_app = app.add_subcommand("retrieve", "Reconstruct the phase spectrum difference from a dip");
    auto *ens_app = app.add_subcommand("ensemble", "Run a seeded simulate-and-retrieve ensemble");
    auto *gen_app = app.add_subcommand("gen-phase", "Write a preset phase function on a grid");
    simulate.attach(sim_app);
    retrieve.attach(ret_app);
    ensemble.attach(ens_app);
    gen_phase.attach(gen_app);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return 2;
    }

    try
    {
        if (sim_app->parsed())
            return simulate.run();
        if (ret_app->parsed())
            return retrieve.run();
        if (ens_app->parsed())
            return ensemble.run();
        return gen_phase.run();
    }
    catch (const InputError &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    catch (const NumericalError &e)
    {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    }
    catch (const std::exception &e)
    {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return 1;
    }
}
