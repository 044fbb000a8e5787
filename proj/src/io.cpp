#include "homphase/io.hpp"

#include "homphase/error.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

namespace homphase {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s)
{
    const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r'; };
    while (!s.empty() && !not_space(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && !not_space(s.back()))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line)
{
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true)
    {
        const std::size_t comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return cells;
}

std::string where(const std::string &source, std::size_t line) { return source + ":" + std::to_string(line); }

[[noreturn]] void fail_at(const CsvTable &t, std::size_t row, const std::string &message)
{
    throw InputError(where(t.source, t.line_numbers[row]) + ": " + message);
}

std::string span_text(const SpectrumSamples &s)
{
    return s.source + " spans [" + format_converted(omega_to_thz(s.omega.front())) + ", " +
           format_converted(omega_to_thz(s.omega.back())) + "] THz";
}

void reject_unknown_keys(const json &j, const std::set<std::string> &allowed, const std::string &what)
{
    if (!j.is_object())
        throw InputError(what + ": expected a JSON object");
    for (const auto &[key, value] : j.items())
    {
        if (!allowed.contains(key))
            throw InputError(what + ": unknown key '" + key + "'");
    }
}

template <class T> T get_as(const json &j, const std::string &key, const std::string &what)
{
    try
    {
        return j.at(key).get<T>();
    }
    catch (const json::exception &)
    {
        throw InputError(what + ": key '" + key + "' is missing or has the wrong type");
    }
}

template <class T> void read_if(const json &j, const std::string &key, T &target, const std::string &what)
{
    if (j.contains(key))
        target = get_as<T>(j, key, what);
}

} // namespace

// Unit-converted quantities (THz, ps) are printed with 15 significant digits so that a value read from
// a file and converted back prints as it was read.
std::string format_converted(double x)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 15);
    return std::string(buf, res.ptr);
}

std::string format_number(double x)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_number(std::string_view text, const std::string &context)
{
    text = trim(text);
    if (!text.empty() && text.front() == '+')
        text.remove_prefix(1);
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw InputError(context + ": cannot parse '" + std::string(text) + "' as a number");
    if (!std::isfinite(value))
        throw InputError(context + ": value '" + std::string(text) + "' is not finite");
    return value;
}

std::optional<std::size_t> CsvTable::find(std::string_view name) const
{
    for (std::size_t i = 0; i < columns.size(); ++i)
    {
        if (columns[i] == name)
            return i;
    }
    return std::nullopt;
}

std::size_t CsvTable::require(std::string_view name) const
{
    if (auto i = find(name))
        return *i;
    throw InputError(source + ": missing column '" + std::string(name) + "'");
}

std::vector<double> CsvTable::column(std::size_t index) const
{
    std::vector<double> out(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        out[r] = rows[r][index];
    return out;
}

CsvTable parse_csv(std::string_view text, const std::string &source, const std::vector<std::string> &optional_columns)
{
    CsvTable table;
    table.source = source;
    std::vector<bool> optional;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool have_header = false;
    while (pos <= text.size())
    {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        const std::string_view line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty() || line.front() == '#')
            continue;
        const auto cells = split_commas(line);
        if (!have_header)
        {
            for (auto c : cells)
            {
                if (c.empty())
                    throw InputError(where(source, line_no) + ": empty column name in header");
                table.columns.emplace_back(c);
                optional.push_back(std::find(optional_columns.begin(), optional_columns.end(), c) !=
                                   optional_columns.end());
            }
            have_header = true;
            continue;
        }
        if (cells.size() != table.columns.size())
            throw InputError(where(source, line_no) + ": expected " + std::to_string(table.columns.size()) +
                             " fields, found " + std::to_string(cells.size()));
        std::vector<double> row(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c)
        {
            if (cells[c].empty())
            {
                if (!optional[c])
                    throw InputError(where(source, line_no) + ": empty value in column '" + table.columns[c] + "'");
                row[c] = std::nan("");
                continue;
            }
            row[c] = parse_number(cells[c], where(source, line_no));
        }
        table.rows.push_back(std::move(row));
        table.line_numbers.push_back(line_no);
    }
    if (!have_header)
        throw InputError(source + ": no header row");
    return table;
}

std::string read_text(const fs::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError(path.string() + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CsvTable read_csv(const fs::path &path, const std::vector<std::string> &optional_columns)
{
    return parse_csv(read_text(path), path.string(), optional_columns);
}

void OutputSet::add(const std::string &name, std::string content) { files_[name] = std::move(content); }

void OutputSet::commit() const
{
    std::error_code ec;
    fs::create_directories(directory_, ec);
    if (ec)
        throw InputError(directory_.string() + ": cannot create output directory: " + ec.message());

    std::vector<std::pair<fs::path, fs::path>> staged;
    auto discard = [&] {
        for (const auto &[tmp, final_path] : staged)
            fs::remove(tmp, ec);
    };
    for (const auto &[name, content] : files_)
    {
        const fs::path final_path = directory_ / name;
        const fs::path tmp = directory_ / ("." + name + ".partial");
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (out)
        {
            out << content;
            out.close();
        }
        staged.emplace_back(tmp, final_path);
        if (!out)
        {
            discard();
            throw InputError(final_path.string() + ": cannot write file");
        }
    }
    for (const auto &[tmp, final_path] : staged)
    {
        fs::rename(tmp, final_path, ec);
        if (ec)
        {
            discard();
            throw InputError(final_path.string() + ": cannot move output into place: " + ec.message());
        }
    }
}

SpectrumSamples read_spectrum_samples(const fs::path &path)
{
    const CsvTable t = read_csv(path);
    const std::size_t fc = t.require("freq_thz");
    const std::size_t ic = t.require("intensity");
    if (t.rows.size() < 2)
        throw InputError(path.string() + ": a spectrum needs at least two rows");
    SpectrumSamples s;
    s.source = path.string();
    for (std::size_t r = 0; r < t.rows.size(); ++r)
    {
        const double f = t.rows[r][fc];
        const double v = t.rows[r][ic];
        if (!(f > 0.0))
            fail_at(t, r, "frequency must be positive");
        if (v < 0.0)
            fail_at(t, r, "intensity must be nonnegative");
        const double w = thz_to_omega(f);
        if (!s.omega.empty() && !(w > s.omega.back()))
            fail_at(t, r, "frequencies must be strictly increasing");
        s.omega.push_back(w);
        s.intensity.push_back(v);
    }
    if (std::all_of(s.intensity.begin(), s.intensity.end(), [](double v) { return v == 0.0; }))
        throw InputError(path.string() + ": intensity is zero everywhere");
    return s;
}

IntensitySpectrum resample_spectrum(const SpectrumSamples &samples, const FrequencyGrid &grid)
{
    if (samples.omega.back() < grid.lowest() || samples.omega.front() > grid.highest())
        throw InputError(span_text(samples) + " but the grid spans [" + format_converted(omega_to_thz(grid.lowest())) +
                         ", " + format_converted(omega_to_thz(grid.highest())) + "] THz; they do not overlap");
    std::vector<double> v = resample_linear(samples.omega, samples.intensity, grid);
    if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }))
        throw InputError(samples.source + ": no intensity falls on a grid frequency; refine the grid");
    return IntensitySpectrum(grid, std::move(v));
}

void check_overlap(const SpectrumSamples &a, const SpectrumSamples &b)
{
    if (a.omega.back() < b.omega.front() || b.omega.back() < a.omega.front())
        throw InputError("inconsistent spectra: " + span_text(a) + " and " + span_text(b) + "; they do not overlap");
}

std::string spectrum_csv(const IntensitySpectrum &spectrum)
{
    std::string out = "freq_thz,intensity\n";
    for (std::size_t i = 0; i < spectrum.grid.size(); ++i)
        out += format_converted(omega_to_thz(spectrum.grid.omega(i))) + ',' + format_number(spectrum.values[i]) + '\n';
    return out;
}

std::string psd_csv(const PhaseSpectrum &psd)
{
    std::string out = "freq_thz,phase_rad\n";
    for (std::size_t i = 0; i < psd.grid.size(); ++i)
        out += format_converted(omega_to_thz(psd.grid.omega(i))) + ',' + format_number(psd.values[i]) + '\n';
    return out;
}

PhaseSpectrum read_psd(const fs::path &path, const FrequencyGrid &grid)
{
    const CsvTable t = read_csv(path);
    const std::size_t fc = t.require("freq_thz");
    const std::size_t pc = t.require("phase_rad");
    if (t.rows.empty())
        throw InputError(path.string() + ": no phase rows");
    PhasePresetParams params;
    for (std::size_t r = 0; r < t.rows.size(); ++r)
    {
        const double w = thz_to_omega(t.rows[r][fc]);
        if (!params.table_omega.empty() && !(w > params.table_omega.back()))
            fail_at(t, r, "frequencies must be strictly increasing");
        params.table_omega.push_back(w);
        params.table_phase.push_back(t.rows[r][pc]);
    }
    return make_phase_preset("custom-table", grid, params);
}

std::string dip_csv(const DipPattern &dip)
{
    std::string out = "delay_ps,nc,stderr\n";
    for (std::size_t i = 0; i < dip.size(); ++i)
    {
        out += format_converted(s_to_ps(dip.delays[i])) + ',' + format_number(dip.nc[i]) + ',';
        if (dip.std_errors)
            out += format_number((*dip.std_errors)[i]);
        out += '\n';
    }
    return out;
}

std::string dip_csv(const DipPattern &dip, const CountRecord &record)
{
    if (record.delays.size() != dip.size())
        throw InputError("dip and count record have different lengths");
    std::string out = "delay_ps,nc,stderr,counts_a,counts_b,coincidences\n";
    for (std::size_t i = 0; i < dip.size(); ++i)
    {
        out += format_converted(s_to_ps(dip.delays[i])) + ',' + format_number(dip.nc[i]) + ',';
        if (dip.std_errors)
            out += format_number((*dip.std_errors)[i]);
        out += ',' + std::to_string(record.counts_a[i]) + ',' + std::to_string(record.counts_b[i]) + ',' +
               std::to_string(record.coincidences[i]) + '\n';
    }
    return out;
}

DipPattern read_dip(const fs::path &path)
{
    const CsvTable t = read_csv(path, {"stderr"});
    const std::size_t dc = t.require("delay_ps");
    const std::size_t nc = t.require("nc");
    const std::optional<std::size_t> sc = t.find("stderr");
    if (t.rows.empty())
        throw InputError(path.string() + ": no dip rows");

    std::vector<double> delays, values, errors;
    std::size_t with_error = 0;
    for (std::size_t r = 0; r < t.rows.size(); ++r)
    {
        const double d = ps_to_s(t.rows[r][dc]);
        const double v = t.rows[r][nc];
        if (!delays.empty() && !(d > delays.back()))
            fail_at(t, r, "delays must be strictly increasing");
        if (v < 0.0)
            fail_at(t, r, "normalized coincidence must be nonnegative");
        delays.push_back(d);
        values.push_back(v);
        if (sc)
        {
            const double e = t.rows[r][*sc];
            if (!std::isnan(e))
            {
                if (e < 0.0)
                    fail_at(t, r, "standard error must be nonnegative");
                ++with_error;
            }
            errors.push_back(e);
        }
    }
    if (with_error == 0)
        return DipPattern(std::move(delays), std::move(values));
    if (with_error != errors.size())
        throw InputError(path.string() + ": stderr must be given on every row or on none");
    return DipPattern(std::move(delays), std::move(values), std::move(errors));
}

std::string residual_history_csv(const std::vector<double> &history)
{
    std::string out = "iteration,residual\n";
    for (std::size_t k = 0; k < history.size(); ++k)
        out += std::to_string(k) + ',' + format_number(history[k]) + '\n';
    return out;
}

RetrievalConfig retrieval_config_from_json(const json &j, RetrievalConfig c)
{
    const std::string what = "retrieval config";
    reject_unknown_keys(j,
                        {"gs_iterations", "gp_iterations", "adapted_iterations", "gp_step_size", "gp_max_halvings",
                         "adapted_threshold_fraction", "restarts", "seed", "convergence_tolerance",
                         "intensity_mask_fraction", "consistency_tolerance", "cluster_distance", "ambiguity_tolerance"},
                        what);
    read_if(j, "gs_iterations", c.gs_iterations, what);
    read_if(j, "gp_iterations", c.gp_iterations, what);
    read_if(j, "adapted_iterations", c.adapted_iterations, what);
    read_if(j, "gp_step_size", c.gp_step_size, what);
    read_if(j, "gp_max_halvings", c.gp_max_halvings, what);
    read_if(j, "adapted_threshold_fraction", c.adapted_threshold_fraction, what);
    read_if(j, "restarts", c.restarts, what);
    read_if(j, "seed", c.seed, what);
    read_if(j, "convergence_tolerance", c.convergence_tolerance, what);
    read_if(j, "intensity_mask_fraction", c.intensity_mask_fraction, what);
    read_if(j, "consistency_tolerance", c.consistency_tolerance, what);
    read_if(j, "cluster_distance", c.cluster_distance, what);
    read_if(j, "ambiguity_tolerance", c.ambiguity_tolerance, what);
    c.validate();
    return c;
}

json to_json(const RetrievalConfig &c)
{
    return {{"gs_iterations", c.gs_iterations},
            {"gp_iterations", c.gp_iterations},
            {"adapted_iterations", c.adapted_iterations},
            {"gp_step_size", c.gp_step_size},
            {"gp_max_halvings", c.gp_max_halvings},
            {"adapted_threshold_fraction", c.adapted_threshold_fraction},
            {"restarts", c.restarts},
            {"seed", c.seed},
            {"convergence_tolerance", c.convergence_tolerance},
            {"intensity_mask_fraction", c.intensity_mask_fraction},
            {"consistency_tolerance", c.consistency_tolerance},
            {"cluster_distance", c.cluster_distance},
            {"ambiguity_tolerance", c.ambiguity_tolerance}};
}

CountingBudget budget_from_json(const json &j, CountingBudget b)
{
    const std::string what = "budget";
    reject_unknown_keys(j,
                        {"repetition_rate_hz", "single_rate_hz", "duration_s", "dead_time_s", "use_dead_time",
                         "baseline_noise", "baseline_halfwidth_multiple", "seed"},
                        what);
    read_if(j, "repetition_rate_hz", b.repetition_rate, what);
    read_if(j, "single_rate_hz", b.single_rate_target, what);
    read_if(j, "duration_s", b.duration_per_point, what);
    read_if(j, "dead_time_s", b.dead_time, what);
    read_if(j, "use_dead_time", b.use_dead_time, what);
    read_if(j, "baseline_noise", b.baseline_noise, what);
    read_if(j, "baseline_halfwidth_multiple", b.baseline_halfwidth_multiple, what);
    read_if(j, "seed", b.seed, what);
    b.validate();
    return b;
}

json to_json(const CountingBudget &b)
{
    return {{"repetition_rate_hz", b.repetition_rate},
            {"single_rate_hz", b.single_rate_target},
            {"duration_s", b.duration_per_point},
            {"dead_time_s", b.dead_time},
            {"use_dead_time", b.use_dead_time},
            {"baseline_noise", b.baseline_noise},
            {"baseline_halfwidth_multiple", b.baseline_halfwidth_multiple},
            {"seed", b.seed}};
}

StateCombination parse_combo(const std::string &name, double magnitude_1, double magnitude_2)
{
    StateCombination combo;
    if (name == "single-single")
        combo = SingleSingle{};
    else if (name == "single-coherent")
        combo = SingleCoherent{magnitude_1};
    else if (name == "coherent-coherent")
        combo = CoherentCoherent{magnitude_1, magnitude_2};
    else
        throw InputError("unknown state combination '" + name +
                         "' (expected single-single, single-coherent or coherent-coherent)");
    validate(combo);
    return combo;
}

StateCombination combo_from_json(const json &j)
{
    const std::string what = "combo";
    if (j.is_string())
        return parse_combo(j.get<std::string>(), 1.0, 1.0);
    reject_unknown_keys(j, {"type", "magnitude", "magnitude_1", "magnitude_2"}, what);
    const auto type = get_as<std::string>(j, "type", what);
    double m1 = 1.0, m2 = 1.0;
    read_if(j, "magnitude", m1, what);
    read_if(j, "magnitude_1", m1, what);
    read_if(j, "magnitude_2", m2, what);
    return parse_combo(type, m1, m2);
}

std::string combo_name(const StateCombination &combo)
{
    if (std::holds_alternative<SingleSingle>(combo))
        return "single-single";
    if (std::holds_alternative<SingleCoherent>(combo))
        return "single-coherent";
    return "coherent-coherent";
}

FrequencyGrid grid_from_json(const json &j)
{
    const std::string what = "grid";
    reject_unknown_keys(j, {"center_thz", "spacing_ghz", "size"}, what);
    return FrequencyGrid(thz_to_omega(get_as<double>(j, "center_thz", what)),
                         thz_to_omega(1e-3 * get_as<double>(j, "spacing_ghz", what)),
                         get_as<std::size_t>(j, "size", what));
}

std::pair<std::string, PhasePresetParams> preset_from_json(const json &j)
{
    const std::string what = "phase preset";
    reject_unknown_keys(j, {"preset", "center_thz", "slope_ps", "curvature_ps2", "amplitude", "half_width_ghz", "table"},
                        what);
    PhasePresetParams p;
    const auto name = get_as<std::string>(j, "preset", what);
    if (j.contains("center_thz"))
        p.center = thz_to_omega(get_as<double>(j, "center_thz", what));
    if (j.contains("slope_ps"))
        p.slope = get_as<double>(j, "slope_ps", what) * 1e-12;
    if (j.contains("curvature_ps2"))
        p.curvature = get_as<double>(j, "curvature_ps2", what) * 1e-24;
    read_if(j, "amplitude", p.amplitude, what);
    if (j.contains("half_width_ghz"))
        p.half_width = thz_to_omega(1e-3 * get_as<double>(j, "half_width_ghz", what));
    if (j.contains("table"))
    {
        const auto table = get_as<std::vector<std::array<double, 2>>>(j, "table", what);
        for (const auto &[thz, rad] : table)
        {
            p.table_omega.push_back(thz_to_omega(thz));
            p.table_phase.push_back(rad);
        }
    }
    return {name, p};
}

std::vector<double> delays_from_json(const json &j)
{
    const std::string what = "delays";
    std::vector<double> ps;
    if (j.is_array())
    {
        try
        {
            ps = j.get<std::vector<double>>();
        }
        catch (const json::exception &)
        {
            throw InputError(what + ": expected an array of numbers");
        }
    }
    else
    {
        reject_unknown_keys(j, {"start_ps", "stop_ps", "step_ps"}, what);
        const double start = get_as<double>(j, "start_ps", what);
        const double stop = get_as<double>(j, "stop_ps", what);
        const double step = get_as<double>(j, "step_ps", what);
        if (!(step > 0.0) || !(stop >= start))
            throw InputError(what + ": need step_ps > 0 and stop_ps >= start_ps");
        const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        if (count > 1000000)
            throw InputError(what + ": range produces too many delays");
        for (std::size_t k = 0; k < count; ++k)
            ps.push_back(start + static_cast<double>(k) * step);
    }
    std::vector<double> s;
    for (double x : ps)
    {
        if (!std::isfinite(x))
            throw InputError(what + ": delays must be finite");
        if (!s.empty() && !(ps_to_s(x) > s.back()))
            throw InputError(what + ": delays must be strictly increasing");
        s.push_back(ps_to_s(x));
    }
    if (s.empty())
        throw InputError(what + ": no delays");
    return s;
}

EnsembleSpec ensemble_spec_from_json(const json &j, const fs::path &base)
{
    const std::string what = "ensemble spec";
    reject_unknown_keys(j,
                        {"n_runs", "base_seed", "threads", "bin_width_rad", "grid", "spectra", "psd", "combo",
                         "delays", "budget", "retrieval", "band_thz"},
                        what);
    const FrequencyGrid grid = grid_from_json(get_as<json>(j, "grid", what));

    const json spectra = get_as<json>(j, "spectra", what);
    std::vector<IntensitySpectrum> intensities;
    if (spectra.contains("files"))
    {
        reject_unknown_keys(spectra, {"files"}, "spectra");
        const auto files = get_as<std::vector<std::string>>(spectra, "files", "spectra");
        if (files.size() != 2)
            throw InputError("spectra: 'files' needs exactly two paths");
        const auto a = read_spectrum_samples(base / files[0]);
        const auto b = read_spectrum_samples(base / files[1]);
        check_overlap(a, b);
        intensities.push_back(resample_spectrum(a, grid));
        intensities.push_back(resample_spectrum(b, grid));
    }
    else
    {
        reject_unknown_keys(spectra, {"gaussian"}, "spectra");
        json g = get_as<json>(spectra, "gaussian", "spectra");
        std::vector<json> each = g.is_array() ? g.get<std::vector<json>>() : std::vector<json>{g, g};
        if (each.size() != 2)
            throw InputError("spectra: 'gaussian' needs one object or an array of two");
        for (const json &e : each)
        {
            reject_unknown_keys(e, {"center_thz", "fwhm_ghz"}, "gaussian spectrum");
            intensities.push_back(gaussian_spectrum(grid, thz_to_omega(get_as<double>(e, "center_thz", "gaussian spectrum")),
                                                    thz_to_omega(1e-3 * get_as<double>(e, "fwhm_ghz", "gaussian spectrum"))));
        }
    }

    const json psd = get_as<json>(j, "psd", what);
    PhaseSpectrum truth = [&] {
        if (psd.contains("file"))
        {
            reject_unknown_keys(psd, {"file"}, "psd");
            return read_psd(base / get_as<std::string>(psd, "file", "psd"), grid);
        }
        const auto [name, params] = preset_from_json(psd);
        return make_phase_preset(name, grid, params);
    }();

    EnsembleSpec spec{.scenario = {intensities[0], intensities[1], std::move(truth),
                                   j.contains("combo") ? combo_from_json(j.at("combo")) : StateCombination{CoherentCoherent{}},
                                   delays_from_json(get_as<json>(j, "delays", what))}};
    read_if(j, "n_runs", spec.n_runs, what);
    read_if(j, "base_seed", spec.base_seed, what);
    read_if(j, "threads", spec.threads, what);
    read_if(j, "bin_width_rad", spec.bin_width, what);
    if (j.contains("budget"))
        spec.budget = budget_from_json(j.at("budget"));
    if (j.contains("retrieval"))
        spec.retrieval = retrieval_config_from_json(j.at("retrieval"));
    const auto band = get_as<std::array<double, 2>>(j, "band_thz", what);
    spec.band = {thz_to_omega(band[0]), thz_to_omega(band[1])};
    spec.validate();
    return spec;
}

json summary_json(const PhaseDistribution &dist, const EnsembleSpec &spec, double coverage)
{
    json failures = json::array();
    for (const auto &f : dist.failures)
        failures.push_back({{"run", f.run}, {"message", f.message}});
    return {{"runs_requested", spec.n_runs},
            {"runs_completed", dist.n_runs()},
            {"failures", dist.failures.size()},
            {"failed_runs", failures},
            {"coverage_halfwidth_rad", 0.1},
            {"coverage", coverage},
            {"band_thz", {omega_to_thz(spec.band.low), omega_to_thz(spec.band.high)}},
            {"bin_width_rad", dist.bin_width},
            {"engine_orientation_matches", dist.engine_orientation_matches},
            {"ambiguous_runs", dist.ambiguous_runs},
            {"base_seed", spec.base_seed},
            {"combo", combo_name(spec.scenario.combo)},
            {"budget", to_json(spec.budget)},
            {"retrieval", to_json(spec.retrieval)}};
}

} // namespace homphase
