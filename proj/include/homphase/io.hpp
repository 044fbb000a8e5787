#pragma once

#include "homphase/detector.hpp"
#include "homphase/ensemble.hpp"
#include "homphase/presets.hpp"
#include "homphase/retrieval.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace homphase {

namespace fs = std::filesystem;

/// Shortest decimal text that parses back to the same double.
std::string format_number(double x);

/// 15 significant digits, for values converted to THz or ps before printing.
std::string format_converted(double x);

/// Parses a whole field as a double; `where` prefixes the error message.
double parse_number(std::string_view text, const std::string &where);

/**
 * A numeric CSV file with a header row. Blank lines and lines starting with
 * '#' are skipped. Cells may be empty only in optional columns, where they
 * read as NaN.
 */
struct CsvTable
{
    std::string source;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> line_numbers; // 1-based source line of each row

    std::optional<std::size_t> find(std::string_view column) const;
    std::size_t require(std::string_view column) const;
    std::vector<double> column(std::size_t index) const;
};

CsvTable parse_csv(std::string_view text, const std::string &source, const std::vector<std::string> &optional_columns = {});
CsvTable read_csv(const fs::path &path, const std::vector<std::string> &optional_columns = {});

std::string read_text(const fs::path &path);

/**
 * Collects output files and writes them only on commit(): each goes to a
 * temporary sibling first and is renamed into place once every file has been
 * written, so a failure leaves no partial results behind.
 */
class OutputSet
{
public:
    explicit OutputSet(fs::path directory) : directory_(std::move(directory)) {}
    void add(const std::string &name, std::string content);
    void commit() const;
    const fs::path &directory() const { return directory_; }

private:
    fs::path directory_;
    std::map<std::string, std::string> files_;
};

// Tabular formats. Frequencies are stored in THz and delays in ps.

/// Raw samples of `freq_thz,intensity`, in file order (frequencies must increase).
struct SpectrumSamples
{
    std::string source;
    std::vector<double> omega; // rad/s
    std::vector<double> intensity;
};

SpectrumSamples read_spectrum_samples(const fs::path &path);

/// Linear resampling onto `grid` with zero extension; rejects files that miss the grid entirely.
IntensitySpectrum resample_spectrum(const SpectrumSamples &samples, const FrequencyGrid &grid);

/// Checks that two spectra overlap and names both spans if they do not.
void check_overlap(const SpectrumSamples &a, const SpectrumSamples &b);

std::string spectrum_csv(const IntensitySpectrum &spectrum);

std::string psd_csv(const PhaseSpectrum &psd);
PhaseSpectrum read_psd(const fs::path &path, const FrequencyGrid &grid);

/// `delay_ps,nc,stderr`, with stderr empty when absent.
std::string dip_csv(const DipPattern &dip);
/// `delay_ps,nc,stderr,counts_a,counts_b,coincidences`.
std::string dip_csv(const DipPattern &dip, const CountRecord &record);
DipPattern read_dip(const fs::path &path);

std::string residual_history_csv(const std::vector<double> &history);

// JSON configuration. Unknown keys are rejected so typos do not pass silently.

RetrievalConfig retrieval_config_from_json(const nlohmann::json &j, RetrievalConfig base = {});
nlohmann::json to_json(const RetrievalConfig &config);

CountingBudget budget_from_json(const nlohmann::json &j, CountingBudget base = {});
nlohmann::json to_json(const CountingBudget &budget);

/// "single-single", "single-coherent" (magnitude) or "coherent-coherent" (magnitude_1, magnitude_2).
StateCombination combo_from_json(const nlohmann::json &j);
StateCombination parse_combo(const std::string &name, double magnitude_1, double magnitude_2);
std::string combo_name(const StateCombination &combo);

/// Grid from {"center_thz", "spacing_ghz", "size"}.
FrequencyGrid grid_from_json(const nlohmann::json &j);

/**
 * Preset parameters from {"name", "center_thz", "slope_ps", "curvature_ps2",
 * "amplitude", "half_width_ghz", "table": [[thz, rad], ...]}.
 */
std::pair<std::string, PhasePresetParams> preset_from_json(const nlohmann::json &j);

/// Delay list from either an explicit `delays_ps` array or {"start_ps", "stop_ps", "step_ps"}.
std::vector<double> delays_from_json(const nlohmann::json &j);

/**
 * Full ensemble description. Relative file paths inside the document are
 * resolved against `base_directory`.
 */
EnsembleSpec ensemble_spec_from_json(const nlohmann::json &j, const fs::path &base_directory);

nlohmann::json summary_json(const PhaseDistribution &dist, const EnsembleSpec &spec, double coverage);

} // namespace homphase
