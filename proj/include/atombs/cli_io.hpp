#pragma once

// Run configuration, figure recipes and serialization for the command-line
// front end.
//
// Config files are plain text, one `key = value` per line; `#` starts a
// comment. Keys match the long CLI flags with dashes replaced by
// underscores, so any command line can be written down as a config file.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "atombs/amplitude.hpp"
#include "atombs/core.hpp"
#include "atombs/distribution.hpp"

namespace atombs::io {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr std::string_view kMomentsEngineVersion = "1";
inline constexpr std::string_view kAmplitudeEngineVersion = "1";

enum class Command { Coincidence, Excitation, Joint, DelayScan, Marginal };
enum class Format { Csv, Json };
enum class Sweep { Detuning, Bandwidth };
enum class Scale { Linear, Log };

std::string_view to_string(Command c);
Command parse_command(std::string_view text);

struct RunConfig {
    Command command = Command::Coincidence;
    ScatterParams params;
    std::optional<std::string> pulse_file;  // tau,re,im CSV; selects the sampled pulse

    // Sweep for `coincidence` (detuning or bandwidth) and `delay-scan` (delay).
    Sweep sweep = Sweep::Detuning;
    std::optional<double> sweep_min;
    std::optional<double> sweep_max;
    std::optional<std::size_t> sweep_points;
    std::optional<Scale> sweep_scale;

    std::vector<double> bandwidths{0.1, 1.25, 10.0};  // excitation curves

    Domain domain = Domain::Time;
    double time = amplitude::kAfterScattering;  // running time for `joint`
    amplitude::Model reference = amplitude::Model::Atomic;
    std::optional<double> postselect;  // tau2 for `marginal`

    std::optional<double> grid_lower;
    std::optional<double> grid_upper;
    std::optional<std::size_t> grid_points;

    std::optional<std::string> output;  // stdout when unset
    Format format = Format::Csv;
    std::uint64_t seed = 0;  // reserved; every computation is deterministic

    bool operator==(const RunConfig&) const = default;
};

/// Applies one setting; throws std::invalid_argument for unknown keys or
/// malformed values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);
/// Applies every `key = value` line of `text` on top of `config`.
void apply_text(RunConfig& config, std::string_view text);
void apply_file(RunConfig& config, const std::filesystem::path& path);

/// Canonical key = value text; apply_text on a default config restores it.
std::string serialize(const RunConfig& config);

/// Directory holding the figure recipes: ATOMBS_RECIPE_DIR if set, else the
/// source tree's recipes/.
std::filesystem::path recipe_directory();
std::filesystem::path recipe_path(std::string_view name);
std::vector<std::string> recipe_names();

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::optional<double>>> rows;  // empty cell where a value does not apply
};

struct RunResult {
    Table table;
    std::string grid_json = "null";  // grid metadata, JSON text
    std::optional<double> normalization;
    std::vector<std::string> warnings;
    double runtime_seconds = 0.0;
};

/// Runs the configured command. Throws std::invalid_argument for
/// configurations outside a command's domain.
RunResult run(const RunConfig& config);

/// %.17g, '.' decimal separator; "inf"/"-inf"/"nan" for non-finite values.
std::string format_number(double v);
/// Header plus one LF-terminated line per row.
std::string to_csv(const Table& table);
/// {config, grid, normalization, runtime_seconds, engine_versions, warnings}.
std::string sidecar_json(const RunConfig& config, const RunResult& result);
/// Sidecar fields plus `columns` and `rows`, for --format json.
std::string json_document(const RunConfig& config, const RunResult& result);

/// Output path after applying ATOMBS_OUTPUT_DIR to relative paths.
std::filesystem::path resolve_output(const std::string& output);

/// Writes the result as configured and returns the files written (empty
/// when the data went to `out`).
std::vector<std::filesystem::path> write_result(const RunConfig& config, const RunResult& result, std::ostream& out);

}  // namespace atombs::io
