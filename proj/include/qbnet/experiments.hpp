#pragma once

#include "qbnet/config.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qbnet {

inline constexpr std::string_view toolkit_version = "qbnet 1.0.0";

/// A point that could not be evaluated; kept out of the table rows.
struct SweepFailure {
    std::size_t point = 0;
    double value = 0.0;
    std::string message;
};

struct SweepTable {
    std::string name;
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<SweepFailure> failures;
};

struct OutputOptions {
    bool deterministic = false;
    std::string format = "csv";  // csv | json
};

/// `#`-prefixed metadata, header row, then rows with 17 significant digits.
/// A generation timestamp is included unless `deterministic` is set.
void write_csv(const SweepTable& table, std::ostream& out, bool deterministic);
/// Failed points as `point,<variable>,error`.
void write_failures_csv(const SweepTable& table, std::ostream& out);
[[nodiscard]] nlohmann::json to_json(const SweepTable& table, bool deterministic);

/// Writes `<dir>/<name>.csv` (or .json) plus `<name>.errors.csv` when points
/// failed. Returns the files written.
std::vector<std::filesystem::path> write_table(const SweepTable& table, const std::filesystem::path& dir,
                                               const OutputOptions& options);

/// Evaluates the configured observables over the sweep. Requires
/// config.topology and config.sweep. Numeric failures at a point are
/// recorded in `failures`; rows keep sweep order.
[[nodiscard]] SweepTable run_sweep(const RunConfig& config);

[[nodiscard]] const std::vector<std::string>& figure_ids();
/// Data behind one figure panel.
[[nodiscard]] SweepTable figure_table(std::string_view fig_id);
std::vector<std::filesystem::path> run_figure(std::string_view fig_id, const std::filesystem::path& out_dir,
                                              const OutputOptions& options);

}  // namespace qbnet
