#pragma once

#include "qbnet/network.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qbnet {

/// Schema violation, reported with a JSON-path style location such as
/// `$.topology.gamma_b[2]`.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string path, const std::string& message)
        : std::invalid_argument(path + ": " + message), path_(std::move(path)) {}

    [[nodiscard]] const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Linear time grid, inclusive of both ends.
struct TimeGrid {
    double start = 0.0;
    double stop = 0.0;
    int points = 0;

    [[nodiscard]] std::vector<double> values() const;
};

enum class SweepVariable { g_b, theta, n, gamma, big_gamma, xi };

[[nodiscard]] std::string_view to_string(SweepVariable v);
[[nodiscard]] SweepVariable parse_sweep_variable(std::string_view text);

/// Observables a sweep can report per point.
inline const std::vector<std::string> sweep_observables = {"steady_energy", "max_power", "E_nr", "E_r1", "E_r2",
                                                           "G1",            "G2",        "eta1", "eta2"};

struct SweepSpec {
    SweepVariable variable = SweepVariable::g_b;
    /// 1-based coupling index when sweeping theta.
    int index = 1;
    double start = 0.0;
    double stop = 0.0;
    int points = 0;
    bool log_scale = false;
    std::vector<std::string> observables = {"steady_energy"};

    [[nodiscard]] std::vector<double> values() const;
};

struct RunConfig {
    std::optional<TopologyParams> topology;
    std::optional<NetworkSpec> network;
    std::optional<std::string> target;
    std::optional<TimeGrid> times;
    std::optional<SweepSpec> sweep;
    std::optional<int> landscape_points;
    std::optional<std::string> out_dir;
    std::optional<std::string> format;
};

[[nodiscard]] RunConfig parse_config(const nlohmann::json& doc);
[[nodiscard]] RunConfig parse_config_text(std::string_view text);
[[nodiscard]] RunConfig load_config(const std::filesystem::path& file);

[[nodiscard]] nlohmann::json to_json(const RunConfig& config);
[[nodiscard]] nlohmann::json to_json(const TopologyParams& params);
[[nodiscard]] nlohmann::json to_json(const NetworkSpec& spec);
/// Canonical text form; parse_config_text(serialize(c)) serializes identically.
[[nodiscard]] std::string serialize(const RunConfig& config);

}  // namespace qbnet
