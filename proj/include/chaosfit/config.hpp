#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "chaosfit/models.hpp"
#include "chaosfit/objective.hpp"
#include "chaosfit/optimizer.hpp"

namespace chaosfit {

enum class LossModeSetting { Auto, Full, MeanOnly };

struct GradcheckSettings {
    std::size_t points = 20;
    double h = 1e-5;
    std::uint64_t seed = 7;
    std::size_t paths = 200;
    double theta1_lo = 0.1;
    double theta1_hi = 2.0;
    double theta2_lo = 0.02;
    double theta2_hi = 0.5;
    double fail_above = 1e-3;
    bool corrupt_sensitivity = false;  // negative-control hook
};

/// Plateau: estimate from the data. Number: user-supplied. Monostate: none.
using CapacitySetting = std::variant<std::monostate, double, std::string>;

/// Settings for every subcommand. Defaults are what an empty config yields.
struct RunConfig {
    ModelKind model = ModelKind::OU;
    double x0 = 1.0;
    double T = 1.0;
    std::size_t n = 1000;
    std::size_t N = 1000;
    unsigned K = 8;
    unsigned P = 1;
    Theta theta_true{1.7, 0.15};
    std::vector<double> theta0{2.0, 0.5, 1.01};
    std::optional<double> sigma0;  // absent: use the QV pre-estimate
    LossModeSetting loss_mode = LossModeSetting::Auto;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> input;
    CapacitySetting carrying_capacity;
    OptimizerConfig optimizer;
    GradcheckSettings gradcheck;

    /// Auto resolves to MeanOnly for OU and Full otherwise.
    LossMode resolved_loss_mode() const;
    TimeGrid grid() const { return TimeGrid(T, n); }
    void validate() const;
};

/// Parses a config object; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j);
/// Every field, including defaults, for provenance.
nlohmann::ordered_json config_to_json(const RunConfig& cfg);

RunConfig load_config(const std::filesystem::path& path);

/// Applies `key=value` with a dotted key (e.g. optimizer.max_iters=50). The
/// value is parsed as JSON, falling back to a plain string.
void apply_override(nlohmann::json& j, const std::string& assignment);

}  // namespace chaosfit
