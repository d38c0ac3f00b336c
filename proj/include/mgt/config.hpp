#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mgt/reconstruct.hpp"

namespace mgt {

/// Configuration rejected by the schema or by semantic checks; field() is a dotted path such as "grid.Nx".
class ConfigError : public InvalidInput {
public:
    ConfigError(const std::string& field, const std::string& message)
        : InvalidInput(field.empty() ? message : field + ": " + message), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct VerifySettings {
    int samples = 20;
    int pairs = 10;
    std::vector<double> s_values{1.0, 2.0, 4.0};
    double lambda = 1.0;
    std::vector<double> m0_sweep;
    double claimed_log10 = 340.0;
    bool refine = true;
};

enum class SourceKind { zero, manufactured_cubic };

struct RunConfig {
    ReconstructionConfig recon;
    /// Coefficient used by the forward command.
    std::function<double(double)> gamma_forward = [](double) { return 0.0; };
    /// Coefficient that generates synthetic data for the reconstruct command.
    std::optional<std::function<double(double)>> gamma_true;
    SourceKind source = SourceKind::zero;
    std::uint64_t seed = 0;
    VerifySettings verify;
    nlohmann::json document;
};

/// Schema shipped with the library (schema/config.schema.json).
const nlohmann::json& config_schema();
/// Schema of the JSON reports written by the command-line tool (schema/report.schema.json).
const nlohmann::json& report_schema();

/// Validates doc against a JSON-Schema subset: type, properties, required, additionalProperties,
/// enum, minimum, maximum, exclusiveMinimum, items, minItems, maxItems and local $ref.
/// Throws ConfigError naming the first offending field.
void validate_against_schema(const nlohmann::json& doc, const nlohmann::json& schema);

/// Function of x built from {"kind": "constant", "value"} or {"kind": "fourier", "offset", "sin", "cos"},
/// where the Fourier modes are sin(k pi (x - x_left) / L) and cos(k pi (x - x_left) / L), k = 1, 2, ...
std::function<double(double)> space_function(const nlohmann::json& spec, double x_left, double x_right);

/// Source for the exact solution u = sin(pi (x - x_left) / L) t^3 under the given coefficient.
std::function<double(double, double)> manufactured_cubic_source(std::function<double(double)> gamma, double c,
                                                                double b, double x_left, double x_right);

RunConfig parse_config(const nlohmann::json& doc);
/// Reads, parses (with line/column context on syntax errors) and validates a config file.
RunConfig load_config(const std::string& path);
/// Replaces the seed everywhere it is used.
void override_seed(RunConfig& config, std::uint64_t seed);

/// JSON text with every floating-point number printed with 17 significant digits; NaN and
/// infinities become null.
std::string to_json_text(const nlohmann::json& value, int indent = 2);

}  // namespace mgt
