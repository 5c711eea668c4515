#pragma once

#include "dupire/errors.hpp"
#include "dupire/inversion.hpp"
#include "dupire/models.hpp"
#include "dupire/saddle.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dupire {

class ConfigError : public Error {
public:
    using Error::Error;
};

struct KGrid {
    double min = 0.0;
    double max = 0.0;
    int count = 0;

    std::vector<double> points() const;
};

struct RunConfig {
    ModelSpec model;
    KGrid k_grid;
    std::vector<double> T_grid{1.0};
    std::vector<VolMethod> methods{VolMethod::Exact, VolMethod::Saddle, VolMethod::Asymptote};
    QuadratureConfig quadrature;
    std::optional<std::string> output;

    explicit RunConfig(ModelSpec m) : model(std::move(m)) {}
};

// {"model": "heston" | "bs" | "kou" | "vargamma" | "nig", "params": {...}}
ModelSpec parse_model(const std::string& json_text);

// Either a full run config ({"model": {...}, "k_grid": ...}) or a bare model
// spec, in which case the grid is left empty. Throws ConfigError.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

// "exact,saddle" -> methods; throws ConfigError on unknown names.
std::vector<VolMethod> parse_methods(const std::string& list);

// Grid and method checks needed before evaluating a curve.
void validate_for_curve(const RunConfig& cfg);

// Figure presets: "heston", "kou", "vargamma".
RunConfig figure_preset(const std::string& name);

}  // namespace dupire
