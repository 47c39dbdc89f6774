// Run configuration: JSON schema, parsing, serialization, validation.
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cavity/geometry.hpp"
#include "cavity/spectrum.hpp"

namespace cavity {

struct GridConfig {
    int n = 1024;
    double half_width = 0.0;  // 0 selects the geometry-derived default
    bool apodization = false;

    bool operator==(const GridConfig&) const = default;
};

struct SolveConfig {
    OperatorKind operator_kind = OperatorKind::coupled;
    int modes = 10;    // number of modes to report
    int parity = 1;    // sector used by the scaled operator
    std::optional<std::pair<int, int>> resonance_q;
    bool refine_resonance = false;

    bool operator==(const SolveConfig&) const = default;
};

struct OutputConfig {
    std::string directory = "out";
    std::vector<std::string> formats = {"csv", "json"};

    bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
    CavityGeometry geometry;
    GridConfig grid;
    SolveConfig solve;
    OutputConfig output;

    bool operator==(const RunConfig&) const;

    /// Effective window half-width: the configured value, or the
    /// geometry-derived default when left at 0.
    double effective_half_width() const;

    /// Throws on invalid fields; collects non-fatal warnings.
    void validate(std::vector<std::string>* warnings = nullptr) const;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& config);

}  // namespace cavity
