#include "cavity/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cavity {

using nlohmann::json;

bool RunConfig::operator==(const RunConfig& rhs) const {
    return geometry.end_mirror_radius == rhs.geometry.end_mirror_radius &&
           geometry.center_mirror_radius == rhs.geometry.center_mirror_radius &&
           geometry.half_length == rhs.geometry.half_length &&
           geometry.half_aperture == rhs.geometry.half_aperture &&
           geometry.wavelength == rhs.geometry.wavelength && grid == rhs.grid &&
           solve == rhs.solve && output == rhs.output;
}

double RunConfig::effective_half_width() const {
    if (grid.half_width > 0.0) return grid.half_width;
    return default_half_width(geometry);
}

void RunConfig::validate(std::vector<std::string>* warnings) const {
    geometry.validate(warnings);
    if (grid.n < 16 || grid.n % 2 != 0)
        throw std::invalid_argument("config: grid.n must be even and >= 16");
    if (grid.half_width != 0.0 && !(grid.half_width > 1.0))
        throw std::invalid_argument("config: grid.half_width must exceed 1 (or 0 for auto)");
    if (solve.modes < 1) throw std::invalid_argument("config: solve.modes must be >= 1");
    if (solve.parity != 1 && solve.parity != -1)
        throw std::invalid_argument("config: solve.parity must be +1 or -1");
    if (solve.resonance_q && solve.resonance_q->first > solve.resonance_q->second)
        throw std::invalid_argument("config: solve.resonance_q range is empty");
    if (output.directory.empty())
        throw std::invalid_argument("config: output.directory must not be empty");
    for (const std::string& fmt : output.formats)
        if (fmt != "csv" && fmt != "json" && fmt != "pgm")
            throw std::invalid_argument("config: unknown output format '" + fmt + "'");
}

RunConfig parse_config(const std::string& json_text) {
    json root = json::parse(json_text);
    RunConfig cfg;

    const json& g = root.at("geometry");
    cfg.geometry.end_mirror_radius = g.at("R").get<double>();
    cfg.geometry.center_mirror_radius = g.at("r").get<double>();
    cfg.geometry.half_length = g.at("l").get<double>();
    cfg.geometry.half_aperture = g.at("a").get<double>();
    cfg.geometry.wavelength = g.at("lambda").get<double>();

    if (root.contains("grid")) {
        const json& gr = root.at("grid");
        cfg.grid.n = gr.value("n", cfg.grid.n);
        cfg.grid.half_width = gr.value("half_width", cfg.grid.half_width);
        cfg.grid.apodization = gr.value("apodization", cfg.grid.apodization);
    }
    if (root.contains("solve")) {
        const json& s = root.at("solve");
        if (s.contains("operator_kind"))
            cfg.solve.operator_kind = operator_kind_from_string(s.at("operator_kind"));
        cfg.solve.modes = s.value("modes", cfg.solve.modes);
        cfg.solve.parity = s.value("parity", cfg.solve.parity);
        if (s.contains("resonance_q")) {
            const json& q = s.at("resonance_q");
            if (!q.is_array() || q.size() != 2)
                throw std::invalid_argument("config: solve.resonance_q must be [q_lo, q_hi]");
            cfg.solve.resonance_q = {q[0].get<int>(), q[1].get<int>()};
        }
        cfg.solve.refine_resonance = s.value("refine_resonance", cfg.solve.refine_resonance);
    }
    if (root.contains("output")) {
        const json& o = root.at("output");
        cfg.output.directory = o.value("directory", cfg.output.directory);
        if (o.contains("formats"))
            cfg.output.formats = o.at("formats").get<std::vector<std::string>>();
    }
    cfg.validate(nullptr);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
    json root;
    root["geometry"] = {{"R", cfg.geometry.end_mirror_radius},
                        {"r", cfg.geometry.center_mirror_radius},
                        {"l", cfg.geometry.half_length},
                        {"a", cfg.geometry.half_aperture},
                        {"lambda", cfg.geometry.wavelength}};
    root["grid"] = {{"n", cfg.grid.n},
                    {"half_width", cfg.grid.half_width},
                    {"apodization", cfg.grid.apodization}};
    json solve = {{"operator_kind", to_string(cfg.solve.operator_kind)},
                  {"modes", cfg.solve.modes},
                  {"parity", cfg.solve.parity},
                  {"refine_resonance", cfg.solve.refine_resonance}};
    if (cfg.solve.resonance_q)
        solve["resonance_q"] = {cfg.solve.resonance_q->first, cfg.solve.resonance_q->second};
    root["solve"] = solve;
    root["output"] = {{"directory", cfg.output.directory}, {"formats", cfg.output.formats}};
    return root.dump(2) + "\n";
}

}  // namespace cavity
