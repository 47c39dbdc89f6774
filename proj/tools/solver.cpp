// Command-line driver: validate / spectrum / modes / sweep / asymptotics.
#include <CLI11.hpp>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "cavity/commands.hpp"
#include "cavity/config.hpp"
#include "cavity/io.hpp"

namespace {

cavity::RunConfig load(const std::string& config_path, const std::string& out_override) {
    cavity::RunConfig cfg = cavity::load_config(config_path);
    if (!out_override.empty()) cfg.output.directory = out_override;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coupled strip-cavity transverse mode solver"};
    app.set_version_flag("--version", std::string(cavity::kToolVersion));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON run configuration")->required();
        cmd->add_option("--out", out_override, "override the output directory");
    };

    CLI::App* validate = app.add_subcommand("validate", "run the self-consistency checks");
    add_common(validate);

    CLI::App* spectrum = app.add_subcommand("spectrum", "solve and write the eigenvalue table");
    add_common(spectrum);

    CLI::App* modes = app.add_subcommand("modes", "write transverse mode profiles");
    add_common(modes);

    CLI::App* sweep = app.add_subcommand("sweep", "sweep one geometry parameter");
    add_common(sweep);
    std::string sweep_param = "a";
    double sweep_from = 0.0, sweep_to = 0.0;
    int sweep_steps = 1;
    sweep->add_option("--param", sweep_param, "parameter to sweep: a, l or lambda")->required();
    sweep->add_option("--from", sweep_from, "first value (meters)")->required();
    sweep->add_option("--to", sweep_to, "last value (meters)")->required();
    sweep->add_option("--steps", sweep_steps, "number of steps")->required();

    CLI::App* asym = app.add_subcommand("asymptotics", "partial-integral convergence table");
    add_common(asym);
    std::vector<double> y_values{0.0};
    std::vector<double> t_values{50.0, 200.0, 800.0};
    double gauss_width = 1.0;
    asym->add_option("--y", y_values, "observation coordinates (units of a)")->delimiter(',');
    asym->add_option("--t", t_values, "chirp parameters")->delimiter(',');
    asym->add_option("--gauss-width", gauss_width, "width of the Gaussian envelope");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage errors exit 2
    }

    try {
        if (validate->parsed())
            return cavity::cmd_validate(load(config_path, out_override), std::cout);
        if (spectrum->parsed())
            return cavity::cmd_spectrum(load(config_path, out_override), std::cout);
        if (modes->parsed()) return cavity::cmd_modes(load(config_path, out_override), std::cout);
        if (sweep->parsed())
            return cavity::cmd_sweep(load(config_path, out_override),
                                     cavity::sweep_parameter_from_string(sweep_param), sweep_from,
                                     sweep_to, sweep_steps, std::cout);
        if (asym->parsed())
            return cavity::cmd_asymptotics(load(config_path, out_override), y_values, t_values,
                                           gauss_width, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
