#include "cavity/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cavity/asymptotics.hpp"
#include "cavity/io.hpp"
#include "cavity/operators.hpp"
#include "cavity/spectrum.hpp"

namespace cavity {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

std::ofstream open_output(const fs::path& dir, const std::string& name) {
    fs::create_directories(dir);
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + (dir / name).string());
    return out;
}

struct CheckRow {
    std::string name;
    bool passed = false;
    bool skipped = false;
    std::string detail;
};

void print_rows(const std::vector<CheckRow>& rows, std::ostream& out) {
    for (const CheckRow& row : rows) {
        const char* tag = row.skipped ? "SKIP" : (row.passed ? "PASS" : "FAIL");
        out << "[" << tag << "] " << row.name;
        if (!row.detail.empty()) out << ": " << row.detail;
        out << "\n";
    }
}

// Smallest even grid size resolving both the physical kernel and, when
// given, the canonical chirp, at the requested window.
std::optional<int> adequate_size(const CavityGeometry& geom, double half_width,
                                 const std::optional<HorwitzParams>& horwitz, int cap) {
    for (int n = 256; n <= cap; n *= 2) {
        try {
            Grid grid(n, half_width);
            ScaledUnits u = scale_units(geom);
            propagator_kernel(grid, u.half_cavity, u.lambda);
            if (horwitz && !grid_adequacy(grid, horwitz->chirp, horwitz->magnification))
                continue;
            return n;
        } catch (const std::exception&) {
            continue;
        }
    }
    return std::nullopt;
}

double nearest_match_distance(std::vector<Complex> reference, std::vector<Complex> candidates) {
    double worst = 0.0;
    std::vector<bool> used(candidates.size(), false);
    for (Complex z : reference) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_index = 0;
        for (std::size_t k = 0; k < candidates.size(); ++k) {
            if (used[k]) continue;
            double d = std::abs(z - candidates[k]);
            if (d < best) {
                best = d;
                best_index = k;
            }
        }
        used[best_index] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

std::optional<HorwitzParams> try_horwitz(const CavityGeometry& geom) {
    try {
        return horwitz_params(geom);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

json geometry_json(const CavityGeometry& g) {
    return {{"R", g.end_mirror_radius},
            {"r", g.center_mirror_radius},
            {"l", g.half_length},
            {"a", g.half_aperture},
            {"lambda", g.wavelength}};
}

json stability_json(const StabilityReport& s) {
    return {{"whole_cavity_stable", s.whole_cavity_stable},
            {"subcavity_unstable", s.subcavity_unstable},
            {"subcavity_stable", s.subcavity_stable},
            {"half_trace_m", s.half_trace}};
}

SpectrumResult solve_configured(const RunConfig& cfg, const Grid& grid) {
    const CavityGeometry& geom = cfg.geometry;
    const bool apod = cfg.grid.apodization;
    switch (cfg.solve.operator_kind) {
        case OperatorKind::coupled: {
            SpectrumResult res = solve_spectrum(assemble_coupled(grid, geom, apod));
            res.geometry = geom;
            return res;
        }
        case OperatorKind::parity_plus: {
            SpectrumResult res = solve_spectrum(assemble_parity(grid, geom, +1, apod),
                                                OperatorKind::parity_plus);
            res.geometry = geom;
            return res;
        }
        case OperatorKind::parity_minus: {
            SpectrumResult res = solve_spectrum(assemble_parity(grid, geom, -1, apod),
                                                OperatorKind::parity_minus);
            res.geometry = geom;
            return res;
        }
        case OperatorKind::decoupled_subcavity:
            return decoupled_subcavity_spectrum(grid, geom);
        case OperatorKind::scaled: {
            HorwitzParams hp = horwitz_params(geom);
            ScaledUnits u = scale_units(geom);
            SpectrumResult res = solve_spectrum(
                assemble_scaled(grid, hp, u.r, u.lambda, cfg.solve.parity, apod),
                OperatorKind::scaled);
            for (EigenPair& pair : res.pairs) pair.parity = cfg.solve.parity;
            res.geometry = geom;
            return res;
        }
    }
    throw std::logic_error("unhandled operator kind");
}

void write_meta(const RunConfig& cfg, const Grid& grid, const fs::path& dir) {
    json meta;
    meta["version"] = kToolVersion;
    meta["operator_kind"] = to_string(cfg.solve.operator_kind);
    meta["geometry"] = geometry_json(cfg.geometry);
    meta["grid"] = {{"n", grid.size()},
                    {"half_width", grid.half_width()},
                    {"step", grid.step()},
                    {"apodization", cfg.grid.apodization}};
    meta["stability"] = stability_json(classify_stability(cfg.geometry));
    if (auto hp = try_horwitz(cfg.geometry)) {
        meta["horwitz"] = {{"M", hp->magnification},
                           {"F", hp->fresnel_number},
                           {"t", hp->chirp}};
    } else {
        meta["horwitz"] = nullptr;
    }
    meta["modes_reported"] = cfg.solve.modes;
    auto out = open_output(dir, "meta.json");
    out << meta.dump(2) << "\n";
}

}  // namespace

SweepParameter sweep_parameter_from_string(const std::string& name) {
    if (name == "a") return SweepParameter::half_aperture;
    if (name == "l") return SweepParameter::half_length;
    if (name == "lambda") return SweepParameter::wavelength;
    throw std::invalid_argument("sweep parameter must be one of a, l, lambda");
}

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
    std::vector<CheckRow> rows;
    auto fail_exit = [&]() {
        print_rows(rows, out);
        for (const CheckRow& row : rows)
            if (!row.passed && !row.skipped) {
                out << "validation failed at: " << row.name << "\n";
                return 1;
            }
        return 1;
    };

    // geometry
    try {
        std::vector<std::string> warnings;
        cfg.validate(&warnings);
        std::string detail;
        for (const std::string& w : warnings) detail += (detail.empty() ? "" : "; ") + w;
        rows.push_back({"geometry", true, false, detail});
    } catch (const std::exception& e) {
        rows.push_back({"geometry", false, false, e.what()});
        return fail_exit();
    }

    // stability against the requested operator
    StabilityReport stability = classify_stability(cfg.geometry);
    {
        std::ostringstream detail;
        detail << "m = " << stability.half_trace << ", whole "
               << (stability.whole_cavity_stable ? "stable" : "unstable") << ", sub-cavity "
               << (stability.subcavity_unstable ? "unstable" : "stable");
        bool ok = true;
        OperatorKind kind = cfg.solve.operator_kind;
        if ((kind == OperatorKind::decoupled_subcavity || kind == OperatorKind::scaled) &&
            !stability.subcavity_unstable) {
            ok = false;
            detail << "; stability precondition: " << to_string(kind)
                   << " needs an unstable sub-cavity (l < R - r)";
        }
        if (kind == OperatorKind::coupled && !stability.whole_cavity_stable) {
            ok = false;
            detail << "; stability precondition: coupled spectrum needs L < 2R";
        }
        rows.push_back({"stability", ok, false, detail.str()});
        if (!ok) return fail_exit();
    }

    std::optional<HorwitzParams> horwitz = try_horwitz(cfg.geometry);

    // grid adequacy on the configured grid
    std::optional<Grid> grid;
    {
        std::ostringstream detail;
        bool ok = true;
        try {
            grid.emplace(cfg.grid.n, cfg.effective_half_width());
            ScaledUnits u = scale_units(cfg.geometry);
            propagator_kernel(*grid, u.half_cavity, u.lambda);
            detail << "n = " << grid->size() << ", W = " << grid->half_width();
            if (cfg.solve.operator_kind == OperatorKind::scaled) {
                if (!horwitz) throw std::domain_error("no Horwitz parameters");
                if (!grid_adequacy(*grid, horwitz->chirp, horwitz->magnification))
                    throw std::invalid_argument("canonical chirp undersampled");
            }
        } catch (const std::exception& e) {
            ok = false;
            detail << e.what();
        }
        rows.push_back({"grid_adequacy", ok, false, detail.str()});
        if (!ok) return fail_exit();
    }

    // scattering identities and kernel health
    UnitarityReport unitarity = check_unitarity(*grid, cfg.geometry);
    {
        bool ok = unitarity.mask_completeness == 0.0 && unitarity.mask_orthogonality == 0.0;
        std::ostringstream detail;
        detail << "completeness " << unitarity.mask_completeness << ", orthogonality "
               << unitarity.mask_orthogonality;
        rows.push_back({"mask_identities", ok, false, detail.str()});
    }
    {
        bool ok = unitarity.scattering_norm_residual <= 1e-12;
        rows.push_back({"scattering_norm", ok, false,
                        "relative residual " + format_number(unitarity.scattering_norm_residual)});
    }
    {
        // a probe packet needs room in both domains; below ~32 modes the
        // window cannot certify norm conservation either way
        bool applicable = unitarity.space_bandwidth >= 32.0;
        bool ok = !applicable || unitarity.kernel_passband_residual < 0.05;
        std::ostringstream detail;
        if (applicable)
            detail << "pass-band residual " << format_number(unitarity.kernel_passband_residual)
                   << " (projector norm " << format_number(unitarity.kernel_projector_norm)
                   << ", informational)";
        else
            detail << "window carries only " << format_number(unitarity.space_bandwidth)
                   << " modes, probe not meaningful";
        rows.push_back({"kernel_passband", ok, !applicable, detail.str()});
    }

    // parity union and scaled correspondence on a reduced check grid
    const double check_width = 3.0;
    std::optional<int> check_n = adequate_size(cfg.geometry, check_width, horwitz, 4096);
    if (stability.whole_cavity_stable && check_n) {
        Grid check_grid(*check_n, check_width);
        auto coupled = spectrum_values(assemble_coupled(check_grid, cfg.geometry).entries);
        auto plus = spectrum_values(assemble_parity(check_grid, cfg.geometry, +1).entries);
        auto minus = spectrum_values(assemble_parity(check_grid, cfg.geometry, -1).entries);
        std::vector<Complex> joint = plus;
        joint.insert(joint.end(), minus.begin(), minus.end());
        double worst = nearest_match_distance(coupled, joint);
        bool ok = worst <= 1e-8;
        rows.push_back({"parity_union", ok, false,
                        "n = " + std::to_string(*check_n) + ", worst pair distance " +
                            format_number(worst)});
    } else {
        rows.push_back({"parity_union", true, true,
                        check_n ? "whole cavity unstable" : "no adequate check grid <= 4096"});
    }
    if (horwitz && check_n) {
        Grid check_grid(*check_n, check_width);
        ScaledUnits u = scale_units(cfg.geometry);
        auto parity = spectrum_values(assemble_parity(check_grid, cfg.geometry, +1).entries);
        auto scaled =
            spectrum_values(assemble_scaled(check_grid, *horwitz, u.r, u.lambda, +1).entries);
        double root_m = std::sqrt(horwitz->magnification);
        double worst = 0.0;
        for (int k = 0; k < 5 && k < static_cast<int>(parity.size()); ++k) {
            Complex expected = scaled[static_cast<std::size_t>(k)] / root_m;
            worst = std::max(worst, std::abs(parity[static_cast<std::size_t>(k)] - expected) /
                                        std::abs(parity[static_cast<std::size_t>(k)]));
        }
        bool ok = worst <= 1e-5;
        rows.push_back({"scaled_correspondence", ok, false,
                        "n = " + std::to_string(*check_n) + ", top-5 relative deviation " +
                            format_number(worst)});
    } else {
        rows.push_back({"scaled_correspondence", true, true,
                        horwitz ? "no adequate check grid <= 4096" : "stable sub-cavity"});
    }

    print_rows(rows, out);
    for (const CheckRow& row : rows)
        if (!row.passed && !row.skipped) {
            out << "validation failed at: " << row.name << "\n";
            return 1;
        }
    out << "all checks passed\n";
    return 0;
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& out) {
    cfg.validate(nullptr);
    Grid grid(cfg.grid.n, cfg.effective_half_width());
    SpectrumResult result = solve_configured(cfg, grid);
    const fs::path dir = cfg.output.directory;

    auto csv = open_output(dir, "spectrum.csv");
    csv << "index,re_gamma,im_gamma,abs_gamma,arg_gamma,parity,residual\n";
    for (std::size_t k = 0; k < result.pairs.size(); ++k) {
        const EigenPair& pair = result.pairs[k];
        csv << k << "," << format_number(pair.gamma.real()) << ","
            << format_number(pair.gamma.imag()) << "," << format_number(std::abs(pair.gamma))
            << "," << format_number(std::arg(pair.gamma)) << "," << pair.parity << ","
            << format_number(pair.residual) << "\n";
    }
    write_meta(cfg, grid, dir);

    if (cfg.solve.resonance_q) {
        auto res_csv = open_output(dir, "resonances.csv");
        res_csv << "mode,q,lambda,lambda_refined,shift\n";
        int reported = std::min<int>(cfg.solve.modes, static_cast<int>(result.pairs.size()));
        for (int k = 0; k < reported; ++k) {
            auto resonances = resonance_wavelengths(result.pairs[static_cast<std::size_t>(k)].gamma,
                                                    cfg.geometry.half_length,
                                                    cfg.solve.resonance_q->first,
                                                    cfg.solve.resonance_q->second);
            for (const Resonance& res : resonances) {
                res_csv << k << "," << res.longitudinal_index << ","
                        << format_number(res.wavelength);
                if (cfg.solve.refine_resonance && k == 0) {
                    RefinedResonance refined = refine_resonance_once(
                        cfg.geometry, grid, cfg.solve.operator_kind, k, res.longitudinal_index);
                    res_csv << "," << format_number(refined.refined_wavelength) << ","
                            << format_number(refined.shift);
                } else {
                    res_csv << ",,";
                }
                res_csv << "\n";
            }
        }
    }
    out << "spectrum: " << result.pairs.size() << " eigenvalues -> "
        << (dir / "spectrum.csv").string() << "\n";
    return 0;
}

int cmd_modes(const RunConfig& cfg, std::ostream& out) {
    cfg.validate(nullptr);
    Grid grid(cfg.grid.n, cfg.effective_half_width());
    SpectrumResult result = solve_configured(cfg, grid);
    const fs::path dir = cfg.output.directory;
    const bool want_pgm = std::find(cfg.output.formats.begin(), cfg.output.formats.end(),
                                    "pgm") != cfg.output.formats.end();

    if (cfg.solve.modes > static_cast<int>(result.pairs.size())) {
        std::ostringstream os;
        os << "modes: requested " << cfg.solve.modes << " modes but the operator has only "
           << result.pairs.size();
        throw std::out_of_range(os.str());
    }

    const int n = grid.size();
    for (int k = 0; k < cfg.solve.modes; ++k) {
        const EigenPair& pair = result.pairs[static_cast<std::size_t>(k)];
        const bool doublet = pair.mode.size() == 2 * n;
        auto csv = open_output(dir, "mode_" + std::to_string(k) + ".csv");
        if (doublet)
            csv << "component,y,re_v,im_v,intensity\n";
        else
            csv << "y,re_v,im_v,intensity\n";
        const int components = doublet ? 2 : 1;
        for (int c = 0; c < components; ++c) {
            for (int i = 0; i < n; ++i) {
                Complex v = pair.mode(c * n + i);
                if (doublet) csv << (c + 1) << ",";
                csv << format_number(grid.point(i)) << "," << format_number(v.real()) << ","
                    << format_number(v.imag()) << "," << format_number(std::norm(v)) << "\n";
            }
        }
        if (want_pgm) {
            std::vector<std::vector<double>> blocks;
            for (int c = 0; c < components; ++c) {
                std::vector<double> strip(static_cast<std::size_t>(n));
                for (int i = 0; i < n; ++i)
                    strip[static_cast<std::size_t>(i)] = std::norm(pair.mode(c * n + i));
                blocks.push_back(std::move(strip));
            }
            write_pgm_strip((dir / ("mode_" + std::to_string(k) + ".pgm")).string(), blocks);
        }
    }
    out << "modes: wrote " << cfg.solve.modes << " profiles to " << dir.string() << "\n";
    return 0;
}

int cmd_sweep(const RunConfig& cfg, SweepParameter parameter, double from, double to, int steps,
              std::ostream& out) {
    cfg.validate(nullptr);
    if (steps < 1) throw std::invalid_argument("sweep: steps must be >= 1");
    const char* name = parameter == SweepParameter::half_aperture
                           ? "a"
                           : parameter == SweepParameter::half_length ? "l" : "lambda";

    auto csv = open_output(cfg.output.directory, "sweep.csv");
    csv << "parameter,value,F,t,abs_gamma_1,arg_gamma_1,abs_gamma_2,arg_gamma_2,abs_gamma_3,"
           "arg_gamma_3,abs_gamma_4,arg_gamma_4,abs_gamma_5,arg_gamma_5,error\n";

    for (int step = 0; step < steps; ++step) {
        double value = steps == 1 ? from : from + (to - from) * step / (steps - 1);
        std::ostringstream row;
        row << name << "," << format_number(value);
        try {
            RunConfig local = cfg;
            switch (parameter) {
                case SweepParameter::half_aperture: local.geometry.half_aperture = value; break;
                case SweepParameter::half_length: local.geometry.half_length = value; break;
                case SweepParameter::wavelength: local.geometry.wavelength = value; break;
            }
            std::vector<std::string> sink;
            local.validate(&sink);
            const CavityGeometry& geom = local.geometry;
            double fresnel = geom.half_aperture * geom.half_aperture /
                             (2.0 * geom.half_length * geom.wavelength *
                              (1.0 - geom.half_length / geom.end_mirror_radius));
            std::ostringstream data;  // appended only if the whole step succeeds
            data << "," << format_number(fresnel);
            if (auto hp = try_horwitz(geom))
                data << "," << format_number(hp->chirp);
            else
                data << ",";

            Grid grid(local.grid.n, local.effective_half_width());
            Eigen::MatrixXcd matrix;
            switch (local.solve.operator_kind) {
                case OperatorKind::coupled:
                    matrix = assemble_coupled(grid, geom, local.grid.apodization).entries;
                    break;
                case OperatorKind::parity_plus:
                    matrix = assemble_parity(grid, geom, +1, local.grid.apodization).entries;
                    break;
                case OperatorKind::parity_minus:
                    matrix = assemble_parity(grid, geom, -1, local.grid.apodization).entries;
                    break;
                case OperatorKind::decoupled_subcavity: {
                    if (!classify_stability(geom).subcavity_unstable)
                        throw std::domain_error("sub-cavity not unstable");
                    matrix = assemble_subcavity_roundtrip(grid, geom, local.grid.apodization)
                                 .entries;
                    break;
                }
                case OperatorKind::scaled: {
                    HorwitzParams hp = horwitz_params(geom);
                    ScaledUnits u = scale_units(geom);
                    matrix = assemble_scaled(grid, hp, u.r, u.lambda, local.solve.parity,
                                             local.grid.apodization)
                                 .entries;
                    break;
                }
            }
            std::vector<Complex> values = spectrum_values(matrix);
            for (int k = 0; k < 5; ++k) {
                if (k < static_cast<int>(values.size()))
                    data << "," << format_number(std::abs(values[static_cast<std::size_t>(k)]))
                         << "," << format_number(std::arg(values[static_cast<std::size_t>(k)]));
                else
                    data << ",,";
            }
            data << ",";
            row << data.str();
        } catch (const std::exception& e) {
            std::string msg = e.what();
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            row << ",,,,,,,,,,,,," << msg;
        }
        csv << row.str() << "\n";
    }
    out << "sweep: " << steps << " steps -> "
        << (fs::path(cfg.output.directory) / "sweep.csv").string() << "\n";
    return 0;
}

int cmd_asymptotics(const RunConfig& cfg, const std::vector<double>& y_values,
                    const std::vector<double>& t_values, double gaussian_width,
                    std::ostream& out) {
    cfg.validate(nullptr);
    if (!(gaussian_width > 0.0))
        throw std::invalid_argument("asymptotics: gaussian width must be positive");
    HorwitzParams hp = horwitz_params(cfg.geometry);
    const double M = hp.magnification;
    Envelope g = [gaussian_width](double x) {
        double s = x / gaussian_width;
        return std::complex<double>(std::exp(-s * s), 0.0);
    };

    auto csv = open_output(cfg.output.directory, "asymptotics.csv");
    csv << "y,t,M,region,re_I1,im_I1,re_I2,im_I2,re_I3,im_I3,re_leading,im_leading,"
           "rel_error,additivity,error\n";
    for (double t : t_values) {
        for (double y : y_values) {
            csv << format_number(y) << "," << format_number(t) << "," << format_number(M);
            std::string region_label = "boundary";
            try {
                RegionClass rc = classify_stationary(y, M);
                region_label = to_string(rc.region);
                PartialIntegrals parts = eval_partial_integrals_quadrature(y, t, M, g);
                Complex total = parts.outer_right + parts.inner + parts.outer_left;
                Complex leading = stationary_phase_leading(y, t, M, g);
                double rel = std::abs(leading - total) / std::abs(total);
                double additivity = std::abs(total - parts.full);
                csv << "," << region_label << ","
                    << format_number(parts.outer_right.real()) << ","
                    << format_number(parts.outer_right.imag()) << ","
                    << format_number(parts.inner.real()) << ","
                    << format_number(parts.inner.imag()) << ","
                    << format_number(parts.outer_left.real()) << ","
                    << format_number(parts.outer_left.imag()) << ","
                    << format_number(leading.real()) << "," << format_number(leading.imag())
                    << "," << format_number(rel) << "," << format_number(additivity) << ",";
            } catch (const std::exception& e) {
                std::string msg = e.what();
                std::replace(msg.begin(), msg.end(), ',', ';');
                csv << "," << region_label << ",,,,,,,,,,," << msg;
            }
            csv << "\n";
        }
    }
    out << "asymptotics: " << y_values.size() * t_values.size() << " rows -> "
        << (fs::path(cfg.output.directory) / "asymptotics.csv").string() << "\n";
    return 0;
}

}  // namespace cavity
