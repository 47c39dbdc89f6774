// Command implementations behind the CLI: validation report, spectrum and
// mode output, parameter sweeps, asymptotics tables.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cavity/config.hpp"

namespace cavity {

/// Runs the self-consistency checks (stability, grid adequacy, scattering
/// identities, kernel health, parity union, scaled correspondence), prints
/// one pass/fail line per check, and returns 0 iff all pass.
int cmd_validate(const RunConfig& config, std::ostream& out);

/// Solves the configured operator and writes spectrum.csv and meta.json
/// (plus resonances.csv when a q range is configured) into the output
/// directory. Returns 0 on success.
int cmd_spectrum(const RunConfig& config, std::ostream& out);

/// Writes mode_k.csv (and mode_k.pgm when requested) for the leading
/// configured modes.
int cmd_modes(const RunConfig& config, std::ostream& out);

enum class SweepParameter { half_aperture, half_length, wavelength };
SweepParameter sweep_parameter_from_string(const std::string& name);

/// Linear sweep of one geometry parameter; per-step failures are recorded
/// in the error column and do not stop the run.
int cmd_sweep(const RunConfig& config, SweepParameter parameter, double from, double to,
              int steps, std::ostream& out);

/// Partial-integral and stationary-phase table over the requested
/// observation points and chirp values, using a Gaussian envelope.
int cmd_asymptotics(const RunConfig& config, const std::vector<double>& y_values,
                    const std::vector<double>& t_values, double gaussian_width,
                    std::ostream& out);

}  // namespace cavity
