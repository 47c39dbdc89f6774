// Dense non-Hermitian eigendecomposition of the assembled operators,
// eigenvalue ordering and parity labeling, resonance wavelengths.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "cavity/geometry.hpp"
#include "cavity/grid.hpp"
#include "cavity/operators.hpp"

namespace cavity {

enum class OperatorKind { coupled, parity_plus, parity_minus, decoupled_subcavity, scaled };

std::string to_string(OperatorKind kind);
OperatorKind operator_kind_from_string(const std::string& name);

struct EigenPair {
    Complex gamma;
    Eigen::VectorXcd mode;  // length n, or 2n for the coupled doublet
    int parity = 0;         // +1, -1, or 0 when unlabeled
    double residual = 0.0;  // ||A v - gamma v|| / ||A||_1
    int degeneracy = 1;     // size of the cluster this pair belongs to
};

/// Eigenpairs sorted by |gamma| descending (phase ascending on ties),
/// with the grid and geometry they were computed from.
struct SpectrumResult {
    std::vector<EigenPair> pairs;
    OperatorKind kind = OperatorKind::coupled;
    Grid grid;
    std::optional<CavityGeometry> geometry;
};

/// Full eigendecomposition via LAPACK zgeev. Modes are normalized to unit
/// discrete norm (sum |v_i|^2 h = 1) and phase-fixed so the largest-modulus
/// component is real positive. Clusters of eigenvalues within 1e-10 are
/// re-orthogonalized and tagged with their degeneracy. For the coupled
/// operator the doublet halves are parity-purified and labeled.
SpectrumResult solve_spectrum(const OperatorMatrix& op, OperatorKind kind);
SpectrumResult solve_spectrum(const CoupledOperator& op);

/// Eigenvalues only (no vectors, no residuals), sorted like solve_spectrum.
/// Much cheaper for large operators when only moduli and phases matter.
std::vector<Complex> spectrum_values(const Eigen::MatrixXcd& matrix);

/// Spectrum of the hard-edged unstable sub-cavity round trip rho = diag(R) K.
/// Requires l < R - r; throws if any |gamma| >= 1, which signals an
/// inconsistent discretization (the lossy sub-cavity must contract).
SpectrumResult decoupled_subcavity_spectrum(const Grid& grid, const CavityGeometry& geom);

struct Resonance {
    int longitudinal_index = 0;  // q
    double wavelength = 0.0;     // meters
};

/// Wavelengths at which the round-trip phase closes on itself:
/// lambda_q = 4 pi l / (arg gamma + 2 pi q) for q in [q_lo, q_hi] with a
/// positive denominator.
std::vector<Resonance> resonance_wavelengths(Complex gamma, double half_length, int q_lo,
                                             int q_hi);

struct RefinedResonance {
    double initial_wavelength = 0.0;
    double refined_wavelength = 0.0;
    double shift = 0.0;
};

/// One fixed-point pass of the resonance condition: re-assemble the
/// operator at lambda_q, re-solve, and recompute lambda_q from the new
/// eigenvalue of matching rank. Convergence of the iteration is not
/// guaranteed; the shift is reported so the caller can judge it.
RefinedResonance refine_resonance_once(const CavityGeometry& geom, const Grid& grid,
                                       OperatorKind kind, int mode_index, int q);

}  // namespace cavity
