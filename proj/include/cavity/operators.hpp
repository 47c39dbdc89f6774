// Discretized paraxial propagator, scattering masks of the central mirror,
// and assembly of the round-trip, coupled, parity and scaled operators.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "cavity/geometry.hpp"
#include "cavity/grid.hpp"

namespace cavity {

using Complex = std::complex<double>;

/// Diagonal scattering mask: a {0,1} indicator per grid point and a phase
/// angle carried where the indicator is set. Storing the phase instead of a
/// materialized complex keeps |value| = 1 exact on the active points, which
/// makes the discrete unitarity identities hold in exact arithmetic.
struct MaskVector {
    Grid grid;
    std::vector<std::uint8_t> indicator;  // theta step per point
    std::vector<double> phase;            // radians, meaningful where indicator = 1

    Complex value(int i) const {
        return indicator[static_cast<std::size_t>(i)]
                   ? std::polar(1.0, phase[static_cast<std::size_t>(i)])
                   : Complex(0.0, 0.0);
    }
};

/// Dense discretization of a kernel on a grid. When quadrature_absorbed is
/// set the midpoint weight h is folded into the entries, so products and
/// eigenproblems act directly on sampled field vectors.
struct OperatorMatrix {
    Eigen::MatrixXcd entries;
    Grid grid;
    bool quadrature_absorbed = true;
};

/// 2n x 2n block operator [[rho, tau], [tau, rho]] coupling the two
/// sub-cavities across the central mirror. Blocks are mirrored copies.
struct CoupledOperator {
    Eigen::MatrixXcd entries;
    Grid grid;
};

struct UnitarityReport {
    double mask_completeness = 0.0;      // max |T_ind + R_ind - 1| over points
    double mask_orthogonality = 0.0;     // max |T conj(R) + conj(T) R|
    double scattering_norm_residual = 0.0;  // relative doublet norm loss through the mirror
    double kernel_passband_residual = 0.0;  // norm change of band-limited probes under K
    double kernel_projector_norm = 0.0;  // power-iteration estimate of ||K^H K - I||
    double space_bandwidth = 0.0;        // 4 W^2 F: modes the window can carry; probe
                                         // results are only meaningful when this is large
};

/// Transmission mask theta(|y| - 1): unity outside the aperture.
MaskVector build_T(const Grid& grid);

/// Reflection mask theta(1 - |y|) xi(y) with the convex-mirror phase
/// xi(y) = exp(-2 pi i y^2 / (r lambda)); r and lambda in units of a.
MaskVector build_R(const Grid& grid, double r_scaled, double lambda_scaled);

/// Pure mirror phase xi(y) on every grid point (no aperture step).
MaskVector reflection_phase(const Grid& grid, double r_scaled, double lambda_scaled);

/// Huygens kernel of one half-cavity pass, all lengths in units of the
/// aperture:  K[i][j] = sqrt(i/(B lambda)) exp(-i pi/(B lambda)
/// (A y_j^2 - 2 y_i y_j + D y_i^2)) h, branch sqrt(i) = exp(i pi/4).
/// Throws when B = 0 or when the grid undersamples the kernel phase.
/// `apodize` applies a cosine taper over the outer 10% of the window to the
/// integration (column) variable; it trades edge ringing for norm loss.
OperatorMatrix propagator_kernel(const Grid& grid, const AbcdMatrix& abcd_scaled,
                                 double lambda_scaled, bool apodize = false);

/// rho = diag(R) K and tau = diag(T) K stacked as [[rho, tau], [tau, rho]].
/// Requires a globally stable cavity (L < 2R).
CoupledOperator assemble_coupled(const Grid& grid, const CavityGeometry& geom,
                                 bool apodize = false);

/// (diag(R) + parity diag(T)) K: the even (+1) / odd (-1) block of the
/// coupled operator under exchange of the two sub-cavity fields.
OperatorMatrix assemble_parity(const Grid& grid, const CavityGeometry& geom, int parity,
                               bool apodize = false);

/// rho = diag(R) K alone: the lossy round-trip propagator of one hard-edged
/// unstable sub-cavity. Rows outside the aperture are zero.
OperatorMatrix assemble_subcavity_roundtrip(const Grid& grid, const CavityGeometry& geom,
                                            bool apodize = false);

/// Canonical collimated form of the parity operator: kernel
/// sqrt(i t/pi) exp(-i t (x_j - y_i/M)^2) h masked by
/// [theta(1-|y|) + parity theta(|y|-1) conj(xi(y))]. Same spectrum as
/// assemble_parity up to the global factor sqrt(M).
OperatorMatrix assemble_scaled(const Grid& grid, const HorwitzParams& horwitz,
                               double r_scaled, double lambda_scaled, int parity,
                               bool apodize = false);

enum class GaugeDirection { to_scaled, to_physical };

/// Chirp multiplication mapping physical round-trip eigenmodes v(y)
/// (referenced at the central-mirror plane) to eigenmodes g(y) of the
/// scaled operator and back:
///   g(y) = exp(+i [pi F (M - 1/M)/2 + pi/(r lambda)] y^2) v(y).
/// The first term is the Horwitz gauge for a mid-reflection-referenced
/// round trip; the second re-references our kernel, which applies the full
/// mirror phase at the end of the pass. to_physical applies the conjugate;
/// the two directions compose to the identity.
Eigen::VectorXcd gauge_transform(const Eigen::VectorXcd& v, const Grid& grid,
                                 double fresnel_number, double magnification,
                                 double r_scaled, double lambda_scaled,
                                 GaugeDirection direction);

/// Mask identities, scattering norm conservation for random doublets, and
/// two views of the discrete kernel's unitarity: norm conservation on
/// band-limited probes (the meaningful health check) and the raw
/// power-iteration norm of K^H K - I, which on an oversampled window
/// measures the band-pass projector structure and saturates near 1.
UnitarityReport check_unitarity(const Grid& grid, const CavityGeometry& geom);

/// Product of two absorbed-quadrature operators on the same grid.
OperatorMatrix multiply(const OperatorMatrix& lhs, const OperatorMatrix& rhs);

/// Scaled-unit view of the geometry used by the assembly routines.
struct ScaledUnits {
    AbcdMatrix half_cavity;  // B in units of a, C in 1/a
    double r = 0.0;          // r/a
    double lambda = 0.0;     // lambda/a
};
ScaledUnits scale_units(const CavityGeometry& geom);

}  // namespace cavity
