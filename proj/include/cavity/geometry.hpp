// Cavity geometry, ABCD ray-matrix algebra, stability classification and
// the Horwitz scaling parameters (magnification, Fresnel number, chirp).
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cavity {

/// Physical description of the symmetric coupled cavity: two concave end
/// mirrors of radius R at distance l from the central bi-convex mirror
/// (radius r, half-aperture a). All lengths in meters.
struct CavityGeometry {
    double end_mirror_radius = 0.0;     // R
    double center_mirror_radius = 0.0;  // r
    double half_length = 0.0;           // l  (l1 = l3 = l)
    double half_aperture = 0.0;         // a
    double wavelength = 0.0;            // lambda

    /// Throws std::invalid_argument on non-positive fields. Appends a
    /// paraxial-margin warning (a >= l/5) to `warnings` when provided,
    /// otherwise prints it to stderr; the margin is advisory, not fatal.
    void validate(std::vector<std::string>* warnings = nullptr) const;

    double whole_length() const { return 2.0 * half_length; }  // L = 2l
};

/// 2x2 paraxial ray matrix. A, D dimensionless; B carries length,
/// C inverse length (dimensionless after scaling by the aperture).
struct AbcdMatrix {
    double A = 1.0;
    double B = 0.0;
    double C = 0.0;
    double D = 1.0;

    double determinant() const { return A * D - B * C; }
    double half_trace() const { return 0.5 * (A + D); }

    /// Checked constructor: rejects matrices with |det - 1| > 1e-12 relative.
    static AbcdMatrix make(double A, double B, double C, double D);

    /// Composition (this applied after rhs); result is unimodular-checked.
    AbcdMatrix operator*(const AbcdMatrix& rhs) const;

    /// Same matrix with all lengths expressed in units of the aperture a:
    /// B -> B/a, C -> C*a. Determinant is unchanged.
    AbcdMatrix scaled_by_aperture(double a) const;
};

/// Parameters of the Horwitz reduction of the unstable sub-cavity kernel
/// to the canonical collimated form.
struct HorwitzParams {
    double magnification = 1.0;   // M = m + sqrt(m^2 - 1), >= 1
    double fresnel_number = 0.0;  // F = a^2 / (2 l lambda (1 - l/R))
    double chirp = 0.0;           // t = pi M F

    HorwitzParams(double magnification, double fresnel_number);
};

struct StabilityReport {
    bool whole_cavity_stable = false;  // L < 2R
    bool subcavity_unstable = false;   // l < R - r
    bool subcavity_stable = false;     // R - r < l < R
    double half_trace = 0.0;           // m of the sub-cavity round trip
};

/// Half-cavity propagation (plane at the central mirror, out to the end
/// mirror of radius R and back): A = D = 1 - 2l/R, B = 2l(1 - l/R),
/// C = -2/R. Throws when B = 0 (l = 0 or l = R), where the Fresnel kernel
/// is degenerate.
AbcdMatrix abcd_half_cavity(double half_length, double end_mirror_radius);

/// Thin defocusing reflection from the convex central mirror: identity
/// with C = +2/r.
AbcdMatrix abcd_convex_reflection(double center_mirror_radius);

/// Full sub-cavity round trip referenced at the central-mirror plane:
/// convex reflection composed after the half-cavity propagation.
AbcdMatrix subcavity_roundtrip(const CavityGeometry& geom);

/// M = m + sqrt(m^2 - 1) for |m| >= 1; throws std::domain_error on the
/// stable branch |m| < 1.
double magnification_from_trace(double half_trace);

/// Horwitz parameters from the closed-form expressions. Requires an
/// unstable sub-cavity (l < R - r) and l < R.
HorwitzParams horwitz_params(const CavityGeometry& geom);

StabilityReport classify_stability(const CavityGeometry& geom);

/// Default transverse window half-width (units of a): wide enough that the
/// magnified image of the aperture stays inside with margin.
double default_half_width(const CavityGeometry& geom);

}  // namespace cavity
