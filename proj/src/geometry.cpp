#include "cavity/geometry.hpp"

#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace cavity {

void CavityGeometry::validate(std::vector<std::string>* warnings) const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            std::ostringstream os;
            os << "geometry: " << name << " must be positive and finite, got " << v;
            throw std::invalid_argument(os.str());
        }
    };
    positive(end_mirror_radius, "end mirror radius R");
    positive(center_mirror_radius, "center mirror radius r");
    positive(half_length, "half length l");
    positive(half_aperture, "half aperture a");
    positive(wavelength, "wavelength");

    if (half_aperture >= half_length / 5.0) {
        std::ostringstream os;
        os << "geometry: a = " << half_aperture << " m is not small against l = "
           << half_length << " m (a < l/5 expected); paraxial accuracy degrades";
        if (warnings)
            warnings->push_back(os.str());
        else
            std::cerr << "warning: " << os.str() << "\n";
    }
}

AbcdMatrix AbcdMatrix::make(double A, double B, double C, double D) {
    AbcdMatrix m{A, B, C, D};
    double det = m.determinant();
    if (std::abs(det - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "abcd: determinant " << det << " deviates from 1 beyond 1e-12";
        throw std::invalid_argument(os.str());
    }
    return m;
}

AbcdMatrix AbcdMatrix::operator*(const AbcdMatrix& rhs) const {
    return make(A * rhs.A + B * rhs.C, A * rhs.B + B * rhs.D,
                C * rhs.A + D * rhs.C, C * rhs.B + D * rhs.D);
}

AbcdMatrix AbcdMatrix::scaled_by_aperture(double a) const {
    if (!(a > 0.0)) throw std::invalid_argument("abcd: aperture scale must be positive");
    return AbcdMatrix{A, B / a, C * a, D};
}

AbcdMatrix abcd_half_cavity(double half_length, double end_mirror_radius) {
    if (!(half_length > 0.0)) throw std::invalid_argument("abcd_half_cavity: l must be positive");
    if (!(end_mirror_radius > 0.0))
        throw std::invalid_argument("abcd_half_cavity: R must be positive");
    const double l = half_length, R = end_mirror_radius;
    const double B = 2.0 * l * (1.0 - l / R);
    if (B == 0.0)
        throw std::domain_error("abcd_half_cavity: B = 0 (l = R), propagator kernel degenerate");
    // C = -2/R restores det = 1; only A, B, D enter the kernel.
    return AbcdMatrix::make(1.0 - 2.0 * l / R, B, -2.0 / R, 1.0 - 2.0 * l / R);
}

AbcdMatrix abcd_convex_reflection(double center_mirror_radius) {
    if (!(center_mirror_radius > 0.0))
        throw std::invalid_argument("abcd_convex_reflection: r must be positive");
    return AbcdMatrix::make(1.0, 0.0, 2.0 / center_mirror_radius, 1.0);
}

AbcdMatrix subcavity_roundtrip(const CavityGeometry& geom) {
    geom.validate(nullptr);
    return abcd_convex_reflection(geom.center_mirror_radius) *
           abcd_half_cavity(geom.half_length, geom.end_mirror_radius);
}

double magnification_from_trace(double half_trace) {
    if (std::abs(half_trace) < 1.0)
        throw std::domain_error("magnification_from_trace: |m| < 1, stable sub-cavity has no "
                                "real magnification");
    return half_trace + std::sqrt(half_trace * half_trace - 1.0);
}

HorwitzParams::HorwitzParams(double magnification_, double fresnel_number_)
    : magnification(magnification_), fresnel_number(fresnel_number_) {
    // small slack keeps the marginal case l = R - r (M = 1 up to rounding)
    if (!(magnification >= 1.0 - 1e-12))
        throw std::domain_error("horwitz: magnification must be >= 1 (unstable sub-cavity)");
    if (!(fresnel_number > 0.0))
        throw std::domain_error("horwitz: Fresnel number must be positive");
    chirp = 3.14159265358979323846 * magnification * fresnel_number;
}

HorwitzParams horwitz_params(const CavityGeometry& geom) {
    std::vector<std::string> sink;
    geom.validate(&sink);
    const double R = geom.end_mirror_radius, r = geom.center_mirror_radius;
    const double l = geom.half_length, a = geom.half_aperture, lambda = geom.wavelength;
    if (!(l < R)) throw std::domain_error("horwitz_params: requires l < R");
    const double rad1 = (l + r) * (R - l);
    const double rad2 = l * (R - r - l);
    if (rad1 < 0.0 || rad2 < 0.0)
        throw std::domain_error("horwitz_params: radicand negative, sub-cavity not unstable "
                                "(needs l < R - r)");
    const double root = std::sqrt(rad1) + std::sqrt(rad2);
    const double magnification = root * root / (r * R);
    const double fresnel = a * a / (2.0 * l * lambda * (1.0 - l / R));
    return HorwitzParams(magnification, fresnel);
}

StabilityReport classify_stability(const CavityGeometry& geom) {
    std::vector<std::string> sink;
    geom.validate(&sink);
    StabilityReport rep;
    const double R = geom.end_mirror_radius, r = geom.center_mirror_radius;
    const double l = geom.half_length;
    rep.whole_cavity_stable = geom.whole_length() < 2.0 * R;
    rep.subcavity_unstable = l < R - r;
    rep.subcavity_stable = (R - r < l) && (l < R);
    if (l != R)  // B = 0 at l = R, the round trip itself is degenerate there
        rep.half_trace = subcavity_roundtrip(geom).half_trace();
    return rep;
}

double default_half_width(const CavityGeometry& geom) {
    StabilityReport rep = classify_stability(geom);
    if (rep.subcavity_unstable) {
        double M = magnification_from_trace(rep.half_trace);
        return std::max(3.0, 1.5 * M);
    }
    return 3.0;
}

}  // namespace cavity
