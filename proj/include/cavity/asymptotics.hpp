// Partial-integral decomposition of the canonical chirped kernel action,
// stationary-point region classification, leading-order stationary phase,
// and the direct-quadrature oracle that cross-validates it.
#pragma once

#include <array>
#include <complex>
#include <functional>
#include <string>

namespace cavity {

enum class StationaryRegion {
    below_minus_M,     // (-inf, -M)
    minus_M_to_minus1, // (-M, -1)
    inner,             // (-1, 1)
    one_to_M,          // (1, M)
    above_M            // (M, inf)
};

std::string to_string(StationaryRegion region);

/// Which of the three integration sub-domains [1, inf), [-1, 1], (-inf, -1]
/// contains the stationary point x = y/M of exp(-i t (x - y/M)^2).
struct RegionClass {
    double y = 0.0;
    StationaryRegion region = StationaryRegion::inner;
    std::array<bool, 3> contains_stationary{};  // outer-right, inner, outer-left
};

/// Places y in one of the five regions and marks the sub-domain holding the
/// stationary point. Boundary values |y| = 1 or |y| = M (within 1e-12) are
/// rejected: there the stationary point sits on an integration endpoint and
/// leading-order theory does not apply.
RegionClass classify_stationary(double y, double magnification);

/// Complex-valued envelope sampled by the quadrature; must decay.
using Envelope = std::function<std::complex<double>(double)>;

struct PartialIntegrals {
    std::complex<double> outer_right;  // over [1, X_max]
    std::complex<double> inner;        // over [-1, 1]
    std::complex<double> outer_left;   // over [-X_max, -1]
    std::complex<double> full;         // one pass over the whole truncated line
    double truncation_radius = 0.0;    // X_max
    double t = 0.0;
    double magnification = 0.0;
    double y = 0.0;
};

/// Midpoint quadrature of exp(-i t (x - y/M)^2) g(x) over the three
/// sub-domains, truncated at the radius where |g| falls below 1e-8 of its
/// peak (doubled for safety). The sub-grid step resolves the chirp phase
/// (adjacent-sample increment well below pi/2). Throws when g does not decay
/// or when the parts fail to reproduce the one-pass integral to 1e-10
/// relative.
PartialIntegrals eval_partial_integrals_quadrature(double y, double t, double magnification,
                                                   const Envelope& g);

/// Leading-order stationary-phase value of the full kernel action:
/// sqrt(pi/(i t)) g(y/M) when the stationary point lies inside one
/// sub-domain, zero otherwise (endpoint terms are higher order and out of
/// scope). Requires t >= 10.
std::complex<double> stationary_phase_leading(double y, double t, double magnification,
                                              const Envelope& g);

}  // namespace cavity
