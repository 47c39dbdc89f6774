#include "cavity/asymptotics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace cavity {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kBoundaryTol = 1e-12;
const std::complex<double> kImag{0.0, 1.0};

// Truncation radius: smallest x with |g| < 1e-8 of its peak, doubled.
double truncation_radius(const Envelope& g) {
    const int scan_points = 4096;
    const double scan_limit = 64.0;
    double peak = 0.0;
    for (int i = 0; i <= scan_points; ++i) {
        double x = -scan_limit + 2.0 * scan_limit * i / scan_points;
        peak = std::max(peak, std::abs(g(x)));
    }
    if (!(peak > 0.0)) throw std::invalid_argument("quadrature: test function vanishes");
    const double cutoff = 1e-8 * peak;
    double radius = 0.0;
    bool found = false;
    for (double x = 0.25; x <= scan_limit; x += 0.25) {
        if (std::abs(g(x)) < cutoff && std::abs(g(-x)) < cutoff) {
            // insist the tail stays below the cutoff, not just a zero crossing
            bool tail_ok = true;
            for (double probe = x; probe <= std::min(scan_limit, 2.0 * x); probe += 0.5)
                if (std::abs(g(probe)) >= cutoff || std::abs(g(-probe)) >= cutoff) {
                    tail_ok = false;
                    break;
                }
            if (tail_ok) {
                radius = x;
                found = true;
                break;
            }
        }
    }
    if (!found)
        throw std::invalid_argument("quadrature: test function does not decay below 1e-8 of "
                                    "its peak within |x| <= 64");
    return std::max(2.0 * radius, 2.0);
}

// Midpoint rule over [lo, hi] with the step tied to the local chirp slope.
// With accumulate set, terms are weighted one by one into *accumulate and
// nothing is returned, which gives the one-pass full-line sum an
// independent accumulation order.
std::complex<double> segment_quadrature(double lo, double hi, double t, double center,
                                        const Envelope& g,
                                        std::complex<double>* accumulate = nullptr) {
    if (!(hi > lo)) return {0.0, 0.0};
    double slope = 2.0 * t * std::max(std::abs(lo - center), std::abs(hi - center));
    double step = std::min(0.25 / std::max(slope, 1.0), (hi - lo) / 64.0);
    int n = static_cast<int>(std::ceil((hi - lo) / step));
    double h = (hi - lo) / n;
    std::complex<double> sum{0.0, 0.0};
    for (int k = 0; k < n; ++k) {
        double x = lo + (k + 0.5) * h;
        double u = x - center;
        std::complex<double> term = std::polar(1.0, -t * u * u) * g(x);
        if (accumulate)
            *accumulate += term * h;
        else
            sum += term;
    }
    return sum * h;
}

}  // namespace

std::string to_string(StationaryRegion region) {
    // no commas: these labels land in CSV fields
    switch (region) {
        case StationaryRegion::below_minus_M: return "(-inf..-M)";
        case StationaryRegion::minus_M_to_minus1: return "(-M..-1)";
        case StationaryRegion::inner: return "(-1..1)";
        case StationaryRegion::one_to_M: return "(1..M)";
        case StationaryRegion::above_M: return "(M..inf)";
    }
    return "unknown";
}

RegionClass classify_stationary(double y, double magnification) {
    const double M = magnification;
    if (!(M > 1.0))
        throw std::domain_error("classify_stationary: magnification must exceed 1");
    if (std::abs(std::abs(y) - 1.0) <= kBoundaryTol || std::abs(std::abs(y) - M) <= kBoundaryTol) {
        std::ostringstream os;
        os << "classify_stationary: y = " << y << " sits on a region boundary (|y| = 1 or "
           << "|y| = M); the stationary point lies on an integration endpoint";
        throw std::domain_error(os.str());
    }
    RegionClass rc;
    rc.y = y;
    if (y < -M)
        rc.region = StationaryRegion::below_minus_M;
    else if (y < -1.0)
        rc.region = StationaryRegion::minus_M_to_minus1;
    else if (y < 1.0)
        rc.region = StationaryRegion::inner;
    else if (y < M)
        rc.region = StationaryRegion::one_to_M;
    else
        rc.region = StationaryRegion::above_M;
    // stationary point x = y/M: right sub-domain iff y > M, middle iff
    // -M < y < M, left iff y < -M
    rc.contains_stationary = {y > M, std::abs(y) < M, y < -M};
    return rc;
}

PartialIntegrals eval_partial_integrals_quadrature(double y, double t, double magnification,
                                                   const Envelope& g) {
    if (!(t > 0.0)) throw std::invalid_argument("quadrature: t must be positive");
    if (!(magnification > 1.0))
        throw std::invalid_argument("quadrature: magnification must exceed 1");
    PartialIntegrals result;
    result.t = t;
    result.magnification = magnification;
    result.y = y;
    result.truncation_radius = truncation_radius(g);
    const double X = result.truncation_radius;
    const double center = y / magnification;

    result.outer_right = segment_quadrature(1.0, X, t, center, g);
    result.inner = segment_quadrature(-1.0, 1.0, t, center, g);
    result.outer_left = segment_quadrature(-X, -1.0, t, center, g);
    // independent single pass, walking the same nodes left to right
    result.full = {0.0, 0.0};
    segment_quadrature(-X, -1.0, t, center, g, &result.full);
    segment_quadrature(-1.0, 1.0, t, center, g, &result.full);
    segment_quadrature(1.0, X, t, center, g, &result.full);

    std::complex<double> parts = result.outer_right + result.inner + result.outer_left;
    double scale = std::max({std::abs(result.full), std::abs(parts), 1e-300});
    if (std::abs(parts - result.full) / scale > 1e-10) {
        std::ostringstream os;
        os << "quadrature: partial integrals fail additivity (" << std::abs(parts - result.full)
           << " absolute against " << scale << ")";
        throw std::runtime_error(os.str());
    }
    return result;
}

std::complex<double> stationary_phase_leading(double y, double t, double magnification,
                                              const Envelope& g) {
    if (!(t >= 10.0))
        throw std::domain_error("stationary_phase_leading: asymptotic form needs t >= 10");
    RegionClass rc = classify_stationary(y, magnification);
    bool interior = rc.contains_stationary[0] || rc.contains_stationary[1] ||
                    rc.contains_stationary[2];
    if (!interior) return {0.0, 0.0};
    return std::sqrt(kPi / (kImag * t)) * g(y / magnification);
}

}  // namespace cavity
