#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "cavity/geometry.hpp"
#include "cavity/grid.hpp"
#include "cavity/operators.hpp"
#include "cavity/spectrum.hpp"

using namespace cavity;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kM0 = 4.79128784747792;

CavityGeometry geometry_with_chirp(double t) {
    CavityGeometry geom{1.0, 0.2, 0.5, 1e-3, 0.0};
    geom.wavelength = kPi * kM0 * 1e-6 / (0.5 * t);
    return geom;
}

OperatorMatrix toy_operator(const Eigen::MatrixXcd& entries, const Grid& grid) {
    return OperatorMatrix{entries, grid, true};
}

}  // namespace

TEST_CASE("identity operator") {
    Grid grid(16, 2.0);
    SpectrumResult res = solve_spectrum(
        toy_operator(Eigen::MatrixXcd::Identity(16, 16), grid), OperatorKind::scaled);
    REQUIRE(res.pairs.size() == 16);
    for (const EigenPair& pair : res.pairs) {
        CHECK(std::abs(pair.gamma - Complex(1.0, 0.0)) <= 1e-12);
        CHECK(pair.residual <= 1e-12);
        CHECK(pair.mode.squaredNorm() * grid.step() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("diagonal operator: modulus ordering") {
    Grid grid(16, 2.0);
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(16, 16);
    d(0, 0) = Complex(0.0, 2.0);
    d(1, 1) = Complex(1.0, 0.0);
    d(2, 2) = Complex(0.5, 0.0);
    for (int i = 3; i < 16; ++i) d(i, i) = Complex(0.1, 0.0);
    SpectrumResult res = solve_spectrum(toy_operator(d, grid), OperatorKind::scaled);
    CHECK(res.pairs[0].gamma == Complex(0.0, 2.0));
    CHECK(res.pairs[1].gamma == Complex(1.0, 0.0));
    CHECK(res.pairs[2].gamma == Complex(0.5, 0.0));
}

TEST_CASE("off-diagonal coupling block: parity doublets") {
    // [[0, k], [k, 0]] has eigenvalues +-k with symmetric and antisymmetric
    // doublets; every one is degenerate across the grid copies, which also
    // exercises the cluster purification path
    Grid grid(16, 2.0);
    const double k = 0.7;
    const int n = grid.size();
    CoupledOperator op{Eigen::MatrixXcd::Zero(2 * n, 2 * n), grid};
    op.entries.topRightCorner(n, n) = k * Eigen::MatrixXcd::Identity(n, n);
    op.entries.bottomLeftCorner(n, n) = k * Eigen::MatrixXcd::Identity(n, n);

    SpectrumResult res = solve_spectrum(op);
    REQUIRE(res.pairs.size() == 2 * static_cast<std::size_t>(n));
    for (const EigenPair& pair : res.pairs) {
        CHECK(std::abs(std::abs(pair.gamma) - k) <= 1e-12);
        REQUIRE(pair.parity != 0);
        Eigen::VectorXcd v1 = pair.mode.head(n), v2 = pair.mode.tail(n);
        double rel = (v2 - double(pair.parity) * v1).norm() / v1.norm();
        CHECK(rel <= 1e-6);
        // symmetric doublets carry +k, antisymmetric -k
        if (pair.parity == 1) CHECK(pair.gamma.real() > 0.0);
        if (pair.parity == -1) CHECK(pair.gamma.real() < 0.0);
        CHECK(pair.degeneracy == n);
        CHECK(pair.residual <= 1e-8);
    }
}

TEST_CASE("sorted order and phase convention") {
    Grid grid(192, 3.0);
    CavityGeometry geom = geometry_with_chirp(5.0);
    SpectrumResult res = solve_spectrum(assemble_coupled(grid, geom));
    for (std::size_t k = 1; k < res.pairs.size(); ++k) {
        double prev = std::abs(res.pairs[k - 1].gamma), cur = std::abs(res.pairs[k].gamma);
        CHECK(prev >= cur);
        if (prev == cur)
            CHECK(std::arg(res.pairs[k - 1].gamma) <= std::arg(res.pairs[k].gamma));
    }
    for (std::size_t k = 0; k < 10; ++k) {
        const Eigen::VectorXcd& v = res.pairs[k].mode;
        int best = 0;
        for (int i = 1; i < v.size(); ++i)
            if (std::abs(v(i)) > std::abs(v(best))) best = i;
        CHECK(v(best).imag() == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(v(best).real() > 0.0);
    }
}

TEST_CASE("coupled doublets carry a parity label") {
    Grid grid(192, 3.0);
    CavityGeometry geom = geometry_with_chirp(5.0);
    SpectrumResult res = solve_spectrum(assemble_coupled(grid, geom));
    const int n = grid.size();
    // the physically resolved top of the spectrum must be parity-pure
    for (int k = 0; k < 20; ++k) {
        const EigenPair& pair = res.pairs[static_cast<std::size_t>(k)];
        REQUIRE(pair.parity != 0);
        Eigen::VectorXcd v1 = pair.mode.head(n), v2 = pair.mode.tail(n);
        double rel =
            (v2 - double(pair.parity) * v1).norm() / std::max(v1.norm(), v2.norm());
        CHECK(rel <= 1e-6);
    }
    // and the labeled eigenvalue must appear in the matching parity block
    for (int k = 0; k < 5; ++k) {
        const EigenPair& pair = res.pairs[static_cast<std::size_t>(k)];
        auto block = spectrum_values(assemble_parity(grid, geom, pair.parity).entries);
        double best = 1e300;
        for (Complex z : block) best = std::min(best, std::abs(z - pair.gamma));
        CHECK(best <= 1e-8);
    }
}

TEST_CASE("decoupled sub-cavity: contraction and the geometric loss") {
    Grid grid(768, std::max(3.0, 1.5 * kM0));
    CavityGeometry geom = geometry_with_chirp(20.0);
    SpectrumResult res = decoupled_subcavity_spectrum(grid, geom);

    CHECK(std::abs(res.pairs.front().gamma) < 1.0);  // sorted, so this is the max
    double target = 1.0 / std::sqrt(kM0);
    CHECK(std::abs(std::abs(res.pairs.front().gamma) - target) / target < 0.25);
    for (const EigenPair& pair : res.pairs) CHECK(pair.residual <= 1e-8);

    CavityGeometry stable = geom;
    stable.half_length = 0.9;
    CHECK_THROWS_AS(decoupled_subcavity_spectrum(grid, stable), std::domain_error);
}

TEST_CASE("all-reflective window: round trip equals the phase-masked kernel") {
    // stable sub-cavity (R - r < l < R), whose confined modes fit inside the
    // window, and a window narrow enough that every sample reflects
    Grid grid(64, 1.01);
    CavityGeometry geom{1.0, 0.2, 0.9, 1e-3, 2e-6};
    ScaledUnits u = scale_units(geom);
    OperatorMatrix rho = assemble_subcavity_roundtrip(grid, geom);
    OperatorMatrix K = propagator_kernel(grid, u.half_cavity, u.lambda);
    MaskVector xi = reflection_phase(grid, u.r, u.lambda);
    for (int i = 0; i < grid.size(); ++i)
        for (int j = 0; j < grid.size(); ++j)
            CHECK(rho.entries(i, j) == K.entries(i, j) * xi.value(i));

    // nothing is lost at the aperture, so confined modes keep their norm and
    // the leading moduli crowd the unit circle
    SpectrumResult res = solve_spectrum(rho, OperatorKind::decoupled_subcavity);
    CHECK(std::abs(res.pairs.front().gamma) > 0.9);
    CHECK(std::abs(res.pairs.front().gamma) < 1.01);
}

TEST_CASE("resonance wavelengths") {
    auto res = resonance_wavelengths(Complex(1.0, 0.0), 0.5, 2000000, 2000000);
    REQUIRE(res.size() == 1);
    CHECK(res.front().longitudinal_index == 2000000);
    CHECK(res.front().wavelength == doctest::Approx(5e-7).epsilon(1e-14));

    // gamma = -1 sits halfway between consecutive gamma = +1 resonances
    auto plus_q = resonance_wavelengths(Complex(1.0, 0.0), 0.5, 1000, 1001);
    auto half = resonance_wavelengths(Complex(-1.0, 0.0), 0.5, 1000, 1000);
    REQUIRE(plus_q.size() == 2);
    REQUIRE(half.size() == 1);
    CHECK(half.front().wavelength < plus_q.front().wavelength);
    CHECK(half.front().wavelength > plus_q.back().wavelength);

    CHECK(resonance_wavelengths(Complex(1.0, 0.0), 0.5, -5, -1).empty());
    CHECK_THROWS(resonance_wavelengths(Complex(0.0, 0.0), 0.5, 0, 1));
    CHECK_THROWS(resonance_wavelengths(Complex(1.0, 0.0), -0.5, 0, 1));
    CHECK_THROWS(resonance_wavelengths(Complex(1.0, 0.0), 0.5, 3, 1));
}

TEST_CASE("one-pass resonance refinement") {
    Grid grid(512, 3.0);  // must stay adequate at the refined wavelength too
    CavityGeometry geom = geometry_with_chirp(5.0);
    RefinedResonance r =
        refine_resonance_once(geom, grid, OperatorKind::decoupled_subcavity, 0, 2000000);
    CHECK(r.initial_wavelength > 0.0);
    CHECK(r.refined_wavelength > 0.0);
    CHECK(std::abs(r.shift) < 0.1 * r.initial_wavelength);
    CHECK(r.shift == r.refined_wavelength - r.initial_wavelength);

    CHECK_THROWS(refine_resonance_once(geom, grid, OperatorKind::scaled, 0, 2000000));
    CHECK_THROWS(refine_resonance_once(geom, grid, OperatorKind::decoupled_subcavity, -1, 10));
}

TEST_CASE("grid refinement leaves the dominant loss stable") {
    // production scale: the default window and a grid pair that both
    // resolve the kernel; the aperture-edge quantization is then below the
    // eigenvalue sensitivity
    CavityGeometry geom = geometry_with_chirp(20.0);
    const double W = std::max(3.0, 1.5 * kM0);
    double coarse = 0.0, fine = 0.0;
    {
        Grid grid(1024, W);
        coarse = std::abs(spectrum_values(assemble_subcavity_roundtrip(grid, geom).entries)
                              .front());
    }
    {
        Grid grid(2048, W);
        fine = std::abs(spectrum_values(assemble_subcavity_roundtrip(grid, geom).entries)
                            .front());
    }
    CHECK(std::abs(coarse - fine) <= 1e-3);
}

TEST_CASE("operator kind names round-trip") {
    for (OperatorKind kind :
         {OperatorKind::coupled, OperatorKind::parity_plus, OperatorKind::parity_minus,
          OperatorKind::decoupled_subcavity, OperatorKind::scaled})
        CHECK(operator_kind_from_string(to_string(kind)) == kind);
    CHECK_THROWS(operator_kind_from_string("banana"));
}
