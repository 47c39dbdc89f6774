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
constexpr double kM0 = 4.79128784747792;  // magnification of the reference geometry

// Reference geometry with the wavelength tuned so the canonical chirp
// parameter t = pi M F takes the requested value.
CavityGeometry geometry_with_chirp(double t) {
    CavityGeometry geom{1.0, 0.2, 0.5, 1e-3, 0.0};
    geom.wavelength = kPi * kM0 * 1e-6 / (0.5 * t);
    return geom;
}

}  // namespace

TEST_CASE("transmission and reflection masks") {
    Grid grid(64, 3.0);
    CavityGeometry geom = geometry_with_chirp(5.0);
    ScaledUnits u = scale_units(geom);
    MaskVector T = build_T(grid);
    MaskVector R = build_R(grid, u.r, u.lambda);

    for (int i = 0; i < grid.size(); ++i) {
        double y = grid.point(i);
        if (std::abs(y) < 1.0) {
            CHECK(T.value(i) == Complex(0.0, 0.0));
            CHECK(std::abs(R.value(i)) == doctest::Approx(1.0).epsilon(1e-15));
            CHECK(R.value(i) ==
                  std::polar(1.0, -2.0 * kPi * y * y / (u.r * u.lambda)));
        } else {
            CHECK(T.value(i) == Complex(1.0, 0.0));
            CHECK(R.value(i) == Complex(0.0, 0.0));
        }
        // indicator identities are integer-exact
        CHECK(int(T.indicator[i]) + int(R.indicator[i]) == 1);
        CHECK(int(T.indicator[i]) * int(R.indicator[i]) == 0);
        // orthogonality, exact because one factor is exactly zero
        Complex cross = T.value(i) * std::conj(R.value(i)) +
                        std::conj(T.value(i)) * R.value(i);
        CHECK(cross == Complex(0.0, 0.0));
    }
}

TEST_CASE("reflection phase is even and unimodular") {
    Grid grid(32, 2.5);
    MaskVector xi = reflection_phase(grid, 200.0, 3e-3);
    for (int i = 0; i < grid.size(); ++i) {
        CHECK(std::abs(xi.value(i)) == doctest::Approx(1.0).epsilon(1e-15));
        // mirrored points are exactly opposite doubles, so phases match bitwise
        CHECK(xi.value(i) == xi.value(grid.size() - 1 - i));
    }
}

TEST_CASE("propagator kernel: constant modulus and symmetry") {
    Grid grid(128, 3.0);
    CavityGeometry geom = geometry_with_chirp(5.0);
    ScaledUnits u = scale_units(geom);
    OperatorMatrix K = propagator_kernel(grid, u.half_cavity, u.lambda);
    CHECK(K.quadrature_absorbed);

    const double expected =
        grid.step() / std::sqrt(u.half_cavity.B * u.lambda);
    double worst = 0.0;
    for (int i = 0; i < grid.size(); ++i)
        for (int j = 0; j < grid.size(); ++j)
            worst = std::max(worst, std::abs(std::abs(K.entries(i, j)) - expected) / expected);
    CHECK(worst <= 1e-13);

    // A = D makes the kernel symmetric in its arguments
    double asym = (K.entries - K.entries.transpose()).cwiseAbs().maxCoeff();
    CHECK(asym <= 1e-13 * expected);
}

TEST_CASE("propagator kernel: error paths") {
    Grid grid(64, 3.0);
    CavityGeometry geom = geometry_with_chirp(5.0);
    ScaledUnits u = scale_units(geom);

    AbcdMatrix degenerate{1.0, 0.0, 0.0, 1.0};
    CHECK_THROWS_AS(propagator_kernel(grid, degenerate, u.lambda), std::domain_error);

    // undersampled: same physics on a tiny coarse grid
    Grid coarse(16, 12.0);
    CavityGeometry fine = geometry_with_chirp(60.0);
    ScaledUnits uf = scale_units(fine);
    CHECK_THROWS_AS(propagator_kernel(coarse, uf.half_cavity, uf.lambda),
                    std::invalid_argument);
}

TEST_CASE("apodization tapers the integration columns") {
    Grid grid(64, 3.0);
    CavityGeometry geom = geometry_with_chirp(5.0);
    ScaledUnits u = scale_units(geom);
    OperatorMatrix plain = propagator_kernel(grid, u.half_cavity, u.lambda, false);
    OperatorMatrix tapered = propagator_kernel(grid, u.half_cavity, u.lambda, true);
    for (int j = 0; j < grid.size(); ++j) {
        double ratio = std::abs(tapered.entries(0, j)) / std::abs(plain.entries(0, j));
        if (std::abs(grid.point(j)) <= 0.9 * grid.half_width())
            CHECK(ratio == doctest::Approx(1.0).epsilon(1e-12));
        else
            CHECK(ratio < 1.0);
    }
}

TEST_CASE("coupled operator: block structure") {
    Grid grid(96, 3.0);
    CavityGeometry geom = geometry_with_chirp(5.0);
    CoupledOperator coupled = assemble_coupled(grid, geom);
    const int n = grid.size();
    REQUIRE(coupled.entries.rows() == 2 * n);

    // mirrored blocks are copies, bitwise
    CHECK(coupled.entries.topLeftCorner(n, n) == coupled.entries.bottomRightCorner(n, n));
    CHECK(coupled.entries.topRightCorner(n, n) == coupled.entries.bottomLeftCorner(n, n));

    // column sums decompose into the block sums
    for (int j = 0; j < n; ++j) {
        Complex whole = coupled.entries.col(j).sum();
        Complex parts = coupled.entries.col(j).head(n).sum() +
                        coupled.entries.col(j).tail(n).sum();
        CHECK(std::abs(whole - parts) <= 1e-12);
    }

    CavityGeometry long_cavity = geom;
    long_cavity.half_length = 1.2;
    Grid wide(96, 3.0);
    CHECK_THROWS_AS(assemble_coupled(wide, long_cavity), std::domain_error);
}

TEST_CASE("coupled operator: all-reflective window decouples the blocks") {
    // W - h/2 < 1 keeps every sample inside the aperture, so T vanishes
    Grid grid(16, 1.05);
    CavityGeometry geom = geometry_with_chirp(2.0);
    CoupledOperator coupled = assemble_coupled(grid, geom);
    const int n = grid.size();
    CHECK(coupled.entries.topRightCorner(n, n).cwiseAbs().maxCoeff() == 0.0);

    // the diagonal block is exactly the mirror-phase-masked kernel
    ScaledUnits u = scale_units(geom);
    OperatorMatrix K = propagator_kernel(grid, u.half_cavity, u.lambda);
    MaskVector xi = reflection_phase(grid, u.r, u.lambda);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            CHECK(coupled.entries(i, j) == xi.value(i) * K.entries(i, j));
}

TEST_CASE("parity blocks recombine to the round trip") {
    Grid grid(96, 3.0);
    CavityGeometry geom = geometry_with_chirp(5.0);
    OperatorMatrix plus = assemble_parity(grid, geom, +1);
    OperatorMatrix minus = assemble_parity(grid, geom, -1);
    OperatorMatrix rho = assemble_subcavity_roundtrip(grid, geom);

    // (R+T)K + (R-T)K = 2 RK, exact: the masks are applied per row
    CHECK((plus.entries + minus.entries) == (2.0 * rho.entries));
    CHECK_THROWS(assemble_parity(grid, geom, 0));
}

TEST_CASE("parity blocks coincide when nothing transmits") {
    Grid grid(16, 1.05);
    CavityGeometry geom = geometry_with_chirp(2.0);
    OperatorMatrix plus = assemble_parity(grid, geom, +1);
    OperatorMatrix minus = assemble_parity(grid, geom, -1);
    CHECK(plus.entries == minus.entries);
}

TEST_CASE("scaled kernel: modulus and the collimated limit") {
    Grid grid(256, 3.0);
    CavityGeometry geom = geometry_with_chirp(5.0);
    HorwitzParams hp = horwitz_params(geom);
    ScaledUnits u = scale_units(geom);
    OperatorMatrix scaled = assemble_scaled(grid, hp, u.r, u.lambda, +1);

    const double expected = grid.step() * std::sqrt(hp.chirp / kPi);
    for (int i = 0; i < grid.size(); ++i) {
        if (std::abs(grid.point(i)) >= 1.0) continue;  // mask is unity inside
        for (int j = 0; j < grid.size(); j += 7)
            CHECK(std::abs(scaled.entries(i, j)) ==
                  doctest::Approx(expected).epsilon(1e-13));
    }

    // M -> 1 turns the kernel into a convolution; rows inside the aperture
    // are Toeplitz on a dyadic grid
    Grid dyadic(96, 3.0);
    HorwitzParams unit_m(1.0, 1.0 / kPi);
    OperatorMatrix conv = assemble_scaled(dyadic, unit_m, 200.0, 1e-2, +1);
    for (int i = 0; i + 1 < dyadic.size(); ++i) {
        if (std::abs(dyadic.point(i)) >= 1.0 || std::abs(dyadic.point(i + 1)) >= 1.0) continue;
        for (int j = 0; j + 1 < dyadic.size(); ++j)
            CHECK(conv.entries(i, j) == conv.entries(i + 1, j + 1));
    }

    // chirp guard
    Grid coarse(16, 3.0);
    CHECK_THROWS_AS(assemble_scaled(coarse, horwitz_params(geometry_with_chirp(60.0)), u.r,
                                    u.lambda, +1),
                    std::invalid_argument);
}

TEST_CASE("gauge transform: unit modulus and involution") {
    Grid grid(64, 3.0);
    CavityGeometry geom = geometry_with_chirp(5.0);
    HorwitzParams hp = horwitz_params(geom);
    ScaledUnits u = scale_units(geom);

    Eigen::VectorXcd v(grid.size());
    for (int i = 0; i < grid.size(); ++i)
        v(i) = Complex(std::exp(-grid.point(i) * grid.point(i)), 0.3 * grid.point(i));

    Eigen::VectorXcd g = gauge_transform(v, grid, hp.fresnel_number, hp.magnification, u.r,
                                         u.lambda, GaugeDirection::to_scaled);
    for (int i = 0; i < grid.size(); ++i)
        CHECK(std::abs(g(i)) == doctest::Approx(std::abs(v(i))).epsilon(1e-14));

    Eigen::VectorXcd back = gauge_transform(g, grid, hp.fresnel_number, hp.magnification, u.r,
                                            u.lambda, GaugeDirection::to_physical);
    CHECK((back - v).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("unitarity report") {
    Grid grid(256, 3.0);
    CavityGeometry geom = geometry_with_chirp(5.0);
    UnitarityReport rep = check_unitarity(grid, geom);
    CHECK(rep.mask_completeness == 0.0);
    CHECK(rep.mask_orthogonality == 0.0);
    CHECK(rep.scattering_norm_residual <= 1e-14);
    CHECK(rep.kernel_passband_residual < 0.05);
    // the raw projector norm is reported, not bounded: the oversampled
    // window makes K^H K a band-pass projector
    CHECK(rep.kernel_projector_norm >= 0.0);
}

TEST_CASE("parity decomposition reproduces the coupled spectrum") {
    Grid grid(128, 3.0);
    CavityGeometry geom = geometry_with_chirp(5.0);
    auto coupled = spectrum_values(assemble_coupled(grid, geom).entries);
    auto plus = spectrum_values(assemble_parity(grid, geom, +1).entries);
    auto minus = spectrum_values(assemble_parity(grid, geom, -1).entries);

    std::vector<Complex> joint = plus;
    joint.insert(joint.end(), minus.begin(), minus.end());
    REQUIRE(joint.size() == coupled.size());

    std::vector<bool> used(joint.size(), false);
    double worst = 0.0;
    for (Complex z : coupled) {
        double best = 1e300;
        std::size_t best_k = 0;
        for (std::size_t k = 0; k < joint.size(); ++k) {
            if (used[k]) continue;
            double d = std::abs(z - joint[k]);
            if (d < best) {
                best = d;
                best_k = k;
            }
        }
        used[best_k] = true;
        worst = std::max(worst, best);
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("scaled and physical operators share a spectrum up to sqrt(M)") {
    Grid grid(256, 3.0);
    CavityGeometry geom = geometry_with_chirp(5.0);
    HorwitzParams hp = horwitz_params(geom);
    ScaledUnits u = scale_units(geom);
    const double root_m = std::sqrt(hp.magnification);

    for (int parity : {+1, -1}) {
        SpectrumResult physical =
            solve_spectrum(assemble_parity(grid, geom, parity),
                           parity > 0 ? OperatorKind::parity_plus : OperatorKind::parity_minus);
        SpectrumResult canonical = solve_spectrum(
            assemble_scaled(grid, hp, u.r, u.lambda, parity), OperatorKind::scaled);

        for (int k = 0; k < 5; ++k) {
            Complex expected = canonical.pairs[k].gamma / root_m;
            CHECK(std::abs(physical.pairs[k].gamma - expected) /
                      std::abs(physical.pairs[k].gamma) <=
                  1e-5);
            // eigenvectors correspond through the gauge chirp
            Eigen::VectorXcd mapped = gauge_transform(
                physical.pairs[k].mode, grid, hp.fresnel_number, hp.magnification, u.r,
                u.lambda, GaugeDirection::to_scaled);
            double cosine = std::abs(mapped.dot(canonical.pairs[k].mode)) * grid.step();
            CHECK(cosine > 0.999);
        }
    }
}

TEST_CASE("operator products require matching quadrature") {
    Grid grid(64, 3.0);
    CavityGeometry geom = geometry_with_chirp(5.0);
    ScaledUnits u = scale_units(geom);
    OperatorMatrix K = propagator_kernel(grid, u.half_cavity, u.lambda);
    OperatorMatrix raw = K;
    raw.quadrature_absorbed = false;
    CHECK_THROWS_AS(multiply(K, raw), std::invalid_argument);
    CHECK_NOTHROW(multiply(K, K));
    Grid other(64, 2.5);
    OperatorMatrix mismatched{Eigen::MatrixXcd::Identity(64, 64), other, true};
    CHECK_THROWS_AS(multiply(K, mismatched), std::invalid_argument);
}
