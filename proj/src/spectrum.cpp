#include "cavity/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cavity {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kClusterGap = 1e-10;

extern "C" {
void zgeev_(const char* jobvl, const char* jobvr, const int* n, Complex* a, const int* lda,
            Complex* w, Complex* vl, const int* ldvl, Complex* vr, const int* ldvr,
            Complex* work, const int* lwork, double* rwork, int* info);
}

void run_zgeev(Eigen::MatrixXcd& a, std::vector<Complex>& values, Eigen::MatrixXcd* vectors,
               const std::string& label) {
    const int n = static_cast<int>(a.rows());
    values.resize(static_cast<std::size_t>(n));
    const char* jobvr = vectors ? "V" : "N";
    if (vectors) vectors->resize(n, n);
    int lda = n, ldvl = 1, ldvr = vectors ? n : 1, info = 0, lwork = -1;
    std::vector<double> rwork(static_cast<std::size_t>(2 * n));
    Complex wkopt;
    zgeev_("N", jobvr, &n, a.data(), &lda, values.data(), nullptr, &ldvl,
           vectors ? vectors->data() : nullptr, &ldvr, &wkopt, &lwork, rwork.data(), &info);
    lwork = static_cast<int>(wkopt.real());
    std::vector<Complex> work(static_cast<std::size_t>(lwork));
    zgeev_("N", jobvr, &n, a.data(), &lda, values.data(), nullptr, &ldvl,
           vectors ? vectors->data() : nullptr, &ldvr, work.data(), &lwork, rwork.data(),
           &info);
    if (info != 0) {
        std::ostringstream os;
        os << "eigensolver failed to converge for " << label << " operator of size " << n
           << " (zgeev info = " << info << ")";
        throw std::runtime_error(os.str());
    }
}

bool modulus_phase_less(Complex a, Complex b) {
    double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma > mb;
    return std::arg(a) < std::arg(b);
}

std::vector<int> sorted_order(const std::vector<Complex>& values) {
    std::vector<int> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
        Complex a = values[static_cast<std::size_t>(i)], b = values[static_cast<std::size_t>(j)];
        if (a == b) return i < j;
        return modulus_phase_less(a, b);
    });
    return order;
}

void normalize_and_fix_phase(Eigen::VectorXcd& v, double h) {
    int best = 0;
    double best_mod = -1.0;
    for (int i = 0; i < v.size(); ++i) {
        double mod = std::abs(v(i));
        if (mod > best_mod) {
            best_mod = mod;
            best = i;
        }
    }
    if (best_mod > 0.0) v *= std::conj(v(best)) / best_mod;
    double norm = std::sqrt(v.squaredNorm() * h);
    if (norm > 0.0) v /= norm;
}

// Re-orthogonalize near-degenerate modes (h-weighted Gram-Schmidt) so the
// reported basis is stable run to run.
void orthogonalize_cluster(std::vector<EigenPair>& pairs, std::size_t lo, std::size_t hi,
                           double h) {
    for (std::size_t k = lo; k < hi; ++k) {
        for (std::size_t j = lo; j < k; ++j) {
            Complex proj = pairs[j].mode.dot(pairs[k].mode) * h;
            pairs[k].mode -= proj * pairs[j].mode;
        }
        normalize_and_fix_phase(pairs[k].mode, h);
    }
}

double matrix_one_norm(const Eigen::MatrixXcd& a) {
    return a.cwiseAbs().colwise().sum().maxCoeff();
}

SpectrumResult decompose(const Eigen::MatrixXcd& matrix, const Grid& grid, OperatorKind kind,
                         int parity_hint, std::optional<CavityGeometry> geometry) {
    if (!matrix.allFinite())
        throw std::invalid_argument("solve_spectrum: operator has non-finite entries");
    Eigen::MatrixXcd work = matrix;
    std::vector<Complex> values;
    Eigen::MatrixXcd vectors;
    run_zgeev(work, values, &vectors, to_string(kind));

    const double h = grid.step();
    SpectrumResult result{{}, kind, grid, std::move(geometry)};
    result.pairs.reserve(values.size());
    for (int idx : sorted_order(values)) {
        EigenPair pair;
        pair.gamma = values[static_cast<std::size_t>(idx)];
        pair.mode = vectors.col(idx);
        normalize_and_fix_phase(pair.mode, h);
        if (kind == OperatorKind::parity_plus) pair.parity = 1;
        if (kind == OperatorKind::parity_minus) pair.parity = -1;
        if (kind == OperatorKind::scaled) pair.parity = parity_hint;
        result.pairs.push_back(std::move(pair));
    }

    // Degenerate clusters: tag counts, stabilize the basis. The cluster of
    // numerically-zero eigenvalues keeps its raw vectors: Gram-Schmidt
    // inside that defective tail would trade backward-stable vectors for
    // junk directions and wreck the residuals.
    const double modulus_floor =
        result.pairs.empty() ? 0.0 : 1e-8 * std::abs(result.pairs.front().gamma);
    std::size_t lo = 0;
    while (lo < result.pairs.size()) {
        std::size_t hi = lo + 1;
        while (hi < result.pairs.size() &&
               std::abs(result.pairs[hi].gamma - result.pairs[hi - 1].gamma) <= kClusterGap)
            ++hi;
        if (hi - lo > 1 && std::abs(result.pairs[lo].gamma) > modulus_floor)
            orthogonalize_cluster(result.pairs, lo, hi, h);
        for (std::size_t k = lo; k < hi; ++k)
            result.pairs[k].degeneracy = static_cast<int>(hi - lo);
        lo = hi;
    }
    return result;
}

void attach_residuals(SpectrumResult& result, const Eigen::MatrixXcd& matrix) {
    if (result.pairs.empty()) return;
    const Eigen::Index n = matrix.rows();
    Eigen::MatrixXcd modes(n, static_cast<Eigen::Index>(result.pairs.size()));
    for (std::size_t k = 0; k < result.pairs.size(); ++k)
        modes.col(static_cast<Eigen::Index>(k)) = result.pairs[k].mode;
    Eigen::MatrixXcd image = matrix * modes;
    const double scale = matrix_one_norm(matrix);
    for (std::size_t k = 0; k < result.pairs.size(); ++k) {
        Eigen::VectorXcd defect = image.col(static_cast<Eigen::Index>(k)) -
                                  result.pairs[k].gamma * modes.col(static_cast<Eigen::Index>(k));
        result.pairs[k].residual = defect.norm() / scale;
        if (!(result.pairs[k].residual <= 1e-8)) {
            std::ostringstream os;
            os << "solve_spectrum: eigenpair " << k << " of the " << to_string(result.kind)
               << " operator (size " << n << ") has residual " << result.pairs[k].residual
               << " above 1e-8";
            throw std::runtime_error(os.str());
        }
    }
}

}  // namespace

std::string to_string(OperatorKind kind) {
    switch (kind) {
        case OperatorKind::coupled: return "coupled";
        case OperatorKind::parity_plus: return "parity_plus";
        case OperatorKind::parity_minus: return "parity_minus";
        case OperatorKind::decoupled_subcavity: return "decoupled";
        case OperatorKind::scaled: return "scaled";
    }
    return "unknown";
}

OperatorKind operator_kind_from_string(const std::string& name) {
    if (name == "coupled") return OperatorKind::coupled;
    if (name == "parity_plus") return OperatorKind::parity_plus;
    if (name == "parity_minus") return OperatorKind::parity_minus;
    if (name == "decoupled") return OperatorKind::decoupled_subcavity;
    if (name == "scaled") return OperatorKind::scaled;
    throw std::invalid_argument("unknown operator kind: " + name);
}

SpectrumResult solve_spectrum(const OperatorMatrix& op, OperatorKind kind) {
    if (!op.quadrature_absorbed)
        throw std::invalid_argument("solve_spectrum: operator must carry absorbed quadrature");
    SpectrumResult result = decompose(op.entries, op.grid, kind, 0, std::nullopt);
    attach_residuals(result, op.entries);
    return result;
}

SpectrumResult solve_spectrum(const CoupledOperator& op) {
    SpectrumResult result = decompose(op.entries, op.grid, OperatorKind::coupled, 0, std::nullopt);

    // Label the doublet parity; rotate degenerate clusters into exchange
    // eigenvectors first so mixed pairs split cleanly.
    const int n = op.grid.size();
    const double h = op.grid.step();
    const double modulus_floor =
        result.pairs.empty() ? 0.0 : 1e-8 * std::abs(result.pairs.front().gamma);
    for (std::size_t k = 0; k < result.pairs.size();) {
        std::size_t cluster_end = k + static_cast<std::size_t>(result.pairs[k].degeneracy);
        if (result.pairs[k].degeneracy > 1 &&
            std::abs(result.pairs[k].gamma) > modulus_floor) {
            // project the cluster span onto exchange-even/odd components
            std::vector<Eigen::VectorXcd> pure;
            for (std::size_t j = k; j < cluster_end; ++j) {
                const Eigen::VectorXcd& v = result.pairs[j].mode;
                Eigen::VectorXcd swapped(2 * n);
                swapped.head(n) = v.tail(n);
                swapped.tail(n) = v.head(n);
                pure.push_back(0.5 * (v + swapped));
                pure.push_back(0.5 * (v - swapped));
            }
            std::size_t next = k;
            for (auto& candidate : pure) {
                if (next == cluster_end) break;
                for (std::size_t j = k; j < next; ++j) {
                    Complex proj = result.pairs[j].mode.dot(candidate) * h;
                    candidate -= proj * result.pairs[j].mode;
                }
                if (std::sqrt(candidate.squaredNorm() * h) < 1e-6) continue;
                normalize_and_fix_phase(candidate, h);
                result.pairs[next].mode = candidate;
                ++next;
            }
        }
        for (std::size_t j = k; j < cluster_end; ++j) {
            const Eigen::VectorXcd& v = result.pairs[j].mode;
            Eigen::VectorXcd v1 = v.head(n), v2 = v.tail(n);
            double n1 = v1.norm(), n2 = v2.norm();
            double scale = std::max(n1, n2);
            if (scale == 0.0) continue;
            double even = (v2 - v1).norm() / scale;
            double odd = (v2 + v1).norm() / scale;
            if (even <= 1e-6)
                result.pairs[j].parity = 1;
            else if (odd <= 1e-6)
                result.pairs[j].parity = -1;
        }
        k = cluster_end;
    }
    attach_residuals(result, op.entries);
    return result;
}

std::vector<Complex> spectrum_values(const Eigen::MatrixXcd& matrix) {
    if (!matrix.allFinite())
        throw std::invalid_argument("spectrum_values: operator has non-finite entries");
    Eigen::MatrixXcd work = matrix;
    std::vector<Complex> values;
    run_zgeev(work, values, nullptr, "values-only");
    std::vector<Complex> sorted;
    sorted.reserve(values.size());
    for (int idx : sorted_order(values)) sorted.push_back(values[static_cast<std::size_t>(idx)]);
    return sorted;
}

SpectrumResult decoupled_subcavity_spectrum(const Grid& grid, const CavityGeometry& geom) {
    StabilityReport stability = classify_stability(geom);
    if (!stability.subcavity_unstable)
        throw std::domain_error("decoupled_subcavity_spectrum: requires an unstable "
                                "sub-cavity (l < R - r)");
    OperatorMatrix rho = assemble_subcavity_roundtrip(grid, geom);
    SpectrumResult result = solve_spectrum(rho, OperatorKind::decoupled_subcavity);
    result.geometry = geom;
    for (const EigenPair& pair : result.pairs) {
        if (std::abs(pair.gamma) >= 1.0) {
            std::ostringstream os;
            os << "decoupled_subcavity_spectrum: eigenvalue |gamma| = " << std::abs(pair.gamma)
               << " >= 1 on a lossy sub-cavity; discretization inconsistent";
            throw std::runtime_error(os.str());
        }
    }
    return result;
}

std::vector<Resonance> resonance_wavelengths(Complex gamma, double half_length, int q_lo,
                                             int q_hi) {
    if (gamma == Complex(0.0, 0.0))
        throw std::invalid_argument("resonance_wavelengths: gamma must be nonzero");
    if (!(half_length > 0.0))
        throw std::invalid_argument("resonance_wavelengths: half length must be positive");
    if (q_lo > q_hi) throw std::invalid_argument("resonance_wavelengths: empty q range");
    std::vector<Resonance> out;
    const double phase = std::arg(gamma);
    for (int q = q_lo; q <= q_hi; ++q) {
        double denom = phase + 2.0 * kPi * static_cast<double>(q);
        if (denom > 0.0) out.push_back({q, 4.0 * kPi * half_length / denom});
    }
    return out;
}

namespace {

Eigen::MatrixXcd assemble_for_kind(const Grid& grid, const CavityGeometry& geom,
                                   OperatorKind kind) {
    switch (kind) {
        case OperatorKind::coupled: return assemble_coupled(grid, geom).entries;
        case OperatorKind::parity_plus: return assemble_parity(grid, geom, +1).entries;
        case OperatorKind::parity_minus: return assemble_parity(grid, geom, -1).entries;
        case OperatorKind::decoupled_subcavity:
            return assemble_subcavity_roundtrip(grid, geom).entries;
        case OperatorKind::scaled:
            throw std::invalid_argument("resonance refinement is defined for physical "
                                        "operators, not the scaled form");
    }
    throw std::invalid_argument("unknown operator kind");
}

}  // namespace

RefinedResonance refine_resonance_once(const CavityGeometry& geom, const Grid& grid,
                                       OperatorKind kind, int mode_index, int q) {
    std::vector<Complex> values = spectrum_values(assemble_for_kind(grid, geom, kind));
    if (mode_index < 0 || static_cast<std::size_t>(mode_index) >= values.size())
        throw std::out_of_range("refine_resonance_once: mode index out of range");
    auto wavelength_at = [&](Complex gamma) {
        double denom = std::arg(gamma) + 2.0 * kPi * static_cast<double>(q);
        if (!(denom > 0.0))
            throw std::domain_error("refine_resonance_once: q gives no positive wavelength");
        return 4.0 * kPi * geom.half_length / denom;
    };
    RefinedResonance out;
    out.initial_wavelength = wavelength_at(values[static_cast<std::size_t>(mode_index)]);

    CavityGeometry updated = geom;
    updated.wavelength = out.initial_wavelength;
    std::vector<Complex> refined = spectrum_values(assemble_for_kind(grid, updated, kind));
    out.refined_wavelength = wavelength_at(refined[static_cast<std::size_t>(mode_index)]);
    out.shift = out.refined_wavelength - out.initial_wavelength;
    return out;
}

}  // namespace cavity
