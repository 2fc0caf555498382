#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "heomspec/spectra.hpp"
#include "test_models.hpp"

using namespace heomspec;
using namespace heomspec::testing;

namespace {

std::vector<Complex> sorted_by_re_im(std::vector<Complex> v) {
    std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return v;
}

// Greedy nearest matching of two eigenvalue multisets; robust against the
// noise-order of near-degenerate values that defeats plain sorting.
double max_matching_distance(const std::vector<Complex>& got,
                             const std::vector<Complex>& want) {
    REQUIRE(got.size() == want.size());
    std::vector<bool> used(want.size(), false);
    double worst = 0.0;
    for (const Complex& g : got) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t i = 0; i < want.size(); ++i) {
            if (used[i]) continue;
            const double dist = std::abs(g - want[i]);
            if (dist < best) {
                best = dist;
                arg = i;
            }
        }
        used[arg] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

// Scalar tridiagonal oracle for the single-mode pure-dephasing model
// (H = 0, q = sigma_z): the |0><1| coherence sector has diagonal -n gamma,
// superdiagonal 2 c sqrt(n+1), subdiagonal sqrt(n) (c' - c''); the
// terminator adds 2 c (c' - c'') / gamma at the last diagonal entry. The
// |1><0| sector has flipped off-diagonal signs and the same spectrum, and the
// population sector contributes {-n gamma} twice.
std::vector<Complex> dephasing_oracle(const HeomModel& model, std::size_t levels,
                                      TruncationKind kind) {
    const BathMode& mode = model.modes()[0];
    std::vector<Complex> out;
    for (std::size_t n = 0; n < levels; ++n) {
        out.push_back(-double(n) * mode.gamma);
        out.push_back(-double(n) * mode.gamma);
    }
    for (double sign : {1.0, -1.0}) {
        Matrix tri = Matrix::Zero(levels, levels);
        for (std::size_t n = 0; n < levels; ++n) {
            tri(n, n) = -double(n) * mode.gamma;
            if (n + 1 < levels) {
                tri(n, n + 1) = sign * 2.0 * mode.c * std::sqrt(double(n + 1));
                tri(n + 1, n) = sign * std::sqrt(double(n + 1)) * (mode.c_prime - mode.c_dblprime);
            }
        }
        if (kind == TruncationKind::schur_terminated)
            tri(levels - 1, levels - 1) +=
                2.0 * mode.c * (mode.c_prime - mode.c_dblprime) / mode.gamma;
        const Eigen::ComplexEigenSolver<Matrix> es(tri, false);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
            out.push_back(es.eigenvalues()(i));
    }
    return out;
}

}  // namespace

TEST_SUITE("spectra") {

TEST_CASE("couplings zero, H = 0: exact ladder spectrum") {
    const HeomModel model =
        couplings_zero_model(2, {Complex(1.5, 0.0)}, Matrix(Matrix::Zero(2, 2)));
    const Truncation trunc = build_truncation(model, 4.6);  // {0,1,2,3}
    const std::vector<Complex> got =
        sorted_by_re_im(eigenvalues(assemble_schur_terminated(model, trunc)));
    REQUIRE(got.size() == 16);
    for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t rep = 0; rep < 4; ++rep) {
            const Complex want(-1.5 * double(3 - j), 0.0);
            CHECK(std::abs(got[j * 4 + rep] - want) <= 1e-12);
        }
}

TEST_CASE("couplings zero, H = sigma_x: commutator shifts per block") {
    const HeomModel model = couplings_zero_model(2, {Complex(2.0, 0.0)}, pauli_x());
    const Truncation trunc = build_truncation(model, 2.1);  // {0, 1}
    const std::vector<Complex> got = eigenvalues(assemble_naive(model, trunc));

    // oracle: eigenvalues of the 4x4 commutator superoperator, diagonalized
    // directly, shifted by -j gamma
    const Eigen::ComplexEigenSolver<Matrix> es(
        Matrix(Complex(0, -1) * commutator_superop(SystemOperator(pauli_x())).matrix()), false);
    std::vector<Complex> want;
    for (int j = 0; j < 2; ++j)
        for (Eigen::Index i = 0; i < 4; ++i)
            want.push_back(es.eigenvalues()(i) - 2.0 * double(j));
    CHECK(max_matching_distance(got, want) <= 1e-12);
    // the commutator spectrum of sigma_x is {0, 0, +-2i}
    const std::vector<Complex> cs = {es.eigenvalues()(0), es.eigenvalues()(1),
                                     es.eigenvalues()(2), es.eigenvalues()(3)};
    CHECK(max_matching_distance(cs, {Complex(0, -2), Complex(0, 2), Complex(0, 0),
                                     Complex(0, 0)}) <= 1e-12);
}

TEST_CASE("pure dephasing matches the scalar tridiagonal oracle") {
    const HeomModel model = dephasing_model(0.3);
    const Truncation trunc = build_truncation(model, 5.5);  // levels 0..5
    for (TruncationKind kind : {TruncationKind::naive, TruncationKind::schur_terminated}) {
        const TruncatedLiouvillian L = kind == TruncationKind::naive
                                           ? assemble_naive(model, trunc)
                                           : assemble_schur_terminated(model, trunc);
        const double scale = matrix_scale_estimate(L.matrix);
        CHECK(max_matching_distance(eigenvalues(L),
                                    dephasing_oracle(model, trunc.size(), kind)) <=
              1e-10 * scale);
    }
}

TEST_CASE("stability report flags instability and honest multiplicity") {
    // couplings zero: stable, but H = sigma_x has a degenerate commutator
    // kernel, so two eigenvalues sit on the axis at block 0 and gapped must
    // be false
    const HeomModel model = couplings_zero_model(2, {Complex(1.0, 0.0)}, pauli_x());
    const Truncation trunc = build_truncation(model, 2.5);
    const SpectrumReport report = stability_report(assemble_schur_terminated(model, trunc));
    CHECK(report.stable);
    CHECK(!report.gapped);
    CHECK(report.zero_mode_error <= 1e-12);
    CHECK(report.gap <= 1e-10);  // the second on-axis eigenvalue is also ~0

    // planted unstable eigenvalue
    const HeomModel toy = dephasing_model();
    const Truncation root = build_truncation(toy, 0.0);
    Matrix planted = Matrix::Zero(4, 4);
    planted(0, 0) = 0.1;
    planted(1, 1) = -1.0;
    planted(2, 2) = -2.0;
    planted(3, 3) = -3.0;
    const TruncatedLiouvillian fake{toy, root, TruncationKind::naive, planted};
    CHECK(!stability_report(fake).stable);
}

TEST_CASE("zero mode present for naive and schur on random models") {
    Rng rng(59);
    for (int trial = 0; trial < 6; ++trial) {
        const HeomModel model = random_model(2, 1 + trial % 2, rng);
        const Truncation trunc = build_truncation(model, 2.0);
        for (TruncationKind kind : {TruncationKind::naive, TruncationKind::schur_terminated}) {
            const TruncatedLiouvillian L = kind == TruncationKind::naive
                                               ? assemble_naive(model, trunc)
                                               : assemble_schur_terminated(model, trunc);
            const SpectrumReport report = stability_report(L);
            CHECK(report.zero_mode_error <= 1e-9 * report.matrix_scale);
        }
    }
}

TEST_CASE("convergence trace: couplings zero is depth-independent") {
    const HeomModel model = couplings_zero_model(2, {Complex(1.0, 0.0)}, pauli_x());
    const Window window{-0.5, 0.1, -3.0, 3.0};
    const ConvergenceTrace trace = convergence_trace(model, {1.0, 2.0, 3.0}, window);
    REQUIRE(trace.steps.size() == 3);
    for (std::size_t k = 1; k < 3; ++k) CHECK(trace.steps[k].distance_to_previous <= 1e-12);
}

TEST_CASE("convergence trace: dephasing distances decrease, schur at least as fast") {
    const HeomModel model = dephasing_model(0.3);
    const Window window{-2.5, 0.1, -1.0, 1.0};
    const ConvergenceTrace schur =
        convergence_trace(model, {4.0, 8.0, 16.0, 32.0}, window);
    REQUIRE(schur.steps.size() == 4);
    for (std::size_t k = 2; k < 4; ++k)
        CHECK(schur.steps[k].distance_to_previous <=
              schur.steps[k - 1].distance_to_previous + 1e-15);

    const ConvergenceTrace naive =
        convergence_trace(model, {4.0, 8.0, 16.0, 32.0}, window, TruncationKind::naive);
    // monitored, reported: the terminated trace settles at least as fast at
    // the final step
    CHECK(schur.steps[3].distance_to_previous <=
          naive.steps[3].distance_to_previous + 1e-12);
}

TEST_CASE("match_eigenvalue tracks the zero mode and far targets") {
    const HeomModel model = dephasing_model(0.25);
    const Window window{-2.5, 0.1, -1.0, 1.0};
    const ConvergenceTrace trace = convergence_trace(model, {4.0, 8.0, 16.0}, window);

    const auto zero_track = match_eigenvalue(trace, Complex(0, 0));
    REQUIRE(zero_track.size() == 3);
    for (const auto& match : zero_track) CHECK(match.distance <= 1e-10);

    const auto far_track = match_eigenvalue(trace, Complex(100.0, 100.0));
    for (const auto& match : far_track) {
        CHECK(match.distance > 100.0);
        CHECK(std::isfinite(match.distance));
    }

    // slowest nonzero mode is Cauchy against a deep reference
    const auto slow_ref = match_eigenvalue(
        convergence_trace(model, {24.0}, window), Complex(-0.8, 0.0));
    const auto slow_track = match_eigenvalue(trace, slow_ref[0].value);
    CHECK(std::abs(slow_track[2].value - slow_ref[0].value) <
          std::abs(slow_track[0].value - slow_ref[0].value) + 1e-12);
    CHECK(std::abs(slow_track[2].value - slow_track[1].value) <= 1e-4);
}

TEST_CASE("cluster ids group near-degenerate eigenvalues") {
    const HeomModel model = couplings_zero_model(2, {Complex(1.0, 0.0)},
                                                 Matrix(Matrix::Zero(2, 2)));
    const Truncation trunc = build_truncation(model, 2.5);
    const SpectrumReport report = stability_report(assemble_naive(model, trunc));
    // three exact eigenvalues 0, -1, -2, each with multiplicity 4
    std::map<int, int> sizes;
    for (int id : report.cluster_id) sizes[id]++;
    REQUIRE(sizes.size() == 3);
    for (const auto& [id, count] : sizes) CHECK(count == 4);
}

}  // TEST_SUITE
