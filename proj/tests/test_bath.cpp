#include <doctest.h>

#include <cmath>

#include "heomspec/assembly.hpp"
#include "heomspec/bath.hpp"
#include "test_models.hpp"

using namespace heomspec;
using namespace heomspec::testing;

namespace {

const RationalBathFit& table_fit() {
    static const RationalBathFit fit = aaa_fit_bose(0.5, 50.0, 11);
    return fit;
}

SpinBosonParams paper_params() { return SpinBosonParams{2.0, 2.0, 0.5, 0.5, 50.0, 11}; }

}  // namespace

TEST_SUITE("bath") {

TEST_CASE("spectral density: zero, resonance, odd symmetry") {
    const SpinBosonParams params = paper_params();
    CHECK(spectral_density(params, 0.0) == 0.0);
    // J(omega0) = alpha omega0^3 / (4 eta^2)
    CHECK(spectral_density(params, 2.0) == doctest::Approx(16.0));
    Rng rng(61);
    std::normal_distribution<double> gauss(0.0, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double w = gauss(rng);
        CHECK(spectral_density(params, -w) == doctest::Approx(-spectral_density(params, w)));
    }
}

TEST_CASE("fixed-order fit reproduces the published pole table") {
    const RationalBathFit& fit = table_fit();
    REQUIRE(fit.nu.size() == 11);
    const std::vector<double> nu_ref = {341.9, 110.8, 63.00, 41.63, 29.38, 21.57,
                                        16.35, 12.63, 9.426, 6.283, 3.145};
    const std::vector<double> r_ref = {219.2, 24.98, 9.358, 4.958, 3.055, 2.009,
                                       1.367, 1.058, 1.002, 1.000, 1.000};
    // largest pole and residue are grid-sensitive; the low ladder is tight
    CHECK(std::abs(fit.nu[0] - nu_ref[0]) / nu_ref[0] < 0.05);
    CHECK(std::abs(fit.r[0] - r_ref[0]) / r_ref[0] < 0.05);
    for (int j = 2; j < 8; ++j) CHECK(std::abs(fit.nu[j] - nu_ref[j]) / nu_ref[j] < 0.01);
    for (int j = 8; j < 11; ++j) {
        CHECK(std::abs(fit.nu[j] - nu_ref[j]) / nu_ref[j] < 0.003);
        CHECK(std::abs(fit.r[j] - r_ref[j]) / r_ref[j] < 0.005);
    }
    CHECK(fit.residues_real_positive);
    CHECK(fit.zero_pole_residue == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(fit.max_rel_error < 1e-5);
}

TEST_CASE("smallest poles anchor to the Matsubara ladder") {
    const RationalBathFit& fit = table_fit();
    for (int k = 1; k <= 3; ++k) {
        const double matsubara = 2.0 * M_PI * 0.5 * k;  // = pi k at T = 1/2
        const double got = fit.nu[fit.nu.size() - k];
        CHECK(std::abs(got - matsubara) / matsubara < 0.002);
    }
}

TEST_CASE("bose_eval: coth anchor, asymptotics, oddness") {
    const RationalBathFit& fit = table_fit();
    CHECK(std::abs(bose_eval(fit, 1.0) - 1.0 / std::tanh(1.0)) < 1e-4);

    double residue_sum = 0.0;
    for (double r : fit.r) residue_sum += r;
    const double w_large = 2.0e4;
    CHECK(bose_eval(fit, w_large) * w_large ==
          doctest::Approx(2.0 * fit.temperature + 2.0 * residue_sum).epsilon(1e-3));

    Rng rng(67);
    std::normal_distribution<double> gauss(0.0, 10.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double w = gauss(rng);
        if (std::abs(w) < 1e-3) continue;
        CHECK(bose_eval(fit, -w) == doctest::Approx(-bose_eval(fit, w)));
    }
}

TEST_CASE("tolerance mode converges on a fresh grid") {
    const RationalBathFit fit = aaa_fit_bose_tol(0.5, 50.0, 1e-8);
    CHECK(fit.max_rel_error <= 1e-6);
    // independent validation on random points
    Rng rng(71);
    std::uniform_real_distribution<double> wdist(0.05, 50.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double w = wdist(rng);
        const double exact = 1.0 / std::tanh(w);
        CHECK(std::abs(bose_eval(fit, w) - exact) <= 1e-6 * std::abs(exact));
    }
}

TEST_CASE("zero-pole-only fit") {
    const RationalBathFit fit = aaa_fit_bose(0.5, 50.0, 0);
    CHECK(fit.nu.empty());
    CHECK(bose_eval(fit, 2.0) == doctest::Approx(0.5));  // 2T/omega
}

TEST_CASE("fit rejects invalid parameters") {
    CHECK_THROWS_AS(aaa_fit_bose(-0.5, 50.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(aaa_fit_bose(0.5, 0.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(aaa_fit_bose_tol(0.5, 50.0, 1e-14, 6), std::runtime_error);
}

TEST_CASE("spin-boson mode parameters") {
    const HeomModel model = spin_boson_model(paper_params(), table_fit());
    REQUIRE(model.mode_count() == 13);  // 2 dynamical + 11 fluctuation poles

    const BathMode& m1 = model.modes()[0];
    const BathMode& m2 = model.modes()[1];
    CHECK(m1.gamma.real() == doctest::Approx(0.5));
    CHECK(m1.gamma.imag() == doctest::Approx(std::sqrt(4.0 - 0.25)));  // 1.9365
    CHECK(m2.gamma == std::conj(m1.gamma));
    CHECK(m2.c == m1.c);
    CHECK(m1.c.real() == doctest::Approx(0.0));
    for (const BathMode& m : model.modes()) CHECK(m.gamma.real() > 0.0);

    // paired-conjugation pattern of the coupling constants
    CHECK(std::abs(m1.c_prime - std::conj(m2.c_dblprime)) < 1e-12);
    CHECK(std::abs(m1.c_dblprime - std::conj(m2.c_prime)) < 1e-12);
}

TEST_CASE("overdamped and mismatched inputs are rejected") {
    SpinBosonParams params = paper_params();
    params.eta = 2.5;  // overdamped
    CHECK_THROWS_AS(spin_boson_model(params, table_fit()), std::invalid_argument);

    SpinBosonParams wrong_t = paper_params();
    wrong_t.temperature = 0.7;
    CHECK_THROWS_AS(spin_boson_model(wrong_t, table_fit()), std::invalid_argument);
}

TEST_CASE("mode subsets keep the dynamical pair") {
    const HeomModel model = spin_boson_model(paper_params(), table_fit());
    CHECK(mode_subset(model, std::numeric_limits<double>::infinity()).mode_count() == 13);

    const HeomModel reduced = mode_subset(model, 10.0);
    REQUIRE(reduced.mode_count() == 5);
    CHECK(reduced.modes()[2].gamma.real() == doctest::Approx(9.426).epsilon(0.003));
    CHECK(reduced.modes()[3].gamma.real() == doctest::Approx(6.283).epsilon(0.003));
    CHECK(reduced.modes()[4].gamma.real() == doctest::Approx(3.145).epsilon(0.003));

    CHECK(mode_subset(model, 0.0).mode_count() == 2);
}

TEST_CASE("spin-boson pairing keeps conjugation-symmetric stacks consistent") {
    // Hermiticity pattern of the hierarchy: swapping the two dynamical modes
    // conjugates the ADOs. Threshold truncations are closed under the swap.
    const HeomModel model = mode_subset(spin_boson_model(paper_params(), table_fit()), 4.0);
    REQUIRE(model.mode_count() == 3);
    const Truncation trunc = build_truncation(model, 2.5);
    const Matrix naive = assemble_naive(model, trunc).matrix;

    auto swapped = [&](const MultiIndex& n) {
        return MultiIndex({n[1], n[0], n[2]});
    };
    Rng rng(73);
    for (int trial = 0; trial < 5; ++trial) {
        Vector stack(trunc.size() * 4);
        // fill orbits: rho_{nbar} = rho_n^dagger
        for (std::size_t i = 0; i < trunc.size(); ++i) {
            const MultiIndex& n = trunc[i];
            const MultiIndex nbar = swapped(n);
            const auto pos_bar = trunc.position(nbar);
            REQUIRE(pos_bar);  // threshold truncation is swap-symmetric
            if (nbar < n) continue;
            if (n == nbar) {
                stack.segment(i * 4, 4) = vectorize(random_hermitian(2, rng));
            } else {
                const Matrix x = random_matrix(2, 2, rng);
                stack.segment(i * 4, 4) = vectorize(SystemOperator(x));
                stack.segment(*pos_bar * 4, 4) = vectorize(SystemOperator(Matrix(x.adjoint())));
            }
        }
        const Vector image = naive * stack;
        for (std::size_t i = 0; i < trunc.size(); ++i) {
            const auto pos_bar = trunc.position(swapped(trunc[i]));
            const Matrix xi = devectorize(image.segment(i * 4, 4)).matrix();
            const Matrix xbar = devectorize(image.segment(*pos_bar * 4, 4)).matrix();
            CHECK((xi - xbar.adjoint()).norm() <= 1e-12 * std::max(1.0, xi.norm()));
        }
    }
}

}  // TEST_SUITE
