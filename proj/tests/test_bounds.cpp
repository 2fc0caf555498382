#include <doctest.h>

#include <cmath>

#include "heomspec/bath.hpp"
#include "heomspec/bounds.hpp"
#include "heomspec/spectra.hpp"
#include "test_models.hpp"

using namespace heomspec;
using namespace heomspec::testing;

namespace {

const HeomModel& reduced_spin_boson() {
    static const HeomModel model = mode_subset(
        spin_boson_model(SpinBosonParams{2.0, 2.0, 0.5, 0.5, 50.0, 11},
                         aaa_fit_bose(0.5, 50.0, 11)),
        4.0);
    return model;
}

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("beta_lower basics") {
    const HeomModel model = toy_two_mode();
    const MultiIndex n({1, 1});
    const Complex gn = gamma_n(model, n);
    CHECK(beta_lower(model, n, -gn) == doctest::Approx(0.0));

    const HeomModel flat = dephasing_model();  // H = 0, spread 0
    CHECK(beta_lower(flat, MultiIndex({2}), Complex(1.0, 1.0)) ==
          doctest::Approx(std::abs(Complex(1.0, 1.0) + Complex(2.0, 0.0))));
}

TEST_CASE("beta_lower certifies the sampled diagonal resolvent") {
    Rng rng(79);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const HeomModel model = random_model(2, 2, rng);
        const MultiIndex n({trial % 3, (trial / 3) % 3});
        const Complex gn = gamma_n(model, n);
        const Complex z(0.2 + std::abs(gauss(rng)), 2.0 * gauss(rng));
        const Eigen::Index d = model.dim();
        Matrix inv(d * d, d * d);
        for (Eigen::Index kk = 0; kk < d * d; ++kk) {
            Matrix basis = Matrix::Zero(d, d);
            basis(kk / d, kk % d) = -1.0;
            inv.col(kk) = vectorize(
                diag_block_inverse(model.hamiltonian(), z + gn, SystemOperator(basis)));
        }
        const double sampled = sampled_induced_norm(Superoperator(d, inv), 24, 100 + trial);
        CHECK(sampled <= 1.0 / beta_lower(model, n, z) + 1e-9);
    }
}

TEST_CASE("certificates: couplings zero") {
    const HeomModel model = couplings_zero_model(
        2, {Complex(1.0, 0.0), Complex(3.0, 0.0)}, Matrix(Matrix::Zero(2, 2)));
    const Truncation trunc = build_truncation(model, 3.5);
    const GershgorinCertificate cert =
        gershgorin_certificate(model, trunc.indices(), Complex(1.0, 0.0));
    CHECK(cert.q_of_z == 0.0);
    REQUIRE(cert.conclusive());
    // bound = max over n of 1/|1 + gamma_n|, attained at n = 0
    CHECK(*cert.resolvent_bound == doctest::Approx(1.0));

    // inconclusive deep in the left half-plane: z on a segment
    const GershgorinCertificate bad =
        gershgorin_certificate(model, trunc.indices(), Complex(-1.0, 0.0));
    CHECK(!bad.conclusive());
}

TEST_CASE("corollary 1 region: q stays below one half") {
    Rng rng(83);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        const HeomModel model = random_model(2, 2, rng);
        const ModelConstants consts = model_constants(model);
        const std::vector<MultiIndex> indices = enumerate_below(
            model, consts.gamma_bar + consts.C + 20.0, 100000);
        for (int zi = 0; zi < 10; ++zi) {
            const Complex z(consts.gamma_bar + consts.C + 0.01 + std::abs(gauss(rng)) * 3.0,
                            gauss(rng) * 5.0);
            const GershgorinCertificate cert = gershgorin_certificate(model, indices, z);
            CHECK(cert.q_of_z <= 0.5 + 1e-12);
        }
    }
    // the reduced spin-boson model at z = Gamma' + gamma + C
    const HeomModel& sb = reduced_spin_boson();
    const Truncation trunc = build_truncation(sb, 2.0);
    const ModelConstants consts = model_constants(sb);
    const double gamma_prime = decay_rates_lower(sb, trunc).gamma_prime;
    const std::vector<MultiIndex> window =
        enumerate_below(sb, consts.gamma_bar + consts.C + gamma_prime + 10.0, 2000000);
    const GershgorinCertificate cert = gershgorin_certificate(
        sb, window, Complex(gamma_prime + consts.gamma_bar + consts.C, 0.0));
    CHECK(cert.q_of_z <= 0.5 + 1e-12);
}

TEST_CASE("resolvent bound check saturates on diagonal models") {
    const HeomModel model = couplings_zero_model(
        2, {Complex(1.0, 0.0), Complex(2.0, 0.0)}, Matrix(Matrix::Zero(2, 2)));
    const Truncation trunc = build_truncation(model, 2.5);
    const Complex z(1.0, 0.0);
    const GershgorinCertificate cert = gershgorin_certificate(model, trunc.indices(), z);
    REQUIRE(cert.conclusive());
    const CheckResult check = check_resolvent_bound(
        assemble_naive(model, trunc).matrix, 4, cert, 64, 5);
    CHECK(check.pass);
    // H = 0 diagonal blocks act as scalars, so sampling attains the bound
    CHECK(check.lhs == doctest::Approx(check.rhs).epsilon(1e-10));

    // conclusive certificate on a random small model
    Rng rng(89);
    const HeomModel rnd = random_model(2, 1, rng);
    const Truncation rt = build_truncation(rnd, 2.0);
    const ModelConstants consts = model_constants(rnd);
    const GershgorinCertificate rcert = gershgorin_certificate(
        rnd, rt.indices(), Complex(consts.gamma_bar + consts.C + 1.0, 0.5));
    REQUIRE(rcert.conclusive());
    CHECK(check_resolvent_bound(assemble_naive(rnd, rt).matrix, 4, rcert, 32, 7).pass);
}

TEST_CASE("tail resolvent checks") {
    const HeomModel model = dephasing_model(0.3);
    const Truncation trunc = build_truncation(model, 2.5);
    const DecayRates rates = decay_rates(model, trunc);

    // diagonal-only window at real z: equality approached at the slowest block
    const TailWindow diag = assemble_tail_window(model, trunc, 4.0, true);
    const std::vector<Complex> zs = {Complex(0.5, 0.0)};
    const auto diag_checks = tail_resolvent_check(diag, rates.gamma_prime, zs, 64, 11);
    REQUIRE(diag_checks.size() == 1);
    CHECK(diag_checks[0].pass);
    CHECK(diag_checks[0].lhs == doctest::Approx(diag_checks[0].rhs).epsilon(1e-9));

    // z = 0 with a positive full-tail rate
    REQUIRE(rates.gamma_cap > 0.0);
    const TailWindow full = assemble_tail_window(model, trunc, 4.0, false);
    const auto full_checks =
        tail_resolvent_check(full, rates.gamma_cap, {{Complex(0.0, 0.0)}}, 64, 13);
    CHECK(full_checks[0].pass);
    CHECK(full_checks[0].rhs == doctest::Approx(1.0 / rates.gamma_cap));

    // N=2 toy at z = i
    const HeomModel toy = toy_two_mode();
    const Truncation tt = build_truncation(toy, 2.0);
    const DecayRates tr = decay_rates(toy, tt);
    const TailWindow tw = assemble_tail_window(toy, tt, 3.0, false);
    const auto toy_checks = tail_resolvent_check(tw, tr.gamma_cap, {{Complex(0.0, 1.0)}}, 64, 17);
    CHECK(toy_checks[0].pass);

    CHECK_THROWS_AS(tail_resolvent_check(tw, tr.gamma_cap, {{Complex(-10.0, 0.0)}}, 4, 1),
                    std::invalid_argument);
}

TEST_CASE("off-diagonal block bounds") {
    const HeomModel zero = couplings_zero_model(2, {Complex(1.0, 0.0)}, pauli_x());
    const Truncation zt = build_truncation(zero, 2.5);
    for (const CheckResult& check : offdiag_block_bounds_check(zero, zt, 16, 19)) {
        CHECK(check.pass);
        CHECK(check.lhs == 0.0);
        CHECK(check.rhs == 0.0);
    }

    // single mode: L_JT has one nonzero block
    const HeomModel single = dephasing_model(0.4);
    const Truncation st = build_truncation(single, 3.5);
    const auto checks = offdiag_block_bounds_check(single, st, 64, 23);
    REQUIRE(checks.size() == 2);
    CHECK(checks[0].pass);
    CHECK(checks[1].pass);
    CHECK(checks[0].lhs > 0.0);

    for (const CheckResult& check :
         offdiag_block_bounds_check(reduced_spin_boson(),
                                    build_truncation(reduced_spin_boson(), 2.0), 32, 29))
        CHECK(check.pass);
}

TEST_CASE("schur defect: zero couplings and monotone decay") {
    const HeomModel zero = couplings_zero_model(2, {Complex(1.0, 0.0)}, pauli_x());
    const SchurDefectReport none =
        schur_defect(zero, build_truncation(zero, 2.0), Complex(0.0, 0.0), 4.0, 16, 31);
    CHECK(none.defect == 0.0);

    const HeomModel model = dephasing_model(0.3);
    std::vector<double> defects;
    for (double gs : {2.0, 6.0, 10.0}) {
        defects.push_back(schur_defect(model, build_truncation(model, gs), Complex(0.0, 0.0),
                                       3.0 * gs, 48, 37)
                              .defect);
    }
    CHECK(defects[0] > defects[1]);
    CHECK(defects[1] > defects[2]);

    // |z| dependence stays within the analytic factor
    const Truncation trunc = build_truncation(model, 2.0);
    const DecayRates rates = decay_rates(model, trunc);
    const ModelConstants consts = model_constants(model);
    const double d0 =
        schur_defect(model, trunc, Complex(0.0, 0.0), 6.0, 48, 41).defect;
    const double d2i =
        schur_defect(model, trunc, Complex(0.0, 2.0), 6.0, 48, 41).defect;
    const double base = std::sqrt(consts.C * (rates.gamma_prime + consts.gamma_bar)) /
                        rates.gamma_prime;
    const double ratio_bound = 1.0 + (2.0 / rates.gamma_cap) / base;
    CHECK(d2i <= d0 * ratio_bound * 1.1 + 1e-12);
}

TEST_CASE("lemma 4 decay along a doubling sequence within slack") {
    const HeomModel model = toy_two_mode();
    double prev = std::numeric_limits<double>::infinity();
    for (double gs : {2.0, 4.0, 8.0}) {
        const double defect =
            schur_defect(model, build_truncation(model, gs), Complex(0.5, 0.0), 2.0 * gs, 32, 43)
                .defect;
        CHECK(defect <= 1.1 * prev + 1e-9);
        prev = defect;
    }
}

TEST_CASE("unstable enclosure membership") {
    const HeomModel model = toy_two_mode();
    const EnclosureSet enc = unstable_enclosure(model);
    CHECK(enclosure_contains(enc, Complex(0.0, 0.0)));
    CHECK(enc.delta_cap > 0.0);

    // couplings zero: membership degenerates to the segments themselves
    const HeomModel zero = couplings_zero_model(2, {Complex(1.0, 0.0)}, pauli_x());
    const EnclosureSet zenc = unstable_enclosure(zero);
    CHECK(zenc.delta_cap == 0.0);
    CHECK(enclosure_contains(zenc, Complex(0.0, 1.5)));   // on S(0, H), spread 2
    CHECK(!enclosure_contains(zenc, Complex(0.1, 0.0)));  // off the segment
    CHECK(!enclosure_contains(zenc, Complex(0.0, 2.5)));  // beyond the spread
}

TEST_CASE("eigenvalues with nonnegative real part stay enclosed") {
    Rng rng(97);
    for (int trial = 0; trial < 4; ++trial) {
        const HeomModel model = random_model(2, 1 + trial % 2, rng, 0.6);
        const EnclosureSet enc = unstable_enclosure(model);
        const Truncation trunc = build_truncation(model, 2.0);
        for (TruncationKind kind : {TruncationKind::naive, TruncationKind::schur_terminated}) {
            const TruncatedLiouvillian L = kind == TruncationKind::naive
                                               ? assemble_naive(model, trunc)
                                               : assemble_schur_terminated(model, trunc);
            for (const Complex& lambda : eigenvalues(L))
                if (lambda.real() >= -1e-10) CHECK(enclosure_contains(enc, lambda));
        }
    }
}

TEST_CASE("bound suite passes on toys and surfaces injected faults") {
    const HeomModel zero = couplings_zero_model(2, {Complex(1.0, 0.0)}, pauli_x());
    BoundSuiteOptions opts;
    opts.gamma_star = 2.0;
    opts.lemma1_blocks = 10;
    opts.certificates = 5;
    opts.norm_samples = 32;
    const BoundSuiteReport zero_report = run_bound_suite(zero, opts);
    CHECK(zero_report.all_pass);

    const HeomModel toy = dephasing_model(0.3);
    const BoundSuiteReport toy_report = run_bound_suite(toy, opts);
    CHECK(toy_report.all_pass);

    BoundSuiteOptions corrupted = opts;
    corrupted.radius_scale = 0.0;
    const BoundSuiteReport fail_report = run_bound_suite(toy, corrupted);
    CHECK(!fail_report.all_pass);
}

}  // TEST_SUITE
