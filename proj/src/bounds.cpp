#include "heomspec/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "heomspec/rng.hpp"
#include "heomspec/spectra.hpp"

namespace heomspec {

namespace {

std::string complex_str(Complex z) {
    std::ostringstream os;
    os << "z=(" << z.real() << "," << z.imag() << ")";
    return os.str();
}

double block_trace_norm_sum(const Vector& stacked, Eigen::Index d) {
    double sum = 0.0;
    for (Eigen::Index off = 0; off + d * d <= stacked.size(); off += d * d)
        sum += trace_norm(devectorize(stacked.segment(off, d * d)));
    return sum;
}

// Random single-block rank-one hierarchy input: unit trace norm, supported on
// one block. These are the extreme points of the block-1-norm unit ball.
Vector random_block_rank_one(Eigen::Index n_blocks, Eigen::Index d, Rng& rng,
                             Eigen::Index& block_out) {
    std::uniform_int_distribution<Eigen::Index> pick(0, n_blocks - 1);
    block_out = pick(rng);
    const Vector u = random_unit_vector(d, rng);
    const Vector v = random_unit_vector(d, rng);
    Vector stacked = Vector::Zero(n_blocks * d * d);
    stacked.segment(block_out * d * d, d * d) = vectorize(SystemOperator(u * v.adjoint()));
    return stacked;
}

// Sampled lower bound of the block induced 1-norm of an explicit matrix.
double sampled_matrix_block_norm(const Matrix& m, Eigen::Index d, int samples, Rng& rng) {
    const Eigen::Index n_blocks = m.rows() / (d * d);
    double best = 0.0;
    for (int s = 0; s < samples; ++s) {
        Eigen::Index block = 0;
        const Vector input = random_block_rank_one(n_blocks, d, rng, block);
        best = std::max(best, block_trace_norm_sum(m * input, d));
    }
    return best;
}

}  // namespace

bool one_sided_pass(double lhs, double rhs) {
    return lhs <= rhs + kCheckSlackAbs + kCheckSlackRel * std::abs(rhs);
}

double beta_lower(const HeomModel& model, const MultiIndex& n, Complex z) {
    return segment_distance(z, SegmentSet(-gamma_n(model, n), spread(model.hamiltonian())));
}

GershgorinCertificate gershgorin_certificate(const HeomModel& model,
                                             std::span<const MultiIndex> indices,
                                             Complex z) {
    GershgorinCertificate cert;
    cert.z = z;
    const ModelConstants consts = model_constants(model);
    const double h_spread = spread(model.hamiltonian());

    bool conclusive = !indices.empty();
    double worst_margin = std::numeric_limits<double>::infinity();
    cert.q_of_z = 0.0;
    for (const MultiIndex& n : indices) {
        GershgorinRecord rec;
        rec.n = n;
        const Complex gn = gamma_n(model, n);
        rec.beta_lower = segment_distance(z, SegmentSet(-gn, h_spread));
        rec.radius_bound = gershgorin_radius_bound(consts, gn.real());
        cert.q_of_z = std::max(cert.q_of_z, rec.beta_lower > 0.0
                                                ? rec.radius_bound / rec.beta_lower
                                                : std::numeric_limits<double>::infinity());
        if (!(rec.beta_lower > rec.radius_bound)) conclusive = false;
        else worst_margin = std::min(worst_margin, rec.beta_lower - rec.radius_bound);
        cert.records.push_back(std::move(rec));
    }
    if (conclusive) cert.resolvent_bound = 1.0 / worst_margin;
    return cert;
}

CheckResult check_resolvent_bound(const Matrix& matrix, Eigen::Index block_dim,
                                  const GershgorinCertificate& cert, int samples,
                                  std::uint64_t seed) {
    if (!cert.conclusive())
        throw std::invalid_argument("check_resolvent_bound: certificate is inconclusive");
    const Eigen::Index size = matrix.rows();
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(block_dim))));
    if (d * d != block_dim || size != Eigen::Index(cert.records.size()) * block_dim)
        throw std::invalid_argument("check_resolvent_bound: matrix/certificate shape mismatch");

    const Matrix shifted = cert.z * Matrix::Identity(size, size) - matrix;
    const Eigen::PartialPivLU<Matrix> lu(shifted);

    Rng rng(seed);
    double best = 0.0;
    bool residuals_ok = true;
    for (int s = 0; s < samples; ++s) {
        Eigen::Index block = 0;
        const Vector input = random_block_rank_one(size / block_dim, d, rng, block);
        const Vector solved = lu.solve(input);
        if ((shifted * solved - input).norm() > 1e-10 * input.norm()) residuals_ok = false;
        best = std::max(best, block_trace_norm_sum(solved, d));
    }

    CheckResult out;
    out.name = "theorem1_resolvent";
    out.lhs = best;
    out.rhs = *cert.resolvent_bound;
    out.pass = residuals_ok && one_sided_pass(out.lhs, out.rhs);
    out.note = complex_str(cert.z) + " q=" + std::to_string(cert.q_of_z) +
               (residuals_ok ? "" : " SOLVE-RESIDUAL-FAIL");
    return out;
}

std::vector<CheckResult> tail_resolvent_check(const TailWindow& window, double gamma,
                                              std::span<const Complex> z_list,
                                              int samples, std::uint64_t seed) {
    const Eigen::Index size = window.matrix.rows();
    if (size == 0) throw std::invalid_argument("tail_resolvent_check: empty window");
    const Eigen::Index block_dim = size / Eigen::Index(window.indices.size());
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(block_dim))));

    std::vector<CheckResult> out;
    Rng rng(seed);
    for (const Complex& z : z_list) {
        if (!(z.real() + gamma > 1e-9))
            throw std::invalid_argument("tail_resolvent_check: Re z must exceed -Gamma");
        const Matrix shifted = z * Matrix::Identity(size, size) - window.matrix;
        const Eigen::PartialPivLU<Matrix> lu(shifted);
        double best = 0.0;
        bool residuals_ok = true;
        for (int s = 0; s < samples; ++s) {
            Eigen::Index block = 0;
            const Vector input = random_block_rank_one(size / block_dim, d, rng, block);
            const Vector solved = lu.solve(input);
            if ((shifted * solved - input).norm() > 1e-10 * input.norm()) residuals_ok = false;
            best = std::max(best, block_trace_norm_sum(solved, d));
        }
        CheckResult check;
        check.name = window.diagonal_only ? "prop1_tail_diag" : "prop1_tail";
        check.lhs = best;
        check.rhs = 1.0 / (z.real() + gamma);
        check.pass = residuals_ok && one_sided_pass(check.lhs, check.rhs);
        check.note = complex_str(z) + " window_size=" + std::to_string(window.indices.size()) +
                     "; principal tail sub-block, radii only shrink" +
                     (residuals_ok ? "" : " SOLVE-RESIDUAL-FAIL");
        out.push_back(std::move(check));
    }
    return out;
}

std::vector<CheckResult> offdiag_block_bounds_check(const HeomModel& model,
                                                    const Truncation& trunc,
                                                    int samples, std::uint64_t seed) {
    const ModelConstants consts = model_constants(model);
    const DecayRates rates = decay_rates_lower(model, trunc);
    const std::vector<MultiIndex> boundary = boundary_set(model, trunc);
    Rng rng(seed);

    // L_JT columns live on T sources; rows are boundary indices k = m + e_j.
    // L_TJ columns live on boundary sources k; rows are n = k - e_j in T.
    // A lower bound of either block 1-norm: max over columns of either the
    // best single-block sampled norm or the best sampled column sum.
    double lhs_jt = 0.0, lhs_tj = 0.0;
    std::uniform_int_distribution<std::uint64_t> reseed;
    for (const MultiIndex& k : boundary) {
        std::vector<std::pair<MultiIndex, std::size_t>> preds;  // (m = k - e_j, j)
        for (std::size_t j = 0; j < k.size(); ++j)
            if (k[j] > 0 && trunc.contains(k.lowered(j))) preds.emplace_back(k.lowered(j), j);
        if (preds.empty()) continue;

        // Single blocks, with ascent.
        for (const auto& [m, j] : preds) {
            const Superoperator down = *block(model, k, m);  // row k of L_JT, column m
            lhs_jt = std::max(lhs_jt, sampled_induced_norm(down, std::max(1, samples / 8),
                                                           reseed(rng)));
            const Superoperator up = *block(model, m, k);  // row m of L_TJ, column k
            lhs_tj = std::max(lhs_tj, sampled_induced_norm(up, std::max(1, samples / 8),
                                                           reseed(rng)));
        }
        // Column sums of L_TJ for source k: all rows n = k - e_j at once.
        for (int s = 0; s < std::max(1, samples / 4); ++s) {
            const Vector u = random_unit_vector(model.dim(), rng);
            const Vector v = random_unit_vector(model.dim(), rng);
            const SystemOperator rho(Matrix(u * v.adjoint()));
            double col = 0.0;
            for (const auto& [m, j] : preds) col += trace_norm(block(model, m, k)->apply(rho));
            lhs_tj = std::max(lhs_tj, col);
        }
    }
    // Column sums of L_JT for sources m in T.
    for (const MultiIndex& m : trunc.indices()) {
        std::vector<MultiIndex> rows;
        for (std::size_t j = 0; j < m.size(); ++j)
            if (!trunc.contains(m.raised(j))) rows.push_back(m.raised(j));
        if (rows.empty()) continue;
        for (int s = 0; s < std::max(1, samples / 4); ++s) {
            const Vector u = random_unit_vector(model.dim(), rng);
            const Vector v = random_unit_vector(model.dim(), rng);
            const SystemOperator rho(Matrix(u * v.adjoint()));
            double col = 0.0;
            for (const MultiIndex& k : rows) col += trace_norm(block(model, k, m)->apply(rho));
            lhs_jt = std::max(lhs_jt, col);
        }
    }

    std::vector<CheckResult> out(2);
    out[0].name = "offdiag_L_JT";
    out[0].lhs = lhs_jt;
    out[0].rhs = std::sqrt(consts.C * (rates.gamma_prime + consts.gamma_bar));
    out[0].pass = one_sided_pass(out[0].lhs, out[0].rhs);
    out[0].note = "Gamma'=" + std::to_string(rates.gamma_prime);
    out[1].name = "offdiag_L_TJ";
    out[1].lhs = lhs_tj;
    out[1].rhs = std::sqrt(consts.C * (rates.gamma_prime + consts.gamma_tilde));
    out[1].pass = one_sided_pass(out[1].lhs, out[1].rhs);
    out[1].note = "Gamma'=" + std::to_string(rates.gamma_prime);
    return out;
}

SchurDefectReport schur_defect(const HeomModel& model, const Truncation& trunc, Complex z,
                               double oracle_depth, int samples, std::uint64_t seed) {
    const DecayRates rates = decay_rates_lower(model, trunc);
    if (!(z.real() > -rates.gamma_cap))
        throw std::invalid_argument(
            "schur_defect: Re z must exceed -Gamma_T of the oracle window");

    const TailWindow window = assemble_tail_window(model, trunc, oracle_depth);
    if (window.indices.empty())
        throw std::invalid_argument("schur_defect: empty oracle window");

    // Assemble the enlarged hierarchy on T united with the window and read the
    // four blocks off it through index positions.
    std::vector<MultiIndex> union_indices = trunc.indices();
    union_indices.insert(union_indices.end(), window.indices.begin(), window.indices.end());
    const Truncation enlarged = Truncation::from_indices(std::move(union_indices));
    const Matrix big = assemble_naive(model, enlarged).matrix;

    const Eigen::Index dd = model.dim() * model.dim();
    const Eigen::Index nt = Eigen::Index(trunc.size());
    const Eigen::Index nw = Eigen::Index(window.indices.size());
    std::vector<Eigen::Index> pos_t(nt), pos_w(nw);
    for (Eigen::Index i = 0; i < nt; ++i) pos_t[i] = Eigen::Index(*enlarged.position(trunc[i]));
    for (Eigen::Index i = 0; i < nw; ++i)
        pos_w[i] = Eigen::Index(*enlarged.position(window.indices[i]));

    auto extract = [&](const std::vector<Eigen::Index>& rows,
                       const std::vector<Eigen::Index>& cols) {
        Matrix out(rows.size() * dd, cols.size() * dd);
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols.size(); ++j)
                out.block(i * dd, j * dd, dd, dd) =
                    big.block(rows[i] * dd, cols[j] * dd, dd, dd);
        return out;
    };
    const Matrix a_tt = extract(pos_t, pos_t);
    const Matrix b_tw = extract(pos_t, pos_w);
    const Matrix c_wt = extract(pos_w, pos_t);
    const Matrix d_ww = extract(pos_w, pos_w);

    const Matrix shifted_tail = z * Matrix::Identity(nw * dd, nw * dd) - d_ww;
    const Matrix schur = z * Matrix::Identity(nt * dd, nt * dd) - a_tt -
                         b_tw * Eigen::PartialPivLU<Matrix>(shifted_tail).solve(c_wt);

    const Matrix terminated = assemble_schur_terminated(model, trunc).matrix;
    const Matrix defect_matrix =
        schur - (z * Matrix::Identity(nt * dd, nt * dd) - terminated);

    Rng rng(seed);
    SchurDefectReport report;
    report.z = z;
    report.oracle_depth = oracle_depth;
    report.window_size = window.indices.size();
    report.defect = sampled_matrix_block_norm(defect_matrix, model.dim(), samples, rng);
    return report;
}

EnclosureSet unstable_enclosure(const HeomModel& model) {
    EnclosureSet enc;
    enc.consts = model_constants(model);
    enc.h_spread = spread(model.hamiltonian());
    double gamma_min = std::numeric_limits<double>::infinity();
    for (const BathMode& m : model.modes()) {
        enc.mode_gammas.push_back(m.gamma);
        gamma_min = std::min(gamma_min, m.gamma.real());
    }
    enc.delta_cap = enc.consts.C * (gamma_min + enc.consts.gamma_tilde) / gamma_min;

    // Candidates must satisfy Re gamma_n <= 2 Delta + sqrt(C (Re gamma_n +
    // gamma)); the larger quadratic root bounds the feasible region for any z
    // with Re z >= 0.
    const double c = enc.consts.C, g = enc.consts.gamma_bar, delta2 = 2.0 * enc.delta_cap;
    const double b_coef = 2.0 * delta2 + c;
    const double discriminant = std::max(0.0, b_coef * b_coef - 4.0 * (delta2 * delta2 - c * g));
    enc.scan_bound = 0.5 * (b_coef + std::sqrt(discriminant));
    return enc;
}

namespace {

// DFS over candidate multi-indices with subtree pruning: along any branch
// Re gamma_n only grows, while the admissible radius grows like sqrt. The
// membership comparison carries the uniform one-sided slack, so eigenvalues
// perturbed by solver roundoff stay inside degenerate (C = 0) enclosures.
bool enclosure_dfs(const EnclosureSet& enc, Complex z, std::size_t j, Complex acc) {
    const double re = acc.real();
    const double reach = gershgorin_radius_bound(enc.consts, re) + 2.0 * enc.delta_cap;
    const double slack = 2.0 * kCheckSlackAbs + kCheckSlackRel * reach;
    // dist(z, S(-acc, H)) >= Re z + Re gamma_n for Re z >= 0; once that
    // exceeds the reach, every descendant fails too.
    if (std::max(z.real(), 0.0) + re > reach + slack) return false;
    if (j == enc.mode_gammas.size())
        return one_sided_pass(segment_distance(z, SegmentSet(-acc, enc.h_spread)), reach);
    for (int k = 0;; ++k) {
        const Complex acc_k = acc + double(k) * enc.mode_gammas[j];
        if (acc_k.real() > enc.scan_bound) break;
        const double reach_k = gershgorin_radius_bound(enc.consts, acc_k.real()) +
                               2.0 * enc.delta_cap;
        const double slack_k = 2.0 * kCheckSlackAbs + kCheckSlackRel * reach_k;
        if (std::max(z.real(), 0.0) + acc_k.real() > reach_k + slack_k) break;
        if (enclosure_dfs(enc, z, j + 1, acc_k)) return true;
    }
    return false;
}

}  // namespace

bool enclosure_contains(const EnclosureSet& enc, Complex z) {
    return enclosure_dfs(enc, z, 0, Complex(0.0, 0.0));
}

// ---------------------------------------------------------------------------

BoundSuiteReport run_bound_suite(const HeomModel& model, const BoundSuiteOptions& opts) {
    BoundSuiteReport report;
    auto push = [&](CheckResult check) {
        report.all_pass = report.all_pass && check.pass;
        report.checks.push_back(std::move(check));
    };

    const ModelConstants consts = model_constants(model);
    double gamma_min = std::numeric_limits<double>::infinity();
    for (const BathMode& m : model.modes()) gamma_min = std::min(gamma_min, m.gamma.real());

    Rng rng(opts.seed);
    std::uniform_int_distribution<std::uint64_t> reseed;
    std::normal_distribution<double> gauss(0.0, 1.0);

    const Truncation trunc = build_truncation(model, opts.gamma_star, opts.size_cap);
    const DecayRates rates = decay_rates_lower(model, trunc);

    // Lemma 2: full column radius of the assembled Liouvillian, sampled per
    // block, against the closed-form radius bound (scaled by the test hook).
    for (const MultiIndex& n : trunc.indices()) {
        double column = 0.0;
        for (std::size_t j = 0; j < model.mode_count(); ++j) {
            column += sampled_induced_norm(*block(model, n.raised(j), n),
                                           std::max(1, opts.norm_samples / 8), reseed(rng));
            if (n[j] > 0)
                column += sampled_induced_norm(*block(model, n.lowered(j), n),
                                               std::max(1, opts.norm_samples / 8), reseed(rng));
        }
        CheckResult check;
        check.name = "lemma2_radius";
        check.lhs = column;
        check.rhs = opts.radius_scale * gershgorin_radius_bound(consts, gamma_n(model, n).real());
        check.pass = one_sided_pass(check.lhs, check.rhs);
        std::ostringstream note;
        note << "n=(";
        for (std::size_t j = 0; j < n.size(); ++j) note << (j ? "," : "") << n[j];
        note << ")";
        check.note = note.str();
        push(std::move(check));
    }

    // Lemma 1: sampled resolvent norm of explicit diagonal-block inverses
    // against 1/dist(z, S(-gamma_n, H)).
    {
        const std::vector<MultiIndex> pool = enumerate_below(
            model, *trunc.gamma_star() + consts.gamma_bar + 1.0, opts.size_cap);
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        double im_scale = 1.0 + spread(model.hamiltonian());
        for (const BathMode& m : model.modes()) im_scale += std::abs(m.gamma.imag());
        for (int i = 0; i < opts.lemma1_blocks; ++i) {
            const MultiIndex& n = pool[pick(rng)];
            const Complex gn = gamma_n(model, n);
            const Complex z(0.1 + std::abs(gauss(rng)), gauss(rng) * im_scale);
            // (z - L_nn)^{-1} rhs solves -i[H, X] - (z + gamma_n) X = -rhs.
            const Eigen::Index d = model.dim();
            Matrix inv(d * d, d * d);
            for (Eigen::Index kk = 0; kk < d * d; ++kk) {
                Matrix basis_op = Matrix::Zero(d, d);
                basis_op(kk / d, kk % d) = -1.0;
                inv.col(kk) = vectorize(
                    diag_block_inverse(model.hamiltonian(), z + gn, SystemOperator(basis_op)));
            }
            CheckResult check;
            check.name = "lemma1_resolvent";
            check.lhs = sampled_induced_norm(Superoperator(d, std::move(inv)),
                                             std::max(1, opts.norm_samples / 4), reseed(rng));
            check.rhs = 1.0 / beta_lower(model, n, z);
            check.pass = one_sided_pass(check.lhs, check.rhs);
            check.note = complex_str(z);
            push(std::move(check));
        }
    }

    // Theorem 1: conclusive certificates on the assembled truncation.
    {
        const Matrix naive = assemble_naive(model, trunc).matrix;
        for (int i = 0; i < opts.certificates; ++i) {
            const double base = consts.gamma_bar + consts.C;
            const Complex z(base * (1.05 + 0.5 * std::abs(gauss(rng))) + 0.1,
                            gauss(rng) * (1.0 + consts.gamma_bar));
            const GershgorinCertificate cert =
                gershgorin_certificate(model, trunc.indices(), z);
            if (!cert.conclusive()) {
                CheckResult check;
                check.name = "theorem1_resolvent";
                check.pass = false;
                check.note = complex_str(z) + " unexpectedly inconclusive";
                push(std::move(check));
                continue;
            }
            push(check_resolvent_bound(naive, model.dim() * model.dim(), cert,
                                       std::max(1, opts.norm_samples / 4), reseed(rng)));
        }
    }

    // Proposition 1: tail windows, full and diagonal-only.
    for (int w = 0; w < opts.tail_windows; ++w) {
        const double extra = (w + 1) * 0.5 * std::max(*trunc.gamma_star(), gamma_min);
        const bool diagonal_only = w % 2 == 1;
        const TailWindow window = assemble_tail_window(model, trunc, extra, diagonal_only);
        const double gamma = diagonal_only ? rates.gamma_prime : rates.gamma_cap;
        std::vector<Complex> zs;
        for (int i = 0; i < opts.z_per_window; ++i)
            zs.emplace_back(std::max(0.0, -gamma) + 0.25 * (i + 1) * (1.0 + std::abs(gamma)),
                            (i - 2) * 0.5);
        for (CheckResult& check : tail_resolvent_check(window, gamma, zs,
                                                       std::max(1, opts.norm_samples / 4),
                                                       reseed(rng)))
            push(std::move(check));
    }

    // Off-diagonal block bounds over a family of truncations.
    {
        std::vector<double> stars = opts.offdiag_gamma_stars;
        if (stars.empty())
            stars = {opts.gamma_star, 1.5 * opts.gamma_star, 2.0 * opts.gamma_star};
        for (double gs : stars)
            for (CheckResult& check :
                 offdiag_block_bounds_check(model, build_truncation(model, gs, opts.size_cap),
                                            opts.norm_samples, reseed(rng)))
                push(std::move(check));
    }

    // Lemma 4: Schur defect decays along an exhausting triple (10% slack for
    // sampling noise).
    {
        std::vector<double> stars = opts.defect_gamma_stars;
        if (stars.empty())
            stars = {1.2 * gamma_min, 2.4 * gamma_min, 4.8 * gamma_min};
        const double z_re = std::max(0.0, -decay_rates_lower(
                                               model, build_truncation(model, stars[0],
                                                                       opts.size_cap))
                                               .gamma_cap) +
                            1.0;
        double prev = std::numeric_limits<double>::infinity();
        for (double gs : stars) {
            const SchurDefectReport defect =
                schur_defect(model, build_truncation(model, gs, opts.size_cap), Complex(z_re, 0),
                             opts.defect_oracle_factor * gs, opts.norm_samples, reseed(rng));
            CheckResult check;
            check.name = "lemma4_defect";
            check.lhs = defect.defect;
            check.rhs = std::isfinite(prev) ? 1.1 * prev
                                            : std::numeric_limits<double>::infinity();
            check.pass = check.lhs <= check.rhs + kCheckSlackAbs;
            std::ostringstream note;
            note << "gamma_star=" << gs << " oracle_depth=" << defect.oracle_depth
                 << " window=" << defect.window_size;
            check.note = note.str();
            prev = defect.defect;
            push(std::move(check));
        }
    }

    // Lemma 5: containment of near-unstable eigenvalues of both kinds.
    {
        const EnclosureSet enc = unstable_enclosure(model);
        for (TruncationKind kind : {TruncationKind::naive, TruncationKind::schur_terminated}) {
            const TruncatedLiouvillian L = kind == TruncationKind::naive
                                               ? assemble_naive(model, trunc)
                                               : assemble_schur_terminated(model, trunc);
            int tested = 0, violations = 0;
            for (const Complex& lambda : eigenvalues(L)) {
                if (lambda.real() < -1e-10) continue;
                ++tested;
                if (!enclosure_contains(enc, lambda)) ++violations;
            }
            CheckResult check;
            check.name = std::string("lemma5_containment_") + to_string(kind);
            check.lhs = violations;
            check.rhs = 0.0;
            check.pass = violations == 0;
            check.note = std::to_string(tested) + " eigenvalues with Re >= -1e-10";
            push(std::move(check));
        }
    }

    return report;
}

}  // namespace heomspec
