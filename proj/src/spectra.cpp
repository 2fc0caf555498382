#include "heomspec/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "heomspec/rng.hpp"

namespace heomspec {

namespace {

struct EigResult {
    std::vector<Complex> values;
    Matrix right_vectors;
};

EigResult zgeev_eigendecomposition(const Matrix& m) {
    const auto n = static_cast<lapack_int>(m.rows());
    Matrix a = m;  // zgeev overwrites its input
    EigResult out;
    out.values.resize(n);
    out.right_vectors.resize(n, n);
    const lapack_int info = LAPACKE_zgeev(
        LAPACK_COL_MAJOR, 'N', 'V', n, a.data(), n, out.values.data(), nullptr, 1,
        out.right_vectors.data(), n);
    if (info != 0)
        throw std::runtime_error("eigenvalues: LAPACK zgeev failed with info " +
                                 std::to_string(info));
    return out;
}

void check_residuals(const Matrix& m, const EigResult& eig, double scale) {
    const Eigen::Index n = m.rows();
    if (n == 0 || scale == 0.0) return;
    // Sample eigenpairs spread over the spectrum ordering.
    const Eigen::Index n_checks = std::min<Eigen::Index>(n, 16);
    for (Eigen::Index k = 0; k < n_checks; ++k) {
        const Eigen::Index i = k * (n - 1) / std::max<Eigen::Index>(1, n_checks - 1);
        const Vector v = eig.right_vectors.col(i);
        const double residual = (m * v - eig.values[i] * v).norm() / v.norm();
        if (!(residual <= 1e-8 * scale))
            throw std::runtime_error("eigenvalues: eigenpair residual " +
                                     std::to_string(residual / scale) +
                                     " exceeds 1e-8 of the matrix scale");
    }
}

std::vector<int> cluster_ids(const std::vector<Complex>& values, double radius) {
    const std::size_t n = values.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    // Single-linkage within the clustering radius; candidates are prefiltered
    // by real part to keep the scan near-linear.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return values[a].real() < values[b].real();
    });
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
            const std::size_t i = order[a], j = order[b];
            if (values[j].real() - values[i].real() > radius) break;
            if (std::abs(values[i] - values[j]) <= radius) {
                const auto ri = find(i), rj = find(j);
                if (ri != rj) parent[rj] = ri;
            }
        }
    std::vector<int> ids(n, -1);
    int next = 0;
    for (std::size_t i : order) {
        const std::size_t root = find(i);
        if (ids[root] < 0) ids[root] = next++;
        ids[i] = ids[root];
    }
    return ids;
}

}  // namespace

double matrix_scale_estimate(const Matrix& m) {
    if (m.rows() == 0) return 0.0;
    Rng rng(0x5ca1e);
    Vector v = random_unit_vector(m.rows(), rng);
    double estimate = 0.0;
    for (int it = 0; it < 40; ++it) {
        Vector w = m * v;
        const double norm = w.norm();
        if (norm < 1e-300) return 0.0;
        v = m.adjoint() * w;
        estimate = std::sqrt(v.norm());
        const double vnorm = v.norm();
        if (vnorm < 1e-300) return 0.0;
        v /= vnorm;
    }
    return estimate;
}

std::vector<Complex> eigenvalues(const TruncatedLiouvillian& L) {
    const EigResult eig = zgeev_eigendecomposition(L.matrix);
    check_residuals(L.matrix, eig, matrix_scale_estimate(L.matrix));
    return eig.values;
}

SpectrumReport stability_report(const TruncatedLiouvillian& L, double tol_rel) {
    SpectrumReport report;
    const EigResult eig = zgeev_eigendecomposition(L.matrix);
    report.matrix_scale = matrix_scale_estimate(L.matrix);
    check_residuals(L.matrix, eig, report.matrix_scale);
    report.eigenvalues = eig.values;
    report.cluster_id = cluster_ids(report.eigenvalues, 1e-6 * report.matrix_scale);

    const double tol = tol_rel * report.matrix_scale;
    report.spectral_abscissa = -std::numeric_limits<double>::infinity();
    report.zero_mode_error = std::numeric_limits<double>::infinity();
    for (const Complex& lambda : report.eigenvalues) {
        report.spectral_abscissa = std::max(report.spectral_abscissa, lambda.real());
        report.zero_mode_error = std::min(report.zero_mode_error, std::abs(lambda));
    }
    report.stable = report.spectral_abscissa <= tol;

    // Eigenvalues within tol of the imaginary axis; gapped means the zero
    // mode is the only one.
    std::vector<Complex> on_axis;
    for (const Complex& lambda : report.eigenvalues)
        if (std::abs(lambda.real()) <= tol) on_axis.push_back(lambda);
    report.gapped = on_axis.size() == 1 && std::abs(on_axis.front()) <= tol;
    report.gap = std::numeric_limits<double>::infinity();
    if (on_axis.size() > 1) {
        std::sort(on_axis.begin(), on_axis.end(),
                  [](Complex a, Complex b) { return std::abs(a) < std::abs(b); });
        report.gap = std::abs(on_axis[1]);
    }
    return report;
}

Window default_trace_window(const HeomModel& model, double gamma_prime_min) {
    double max_im_gamma = 0.0;
    for (const BathMode& m : model.modes())
        max_im_gamma = std::max(max_im_gamma, std::abs(m.gamma.imag()));
    const double im = 2.0 * (2.0 * spectral_norm(model.hamiltonian()) + max_im_gamma);
    return Window{-0.05 * gamma_prime_min, 0.1, -im, im};
}

ConvergenceTrace convergence_trace(const HeomModel& model,
                                   const std::vector<double>& gamma_star_list,
                                   const Window& window, TruncationKind kind) {
    ConvergenceTrace trace;
    trace.window = window;
    trace.kind = kind;
    const std::vector<Truncation> truncations = exhausting_sequence(model, gamma_star_list);
    for (std::size_t k = 0; k < truncations.size(); ++k) {
        const Truncation& trunc = truncations[k];
        ConvergenceStep step;
        step.gamma_star = gamma_star_list[k];
        step.gamma_prime = decay_rates_lower(model, trunc).gamma_prime;
        step.truncation_size = trunc.size();

        const TruncatedLiouvillian L = kind == TruncationKind::naive
                                           ? assemble_naive(model, trunc)
                                           : assemble_schur_terminated(model, trunc);
        for (const Complex& lambda : eigenvalues(L))
            if (window.contains(lambda)) step.window_eigenvalues.push_back(lambda);

        if (k == 0) {
            step.distance_to_previous = 0.0;
        } else {
            const auto& prev = trace.steps.back().window_eigenvalues;
            if (step.window_eigenvalues.empty()) {
                step.distance_to_previous = prev.empty()
                                                ? 0.0
                                                : std::numeric_limits<double>::infinity();
            } else if (prev.empty()) {
                step.distance_to_previous = std::numeric_limits<double>::infinity();
            } else {
                double haus = 0.0;
                for (const Complex& nu : step.window_eigenvalues) {
                    double nearest = std::numeric_limits<double>::infinity();
                    for (const Complex& old : prev)
                        nearest = std::min(nearest, std::abs(nu - old));
                    haus = std::max(haus, nearest);
                }
                step.distance_to_previous = haus;
            }
        }
        trace.steps.push_back(std::move(step));
    }
    return trace;
}

std::vector<MatchedEigenvalue> match_eigenvalue(const ConvergenceTrace& trace,
                                                Complex target) {
    std::vector<MatchedEigenvalue> out;
    for (const ConvergenceStep& step : trace.steps) {
        MatchedEigenvalue match;
        match.distance = std::numeric_limits<double>::infinity();
        match.value = Complex(std::numeric_limits<double>::quiet_NaN(),
                              std::numeric_limits<double>::quiet_NaN());
        for (const Complex& lambda : step.window_eigenvalues) {
            const double dist = std::abs(lambda - target);
            if (dist < match.distance) {
                match.distance = dist;
                match.value = lambda;
            }
        }
        out.push_back(match);
    }
    return out;
}

}  // namespace heomspec
