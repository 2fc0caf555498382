// spectra.hpp - dense non-Hermitian eigendecomposition of truncated
// Liouvillians, stability classification, and convergence tracking.

#pragma once

#include <vector>

#include "heomspec/assembly.hpp"

namespace heomspec {

// All eigenvalues of the truncated Liouvillian (LAPACK zgeev), with residual
// checks ||L v - lambda v|| / ||L|| <= 1e-8 on a sample of eigenpairs.
std::vector<Complex> eigenvalues(const TruncatedLiouvillian& L);

struct SpectrumReport {
    std::vector<Complex> eigenvalues;
    std::vector<int> cluster_id;      // clustering radius 1e-6 * ||L||
    double matrix_scale = 0.0;        // spectral-norm estimate of L
    double spectral_abscissa = 0.0;   // max Re lambda
    double zero_mode_error = 0.0;     // |lambda| closest to 0
    bool stable = false;              // no Re lambda > tol
    bool gapped = false;              // exactly one |Re lambda| <= tol, and it is ~0
    double gap = 0.0;                 // |Re| of nearest other near-axis eigenvalue, +inf if none
};

SpectrumReport stability_report(const TruncatedLiouvillian& L, double tol_rel = 1e-8);

struct Window {
    double re_min = -1.0;
    double re_max = 0.1;
    double im_min = -1.0;
    double im_max = 1.0;

    bool contains(Complex z) const {
        return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min &&
               z.imag() <= im_max;
    }
};

// Default window of the convergence trace: captures the slow modes without
// chasing deep fast ones.
Window default_trace_window(const HeomModel& model, double gamma_prime_min);

struct ConvergenceStep {
    double gamma_star = 0.0;
    double gamma_prime = 0.0;
    std::size_t truncation_size = 0;
    std::vector<Complex> window_eigenvalues;
    // One-sided Hausdorff distance (this step -> previous step) of window
    // eigenvalues; 0 for the first step, +inf when only one side is empty.
    double distance_to_previous = 0.0;
};

struct ConvergenceTrace {
    Window window;
    TruncationKind kind = TruncationKind::schur_terminated;
    std::vector<ConvergenceStep> steps;
};

ConvergenceTrace convergence_trace(const HeomModel& model,
                                   const std::vector<double>& gamma_star_list,
                                   const Window& window,
                                   TruncationKind kind = TruncationKind::schur_terminated);

struct MatchedEigenvalue {
    Complex value;
    double distance = 0.0;  // |value - target|; +inf when the window set is empty
};

// Nearest in-window eigenvalue to the target at every step.
std::vector<MatchedEigenvalue> match_eigenvalue(const ConvergenceTrace& trace,
                                                Complex target);

// Power-iteration estimate of the matrix 2-norm (scale for tolerances).
double matrix_scale_estimate(const Matrix& m);

}  // namespace heomspec
