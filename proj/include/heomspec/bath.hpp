// bath.hpp - spin-boson bath construction: spectral density, symmetrized AAA
// fit of coth, and conversion to HEOM mode parameters.

#pragma once

#include <string>
#include <vector>

#include "heomspec/hierarchy.hpp"

namespace heomspec {

struct SpinBosonParams {
    double alpha = 1.0;        // coupling strength
    double omega0 = 1.0;       // oscillator frequency
    double eta = 0.1;          // damping rate; underdamped case eta < omega0 required
    double temperature = 1.0;  // T > 0
    double cutoff = 50.0;      // Lambda, fit interval [-Lambda, Lambda]
    int n_fit_poles = 11;      // fluctuation poles of the coth fit
};

// Rational approximation coth(w/2T) ~ 2T/w + sum_j 2 r_j w / (w^2 + nu_j^2),
// with poles nu sorted descending.
struct RationalBathFit {
    double temperature = 0.0;
    std::vector<double> nu;
    std::vector<double> r;
    double max_rel_error = 0.0;      // vs coth on the validation grid
    double zero_pole_residue = 0.0;  // fitted residue at omega = 0; ~2T
    int discarded_poles = 0;         // spurious poles dropped during extraction
    bool residues_real_positive = true;
    std::string grid;                // fit grid description
};

// J(w) = alpha w w0^4 / [(w^2 - w0^2)^2 + 4 eta^2 w^2]; odd in w.
double spectral_density(const SpinBosonParams& params, double omega);

// The fitted rational function; the complex overload evaluates the same
// expression at imaginary arguments for the coupling-constant formulas.
double bose_eval(const RationalBathFit& fit, double omega);
Complex bose_eval(const RationalBathFit& fit, Complex omega);

// Symmetrized AAA fit of coth(w/2T) on [-Lambda, Lambda]: support points come
// in +-w pairs sharing one weight, which forces an odd approximant with a
// structural pole at w = 0 and the remaining poles in +-i nu pairs.
// Fixed-order mode: n_poles fluctuation poles (n_poles + 1 support pairs).
RationalBathFit aaa_fit_bose(double temperature, double lambda, int n_poles);

// Tolerance mode: support pairs are added until the pointwise relative
// residual on the grid drops below tol. Throws if max_pairs is exhausted.
RationalBathFit aaa_fit_bose_tol(double temperature, double lambda, double tol,
                                 int max_pairs = 40);

// HEOM model of the spin-boson system: H = sigma_x, q = sigma_z, two
// dynamical modes from the spectral-density poles and one fluctuation mode
// per kept fit pole. Rejects the overdamped case eta >= omega0.
HeomModel spin_boson_model(const SpinBosonParams& params, const RationalBathFit& fit);

// Keeps every dynamical mode (Im gamma != 0) and the fluctuation modes with
// Re gamma <= nu_max.
HeomModel mode_subset(const HeomModel& model, double nu_max);

}  // namespace heomspec
