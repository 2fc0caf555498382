// superop.hpp - superoperator algebra on a finite-dimensional system:
// vectorization, Liouvillian building blocks, norms, and segment distances.

#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>

#include <Eigen/Dense>

namespace heomspec {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RowVector = Eigen::RowVectorXcd;

// Relative tolerance below which an operator passed as Hermitian is accepted.
inline constexpr double kHermitianRelTol = 1e-10;

// A d x d operator on the system Hilbert space. Entries must be finite.
class SystemOperator {
public:
    explicit SystemOperator(Matrix entries);

    Eigen::Index dim() const { return mat_.rows(); }
    const Matrix& matrix() const { return mat_; }

private:
    Matrix mat_;
};

// A d^2 x d^2 matrix acting on row-major vectorized d x d operators.
class Superoperator {
public:
    Superoperator(Eigen::Index dim, Matrix entries);

    static Superoperator zero(Eigen::Index dim);
    static Superoperator identity(Eigen::Index dim);

    Eigen::Index dim() const { return dim_; }
    const Matrix& matrix() const { return mat_; }
    Matrix& matrix() { return mat_; }

    SystemOperator apply(const SystemOperator& rho) const;

    Superoperator& operator+=(const Superoperator& other);
    Superoperator& operator-=(const Superoperator& other);
    Superoperator& operator*=(Complex factor);
    friend Superoperator operator*(const Superoperator& a, const Superoperator& b);

private:
    Eigen::Index dim_;
    Matrix mat_;
};

// Vertical segment b + i[-delta, delta] in the complex plane.
struct SegmentSet {
    Complex b;
    double delta = 0.0;

    SegmentSet(Complex b_, double delta_) : b(b_), delta(delta_) {
        if (!(delta >= 0.0)) throw std::invalid_argument("SegmentSet: delta must be >= 0");
    }
};

bool is_hermitian(const SystemOperator& a, double rel_tol = kHermitianRelTol);
void require_hermitian(const SystemOperator& a, const char* where);

// Row-major stacking: vec(X)[i*d + j] = X(i, j).
Vector vectorize(const SystemOperator& op);
SystemOperator devectorize(const Vector& v);

Superoperator commutator_superop(const SystemOperator& a);   // rho -> [A, rho]
Superoperator left_mult_superop(const SystemOperator& a);    // rho -> A rho
Superoperator right_mult_superop(const SystemOperator& a);   // rho -> rho A

double trace_norm(const SystemOperator& op);     // sum of singular values
double spectral_norm(const SystemOperator& op);  // largest singular value

// Lower bound of the trace-norm-induced superoperator norm, obtained by
// sampling rank-one inputs |u><v| and running subgradient ascent on (u, v).
// Extreme points of the trace-norm unit ball are rank-one, so the true norm
// is attained on such inputs and the sampled value never exceeds it.
// Deterministic for a fixed seed.
double sampled_induced_norm(const Superoperator& s, int samples, std::uint64_t seed,
                            int ascent_steps = 50);

// Solves (-i[H, X] - gamma_n X) = rhs in the eigenbasis of H.
// Requires Re(gamma_n) > 0 and H Hermitian within tolerance.
SystemOperator diag_block_inverse(const SystemOperator& h, Complex gamma_n,
                                  const SystemOperator& rhs);

// Dense matrix of the inverse diagonal block, built column by column through
// diag_block_inverse.
Superoperator diag_block_inverse_superop(const SystemOperator& h, Complex gamma_n);

// Euclidean distance from z to the segment {b + iy : |y| <= delta}.
double segment_distance(Complex z, const SegmentSet& seg);

// Eigenvalue spread lambda_max - lambda_min of a Hermitian operator.
double spread(const SystemOperator& a);

}  // namespace heomspec
