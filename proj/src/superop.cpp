#include "heomspec/superop.hpp"

#include <algorithm>
#include <cmath>

#include "heomspec/rng.hpp"

namespace heomspec {

namespace {

bool all_finite(const Matrix& m) {
    return m.allFinite();
}

// kron(A, B)[(i,j), (k,l)] = A(i,k) B(j,l) in row-major pair indexing, so
// that kron(A, B) vec(rho) = vec(A rho B^T).
Matrix kron(const Matrix& a, const Matrix& b) {
    const Eigen::Index da = a.rows(), db = b.rows();
    Matrix out(da * db, da * db);
    for (Eigen::Index i = 0; i < da; ++i)
        for (Eigen::Index k = 0; k < da; ++k)
            out.block(i * db, k * db, db, db) = a(i, k) * b;
    return out;
}

}  // namespace

SystemOperator::SystemOperator(Matrix entries) : mat_(std::move(entries)) {
    if (mat_.rows() < 1 || mat_.rows() != mat_.cols())
        throw std::invalid_argument("SystemOperator: entries must be square, dim >= 1");
    if (!all_finite(mat_))
        throw std::invalid_argument("SystemOperator: entries must be finite");
}

Superoperator::Superoperator(Eigen::Index dim, Matrix entries)
    : dim_(dim), mat_(std::move(entries)) {
    if (dim_ < 1) throw std::invalid_argument("Superoperator: dim must be >= 1");
    if (mat_.rows() != dim_ * dim_ || mat_.cols() != dim_ * dim_)
        throw std::invalid_argument("Superoperator: entries must be d^2 x d^2");
    if (!all_finite(mat_))
        throw std::invalid_argument("Superoperator: entries must be finite");
}

Superoperator Superoperator::zero(Eigen::Index dim) {
    return Superoperator(dim, Matrix::Zero(dim * dim, dim * dim));
}

Superoperator Superoperator::identity(Eigen::Index dim) {
    return Superoperator(dim, Matrix::Identity(dim * dim, dim * dim));
}

SystemOperator Superoperator::apply(const SystemOperator& rho) const {
    if (rho.dim() != dim_)
        throw std::invalid_argument("Superoperator::apply: dimension mismatch");
    return devectorize(mat_ * vectorize(rho));
}

Superoperator& Superoperator::operator+=(const Superoperator& other) {
    if (other.dim_ != dim_) throw std::invalid_argument("Superoperator: dimension mismatch");
    mat_ += other.mat_;
    return *this;
}

Superoperator& Superoperator::operator-=(const Superoperator& other) {
    if (other.dim_ != dim_) throw std::invalid_argument("Superoperator: dimension mismatch");
    mat_ -= other.mat_;
    return *this;
}

Superoperator& Superoperator::operator*=(Complex factor) {
    mat_ *= factor;
    return *this;
}

Superoperator operator*(const Superoperator& a, const Superoperator& b) {
    if (a.dim_ != b.dim_) throw std::invalid_argument("Superoperator: dimension mismatch");
    return Superoperator(a.dim_, a.mat_ * b.mat_);
}

bool is_hermitian(const SystemOperator& a, double rel_tol) {
    const double scale = spectral_norm(a);
    const double dev = (a.matrix() - a.matrix().adjoint()).operatorNorm();
    return dev <= rel_tol * std::max(scale, 1e-300);
}

void require_hermitian(const SystemOperator& a, const char* where) {
    if (!is_hermitian(a))
        throw std::invalid_argument(std::string(where) + ": operator is not Hermitian within tolerance");
}

Vector vectorize(const SystemOperator& op) {
    const Eigen::Index d = op.dim();
    Vector v(d * d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) v(i * d + j) = op.matrix()(i, j);
    return v;
}

SystemOperator devectorize(const Vector& v) {
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(v.size()))));
    if (d * d != v.size())
        throw std::invalid_argument("devectorize: length is not a perfect square");
    Matrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = v(i * d + j);
    return SystemOperator(std::move(m));
}

Superoperator commutator_superop(const SystemOperator& a) {
    const Eigen::Index d = a.dim();
    const Matrix id = Matrix::Identity(d, d);
    return Superoperator(d, kron(a.matrix(), id) - kron(id, a.matrix().transpose()));
}

Superoperator left_mult_superop(const SystemOperator& a) {
    const Eigen::Index d = a.dim();
    return Superoperator(d, kron(a.matrix(), Matrix::Identity(d, d)));
}

Superoperator right_mult_superop(const SystemOperator& a) {
    const Eigen::Index d = a.dim();
    return Superoperator(d, kron(Matrix::Identity(d, d), a.matrix().transpose()));
}

double trace_norm(const SystemOperator& op) {
    Eigen::JacobiSVD<Matrix> svd(op.matrix());
    return svd.singularValues().sum();
}

double spectral_norm(const SystemOperator& op) {
    Eigen::JacobiSVD<Matrix> svd(op.matrix());
    return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

double sampled_induced_norm(const Superoperator& s, int samples, std::uint64_t seed,
                            int ascent_steps) {
    if (samples < 1) throw std::invalid_argument("sampled_induced_norm: samples must be >= 1");
    const Eigen::Index d = s.dim();
    Rng rng(seed);
    double best = 0.0;
    for (int k = 0; k < samples; ++k) {
        Vector u = random_unit_vector(d, rng);
        Vector v = random_unit_vector(d, rng);
        for (int step = 0; step <= ascent_steps; ++step) {
            const Matrix rho = u * v.adjoint();
            const Vector image = s.matrix() * vectorize(SystemOperator(rho));
            Eigen::JacobiSVD<Matrix> svd(devectorize(image).matrix(),
                                         Eigen::ComputeThinU | Eigen::ComputeThinV);
            const double val = svd.singularValues().sum();
            best = std::max(best, val);
            if (step == ascent_steps) break;
            // subgradient of the trace norm at the image, pulled back to (u, v)
            const Matrix g = svd.matrixU() * svd.matrixV().adjoint();
            const Matrix w = devectorize(s.matrix().adjoint() * vectorize(SystemOperator(g))).matrix();
            const Vector u_next = w * v;
            if (u_next.norm() < 1e-300) break;
            u = u_next.normalized();
            const Vector v_next = w.adjoint() * u;
            if (v_next.norm() < 1e-300) break;
            v = v_next.normalized();
        }
    }
    return best;
}

SystemOperator diag_block_inverse(const SystemOperator& h, Complex gamma_n,
                                  const SystemOperator& rhs) {
    if (h.dim() != rhs.dim())
        throw std::invalid_argument("diag_block_inverse: dimension mismatch");
    if (!(gamma_n.real() > 0.0))
        throw std::invalid_argument(
            "diag_block_inverse: Re(gamma_n) must be positive for certified invertibility");
    require_hermitian(h, "diag_block_inverse");

    Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
    const Matrix& basis = es.eigenvectors();
    const Eigen::VectorXd& eps = es.eigenvalues();

    Matrix r = basis.adjoint() * rhs.matrix() * basis;
    const Eigen::Index d = h.dim();
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b)
            r(a, b) = -r(a, b) / (gamma_n + Complex(0.0, eps(a) - eps(b)));
    return SystemOperator(basis * r * basis.adjoint());
}

Superoperator diag_block_inverse_superop(const SystemOperator& h, Complex gamma_n) {
    const Eigen::Index d = h.dim();
    Matrix out(d * d, d * d);
    for (Eigen::Index k = 0; k < d; ++k)
        for (Eigen::Index l = 0; l < d; ++l) {
            Matrix basis_op = Matrix::Zero(d, d);
            basis_op(k, l) = 1.0;
            out.col(k * d + l) =
                vectorize(diag_block_inverse(h, gamma_n, SystemOperator(basis_op)));
        }
    return Superoperator(d, std::move(out));
}

double segment_distance(Complex z, const SegmentSet& seg) {
    const Complex rel = z - seg.b;
    if (std::abs(rel.imag()) <= seg.delta) return std::abs(rel.real());
    const double sign = rel.imag() > 0.0 ? 1.0 : -1.0;
    return std::abs(rel - Complex(0.0, sign * seg.delta));
}

double spread(const SystemOperator& a) {
    require_hermitian(a, "spread");
    Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix(), Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return ev(ev.size() - 1) - ev(0);
}

}  // namespace heomspec
