#include "heomspec/rng.hpp"

namespace heomspec {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
    return m;
}

Vector random_unit_vector(Eigen::Index d, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector v(d);
    do {
        for (Eigen::Index i = 0; i < d; ++i) v(i) = Complex(gauss(rng), gauss(rng));
    } while (v.norm() < 1e-12);
    return v.normalized();
}

SystemOperator random_hermitian(Eigen::Index d, Rng& rng) {
    Matrix m = random_matrix(d, d, rng);
    return SystemOperator(Matrix(0.5 * (m + m.adjoint())));
}

}  // namespace heomspec
