// rng.hpp - seeded random inputs for norm sampling and tests.

#pragma once

#include <cstdint>
#include <random>

#include "heomspec/superop.hpp"

namespace heomspec {

using Rng = std::mt19937_64;

// Complex standard-normal entries.
Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);

// Unit vector under the Euclidean norm.
Vector random_unit_vector(Eigen::Index d, Rng& rng);

SystemOperator random_hermitian(Eigen::Index d, Rng& rng);

}  // namespace heomspec
