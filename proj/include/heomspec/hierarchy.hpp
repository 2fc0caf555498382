// hierarchy.hpp - multi-index combinatorics: HEOM models, threshold
// truncations, boundary sets, decay rates, and Gershgorin radius bounds.

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "heomspec/superop.hpp"

namespace heomspec {

// Multi-index n in N_0^N.
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> entries);

    std::size_t size() const { return entries_.size(); }
    int operator[](std::size_t j) const { return entries_[j]; }
    const std::vector<int>& entries() const { return entries_; }

    bool is_zero() const;
    MultiIndex raised(std::size_t j) const;
    MultiIndex lowered(std::size_t j) const;  // throws if entry j is zero

    friend bool operator==(const MultiIndex& a, const MultiIndex& b) = default;
    friend auto operator<=>(const MultiIndex& a, const MultiIndex& b) = default;

private:
    std::vector<int> entries_;
};

// One exponential bath mode: decay rate gamma (Re > 0), coupling constants,
// and a Hermitian coupling operator.
struct BathMode {
    Complex gamma;
    Complex c;
    Complex c_prime;
    Complex c_dblprime;
    SystemOperator q;
};

class HeomModel {
public:
    HeomModel(SystemOperator hamiltonian, std::vector<BathMode> modes);

    const SystemOperator& hamiltonian() const { return hamiltonian_; }
    const std::vector<BathMode>& modes() const { return modes_; }
    std::size_t mode_count() const { return modes_.size(); }
    Eigen::Index dim() const { return hamiltonian_.dim(); }

private:
    SystemOperator hamiltonian_;
    std::vector<BathMode> modes_;
};

// Finite multi-index set containing 0, ordered lexicographically. The index
// map fixes the block layout of every assembled matrix.
class Truncation {
public:
    static Truncation from_indices(std::vector<MultiIndex> indices,
                                   std::optional<double> gamma_star = std::nullopt);

    std::size_t size() const { return indices_.size(); }
    const std::vector<MultiIndex>& indices() const { return indices_; }
    const MultiIndex& operator[](std::size_t i) const { return indices_[i]; }
    std::optional<std::size_t> position(const MultiIndex& n) const;
    bool contains(const MultiIndex& n) const { return position(n).has_value(); }
    std::optional<double> gamma_star() const { return gamma_star_; }

private:
    Truncation() = default;
    std::vector<MultiIndex> indices_;
    std::map<MultiIndex, std::size_t> index_map_;
    std::optional<double> gamma_star_;
};

struct ModelConstants {
    double C = 0.0;            // sum_j ||q_j||^2 (2|c_j| + |c_j'| + |c_j''|)^2 / Re(gamma_j)
    double gamma_bar = 0.0;    // sum_j Re(gamma_j)
    double gamma_tilde = 0.0;  // gamma_bar + max_j Re(gamma_j)
};

struct DecayRates {
    double gamma_cap = 0.0;    // Gamma_T  = min over tail of [Re gamma_n - radius bound]
    double gamma_prime = 0.0;  // Gamma'_T = min over tail of Re gamma_n
};

inline constexpr std::size_t kDefaultTruncationCap = 200000;

Complex gamma_n(const HeomModel& model, const MultiIndex& n);

// All multi-indices n with Re(gamma_n) <= re_gamma_cap, lexicographic order.
// Positivity of every Re(gamma_j) makes the set finite.
std::vector<MultiIndex> enumerate_below(const HeomModel& model, double re_gamma_cap,
                                        std::size_t size_cap = kDefaultTruncationCap);

// Threshold truncation T(gamma_star) = {n : Re gamma_n <= gamma_star}.
Truncation build_truncation(const HeomModel& model, double gamma_star,
                            std::size_t size_cap = kDefaultTruncationCap);

// One-step boundary: {n + e_j : n in T, n + e_j not in T}, deduplicated.
std::vector<MultiIndex> boundary_set(const HeomModel& model, const Truncation& trunc);

ModelConstants model_constants(const HeomModel& model);

// Lemma-style radius bound sqrt(C (Re gamma_n + gamma_bar)).
double gershgorin_radius_bound(const HeomModel& model, const MultiIndex& n);
double gershgorin_radius_bound(const ModelConstants& consts, double re_gamma_n);

// Certified decay rates of a threshold truncation. The tail minimum of
// Re gamma_n is attained on the one-step boundary; the minimum of
// Re gamma_n - radius bound is searched over the finite region where the
// objective can still undercut its boundary value. Throws when that scan
// region exceeds the enumeration cap (strongly coupled models with large C).
DecayRates decay_rates(const HeomModel& model, const Truncation& trunc);

// Always-computable lower bound: gamma_cap is replaced by the closed-form
// infimum of x - sqrt(C(x + gamma)) over x >= Gamma'. Sound wherever a decay
// rate enters a resolvent denominator, and exact when C = 0.
DecayRates decay_rates_lower(const HeomModel& model, const Truncation& trunc);

// Truncations for each threshold; requires strictly increasing Gamma'_T.
std::vector<Truncation> exhausting_sequence(const HeomModel& model,
                                            const std::vector<double>& gamma_star_list);

}  // namespace heomspec
