// assembly.hpp - dense assembly of truncated HEOM Liouvillians, the
// Schur-complement terminator, and finite tail windows.

#pragma once

#include <optional>
#include <vector>

#include "heomspec/hierarchy.hpp"
#include "heomspec/superop.hpp"

namespace heomspec {

enum class TruncationKind { naive, schur_terminated };

const char* to_string(TruncationKind kind);

// Dense (|T| d^2) x (|T| d^2) matrix with the block layout fixed by the
// truncation's index order.
struct TruncatedLiouvillian {
    HeomModel model;
    Truncation truncation;
    TruncationKind kind;
    Matrix matrix;

    Eigen::Index block_dim() const { return model.dim() * model.dim(); }
};

// Sub-Liouvillian on a finite window of tail indices.
struct TailWindow {
    std::vector<MultiIndex> indices;  // disjoint from the truncation
    Matrix matrix;
    bool diagonal_only = false;
};

// Liouvillian block L_{n m}: diagonal, up-coupling (m = n + e_j) or
// down-coupling (m = n - e_j); nullopt for all other pairs.
std::optional<Superoperator> block(const HeomModel& model, const MultiIndex& n,
                                   const MultiIndex& m);

TruncatedLiouvillian assemble_naive(const HeomModel& model, const Truncation& trunc);

// L_T = L_TT - L_TJ (L'_JJ)^{-1} L_JT. Only one-step boundary indices
// contribute: L'_JJ is block-diagonal and L_TJ reaches one step into the tail.
TruncatedLiouvillian assemble_schur_terminated(const HeomModel& model,
                                               const Truncation& trunc);

// Vectorized trace functional on block 0, zeros elsewhere. Annihilates both
// naive and Schur-terminated matrices from the left.
RowVector left_trace_vector(const Truncation& trunc, Eigen::Index d);

// Window W = {n not in T : Re gamma_n <= gamma_star + extra_depth} with the
// Liouvillian restricted to W x W (or only its diagonal blocks).
TailWindow assemble_tail_window(const HeomModel& model, const Truncation& trunc,
                                double extra_depth, bool diagonal_only = false);

}  // namespace heomspec
