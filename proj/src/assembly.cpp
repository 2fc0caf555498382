#include "heomspec/assembly.hpp"

#include <cmath>

namespace heomspec {

const char* to_string(TruncationKind kind) {
    return kind == TruncationKind::naive ? "naive" : "schur";
}

namespace {

enum class Relation { diagonal, up, down, none };

Relation classify(const MultiIndex& n, const MultiIndex& m, std::size_t& mode) {
    if (n.size() != m.size())
        throw std::invalid_argument("block: multi-index length mismatch");
    Relation rel = Relation::diagonal;
    for (std::size_t j = 0; j < n.size(); ++j) {
        const int diff = m[j] - n[j];
        if (diff == 0) continue;
        if (rel != Relation::diagonal || std::abs(diff) > 1) return Relation::none;
        rel = diff == 1 ? Relation::up : Relation::down;
        mode = j;
    }
    return rel;
}

// Cached per-assembly building blocks.
struct BlockBuilder {
    const HeomModel& model;
    Superoperator commutator_h;
    std::vector<Superoperator> up_base;    // [q_j, .]
    std::vector<Superoperator> down_base;  // c_j' q_j . + c_j'' . q_j

    explicit BlockBuilder(const HeomModel& m)
        : model(m), commutator_h(commutator_superop(m.hamiltonian())) {
        for (const BathMode& mode : m.modes()) {
            up_base.push_back(commutator_superop(mode.q));
            Superoperator down = left_mult_superop(mode.q);
            down *= mode.c_prime;
            Superoperator right = right_mult_superop(mode.q);
            right *= mode.c_dblprime;
            down += right;
            down_base.push_back(std::move(down));
        }
    }

    Matrix diagonal(const MultiIndex& n) const {
        const Eigen::Index dd = model.dim() * model.dim();
        return Matrix(Complex(0, -1) * commutator_h.matrix() -
                      gamma_n(model, n) * Matrix::Identity(dd, dd));
    }

    // L_{n, n+e_j} = c_j sqrt(n_j + 1) [q_j, .]
    Matrix up(const MultiIndex& n, std::size_t j) const {
        return Matrix(model.modes()[j].c * std::sqrt(double(n[j] + 1)) * up_base[j].matrix());
    }

    // L_{n, n-e_j} = sqrt(n_j) (c_j' q_j . + c_j'' . q_j)
    Matrix down(const MultiIndex& n, std::size_t j) const {
        return Matrix(std::sqrt(double(n[j])) * down_base[j].matrix());
    }
};

Matrix assemble_on_indices(const HeomModel& model, const std::vector<MultiIndex>& indices,
                           bool diagonal_only) {
    const Eigen::Index dd = model.dim() * model.dim();
    const BlockBuilder builder(model);
    std::map<MultiIndex, std::size_t> pos;
    for (std::size_t i = 0; i < indices.size(); ++i) pos[indices[i]] = i;

    Matrix out = Matrix::Zero(indices.size() * dd, indices.size() * dd);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const MultiIndex& n = indices[i];
        out.block(i * dd, i * dd, dd, dd) = builder.diagonal(n);
        if (diagonal_only) continue;
        for (std::size_t j = 0; j < model.mode_count(); ++j) {
            if (auto it = pos.find(n.raised(j)); it != pos.end())
                out.block(i * dd, it->second * dd, dd, dd) += builder.up(n, j);
            if (n[j] > 0)
                if (auto it = pos.find(n.lowered(j)); it != pos.end())
                    out.block(i * dd, it->second * dd, dd, dd) += builder.down(n, j);
        }
    }
    return out;
}

}  // namespace

std::optional<Superoperator> block(const HeomModel& model, const MultiIndex& n,
                                   const MultiIndex& m) {
    if (n.size() != model.mode_count())
        throw std::invalid_argument("block: multi-index length mismatch");
    const BlockBuilder builder(model);
    std::size_t j = 0;
    switch (classify(n, m, j)) {
        case Relation::diagonal:
            return Superoperator(model.dim(), builder.diagonal(n));
        case Relation::up:
            return Superoperator(model.dim(), builder.up(n, j));
        case Relation::down:
            return Superoperator(model.dim(), builder.down(n, j));
        case Relation::none:
            return std::nullopt;
    }
    return std::nullopt;
}

TruncatedLiouvillian assemble_naive(const HeomModel& model, const Truncation& trunc) {
    return TruncatedLiouvillian{model, trunc, TruncationKind::naive,
                                assemble_on_indices(model, trunc.indices(), false)};
}

TruncatedLiouvillian assemble_schur_terminated(const HeomModel& model,
                                               const Truncation& trunc) {
    TruncatedLiouvillian out = assemble_naive(model, trunc);
    out.kind = TruncationKind::schur_terminated;

    const Eigen::Index dd = out.block_dim();
    const BlockBuilder builder(model);
    for (const MultiIndex& k : boundary_set(model, trunc)) {
        const Superoperator inv_k =
            diag_block_inverse_superop(model.hamiltonian(), gamma_n(model, k));
        // Predecessors of k inside T; the terminator couples every pair.
        std::vector<std::pair<std::size_t, std::size_t>> preds;  // (row position, mode)
        for (std::size_t j = 0; j < model.mode_count(); ++j) {
            if (k[j] == 0) continue;
            if (auto p = trunc.position(k.lowered(j))) preds.emplace_back(*p, j);
        }
        for (const auto& [row, j] : preds) {
            const Matrix up_into_k = builder.up(k.lowered(j), j);
            const Matrix lhs = up_into_k * inv_k.matrix();
            for (const auto& [col, i] : preds) {
                const Matrix down_from_k = builder.down(k, i);
                out.matrix.block(row * dd, col * dd, dd, dd) -= lhs * down_from_k;
            }
        }
    }
    return out;
}

RowVector left_trace_vector(const Truncation& trunc, Eigen::Index d) {
    RowVector v = RowVector::Zero(trunc.size() * d * d);
    const auto zero_pos = trunc.position(MultiIndex(std::vector<int>(trunc[0].size(), 0)));
    if (!zero_pos) throw std::invalid_argument("left_trace_vector: truncation lacks index 0");
    for (Eigen::Index i = 0; i < d; ++i) v(*zero_pos * d * d + i * d + i) = 1.0;
    return v;
}

TailWindow assemble_tail_window(const HeomModel& model, const Truncation& trunc,
                                double extra_depth, bool diagonal_only) {
    if (!trunc.gamma_star().has_value())
        throw std::invalid_argument("assemble_tail_window: threshold-rule truncation required");
    if (!(extra_depth >= 0.0))
        throw std::invalid_argument("assemble_tail_window: extra_depth must be >= 0");

    TailWindow window;
    window.diagonal_only = diagonal_only;
    for (MultiIndex& n : enumerate_below(model, *trunc.gamma_star() + extra_depth))
        if (!trunc.contains(n)) window.indices.push_back(std::move(n));
    window.matrix = assemble_on_indices(model, window.indices, diagonal_only);
    return window;
}

}  // namespace heomspec
