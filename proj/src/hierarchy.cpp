#include "heomspec/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace heomspec {

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
    for (int e : entries_)
        if (e < 0) throw std::invalid_argument("MultiIndex: entries must be nonnegative");
}

bool MultiIndex::is_zero() const {
    return std::all_of(entries_.begin(), entries_.end(), [](int e) { return e == 0; });
}

MultiIndex MultiIndex::raised(std::size_t j) const {
    std::vector<int> e = entries_;
    e.at(j) += 1;
    return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::lowered(std::size_t j) const {
    std::vector<int> e = entries_;
    if (e.at(j) == 0) throw std::invalid_argument("MultiIndex::lowered: entry is zero");
    e[j] -= 1;
    return MultiIndex(std::move(e));
}

HeomModel::HeomModel(SystemOperator hamiltonian, std::vector<BathMode> modes)
    : hamiltonian_(std::move(hamiltonian)), modes_(std::move(modes)) {
    require_hermitian(hamiltonian_, "HeomModel");
    if (modes_.empty()) throw std::invalid_argument("HeomModel: at least one bath mode required");
    for (const BathMode& m : modes_) {
        if (!(m.gamma.real() > 0.0))
            throw std::invalid_argument("HeomModel: Re(gamma_j) must be positive");
        if (m.q.dim() != hamiltonian_.dim())
            throw std::invalid_argument("HeomModel: coupling operator dimension mismatch");
        require_hermitian(m.q, "HeomModel coupling operator");
    }
}

Truncation Truncation::from_indices(std::vector<MultiIndex> indices,
                                    std::optional<double> gamma_star) {
    if (indices.empty()) throw std::invalid_argument("Truncation: empty index set");
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    const std::size_t n_modes = indices.front().size();
    for (const MultiIndex& n : indices)
        if (n.size() != n_modes)
            throw std::invalid_argument("Truncation: inconsistent multi-index lengths");
    if (!indices.front().is_zero())
        throw std::invalid_argument("Truncation: must contain the zero multi-index");
    Truncation t;
    t.indices_ = std::move(indices);
    t.gamma_star_ = gamma_star;
    for (std::size_t i = 0; i < t.indices_.size(); ++i) t.index_map_[t.indices_[i]] = i;
    return t;
}

std::optional<std::size_t> Truncation::position(const MultiIndex& n) const {
    auto it = index_map_.find(n);
    if (it == index_map_.end()) return std::nullopt;
    return it->second;
}

Complex gamma_n(const HeomModel& model, const MultiIndex& n) {
    if (n.size() != model.mode_count())
        throw std::invalid_argument("gamma_n: multi-index length mismatch");
    Complex sum = 0.0;
    for (std::size_t j = 0; j < n.size(); ++j)
        sum += double(n[j]) * model.modes()[j].gamma;
    return sum;
}

namespace {

struct EnumerationOverflow {};

// Depth-first enumeration in lexicographic order; Re(gamma_j) > 0 for all j
// makes the recursion finite.
void enumerate_rec(const HeomModel& model, double cap, std::size_t j, std::vector<int>& cur,
                   double acc, std::vector<MultiIndex>& out, std::size_t size_cap,
                   std::size_t count_limit, std::size_t& count) {
    const std::size_t n_modes = model.mode_count();
    if (j == n_modes) {
        ++count;
        if (count > count_limit) throw EnumerationOverflow{};
        if (count <= size_cap) out.push_back(MultiIndex(cur));
        return;
    }
    const double step = model.modes()[j].gamma.real();
    for (int k = 0;; ++k) {
        const double acc_k = acc + k * step;
        if (acc_k > cap) break;
        cur[j] = k;
        enumerate_rec(model, cap, j + 1, cur, acc_k, out, size_cap, count_limit, count);
    }
    cur[j] = 0;
}

}  // namespace

std::vector<MultiIndex> enumerate_below(const HeomModel& model, double re_gamma_cap,
                                        std::size_t size_cap) {
    std::vector<MultiIndex> out;
    std::vector<int> cur(model.mode_count(), 0);
    std::size_t count = 0;
    // Keep counting past the cap so the error can report the set size.
    const std::size_t count_limit =
        size_cap > (std::size_t{1} << 30) ? size_cap : 100 * size_cap;
    try {
        enumerate_rec(model, re_gamma_cap, 0, cur, 0.0, out, size_cap, count_limit, count);
    } catch (EnumerationOverflow) {
        std::ostringstream msg;
        msg << "enumerate_below: index set exceeds cap " << size_cap << " (more than "
            << count_limit << " indices)";
        throw std::runtime_error(msg.str());
    }
    if (count > size_cap) {
        std::ostringstream msg;
        msg << "enumerate_below: index set exceeds cap " << size_cap << " (" << count
            << " indices)";
        throw std::runtime_error(msg.str());
    }
    return out;
}

Truncation build_truncation(const HeomModel& model, double gamma_star, std::size_t size_cap) {
    if (!(gamma_star >= 0.0))
        throw std::invalid_argument("build_truncation: gamma_star must be >= 0");
    return Truncation::from_indices(enumerate_below(model, gamma_star, size_cap), gamma_star);
}

std::vector<MultiIndex> boundary_set(const HeomModel& model, const Truncation& trunc) {
    std::set<MultiIndex> boundary;
    for (const MultiIndex& n : trunc.indices())
        for (std::size_t j = 0; j < model.mode_count(); ++j) {
            MultiIndex up = n.raised(j);
            if (!trunc.contains(up)) boundary.insert(std::move(up));
        }
    return {boundary.begin(), boundary.end()};
}

ModelConstants model_constants(const HeomModel& model) {
    ModelConstants out;
    double max_rate = 0.0;
    for (const BathMode& m : model.modes()) {
        const double qn = spectral_norm(m.q);
        const double a = qn * (2.0 * std::abs(m.c) + std::abs(m.c_prime) + std::abs(m.c_dblprime));
        out.C += a * a / m.gamma.real();
        out.gamma_bar += m.gamma.real();
        max_rate = std::max(max_rate, m.gamma.real());
    }
    out.gamma_tilde = out.gamma_bar + max_rate;
    return out;
}

double gershgorin_radius_bound(const ModelConstants& consts, double re_gamma_n) {
    return std::sqrt(consts.C * (re_gamma_n + consts.gamma_bar));
}

double gershgorin_radius_bound(const HeomModel& model, const MultiIndex& n) {
    return gershgorin_radius_bound(model_constants(model), gamma_n(model, n).real());
}

DecayRates decay_rates(const HeomModel& model, const Truncation& trunc) {
    if (!trunc.gamma_star().has_value())
        throw std::invalid_argument(
            "decay_rates: certified decay rates require a threshold-rule truncation");

    DecayRates out;
    out.gamma_prime = std::numeric_limits<double>::infinity();
    for (const MultiIndex& n : boundary_set(model, trunc))
        out.gamma_prime = std::min(out.gamma_prime, gamma_n(model, n).real());

    const ModelConstants consts = model_constants(model);
    if (consts.C == 0.0) {
        out.gamma_cap = out.gamma_prime;
        return out;
    }

    // Beyond this value of Re gamma_n the objective provably exceeds every
    // candidate, so scanning the finite region below it is exhaustive.
    const double scan_cap = out.gamma_prime + consts.C +
                            2.0 * std::sqrt(consts.C * (out.gamma_prime + consts.gamma_bar)) +
                            consts.gamma_bar;
    out.gamma_cap = std::numeric_limits<double>::infinity();
    for (const MultiIndex& n : enumerate_below(model, scan_cap)) {
        if (trunc.contains(n)) continue;
        const double x = gamma_n(model, n).real();
        out.gamma_cap = std::min(out.gamma_cap, x - gershgorin_radius_bound(consts, x));
    }
    return out;
}

DecayRates decay_rates_lower(const HeomModel& model, const Truncation& trunc) {
    if (!trunc.gamma_star().has_value())
        throw std::invalid_argument(
            "decay_rates_lower: certified decay rates require a threshold-rule truncation");
    DecayRates out;
    out.gamma_prime = std::numeric_limits<double>::infinity();
    for (const MultiIndex& n : boundary_set(model, trunc))
        out.gamma_prime = std::min(out.gamma_prime, gamma_n(model, n).real());
    const ModelConstants consts = model_constants(model);
    // inf over x >= Gamma' of x - sqrt(C(x + gamma)); the objective decreases
    // until x = C/4 - gamma and increases afterwards.
    const double valley = consts.C / 4.0 - consts.gamma_bar;
    const double x = std::max(out.gamma_prime, valley);
    out.gamma_cap = x - gershgorin_radius_bound(consts, x);
    return out;
}

std::vector<Truncation> exhausting_sequence(const HeomModel& model,
                                            const std::vector<double>& gamma_star_list) {
    std::vector<Truncation> out;
    double prev_gamma_prime = -std::numeric_limits<double>::infinity();
    for (double gs : gamma_star_list) {
        Truncation t = build_truncation(model, gs);
        double gamma_prime = std::numeric_limits<double>::infinity();
        for (const MultiIndex& n : boundary_set(model, t))
            gamma_prime = std::min(gamma_prime, gamma_n(model, n).real());
        if (!(gamma_prime > prev_gamma_prime))
            throw std::invalid_argument(
                "exhausting_sequence: Gamma'_T must strictly increase along the thresholds");
        prev_gamma_prime = gamma_prime;
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace heomspec
