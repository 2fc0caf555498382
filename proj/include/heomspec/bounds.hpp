// bounds.hpp - numerical certification of the resolvent and spectral bounds:
// Gershgorin certificates, tail resolvent bounds, off-diagonal block bounds,
// Schur defects, and the unstable-spectrum enclosure.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "heomspec/assembly.hpp"
#include "heomspec/hierarchy.hpp"

namespace heomspec {

// Single pass/fail comparison; every sampled lhs is a lower bound of the
// quantity it stands for, so checks are one-sided: lhs <= rhs + slack.
struct CheckResult {
    std::string name;
    bool pass = false;
    double lhs = 0.0;
    double rhs = 0.0;
    std::string note;
};

inline constexpr double kCheckSlackAbs = 1e-9;
inline constexpr double kCheckSlackRel = 1e-9;

bool one_sided_pass(double lhs, double rhs);

struct GershgorinRecord {
    MultiIndex n;
    double beta_lower = 0.0;
    double radius_bound = 0.0;
};

struct GershgorinCertificate {
    Complex z;
    std::vector<GershgorinRecord> records;
    double q_of_z = 0.0;  // max over records of radius_bound / beta_lower
    std::optional<double> resolvent_bound;  // present iff all beta_lower > radius_bound
    bool conclusive() const { return resolvent_bound.has_value(); }
};

// Analytic lower bound of beta(z; L_nn): distance from z to the segment
// S(-gamma_n, H).
double beta_lower(const HeomModel& model, const MultiIndex& n, Complex z);

GershgorinCertificate gershgorin_certificate(const HeomModel& model,
                                             std::span<const MultiIndex> indices,
                                             Complex z);

// Dense solves of (z - L) on sampled block-rank-one inputs; asserts the
// sampled induced-norm lower bound of the resolvent against the certificate
// bound, and that every solve has small residual. The matrix blocks must
// follow the certificate's index order.
CheckResult check_resolvent_bound(const Matrix& matrix, Eigen::Index block_dim,
                                  const GershgorinCertificate& cert, int samples,
                                  std::uint64_t seed);

// Sampled lower bound of ||(z - L_WW)^{-1}||_1 against 1/(Re z + Gamma).
// Finite windows are principal sub-blocks, so their Gershgorin radii only
// shrink and the infinite-tail bound applies to them as well.
std::vector<CheckResult> tail_resolvent_check(const TailWindow& window, double gamma,
                                              std::span<const Complex> z_list,
                                              int samples, std::uint64_t seed);

// Sampled lower bounds of ||L_JT||_1 and ||L_TJ||_1 against
// sqrt(C(Gamma' + gamma_bar)) and sqrt(C(Gamma' + gamma_tilde)).
std::vector<CheckResult> offdiag_block_bounds_check(const HeomModel& model,
                                                    const Truncation& trunc,
                                                    int samples, std::uint64_t seed);

struct SchurDefectReport {
    Complex z;
    double oracle_depth = 0.0;   // tail window reaches gamma_star + oracle_depth
    double defect = 0.0;         // sampled lower bound of ||S_T(z) - (z - L_T)||_1
    std::size_t window_size = 0;
};

// Approximates the exact Schur complement S_T(z) by a finite tail window and
// measures how far it is from z - L_T.
SchurDefectReport schur_defect(const HeomModel& model, const Truncation& trunc, Complex z,
                               double oracle_depth, int samples, std::uint64_t seed);

// Compact enclosure of every eigenvalue with nonnegative real part, of both
// the exact Liouvillian and all of its truncations: union over n of
// {dist(z, S(-gamma_n, H)) <= sqrt(C(Re gamma_n + gamma_bar)) + 2 Delta}
// intersected with the closed right half-plane. Candidate indices satisfy
// Re gamma_n <= scan_bound; membership enumerates them on demand with branch
// pruning, since for strong coupling the candidate set is far too large to
// materialize.
struct EnclosureSet {
    ModelConstants consts;
    std::vector<Complex> mode_gammas;
    double h_spread = 0.0;
    double delta_cap = 0.0;   // Delta = C (gamma_min + gamma_tilde) / gamma_min
    double scan_bound = 0.0;  // Re gamma_n beyond which no segment reaches Re z >= 0
};

EnclosureSet unstable_enclosure(const HeomModel& model);

// Membership in the inflated Gershgorin union; valid for Re z >= 0 (the
// enclosure proper is this set intersected with the right half-plane).
bool enclosure_contains(const EnclosureSet& enc, Complex z);

// ---------------------------------------------------------------------------
// Aggregate certification suite (used by the CLI and the acceptance tests).

struct BoundSuiteOptions {
    double gamma_star = 2.0;                  // base threshold for assembled checks
    std::vector<double> offdiag_gamma_stars;  // default: {g, 1.5 g, 2 g}
    std::vector<double> defect_gamma_stars;   // default: {g, 2 g, 4 g}
    double defect_oracle_factor = 3.0;        // oracle depth = factor * gamma_star
    int lemma1_blocks = 50;
    int certificates = 20;
    int tail_windows = 3;
    int z_per_window = 5;
    int norm_samples = 64;
    std::uint64_t seed = 1;
    double radius_scale = 1.0;  // test hook: scales radius bounds to force failures
    std::size_t size_cap = kDefaultTruncationCap;
};

struct BoundSuiteReport {
    std::vector<CheckResult> checks;
    bool all_pass = true;
};

BoundSuiteReport run_bound_suite(const HeomModel& model, const BoundSuiteOptions& opts = {});

}  // namespace heomspec
