#include "heomspec/bath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace heomspec {

namespace {

double coth(double x) { return 1.0 / std::tanh(x); }

struct SymAaa {
    std::vector<double> support;  // positive half of the +-pairs
    std::vector<double> values;   // coth at the support points
    Eigen::VectorXd weights;      // one weight per pair
    double max_rel_residual = std::numeric_limits<double>::infinity();
};

// Symmetrized AAA on an odd real function sampled on a positive grid.
// Support points come in +-w pairs sharing one weight, which makes the
// barycentric numerator even and the denominator odd: the approximant is odd
// with a structural simple pole at w = 0.
SymAaa sym_aaa(const std::vector<double>& grid, const std::vector<double>& f,
               int max_pairs, double rel_tol) {
    const int m_grid = int(grid.size());
    SymAaa state;
    std::vector<bool> used(m_grid, false);
    std::vector<double> current(m_grid, 0.0);

    for (int iter = 0; iter < max_pairs; ++iter) {
        int pick = -1;
        double worst = -1.0;
        for (int i = 0; i < m_grid; ++i) {
            if (used[i]) continue;
            const double err = std::abs(f[i] - current[i]);
            if (err > worst) {
                worst = err;
                pick = i;
            }
        }
        if (pick < 0) break;
        used[pick] = true;
        state.support.push_back(grid[pick]);
        state.values.push_back(f[pick]);

        const int m = int(state.support.size());
        std::vector<int> rest;
        for (int i = 0; i < m_grid; ++i)
            if (!used[i]) rest.push_back(i);

        // Least-squares Loewner system over the remaining samples; the pair
        // basis column k evaluates the residual of node +-z_k.
        Eigen::MatrixXd loewner(rest.size(), m);
        for (std::size_t r = 0; r < rest.size(); ++r) {
            const double zi = grid[rest[r]], fi = f[rest[r]];
            for (int k = 0; k < m; ++k)
                loewner(r, k) = (fi - state.values[k]) / (zi - state.support[k]) +
                                (fi + state.values[k]) / (zi + state.support[k]);
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(loewner, Eigen::ComputeThinV);
        state.weights = svd.matrixV().col(m - 1);

        state.max_rel_residual = 0.0;
        for (std::size_t r = 0; r < rest.size(); ++r) {
            const double zi = grid[rest[r]];
            double num = 0.0, den = 0.0;
            for (int k = 0; k < m; ++k) {
                const double a = 1.0 / (zi - state.support[k]);
                const double b = 1.0 / (zi + state.support[k]);
                num += state.weights[k] * state.values[k] * (a - b);
                den += state.weights[k] * (a + b);
            }
            current[rest[r]] = num / den;
            state.max_rel_residual = std::max(
                state.max_rel_residual, std::abs(f[rest[r]] - current[rest[r]]) /
                                            std::abs(f[rest[r]]));
        }
        if (rel_tol > 0.0 && state.max_rel_residual <= rel_tol) return state;
    }
    if (rel_tol > 0.0)
        throw std::runtime_error("aaa_fit_bose: tolerance not reached within max_pairs support pairs");
    return state;
}

Complex barycentric_residue(const SymAaa& state, Complex pole) {
    // Residue N(p)/D'(p) with the full node set {+-z_k}, values {+-f_k}.
    Complex num = 0.0, dprime = 0.0;
    for (std::size_t k = 0; k < state.support.size(); ++k) {
        const Complex dp = pole - state.support[k];
        const Complex dm = pole + state.support[k];
        num += state.weights[k] * state.values[k] * (1.0 / dp - 1.0 / dm);
        dprime -= state.weights[k] * (1.0 / (dp * dp) + 1.0 / (dm * dm));
    }
    return num / dprime;
}

RationalBathFit extract_fit(const SymAaa& state, double temperature, double lambda,
                            int grid_points) {
    RationalBathFit fit;
    fit.temperature = temperature;
    {
        std::ostringstream grid;
        grid << grid_points << " points, linear on (0, " << lambda << "], symmetrized";
        fit.grid = grid.str();
    }

    const int m = int(state.support.size());
    if (m >= 2) {
        // Poles of the odd barycentric form: w = 0 (structural) plus pairs
        // +-i nu. In u = w^2 the denominator is again barycentric with nodes
        // z_k^2, so the finite u-poles come out of the standard pencil.
        Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(m + 1, m + 1);
        Eigen::MatrixXd rhs = Eigen::MatrixXd::Identity(m + 1, m + 1);
        rhs(0, 0) = 0.0;
        for (int k = 0; k < m; ++k) {
            lhs(0, k + 1) = state.weights[k];
            lhs(k + 1, 0) = 1.0;
            lhs(k + 1, k + 1) = state.support[k] * state.support[k];
        }
        Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges(lhs, rhs);

        std::vector<std::pair<double, double>> kept;  // (nu, r)
        for (Eigen::Index i = 0; i < ges.alphas().size(); ++i) {
            const Complex beta = ges.betas()(i);
            if (std::abs(beta) < 1e-12 * std::abs(ges.alphas()(i))) continue;  // infinite
            const Complex u = ges.alphas()(i) / beta;
            const bool negative_real = u.real() < 0.0 && std::abs(u.imag()) <= 1e-8 * std::abs(u);
            if (!negative_real) {
                ++fit.discarded_poles;
                if (std::abs(barycentric_residue(state, std::sqrt(u))) > 1e-6)
                    throw std::runtime_error(
                        "aaa_fit_bose: significant spurious pole off the negative u-axis");
                continue;
            }
            const double nu = std::sqrt(-u.real());
            const Complex res = barycentric_residue(state, Complex(0.0, nu));
            if (std::abs(res) < 1e-13) {
                ++fit.discarded_poles;
                continue;
            }
            if (std::abs(res.imag()) > 1e-8 * std::abs(res)) fit.residues_real_positive = false;
            if (res.real() <= 0.0) fit.residues_real_positive = false;
            kept.emplace_back(nu, res.real());
        }
        std::sort(kept.begin(), kept.end(), std::greater<>());
        for (const auto& [nu, r] : kept) {
            fit.nu.push_back(nu);
            fit.r.push_back(r);
        }
    }

    // Residue of the structural pole at w = 0; the model uses the exact 2T.
    {
        double num = 0.0, den = 0.0;
        for (int k = 0; k < m; ++k) {
            num += state.weights[k] * state.values[k] / state.support[k];
            den += state.weights[k] / (state.support[k] * state.support[k]);
        }
        fit.zero_pole_residue = num / den;
    }

    // Fresh validation grid, deliberately different from the fit grid.
    const int n_val = 7777;
    fit.max_rel_error = 0.0;
    for (int i = 1; i <= n_val; ++i) {
        const double w = lambda * 1e-3 + (lambda - lambda * 1e-3) * (i - 1) / (n_val - 1);
        const double exact = coth(w / (2.0 * temperature));
        fit.max_rel_error =
            std::max(fit.max_rel_error, std::abs(bose_eval(fit, w) - exact) / std::abs(exact));
    }
    return fit;
}

RationalBathFit fit_impl(double temperature, double lambda, int max_pairs, double rel_tol,
                         int expected_poles) {
    if (!(temperature > 0.0)) throw std::invalid_argument("aaa_fit_bose: temperature must be > 0");
    if (!(lambda > 0.0)) throw std::invalid_argument("aaa_fit_bose: lambda must be > 0");

    const int grid_points = 2000;
    std::vector<double> grid(grid_points), f(grid_points);
    for (int i = 0; i < grid_points; ++i) {
        grid[i] = lambda * (i + 1) / grid_points;
        f[i] = coth(grid[i] / (2.0 * temperature));
    }
    const SymAaa state = sym_aaa(grid, f, max_pairs, rel_tol);
    RationalBathFit fit = extract_fit(state, temperature, lambda, grid_points);
    if (expected_poles >= 0 && int(fit.nu.size()) != expected_poles)
        throw std::runtime_error("aaa_fit_bose: requested " + std::to_string(expected_poles) +
                                 " poles but extracted " + std::to_string(fit.nu.size()));
    return fit;
}

}  // namespace

double spectral_density(const SpinBosonParams& params, double omega) {
    const double w0_sq = params.omega0 * params.omega0;
    const double diff = omega * omega - w0_sq;
    return params.alpha * omega * w0_sq * w0_sq /
           (diff * diff + 4.0 * params.eta * params.eta * omega * omega);
}

double bose_eval(const RationalBathFit& fit, double omega) {
    double out = 2.0 * fit.temperature / omega;
    for (std::size_t j = 0; j < fit.nu.size(); ++j)
        out += 2.0 * fit.r[j] * omega / (omega * omega + fit.nu[j] * fit.nu[j]);
    return out;
}

Complex bose_eval(const RationalBathFit& fit, Complex omega) {
    Complex out = 2.0 * fit.temperature / omega;
    for (std::size_t j = 0; j < fit.nu.size(); ++j)
        out += 2.0 * fit.r[j] * omega / (omega * omega + fit.nu[j] * fit.nu[j]);
    return out;
}

RationalBathFit aaa_fit_bose(double temperature, double lambda, int n_poles) {
    if (n_poles < 0) throw std::invalid_argument("aaa_fit_bose: n_poles must be >= 0");
    return fit_impl(temperature, lambda, n_poles + 1, 0.0, n_poles);
}

RationalBathFit aaa_fit_bose_tol(double temperature, double lambda, double tol, int max_pairs) {
    if (!(tol > 0.0)) throw std::invalid_argument("aaa_fit_bose_tol: tol must be > 0");
    return fit_impl(temperature, lambda, max_pairs, tol, -1);
}

HeomModel spin_boson_model(const SpinBosonParams& params, const RationalBathFit& fit) {
    if (!(params.alpha > 0.0)) throw std::invalid_argument("spin_boson_model: alpha must be > 0");
    if (!(params.temperature > 0.0))
        throw std::invalid_argument("spin_boson_model: temperature must be > 0");
    if (!(params.omega0 > params.eta) || !(params.eta > 0.0))
        throw std::invalid_argument(
            "spin_boson_model: requires the underdamped case omega0 > eta > 0");
    if (std::abs(fit.temperature - params.temperature) >
        1e-12 * std::max(1.0, params.temperature))
        throw std::invalid_argument("spin_boson_model: fit temperature mismatch");

    Matrix sigma_x(2, 2), sigma_z(2, 2);
    sigma_x << 0, 1, 1, 0;
    sigma_z << 1, 0, 0, -1;
    const SystemOperator hamiltonian(sigma_x);
    const SystemOperator q(sigma_z);

    const double w0_sq = params.omega0 * params.omega0;
    const double big_omega = std::sqrt(w0_sq - params.eta * params.eta);
    const Complex gamma1(params.eta, big_omega);
    const Complex gamma2(params.eta, -big_omega);
    const Complex c1 = Complex(0.0, 1.0) * w0_sq * std::sqrt(params.alpha) /
                       (2.0 * std::sqrt(2.0 * params.eta) *
                        std::pow(w0_sq - params.eta * params.eta, 0.25));

    std::vector<BathMode> modes;
    const Complex bose1 = bose_eval(fit, Complex(0.0, -1.0) * gamma1);
    const Complex bose2 = bose_eval(fit, Complex(0.0, -1.0) * gamma2);
    modes.push_back({gamma1, c1, 0.5 * c1 * (1.0 + bose1), 0.5 * c1 * (1.0 - bose1), q});
    modes.push_back({gamma2, c1, -0.5 * c1 * (1.0 + bose2), -0.5 * c1 * (1.0 - bose2), q});
    for (std::size_t j = 0; j < fit.nu.size(); ++j) {
        const double nu = fit.nu[j];
        const double denom = (nu * nu + w0_sq) * (nu * nu + w0_sq) -
                             nu * nu * params.eta * params.eta;
        const Complex cj =
            Complex(0.0, 1.0) * std::sqrt(fit.r[j] * nu * w0_sq * w0_sq / (2.0 * denom));
        modes.push_back({Complex(nu, 0.0), cj, -cj, cj, q});
    }
    return HeomModel(hamiltonian, std::move(modes));
}

HeomModel mode_subset(const HeomModel& model, double nu_max) {
    std::vector<BathMode> kept;
    for (const BathMode& m : model.modes()) {
        const bool dynamical = m.gamma.imag() != 0.0;
        if (dynamical || m.gamma.real() <= nu_max) kept.push_back(m);
    }
    return HeomModel(model.hamiltonian(), std::move(kept));
}

}  // namespace heomspec
