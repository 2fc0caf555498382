#include "heomspec/commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "heomspec/bounds.hpp"

namespace heomspec {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

ConfigDocument load_with_overrides(const CommandOptions& opts) {
    ConfigDocument config = load_config_file(opts.config_path);
    if (opts.seed) config.run.seed = *opts.seed;
    return config;
}

void write_bundle_common(const CommandOptions& opts, const ConfigDocument& config,
                         const char* command, double elapsed) {
    std::filesystem::create_directories(opts.out_dir);
    write_file(opts.out_dir / "config_echo.json", config_to_json(config));
    nlohmann::json meta = {{"tool", "heomspec"},
                           {"version", kVersion},
                           {"command", command},
                           {"elapsed_seconds", elapsed}};
    write_file(opts.out_dir / "metadata.json", meta.dump(2) + "\n");
}

std::string eigenvalue_csv(const SpectrumReport& report) {
    std::vector<std::size_t> order(report.eigenvalues.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Complex za = report.eigenvalues[a], zb = report.eigenvalues[b];
        if (za.real() != zb.real()) return za.real() > zb.real();
        if (za.imag() != zb.imag()) return za.imag() < zb.imag();
        return a < b;
    });
    std::string csv = "re,im,cluster_id\n";
    for (std::size_t i : order)
        csv += format_double(report.eigenvalues[i].real()) + "," +
               format_double(report.eigenvalues[i].imag()) + "," +
               std::to_string(report.cluster_id[i]) + "\n";
    return csv;
}

std::string stability_text(const SpectrumReport& report) {
    std::ostringstream out;
    out << "stable " << (report.stable ? "true" : "false") << "\n"
        << "gapped " << (report.gapped ? "true" : "false") << "\n"
        << "spectral_abscissa " << format_double(report.spectral_abscissa) << "\n"
        << "zero_mode_error " << format_double(report.zero_mode_error) << "\n"
        << "gap " << format_double(report.gap) << "\n"
        << "matrix_scale " << format_double(report.matrix_scale) << "\n"
        << "eigenvalue_count " << report.eigenvalues.size() << "\n";
    return out.str();
}

std::string check_line(const CheckResult& check) {
    std::ostringstream out;
    out << "CHECK " << check.name << " " << (check.pass ? "PASS" : "FAIL")
        << " lhs=" << format_double(check.lhs) << " rhs=" << format_double(check.rhs);
    if (!check.note.empty()) out << " note=" << check.note;
    out << "\n";
    return out.str();
}

double single_gamma_star(const ConfigDocument& config, const char* command) {
    if (config.truncation.gamma_stars.size() != 1)
        throw std::invalid_argument(std::string(command) +
                                    ": config must set exactly one truncation.gamma_star");
    return config.truncation.gamma_stars.front();
}

}  // namespace

int cmd_fit_bath(const CommandOptions& opts) {
    Timer timer;
    const ConfigDocument config = load_with_overrides(opts);
    if (!config.spin_boson)
        throw std::invalid_argument("fit-bath: config must contain a spin_boson block");
    const SpinBosonConfig& sb = *config.spin_boson;
    const RationalBathFit fit = aaa_fit_bose(sb.temperature, sb.lambda, sb.n_poles);

    std::filesystem::create_directories(opts.out_dir);
    write_file(opts.out_dir / "fit.json", fit_to_json(fit));
    write_bundle_common(opts, config, "fit-bath", timer.seconds());

    std::printf("# coth fit: T=%g Lambda=%g poles=%zu max_rel_error=%.3e\n", fit.temperature,
                sb.lambda, fit.nu.size(), fit.max_rel_error);
    std::printf("%-4s", "j");
    for (std::size_t j = 0; j < fit.nu.size(); ++j) std::printf(" %10zu", j + 1);
    std::printf("\n%-4s", "nu");
    for (double nu : fit.nu) std::printf(" %10.4g", nu);
    std::printf("\n%-4s", "r");
    for (double r : fit.r) std::printf(" %10.4g", r);
    std::printf("\n");
    return 0;
}

int cmd_spectrum(const CommandOptions& opts) {
    Timer timer;
    const ConfigDocument config = load_with_overrides(opts);
    const HeomModel model = build_model(config);
    const Truncation trunc =
        build_truncation(model, single_gamma_star(config, "spectrum"), config.run.size_cap);
    const TruncatedLiouvillian L = config.run.kind == TruncationKind::naive
                                       ? assemble_naive(model, trunc)
                                       : assemble_schur_terminated(model, trunc);
    const SpectrumReport report = stability_report(L, config.run.stability_tol_rel);

    std::filesystem::create_directories(opts.out_dir);
    write_file(opts.out_dir / "eigenvalues.csv", eigenvalue_csv(report));
    write_file(opts.out_dir / "stability.txt", stability_text(report));
    write_bundle_common(opts, config, "spectrum", timer.seconds());

    std::cout << "spectrum: kind=" << to_string(config.run.kind) << " |T|=" << trunc.size()
              << " dim=" << L.matrix.rows() << "\n"
              << stability_text(report);
    return 0;
}

int cmd_converge(const CommandOptions& opts) {
    Timer timer;
    const ConfigDocument config = load_with_overrides(opts);
    const HeomModel model = build_model(config);
    if (config.truncation.gamma_stars.empty())
        throw std::invalid_argument("converge: config must set truncation.gamma_star_list");

    Window window;
    if (config.run.window) {
        window = *config.run.window;
    } else {
        const Truncation first =
            build_truncation(model, config.truncation.gamma_stars.front(), config.run.size_cap);
        window = default_trace_window(model, decay_rates_lower(model, first).gamma_prime);
    }

    const ConvergenceTrace trace =
        convergence_trace(model, config.truncation.gamma_stars, window, config.run.kind);

    std::string trace_csv = "step,gamma_star,gamma_prime,size,window_count,distance_to_previous\n";
    std::string eig_csv = "step,re,im\n";
    for (std::size_t k = 0; k < trace.steps.size(); ++k) {
        const ConvergenceStep& step = trace.steps[k];
        trace_csv += std::to_string(k) + "," + format_double(step.gamma_star) + "," +
                     format_double(step.gamma_prime) + "," + std::to_string(step.truncation_size) +
                     "," + std::to_string(step.window_eigenvalues.size()) + "," +
                     format_double(step.distance_to_previous) + "\n";
        for (const Complex& lambda : step.window_eigenvalues)
            eig_csv += std::to_string(k) + "," + format_double(lambda.real()) + "," +
                       format_double(lambda.imag()) + "\n";
        std::cout << "converge: step=" << k << " gamma_star=" << step.gamma_star
                  << " size=" << step.truncation_size
                  << " distance=" << step.distance_to_previous << "\n";
    }

    std::filesystem::create_directories(opts.out_dir);
    write_file(opts.out_dir / "trace.csv", trace_csv);
    write_file(opts.out_dir / "trace_eigenvalues.csv", eig_csv);
    write_bundle_common(opts, config, "converge", timer.seconds());
    return 0;
}

int cmd_check_bounds(const CommandOptions& opts) {
    Timer timer;
    const ConfigDocument config = load_with_overrides(opts);
    const HeomModel model = build_model(config);

    BoundSuiteOptions suite;
    suite.gamma_star = single_gamma_star(config, "check-bounds");
    suite.seed = config.run.seed;
    suite.size_cap = config.run.size_cap;
    suite.radius_scale = opts.inject_radius_scale;
    const BoundSuiteReport report = run_bound_suite(model, suite);

    std::string text;
    for (const CheckResult& check : report.checks) text += check_line(check);
    text += report.all_pass ? "ALL PASS\n" : "FAILURES PRESENT\n";

    std::filesystem::create_directories(opts.out_dir);
    write_file(opts.out_dir / "report.txt", text);
    write_bundle_common(opts, config, "check-bounds", timer.seconds());

    std::cout << text;
    return report.all_pass ? 0 : 1;
}

}  // namespace heomspec
