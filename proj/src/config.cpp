#include "heomspec/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace heomspec {

namespace {

using nlohmann::json;

void require_object(const json& j, const char* where) {
    if (!j.is_object()) throw std::invalid_argument(std::string(where) + ": expected an object");
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const char* where) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (key == a) known = true;
        if (!known)
            throw std::invalid_argument(std::string(where) + ": unknown key '" + key + "'");
    }
}

double finite_number(const json& j, const char* where) {
    if (!j.is_number()) throw std::invalid_argument(std::string(where) + ": expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x))
        throw std::invalid_argument(std::string(where) + ": non-finite number");
    return x;
}

Complex parse_complex(const json& j, const char* where) {
    if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument(std::string(where) + ": complex values are [re, im]");
    return {finite_number(j[0], where), finite_number(j[1], where)};
}

Matrix parse_matrix(const json& j, const char* where) {
    if (!j.is_array() || j.empty())
        throw std::invalid_argument(std::string(where) + ": expected a list of rows");
    const std::size_t d = j.size();
    Matrix m(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        if (!j[i].is_array() || j[i].size() != d)
            throw std::invalid_argument(std::string(where) + ": matrix must be square");
        for (std::size_t k = 0; k < d; ++k) m(i, k) = parse_complex(j[i][k], where);
    }
    return m;
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_json(m(i, k)));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

ConfigDocument parse_config(const std::string& json_text) {
    const json root = json::parse(json_text);
    require_object(root, "config");
    reject_unknown_keys(root, {"system", "modes", "spin_boson", "truncation", "run"}, "config");

    ConfigDocument config;

    if (root.contains("modes") == root.contains("spin_boson"))
        throw std::invalid_argument("config: exactly one of 'modes' / 'spin_boson' required");

    if (root.contains("system")) {
        const json& sys = root["system"];
        require_object(sys, "system");
        reject_unknown_keys(sys, {"dim", "hamiltonian"}, "system");
        SystemConfig out;
        out.hamiltonian = parse_matrix(sys.at("hamiltonian"), "system.hamiltonian");
        out.dim = out.hamiltonian.rows();
        if (sys.contains("dim") && Eigen::Index(finite_number(sys["dim"], "system.dim")) != out.dim)
            throw std::invalid_argument("system: dim does not match the Hamiltonian size");
        config.system = std::move(out);
    }

    if (root.contains("modes")) {
        if (!config.system)
            throw std::invalid_argument("config: explicit modes require a 'system' block");
        if (!root["modes"].is_array() || root["modes"].empty())
            throw std::invalid_argument("modes: expected a nonempty list");
        std::vector<ModeConfig> modes;
        for (const json& m : root["modes"]) {
            require_object(m, "mode");
            reject_unknown_keys(m, {"gamma", "c", "c_prime", "c_dblprime", "q"}, "mode");
            ModeConfig mode;
            mode.gamma = parse_complex(m.at("gamma"), "mode.gamma");
            mode.c = parse_complex(m.at("c"), "mode.c");
            mode.c_prime = parse_complex(m.at("c_prime"), "mode.c_prime");
            mode.c_dblprime = parse_complex(m.at("c_dblprime"), "mode.c_dblprime");
            mode.q = parse_matrix(m.at("q"), "mode.q");
            modes.push_back(std::move(mode));
        }
        config.explicit_modes = std::move(modes);
    }

    if (root.contains("spin_boson")) {
        if (config.system)
            throw std::invalid_argument(
                "config: spin_boson fixes the system block; remove 'system'");
        const json& sb = root["spin_boson"];
        require_object(sb, "spin_boson");
        reject_unknown_keys(sb,
                            {"alpha", "omega0", "eta", "temperature", "lambda", "n_poles",
                             "nu_max", "fit_file"},
                            "spin_boson");
        SpinBosonConfig out;
        out.alpha = finite_number(sb.at("alpha"), "spin_boson.alpha");
        out.omega0 = finite_number(sb.at("omega0"), "spin_boson.omega0");
        out.eta = finite_number(sb.at("eta"), "spin_boson.eta");
        out.temperature = finite_number(sb.at("temperature"), "spin_boson.temperature");
        out.lambda = finite_number(sb.at("lambda"), "spin_boson.lambda");
        out.n_poles = int(finite_number(sb.at("n_poles"), "spin_boson.n_poles"));
        if (sb.contains("nu_max")) out.nu_max = finite_number(sb["nu_max"], "spin_boson.nu_max");
        if (sb.contains("fit_file")) out.fit_file = sb["fit_file"].get<std::string>();
        config.spin_boson = std::move(out);
    }

    if (root.contains("truncation")) {
        const json& tr = root["truncation"];
        require_object(tr, "truncation");
        reject_unknown_keys(tr, {"gamma_star", "gamma_star_list"}, "truncation");
        if (tr.contains("gamma_star") == tr.contains("gamma_star_list"))
            throw std::invalid_argument(
                "truncation: exactly one of 'gamma_star' / 'gamma_star_list' required");
        if (tr.contains("gamma_star"))
            config.truncation.gamma_stars = {finite_number(tr["gamma_star"], "truncation")};
        else
            for (const json& g : tr["gamma_star_list"])
                config.truncation.gamma_stars.push_back(finite_number(g, "truncation"));
    }

    if (root.contains("run")) {
        const json& run = root["run"];
        require_object(run, "run");
        reject_unknown_keys(run,
                            {"kind", "seed", "size_cap", "stability_tol_rel", "cluster_tol_rel",
                             "window"},
                            "run");
        if (run.contains("kind")) {
            const std::string kind = run["kind"].get<std::string>();
            if (kind == "naive") config.run.kind = TruncationKind::naive;
            else if (kind == "schur") config.run.kind = TruncationKind::schur_terminated;
            else throw std::invalid_argument("run.kind: expected 'naive' or 'schur'");
        }
        if (run.contains("seed")) config.run.seed = run["seed"].get<std::uint64_t>();
        if (run.contains("size_cap")) config.run.size_cap = run["size_cap"].get<std::size_t>();
        if (run.contains("stability_tol_rel"))
            config.run.stability_tol_rel = finite_number(run["stability_tol_rel"], "run");
        if (run.contains("cluster_tol_rel"))
            config.run.cluster_tol_rel = finite_number(run["cluster_tol_rel"], "run");
        if (run.contains("window")) {
            const json& w = run["window"];
            require_object(w, "run.window");
            reject_unknown_keys(w, {"re_min", "re_max", "im_min", "im_max"}, "run.window");
            Window window;
            window.re_min = finite_number(w.at("re_min"), "run.window");
            window.re_max = finite_number(w.at("re_max"), "run.window");
            window.im_min = finite_number(w.at("im_min"), "run.window");
            window.im_max = finite_number(w.at("im_max"), "run.window");
            config.run.window = window;
        }
    }
    return config;
}

ConfigDocument load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string config_to_json(const ConfigDocument& config) {
    json root = json::object();
    if (config.system) {
        root["system"] = {{"dim", config.system->dim},
                          {"hamiltonian", matrix_json(config.system->hamiltonian)}};
    }
    if (config.explicit_modes) {
        json modes = json::array();
        for (const ModeConfig& m : *config.explicit_modes)
            modes.push_back({{"gamma", complex_json(m.gamma)},
                             {"c", complex_json(m.c)},
                             {"c_prime", complex_json(m.c_prime)},
                             {"c_dblprime", complex_json(m.c_dblprime)},
                             {"q", matrix_json(m.q)}});
        root["modes"] = std::move(modes);
    }
    if (config.spin_boson) {
        const SpinBosonConfig& sb = *config.spin_boson;
        json out = {{"alpha", sb.alpha},         {"omega0", sb.omega0},
                    {"eta", sb.eta},             {"temperature", sb.temperature},
                    {"lambda", sb.lambda},       {"n_poles", sb.n_poles}};
        if (std::isfinite(sb.nu_max)) out["nu_max"] = sb.nu_max;
        if (sb.fit_file) out["fit_file"] = *sb.fit_file;
        root["spin_boson"] = std::move(out);
    }
    if (!config.truncation.gamma_stars.empty()) {
        if (config.truncation.gamma_stars.size() == 1)
            root["truncation"] = {{"gamma_star", config.truncation.gamma_stars.front()}};
        else
            root["truncation"] = {{"gamma_star_list", config.truncation.gamma_stars}};
    }
    json run = {{"kind", to_string(config.run.kind)},
                {"seed", config.run.seed},
                {"size_cap", config.run.size_cap},
                {"stability_tol_rel", config.run.stability_tol_rel},
                {"cluster_tol_rel", config.run.cluster_tol_rel}};
    if (config.run.window)
        run["window"] = {{"re_min", config.run.window->re_min},
                         {"re_max", config.run.window->re_max},
                         {"im_min", config.run.window->im_min},
                         {"im_max", config.run.window->im_max}};
    root["run"] = std::move(run);
    return root.dump(2) + "\n";
}

HeomModel build_model(const ConfigDocument& config) {
    if (config.explicit_modes) {
        std::vector<BathMode> modes;
        for (const ModeConfig& m : *config.explicit_modes)
            modes.push_back({m.gamma, m.c, m.c_prime, m.c_dblprime, SystemOperator(m.q)});
        return HeomModel(SystemOperator(config.system->hamiltonian), std::move(modes));
    }
    const SpinBosonConfig& sb = *config.spin_boson;
    SpinBosonParams params{sb.alpha, sb.omega0, sb.eta, sb.temperature, sb.lambda, sb.n_poles};
    const RationalBathFit fit = sb.fit_file
                                    ? load_fit_file(*sb.fit_file)
                                    : aaa_fit_bose(sb.temperature, sb.lambda, sb.n_poles);
    HeomModel model = spin_boson_model(params, fit);
    if (std::isfinite(sb.nu_max)) model = mode_subset(model, sb.nu_max);
    return model;
}

std::string fit_to_json(const RationalBathFit& fit) {
    json root = {{"temperature", fit.temperature},
                 {"nu", fit.nu},
                 {"r", fit.r},
                 {"max_rel_error", fit.max_rel_error},
                 {"zero_pole_residue", fit.zero_pole_residue},
                 {"discarded_poles", fit.discarded_poles},
                 {"residues_real_positive", fit.residues_real_positive},
                 {"grid", fit.grid}};
    return root.dump(2) + "\n";
}

RationalBathFit fit_from_json(const std::string& json_text) {
    const json root = json::parse(json_text);
    require_object(root, "fit");
    reject_unknown_keys(root,
                        {"temperature", "nu", "r", "max_rel_error", "zero_pole_residue",
                         "discarded_poles", "residues_real_positive", "grid"},
                        "fit");
    RationalBathFit fit;
    fit.temperature = finite_number(root.at("temperature"), "fit.temperature");
    for (const json& v : root.at("nu")) fit.nu.push_back(finite_number(v, "fit.nu"));
    for (const json& v : root.at("r")) fit.r.push_back(finite_number(v, "fit.r"));
    if (fit.nu.size() != fit.r.size())
        throw std::invalid_argument("fit: nu and r must have equal lengths");
    if (root.contains("max_rel_error"))
        fit.max_rel_error = finite_number(root["max_rel_error"], "fit");
    if (root.contains("zero_pole_residue"))
        fit.zero_pole_residue = finite_number(root["zero_pole_residue"], "fit");
    if (root.contains("discarded_poles")) fit.discarded_poles = root["discarded_poles"].get<int>();
    if (root.contains("residues_real_positive"))
        fit.residues_real_positive = root["residues_real_positive"].get<bool>();
    if (root.contains("grid")) fit.grid = root["grid"].get<std::string>();
    return fit;
}

RationalBathFit load_fit_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open fit file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return fit_from_json(buffer.str());
}

}  // namespace heomspec
