// config.hpp - strict JSON configuration documents for the CLI. Complex
// numbers are always [re, im] arrays; unknown keys and non-finite numbers are
// rejected.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "heomspec/assembly.hpp"
#include "heomspec/bath.hpp"
#include "heomspec/spectra.hpp"

namespace heomspec {

struct SystemConfig {
    Eigen::Index dim = 0;
    Matrix hamiltonian;  // row-major list of rows, entries as [re, im]
};

struct ModeConfig {
    Complex gamma;
    Complex c;
    Complex c_prime;
    Complex c_dblprime;
    Matrix q;
};

struct SpinBosonConfig {
    double alpha = 0.0;
    double omega0 = 0.0;
    double eta = 0.0;
    double temperature = 0.0;
    double lambda = 0.0;
    int n_poles = 0;
    double nu_max = std::numeric_limits<double>::infinity();
    std::optional<std::string> fit_file;  // frozen fit written by fit-bath
};

struct TruncationConfig {
    std::vector<double> gamma_stars;  // one entry: single run; several: sweep
};

struct RunConfig {
    TruncationKind kind = TruncationKind::schur_terminated;
    std::uint64_t seed = 1;
    std::size_t size_cap = kDefaultTruncationCap;
    double stability_tol_rel = 1e-8;
    double cluster_tol_rel = 1e-6;
    std::optional<Window> window;
};

struct ConfigDocument {
    std::optional<SystemConfig> system;
    std::optional<std::vector<ModeConfig>> explicit_modes;
    std::optional<SpinBosonConfig> spin_boson;
    TruncationConfig truncation;
    RunConfig run;
};

ConfigDocument parse_config(const std::string& json_text);
ConfigDocument load_config_file(const std::filesystem::path& path);
std::string config_to_json(const ConfigDocument& config);

// Model described by the config; spin-boson configs run (or load) the bath
// fit first.
HeomModel build_model(const ConfigDocument& config);

// Fit file round-trip for frozen bath fits.
std::string fit_to_json(const RationalBathFit& fit);
RationalBathFit fit_from_json(const std::string& json_text);
RationalBathFit load_fit_file(const std::filesystem::path& path);

}  // namespace heomspec
