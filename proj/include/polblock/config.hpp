#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polblock/blockade.hpp"
#include "polblock/field_profile.hpp"
#include "polblock/lindblad.hpp"
#include "polblock/materials.hpp"
#include "polblock/spectral.hpp"

// Run configuration: [section] headers with key = value lines. Every key is
// known in advance; unknown keys and sections are rejected with a
// suggestion. See README.md for the full key table.
namespace polblock::config {

enum class ProfileKind { gaussian, tabulated };

// Resonator / drive frequency selection. Numbers are absolute energies in meV.
struct Frequency {
    enum class Kind { value, omega0, Omega0, wc, optimize };
    Kind kind{Kind::Omega0};
    double value_mev{0.0};
};

struct RunConfig {
    std::string source;

    // [material]
    std::optional<std::string> material_file;
    std::optional<double> check_product_mev_nm2;
    materials::MaterialParams material;

    // [profile]
    ProfileKind profile_kind{ProfileKind::gaussian};
    field::GaussianProfile gaussian{};
    std::optional<std::string> profile_csv;

    // [system]
    double gamma_c_mev{5.0};
    double F_mev{1.5};
    double T_K{300.0};
    Frequency wc{};
    Frequency wd{Frequency::Kind::wc, 0.0};
    std::optional<double> gamma_x_mev;
    std::optional<double> gamma_xp_mev;
    std::optional<double> G0_mev;

    // [numerics]
    lindblad::FockSpace fock{};
    bool adaptive_truncation{true};
    double truncation_tol{1e-6};
    int max_level{16};
    double t_max_ps{1.0};
    double dt_ps{0.0};
    double tau_max_ps{10.0};
    int tau_points{201};
    double propagation_tol{1e-8};
    blockade::OptimizationSpec optimization{};
    spectral::Backend backend{spectral::Backend::analytic_gaussian};
    double x_min{0.05};
    double x_max{20.0};
    int x_points{400};
    double table_extent_xi{60.0};   // tabulated J covers [E0, E0 + extent * xi]
    int table_points{6001};
    int ring_points{64};

    // [sweep]
    std::vector<double> L_list;
    double crossover_margin{0.01};
    double residual_threshold_mev{1.0};

    // [output]
    std::string out_dir{"out"};

    // Resolved values as (section.key, text), in a fixed order.
    std::vector<std::pair<std::string, std::string>> echo() const;
};

RunConfig parse_config(std::istream& in, const std::string& source, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

// All "section.key" names accepted by the parser.
std::vector<std::string> known_keys();

} // namespace polblock::config
