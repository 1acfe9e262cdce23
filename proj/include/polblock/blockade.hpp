#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "polblock/field_profile.hpp"
#include "polblock/lindblad.hpp"
#include "polblock/materials.hpp"
#include "polblock/spectral.hpp"

// Minimization of g2(0) over the resonator and drive frequencies, sweeps over
// the lateral confinement L and the regime map of the relevant energy scales.
namespace polblock::blockade {

// Both frequencies are searched as offsets from hbar omega_0 within the same box.
struct OptimizationSpec {
    double box_lo_mev{-400.0};
    double box_hi_mev{400.0};
    int grid{41};               // coarse points per axis
    int starts{5};              // best coarse cells refined by Nelder-Mead
    double rel_tol{1e-4};       // on g2 across the simplex
    int max_iterations{400};    // per start
    unsigned threads{1};
    bool weak_drive_seeds{true};  // also refine from the zeros of the two-photon amplitude

    double spacing_mev() const noexcept { return (box_hi_mev - box_lo_mev) / (grid - 1); }
    void validate() const;
};

// Frequency-independent part of the two-mode model.
struct SystemTemplate {
    double omega0_mev{0.0};
    double Omega0_mev{0.0};
    double G0_mev{0.0};
    double W0p_mev{0.0};
    double gamma_c_mev{0.0};
    double gamma_x_mev{0.0};
    double gamma_xp_mev{0.0};
    double F_mev{0.0};
    // Gamma_res is re-evaluated at the upper polariton of each candidate omega_c;
    // without a model it is zero.
    std::optional<spectral::SpectralModel> residual{};
    lindblad::FockSpace fock{};

    double Gamma_res_mev(double wc_mev) const;
    lindblad::ReducedSystem at(double dc_mev, double dd_mev, double Gamma_res_mev) const;
    // every absolute frequency moved by delta
    SystemTemplate shifted(double delta_mev) const;
};

struct Optimum {
    double g2_min;
    double wc_mev;
    double wd_mev;
    double n_cav;
    double n_exc;
    double Gamma_res_mev;
    double coarse_min;
    std::size_t evaluations;
};

// Detuning offsets (dc, dd) from hbar omega_0, inside the box, where the
// weak-drive two-photon resonator amplitude vanishes when pure dephasing is
// neglected. These interference dips are narrower than a typical coarse
// grid cell, so they are refined as additional starts.
std::vector<std::array<double, 2>> weak_drive_seeds(const SystemTemplate& system, const OptimizationSpec& spec);

Optimum optimize_g2(const SystemTemplate& system, const OptimizationSpec& spec);

// Material, profile shape and operating point shared by the L-dependent
// runs. G0 is evaluated once at hbar omega_c = hbar omega_0 (it does not
// depend on L) unless G0_mev is given.
struct ConfinementSetup {
    materials::MaterialParams material;
    field::GaussianProfile profile;   // L_nm is replaced per point
    double temperature_K{300.0};
    double gamma_c_mev{25.0};
    double F_mev{1.5};
    std::optional<double> G0_mev{};
    std::optional<double> gamma_x_mev{};   // override the material linewidth model
    std::optional<double> gamma_xp_mev{};
    lindblad::FockSpace fock{};

    void validate() const;
    double G0_reference_mev() const;
    materials::Linewidths linewidths() const;
    SystemTemplate system_at(double L_nm) const;
};

struct SweepRecord {
    double L_nm;
    double G0_mev;
    double W0p_mev;
    double xi_mev;
    double gamma_x_mev;
    double gamma_xp_mev;
    Optimum optimum;  // its Gamma_res_mev is the value at the optimal omega_c
};

struct SweepResult {
    std::vector<SweepRecord> records;   // ascending L
    // largest L (scanning downward from the top of the list) with
    // g2_min < 1 - margin, i.e. where the optimized g2 first drops below 1
    std::optional<double> crossover_L_nm;
    // L where W0' = gamma_x', from the closed-form L^-2 scaling
    std::optional<double> dephasing_L_nm;
};

SweepResult sweep_L(const ConfinementSetup& setup, std::span<const double> L_nm, const OptimizationSpec& spec,
                    double crossover_margin);

enum class Regime { residual_dominated, blockade_window, linear };

constexpr std::string_view to_string(Regime r) noexcept
{
    switch (r) {
    case Regime::residual_dominated: return "residual-dominated";
    case Regime::blockade_window: return "blockade-window";
    case Regime::linear: return "linear";
    }
    return "linear";
}

struct RegimeRow {
    double L_nm;
    double G0_mev;
    double W0p_mev;
    double Gamma_res_mev;  // at hbar omega_c = hbar Omega_0
    double gamma_xp_mev;
    double gamma_x_mev;
    double xi_mev;
    Regime regime;
};

// Gamma_res counts as non-negligible above residual_threshold_mev.
std::vector<RegimeRow> regime_map(const ConfinementSetup& setup, std::span<const double> L_nm,
                                  double residual_threshold_mev);

} // namespace polblock::blockade
