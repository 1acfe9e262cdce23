#pragma once

#include <iosfwd>
#include <optional>
#include <string>

namespace polblock::materials {

// gamma_x(T)  = gx0 + gx_slope * T
// gamma_x'(T) = gxp_slope * T + gxp_activated * n_B(phonon_energy, T)
struct LinewidthModel {
    enum class Kind { constant, linear_activated };

    double gx0_mev{0.0};
    double gx_slope_mev_per_K{0.0};
    double gxp_slope_mev_per_K{0.0};
    double gxp_activated_mev{0.0};
    double phonon_energy_mev{30.0};

    Kind kind() const noexcept;
    void validate() const;
};

struct Linewidths {
    double gamma_x_mev;
    double gamma_xp_mev;

    // Gamma_x = gamma_x + gamma_x'
    double total_mev() const noexcept { return gamma_x_mev + gamma_xp_mev; }
};

double bose_occupation(double energy_mev, double temperature_K);

Linewidths linewidths_at(const LinewidthModel& model, double temperature_K);

struct MaterialParams {
    std::string name{"custom"};
    double mass_ratio{1.0};           // M / m0, M = m_e + m_h
    double bohr_radius_nm{1.0};
    double binding_energy_mev{1.0};
    double exciton_energy_mev{1.0};   // band-edge exciton energy hbar*omega_0
    double pcv_mev_ps_per_nm{1.0};    // |p_cv|
    double alpha{1.0};
    double eps_eff{1.0};
    LinewidthModel linewidth{};

    // hbar S W_000 = alpha E_b a_B^2
    double interaction_product_mev_nm2() const noexcept
    {
        return alpha * binding_energy_mev * bohr_radius_nm * bohr_radius_nm;
    }

    // hbar^2 / (2 M) in meV nm^2
    double dispersion_mev_nm2() const noexcept;

    // Throws validation errors; if check_product is given, also checks the
    // interaction product within 1%.
    void validate(std::optional<double> check_product_mev_nm2 = std::nullopt) const;
};

// hbar S W_000 for WS2, in meV nm^2.
inline constexpr double kWs2InteractionProduct = 2040.0;
inline constexpr double kWs2Alpha = 2.07;

// WS2 record. alpha and the interaction product are fixed; the remaining
// values are literature-sourced defaults (see data/ws2.mat) and |p_cv| is
// calibrated to hbar G0 = 22 meV at L_z = 150 nm, projection 0.5,
// hbar omega_c = hbar omega_0.
MaterialParams ws2_defaults();

// Optional overrides applied on top of a base record. When exactly one of
// a_B and E_b is supplied, the other is recomputed to keep alpha E_b a_B^2
// fixed.
struct MaterialOverrides {
    std::optional<double> mass_ratio;
    std::optional<double> bohr_radius_nm;
    std::optional<double> binding_energy_mev;
    std::optional<double> exciton_energy_mev;
    std::optional<double> pcv_mev_ps_per_nm;
    std::optional<double> alpha;
    std::optional<double> eps_eff;
    std::optional<double> gx0_mev;
    std::optional<double> gx_slope_mev_per_K;
    std::optional<double> gxp_slope_mev_per_K;
    std::optional<double> gxp_activated_mev;
    std::optional<double> phonon_energy_mev;
};

MaterialParams apply_overrides(const MaterialParams& base, const MaterialOverrides& overrides);

// key = value material file; keys are the MaterialParams field names above
// plus the linewidth coefficients. Unknown keys are rejected.
MaterialOverrides parse_material(std::istream& in, const std::string& source_name = "<material>");
MaterialParams load_material_file(const std::string& path);

} // namespace polblock::materials
