#include "polblock/materials.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "polblock/errors.hpp"
#include "polblock/keyvalue.hpp"
#include "polblock/units.hpp"

namespace polblock::materials {

namespace {

const std::string kModule = "units-materials";

void require(bool ok, const std::string& key, const std::string& what)
{
    if (!ok) throw Error(ErrorKind::validation, kModule, "invalid material parameter '" + key + "': " + what);
}

} // namespace

LinewidthModel::Kind LinewidthModel::kind() const noexcept
{
    return (gx_slope_mev_per_K == 0.0 && gxp_slope_mev_per_K == 0.0 && gxp_activated_mev == 0.0)
               ? Kind::constant
               : Kind::linear_activated;
}

void LinewidthModel::validate() const
{
    // non-negative coefficients keep both rates >= 0 and gamma_x' monotone in T
    require(gx0_mev >= 0.0, "gx0_mev", "must be >= 0");
    require(gx_slope_mev_per_K >= 0.0, "gx_slope_mev_per_K", "must be >= 0");
    require(gxp_slope_mev_per_K >= 0.0, "gxp_slope_mev_per_K", "must be >= 0");
    require(gxp_activated_mev >= 0.0, "gxp_activated_mev", "must be >= 0");
    require(phonon_energy_mev > 0.0, "phonon_energy_mev", "must be > 0");
}

double bose_occupation(double energy_mev, double temperature_K)
{
    if (temperature_K < 0.0) throw Error(ErrorKind::domain, kModule, "temperature must be >= 0 K");
    if (temperature_K == 0.0) return 0.0;
    const double x = energy_mev / (units::boltzmann_mev_per_K * temperature_K);
    return 1.0 / std::expm1(x);
}

Linewidths linewidths_at(const LinewidthModel& model, double temperature_K)
{
    if (!(temperature_K >= 0.0)) throw Error(ErrorKind::domain, kModule, "temperature must be >= 0 K");
    const double gx = model.gx0_mev + model.gx_slope_mev_per_K * temperature_K;
    const double gxp = model.gxp_slope_mev_per_K * temperature_K
                       + model.gxp_activated_mev * bose_occupation(model.phonon_energy_mev, temperature_K);
    return {gx, gxp};
}

double MaterialParams::dispersion_mev_nm2() const noexcept
{
    return units::hbar2_over_2m0_mev_nm2 / mass_ratio;
}

void MaterialParams::validate(std::optional<double> check_product_mev_nm2) const
{
    require(mass_ratio > 0.0, "mass_ratio", "must be > 0");
    require(bohr_radius_nm > 0.0, "bohr_radius_nm", "must be > 0");
    require(binding_energy_mev > 0.0, "binding_energy_mev", "must be > 0");
    require(exciton_energy_mev > 0.0, "exciton_energy_mev", "must be > 0");
    require(pcv_mev_ps_per_nm > 0.0, "pcv_mev_ps_per_nm", "must be > 0");
    require(alpha > 0.0, "alpha", "must be > 0");
    require(eps_eff >= 1.0, "eps_eff", "must be >= 1");
    linewidth.validate();
    if (check_product_mev_nm2) {
        const double rel = std::abs(interaction_product_mev_nm2() / *check_product_mev_nm2 - 1.0);
        require(rel <= 0.01, "alpha",
                "alpha*E_b*a_B^2 = " + std::to_string(interaction_product_mev_nm2())
                    + " meV nm^2 differs from the check value by more than 1%");
    }
}

MaterialParams ws2_defaults()
{
    MaterialParams m;
    m.name = "WS2";
    m.alpha = kWs2Alpha;
    m.mass_ratio = 0.6;
    m.bohr_radius_nm = 1.75;
    m.binding_energy_mev = kWs2InteractionProduct / (m.alpha * m.bohr_radius_nm * m.bohr_radius_nm);
    m.exciton_energy_mev = 2000.0;
    m.pcv_mev_ps_per_nm = 4.80018849326515;
    m.eps_eff = 1.0;
    m.linewidth.gx0_mev = 0.5;
    m.linewidth.gx_slope_mev_per_K = 0.005;
    // phonon-activated pure dephasing with gamma_x'(300 K) = W0'(L = 9 nm)
    // for the Gaussian profile; it is frozen out at cryogenic temperatures
    m.linewidth.gxp_slope_mev_per_K = 0.0;
    m.linewidth.phonon_energy_mev = 30.0;
    m.linewidth.gxp_activated_mev = kWs2InteractionProduct / (2.0 * units::pi * 81.0)
                                    / bose_occupation(m.linewidth.phonon_energy_mev, 300.0);
    return m;
}

MaterialParams apply_overrides(const MaterialParams& base, const MaterialOverrides& o)
{
    MaterialParams m = base;
    const double product = base.interaction_product_mev_nm2();
    if (o.mass_ratio) m.mass_ratio = *o.mass_ratio;
    if (o.alpha) m.alpha = *o.alpha;
    if (o.bohr_radius_nm) m.bohr_radius_nm = *o.bohr_radius_nm;
    if (o.binding_energy_mev) m.binding_energy_mev = *o.binding_energy_mev;
    if (o.bohr_radius_nm && !o.binding_energy_mev) {
        m.binding_energy_mev = product / (m.alpha * m.bohr_radius_nm * m.bohr_radius_nm);
    } else if (o.binding_energy_mev && !o.bohr_radius_nm) {
        m.bohr_radius_nm = std::sqrt(product / (m.alpha * m.binding_energy_mev));
    }
    if (o.exciton_energy_mev) m.exciton_energy_mev = *o.exciton_energy_mev;
    if (o.pcv_mev_ps_per_nm) m.pcv_mev_ps_per_nm = *o.pcv_mev_ps_per_nm;
    if (o.eps_eff) m.eps_eff = *o.eps_eff;
    if (o.gx0_mev) m.linewidth.gx0_mev = *o.gx0_mev;
    if (o.gx_slope_mev_per_K) m.linewidth.gx_slope_mev_per_K = *o.gx_slope_mev_per_K;
    if (o.gxp_slope_mev_per_K) m.linewidth.gxp_slope_mev_per_K = *o.gxp_slope_mev_per_K;
    if (o.gxp_activated_mev) m.linewidth.gxp_activated_mev = *o.gxp_activated_mev;
    if (o.phonon_energy_mev) m.linewidth.phonon_energy_mev = *o.phonon_energy_mev;
    return m;
}

MaterialOverrides parse_material(std::istream& in, const std::string& source_name)
{
    static constexpr std::array<std::string_view, 12> kKeys = {
        "mass_ratio", "bohr_radius_nm", "binding_energy_mev", "exciton_energy_mev",
        "pcv_mev_ps_per_nm", "alpha", "eps_eff", "gx0_mev",
        "gx_slope_mev_per_K", "gxp_slope_mev_per_K", "gxp_activated_mev", "phonon_energy_mev"};

    MaterialOverrides o;
    for (const auto& e : keyvalue::parse(in, source_name, false)) {
        const double v = keyvalue::to_double(e, kModule);
        if (e.key == "mass_ratio") o.mass_ratio = v;
        else if (e.key == "bohr_radius_nm") o.bohr_radius_nm = v;
        else if (e.key == "binding_energy_mev") o.binding_energy_mev = v;
        else if (e.key == "exciton_energy_mev") o.exciton_energy_mev = v;
        else if (e.key == "pcv_mev_ps_per_nm") o.pcv_mev_ps_per_nm = v;
        else if (e.key == "alpha") o.alpha = v;
        else if (e.key == "eps_eff") o.eps_eff = v;
        else if (e.key == "gx0_mev") o.gx0_mev = v;
        else if (e.key == "gx_slope_mev_per_K") o.gx_slope_mev_per_K = v;
        else if (e.key == "gxp_slope_mev_per_K") o.gxp_slope_mev_per_K = v;
        else if (e.key == "gxp_activated_mev") o.gxp_activated_mev = v;
        else if (e.key == "phonon_energy_mev") o.phonon_energy_mev = v;
        else {
            std::string msg = source_name + ":" + std::to_string(e.line) + ": unknown material key '" + e.key + "'";
            if (auto s = keyvalue::suggest(e.key, kKeys); !s.empty()) msg += " (did you mean '" + s + "'?)";
            throw Error(ErrorKind::validation, kModule, msg);
        }
    }
    return o;
}

MaterialParams load_material_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, kModule, "cannot open material file '" + path + "'");
    const MaterialOverrides o = parse_material(in, path);
    const std::pair<const char*, bool> present[] = {
        {"mass_ratio", o.mass_ratio.has_value()},
        {"bohr_radius_nm", o.bohr_radius_nm.has_value()},
        {"binding_energy_mev", o.binding_energy_mev.has_value()},
        {"exciton_energy_mev", o.exciton_energy_mev.has_value()},
        {"pcv_mev_ps_per_nm", o.pcv_mev_ps_per_nm.has_value()},
        {"alpha", o.alpha.has_value()},
        {"eps_eff", o.eps_eff.has_value()},
        {"gx0_mev", o.gx0_mev.has_value()},
        {"gx_slope_mev_per_K", o.gx_slope_mev_per_K.has_value()},
        {"gxp_slope_mev_per_K", o.gxp_slope_mev_per_K.has_value()},
        {"gxp_activated_mev", o.gxp_activated_mev.has_value()},
        {"phonon_energy_mev", o.phonon_energy_mev.has_value()},
    };
    for (const auto& [key, has] : present) {
        if (!has) throw Error(ErrorKind::validation, kModule, path + ": missing material key '" + key + "'");
    }
    MaterialParams m = apply_overrides(ws2_defaults(), o);
    m.name = path;
    m.validate();
    return m;
}

} // namespace polblock::materials
