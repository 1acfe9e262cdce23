#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "polblock/errors.hpp"
#include "polblock/materials.hpp"
#include "polblock/units.hpp"

using namespace polblock;

static_assert(units::dim::mass == units::Dimension{1, 2, -2, 0});
static_assert(units::dim::action * units::dim::angular_frequency == units::dim::energy);

TEST_CASE("derived constants")
{
    CHECK(units::hbar2_over_2m0_mev_nm2 == doctest::Approx(38.09982).epsilon(1e-6));
    CHECK(units::angular_frequency_per_ps(units::hbar_mev_ps) == doctest::Approx(1.0));
    // e^2 / (4 pi eps0) = 1.439964 eV nm
    CHECK(1.0 / (4.0 * units::pi * units::vacuum_permittivity) == doctest::Approx(1439.9645).epsilon(1e-6));
}

TEST_CASE("WS2 defaults")
{
    const auto m = materials::ws2_defaults();
    CHECK(m.interaction_product_mev_nm2() == doctest::Approx(2040.0).epsilon(1e-14));
    CHECK_NOTHROW(m.validate(2040.0));
    CHECK_THROWS_AS(m.validate(2200.0), Error);
    CHECK(m.dispersion_mev_nm2() == doctest::Approx(63.49970).epsilon(1e-6));

    const auto lw = materials::linewidths_at(m.linewidth, 300.0);
    CHECK(lw.gamma_x_mev == doctest::Approx(2.0));
    CHECK(lw.gamma_xp_mev == doctest::Approx(2040.0 / (2.0 * units::pi * 81.0)));
    const auto cold = materials::linewidths_at(m.linewidth, 4.0);
    CHECK(cold.gamma_x_mev == doctest::Approx(0.52));
    CHECK(cold.gamma_xp_mev < 1e-30);
}

TEST_CASE("linewidth model")
{
    materials::LinewidthModel lw;
    lw.gx0_mev = 1.0;
    CHECK(lw.kind() == materials::LinewidthModel::Kind::constant);
    lw.gxp_activated_mev = 2.0;
    CHECK(lw.kind() == materials::LinewidthModel::Kind::linear_activated);
    CHECK(materials::bose_occupation(30.0, 0.0) == 0.0);
    const double n = materials::bose_occupation(30.0, 300.0);
    CHECK(n == doctest::Approx(1.0 / std::expm1(30.0 / (units::boltzmann_mev_per_K * 300.0))));
    // gamma_x' is monotone in T
    double prev = -1.0;
    for (double T : {0.0, 4.0, 77.0, 150.0, 300.0}) {
        const double g = materials::linewidths_at(lw, T).gamma_xp_mev;
        CHECK(g >= prev);
        prev = g;
    }
    lw.gx_slope_mev_per_K = -1.0;
    CHECK_THROWS_AS(lw.validate(), Error);
    CHECK_THROWS_AS(materials::linewidths_at(materials::LinewidthModel{}, -1.0), Error);
}

TEST_CASE("material file")
{
    const auto m = materials::load_material_file(std::string(POLBLOCK_TEST_DATA) + "/ws2.mat");
    const auto d = materials::ws2_defaults();
    CHECK(m.binding_energy_mev == doctest::Approx(d.binding_energy_mev).epsilon(1e-14));
    CHECK(m.linewidth.gxp_activated_mev == doctest::Approx(d.linewidth.gxp_activated_mev).epsilon(1e-14));

    std::istringstream bad("mass_ratio = 0.6\nbohr_radius = 1.75\n");
    try {
        materials::parse_material(bad, "bad.mat");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::validation);
        CHECK(std::string(e.what()).find("bohr_radius_nm") != std::string::npos);
    }

    CHECK_THROWS_AS(materials::load_material_file("/nonexistent/x.mat"), Error);

    std::istringstream garbage("mass_ratio = 0.6x\n");
    CHECK_THROWS_AS(materials::parse_material(garbage, "g.mat"), Error);
}

TEST_CASE("overrides keep the interaction product")
{
    materials::MaterialOverrides o;
    o.bohr_radius_nm = 2.0;
    const auto m = materials::apply_overrides(materials::ws2_defaults(), o);
    CHECK(m.interaction_product_mev_nm2() == doctest::Approx(2040.0));
    CHECK(m.bohr_radius_nm == 2.0);
}
