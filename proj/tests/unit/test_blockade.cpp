#include <doctest.h>

#include <cmath>
#include <vector>

#include "polblock/blockade.hpp"
#include "polblock/errors.hpp"
#include "polblock/materials.hpp"

using namespace polblock;
using namespace polblock::blockade;

namespace {

SystemTemplate linear_template()
{
    SystemTemplate t;
    t.omega0_mev = 2000.0;
    t.Omega0_mev = 2001.0;
    t.G0_mev = 20.0;
    t.gamma_c_mev = 5.0;
    t.gamma_x_mev = 1.0;
    t.F_mev = 0.2;
    t.fock = {3, 3};
    return t;
}

OptimizationSpec small_spec()
{
    OptimizationSpec s;
    s.box_lo_mev = -100.0;
    s.box_hi_mev = 100.0;
    s.grid = 9;
    s.starts = 2;
    s.max_iterations = 60;
    return s;
}

ConfinementSetup fig4_setup(double T)
{
    ConfinementSetup c;
    c.material = materials::ws2_defaults();
    c.profile = {9.0, 50.0, 0.75, 1.0};
    c.temperature_K = T;
    c.gamma_c_mev = 25.0;
    c.F_mev = 1.5;
    c.G0_mev = 57.5;
    c.fock = {3, 3};
    return c;
}

} // namespace

TEST_CASE("spec validation")
{
    OptimizationSpec s;
    CHECK(s.spacing_mev() == doctest::Approx(20.0));
    s.grid = 1;
    CHECK_THROWS_AS(s.validate(), Error);
    s = {};
    s.box_lo_mev = 10.0;
    s.box_hi_mev = -10.0;
    CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("linear system is coherent everywhere in the box")
{
    const auto o = optimize_g2(linear_template(), small_spec());
    CHECK(o.g2_min == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(o.g2_min <= o.coarse_min);
    CHECK(o.wc_mev >= 1900.0);
    CHECK(o.wc_mev <= 2100.0);
}

TEST_CASE("optimizer is deterministic across thread counts")
{
    SystemTemplate t = linear_template();
    t.W0p_mev = 6.6;
    t.gamma_xp_mev = 1.0;
    t.F_mev = 1.0;
    auto s1 = small_spec();
    auto s2 = s1;
    s2.threads = 3;
    const auto a = optimize_g2(t, s1);
    const auto b = optimize_g2(t, s2);
    CHECK(a.g2_min == b.g2_min);
    CHECK(a.wc_mev == b.wc_mev);
    CHECK(a.wd_mev == b.wd_mev);
    CHECK(a.g2_min < 1.0);
    CHECK(a.evaluations > 81u);
}

TEST_CASE("template evaluation")
{
    SystemTemplate t = linear_template();
    const auto r = t.at(-10.0, 5.0, 0.25);
    CHECK(r.wc_mev == doctest::Approx(1990.0));
    CHECK(r.wd_mev == doctest::Approx(2005.0));
    CHECK(r.Gamma_res_mev == 0.25);
    CHECK(t.Gamma_res_mev(2000.0) == 0.0);
    const auto moved = t.shifted(-2000.0);
    CHECK(moved.omega0_mev == doctest::Approx(0.0));
    CHECK(moved.Omega0_mev == doctest::Approx(1.0));
}

TEST_CASE("confinement setup")
{
    const auto c = fig4_setup(300.0);
    const auto lw = c.linewidths();
    CHECK(lw.gamma_x_mev == doctest::Approx(2.0));
    CHECK(lw.gamma_xp_mev == doctest::Approx(4.0083467).epsilon(1e-6));
    CHECK(c.G0_reference_mev() == 57.5);
    auto d = c;
    d.G0_mev.reset();
    CHECK(d.G0_reference_mev() == doctest::Approx(57.157).epsilon(1e-3));
    const auto t = c.system_at(10.0);
    CHECK(t.W0p_mev == doctest::Approx(3.2467608).epsilon(1e-7));
    CHECK(t.Omega0_mev == doctest::Approx(2000.0 + 0.634997).epsilon(1e-5));
    REQUIRE(t.residual.has_value());
    CHECK(t.Gamma_res_mev(t.Omega0_mev) < 1e-10);
    d.temperature_K = -1.0;
    CHECK_THROWS_AS(d.validate(), Error);
}

TEST_CASE("regime map ordering")
{
    auto c = fig4_setup(300.0);
    c.G0_mev = 22.0;
    const std::vector<double> Ls{2.0, 3.0, 5.0, 8.0, 20.0};
    const auto rows = regime_map(c, Ls, 1.0);
    REQUIRE(rows.size() == Ls.size());
    CHECK(rows[0].regime == Regime::residual_dominated);
    CHECK(rows[1].regime == Regime::residual_dominated);
    CHECK(rows[2].regime == Regime::blockade_window);
    CHECK(rows[3].regime == Regime::blockade_window);
    CHECK(rows[4].regime == Regime::linear);
    CHECK(to_string(Regime::blockade_window) == "blockade-window");
}

TEST_CASE("sweep records and crossover bookkeeping")
{
    const auto c = fig4_setup(300.0);
    const std::vector<double> Ls{6.0, 25.0};
    auto spec = small_spec();
    spec.box_lo_mev = -200.0;
    spec.box_hi_mev = 200.0;
    const auto r = sweep_L(c, Ls, spec, 0.01);
    REQUIRE(r.records.size() == 2);
    CHECK(r.records[0].optimum.g2_min < 0.9);
    CHECK(r.records[1].optimum.g2_min > 0.99);
    REQUIRE(r.crossover_L_nm.has_value());
    CHECK(*r.crossover_L_nm == 6.0);
    REQUIRE(r.dephasing_L_nm.has_value());
    CHECK(*r.dephasing_L_nm == doctest::Approx(9.0).epsilon(1e-9));
    const std::vector<double> unsorted{9.0, 7.0};
    CHECK_THROWS_AS(sweep_L(c, unsorted, spec, 0.01), Error);
}

TEST_CASE("weak-drive seeds sit on interference zeros")
{
    SystemTemplate t;
    t.omega0_mev = 2000.0;
    t.Omega0_mev = 2000.04;
    t.G0_mev = 57.5;
    t.W0p_mev = 0.2;
    t.gamma_c_mev = 25.0;
    t.gamma_x_mev = 0.52;
    t.F_mev = 0.05;
    t.fock = {3, 3};
    const auto seeds = weak_drive_seeds(t, OptimizationSpec{});
    REQUIRE_FALSE(seeds.empty());
    double best = 1e300;
    for (const auto& x : seeds) {
        const auto r = lindblad::analyze(t.at(x[0], x[1], 0.0), t.fock);
        best = std::min(best, r.g2_0);
    }
    CHECK(best < 1e-4);

    t.W0p_mev = 0.0;
    CHECK(weak_drive_seeds(t, OptimizationSpec{}).empty());
}

TEST_CASE("only detunings matter")
{
    SystemTemplate t = linear_template();
    t.W0p_mev = 6.6;
    t.gamma_xp_mev = 1.0;
    t.F_mev = 1.0;
    const auto a = optimize_g2(t, small_spec());
    const auto b = optimize_g2(t.shifted(-1500.0), small_spec());
    CHECK(std::abs(a.g2_min - b.g2_min) < 1e-10);
    CHECK(b.wc_mev - b.wd_mev == doctest::Approx(a.wc_mev - a.wd_mev).epsilon(1e-9));
}
