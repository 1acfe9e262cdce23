#include <doctest.h>

#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>

#include "polblock/errors.hpp"
#include "polblock/monotone_cubic.hpp"
#include "polblock/special_functions.hpp"
#include "polblock/spectral.hpp"
#include "polblock/units.hpp"

using namespace polblock;

TEST_CASE("Ei against the standard library")
{
    for (double x : {-50.0, -7.5, -1.0, -1e-3, 1e-8, 1e-3, 0.3725, 1.0, 5.0, 12.0, 39.9, 40.1, 80.0, 300.0}) {
        CHECK(special::expint_ei(x) == doctest::Approx(std::expint(x)).epsilon(1e-13));
        if (x > 0.0) {
            CHECK(special::expint_e1(x) == doctest::Approx(-std::expint(-x)).epsilon(1e-13));
            CHECK(special::scaled_expint_ei(x) == doctest::Approx(std::exp(-x) * std::expint(x)).epsilon(1e-12));
        }
    }
    // the real zero of Ei
    CHECK(std::abs(special::expint_ei(0.37250741078136663)) < 1e-14);
    CHECK(special::scaled_expint_ei(800.0) == doctest::Approx(1.0 / 800.0 * (1 + 1.0 / 800 + 2.0 / 640000)).epsilon(1e-8));
}

TEST_CASE("monotone cubic")
{
    std::vector<double> lin;
    for (int i = 0; i <= 10; ++i) lin.push_back(2.0 + 3.0 * i * 0.5);
    spectral::MonotoneCubic p(1.0, 0.5, lin);
    CHECK(p(1.0) == doctest::Approx(2.0));
    CHECK(p(3.3) == doctest::Approx(2.0 + 3.0 * 2.3));
    CHECK(p.integral() == doctest::Approx(2.0 * 5.0 + 1.5 * 25.0));

    spectral::MonotoneCubic step(0.0, 1.0, {0, 0, 0, 1, 1, 1});
    double prev = -1.0;
    for (double x = 0.0; x <= 5.0; x += 0.01) {
        const double v = step(x);
        CHECK(v >= prev - 1e-15);
        CHECK(v >= -1e-15);
        CHECK(v <= 1.0 + 1e-15);
        prev = v;
    }
}

TEST_CASE("Gaussian spectral density moments")
{
    const double xi = 2.0, G0 = 22.0, E0 = 2000.0;
    const auto m = spectral::SpectralModel::gaussian(E0, xi, G0);
    CHECK(m.Omega0_mev() == doctest::Approx(E0 + xi));
    CHECK(m.j_exciton_mev(E0 - 1.0) == 0.0);
    using boost::math::quadrature::gauss_kronrod;
    const double norm = gauss_kronrod<double, 61>::integrate([&](double E) { return m.j_exciton_mev(E); }, E0,
                                                               E0 + 80 * xi, 15, 1e-13);
    CHECK(norm == doctest::Approx(G0 * G0).epsilon(1e-10));
}

TEST_CASE("Phi against direct principal-value quadrature")
{
    const double xi = 1.5, G0 = 10.0, E0 = 0.0;
    const auto m = spectral::SpectralModel::gaussian(E0, xi, G0);
    using boost::math::quadrature::gauss_kronrod;
    for (double x : {-3.0, 0.05, 0.5, 1.0, 4.0, 15.0}) {
        const double E = x * xi;
        const double JE = m.j_exciton_mev(E);
        // singularity subtraction on [0, 2E], plain integral beyond
        double pv;
        if (x > 0.0) {
            auto f = [&](double z) {
                return z == E ? 0.0 : (m.j_exciton_mev(z) - JE) / (E - z);
            };
            pv = gauss_kronrod<double, 61>::integrate(f, 0.0, 2.0 * E, 20, 1e-13);
            pv += JE * std::log(E / E);  // symmetric interval: log term vanishes
            boost::math::quadrature::exp_sinh<double> tail;
            pv += tail.integrate([&](double z) { return m.j_exciton_mev(2.0 * E + z) / (E - 2.0 * E - z); });
        } else {
            boost::math::quadrature::exp_sinh<double> tail;
            pv = tail.integrate([&](double z) { return m.j_exciton_mev(z) / (E - z); });
        }
        CHECK(m.phi_mev(E) == doctest::Approx(pv).epsilon(1e-8));
    }
    CHECK(std::isinf(m.phi_mev(E0)));
}

TEST_CASE("residual density and Kramers-Kronig consistency")
{
    const double xi = 1.0, G0 = 5.0;
    const auto m = spectral::SpectralModel::gaussian(0.0, xi, G0);
    for (double x : {0.05, 0.5, 2.0, 10.0}) {
        const double J = m.j_exciton_mev(x), phi = m.phi_mev(x);
        CHECK(m.j_residual_mev(x) == doctest::Approx(G0 * G0 * J / (phi * phi + units::pi * units::pi * J * J)).epsilon(1e-12));
        // closed form xi e^x / (Ei(x)^2 + pi^2)
        const double ei = std::expint(x);
        CHECK(m.j_residual_mev(x) == doctest::Approx(xi * std::exp(x) / (ei * ei + units::pi * units::pi)).epsilon(1e-12));
    }
    CHECK(m.j_residual_mev(-0.1) == 0.0);
    // large x: no overflow, J_res decays like xi e^{-x} x^2 / (1 + ...)
    CHECK(std::isfinite(m.j_residual_mev(700.0)));
}

TEST_CASE("numeric backend agrees with the analytic Gaussian")
{
    const double xi = 2.0, G0 = 22.0, E0 = 2000.0;
    const auto a = spectral::SpectralModel::gaussian(E0, xi, G0);
    const double dE = xi / 100.0;
    std::vector<double> J;
    for (int i = 0; i <= 6000; ++i) J.push_back(a.j_exciton_mev(E0 + i * dE));
    const auto n = spectral::SpectralModel::tabulated(E0, dE, J);
    CHECK(n.G0_mev() == doctest::Approx(G0).epsilon(1e-6));
    CHECK(n.Omega0_mev() == doctest::Approx(a.Omega0_mev()).epsilon(1e-9));
    for (double x : {0.05, 0.3, 1.0, 3.0, 8.0, 15.0}) {
        const double E = E0 + x * xi;
        CHECK(n.phi_mev(E) == doctest::Approx(a.phi_mev(E)).epsilon(1e-5));
        CHECK(n.j_residual_mev(E) == doctest::Approx(a.j_residual_mev(E)).epsilon(1e-5));
    }
    CHECK_THROWS_AS(n.j_exciton_mev(E0 + 70.0 * xi), Error);
    CHECK_THROWS_AS(spectral::SpectralModel::tabulated(E0, dE, {1.0, -1.0, 0.0}), Error);
}

TEST_CASE("memory kernel sum rule and modulus")
{
    const double xi = 3.0, G0 = 22.0;
    const auto m = spectral::SpectralModel::gaussian(2000.0, xi, G0);
    const double g = G0 / units::hbar_mev_ps;
    const double w = xi / units::hbar_mev_ps;
    CHECK(std::abs(m.memory_kernel_per_ps2(2000.0, 0.0)) == doctest::Approx(g * g).epsilon(1e-12));
    for (double t : {0.01, 0.1, 1.0, 5.0}) {
        const auto K = m.memory_kernel_per_ps2(2003.0, t);
        CHECK(std::abs(K) == doctest::Approx(g * g / std::sqrt(1.0 + w * w * t * t)).epsilon(1e-12));
    }
}

TEST_CASE("upper polariton and residual rate")
{
    CHECK(spectral::upper_polariton_mev(2000.0, 2000.0, 10.0) == doctest::Approx(2010.0));
    CHECK(spectral::upper_polariton_mev(1900.0, 2000.0, 0.0) == doctest::Approx(2000.0));
    const auto m = spectral::SpectralModel::gaussian(2000.0, 4.0, 22.0);
    const auto r = spectral::residual_rate(m, m.Omega0_mev());
    CHECK(r.omega_plus_mev == doctest::Approx(m.Omega0_mev() + 22.0));
    CHECK(r.Gamma_res_mev == doctest::Approx(2.0 * units::pi * m.j_residual_mev(r.omega_plus_mev)));
    // Gamma_res falls off rapidly as xi shrinks relative to G0
    const auto small = spectral::SpectralModel::gaussian(2000.0, 1.0, 22.0);
    CHECK(spectral::residual_rate(small, small.Omega0_mev()).Gamma_res_mev < 1e-3 * r.Gamma_res_mev);
}
