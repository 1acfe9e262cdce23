#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "polblock/errors.hpp"
#include "polblock/field_profile.hpp"
#include "polblock/materials.hpp"
#include "polblock/nonmarkovian.hpp"
#include "polblock/spectral.hpp"
#include "polblock/units.hpp"

using namespace polblock;
using cd = std::complex<double>;

namespace {

double max_error_const_kernel(double h, double T, double G, double gamma)
{
    const auto steps = static_cast<std::size_t>(std::llround(T / h));
    std::vector<cd> K(steps + 1, cd(G * G, 0.0));
    const auto phi = nonmarkov::integrate_volterra(K, gamma, h, steps);
    // phi'' + gamma phi' + G^2 phi = 0, phi(0) = 1, phi'(0) = -gamma
    const cd disc = std::sqrt(cd(gamma * gamma - 4.0 * G * G, 0.0));
    const cd r1 = (-gamma + disc) / 2.0, r2 = (-gamma - disc) / 2.0;
    const cd c1 = (-gamma - r2) / (r1 - r2), c2 = 1.0 - c1;
    double err = 0.0;
    for (std::size_t n = 0; n <= steps; ++n) {
        const double t = static_cast<double>(n) * h;
        err = std::max(err, std::abs(phi[n] - (c1 * std::exp(r1 * t) + c2 * std::exp(r2 * t))));
    }
    return err;
}

spectral::SpectralModel ws2_model(double L, double G0)
{
    const auto m = materials::ws2_defaults();
    const double xi = field::cutoff_mev({L, 150.0, 0.5, 1.0}, m);
    return spectral::SpectralModel::gaussian(m.exciton_energy_mev, xi, G0);
}

} // namespace

TEST_CASE("pure decay converges at second order")
{
    const double gamma = 3.0, T = 2.0;
    double prev = 0.0;
    for (double h : {0.02, 0.01, 0.005}) {
        const auto steps = static_cast<std::size_t>(std::llround(T / h));
        std::vector<cd> K(steps + 1, cd(0.0, 0.0));
        const auto phi = nonmarkov::integrate_volterra(K, gamma, h, steps);
        double err = 0.0;
        for (std::size_t n = 0; n <= steps; ++n) err = std::max(err, std::abs(phi[n] - std::exp(-gamma * n * h)));
        if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(2.0).epsilon(0.03));
        prev = err;
    }
}

TEST_CASE("constant kernel gives damped Rabi oscillation")
{
    const double e1 = max_error_const_kernel(0.01, 3.0, 4.0, 0.7);
    const double e2 = max_error_const_kernel(0.005, 3.0, 4.0, 0.7);
    CHECK(e1 < 1e-3);
    CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("step size rules")
{
    nonmarkov::LinearDynamicsProblem p{ws2_model(4.0, 22.0), 0.0, 5.0, 1.0, 0.0};
    p.wc_mev = p.spectral.Omega0_mev();
    const double rate = std::max({22.0, p.spectral.xi_mev(), 5.0}) / units::hbar_mev_ps;
    CHECK(p.max_step_ps() == doctest::Approx(0.05 / rate));
    CHECK(p.resolved_step_ps() <= p.max_step_ps());
    CHECK(static_cast<double>(p.steps()) * p.resolved_step_ps() == doctest::Approx(1.0));
    p.step_ps = 10.0 * p.max_step_ps();
    CHECK_THROWS_AS(p.validate(), Error);
    p.step_ps = 0.0;
    p.t_max_ps = -1.0;
    CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("reduced model: Rabi oscillation and bare decay")
{
    auto model = ws2_model(10.0, 22.0);
    nonmarkov::LinearDynamicsProblem p{model, model.Omega0_mev(), 0.0, 0.5, 0.0};
    const auto pop = nonmarkov::solve_reduced(p, false);
    const double h = p.resolved_step_ps();
    for (std::size_t n = 0; n < pop.size(); n += 17) {
        const double c = std::cos(22.0 / units::hbar_mev_ps * h * static_cast<double>(n));
        CHECK(pop[n] == doctest::Approx(c * c).epsilon(1e-9));
    }
    auto bare = spectral::SpectralModel::gaussian(2000.0, 1.0, 0.0);
    nonmarkov::LinearDynamicsProblem q{bare, 2000.0, 5.0, 0.5, 0.0};
    const auto decay = nonmarkov::solve_reduced(q, true);
    const double hq = q.resolved_step_ps();
    CHECK(decay.back() == doctest::Approx(std::exp(-2.0 * 5.0 / units::hbar_mev_ps * hq * (decay.size() - 1))).epsilon(1e-9));
}

TEST_CASE("relative L2 distance")
{
    std::vector<double> a{1.0, 2.0, 3.0}, b{1.0, 2.0, 3.0};
    CHECK(nonmarkov::relative_l2_distance(a, b) == 0.0);
    std::vector<double> c{2.0, 4.0, 6.0};
    CHECK(nonmarkov::relative_l2_distance(a, c) == doctest::Approx(1.0));
}

TEST_CASE("exact solution, Markov and residual-ignored models")
{
    auto model = ws2_model(10.0, 22.0);
    const auto r = nonmarkov::compare_models({model, model.Omega0_mev(), 5.0, 1.0, 0.0});
    CHECK(r.exact.front() == doctest::Approx(1.0));
    CHECK(r.exact_error_estimate < 1e-4);
    CHECK(r.distance_exact_markov < 0.05);
    // population never exceeds the initial value
    for (double v : r.exact) CHECK(v <= 1.0 + 1e-9);

    auto tight = ws2_model(1.0, 22.0);
    const auto s = nonmarkov::compare_models({tight, tight.Omega0_mev(), 5.0, 1.0, 0.0});
    CHECK(s.distance_exact_ignored > 2.0 * s.distance_exact_markov);

    const auto v = nonmarkov::solve_volterra({model, model.Omega0_mev(), 5.0, 1.0, 0.0});
    CHECK(v.observed_order == doctest::Approx(2.0).epsilon(0.1));
}
