#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "polblock/errors.hpp"
#include "polblock/lindblad.hpp"
#include "polblock/nonmarkovian.hpp"
#include "polblock/spectral.hpp"
#include "polblock/units.hpp"

using namespace polblock;
using namespace polblock::lindblad;

namespace {

ReducedSystem single_kerr(double delta, double W, double gamma, double F)
{
    ReducedSystem s;
    s.Omega0_mev = 2000.0;
    s.wc_mev = 2000.0;
    s.wd_mev = 2000.0 - delta;
    s.W0p_mev = W;
    s.gamma_c_mev = 1.0;
    s.gamma_x_mev = gamma;
    s.F_mev = F;
    s.drive_target = Mode::exciton;
    return s;
}

Matrix random_density(std::size_t d, unsigned seed)
{
    std::mt19937 rng(seed);
    std::normal_distribution<double> n;
    Matrix A(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) A(i, j) = cplx(n(rng), n(rng));
    Matrix rho = A * A.adjoint();
    return rho / rho.trace();
}

} // namespace

TEST_CASE("ladder operators")
{
    const FockSpace f{3, 2};
    const Matrix a = Matrix(annihilation(f, Mode::cavity));
    const Matrix b = Matrix(annihilation(f, Mode::exciton));
    CHECK((a * b - b * a).norm() < 1e-14);
    const Matrix comm = a * a.adjoint() - a.adjoint() * a;
    // identity except on the top cavity level
    for (int nc = 0; nc <= 3; ++nc)
        for (int nx = 0; nx <= 2; ++nx) {
            const int i = nc * 3 + nx;
            CHECK(comm(i, i).real() == doctest::Approx(nc < 3 ? 1.0 : -3.0));
        }
    CHECK_THROWS_AS(FockSpace({1, 5}).validate(), Error);
}

TEST_CASE("Liouvillian preserves trace and Hermiticity")
{
    ReducedSystem s = single_kerr(3.0, 2.0, 1.5, 0.8);
    s.drive_target = Mode::cavity;
    s.G0_mev = 4.0;
    s.gamma_xp_mev = 0.7;
    s.Gamma_res_mev = 0.3;
    const FockSpace f{3, 3};
    const auto L = build_liouvillian(s, f);
    const Matrix rho = random_density(f.dim(), 7);
    const Matrix d = unvectorize(L.apply(vectorize(rho)), f.dim());
    CHECK(std::abs(d.trace()) < 1e-11);
    CHECK((d - d.adjoint()).norm() < 1e-11);
    CHECK((unvectorize(vectorize(rho), f.dim()) - rho).norm() == 0.0);
}

TEST_CASE("vacuum is the steady state without drive")
{
    ReducedSystem s = single_kerr(0.0, 2.0, 1.0, 0.0);
    s.G0_mev = 5.0;
    const auto ss = steady_state(build_liouvillian(s, {3, 3}));
    CHECK(std::abs(ss.rho(0, 0) - 1.0) < 1e-10);
    CHECK(ss.trace_error < 1e-12);
    CHECK_THROWS_AS(analyze(s, {3, 3}), Error);
    try {
        analyze(s, {3, 3});
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::undefined_correlation);
    }
}

TEST_CASE("coherent state of a driven linear resonator")
{
    ReducedSystem s;
    s.Omega0_mev = 2000.0;
    s.wc_mev = 2000.0;
    s.wd_mev = 1997.0;
    s.gamma_c_mev = 2.0;
    s.gamma_x_mev = 1.0;
    s.F_mev = 0.5;
    const auto r = analyze(s, {6, 2}, {});
    CHECK(r.n_cav == doctest::Approx(0.25 / (9.0 + 4.0)).epsilon(1e-8));
    CHECK(r.g2_0 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.n_exc < 1e-14);
}

TEST_CASE("weak-drive Kerr oscillator")
{
    for (double delta : {-3.0, -1.0, 0.0, 2.0}) {
        const double W = 1.5, g = 0.8;
        const auto s = single_kerr(delta, W, g, 2e-3);
        AnalysisOptions o;
        o.mode = Mode::exciton;
        o.adaptive_truncation = false;
        const auto r = analyze(s, {2, 4}, o);
        const double expected = (delta * delta + g * g) / ((delta + W) * (delta + W) + g * g);
        CHECK(r.g2_0 == doctest::Approx(expected).epsilon(1e-4));
    }
}

TEST_CASE("hard blockade")
{
    const auto s = single_kerr(0.0, 1e4, 1.0, 0.3);
    AnalysisOptions o;
    o.mode = Mode::exciton;
    o.adaptive_truncation = false;
    const auto r = analyze(s, {2, 2}, o);
    CHECK(r.g2_0 < 1e-6);
    CHECK(r.n_exc > 0.0);
}

TEST_CASE("linear limit matches the reduced amplitude model")
{
    const double xi = 6.0, G0 = 22.0, gamma_c = 5.0;
    const auto model = spectral::SpectralModel::gaussian(2000.0, xi, G0);
    const double wc = model.Omega0_mev() - 3.0;
    const auto rate = spectral::residual_rate(model, wc);

    ReducedSystem s;
    s.Omega0_mev = model.Omega0_mev();
    s.wc_mev = wc;
    s.wd_mev = wc;
    s.G0_mev = G0;
    s.gamma_c_mev = gamma_c;
    s.Gamma_res_mev = rate.Gamma_res_mev;
    const FockSpace f{2, 2};
    const auto L = build_liouvillian(s, f);

    Matrix rho0 = Matrix::Zero(f.dim(), f.dim());
    rho0(3, 3) = 1.0;  // |1_c, 0_x>
    nonmarkov::LinearDynamicsProblem p{model, wc, gamma_c, 0.5, 0.0};
    const auto ref = nonmarkov::solve_reduced(p, true);
    const double h = p.resolved_step_ps();
    std::vector<double> times;
    for (std::size_t n = 0; n < ref.size(); n += 20) times.push_back(h * static_cast<double>(n));
    const auto states = propagate(L, vectorize(rho0), times, 1e-10);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double nc = occupation(unvectorize(states[k], f.dim()), f, Mode::cavity);
        CHECK(nc == doctest::Approx(ref[k * 20]).epsilon(1e-6));
    }
}

TEST_CASE("steady-state hygiene and truncation convergence")
{
    ReducedSystem s;
    s.Omega0_mev = 2000.0;
    s.wc_mev = 1860.0;
    s.wd_mev = 2020.0;
    s.G0_mev = 57.5;
    s.W0p_mev = 6.6;
    s.gamma_c_mev = 25.0;
    s.gamma_x_mev = 2.0;
    s.gamma_xp_mev = 4.0;
    s.F_mev = 1.5;
    AnalysisOptions o;
    o.adaptive_truncation = false;
    const auto a = analyze(s, {5, 5}, o);
    const auto b = analyze(s, {7, 7}, o);
    CHECK(a.trace_error < 1e-10);
    CHECK(a.min_eigenvalue > -1e-8);
    CHECK(a.residual < 1e-8);
    CHECK(std::abs(a.g2_0 - b.g2_0) < 1e-3);
    CHECK(a.g2_0 < 1.0);

    // the iterative path (composite dimension > 64) agrees with the direct one
    const auto big = analyze(s, {9, 9}, o);
    CHECK(big.g2_0 == doctest::Approx(b.g2_0).epsilon(1e-4));
}

TEST_CASE("g2(tau) starts at g2(0) and decorrelates")
{
    ReducedSystem s = single_kerr(0.0, 2.0, 1.0, 0.2);
    s.drive_target = Mode::cavity;
    s.G0_mev = 3.0;
    s.gamma_c_mev = 2.0;
    AnalysisOptions o;
    o.tau_ps = {0.0, 0.5, 2.0, 20.0};
    const auto r = analyze(s, {4, 4}, o);
    REQUIRE(r.g2_tau.size() == 4);
    CHECK(r.g2_tau[0] == doctest::Approx(r.g2_0).epsilon(1e-8));
    CHECK(r.g2_tau[3] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("adaptive truncation and singular systems")
{
    ReducedSystem s = single_kerr(0.0, 0.0, 0.5, 0.6);
    s.drive_target = Mode::cavity;
    s.G0_mev = 0.5;
    s.gamma_c_mev = 1.0;
    AnalysisOptions o;
    o.max_level = 14;
    const auto r = analyze(s, {2, 2}, o);
    CHECK(r.fock.Nc > 2);
    CHECK(r.top_population_cavity < 1e-6);
    o.max_level = 4;
    CHECK_THROWS_AS(analyze(s, {2, 2}, o), Error);

    ReducedSystem lossless = single_kerr(0.0, 1.0, 0.0, 0.5);
    lossless.gamma_c_mev = 0.0;
    try {
        analyze(lossless, {3, 3});
        FAIL("expected singularity");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::singularity);
    }
}
