#include "polblock/nonmarkovian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "polblock/errors.hpp"
#include "polblock/units.hpp"

namespace polblock::nonmarkov {

namespace {

const std::string kModule = "nonmarkovian";
using cplx = std::complex<double>;

constexpr double kPassivityTolerance = 1e-9;

std::vector<cplx> sample_kernel(const LinearDynamicsProblem& p, double h, std::size_t count)
{
    std::vector<cplx> k(count);
    for (std::size_t j = 0; j < count; ++j) {
        k[j] = p.spectral.memory_kernel_per_ps2(p.wc_mev, h * static_cast<double>(j));
    }
    return k;
}

} // namespace

double LinearDynamicsProblem::max_step_ps() const
{
    const double g0 = spectral.G0_mev() / units::hbar_mev_ps;
    const double xi = spectral.xi_mev() / units::hbar_mev_ps;
    const double gc = gamma_c_mev / units::hbar_mev_ps;
    const double fastest = std::max({g0, xi, gc});
    return fastest > 0.0 ? 0.05 / fastest : t_max_ps;
}

void LinearDynamicsProblem::validate() const
{
    if (!(t_max_ps > 0.0)) throw Error(ErrorKind::validation, kModule, "t_max must be > 0");
    if (!(gamma_c_mev >= 0.0)) throw Error(ErrorKind::validation, kModule, "gamma_c must be >= 0");
    if (step_ps < 0.0) throw Error(ErrorKind::validation, kModule, "step must be >= 0");
    if (step_ps > 0.0 && step_ps > max_step_ps() * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "step " << step_ps << " ps exceeds 0.05/max(G0, xi, gamma_c) = " << max_step_ps() << " ps";
        throw Error(ErrorKind::validation, kModule, os.str());
    }
}

std::size_t LinearDynamicsProblem::steps() const
{
    if (step_ps > 0.0) return static_cast<std::size_t>(std::llround(t_max_ps / step_ps));
    return static_cast<std::size_t>(std::ceil(t_max_ps / max_step_ps() - 1e-9));
}

double LinearDynamicsProblem::resolved_step_ps() const
{
    return t_max_ps / static_cast<double>(steps());
}

std::vector<cplx> integrate_volterra(std::span<const cplx> kernel, double gamma, double h, std::size_t steps)
{
    if (kernel.size() < steps + 1) throw Error(ErrorKind::domain, kModule, "too few kernel samples");
    std::vector<cplx> phi(steps + 1);
    phi[0] = 1.0;
    cplx f_prev = -gamma * phi[0];  // memory integral vanishes at t = 0
    const cplx denom = 1.0 + 0.5 * h * (gamma + 0.5 * h * kernel[0]);
    for (std::size_t n = 0; n < steps; ++n) {
        // known part of the trapezoidal memory sum at t_{n+1}
        cplx memory = 0.5 * kernel[n + 1] * phi[0];
        for (std::size_t j = 1; j <= n; ++j) memory += kernel[n + 1 - j] * phi[j];
        memory *= h;
        phi[n + 1] = (phi[n] + 0.5 * h * f_prev - 0.5 * h * memory) / denom;
        f_prev = -gamma * phi[n + 1] - memory - 0.5 * h * kernel[0] * phi[n + 1];
    }
    return phi;
}

VolterraSolution solve_volterra(const LinearDynamicsProblem& problem)
{
    problem.validate();
    const std::size_t n = problem.steps();
    const double h = problem.resolved_step_ps();
    const double gamma = problem.gamma_c_mev / units::hbar_mev_ps;

    const auto k4 = sample_kernel(problem, h / 4.0, 4 * n + 1);
    std::vector<cplx> k2(2 * n + 1), k1(n + 1);
    for (std::size_t j = 0; j <= 2 * n; ++j) k2[j] = k4[2 * j];
    for (std::size_t j = 0; j <= n; ++j) k1[j] = k4[4 * j];

    const auto phi1 = integrate_volterra(k1, gamma, h, n);
    const auto phi2 = integrate_volterra(k2, gamma, h / 2.0, 2 * n);
    const auto phi4 = integrate_volterra(k4, gamma, h / 4.0, 4 * n);

    double e1 = 0.0, e2 = 0.0;
    for (std::size_t j = 0; j <= n; ++j) {
        e1 = std::max(e1, std::abs(phi1[j] - phi2[2 * j]));
        e2 = std::max(e2, std::abs(phi2[2 * j] - phi4[4 * j]));
    }
    const double order = (e1 > 0.0 && e2 > 0.0) ? std::log2(e1 / e2) : 2.0;
    if (e1 > 1e-10 && order < 1.5) {
        std::ostringstream os;
        os << "step halving does not converge at second order (observed order " << order << ")";
        throw Error(ErrorKind::numerical_instability, kModule, os.str());
    }

    VolterraSolution sol;
    sol.t_ps.resize(n + 1);
    sol.amplitude.resize(n + 1);
    sol.population.resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        sol.t_ps[j] = h * static_cast<double>(j);
        sol.amplitude[j] = phi4[4 * j];
        sol.population[j] = std::norm(phi4[4 * j]);
        if (sol.population[j] > 1.0 + kPassivityTolerance) {
            throw Error(ErrorKind::numerical_instability, kModule, "resonator population exceeds 1 (gain)");
        }
    }
    sol.error_estimate = e2 / 3.0;
    sol.observed_order = order;
    return sol;
}

std::vector<double> solve_reduced(const LinearDynamicsProblem& problem, bool include_residual)
{
    problem.validate();
    const std::size_t n = problem.steps();
    const double h = problem.resolved_step_ps();
    const double hbar = units::hbar_mev_ps;
    const double g0 = problem.spectral.G0_mev() / hbar;
    const double gc = problem.gamma_c_mev / hbar;
    const double delta_b = (problem.spectral.Omega0_mev() - problem.wc_mev) / hbar;
    const double gres =
        include_residual ? spectral::residual_rate(problem.spectral, problem.wc_mev).Gamma_res_mev / hbar : 0.0;

    Eigen::Matrix2cd M;
    M << cplx(-gc, 0.0), cplx(0.0, -g0), cplx(0.0, -g0), cplx(-0.5 * gres, -delta_b);
    const Eigen::Matrix2cd step = (M * h).exp();

    std::vector<double> pop(n + 1);
    Eigen::Vector2cd state(1.0, 0.0);
    pop[0] = 1.0;
    for (std::size_t j = 1; j <= n; ++j) {
        state = step * state;
        pop[j] = std::norm(state(0));
    }
    return pop;
}

double relative_l2_distance(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size() || a.size() < 2) throw Error(ErrorKind::domain, kModule, "mismatched trajectories");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double w = (i == 0 || i + 1 == a.size()) ? 0.5 : 1.0;
        num += w * (a[i] - b[i]) * (a[i] - b[i]);
        den += w * a[i] * a[i];
    }
    return std::sqrt(num / den);
}

LinearDynamicsResult compare_models(const LinearDynamicsProblem& problem)
{
    auto exact = solve_volterra(problem);
    LinearDynamicsResult r;
    r.t_ps = exact.t_ps;
    r.exact = std::move(exact.population);
    r.markov = solve_reduced(problem, true);
    r.ignored = solve_reduced(problem, false);
    r.exact_error_estimate = exact.error_estimate;
    r.Gamma_res_mev = spectral::residual_rate(problem.spectral, problem.wc_mev).Gamma_res_mev;
    r.distance_exact_markov = relative_l2_distance(r.exact, r.markov);
    r.distance_exact_ignored = relative_l2_distance(r.exact, r.ignored);
    r.distance_markov_ignored = relative_l2_distance(r.markov, r.ignored);
    return r;
}

} // namespace polblock::nonmarkov
