#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "polblock/spectral.hpp"

// Linear dynamics of a single resonator excitation coupled to the exciton
// continuum: the exact memory-kernel equation and the two reduced two-mode
// models (with and without the Markovian residual decay).
namespace polblock::nonmarkov {

struct LinearDynamicsProblem {
    spectral::SpectralModel spectral;
    double wc_mev;
    double gamma_c_mev;        // amplitude decay rate of the resonator
    double t_max_ps{1.0};
    double step_ps{0.0};       // 0 selects the largest admissible step

    // h <= 0.05 / max(G0, xi, gamma_c), rates in 1/ps
    double max_step_ps() const;
    double resolved_step_ps() const;
    std::size_t steps() const;
    void validate() const;
};

// phi_c on the uniform grid t_n = n h for n = 0..steps, phi_c(0) = 1:
// dphi/dt = -int_0^t K(t - t') phi(t') dt' - gamma phi.
// Trapezoidal memory sum with the implicit trapezoidal step; the corrector is
// solved exactly because the equation is linear. kernel[j] = K(j h).
std::vector<std::complex<double>> integrate_volterra(std::span<const std::complex<double>> kernel,
                                                     double gamma_per_ps, double h_ps, std::size_t steps);

struct VolterraSolution {
    std::vector<double> t_ps;
    std::vector<std::complex<double>> amplitude;
    std::vector<double> population;  // |phi_c|^2
    double error_estimate;           // max |phi_h/2 - phi_h/4| / 3
    double observed_order;           // log2 of successive step-halving differences
};

// Solves at h, h/2 and h/4 and returns the h/4 solution sampled on the h
// grid. Throws numerical_instability if the differences do not shrink at
// second order.
VolterraSolution solve_volterra(const LinearDynamicsProblem& problem);

// 2x2 amplitude model for (phi_c, phi_B) in the frame rotating at omega_c:
// dphi_c/dt = -gamma_c phi_c - i G0 phi_B
// dphi_B/dt = -i (Omega0 - omega_c) phi_B - (Gamma_res/2) [flag] phi_B - i G0 phi_c
std::vector<double> solve_reduced(const LinearDynamicsProblem& problem, bool include_residual);

struct LinearDynamicsResult {
    std::vector<double> t_ps;
    std::vector<double> exact;
    std::vector<double> markov;
    std::vector<double> ignored;
    double exact_error_estimate;
    double Gamma_res_mev;
    double distance_exact_markov;
    double distance_exact_ignored;
    double distance_markov_ignored;
};

// ||a - b||_2 / ||a||_2 with trapezoid weights on a uniform grid.
double relative_l2_distance(std::span<const double> a, std::span<const double> b);

LinearDynamicsResult compare_models(const LinearDynamicsProblem& problem);

} // namespace polblock::nonmarkov
