#pragma once

#include <complex>
#include <optional>
#include <string_view>
#include <vector>

#include "polblock/monotone_cubic.hpp"

// Exciton spectral density J, its principal-value transform Phi, the
// residual spectral density J_res left after the reaction-coordinate
// mapping, the memory kernel K and the Markovian residual rate.
//
// All spectral quantities are expressed on the energy axis: J(E) is
// sum_k |hbar g_k|^2 delta(E - E_k) in meV, so that int J dE = (hbar G0)^2 and
// hbar Gamma_res = 2 pi J_res(hbar omega_+).
namespace polblock::spectral {

enum class Backend { analytic_gaussian, numeric };

constexpr std::string_view to_string(Backend b) noexcept
{
    return b == Backend::analytic_gaussian ? "analytic-gaussian" : "numeric";
}

class SpectralModel {
public:
    // J(E) = Theta(x) J0 e^{-x}, x = (E - E0)/xi, J0 = G0^2 / xi
    static SpectralModel gaussian(double omega0_mev, double xi_mev, double G0_mev);

    // Samples J(E0 + i dE) in meV. J vanishes below E0; G0 and Omega0 are the
    // zeroth and first moments of the interpolant.
    static SpectralModel tabulated(double omega0_mev, double dE_mev, std::vector<double> J_mev);

    Backend backend() const noexcept { return backend_; }
    double omega0_mev() const noexcept { return omega0_; }
    double xi_mev() const noexcept { return xi_; }
    double G0_mev() const noexcept { return G0_; }
    double J0_mev() const noexcept { return G0_ * G0_ / xi_; }
    // J-weighted mean energy, hbar Omega0
    double Omega0_mev() const noexcept { return Omega0_; }
    // largest energy covered by a tabulated model (infinity for the analytic one)
    double upper_limit_mev() const noexcept;

    double j_exciton_mev(double E_mev) const;
    double phi_mev(double E_mev) const;
    double j_residual_mev(double E_mev) const;

    // K(tau) = int J(omega) e^{-i(omega - omega_c) tau} d omega, in ps^-2
    std::complex<double> memory_kernel_per_ps2(double wc_mev, double tau_ps) const;

    // Same model with every energy shifted by delta (frame invariance checks).
    SpectralModel shifted(double delta_mev) const;

private:
    SpectralModel() = default;

    double phi_numeric(double E) const;
    std::complex<double> kernel_numeric(double wc_mev, double tau_ps) const;

    Backend backend_{Backend::analytic_gaussian};
    double omega0_{0.0};
    double xi_{1.0};
    double G0_{0.0};
    double Omega0_{0.0};
    std::optional<MonotoneCubic> table_;
};

// hbar omega_+ = [wc + Omega0 + sqrt(4 G0^2 + (wc - Omega0)^2)] / 2
double upper_polariton_mev(double wc_mev, double Omega0_mev, double G0_mev);

struct ResidualRate {
    double Gamma_res_mev;
    double omega_plus_mev;
    Backend backend;
};

// Gamma_res = 2 pi J_res(omega_+)
ResidualRate residual_rate(const SpectralModel& model, double wc_mev);

} // namespace polblock::spectral
