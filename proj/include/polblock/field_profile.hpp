#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "polblock/materials.hpp"

namespace polblock::field {

using complex = std::complex<double>;

// Separable resonator field with Gaussian in-plane distribution
// F(r) = exp(-r^2 / (2 L^2)) / sqrt(pi L^2), normalized to unit area integral
// of |F|^2 so that L_z alone carries the field strength.
struct GaussianProfile {
    double L_nm{10.0};
    double Lz_nm{150.0};
    double rho{1.0};    // |n . p_cv| / |p_cv|
    double eta_n{1.0};  // polarization factor of the Kerr term, in [1/2, 1]

    void validate() const;
};

// |n . p| / |p| for a complex polarization vector and a Bloch matrix element
// direction.
double projection_ratio(const std::array<complex, 3>& polarization, const std::array<complex, 3>& pcv_direction);

// Uniform grid samples of the projected in-plane field F_c(r, z0) . p_cv / |p_cv|.
// The overall scale is fixed at construction so that the area integral of
// |u|^2 equals rho^2 / L_z.
class TabulatedProfile {
public:
    TabulatedProfile(std::size_t nx, std::size_t ny, double x0_nm, double y0_nm, double h_nm,
                     std::vector<complex> samples, double Lz_nm, double rho = 1.0, double eta_n = 1.0);

    // CSV with header "x_nm,y_nm,re,im", x varying fastest.
    static TabulatedProfile from_csv(std::istream& in, double Lz_nm, double rho = 1.0, double eta_n = 1.0);
    static TabulatedProfile from_csv_file(const std::string& path, double Lz_nm, double rho = 1.0,
                                          double eta_n = 1.0);

    // Gaussian sampled on a centred square grid of half-width half_width_nm.
    static TabulatedProfile sample(const GaussianProfile& profile, double h_nm, double half_width_nm);

    std::size_t nx() const noexcept { return nx_; }
    std::size_t ny() const noexcept { return ny_; }
    double h_nm() const noexcept { return h_; }
    double x_nm(std::size_t i) const noexcept { return x0_ + h_ * static_cast<double>(i); }
    double y_nm(std::size_t j) const noexcept { return y0_ + h_ * static_cast<double>(j); }
    complex at(std::size_t i, std::size_t j) const noexcept { return samples_[j * nx_ + i]; }
    double Lz_nm() const noexcept { return Lz_; }
    double rho() const noexcept { return rho_; }
    double eta_n() const noexcept { return eta_n_; }

    // Trapezoid weight of node (i, j), in nm^2.
    double weight(std::size_t i, std::size_t j) const noexcept;

    double area_nm2() const noexcept;
    double intensity_integral() const;  // int |u|^2 d^2r, nm^-1
    double quartic_integral() const;    // int |u|^4 d^2r, nm^-4
    double rms_extent_nm() const;
    // |g_k|^2-weighted mean of k^2, i.e. int |grad u|^2 / int |u|^2 (Parseval).
    double mean_k2_per_nm2() const;

    // Sampling control: h <= min(a_B, L_rms) / 8.
    void validate_sampling(const materials::MaterialParams& material) const;

    TabulatedProfile with_phase(double theta) const;

private:
    void validate_truncation() const;

    std::size_t nx_, ny_;
    double x0_, y0_, h_;
    std::vector<complex> samples_;
    double Lz_, rho_, eta_n_;
};

struct CouplingSummary {
    double G0_mev;
    double Omega0_mev;
    double Lz_nm;
    double W0p_mev;
    double xi_mev;
    double G0_max_mev;
};

// (hbar G0)^2 = prefactor * int |u|^2 d^2r with u the projected field
// normalized as above. Units meV^2 nm.
double coupling_prefactor_mev2_nm(const materials::MaterialParams& material, double wc_mev);

// hbar g_k in meV, with the quantization area fixed to the grid area.
complex coupling_gk(const TabulatedProfile& profile, double kx_per_nm, double ky_per_nm,
                    const materials::MaterialParams& material, double wc_mev);

// hbar xi = hbar^2 / (2 M L^2)
double cutoff_mev(const GaussianProfile& profile, const materials::MaterialParams& material);

CouplingSummary collective_coupling(const GaussianProfile& profile, const materials::MaterialParams& material,
                                    double wc_mev);
CouplingSummary collective_coupling(const TabulatedProfile& profile, const materials::MaterialParams& material,
                                    double wc_mev);

double kerr_shift_mev(const GaussianProfile& profile, const materials::MaterialParams& material);
double kerr_shift_mev(const TabulatedProfile& profile, const materials::MaterialParams& material);

// Set when the Gaussian closed form is used outside L >> a_B (L < 5 a_B).
std::optional<std::string> kerr_shift_warning(const GaussianProfile& profile,
                                              const materials::MaterialParams& material);

double upper_bound_g0_mev(const materials::MaterialParams& material, double wc_mev, double Lz_nm);

// |p_cv| that makes hbar G0 equal target_G0_mev for a Gaussian profile.
double calibrate_pcv(const materials::MaterialParams& material, double target_G0_mev, double Lz_nm, double rho,
                     double wc_mev);

// Exciton spectral density J(E) = sum_k |hbar g_k|^2 delta(E - E_k) in meV,
// sampled at E = hbar omega_0 + i * dE_mev for i < count. The angular
// integral over each constant-energy ring uses n_theta points.
std::vector<double> profile_spectral_density(const TabulatedProfile& profile,
                                             const materials::MaterialParams& material, double wc_mev,
                                             double dE_mev, std::size_t count, std::size_t n_theta = 32);

} // namespace polblock::field
