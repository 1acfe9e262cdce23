#include "polblock/spectral.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "polblock/errors.hpp"
#include "polblock/special_functions.hpp"
#include "polblock/units.hpp"

namespace polblock::spectral {

namespace {

const std::string kModule = "spectral";
constexpr double kInf = std::numeric_limits<double>::infinity();

// 8-point Gauss-Legendre nodes/weights on [-1, 1]
constexpr std::array<double, 8> kGlNodes = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                            -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                            0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeights = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                              0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                              0.2223810344533745, 0.1012285362903763};

using cplx = std::complex<double>;

// mu_j = int_0^h s^j e^{-i kappa s} ds, j = 0..3
std::array<cplx, 4> filon_moments(double kappa, double h)
{
    std::array<cplx, 4> mu{};
    const double theta = kappa * h;
    if (std::abs(theta) < 1.0) {
        // power series in (-i kappa s)
        for (int j = 0; j < 4; ++j) {
            cplx term = 1.0;  // (-i kappa)^n / n!
            cplx sum = 0.0;
            double hp = std::pow(h, j + 1);
            for (int n = 0; n < 60; ++n) {
                const cplx contrib = term * hp / static_cast<double>(n + j + 1);
                sum += contrib;
                if (std::abs(contrib) < 1e-18 * std::abs(sum)) break;
                term *= cplx(0.0, -kappa) / static_cast<double>(n + 1);
                hp *= h;
            }
            mu[j] = sum;
        }
        return mu;
    }
    const cplx ik(0.0, kappa);
    const cplx eh = std::exp(-ik * h);
    mu[0] = (1.0 - eh) / ik;
    double hj = 1.0;
    for (int j = 1; j < 4; ++j) {
        hj *= h;
        mu[j] = (-hj * eh + static_cast<double>(j) * mu[j - 1]) / ik;
    }
    return mu;
}

} // namespace

SpectralModel SpectralModel::gaussian(double omega0_mev, double xi_mev, double G0_mev)
{
    if (!(xi_mev > 0.0)) throw Error(ErrorKind::domain, kModule, "xi must be > 0");
    if (!(G0_mev >= 0.0)) throw Error(ErrorKind::domain, kModule, "G0 must be >= 0");
    SpectralModel m;
    m.backend_ = Backend::analytic_gaussian;
    m.omega0_ = omega0_mev;
    m.xi_ = xi_mev;
    m.G0_ = G0_mev;
    m.Omega0_ = omega0_mev + xi_mev;
    return m;
}

SpectralModel SpectralModel::tabulated(double omega0_mev, double dE_mev, std::vector<double> J_mev)
{
    for (double v : J_mev) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw Error(ErrorKind::domain, kModule, "tabulated J must be finite and non-negative");
        }
    }
    SpectralModel m;
    m.backend_ = Backend::numeric;
    m.omega0_ = omega0_mev;
    m.table_.emplace(0.0, dE_mev, std::move(J_mev));
    const double norm = m.table_->integral();
    if (!(norm > 0.0)) throw Error(ErrorKind::domain, kModule, "tabulated J has zero weight");
    m.G0_ = std::sqrt(norm);
    m.xi_ = m.table_->first_moment() / norm;
    m.Omega0_ = omega0_mev + m.xi_;
    return m;
}

double SpectralModel::upper_limit_mev() const noexcept
{
    return table_ ? omega0_ + table_->x_end() : kInf;
}

SpectralModel SpectralModel::shifted(double delta_mev) const
{
    SpectralModel m = *this;
    m.omega0_ += delta_mev;
    m.Omega0_ += delta_mev;
    return m;
}

double SpectralModel::j_exciton_mev(double E) const
{
    const double u = E - omega0_;
    if (u < 0.0) return 0.0;
    if (!table_) return J0_mev() * std::exp(-u / xi_);
    if (u > table_->x_end() * (1.0 + 1e-14)) {
        std::ostringstream os;
        os << "energy " << E << " meV lies above the tabulated spectral density (ends at " << upper_limit_mev()
           << " meV)";
        throw Error(ErrorKind::extrapolation, kModule, os.str());
    }
    return (*table_)(std::min(u, table_->x_end()));
}

double SpectralModel::phi_mev(double E) const
{
    if (table_) return phi_numeric(E);
    const double x = (E - omega0_) / xi_;
    if (x == 0.0) return -kInf;
    return J0_mev() * special::scaled_expint_ei(x);
}

// PV int J(z) / (E - z) dz over the tabulated range by singularity
// subtraction: int (p(z) - J(E)) / (E - z) dz + J(E) ln|(E - a)/(b - E)|.
// Panels within a few widths of E are integrated in closed form, the rest by
// Gauss-Legendre.
double SpectralModel::phi_numeric(double E) const
{
    const MonotoneCubic& t = *table_;
    const double u = E - omega0_;
    const double h = t.h();
    const double b = t.x_end();
    const bool inside = u >= 0.0 && u <= b;
    if (u == 0.0 || u == b) return -kInf;
    const double Ju = inside ? t(u) : 0.0;

    double sum = inside ? Ju * std::log(u / (b - u)) : 0.0;
    for (std::size_t i = 0; i < t.panels(); ++i) {
        const double left = h * static_cast<double>(i);
        const double d = u - left;  // singular point in panel-local coordinates
        auto c = t.panel(i);
        c[0] -= Ju;
        if (d > -3.0 * h && d < 4.0 * h) {
            // q(s) = R + (s - d) r(s), r(s) = b2 s^2 + b1 s + b0
            const double b2 = c[3];
            const double b1 = c[2] + d * b2;
            const double b0 = c[1] + d * b1;
            const double R = c[0] + d * b0;
            double part = -(b2 * h * h * h / 3.0 + b1 * h * h / 2.0 + b0 * h);
            if (d < 0.0 || d > h) part += R * std::log(d / (d - h));
            sum += part;
        } else {
            double panel_sum = 0.0;
            for (std::size_t g = 0; g < kGlNodes.size(); ++g) {
                const double s = 0.5 * h * (kGlNodes[g] + 1.0);
                const double q = c[0] + s * (c[1] + s * (c[2] + s * c[3]));
                panel_sum += kGlWeights[g] * q / (d - s);
            }
            sum += 0.5 * h * panel_sum;
        }
    }
    return sum;
}

double SpectralModel::j_residual_mev(double E) const
{
    const double x = (E - omega0_) / xi_;
    if (x <= 0.0) return 0.0;
    if (!table_) {
        // xi e^x / (Ei^2 + pi^2), written with s = e^{-x} Ei(x) to avoid overflow
        const double s = special::scaled_expint_ei(x);
        const double ex = std::exp(-x);
        return xi_ * ex / (s * s + units::pi * units::pi * ex * ex);
    }
    const double J = j_exciton_mev(E);
    if (J == 0.0) return 0.0;
    const double phi = phi_numeric(E);
    if (!std::isfinite(phi)) return 0.0;
    return G0_ * G0_ * J / (phi * phi + units::pi * units::pi * J * J);
}

std::complex<double> SpectralModel::memory_kernel_per_ps2(double wc_mev, double tau_ps) const
{
    if (!(tau_ps >= 0.0)) throw Error(ErrorKind::domain, kModule, "memory kernel requires tau >= 0");
    if (table_) return kernel_numeric(wc_mev, tau_ps);
    const double g0 = G0_ / units::hbar_mev_ps;
    const double xi = xi_ / units::hbar_mev_ps;
    const double detuning = (omega0_ - wc_mev) / units::hbar_mev_ps;
    return g0 * g0 * std::polar(1.0, -detuning * tau_ps) / cplx(1.0, xi * tau_ps);
}

// Filon-type rule: the cubic interpolant times e^{-i kappa s} is integrated
// exactly on each panel.
std::complex<double> SpectralModel::kernel_numeric(double wc_mev, double tau_ps) const
{
    const MonotoneCubic& t = *table_;
    const double kappa = tau_ps / units::hbar_mev_ps;  // 1/meV
    const double h = t.h();
    const auto mu = filon_moments(kappa, h);
    cplx sum = 0.0;
    for (std::size_t i = 0; i < t.panels(); ++i) {
        const auto c = t.panel(i);
        const double left = omega0_ + h * static_cast<double>(i) - wc_mev;
        const cplx panel = c[0] * mu[0] + c[1] * mu[1] + c[2] * mu[2] + c[3] * mu[3];
        sum += std::polar(1.0, -kappa * left) * panel;
    }
    // J(E) dE e^{...} in meV^2 -> omega units
    return sum / (units::hbar_mev_ps * units::hbar_mev_ps);
}

double upper_polariton_mev(double wc_mev, double Omega0_mev, double G0_mev)
{
    if (!(G0_mev >= 0.0)) throw Error(ErrorKind::domain, kModule, "G0 must be >= 0");
    const double d = wc_mev - Omega0_mev;
    return 0.5 * (wc_mev + Omega0_mev + std::sqrt(4.0 * G0_mev * G0_mev + d * d));
}

ResidualRate residual_rate(const SpectralModel& model, double wc_mev)
{
    const double wp = upper_polariton_mev(wc_mev, model.Omega0_mev(), model.G0_mev());
    return ResidualRate{2.0 * units::pi * model.j_residual_mev(wp), wp, model.backend()};
}

} // namespace polblock::spectral
