#include "polblock/field_profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "polblock/errors.hpp"
#include "polblock/units.hpp"

namespace polblock::field {

namespace {

const std::string kModule = "field-profiles";

constexpr double kTruncationRatio = 1e-4;

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, kModule, msg); }

} // namespace

void GaussianProfile::validate() const
{
    if (!(L_nm > 0.0)) fail(ErrorKind::validation, "L must be > 0");
    if (!(Lz_nm > 0.0)) fail(ErrorKind::validation, "Lz must be > 0");
    if (!(rho >= 0.0 && rho <= 1.0)) fail(ErrorKind::validation, "rho must lie in [0, 1]");
    if (!(eta_n >= 0.5 && eta_n <= 1.0)) fail(ErrorKind::validation, "eta_n must lie in [1/2, 1]");
}

double projection_ratio(const std::array<complex, 3>& polarization, const std::array<complex, 3>& pcv_direction)
{
    complex dot{};
    double nn = 0.0, pp = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        dot += polarization[i] * pcv_direction[i];
        nn += std::norm(polarization[i]);
        pp += std::norm(pcv_direction[i]);
    }
    if (nn == 0.0 || pp == 0.0) fail(ErrorKind::domain, "zero polarization or p_cv direction");
    return std::abs(dot) / std::sqrt(nn * pp);
}

TabulatedProfile::TabulatedProfile(std::size_t nx, std::size_t ny, double x0_nm, double y0_nm, double h_nm,
                                   std::vector<complex> samples, double Lz_nm, double rho, double eta_n)
    : nx_(nx), ny_(ny), x0_(x0_nm), y0_(y0_nm), h_(h_nm), samples_(std::move(samples)), Lz_(Lz_nm), rho_(rho),
      eta_n_(eta_n)
{
    if (nx_ < 3 || ny_ < 3) fail(ErrorKind::validation, "tabulated profile needs at least 3x3 samples");
    if (samples_.size() != nx_ * ny_) fail(ErrorKind::validation, "sample count does not match grid shape");
    if (!(h_ > 0.0)) fail(ErrorKind::validation, "grid spacing must be > 0");
    if (!(Lz_ > 0.0)) fail(ErrorKind::validation, "Lz must be > 0");
    if (!(rho_ >= 0.0 && rho_ <= 1.0)) fail(ErrorKind::validation, "rho must lie in [0, 1]");
    if (!(eta_n_ >= 0.5 && eta_n_ <= 1.0)) fail(ErrorKind::validation, "eta_n must lie in [1/2, 1]");

    double raw = 0.0;
    for (std::size_t j = 0; j < ny_; ++j)
        for (std::size_t i = 0; i < nx_; ++i) raw += weight(i, j) * std::norm(at(i, j));
    if (!(raw > 0.0)) fail(ErrorKind::domain, "degenerate profile: all samples are zero");
    validate_truncation();

    const double scale = std::sqrt(rho_ * rho_ / Lz_ / raw);
    for (auto& s : samples_) s *= scale;
}

void TabulatedProfile::validate_truncation() const
{
    double peak = 0.0;
    for (const auto& s : samples_) peak = std::max(peak, std::abs(s));
    double edge = 0.0;
    for (std::size_t i = 0; i < nx_; ++i) edge = std::max({edge, std::abs(at(i, 0)), std::abs(at(i, ny_ - 1))});
    for (std::size_t j = 0; j < ny_; ++j) edge = std::max({edge, std::abs(at(0, j)), std::abs(at(nx_ - 1, j))});
    if (edge >= kTruncationRatio * peak) {
        std::ostringstream os;
        os << "profile is truncated: boundary amplitude " << edge / peak << " of peak exceeds "
           << kTruncationRatio;
        fail(ErrorKind::sampling, os.str());
    }
}

TabulatedProfile TabulatedProfile::from_csv(std::istream& in, double Lz_nm, double rho, double eta_n)
{
    std::string line;
    if (!std::getline(in, line)) fail(ErrorKind::parse, "empty profile CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "x_nm,y_nm,re,im") fail(ErrorKind::parse, "profile CSV header must be 'x_nm,y_nm,re,im'");

    std::vector<double> xs, ys;
    std::vector<complex> values;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double x, y, re, im;
        if (!(row >> x >> y >> re >> im)) {
            fail(ErrorKind::parse, "profile CSV line " + std::to_string(line_no) + ": expected 4 numbers");
        }
        xs.push_back(x);
        ys.push_back(y);
        values.emplace_back(re, im);
    }
    if (values.size() < 9) fail(ErrorKind::parse, "profile CSV has too few rows");

    std::size_t nx = 1;
    while (nx < ys.size() && ys[nx] == ys[0]) ++nx;
    if (values.size() % nx != 0) fail(ErrorKind::parse, "profile CSV is not a complete rectangular grid");
    const std::size_t ny = values.size() / nx;
    const double h = xs[1] - xs[0];
    const double tol = 1e-6 * std::abs(h);
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t k = j * nx + i;
            if (std::abs(xs[k] - (xs[0] + h * i)) > tol || std::abs(ys[k] - (ys[0] + h * j)) > tol) {
                fail(ErrorKind::parse, "profile CSV row " + std::to_string(k + 2)
                                           + ": grid must be uniform, square-celled, x varying fastest");
            }
        }
    }
    return TabulatedProfile(nx, ny, xs[0], ys[0], h, std::move(values), Lz_nm, rho, eta_n);
}

TabulatedProfile TabulatedProfile::from_csv_file(const std::string& path, double Lz_nm, double rho, double eta_n)
{
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open profile CSV '" + path + "'");
    return from_csv(in, Lz_nm, rho, eta_n);
}

TabulatedProfile TabulatedProfile::sample(const GaussianProfile& profile, double h_nm, double half_width_nm)
{
    profile.validate();
    const auto half = static_cast<std::size_t>(std::llround(half_width_nm / h_nm));
    const std::size_t n = 2 * half + 1;
    const double x0 = -h_nm * static_cast<double>(half);
    const double L2 = profile.L_nm * profile.L_nm;
    std::vector<complex> s(n * n);
    for (std::size_t j = 0; j < n; ++j) {
        const double y = x0 + h_nm * static_cast<double>(j);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = x0 + h_nm * static_cast<double>(i);
            s[j * n + i] = std::exp(-(x * x + y * y) / (2.0 * L2)) / std::sqrt(units::pi * L2);
        }
    }
    return TabulatedProfile(n, n, x0, x0, h_nm, std::move(s), profile.Lz_nm, profile.rho, profile.eta_n);
}

double TabulatedProfile::weight(std::size_t i, std::size_t j) const noexcept
{
    double w = h_ * h_;
    if (i == 0 || i + 1 == nx_) w *= 0.5;
    if (j == 0 || j + 1 == ny_) w *= 0.5;
    return w;
}

double TabulatedProfile::area_nm2() const noexcept
{
    return h_ * static_cast<double>(nx_ - 1) * h_ * static_cast<double>(ny_ - 1);
}

double TabulatedProfile::intensity_integral() const
{
    double s = 0.0;
    for (std::size_t j = 0; j < ny_; ++j)
        for (std::size_t i = 0; i < nx_; ++i) s += weight(i, j) * std::norm(at(i, j));
    return s;
}

double TabulatedProfile::quartic_integral() const
{
    double s = 0.0;
    for (std::size_t j = 0; j < ny_; ++j)
        for (std::size_t i = 0; i < nx_; ++i) {
            const double a2 = std::norm(at(i, j));
            s += weight(i, j) * a2 * a2;
        }
    return s;
}

double TabulatedProfile::rms_extent_nm() const
{
    double w0 = 0.0, wx = 0.0, wy = 0.0;
    for (std::size_t j = 0; j < ny_; ++j)
        for (std::size_t i = 0; i < nx_; ++i) {
            const double w = weight(i, j) * std::norm(at(i, j));
            w0 += w;
            wx += w * x_nm(i);
            wy += w * y_nm(j);
        }
    const double cx = wx / w0, cy = wy / w0;
    double r2 = 0.0;
    for (std::size_t j = 0; j < ny_; ++j)
        for (std::size_t i = 0; i < nx_; ++i) {
            const double dx = x_nm(i) - cx, dy = y_nm(j) - cy;
            r2 += weight(i, j) * std::norm(at(i, j)) * (dx * dx + dy * dy);
        }
    return std::sqrt(r2 / w0);
}

double TabulatedProfile::mean_k2_per_nm2() const
{
    // eighth-order central differences; samples outside the grid are zero
    static constexpr std::array<double, 4> c = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
    auto sample = [&](long i, long j) -> complex {
        if (i < 0 || j < 0 || i >= static_cast<long>(nx_) || j >= static_cast<long>(ny_)) return {};
        return at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    };
    double grad2 = 0.0;
    for (std::size_t j = 0; j < ny_; ++j)
        for (std::size_t i = 0; i < nx_; ++i) {
            complex dx{}, dy{};
            const long li = static_cast<long>(i), lj = static_cast<long>(j);
            for (long m = 1; m <= 4; ++m) {
                dx += c[m - 1] * (sample(li + m, lj) - sample(li - m, lj));
                dy += c[m - 1] * (sample(li, lj + m) - sample(li, lj - m));
            }
            grad2 += weight(i, j) * (std::norm(dx) + std::norm(dy)) / (h_ * h_);
        }
    return grad2 / intensity_integral();
}

void TabulatedProfile::validate_sampling(const materials::MaterialParams& material) const
{
    const double limit = std::min(material.bohr_radius_nm, rms_extent_nm()) / 8.0;
    if (h_ > limit * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "grid spacing " << h_ << " nm exceeds min(a_B, L_rms)/8 = " << limit << " nm";
        fail(ErrorKind::sampling, os.str());
    }
}

TabulatedProfile TabulatedProfile::with_phase(double theta) const
{
    TabulatedProfile copy = *this;
    const complex phase = std::polar(1.0, theta);
    for (auto& s : copy.samples_) s *= phase;
    return copy;
}

double coupling_prefactor_mev2_nm(const materials::MaterialParams& material, double wc_mev)
{
    if (!(wc_mev > 0.0)) fail(ErrorKind::domain, "resonator frequency must be > 0");
    const double omega = units::angular_frequency_per_ps(wc_mev);
    const double p = material.pcv_mev_ps_per_nm;
    const double m0 = units::electron_mass;
    const double a = material.bohr_radius_nm;
    // hbar^2 e^2 p^2 / (pi hbar eps0 m0^2 omega a^2), e = 1
    return units::hbar_mev_ps * p * p / (units::pi * units::vacuum_permittivity * m0 * m0 * omega * a * a);
}

namespace {

// Trapezoid Fourier integral of the normalized samples, scaled to hbar g_k.
complex gk_unchecked(const TabulatedProfile& profile, double kx, double ky, double prefactor)
{
    const std::size_t nx = profile.nx(), ny = profile.ny();
    std::vector<complex> ex(nx), ey(ny);
    for (std::size_t i = 0; i < nx; ++i) ex[i] = std::polar(1.0, -kx * profile.x_nm(i));
    for (std::size_t j = 0; j < ny; ++j) ey[j] = std::polar(1.0, -ky * profile.y_nm(j));
    complex ft{};
    for (std::size_t j = 0; j < ny; ++j) {
        complex row{};
        for (std::size_t i = 0; i < nx; ++i) row += profile.weight(i, j) * profile.at(i, j) * ex[i];
        ft += ey[j] * row;
    }
    // -(e/m0) sqrt(hbar / (pi eps0 omega a^2 S)) |p_cv| FT = -sqrt(prefactor / S) FT
    return -std::sqrt(prefactor / profile.area_nm2()) * ft;
}

void check_nyquist(const TabulatedProfile& profile, double kx, double ky)
{
    const double nyquist = units::pi / profile.h_nm();
    if (std::abs(kx) > nyquist || std::abs(ky) > nyquist) {
        std::ostringstream os;
        os << "|k| component beyond grid Nyquist limit " << nyquist << " nm^-1";
        fail(ErrorKind::sampling, os.str());
    }
}

} // namespace

complex coupling_gk(const TabulatedProfile& profile, double kx, double ky, const materials::MaterialParams& material,
                    double wc_mev)
{
    profile.validate_sampling(material);
    check_nyquist(profile, kx, ky);
    return gk_unchecked(profile, kx, ky, coupling_prefactor_mev2_nm(material, wc_mev));
}

double cutoff_mev(const GaussianProfile& profile, const materials::MaterialParams& material)
{
    return material.dispersion_mev_nm2() / (profile.L_nm * profile.L_nm);
}

double upper_bound_g0_mev(const materials::MaterialParams& material, double wc_mev, double Lz_nm)
{
    if (!(Lz_nm > 0.0)) fail(ErrorKind::domain, "Lz must be > 0");
    return std::sqrt(coupling_prefactor_mev2_nm(material, wc_mev) / Lz_nm);
}

double kerr_shift_mev(const GaussianProfile& profile, const materials::MaterialParams& material)
{
    profile.validate();
    return profile.eta_n * material.interaction_product_mev_nm2() / (2.0 * units::pi * profile.L_nm * profile.L_nm);
}

double kerr_shift_mev(const TabulatedProfile& profile, const materials::MaterialParams& material)
{
    profile.validate_sampling(material);
    const double i2 = profile.intensity_integral();
    if (!(i2 > 0.0)) fail(ErrorKind::domain, "degenerate profile: zero intensity");
    return material.interaction_product_mev_nm2() * profile.eta_n() * profile.quartic_integral() / (i2 * i2);
}

std::optional<std::string> kerr_shift_warning(const GaussianProfile& profile,
                                              const materials::MaterialParams& material)
{
    if (profile.L_nm < 5.0 * material.bohr_radius_nm) {
        std::ostringstream os;
        os << "L = " << profile.L_nm << " nm is below 5 a_B = " << 5.0 * material.bohr_radius_nm
           << " nm; the zero-momentum Kerr estimate is approximate";
        return os.str();
    }
    return std::nullopt;
}

CouplingSummary collective_coupling(const GaussianProfile& profile, const materials::MaterialParams& material,
                                    double wc_mev)
{
    profile.validate();
    const double g0_max = upper_bound_g0_mev(material, wc_mev, profile.Lz_nm);
    const double xi = cutoff_mev(profile, material);
    return CouplingSummary{
        .G0_mev = profile.rho * g0_max,
        .Omega0_mev = material.exciton_energy_mev + xi,
        .Lz_nm = profile.Lz_nm,
        .W0p_mev = kerr_shift_mev(profile, material),
        .xi_mev = xi,
        .G0_max_mev = g0_max,
    };
}

CouplingSummary collective_coupling(const TabulatedProfile& profile, const materials::MaterialParams& material,
                                    double wc_mev)
{
    profile.validate_sampling(material);
    const double g0 = std::sqrt(coupling_prefactor_mev2_nm(material, wc_mev) * profile.intensity_integral());
    // J-weighted mean of E_k = E_0 + D k^2
    const double mean_shift = material.dispersion_mev_nm2() * profile.mean_k2_per_nm2();
    // Gaussian-equivalent cutoff: hbar xi = D / L^2 with <k^2> = 1/L^2
    return CouplingSummary{
        .G0_mev = g0,
        .Omega0_mev = material.exciton_energy_mev + mean_shift,
        .Lz_nm = profile.Lz_nm(),
        .W0p_mev = kerr_shift_mev(profile, material),
        .xi_mev = mean_shift,
        .G0_max_mev = upper_bound_g0_mev(material, wc_mev, profile.Lz_nm()),
    };
}

double calibrate_pcv(const materials::MaterialParams& material, double target_G0_mev, double Lz_nm, double rho,
                     double wc_mev)
{
    if (!(target_G0_mev > 0.0) || !(rho > 0.0)) fail(ErrorKind::domain, "calibration needs G0 > 0 and rho > 0");
    materials::MaterialParams unit = material;
    unit.pcv_mev_ps_per_nm = 1.0;
    return target_G0_mev / (rho * upper_bound_g0_mev(unit, wc_mev, Lz_nm));
}

std::vector<double> profile_spectral_density(const TabulatedProfile& profile,
                                             const materials::MaterialParams& material, double wc_mev,
                                             double dE_mev, std::size_t count, std::size_t n_theta)
{
    profile.validate_sampling(material);
    if (!(dE_mev > 0.0) || count < 2 || n_theta < 4) fail(ErrorKind::domain, "invalid spectral sampling request");
    const double D = material.dispersion_mev_nm2();
    const double S = profile.area_nm2();
    const double prefactor = coupling_prefactor_mev2_nm(material, wc_mev);
    std::vector<double> J(count);
    for (std::size_t n = 0; n < count; ++n) {
        const double k = std::sqrt(static_cast<double>(n) * dE_mev / D);
        double ring = 0.0;
        const std::size_t nt = (n == 0) ? 1 : n_theta;
        for (std::size_t t = 0; t < nt; ++t) {
            const double theta = 2.0 * units::pi * static_cast<double>(t) / static_cast<double>(nt);
            const double kx = k * std::cos(theta), ky = k * std::sin(theta);
            check_nyquist(profile, kx, ky);
            ring += std::norm(gk_unchecked(profile, kx, ky, prefactor));
        }
        ring *= 2.0 * units::pi / static_cast<double>(nt);
        // sum_k -> S/(2 pi)^2 int d^2k, and k dk = dE / (2 D)
        J[n] = S / (4.0 * units::pi * units::pi) / (2.0 * D) * ring;
    }
    return J;
}

} // namespace polblock::field
