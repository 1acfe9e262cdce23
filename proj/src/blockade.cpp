#include "polblock/blockade.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <exception>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>

#include "polblock/errors.hpp"

namespace polblock::blockade {

namespace {

const std::string kModule = "blockade";
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Point {
    double g2{kInf};
    double n_cav{0.0};
    double n_exc{0.0};
};

class Evaluator {
public:
    Evaluator(const SystemTemplate& system, const lindblad::LiouvillianTerms& terms) : system_(system), terms_(terms) {}

    Point operator()(double dc, double dd, double gamma_res)
    {
        ++count;
        const lindblad::Liouvillian L(terms_.assemble(system_.at(dc, dd, gamma_res)), system_.fock);
        const auto ss = solver_.solve(L);
        Point p;
        p.n_cav = lindblad::occupation(ss.rho, system_.fock, lindblad::Mode::cavity);
        p.n_exc = lindblad::occupation(ss.rho, system_.fock, lindblad::Mode::exciton);
        try {
            p.g2 = lindblad::g2_zero(ss.rho, system_.fock);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::undefined_correlation) throw;
        }
        return p;
    }

    std::size_t count{0};

private:
    const SystemTemplate& system_;
    const lindblad::LiouvillianTerms& terms_;
    lindblad::SteadyStateSolver solver_;
};

// Nelder-Mead on (dc, dd) with +inf outside the box.
struct Simplex {
    std::array<std::array<double, 2>, 3> x;
    std::array<double, 3> f;
};

template <class F>
std::pair<std::array<double, 2>, double> nelder_mead(F&& f, std::array<double, 2> start, double f_start, double step,
                                                     const OptimizationSpec& spec)
{
    Simplex s;
    s.x = {start, std::array<double, 2>{start[0] + step, start[1]}, std::array<double, 2>{start[0], start[1] + step}};
    s.f = {f_start, f(s.x[1]), f(s.x[2])};
    if (!std::isfinite(s.f[1])) {
        s.x[1][0] = start[0] - step;
        s.f[1] = f(s.x[1]);
    }
    if (!std::isfinite(s.f[2])) {
        s.x[2][1] = start[1] - step;
        s.f[2] = f(s.x[2]);
    }
    auto order = [&s] {
        std::array<int, 3> idx{0, 1, 2};
        std::stable_sort(idx.begin(), idx.end(), [&s](int a, int b) { return s.f[a] < s.f[b]; });
        Simplex t = s;
        for (int i = 0; i < 3; ++i) {
            s.x[i] = t.x[idx[i]];
            s.f[i] = t.f[idx[i]];
        }
    };
    auto along = [](const std::array<double, 2>& c, const std::array<double, 2>& w, double t) {
        return std::array<double, 2>{c[0] + t * (w[0] - c[0]), c[1] + t * (w[1] - c[1])};
    };
    for (int it = 0; it < spec.max_iterations; ++it) {
        order();
        const double spread = s.f[2] - s.f[0];
        const double diameter = std::max(std::hypot(s.x[1][0] - s.x[0][0], s.x[1][1] - s.x[0][1]),
                                         std::hypot(s.x[2][0] - s.x[0][0], s.x[2][1] - s.x[0][1]));
        if (std::isfinite(spread) && spread <= spec.rel_tol * std::abs(s.f[0])) break;
        if (diameter < 1e-9) break;
        const std::array<double, 2> c{0.5 * (s.x[0][0] + s.x[1][0]), 0.5 * (s.x[0][1] + s.x[1][1])};
        const auto xr = along(c, s.x[2], -1.0);
        const double fr = f(xr);
        if (fr < s.f[0]) {
            const auto xe = along(c, s.x[2], -2.0);
            const double fe = f(xe);
            if (fe < fr) {
                s.x[2] = xe;
                s.f[2] = fe;
            } else {
                s.x[2] = xr;
                s.f[2] = fr;
            }
            continue;
        }
        if (fr < s.f[1]) {
            s.x[2] = xr;
            s.f[2] = fr;
            continue;
        }
        const bool outside = fr < s.f[2];
        const auto xc = along(c, s.x[2], outside ? -0.5 : 0.5);
        const double fc = f(xc);
        if (fc < (outside ? fr : s.f[2])) {
            s.x[2] = xc;
            s.f[2] = fc;
            continue;
        }
        for (int i = 1; i < 3; ++i) {
            s.x[i] = along(s.x[0], s.x[i], 0.5);
            s.f[i] = f(s.x[i]);
        }
    }
    order();
    return {s.x[0], s.f[0]};
}

double dephasing_crossover(const ConfinementSetup& setup, double gamma_xp)
{
    field::GaussianProfile unit = setup.profile;
    unit.L_nm = 1.0;
    const double w1 = field::kerr_shift_mev(unit, setup.material);  // W0' at L = 1 nm
    return std::sqrt(w1 / gamma_xp);
}

} // namespace

void OptimizationSpec::validate() const
{
    auto need = [](bool ok, const char* what) {
        if (!ok) throw Error(ErrorKind::validation, kModule, what);
    };
    need(std::isfinite(box_lo_mev) && std::isfinite(box_hi_mev) && box_lo_mev < box_hi_mev,
         "search box must satisfy lo < hi");
    need(grid >= 2, "coarse grid needs at least 2 points per axis");
    need(starts >= 1 && starts <= grid * grid, "starts must lie in [1, grid^2]");
    need(rel_tol > 0.0, "rel_tol must be > 0");
    need(max_iterations >= 0, "max_iterations must be >= 0");
    need(threads >= 1, "threads must be >= 1");
}

double SystemTemplate::Gamma_res_mev(double wc_mev) const
{
    if (!residual) return 0.0;
    return spectral::residual_rate(*residual, wc_mev).Gamma_res_mev;
}

lindblad::ReducedSystem SystemTemplate::at(double dc_mev, double dd_mev, double gamma_res) const
{
    lindblad::ReducedSystem r;
    r.wc_mev = omega0_mev + dc_mev;
    r.wd_mev = omega0_mev + dd_mev;
    r.Omega0_mev = Omega0_mev;
    r.G0_mev = G0_mev;
    r.W0p_mev = W0p_mev;
    r.gamma_c_mev = gamma_c_mev;
    r.gamma_x_mev = gamma_x_mev;
    r.gamma_xp_mev = gamma_xp_mev;
    r.Gamma_res_mev = gamma_res;
    r.F_mev = F_mev;
    return r;
}

SystemTemplate SystemTemplate::shifted(double delta_mev) const
{
    SystemTemplate s = *this;
    s.omega0_mev += delta_mev;
    s.Omega0_mev += delta_mev;
    if (s.residual) s.residual = s.residual->shifted(delta_mev);
    return s;
}

std::vector<std::array<double, 2>> weak_drive_seeds(const SystemTemplate& system, const OptimizationSpec& spec)
{
    std::vector<std::array<double, 2>> seeds;
    const double G2W = system.G0_mev * system.G0_mev * system.W0p_mev;
    if (!(G2W > 0.0)) return seeds;
    const double W = system.W0p_mev;
    const double gc = system.gamma_c_mev;

    // With D the exciton-drive detuning and g the exciton amplitude decay,
    // Im dc = -gamma_c reduces to the real quartic
    // (g + gc)(D^2 + g^2)((D + W)^2 + g^2) - G0^2 W g (2D + W) = 0.
    auto roots = [&](double g) {
        std::array<double, 5> c{};  // ascending powers of D
        const std::array<double, 3> p1{g * g, 0.0, 1.0};
        const std::array<double, 3> p2{W * W + g * g, 2.0 * W, 1.0};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) c[i + j] += (g + gc) * p1[i] * p2[j];
        c[0] -= G2W * g * W;
        c[1] -= 2.0 * G2W * g;
        Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
        for (int i = 0; i < 4; ++i) companion(i, 3) = -c[i] / c[4];
        for (int i = 1; i < 4; ++i) companion(i, i - 1) = 1.0;
        std::vector<double> out;
        const Eigen::Vector4cd ev = companion.eigenvalues();
        for (int i = 0; i < 4; ++i) {
            if (std::abs(ev[i].imag()) <= 1e-7 * (1.0 + std::abs(ev[i].real()))) out.push_back(ev[i].real());
        }
        std::sort(out.begin(), out.end());
        return out;
    };

    auto seed_for = [&](double D, double g) {
        const std::complex<double> dx(D, -g);
        const std::complex<double> dc = -G2W / (dx * (dx + W)) - dx;
        const double wd = system.Omega0_mev - D;
        return std::array<double, 2>{wd + dc.real() - system.omega0_mev, wd - system.omega0_mev};
    };

    const double g_ref = system.gamma_x_mev + 0.5 * system.Gamma_res_mev(system.Omega0_mev);
    if (!(g_ref > 0.0)) return seeds;
    for (double D : roots(g_ref)) {
        auto x = seed_for(D, g_ref);
        // Gamma_res follows the resonator frequency; one correction pass
        const double g = system.gamma_x_mev + 0.5 * system.Gamma_res_mev(system.omega0_mev + x[0]);
        if (g != g_ref) {
            double closest = kInf;
            for (double D2 : roots(g)) {
                if (std::abs(D2 - D) < closest) {
                    closest = std::abs(D2 - D);
                    x = seed_for(D2, g);
                }
            }
        }
        const bool inside = x[0] >= spec.box_lo_mev && x[0] <= spec.box_hi_mev && x[1] >= spec.box_lo_mev
                            && x[1] <= spec.box_hi_mev;
        if (inside && std::isfinite(x[0]) && std::isfinite(x[1])) seeds.push_back(x);
    }
    return seeds;
}

Optimum optimize_g2(const SystemTemplate& system, const OptimizationSpec& spec)
{
    spec.validate();
    system.fock.validate();
    const lindblad::LiouvillianTerms terms(system.fock);
    const int n = spec.grid;
    const double h = spec.spacing_mev();
    auto coord = [&](int i) { return i == n - 1 ? spec.box_hi_mev : spec.box_lo_mev + h * i; };

    std::vector<double> column_gamma(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) column_gamma[i] = system.Gamma_res_mev(system.omega0_mev + coord(i));

    // cell index = i * n + j with i the resonator axis
    std::vector<Point> grid(static_cast<std::size_t>(n * n));
    const unsigned threads = std::min<unsigned>(spec.threads, static_cast<unsigned>(n * n));
    std::vector<std::exception_ptr> failures(threads);
    std::vector<std::size_t> counts(threads, 0);
    auto work = [&](unsigned t) {
        try {
            Evaluator eval(system, terms);
            for (std::size_t k = t; k < grid.size(); k += threads) {
                const int i = static_cast<int>(k) / n, j = static_cast<int>(k) % n;
                grid[k] = eval(coord(i), coord(j), column_gamma[i]);
            }
            counts[t] = eval.count;
        } catch (...) {
            failures[t] = std::current_exception();
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }
    for (auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }

    std::vector<std::size_t> cells(grid.size());
    std::iota(cells.begin(), cells.end(), 0);
    std::stable_sort(cells.begin(), cells.end(), [&](std::size_t a, std::size_t b) { return grid[a].g2 < grid[b].g2; });
    if (!std::isfinite(grid[cells.front()].g2)) {
        throw Error(ErrorKind::domain, kModule, "g2(0) is undefined at every coarse grid point (zero occupation)");
    }

    Optimum best{};
    best.coarse_min = grid[cells.front()].g2;
    {
        const std::size_t k = cells.front();
        const int i = static_cast<int>(k) / n, j = static_cast<int>(k) % n;
        best.g2_min = grid[k].g2;
        best.wc_mev = system.omega0_mev + coord(i);
        best.wd_mev = system.omega0_mev + coord(j);
        best.n_cav = grid[k].n_cav;
        best.n_exc = grid[k].n_exc;
        best.Gamma_res_mev = column_gamma[i];
    }

    Evaluator eval(system, terms);
    auto objective = [&](const std::array<double, 2>& x) {
        if (x[0] < spec.box_lo_mev || x[0] > spec.box_hi_mev || x[1] < spec.box_lo_mev || x[1] > spec.box_hi_mev) {
            return kInf;
        }
        return eval(x[0], x[1], system.Gamma_res_mev(system.omega0_mev + x[0])).g2;
    };
    const int starts = std::min<int>(spec.starts, static_cast<int>(cells.size()));
    for (int s = 0; s < starts; ++s) {
        const std::size_t k = cells[static_cast<std::size_t>(s)];
        if (!std::isfinite(grid[k].g2)) break;
        const int i = static_cast<int>(k) / n, j = static_cast<int>(k) % n;
        const auto [x, f] = nelder_mead(objective, {coord(i), coord(j)}, grid[k].g2, 0.5 * h, spec);
        if (f < best.g2_min) {
            const double gr = system.Gamma_res_mev(system.omega0_mev + x[0]);
            const Point p = eval(x[0], x[1], gr);
            best.g2_min = p.g2;
            best.wc_mev = system.omega0_mev + x[0];
            best.wd_mev = system.omega0_mev + x[1];
            best.n_cav = p.n_cav;
            best.n_exc = p.n_exc;
            best.Gamma_res_mev = gr;
        }
    }
    if (spec.weak_drive_seeds) {
        const double step = std::clamp(system.gamma_x_mev + system.gamma_xp_mev, 1e-3, 0.5 * h);
        for (const auto& x0 : weak_drive_seeds(system, spec)) {
            const double f0 = objective(x0);
            if (!std::isfinite(f0)) continue;
            const auto [x, f] = nelder_mead(objective, x0, f0, step, spec);
            if (f < best.g2_min) {
                const double gr = system.Gamma_res_mev(system.omega0_mev + x[0]);
                const Point p = eval(x[0], x[1], gr);
                best.g2_min = p.g2;
                best.wc_mev = system.omega0_mev + x[0];
                best.wd_mev = system.omega0_mev + x[1];
                best.n_cav = p.n_cav;
                best.n_exc = p.n_exc;
                best.Gamma_res_mev = gr;
            }
        }
    }
    best.evaluations = eval.count + std::accumulate(counts.begin(), counts.end(), std::size_t{0});
    return best;
}

void ConfinementSetup::validate() const
{
    material.validate();
    field::GaussianProfile p = profile;
    p.validate();
    if (!(temperature_K >= 0.0)) throw Error(ErrorKind::validation, kModule, "T must be >= 0");
    if (!(gamma_c_mev >= 0.0)) throw Error(ErrorKind::validation, kModule, "gamma_c must be >= 0");
    if (!(F_mev > 0.0)) throw Error(ErrorKind::validation, kModule, "F must be > 0");
    if (G0_mev && !(*G0_mev > 0.0)) throw Error(ErrorKind::validation, kModule, "G0 override must be > 0");
    if (gamma_x_mev && !(*gamma_x_mev >= 0.0)) throw Error(ErrorKind::validation, kModule, "gamma_x must be >= 0");
    if (gamma_xp_mev && !(*gamma_xp_mev >= 0.0)) throw Error(ErrorKind::validation, kModule, "gamma_xp must be >= 0");
    fock.validate();
}

double ConfinementSetup::G0_reference_mev() const
{
    if (G0_mev) return *G0_mev;
    return field::collective_coupling(profile, material, material.exciton_energy_mev).G0_mev;
}

materials::Linewidths ConfinementSetup::linewidths() const
{
    auto lw = materials::linewidths_at(material.linewidth, temperature_K);
    if (gamma_x_mev) lw.gamma_x_mev = *gamma_x_mev;
    if (gamma_xp_mev) lw.gamma_xp_mev = *gamma_xp_mev;
    return lw;
}

SystemTemplate ConfinementSetup::system_at(double L_nm) const
{
    field::GaussianProfile p = profile;
    p.L_nm = L_nm;
    p.validate();
    const double w0 = material.exciton_energy_mev;
    const double xi = field::cutoff_mev(p, material);
    const auto lw = linewidths();
    SystemTemplate s;
    s.omega0_mev = w0;
    s.Omega0_mev = w0 + xi;
    s.G0_mev = G0_reference_mev();
    s.W0p_mev = field::kerr_shift_mev(p, material);
    s.gamma_c_mev = gamma_c_mev;
    s.gamma_x_mev = lw.gamma_x_mev;
    s.gamma_xp_mev = lw.gamma_xp_mev;
    s.F_mev = F_mev;
    s.residual = spectral::SpectralModel::gaussian(w0, xi, s.G0_mev);
    s.fock = fock;
    return s;
}

SweepResult sweep_L(const ConfinementSetup& setup, std::span<const double> L_nm, const OptimizationSpec& spec,
                    double crossover_margin)
{
    setup.validate();
    if (L_nm.empty()) throw Error(ErrorKind::validation, kModule, "L list is empty");
    for (std::size_t i = 0; i < L_nm.size(); ++i) {
        if (!(L_nm[i] > 0.0)) throw Error(ErrorKind::validation, kModule, "L values must be > 0");
        if (i > 0 && !(L_nm[i] > L_nm[i - 1])) throw Error(ErrorKind::validation, kModule, "L values must ascend");
    }
    SweepResult result;
    for (double L : L_nm) {
        const SystemTemplate sys = setup.system_at(L);
        SweepRecord r{};
        r.L_nm = L;
        r.G0_mev = sys.G0_mev;
        r.W0p_mev = sys.W0p_mev;
        r.xi_mev = sys.Omega0_mev - sys.omega0_mev;
        r.gamma_x_mev = sys.gamma_x_mev;
        r.gamma_xp_mev = sys.gamma_xp_mev;
        r.optimum = optimize_g2(sys, spec);
        result.records.push_back(r);
    }
    for (auto it = result.records.rbegin(); it != result.records.rend(); ++it) {
        if (it->optimum.g2_min < 1.0 - crossover_margin) {
            result.crossover_L_nm = it->L_nm;
            break;
        }
    }
    const double gxp = setup.linewidths().gamma_xp_mev;
    if (gxp > 0.0) result.dephasing_L_nm = dephasing_crossover(setup, gxp);
    return result;
}

std::vector<RegimeRow> regime_map(const ConfinementSetup& setup, std::span<const double> L_nm,
                                  double residual_threshold_mev)
{
    setup.validate();
    if (!(residual_threshold_mev > 0.0)) {
        throw Error(ErrorKind::validation, kModule, "residual threshold must be > 0");
    }
    std::vector<RegimeRow> rows;
    rows.reserve(L_nm.size());
    for (double L : L_nm) {
        if (!(L > 0.0)) throw Error(ErrorKind::validation, kModule, "L values must be > 0");
        const SystemTemplate sys = setup.system_at(L);
        RegimeRow row{};
        row.L_nm = L;
        row.G0_mev = sys.G0_mev;
        row.W0p_mev = sys.W0p_mev;
        row.Gamma_res_mev = sys.Gamma_res_mev(sys.Omega0_mev);
        row.gamma_xp_mev = sys.gamma_xp_mev;
        row.gamma_x_mev = sys.gamma_x_mev;
        row.xi_mev = sys.Omega0_mev - sys.omega0_mev;
        if (row.Gamma_res_mev > residual_threshold_mev) {
            row.regime = Regime::residual_dominated;
        } else if (row.W0p_mev > row.gamma_xp_mev) {
            row.regime = Regime::blockade_window;
        } else {
            row.regime = Regime::linear;
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace polblock::blockade
