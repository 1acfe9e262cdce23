#include "polblock/dispatch.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>

#include <json.hpp>

#include "polblock/blockade.hpp"
#include "polblock/errors.hpp"
#include "polblock/field_profile.hpp"
#include "polblock/lindblad.hpp"
#include "polblock/nonmarkovian.hpp"
#include "polblock/spectral.hpp"

#ifndef POLBLOCK_VERSION
#define POLBLOCK_VERSION "unknown"
#endif

namespace polblock::cli {

namespace {

const std::string kModule = "cli";
using json = nlohmann::ordered_json;
using config::Frequency;
using config::ProfileKind;
using config::RunConfig;

// value as printed with 12 significant digits, so JSON and CSV agree
double r12(double v)
{
    if (!std::isfinite(v)) return v;
    return std::strtod(format_number(v).c_str(), nullptr);
}

class Writer {
public:
    explicit Writer(std::string dir) : dir_(std::move(dir))
    {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw Error(ErrorKind::io, kModule, "cannot create output directory '" + dir_ + "': " + ec.message());
    }

    void text(const std::string& name, const std::string& contents)
    {
        const auto path = (std::filesystem::path(dir_) / name).string();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error(ErrorKind::io, kModule, "cannot write '" + path + "'");
        out << contents;
        out.close();
        if (!out) throw Error(ErrorKind::io, kModule, "write failed for '" + path + "'");
        files.push_back(name);
    }

    void csv(const std::string& name, const std::string& header, const std::vector<std::vector<double>>& rows)
    {
        std::string s = header + "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) s += ',';
                s += format_number(row[i]);
            }
            s += '\n';
        }
        text(name, s);
    }

    std::vector<std::string> files;

private:
    std::string dir_;
};

// Shared derived state for one configuration.
struct Context {
    const RunConfig& cfg;
    std::optional<field::TabulatedProfile> table;

    explicit Context(const RunConfig& c) : cfg(c)
    {
        if (c.profile_kind == ProfileKind::tabulated) {
            table = field::TabulatedProfile::from_csv_file(*c.profile_csv, c.gaussian.Lz_nm, c.gaussian.rho,
                                                           c.gaussian.eta_n);
            table->validate_sampling(c.material);
        }
    }

    double omega0() const { return cfg.material.exciton_energy_mev; }

    field::GaussianProfile gaussian(double L) const
    {
        field::GaussianProfile p = cfg.gaussian;
        p.L_nm = L;
        return p;
    }

    double xi(double L) const
    {
        if (table) return field::collective_coupling(*table, cfg.material, omega0()).xi_mev;
        return field::cutoff_mev(gaussian(L), cfg.material);
    }

    // fixed resonator frequency; 'optimize' falls back to hbar omega_0
    double resonator(double L) const
    {
        switch (cfg.wc.kind) {
        case Frequency::Kind::value: return cfg.wc.value_mev;
        case Frequency::Kind::Omega0: return omega0() + xi(L);
        default: return omega0();
        }
    }

    double drive(double L, double wc) const
    {
        switch (cfg.wd.kind) {
        case Frequency::Kind::value: return cfg.wd.value_mev;
        case Frequency::Kind::Omega0: return omega0() + xi(L);
        case Frequency::Kind::omega0: return omega0();
        default: return wc;
        }
    }

    field::CouplingSummary coupling(double L, double wc) const
    {
        if (table) return field::collective_coupling(*table, cfg.material, wc);
        return field::collective_coupling(gaussian(L), cfg.material, wc);
    }

    // Numeric model from J samples on [E0, E0 + extent].
    spectral::SpectralModel tabulated_model(double L, double wc) const
    {
        const double x = xi(L);
        double extent = cfg.table_extent_xi * x;
        std::vector<double> J;
        const auto n = static_cast<std::size_t>(cfg.table_points);
        if (table) {
            const double k_nyq = 3.141592653589793 / table->h_nm();
            extent = std::min(extent, 0.99 * cfg.material.dispersion_mev_nm2() * k_nyq * k_nyq);
            J = field::profile_spectral_density(*table, cfg.material, wc, extent / static_cast<double>(n - 1), n,
                                                static_cast<std::size_t>(cfg.ring_points));
        } else {
            const double G0 = cfg.G0_mev.value_or(coupling(L, wc).G0_mev);
            const double J0 = G0 * G0 / x;
            J.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                J[i] = J0 * std::exp(-extent * static_cast<double>(i) / static_cast<double>(n - 1) / x);
            }
        }
        return spectral::SpectralModel::tabulated(omega0(), extent / static_cast<double>(n - 1), std::move(J));
    }

    spectral::SpectralModel model(double L, double wc) const
    {
        if (table || cfg.backend == spectral::Backend::numeric) return tabulated_model(L, wc);
        const double G0 = cfg.G0_mev.value_or(coupling(L, wc).G0_mev);
        return spectral::SpectralModel::gaussian(omega0(), xi(L), G0);
    }

    blockade::ConfinementSetup setup() const
    {
        blockade::ConfinementSetup s;
        s.material = cfg.material;
        s.profile = cfg.gaussian;
        s.temperature_K = cfg.T_K;
        s.gamma_c_mev = cfg.gamma_c_mev;
        s.F_mev = cfg.F_mev;
        s.G0_mev = cfg.G0_mev;
        s.gamma_x_mev = cfg.gamma_x_mev;
        s.gamma_xp_mev = cfg.gamma_xp_mev;
        s.fock = cfg.fock;
        return s;
    }

    // Nonlinear model; G0 is the reference value at hbar omega_c = hbar omega_0.
    blockade::SystemTemplate nonlinear(double L) const
    {
        if (!table) return setup().system_at(L);
        const auto lw = setup().linewidths();
        const auto cs = field::collective_coupling(*table, cfg.material, omega0());
        blockade::SystemTemplate s;
        s.omega0_mev = omega0();
        s.Omega0_mev = cs.Omega0_mev;
        s.G0_mev = cfg.G0_mev.value_or(cs.G0_mev);
        s.W0p_mev = field::kerr_shift_mev(*table, cfg.material);
        s.gamma_c_mev = cfg.gamma_c_mev;
        s.gamma_x_mev = lw.gamma_x_mev;
        s.gamma_xp_mev = lw.gamma_xp_mev;
        s.F_mev = cfg.F_mev;
        s.residual = tabulated_model(L, omega0());
        s.fock = cfg.fock;
        return s;
    }

    std::vector<double> L_values() const
    {
        if (!cfg.L_list.empty() && !table) return cfg.L_list;
        return {cfg.gaussian.L_nm};
    }
};

json coupling_json(const field::CouplingSummary& c, double wc, double omega0)
{
    json j;
    j["G0_mev"] = r12(c.G0_mev);
    j["Omega0_mev"] = r12(c.Omega0_mev);
    j["xi_mev"] = r12(c.xi_mev);
    j["W0p_mev"] = r12(c.W0p_mev);
    j["Lz_nm"] = r12(c.Lz_nm);
    j["G0_max_mev"] = r12(c.G0_max_mev);
    j["wc_mev"] = r12(wc);
    j["omega0_mev"] = r12(omega0);
    return j;
}

json linewidth_json(const Context& ctx)
{
    const auto lw = ctx.setup().linewidths();
    json j;
    j["T_K"] = r12(ctx.cfg.T_K);
    j["gamma_x_mev"] = r12(lw.gamma_x_mev);
    j["gamma_xp_mev"] = r12(lw.gamma_xp_mev);
    j["gamma_x_source"] = ctx.cfg.gamma_x_mev ? "config override" : "material linewidth model";
    j["gamma_xp_source"] = ctx.cfg.gamma_xp_mev ? "config override" : "material linewidth model";
    return j;
}

struct Operating {
    double wc, wd;
    std::optional<blockade::Optimum> optimum;
};

Operating operating_point(const Context& ctx, const blockade::SystemTemplate& sys, double L, unsigned threads)
{
    if (ctx.cfg.wc.kind == Frequency::Kind::optimize) {
        auto spec = ctx.cfg.optimization;
        spec.threads = threads;
        const auto opt = blockade::optimize_g2(sys, spec);
        return {opt.wc_mev, opt.wd_mev, opt};
    }
    double wc = ctx.cfg.wc.kind == Frequency::Kind::Omega0 ? sys.Omega0_mev : ctx.resonator(L);
    double wd = ctx.cfg.wd.kind == Frequency::Kind::Omega0 ? sys.Omega0_mev : ctx.drive(L, wc);
    return {wc, wd, std::nullopt};
}

json optimum_json(const blockade::Optimum& o)
{
    json j;
    j["g2_min"] = r12(o.g2_min);
    j["wc_mev"] = r12(o.wc_mev);
    j["wd_mev"] = r12(o.wd_mev);
    j["n_cav"] = r12(o.n_cav);
    return j;
}

lindblad::AnalysisOptions analysis_options(const RunConfig& cfg)
{
    lindblad::AnalysisOptions a;
    a.adaptive_truncation = cfg.adaptive_truncation;
    a.truncation_tolerance = cfg.truncation_tol;
    a.max_level = cfg.max_level;
    a.propagation_tolerance = cfg.propagation_tol;
    return a;
}

void check_state(const lindblad::CorrelationResult& r)
{
    if (r.trace_error > 1e-10 || r.min_eigenvalue < -1e-8) {
        std::string msg = "steady state fails hygiene checks (trace error " + format_number(r.trace_error) +
                          ", min eigenvalue " + format_number(r.min_eigenvalue) + ")";
        throw Error(ErrorKind::numerical_instability, "lindblad", msg);
    }
}

} // namespace

std::string format_number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string error_json(const std::exception& e)
{
    json j;
    if (const auto* pe = dynamic_cast<const Error*>(&e)) {
        j["error"]["kind"] = std::string(to_string(pe->kind()));
        j["error"]["module"] = pe->module();
    } else {
        j["error"]["kind"] = "internal";
        j["error"]["module"] = "cli";
    }
    j["error"]["message"] = e.what();
    return j.dump();
}

RunManifest dispatch(const RunConfig& cfg, const std::string& subcommand, const std::string& out_dir, unsigned threads)
{
    if (std::find(kSubcommands.begin(), kSubcommands.end(), subcommand) == kSubcommands.end()) {
        throw Error(ErrorKind::validation, kModule, "unknown subcommand '" + subcommand + "'");
    }
    if (threads < 1) throw Error(ErrorKind::validation, kModule, "threads must be >= 1");
    const auto t_start = std::chrono::steady_clock::now();
    const Context ctx(cfg);
    Writer out(out_dir);
    json manifest;
    manifest["tool"] = "polblock";
    manifest["version"] = POLBLOCK_VERSION;
    manifest["subcommand"] = subcommand;
    manifest["config_source"] = cfg.source;
    json echo = json::object();
    for (const auto& [k, v] : cfg.echo()) echo[k] = v;
    manifest["config"] = echo;

    const double L0 = cfg.gaussian.L_nm;
    const double wc0 = ctx.resonator(L0);
    manifest["derived"]["coupling"] = coupling_json(ctx.coupling(L0, wc0), wc0, ctx.omega0());
    if (!ctx.table) {
        if (auto w = field::kerr_shift_warning(ctx.gaussian(L0), cfg.material)) manifest["warnings"].push_back(*w);
    }
    json results = json::object();

    if (subcommand == "coupling") {
        json j = coupling_json(ctx.coupling(L0, wc0), wc0, ctx.omega0());
        out.text("coupling.json", j.dump(2) + "\n");
    } else if (subcommand == "spectral") {
        const auto m = ctx.model(L0, wc0);
        const double xi = ctx.table ? m.xi_mev() : ctx.xi(L0);
        const double J0 = m.G0_mev() * m.G0_mev() / xi;
        std::vector<std::vector<double>> rows;
        for (int i = 0; i < cfg.x_points; ++i) {
            const double x = cfg.x_min + (cfg.x_max - cfg.x_min) * i / (cfg.x_points - 1);
            const double E = ctx.omega0() + x * xi;
            rows.push_back({x, m.j_exciton_mev(E) / J0, m.j_residual_mev(E) / xi});
        }
        out.csv("spectral.csv", "x,J_over_J0,Jres_over_xi", rows);
        results["backend"] = std::string(spectral::to_string(m.backend()));
        results["xi_mev"] = r12(xi);
        results["G0_mev"] = r12(m.G0_mev());
    } else if (subcommand == "lineardyn") {
        json per_L = json::array();
        for (double L : ctx.L_values()) {
            const double wc = ctx.resonator(L);
            nonmarkov::LinearDynamicsProblem p{ctx.model(L, wc), wc, cfg.gamma_c_mev, cfg.t_max_ps, cfg.dt_ps};
            const auto r = nonmarkov::compare_models(p);
            std::vector<std::vector<double>> rows;
            for (std::size_t i = 0; i < r.t_ps.size(); ++i) rows.push_back({r.t_ps[i], r.exact[i], r.markov[i], r.ignored[i]});
            const std::string name = "lineardyn_L" + format_number(L) + ".csv";
            out.csv(name, "t_ps,exact,markov,ignored", rows);
            json j;
            j["L_nm"] = r12(L);
            j["file"] = name;
            j["G0_mev"] = r12(p.spectral.G0_mev());
            j["Gamma_res_mev"] = r12(r.Gamma_res_mev);
            j["step_ps"] = r12(p.resolved_step_ps());
            j["exact_error_estimate"] = r12(r.exact_error_estimate);
            j["l2_exact_markov"] = r12(r.distance_exact_markov);
            j["l2_exact_ignored"] = r12(r.distance_exact_ignored);
            j["l2_markov_ignored"] = r12(r.distance_markov_ignored);
            per_L.push_back(j);
        }
        results["runs"] = per_L;
    } else if (subcommand == "g2ss" || subcommand == "g2tau") {
        const auto sys = ctx.nonlinear(L0);
        const auto op = operating_point(ctx, sys, L0, threads);
        auto opts = analysis_options(cfg);
        if (subcommand == "g2tau") {
            for (int i = 0; i < cfg.tau_points; ++i) opts.tau_ps.push_back(cfg.tau_max_ps * i / (cfg.tau_points - 1));
        }
        const double gres = sys.Gamma_res_mev(op.wc);
        const auto r = lindblad::analyze(sys.at(op.wc - sys.omega0_mev, op.wd - sys.omega0_mev, gres), cfg.fock, opts);
        check_state(r);
        if (subcommand == "g2ss") {
            json j;
            j["n_cav"] = r12(r.n_cav);
            j["n_exc"] = r12(r.n_exc);
            j["g2_0"] = r12(r.g2_0);
            j["residual"] = r12(r.residual);
            j["Nc"] = r.fock.Nc;
            j["Nx"] = r.fock.Nx;
            out.text("g2ss.json", j.dump(2) + "\n");
        } else {
            std::vector<std::vector<double>> rows;
            for (std::size_t i = 0; i < r.tau_ps.size(); ++i) {
                if (!(r.g2_tau[i] >= -1e-8)) {
                    throw Error(ErrorKind::numerical_instability, "lindblad", "g2(tau) became negative");
                }
                rows.push_back({r.tau_ps[i], r.g2_tau[i]});
            }
            out.csv("g2tau.csv", "tau_ps,g2", rows);
        }
        results["wc_mev"] = r12(op.wc);
        results["wd_mev"] = r12(op.wd);
        results["Gamma_res_mev"] = r12(gres);
        results["W0p_mev"] = r12(sys.W0p_mev);
        results["G0_mev"] = r12(sys.G0_mev);
        results["trace_error"] = r12(r.trace_error);
        results["min_eigenvalue"] = r12(r.min_eigenvalue);
        results["top_population_cavity"] = r12(r.top_population_cavity);
        results["top_population_exciton"] = r12(r.top_population_exciton);
        if (op.optimum) results["optimum"] = optimum_json(*op.optimum);
        manifest["linewidths"] = linewidth_json(ctx);
    } else if (subcommand == "optimize") {
        const auto sys = ctx.nonlinear(L0);
        auto spec = cfg.optimization;
        spec.threads = threads;
        const auto o = blockade::optimize_g2(sys, spec);
        out.text("optimize.json", optimum_json(o).dump(2) + "\n");
        results["coarse_min"] = r12(o.coarse_min);
        results["n_exc"] = r12(o.n_exc);
        results["Gamma_res_mev"] = r12(o.Gamma_res_mev);
        results["evaluations"] = o.evaluations;
        manifest["linewidths"] = linewidth_json(ctx);
    } else if (subcommand == "sweep-L") {
        if (ctx.table) throw Error(ErrorKind::validation, kModule, "sweep-L requires a gaussian profile");
        auto spec = cfg.optimization;
        spec.threads = threads;
        const auto s = blockade::sweep_L(ctx.setup(), ctx.L_values(), spec, cfg.crossover_margin);
        std::vector<std::vector<double>> rows;
        for (const auto& r : s.records) {
            rows.push_back({r.L_nm, r.G0_mev, r.W0p_mev, r.optimum.Gamma_res_mev, r.gamma_xp_mev, r.optimum.g2_min,
                            r.optimum.wc_mev, r.optimum.wd_mev});
        }
        out.csv("sweep_L.csv", "L_nm,G0_meV,W0p_meV,Gres_meV,gxp_meV,g2min,wc_mev,wd_mev", rows);
        results["crossover_L_nm"] = s.crossover_L_nm ? json(r12(*s.crossover_L_nm)) : json(nullptr);
        results["dephasing_L_nm"] = s.dephasing_L_nm ? json(r12(*s.dephasing_L_nm)) : json(nullptr);
        results["crossover_margin"] = r12(cfg.crossover_margin);
        manifest["linewidths"] = linewidth_json(ctx);
    } else if (subcommand == "regime-map") {
        if (ctx.table) throw Error(ErrorKind::validation, kModule, "regime-map requires a gaussian profile");
        const auto rows_in = blockade::regime_map(ctx.setup(), ctx.L_values(), cfg.residual_threshold_mev);
        std::string s = "L_nm,G0_meV,W0p_meV,Gres_meV,gxp_meV,gx_meV,regime\n";
        for (const auto& r : rows_in) {
            s += format_number(r.L_nm) + "," + format_number(r.G0_mev) + "," + format_number(r.W0p_mev) + "," +
                 format_number(r.Gamma_res_mev) + "," + format_number(r.gamma_xp_mev) + "," +
                 format_number(r.gamma_x_mev) + "," + std::string(blockade::to_string(r.regime)) + "\n";
        }
        out.text("regime_map.csv", s);
        results["residual_threshold_mev"] = r12(cfg.residual_threshold_mev);
        manifest["linewidths"] = linewidth_json(ctx);
    }

    manifest["results"] = results;
    manifest["outputs"] = out.files;
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    manifest["timings_s"]["total"] = r12(elapsed);
    RunManifest m;
    m.subcommand = subcommand;
    m.out_dir = out_dir;
    m.outputs = out.files;
    m.json = manifest.dump(2) + "\n";
    {
        // written last, outside the data file list
        const auto path = (std::filesystem::path(out_dir) / "manifest.json").string();
        std::ofstream f(path, std::ios::binary);
        if (!f) throw Error(ErrorKind::io, kModule, "cannot write '" + path + "'");
        f << m.json;
        if (!f) throw Error(ErrorKind::io, kModule, "write failed for '" + path + "'");
    }
    return m;
}

} // namespace polblock::cli
