#include "polblock/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "polblock/errors.hpp"
#include "polblock/keyvalue.hpp"

namespace polblock::config {

namespace {

const std::string kModule = "config";

using Handler = std::function<void(RunConfig&, const keyvalue::Entry&)>;

std::string num(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string qualified(const keyvalue::Entry& e)
{
    return e.section + "." + e.key;
}

[[noreturn]] void invalid(const std::string& key, const std::string& what)
{
    throw Error(ErrorKind::validation, kModule, "invalid value for '" + key + "': " + what);
}

double number(const keyvalue::Entry& e)
{
    return keyvalue::to_double(e, kModule);
}

int integer(const keyvalue::Entry& e)
{
    return keyvalue::to_int(e, kModule);
}

bool boolean(const keyvalue::Entry& e)
{
    std::string v = e.value;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw Error(ErrorKind::parse, kModule,
                "line " + std::to_string(e.line) + ": key '" + qualified(e) + "' is not a boolean: '" + e.value + "'");
}

Frequency frequency(const keyvalue::Entry& e)
{
    if (e.value == "Omega0") return {Frequency::Kind::Omega0, 0.0};
    if (e.value == "omega0") return {Frequency::Kind::omega0, 0.0};
    if (e.value == "optimize") return {Frequency::Kind::optimize, 0.0};
    if (e.value == "wc") return {Frequency::Kind::wc, 0.0};
    return {Frequency::Kind::value, number(e)};
}

std::string frequency_text(const Frequency& f)
{
    switch (f.kind) {
    case Frequency::Kind::Omega0: return "Omega0";
    case Frequency::Kind::omega0: return "omega0";
    case Frequency::Kind::optimize: return "optimize";
    case Frequency::Kind::wc: return "wc";
    case Frequency::Kind::value: return num(f.value_mev);
    }
    return "";
}

const std::map<std::string, Handler>& handlers()
{
    static const std::map<std::string, Handler> h = {
        // material: file and check_product are handled before the rest
        {"material.file", [](RunConfig&, const keyvalue::Entry&) {}},
        {"material.check_product_mev_nm2", [](RunConfig& c, const keyvalue::Entry& e) { c.check_product_mev_nm2 = number(e); }},

        {"profile.kind", [](RunConfig& c, const keyvalue::Entry& e) {
             if (e.value == "gaussian") c.profile_kind = ProfileKind::gaussian;
             else if (e.value == "tabulated") c.profile_kind = ProfileKind::tabulated;
             else invalid(qualified(e), "expected 'gaussian' or 'tabulated', got '" + e.value + "'");
         }},
        {"profile.L_nm", [](RunConfig& c, const keyvalue::Entry& e) { c.gaussian.L_nm = number(e); }},
        {"profile.Lz_nm", [](RunConfig& c, const keyvalue::Entry& e) { c.gaussian.Lz_nm = number(e); }},
        {"profile.rho", [](RunConfig& c, const keyvalue::Entry& e) { c.gaussian.rho = number(e); }},
        {"profile.eta_n", [](RunConfig& c, const keyvalue::Entry& e) { c.gaussian.eta_n = number(e); }},
        {"profile.csv", [](RunConfig& c, const keyvalue::Entry& e) { c.profile_csv = e.value; }},

        {"system.gamma_c_mev", [](RunConfig& c, const keyvalue::Entry& e) { c.gamma_c_mev = number(e); }},
        {"system.F_mev", [](RunConfig& c, const keyvalue::Entry& e) { c.F_mev = number(e); }},
        {"system.T_K", [](RunConfig& c, const keyvalue::Entry& e) { c.T_K = number(e); }},
        {"system.wc_mev", [](RunConfig& c, const keyvalue::Entry& e) { c.wc = frequency(e); }},
        {"system.wd_mev", [](RunConfig& c, const keyvalue::Entry& e) { c.wd = frequency(e); }},
        {"system.gamma_x_mev", [](RunConfig& c, const keyvalue::Entry& e) { c.gamma_x_mev = number(e); }},
        {"system.gamma_xp_mev", [](RunConfig& c, const keyvalue::Entry& e) { c.gamma_xp_mev = number(e); }},
        {"system.G0_mev", [](RunConfig& c, const keyvalue::Entry& e) { c.G0_mev = number(e); }},

        {"numerics.Nc", [](RunConfig& c, const keyvalue::Entry& e) { c.fock.Nc = integer(e); }},
        {"numerics.Nx", [](RunConfig& c, const keyvalue::Entry& e) { c.fock.Nx = integer(e); }},
        {"numerics.adaptive_truncation", [](RunConfig& c, const keyvalue::Entry& e) { c.adaptive_truncation = boolean(e); }},
        {"numerics.truncation_tol", [](RunConfig& c, const keyvalue::Entry& e) { c.truncation_tol = number(e); }},
        {"numerics.max_level", [](RunConfig& c, const keyvalue::Entry& e) { c.max_level = integer(e); }},
        {"numerics.t_max_ps", [](RunConfig& c, const keyvalue::Entry& e) { c.t_max_ps = number(e); }},
        {"numerics.dt_ps", [](RunConfig& c, const keyvalue::Entry& e) { c.dt_ps = number(e); }},
        {"numerics.tau_max_ps", [](RunConfig& c, const keyvalue::Entry& e) { c.tau_max_ps = number(e); }},
        {"numerics.tau_points", [](RunConfig& c, const keyvalue::Entry& e) { c.tau_points = integer(e); }},
        {"numerics.propagation_tol", [](RunConfig& c, const keyvalue::Entry& e) { c.propagation_tol = number(e); }},
        {"numerics.box_lo_mev", [](RunConfig& c, const keyvalue::Entry& e) { c.optimization.box_lo_mev = number(e); }},
        {"numerics.box_hi_mev", [](RunConfig& c, const keyvalue::Entry& e) { c.optimization.box_hi_mev = number(e); }},
        {"numerics.grid", [](RunConfig& c, const keyvalue::Entry& e) { c.optimization.grid = integer(e); }},
        {"numerics.starts", [](RunConfig& c, const keyvalue::Entry& e) { c.optimization.starts = integer(e); }},
        {"numerics.g2_rel_tol", [](RunConfig& c, const keyvalue::Entry& e) { c.optimization.rel_tol = number(e); }},
        {"numerics.max_iterations", [](RunConfig& c, const keyvalue::Entry& e) { c.optimization.max_iterations = integer(e); }},
        {"numerics.weak_drive_seeds", [](RunConfig& c, const keyvalue::Entry& e) { c.optimization.weak_drive_seeds = boolean(e); }},
        {"numerics.spectral_backend", [](RunConfig& c, const keyvalue::Entry& e) {
             if (e.value == "analytic") c.backend = spectral::Backend::analytic_gaussian;
             else if (e.value == "numeric") c.backend = spectral::Backend::numeric;
             else invalid(qualified(e), "expected 'analytic' or 'numeric', got '" + e.value + "'");
         }},
        {"numerics.x_min", [](RunConfig& c, const keyvalue::Entry& e) { c.x_min = number(e); }},
        {"numerics.x_max", [](RunConfig& c, const keyvalue::Entry& e) { c.x_max = number(e); }},
        {"numerics.x_points", [](RunConfig& c, const keyvalue::Entry& e) { c.x_points = integer(e); }},
        {"numerics.table_extent_xi", [](RunConfig& c, const keyvalue::Entry& e) { c.table_extent_xi = number(e); }},
        {"numerics.table_points", [](RunConfig& c, const keyvalue::Entry& e) { c.table_points = integer(e); }},
        {"numerics.ring_points", [](RunConfig& c, const keyvalue::Entry& e) { c.ring_points = integer(e); }},

        {"sweep.L_nm", [](RunConfig& c, const keyvalue::Entry& e) { c.L_list = keyvalue::to_double_list(e, kModule); }},
        {"sweep.crossover_margin", [](RunConfig& c, const keyvalue::Entry& e) { c.crossover_margin = number(e); }},
        {"sweep.residual_threshold_mev", [](RunConfig& c, const keyvalue::Entry& e) { c.residual_threshold_mev = number(e); }},

        {"output.dir", [](RunConfig& c, const keyvalue::Entry& e) { c.out_dir = e.value; }},
    };
    return h;
}

void unknown(const keyvalue::Entry& e, const std::string& source)
{
    const auto& h = handlers();
    std::vector<std::string> sections, keys_in_section, all_keys;
    for (const auto& [name, _] : h) {
        const auto dot = name.find('.');
        const std::string sec = name.substr(0, dot), key = name.substr(dot + 1);
        if (std::find(sections.begin(), sections.end(), sec) == sections.end()) sections.push_back(sec);
        if (sec == e.section) keys_in_section.push_back(key);
        all_keys.push_back(key);
    }
    auto views = [](const std::vector<std::string>& v) { return std::vector<std::string_view>(v.begin(), v.end()); };
    std::ostringstream os;
    os << source << ":" << e.line << ": ";
    if (keys_in_section.empty()) {
        os << "unknown section '[" << e.section << "]'";
        const auto sv = views(sections);
        if (auto s = keyvalue::suggest(e.section, sv); !s.empty()) os << " (did you mean '[" << s << "]'?)";
    } else {
        os << "unknown key '" << e.key << "' in section [" << e.section << "]";
        const auto kv = views(keys_in_section);
        auto s = keyvalue::suggest(e.key, kv);
        if (s.empty()) {
            const auto av = views(all_keys);
            s = keyvalue::suggest(e.key, av);
        }
        if (!s.empty()) os << " (did you mean '" << s << "'?)";
    }
    throw Error(ErrorKind::parse, kModule, os.str());
}

void validate(RunConfig& c)
{
    c.material.validate(c.check_product_mev_nm2);
    if (c.profile_kind == ProfileKind::gaussian) {
        if (!(c.gaussian.L_nm > 0.0) || !std::isfinite(c.gaussian.L_nm)) invalid("profile.L_nm", "L must be > 0");
        if (c.profile_csv) invalid("profile.csv", "only used with kind = tabulated");
    } else if (!c.profile_csv) {
        invalid("profile.csv", "kind = tabulated requires a csv path");
    }
    if (!(c.gaussian.Lz_nm > 0.0)) invalid("profile.Lz_nm", "L_z must be > 0");
    if (!(c.gaussian.rho > 0.0 && c.gaussian.rho <= 1.0)) invalid("profile.rho", "must lie in (0, 1]");
    if (!(c.gaussian.eta_n >= 0.5 && c.gaussian.eta_n <= 1.0)) invalid("profile.eta_n", "must lie in [0.5, 1]");

    if (!(c.gamma_c_mev >= 0.0)) invalid("system.gamma_c_mev", "must be >= 0");
    if (!(c.F_mev > 0.0)) invalid("system.F_mev", "must be > 0");
    if (!(c.T_K >= 0.0)) invalid("system.T_K", "must be >= 0");
    if (c.wc.kind == Frequency::Kind::wc) invalid("system.wc_mev", "'wc' is only valid for wd_mev");
    if ((c.wc.kind == Frequency::Kind::optimize) != (c.wd.kind == Frequency::Kind::optimize)) {
        invalid("system.wd_mev", "wc_mev and wd_mev must both be 'optimize' or neither");
    }
    if (c.gamma_x_mev && !(*c.gamma_x_mev >= 0.0)) invalid("system.gamma_x_mev", "must be >= 0");
    if (c.gamma_xp_mev && !(*c.gamma_xp_mev >= 0.0)) invalid("system.gamma_xp_mev", "must be >= 0");
    if (c.G0_mev && !(*c.G0_mev > 0.0)) invalid("system.G0_mev", "must be > 0");

    if (c.fock.Nc < 2) invalid("numerics.Nc", "must be >= 2");
    if (c.fock.Nx < 2) invalid("numerics.Nx", "must be >= 2");
    if (!(c.truncation_tol > 0.0)) invalid("numerics.truncation_tol", "must be > 0");
    if (c.max_level < std::max(c.fock.Nc, c.fock.Nx)) invalid("numerics.max_level", "must be >= Nc and Nx");
    if (!(c.t_max_ps > 0.0)) invalid("numerics.t_max_ps", "must be > 0");
    if (!(c.dt_ps >= 0.0)) invalid("numerics.dt_ps", "must be >= 0 (0 selects the largest admissible step)");
    if (!(c.tau_max_ps > 0.0)) invalid("numerics.tau_max_ps", "must be > 0");
    if (c.tau_points < 2) invalid("numerics.tau_points", "must be >= 2");
    if (!(c.propagation_tol > 0.0)) invalid("numerics.propagation_tol", "must be > 0");
    try {
        c.optimization.validate();
    } catch (const Error& e) {
        throw Error(ErrorKind::validation, kModule, std::string("invalid optimizer settings in [numerics]: ") + e.what());
    }
    if (!(c.x_min > 0.0)) invalid("numerics.x_min", "must be > 0");
    if (!(c.x_max > c.x_min)) invalid("numerics.x_max", "must exceed x_min");
    if (c.x_points < 2) invalid("numerics.x_points", "must be >= 2");
    if (!(c.table_extent_xi > c.x_max)) invalid("numerics.table_extent_xi", "must exceed x_max");
    if (c.table_points < 16) invalid("numerics.table_points", "must be >= 16");
    if (c.ring_points < 4) invalid("numerics.ring_points", "must be >= 4");

    for (std::size_t i = 0; i < c.L_list.size(); ++i) {
        if (!(c.L_list[i] > 0.0)) invalid("sweep.L_nm", "L values must be > 0");
        if (i > 0 && !(c.L_list[i] > c.L_list[i - 1])) invalid("sweep.L_nm", "L values must be strictly ascending");
    }
    if (!(c.crossover_margin >= 0.0 && c.crossover_margin < 1.0)) invalid("sweep.crossover_margin", "must lie in [0, 1)");
    if (!(c.residual_threshold_mev > 0.0)) invalid("sweep.residual_threshold_mev", "must be > 0");
    if (c.out_dir.empty()) invalid("output.dir", "must not be empty");
}

} // namespace

std::vector<std::string> known_keys()
{
    std::vector<std::string> out;
    for (const auto& [name, _] : handlers()) out.push_back(name);
    return out;
}

RunConfig parse_config(std::istream& in, const std::string& source, const std::string& base_dir)
{
    const auto entries = keyvalue::parse(in, source, true);
    const auto& h = handlers();
    for (const auto& e : entries) {
        if (e.section.empty()) {
            throw Error(ErrorKind::parse, kModule,
                        source + ":" + std::to_string(e.line) + ": key '" + e.key + "' appears before any [section]");
        }
        if (!h.count(qualified(e))) unknown(e, source);
    }

    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
        return path.lexically_normal().string();
    };

    RunConfig c;
    c.source = source;
    c.material = materials::ws2_defaults();
    for (const auto& e : entries) {
        if (qualified(e) == "material.file") {
            c.material_file = resolve(e.value);
            c.material = materials::load_material_file(*c.material_file);
        }
    }
    for (const auto& e : entries) h.at(qualified(e))(c, e);
    if (c.profile_csv) c.profile_csv = resolve(*c.profile_csv);
    validate(c);
    return c;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, kModule, "cannot open config file '" + path + "'");
    const auto dir = std::filesystem::path(path).parent_path();
    return parse_config(in, path, dir.empty() ? "." : dir.string());
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const
{
    std::vector<std::pair<std::string, std::string>> out;
    auto add = [&out](std::string k, std::string v) { out.emplace_back(std::move(k), std::move(v)); };
    auto opt = [](const std::optional<double>& v) { return v ? num(*v) : std::string("model"); };
    const auto& m = material;
    add("material.file", material_file.value_or("builtin:ws2"));
    add("material.mass_ratio", num(m.mass_ratio));
    add("material.bohr_radius_nm", num(m.bohr_radius_nm));
    add("material.binding_energy_mev", num(m.binding_energy_mev));
    add("material.exciton_energy_mev", num(m.exciton_energy_mev));
    add("material.pcv_mev_ps_per_nm", num(m.pcv_mev_ps_per_nm));
    add("material.alpha", num(m.alpha));
    add("material.eps_eff", num(m.eps_eff));
    add("material.gx0_mev", num(m.linewidth.gx0_mev));
    add("material.gx_slope_mev_per_K", num(m.linewidth.gx_slope_mev_per_K));
    add("material.gxp_slope_mev_per_K", num(m.linewidth.gxp_slope_mev_per_K));
    add("material.gxp_activated_mev", num(m.linewidth.gxp_activated_mev));
    add("material.phonon_energy_mev", num(m.linewidth.phonon_energy_mev));
    add("material.check_product_mev_nm2", check_product_mev_nm2 ? num(*check_product_mev_nm2) : "none");
    add("profile.kind", profile_kind == ProfileKind::gaussian ? "gaussian" : "tabulated");
    add("profile.L_nm", num(gaussian.L_nm));
    add("profile.Lz_nm", num(gaussian.Lz_nm));
    add("profile.rho", num(gaussian.rho));
    add("profile.eta_n", num(gaussian.eta_n));
    add("profile.csv", profile_csv.value_or("none"));
    add("system.gamma_c_mev", num(gamma_c_mev));
    add("system.F_mev", num(F_mev));
    add("system.T_K", num(T_K));
    add("system.wc_mev", frequency_text(wc));
    add("system.wd_mev", frequency_text(wd));
    add("system.gamma_x_mev", opt(gamma_x_mev));
    add("system.gamma_xp_mev", opt(gamma_xp_mev));
    add("system.G0_mev", G0_mev ? num(*G0_mev) : std::string("profile"));
    add("numerics.Nc", std::to_string(fock.Nc));
    add("numerics.Nx", std::to_string(fock.Nx));
    add("numerics.adaptive_truncation", adaptive_truncation ? "true" : "false");
    add("numerics.truncation_tol", num(truncation_tol));
    add("numerics.max_level", std::to_string(max_level));
    add("numerics.t_max_ps", num(t_max_ps));
    add("numerics.dt_ps", num(dt_ps));
    add("numerics.tau_max_ps", num(tau_max_ps));
    add("numerics.tau_points", std::to_string(tau_points));
    add("numerics.propagation_tol", num(propagation_tol));
    add("numerics.box_lo_mev", num(optimization.box_lo_mev));
    add("numerics.box_hi_mev", num(optimization.box_hi_mev));
    add("numerics.grid", std::to_string(optimization.grid));
    add("numerics.starts", std::to_string(optimization.starts));
    add("numerics.g2_rel_tol", num(optimization.rel_tol));
    add("numerics.max_iterations", std::to_string(optimization.max_iterations));
    add("numerics.weak_drive_seeds", optimization.weak_drive_seeds ? "true" : "false");
    add("numerics.spectral_backend", backend == spectral::Backend::numeric ? "numeric" : "analytic");
    add("numerics.x_min", num(x_min));
    add("numerics.x_max", num(x_max));
    add("numerics.x_points", std::to_string(x_points));
    add("numerics.table_extent_xi", num(table_extent_xi));
    add("numerics.table_points", std::to_string(table_points));
    add("numerics.ring_points", std::to_string(ring_points));
    std::string Ls;
    for (std::size_t i = 0; i < L_list.size(); ++i) Ls += (i ? ", " : "") + num(L_list[i]);
    add("sweep.L_nm", Ls.empty() ? "none" : Ls);
    add("sweep.crossover_margin", num(crossover_margin));
    add("sweep.residual_threshold_mev", num(residual_threshold_mev));
    add("output.dir", out_dir);
    return out;
}

} // namespace polblock::config
