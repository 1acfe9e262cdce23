#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "polblock/config.hpp"
#include "polblock/dispatch.hpp"
#include "polblock/errors.hpp"

using namespace polblock;
namespace fs = std::filesystem;

namespace {

config::RunConfig parse(const std::string& text)
{
    std::istringstream in(text);
    return config::parse_config(in, "test.cfg", POLBLOCK_TEST_DATA);
}

std::string error_of(const std::string& text)
{
    try {
        parse(text);
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

fs::path scratch(const std::string& name)
{
    const auto p = fs::temp_directory_path() / ("polblock_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

TEST_CASE("defaults and basic parsing")
{
    const auto c = parse("[profile]\nL_nm = 7.5\nLz_nm = 50 # comment\n[system]\ngamma_c_mev = 25\nwc_mev = optimize\n"
                         "wd_mev = optimize\n[sweep]\nL_nm = 5, 6, 7\n");
    CHECK(c.gaussian.L_nm == 7.5);
    CHECK(c.gaussian.Lz_nm == 50.0);
    CHECK(c.gamma_c_mev == 25.0);
    CHECK(c.wc.kind == config::Frequency::Kind::optimize);
    CHECK(c.L_list == std::vector<double>{5.0, 6.0, 7.0});
    CHECK(c.fock.Nc == 5);
    CHECK(c.material.interaction_product_mev_nm2() == doctest::Approx(2040.0));
    CHECK_FALSE(c.echo().empty());
}

TEST_CASE("unknown keys get a suggestion")
{
    const auto msg = error_of("[system]\ngamma_cavity = 5\n");
    CHECK(msg.find("gamma_cavity") != std::string::npos);
    CHECK(msg.find("gamma_c_mev") != std::string::npos);
    const auto sec = error_of("[sytem]\ngamma_c_mev = 5\n");
    CHECK(sec.find("system") != std::string::npos);
    try {
        parse("[system]\ngamma_cavity = 5\n");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::parse);
    }
}

TEST_CASE("validation errors name the key")
{
    const auto msg = error_of("[profile]\nL_nm = -3\n");
    CHECK(msg.find("L_nm") != std::string::npos);
    CHECK(error_of("[numerics]\nNc = 1\n").find("Nc") != std::string::npos);
    CHECK(error_of("[system]\nT_K = -4\n").find("T_K") != std::string::npos);
    CHECK(error_of("[system]\nwc_mev = optimize\n").find("wd_mev") != std::string::npos);
    CHECK(error_of("[numerics]\nadaptive_truncation = maybe\n").find("adaptive_truncation") != std::string::npos);
    CHECK(error_of("[profile]\nL_nm = 4\nL_nm = 5\n").find("L_nm") != std::string::npos);
    CHECK(error_of("gamma_c_mev = 5\n").size() > 0);
}

TEST_CASE("material file reference")
{
    const auto c = parse("[material]\nfile = ws2.mat\ncheck_product_mev_nm2 = 2040\n");
    CHECK(c.material.binding_energy_mev == doctest::Approx(321.79828).epsilon(1e-7));
    CHECK(error_of("[material]\nfile = missing.mat\n").find("missing.mat") != std::string::npos);
    CHECK(error_of("[material]\nfile = ws2.mat\ncheck_product_mev_nm2 = 2500\n").size() > 0);
}

TEST_CASE("known keys")
{
    const auto keys = config::known_keys();
    CHECK(std::find(keys.begin(), keys.end(), "system.gamma_c_mev") != keys.end());
    CHECK(std::find(keys.begin(), keys.end(), "sweep.L_nm") != keys.end());
}

TEST_CASE("number formatting and error JSON")
{
    CHECK(cli::format_number(0.1) == "0.1");
    CHECK(cli::format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(cli::format_number(2.5e-20) == "2.5e-20");
    const auto j = nlohmann::json::parse(cli::error_json(Error(ErrorKind::validation, "cli-config", "bad 'L'")));
    CHECK(j["error"]["kind"] == "validation");
    CHECK(j["error"]["module"] == "cli-config");
    CHECK(j["error"]["message"] == "bad 'L'");
}

TEST_CASE("coupling and spectral subcommands write their files")
{
    const auto c = parse("[profile]\nL_nm = 10\nLz_nm = 50\nrho = 0.75\n[numerics]\nx_points = 11\n");
    const auto dir = scratch("coupling");
    const auto m = cli::dispatch(c, "coupling", dir.string());
    CHECK(fs::exists(dir / "coupling.json"));
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(m.outputs.front() == "coupling.json");
    const auto j = nlohmann::json::parse(slurp(dir / "coupling.json"));
    CHECK(j["W0p_mev"].get<double>() == doctest::Approx(3.24676083));
    const auto man = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(man["subcommand"] == "coupling");

    const auto sdir = scratch("spectral");
    cli::dispatch(c, "spectral", sdir.string());
    std::ifstream in(sdir / "spectral.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "x,J_over_J0,Jres_over_xi");
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == 11);
    CHECK_THROWS_AS(cli::dispatch(c, "bogus", sdir.string()), Error);
}

TEST_CASE("g2ss subcommand")
{
    const auto c = parse("[profile]\nL_nm = 7\nLz_nm = 50\nrho = 0.75\n[system]\ngamma_c_mev = 25\nG0_mev = 57.5\n"
                         "wc_mev = 1860\nwd_mev = 2020\n[numerics]\nNc = 4\nNx = 4\n");
    const auto dir = scratch("g2ss");
    cli::dispatch(c, "g2ss", dir.string());
    const auto j = nlohmann::json::parse(slurp(dir / "g2ss.json"));
    for (const char* k : {"n_cav", "n_exc", "g2_0", "residual", "Nc", "Nx"}) CHECK(j.contains(k));
    CHECK(j["g2_0"].get<double>() < 1.0);
}
