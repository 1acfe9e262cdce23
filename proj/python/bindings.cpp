#include <pybind11/pybind11.h>
#include <pybind11/complex.h>
#include <pybind11/stl.h>

#include "polblock/blockade.hpp"
#include "polblock/config.hpp"
#include "polblock/dispatch.hpp"
#include "polblock/errors.hpp"
#include "polblock/field_profile.hpp"
#include "polblock/lindblad.hpp"
#include "polblock/materials.hpp"
#include "polblock/nonmarkovian.hpp"
#include "polblock/special_functions.hpp"
#include "polblock/spectral.hpp"

namespace py = pybind11;
using namespace polblock;

PYBIND11_MODULE(_core, m)
{
    m.doc() = "polblock core: coupling, spectral densities, memory-kernel dynamics and driven two-mode statistics";
    m.attr("__version__") = POLBLOCK_VERSION;

    static py::exception<Error> error(m, "PolblockError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            const std::string msg = std::string(to_string(e.kind())) + " [" + e.module() + "]: " + e.what();
            PyErr_SetString(error.ptr(), msg.c_str());
        }
    });

    py::class_<materials::MaterialParams>(m, "MaterialParams")
        .def(py::init<>())
        .def_readwrite("name", &materials::MaterialParams::name)
        .def_readwrite("mass_ratio", &materials::MaterialParams::mass_ratio)
        .def_readwrite("bohr_radius_nm", &materials::MaterialParams::bohr_radius_nm)
        .def_readwrite("binding_energy_mev", &materials::MaterialParams::binding_energy_mev)
        .def_readwrite("exciton_energy_mev", &materials::MaterialParams::exciton_energy_mev)
        .def_readwrite("pcv_mev_ps_per_nm", &materials::MaterialParams::pcv_mev_ps_per_nm)
        .def_readwrite("alpha", &materials::MaterialParams::alpha)
        .def_readwrite("eps_eff", &materials::MaterialParams::eps_eff)
        .def("interaction_product_mev_nm2", &materials::MaterialParams::interaction_product_mev_nm2)
        .def("dispersion_mev_nm2", &materials::MaterialParams::dispersion_mev_nm2);

    m.def("ws2_defaults", &materials::ws2_defaults);
    m.def("load_material_file", &materials::load_material_file, py::arg("path"));

    py::class_<field::GaussianProfile>(m, "GaussianProfile")
        .def(py::init([](double L, double Lz, double rho, double eta) {
                 field::GaussianProfile p{L, Lz, rho, eta};
                 p.validate();
                 return p;
             }),
             py::arg("L_nm"), py::arg("Lz_nm"), py::arg("rho") = 1.0, py::arg("eta_n") = 1.0)
        .def_readwrite("L_nm", &field::GaussianProfile::L_nm)
        .def_readwrite("Lz_nm", &field::GaussianProfile::Lz_nm)
        .def_readwrite("rho", &field::GaussianProfile::rho)
        .def_readwrite("eta_n", &field::GaussianProfile::eta_n);

    py::class_<field::CouplingSummary>(m, "CouplingSummary")
        .def_readonly("G0_mev", &field::CouplingSummary::G0_mev)
        .def_readonly("Omega0_mev", &field::CouplingSummary::Omega0_mev)
        .def_readonly("Lz_nm", &field::CouplingSummary::Lz_nm)
        .def_readonly("W0p_mev", &field::CouplingSummary::W0p_mev)
        .def_readonly("xi_mev", &field::CouplingSummary::xi_mev)
        .def_readonly("G0_max_mev", &field::CouplingSummary::G0_max_mev);

    m.def("collective_coupling",
          py::overload_cast<const field::GaussianProfile&, const materials::MaterialParams&, double>(
              &field::collective_coupling),
          py::arg("profile"), py::arg("material"), py::arg("wc_mev"));
    m.def("kerr_shift_mev",
          py::overload_cast<const field::GaussianProfile&, const materials::MaterialParams&>(&field::kerr_shift_mev),
          py::arg("profile"), py::arg("material"));
    m.def("cutoff_mev", &field::cutoff_mev, py::arg("profile"), py::arg("material"));
    m.def("expint_ei", &special::expint_ei, py::arg("x"));

    py::class_<spectral::SpectralModel>(m, "SpectralModel")
        .def_static("gaussian", &spectral::SpectralModel::gaussian, py::arg("omega0_mev"), py::arg("xi_mev"),
                    py::arg("G0_mev"))
        .def_static("tabulated", &spectral::SpectralModel::tabulated, py::arg("omega0_mev"), py::arg("dE_mev"),
                    py::arg("J_mev"))
        .def_property_readonly("backend", [](const spectral::SpectralModel& s) { return std::string(spectral::to_string(s.backend())); })
        .def_property_readonly("G0_mev", &spectral::SpectralModel::G0_mev)
        .def_property_readonly("xi_mev", &spectral::SpectralModel::xi_mev)
        .def_property_readonly("Omega0_mev", &spectral::SpectralModel::Omega0_mev)
        .def("j_exciton_mev", &spectral::SpectralModel::j_exciton_mev, py::arg("E_mev"))
        .def("phi_mev", &spectral::SpectralModel::phi_mev, py::arg("E_mev"))
        .def("j_residual_mev", &spectral::SpectralModel::j_residual_mev, py::arg("E_mev"))
        .def("memory_kernel_per_ps2", &spectral::SpectralModel::memory_kernel_per_ps2, py::arg("wc_mev"),
             py::arg("tau_ps"));

    m.def("residual_rate", [](const spectral::SpectralModel& s, double wc) {
        const auto r = spectral::residual_rate(s, wc);
        return py::dict(py::arg("Gamma_res_mev") = r.Gamma_res_mev, py::arg("omega_plus_mev") = r.omega_plus_mev);
    }, py::arg("model"), py::arg("wc_mev"));

    m.def("compare_models",
          [](const spectral::SpectralModel& s, double wc, double gamma_c, double t_max, double step) {
              const auto r = nonmarkov::compare_models({s, wc, gamma_c, t_max, step});
              py::dict d;
              d["t_ps"] = r.t_ps;
              d["exact"] = r.exact;
              d["markov"] = r.markov;
              d["ignored"] = r.ignored;
              d["Gamma_res_mev"] = r.Gamma_res_mev;
              d["distance_exact_markov"] = r.distance_exact_markov;
              d["distance_exact_ignored"] = r.distance_exact_ignored;
              return d;
          },
          py::arg("model"), py::arg("wc_mev"), py::arg("gamma_c_mev"), py::arg("t_max_ps") = 1.0,
          py::arg("step_ps") = 0.0);

    py::class_<lindblad::ReducedSystem>(m, "ReducedSystem")
        .def(py::init<>())
        .def_readwrite("wc_mev", &lindblad::ReducedSystem::wc_mev)
        .def_readwrite("Omega0_mev", &lindblad::ReducedSystem::Omega0_mev)
        .def_readwrite("G0_mev", &lindblad::ReducedSystem::G0_mev)
        .def_readwrite("W0p_mev", &lindblad::ReducedSystem::W0p_mev)
        .def_readwrite("gamma_c_mev", &lindblad::ReducedSystem::gamma_c_mev)
        .def_readwrite("gamma_x_mev", &lindblad::ReducedSystem::gamma_x_mev)
        .def_readwrite("gamma_xp_mev", &lindblad::ReducedSystem::gamma_xp_mev)
        .def_readwrite("Gamma_res_mev", &lindblad::ReducedSystem::Gamma_res_mev)
        .def_readwrite("F_mev", &lindblad::ReducedSystem::F_mev)
        .def_readwrite("wd_mev", &lindblad::ReducedSystem::wd_mev);

    py::class_<lindblad::FockSpace>(m, "FockSpace")
        .def(py::init<int, int>(), py::arg("Nc") = 5, py::arg("Nx") = 5)
        .def_readwrite("Nc", &lindblad::FockSpace::Nc)
        .def_readwrite("Nx", &lindblad::FockSpace::Nx)
        .def("dim", &lindblad::FockSpace::dim);

    py::class_<lindblad::CorrelationResult>(m, "CorrelationResult")
        .def_readonly("n_cav", &lindblad::CorrelationResult::n_cav)
        .def_readonly("n_exc", &lindblad::CorrelationResult::n_exc)
        .def_readonly("g2_0", &lindblad::CorrelationResult::g2_0)
        .def_readonly("residual", &lindblad::CorrelationResult::residual)
        .def_readonly("trace_error", &lindblad::CorrelationResult::trace_error)
        .def_readonly("min_eigenvalue", &lindblad::CorrelationResult::min_eigenvalue)
        .def_readonly("fock", &lindblad::CorrelationResult::fock)
        .def_readonly("tau_ps", &lindblad::CorrelationResult::tau_ps)
        .def_readonly("g2_tau", &lindblad::CorrelationResult::g2_tau);

    m.def("analyze",
          [](const lindblad::ReducedSystem& s, const lindblad::FockSpace& f, std::vector<double> tau, bool adaptive) {
              lindblad::AnalysisOptions o;
              o.tau_ps = std::move(tau);
              o.adaptive_truncation = adaptive;
              return lindblad::analyze(s, f, o);
          },
          py::arg("system"), py::arg("fock") = lindblad::FockSpace{}, py::arg("tau_ps") = std::vector<double>{},
          py::arg("adaptive") = true);

    py::class_<blockade::OptimizationSpec>(m, "OptimizationSpec")
        .def(py::init<>())
        .def_readwrite("box_lo_mev", &blockade::OptimizationSpec::box_lo_mev)
        .def_readwrite("box_hi_mev", &blockade::OptimizationSpec::box_hi_mev)
        .def_readwrite("grid", &blockade::OptimizationSpec::grid)
        .def_readwrite("starts", &blockade::OptimizationSpec::starts)
        .def_readwrite("rel_tol", &blockade::OptimizationSpec::rel_tol)
        .def_readwrite("max_iterations", &blockade::OptimizationSpec::max_iterations)
        .def_readwrite("threads", &blockade::OptimizationSpec::threads);

    py::class_<blockade::SystemTemplate>(m, "SystemTemplate")
        .def(py::init<>())
        .def_readwrite("omega0_mev", &blockade::SystemTemplate::omega0_mev)
        .def_readwrite("Omega0_mev", &blockade::SystemTemplate::Omega0_mev)
        .def_readwrite("G0_mev", &blockade::SystemTemplate::G0_mev)
        .def_readwrite("W0p_mev", &blockade::SystemTemplate::W0p_mev)
        .def_readwrite("gamma_c_mev", &blockade::SystemTemplate::gamma_c_mev)
        .def_readwrite("gamma_x_mev", &blockade::SystemTemplate::gamma_x_mev)
        .def_readwrite("gamma_xp_mev", &blockade::SystemTemplate::gamma_xp_mev)
        .def_readwrite("F_mev", &blockade::SystemTemplate::F_mev)
        .def_readwrite("residual", &blockade::SystemTemplate::residual)
        .def_readwrite("fock", &blockade::SystemTemplate::fock);

    py::class_<blockade::Optimum>(m, "Optimum")
        .def_readonly("g2_min", &blockade::Optimum::g2_min)
        .def_readonly("wc_mev", &blockade::Optimum::wc_mev)
        .def_readonly("wd_mev", &blockade::Optimum::wd_mev)
        .def_readonly("n_cav", &blockade::Optimum::n_cav)
        .def_readonly("coarse_min", &blockade::Optimum::coarse_min)
        .def_readonly("evaluations", &blockade::Optimum::evaluations);

    m.def("optimize_g2", &blockade::optimize_g2, py::arg("system"), py::arg("spec"));

    m.def("run",
          [](const std::string& subcommand, const std::string& config_path, const std::string& out_dir, unsigned threads) {
              const auto cfg = config::load_config(config_path);
              const auto r = cli::dispatch(cfg, subcommand, out_dir.empty() ? cfg.out_dir : out_dir, threads);
              return r.outputs;
          },
          py::arg("subcommand"), py::arg("config"), py::arg("out") = std::string(), py::arg("threads") = 1u);
}
