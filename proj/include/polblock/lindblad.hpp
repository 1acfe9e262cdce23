#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

// Driven dissipative two-mode model (resonator + exciton reaction
// coordinate) on a truncated Fock space.
//
// In the frame rotating at the drive frequency:
//   H = Dc a^+a + Dx B^+B + G0 (a^+B + B^+a) + W0' B^+B^+BB + F (a + a^+)
// with dissipators D[a] at 2 gamma_c, D[B] at 2 gamma_x + Gamma_res and
// D[B^+B] at 2 gamma_x'. The factor 2 makes gamma_c the amplitude decay rate
// of the memory-kernel equation and gamma_x' the exciton coherence decay.
namespace polblock::lindblad {

using cplx = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<cplx>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealSparse = Eigen::SparseMatrix<double>;
using RealVector = Eigen::VectorXd;

enum class Mode { cavity, exciton };

struct ReducedSystem {
    double wc_mev{0.0};
    double Omega0_mev{0.0};
    double G0_mev{0.0};
    double W0p_mev{0.0};
    double gamma_c_mev{0.0};
    double gamma_x_mev{0.0};
    double gamma_xp_mev{0.0};
    double Gamma_res_mev{0.0};
    double F_mev{0.0};
    double wd_mev{0.0};
    Mode drive_target{Mode::cavity};

    void validate() const;
};

struct FockSpace {
    int Nc{5};  // highest retained cavity Fock level
    int Nx{5};  // highest retained exciton Fock level

    std::size_t dim() const noexcept { return static_cast<std::size_t>((Nc + 1) * (Nx + 1)); }
    void validate() const;
    friend bool operator==(const FockSpace&, const FockSpace&) = default;
};

inline constexpr std::size_t kDefaultSuperoperatorCap = 1u << 18;

// Annihilation operators on the composite space, index = n_c (Nx + 1) + n_x.
SparseMatrix annihilation(const FockSpace& fock, Mode mode);

// The superoperator terms for one truncation. assemble() combines them with
// the coefficients of a ReducedSystem; every assembled matrix has the same
// sparsity pattern, so factorization symbolic analysis can be reused.
class LiouvillianTerms {
public:
    explicit LiouvillianTerms(FockSpace fock, std::size_t max_superdim = kDefaultSuperoperatorCap);

    const FockSpace& fock() const noexcept { return fock_; }
    SparseMatrix assemble(const ReducedSystem& system) const;

private:
    FockSpace fock_;
    SparseMatrix n_cav_, n_exc_, hop_, kerr_, drive_cav_, drive_exc_;
    SparseMatrix loss_cav_, loss_exc_, dephase_exc_;
};

class Liouvillian {
public:
    Liouvillian(SparseMatrix matrix, FockSpace fock) : matrix_(std::move(matrix)), fock_(fock) {}

    const SparseMatrix& matrix() const noexcept { return matrix_; }
    const FockSpace& fock() const noexcept { return fock_; }
    std::size_t dim() const noexcept { return fock_.dim(); }

    // d vec(rho)/dt = L vec(rho), column-major vectorization, rates in 1/ps
    Vector apply(const Vector& vec_rho) const { return matrix_ * vec_rho; }

private:
    SparseMatrix matrix_;
    FockSpace fock_;
};

Liouvillian build_liouvillian(const ReducedSystem& system, FockSpace fock,
                              std::size_t max_superdim = kDefaultSuperoperatorCap);

Vector vectorize(const Matrix& rho);
Matrix unvectorize(const Vector& v, std::size_t dim);

struct SteadyState {
    Matrix rho;
    double residual;          // ||L vec(rho)||_2
    double trace_error;       // |Tr rho - 1|
    double hermiticity_error; // max |rho - rho^+|
    double min_eigenvalue;
    bool iterative;
};

// Works on the real parametrization of Hermitian rho. Direct bordered solve
// (trace condition replaces one equation) for composite dimension <= 64,
// shift-invert inverse iteration above. Both use iterative refinement with
// extended-precision residuals so the small two-photon populations of a
// weakly driven system are resolved.
class SteadyStateSolver {
public:
    SteadyState solve(const Liouvillian& liouvillian);

private:
    Eigen::SparseLU<RealSparse> lu_;
    std::vector<int> outer_, inner_;
    bool analyzed_{false};
    bool iterative_{false};
};

SteadyState steady_state(const Liouvillian& liouvillian);

double expectation(const Matrix& rho, const SparseMatrix& op);
double occupation(const Matrix& rho, const FockSpace& fock, Mode mode);
// population of the highest retained level of a mode
double top_level_population(const Matrix& rho, const FockSpace& fock, Mode mode);

// Tr[a^+a^+aa rho] / Tr[a^+a rho]^2
double g2_zero(const Matrix& rho, const FockSpace& fock, Mode mode = Mode::cavity);

// e^{L t} v sampled at the requested times (ascending, >= 0), adaptive
// Dormand-Prince integration with relative tolerance tol.
std::vector<Vector> propagate(const Liouvillian& liouvillian, const Vector& v0, std::span<const double> times_ps,
                              double tol = 1e-8);

// Quantum regression: sigma(0) = a rho a^+, g2(tau) = Tr[a^+a sigma(tau)] / n^2.
std::vector<double> g2_tau(const SteadyState& state, const Liouvillian& liouvillian,
                           std::span<const double> tau_ps, double tol = 1e-8, Mode mode = Mode::cavity);

struct AnalysisOptions {
    bool adaptive_truncation{true};
    double truncation_tolerance{1e-6};
    int max_level{16};
    std::size_t max_superdim{kDefaultSuperoperatorCap};
    std::vector<double> tau_ps{};  // empty: no g2(tau)
    double propagation_tolerance{1e-8};
    Mode mode{Mode::cavity};
};

struct CorrelationResult {
    double n_cav;
    double n_exc;
    double g2_0;
    double residual;
    double trace_error;
    double min_eigenvalue;
    FockSpace fock;
    double top_population_cavity;
    double top_population_exciton;
    std::vector<double> tau_ps;
    std::vector<double> g2_tau;
};

CorrelationResult analyze(const ReducedSystem& system, FockSpace fock, const AnalysisOptions& options = {});

} // namespace polblock::lindblad
