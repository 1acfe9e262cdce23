#include "polblock/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "polblock/errors.hpp"
#include "polblock/units.hpp"

namespace polblock::lindblad {

namespace {

const std::string kModule = "lindblad";

constexpr std::size_t kDirectLimit = 64;
constexpr int kRefinementSteps = 3;
constexpr double kUndefinedOccupation = 1e-12;

SparseMatrix identity(std::size_t n)
{
    SparseMatrix I(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    I.setIdentity();
    return I;
}

SparseMatrix lowering(int N)
{
    std::vector<Eigen::Triplet<cplx>> t;
    for (int n = 1; n <= N; ++n) t.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
    SparseMatrix a(N + 1, N + 1);
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

// -i [h, .]
SparseMatrix commutator(const SparseMatrix& h)
{
    const SparseMatrix I = identity(static_cast<std::size_t>(h.rows()));
    SparseMatrix ht = h.transpose();
    SparseMatrix left = Eigen::kroneckerProduct(I, h);
    SparseMatrix right = Eigen::kroneckerProduct(ht, I);
    return cplx(0.0, -1.0) * (left - right);
}

// O . O^+ - {O^+O, .}/2
SparseMatrix dissipator(const SparseMatrix& o)
{
    const SparseMatrix I = identity(static_cast<std::size_t>(o.rows()));
    SparseMatrix oc = o.conjugate();
    SparseMatrix od = o.adjoint();
    SparseMatrix oo = od * o;
    SparseMatrix oot = oo.transpose();
    SparseMatrix jump = Eigen::kroneckerProduct(oc, o);
    SparseMatrix left = Eigen::kroneckerProduct(I, oo);
    SparseMatrix right = Eigen::kroneckerProduct(oot, I);
    return jump - 0.5 * left - 0.5 * right;
}

// b - A x with the products accumulated in long double
RealVector residual_extended(const RealSparse& A, const RealVector& x, const RealVector& b)
{
    std::vector<long double> r(static_cast<std::size_t>(A.rows()));
    for (Eigen::Index i = 0; i < b.size(); ++i) r[i] = b[i];
    for (Eigen::Index k = 0; k < A.outerSize(); ++k) {
        const long double xk = x[k];
        for (RealSparse::InnerIterator it(A, k); it; ++it) r[it.row()] -= static_cast<long double>(it.value()) * xk;
    }
    RealVector out(A.rows());
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = static_cast<double>(r[i]);
    return out;
}

// A Hermitian rho is parametrized by D^2 reals stored at its vec slots:
// slot(i, i) = rho_ii, slot(i, j) = Re rho_ij, slot(j, i) = Im rho_ij for
// i < j. L maps Hermitian to Hermitian, so it acts as a real matrix on these.
RealSparse hermitian_form(const SparseMatrix& L, std::size_t d)
{
    const auto D = static_cast<Eigen::Index>(d);
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(4 * L.nonZeros()));
    auto emit = [&](Eigen::Index col, Eigen::Index q, cplx v) {
        const Eigen::Index r = q % D, c = q / D;
        if (r < c) {
            t.emplace_back(q, col, v.real());
            t.emplace_back(c + r * D, col, v.imag());
        } else if (r == c) {
            t.emplace_back(q, col, v.real());
        }
    };
    const cplx I(0.0, 1.0);
    for (Eigen::Index j = 0; j < D; ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
            const Eigen::Index p = i + j * D;
            if (i == j) {
                for (SparseMatrix::InnerIterator it(L, p); it; ++it) emit(p, it.row(), it.value());
                continue;
            }
            const Eigen::Index pt = j + i * D;
            for (SparseMatrix::InnerIterator it(L, p); it; ++it) {
                emit(p, it.row(), it.value());
                emit(pt, it.row(), I * it.value());
            }
            for (SparseMatrix::InnerIterator it(L, pt); it; ++it) {
                emit(p, it.row(), it.value());
                emit(pt, it.row(), -I * it.value());
            }
        }
    }
    RealSparse R(D * D, D * D);
    R.setFromTriplets(t.begin(), t.end());
    R.makeCompressed();
    return R;
}

Matrix from_hermitian_coordinates(const RealVector& x, std::size_t d)
{
    const auto D = static_cast<Eigen::Index>(d);
    Matrix rho(D, D);
    for (Eigen::Index j = 0; j < D; ++j) {
        rho(j, j) = x[j + j * D];
        for (Eigen::Index i = 0; i < j; ++i) {
            rho(i, j) = cplx(x[i + j * D], x[j + i * D]);
            rho(j, i) = std::conj(rho(i, j));
        }
    }
    return rho;
}

double level(const FockSpace& fock, std::size_t index, Mode mode)
{
    const auto nx1 = static_cast<std::size_t>(fock.Nx + 1);
    return static_cast<double>(mode == Mode::cavity ? index / nx1 : index % nx1);
}

// sum_i f(n_i) rho_ii
template <class F>
double diagonal_moment(const Matrix& rho, const FockSpace& fock, Mode mode, F f)
{
    double s = 0.0;
    for (Eigen::Index i = 0; i < rho.rows(); ++i) s += f(level(fock, static_cast<std::size_t>(i), mode)) * rho(i, i).real();
    return s;
}

} // namespace

void ReducedSystem::validate() const
{
    auto need = [](bool ok, const char* what) {
        if (!ok) throw Error(ErrorKind::validation, kModule, what);
    };
    need(std::isfinite(wc_mev) && std::isfinite(Omega0_mev) && std::isfinite(wd_mev), "frequencies must be finite");
    need(G0_mev >= 0.0 && std::isfinite(G0_mev), "G0 must be finite and >= 0");
    need(W0p_mev >= 0.0 && std::isfinite(W0p_mev), "W0' must be finite and >= 0");
    need(gamma_c_mev >= 0.0, "gamma_c must be >= 0");
    need(gamma_x_mev >= 0.0, "gamma_x must be >= 0");
    need(gamma_xp_mev >= 0.0, "gamma_x' must be >= 0");
    need(Gamma_res_mev >= 0.0, "Gamma_res must be >= 0");
    need(F_mev >= 0.0 && std::isfinite(F_mev), "F must be finite and >= 0");
}

void FockSpace::validate() const
{
    if (Nc < 2 || Nx < 2) throw Error(ErrorKind::validation, kModule, "Fock truncation must keep at least two quanta");
}

SparseMatrix annihilation(const FockSpace& fock, Mode mode)
{
    if (mode == Mode::cavity) {
        SparseMatrix a = lowering(fock.Nc);
        SparseMatrix I = identity(static_cast<std::size_t>(fock.Nx + 1));
        return Eigen::kroneckerProduct(a, I);
    }
    SparseMatrix b = lowering(fock.Nx);
    SparseMatrix I = identity(static_cast<std::size_t>(fock.Nc + 1));
    return Eigen::kroneckerProduct(I, b);
}

LiouvillianTerms::LiouvillianTerms(FockSpace fock, std::size_t max_superdim) : fock_(fock)
{
    fock.validate();
    const std::size_t d = fock.dim();
    if (d * d > max_superdim) {
        std::ostringstream os;
        os << "Liouvillian dimension " << d * d << " exceeds the configured cap " << max_superdim;
        throw Error(ErrorKind::resource, kModule, os.str());
    }
    const SparseMatrix a = annihilation(fock, Mode::cavity);
    const SparseMatrix b = annihilation(fock, Mode::exciton);
    const SparseMatrix ad = a.adjoint();
    const SparseMatrix bd = b.adjoint();
    const SparseMatrix nb = bd * b;
    n_cav_ = commutator(ad * a);
    n_exc_ = commutator(nb);
    hop_ = commutator(SparseMatrix(ad * b + bd * a));
    kerr_ = commutator(SparseMatrix(bd * bd * b * b));
    drive_cav_ = commutator(SparseMatrix(a + ad));
    drive_exc_ = commutator(SparseMatrix(b + bd));
    loss_cav_ = dissipator(a);
    loss_exc_ = dissipator(b);
    dephase_exc_ = dissipator(nb);
}

SparseMatrix LiouvillianTerms::assemble(const ReducedSystem& s) const
{
    s.validate();
    const double hbar = units::hbar_mev_ps;
    const double f = s.F_mev / hbar;
    SparseMatrix L = ((s.wc_mev - s.wd_mev) / hbar) * n_cav_ + ((s.Omega0_mev - s.wd_mev) / hbar) * n_exc_;
    L += (s.G0_mev / hbar) * hop_;
    L += (s.W0p_mev / hbar) * kerr_;
    L += (s.drive_target == Mode::cavity ? f : 0.0) * drive_cav_;
    L += (s.drive_target == Mode::exciton ? f : 0.0) * drive_exc_;
    L += (2.0 * s.gamma_c_mev / hbar) * loss_cav_;
    L += ((2.0 * s.gamma_x_mev + s.Gamma_res_mev) / hbar) * loss_exc_;
    L += (2.0 * s.gamma_xp_mev / hbar) * dephase_exc_;
    L.makeCompressed();
    return L;
}

Liouvillian build_liouvillian(const ReducedSystem& system, FockSpace fock, std::size_t max_superdim)
{
    return Liouvillian(LiouvillianTerms(fock, max_superdim).assemble(system), fock);
}

Vector vectorize(const Matrix& rho)
{
    return Eigen::Map<const Vector>(rho.data(), rho.size());
}

Matrix unvectorize(const Vector& v, std::size_t dim)
{
    const auto d = static_cast<Eigen::Index>(dim);
    if (v.size() != d * d) throw Error(ErrorKind::domain, kModule, "vector length does not match dimension");
    return Eigen::Map<const Matrix>(v.data(), d, d);
}

SteadyState SteadyStateSolver::solve(const Liouvillian& liouvillian)
{
    const SparseMatrix& L = liouvillian.matrix();
    const std::size_t d = liouvillian.dim();
    const auto n = static_cast<Eigen::Index>(d * d);
    const bool iterative = d > kDirectLimit;

    const RealSparse R = hermitian_form(L, d);
    double scale = 0.0;
    for (Eigen::Index k = 0; k < R.outerSize(); ++k) {
        for (RealSparse::InnerIterator it(R, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
    }
    if (!(scale > 0.0)) throw Error(ErrorKind::singularity, kModule, "Liouvillian vanishes");
    const double sigma = -1e-6 * scale;

    RealSparse A(n, n);
    RealVector b = RealVector::Zero(n);
    {
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(static_cast<std::size_t>(R.nonZeros()) + static_cast<std::size_t>(n));
        for (Eigen::Index k = 0; k < R.outerSize(); ++k) {
            for (RealSparse::InnerIterator it(R, k); it; ++it) {
                if (!iterative && it.row() == 0) continue;
                t.emplace_back(it.row(), it.col(), it.value());
            }
        }
        if (iterative) {
            for (Eigen::Index i = 0; i < n; ++i) t.emplace_back(i, i, -sigma);
        } else {
            for (std::size_t i = 0; i < d; ++i) t.emplace_back(0, static_cast<Eigen::Index>(i * (d + 1)), 1.0);
            b[0] = 1.0;
        }
        A.setFromTriplets(t.begin(), t.end());
        A.makeCompressed();
    }

    const bool same_pattern = analyzed_ && iterative_ == iterative &&
                              static_cast<Eigen::Index>(outer_.size()) == n + 1 &&
                              std::equal(outer_.begin(), outer_.end(), A.outerIndexPtr()) &&
                              static_cast<Eigen::Index>(inner_.size()) == A.nonZeros() &&
                              std::equal(inner_.begin(), inner_.end(), A.innerIndexPtr());
    if (!same_pattern) {
        lu_.analyzePattern(A);
        outer_.assign(A.outerIndexPtr(), A.outerIndexPtr() + n + 1);
        inner_.assign(A.innerIndexPtr(), A.innerIndexPtr() + A.nonZeros());
        analyzed_ = true;
        iterative_ = iterative;
    }
    lu_.factorize(A);
    if (lu_.info() != Eigen::Success) {
        throw Error(ErrorKind::singularity, kModule,
                    "steady-state system is singular (no unique steady state; check that some decay is present)");
    }

    RealVector x;
    if (!iterative) {
        x = lu_.solve(b);
        for (int r = 0; r < kRefinementSteps; ++r) x += lu_.solve(residual_extended(A, x, b));
    } else {
        // residual-correction form of shift-invert inverse iteration:
        // x <- x - (R - sigma)^{-1} R x keeps the null vector and damps the rest
        x = RealVector::Zero(n);
        x[0] = 1.0;
        const RealVector zero = RealVector::Zero(n);
        for (int it = 0; it < 60; ++it) {
            const RealVector Rx = -residual_extended(R, x, zero);
            const RealVector dx = lu_.solve(Rx);
            x -= dx;
            double tr = 0.0;
            for (std::size_t i = 0; i < d; ++i) tr += x[static_cast<Eigen::Index>(i * (d + 1))];
            x /= tr;
            if (dx.norm() < 1e-15 * x.norm()) break;
        }
    }

    Matrix rho = from_hermitian_coordinates(x, d);
    const cplx tr = rho.trace();
    SteadyState out;
    out.trace_error = std::abs(tr - 1.0);
    out.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    rho /= tr.real();
    out.rho = rho;
    out.residual = (L * vectorize(rho)).norm();
    out.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Matrix>(rho, Eigen::EigenvaluesOnly).eigenvalues()(0);
    out.iterative = iterative;
    return out;
}

SteadyState steady_state(const Liouvillian& liouvillian)
{
    SteadyStateSolver solver;
    return solver.solve(liouvillian);
}

double expectation(const Matrix& rho, const SparseMatrix& op)
{
    return (op * rho).trace().real();
}

double occupation(const Matrix& rho, const FockSpace& fock, Mode mode)
{
    return diagonal_moment(rho, fock, mode, [](double n) { return n; });
}

double top_level_population(const Matrix& rho, const FockSpace& fock, Mode mode)
{
    const double top = mode == Mode::cavity ? fock.Nc : fock.Nx;
    return diagonal_moment(rho, fock, mode, [top](double n) { return n == top ? 1.0 : 0.0; });
}

double g2_zero(const Matrix& rho, const FockSpace& fock, Mode mode)
{
    const double n = occupation(rho, fock, mode);
    if (!(n > kUndefinedOccupation)) {
        std::ostringstream os;
        os << "g2 undefined: occupation " << n << " is below " << kUndefinedOccupation;
        throw Error(ErrorKind::undefined_correlation, kModule, os.str());
    }
    return diagonal_moment(rho, fock, mode, [](double k) { return k * (k - 1.0); }) / (n * n);
}

std::vector<Vector> propagate(const Liouvillian& liouvillian, const Vector& v0, std::span<const double> times_ps,
                              double tol)
{
    namespace ode = boost::numeric::odeint;
    using State = std::vector<cplx>;
    if (times_ps.empty()) return {};
    for (std::size_t i = 0; i < times_ps.size(); ++i) {
        if (!(times_ps[i] >= 0.0) || (i > 0 && times_ps[i] < times_ps[i - 1])) {
            throw Error(ErrorKind::domain, kModule, "propagation times must be ascending and >= 0");
        }
    }
    const SparseMatrix& L = liouvillian.matrix();
    const auto n = v0.size();
    auto rhs = [&L, n](const State& x, State& dxdt, double) {
        Eigen::Map<Vector>(dxdt.data(), n) = L * Eigen::Map<const Vector>(x.data(), n);
    };

    std::vector<Vector> out;
    out.reserve(times_ps.size());
    State x(v0.data(), v0.data() + n);
    const double abs_tol = tol * std::max(v0.cwiseAbs().maxCoeff(), 1e-300);

    // odeint needs a start time preceding the first sample
    std::vector<double> t(times_ps.begin(), times_ps.end());
    std::size_t first = 0;
    while (first < t.size() && t[first] == 0.0) {
        out.push_back(v0);
        ++first;
    }
    if (first == t.size()) return out;
    std::vector<double> grid{0.0};
    grid.insert(grid.end(), t.begin() + static_cast<std::ptrdiff_t>(first), t.end());

    double scale = 0.0;
    for (Eigen::Index k = 0; k < L.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(L, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
    }
    const double dt0 = scale > 0.0 ? 0.1 / scale : grid.back();

    std::size_t seen = 0;
    auto stepper = ode::make_dense_output(abs_tol, tol, ode::runge_kutta_dopri5<State>());
    ode::integrate_times(stepper, rhs, x, grid.begin(), grid.end(), dt0, [&](const State& s, double) {
        if (seen++ == 0) return;  // the t = 0 anchor
        out.push_back(Eigen::Map<const Vector>(s.data(), n));
    });
    for (const auto& v : out) {
        if (!v.allFinite()) throw Error(ErrorKind::numerical_instability, kModule, "propagation diverged");
    }
    return out;
}

std::vector<double> g2_tau(const SteadyState& state, const Liouvillian& liouvillian, std::span<const double> tau_ps,
                           double tol, Mode mode)
{
    const FockSpace& fock = liouvillian.fock();
    const double n = occupation(state.rho, fock, mode);
    if (!(n > kUndefinedOccupation)) {
        throw Error(ErrorKind::undefined_correlation, kModule, "g2(tau) undefined: occupation vanishes");
    }
    const Matrix a = Matrix(annihilation(fock, mode));
    const Matrix sigma = a * state.rho * a.adjoint() / n;
    const auto traj = propagate(liouvillian, vectorize(sigma), tau_ps, tol);
    std::vector<double> g2(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        g2[i] = occupation(unvectorize(traj[i], fock.dim()), fock, mode) / n;
    }
    return g2;
}

CorrelationResult analyze(const ReducedSystem& system, FockSpace fock, const AnalysisOptions& options)
{
    system.validate();
    if (system.gamma_c_mev == 0.0 && system.gamma_x_mev == 0.0 && system.Gamma_res_mev == 0.0) {
        throw Error(ErrorKind::singularity, kModule, "no population decay: the steady state is not unique");
    }
    SteadyStateSolver solver;
    for (;;) {
        const Liouvillian L = build_liouvillian(system, fock, options.max_superdim);
        const SteadyState ss = solver.solve(L);
        const double top_c = top_level_population(ss.rho, fock, Mode::cavity);
        const double top_x = top_level_population(ss.rho, fock, Mode::exciton);
        const bool grow_c = top_c >= options.truncation_tolerance;
        const bool grow_x = top_x >= options.truncation_tolerance;
        if (options.adaptive_truncation && (grow_c || grow_x)) {
            FockSpace next = fock;
            if (grow_c) next.Nc = std::min(fock.Nc + 2, options.max_level);
            if (grow_x) next.Nx = std::min(fock.Nx + 2, options.max_level);
            if (next == fock) {
                std::ostringstream os;
                os << "Fock truncation not converged at level " << options.max_level << " (top populations " << top_c
                   << ", " << top_x << ")";
                throw Error(ErrorKind::resource, kModule, os.str());
            }
            fock = next;
            continue;
        }
        CorrelationResult r;
        r.n_cav = occupation(ss.rho, fock, Mode::cavity);
        r.n_exc = occupation(ss.rho, fock, Mode::exciton);
        r.g2_0 = g2_zero(ss.rho, fock, options.mode);
        r.residual = ss.residual;
        r.trace_error = ss.trace_error;
        r.min_eigenvalue = ss.min_eigenvalue;
        r.fock = fock;
        r.top_population_cavity = top_c;
        r.top_population_exciton = top_x;
        if (!options.tau_ps.empty()) {
            r.tau_ps = options.tau_ps;
            r.g2_tau = g2_tau(ss, L, options.tau_ps, options.propagation_tolerance, options.mode);
        }
        return r;
    }
}

} // namespace polblock::lindblad
