#include "jcsim/master_equation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/KroneckerProduct>

#include "jcsim/error.hpp"

namespace jcsim {

DensityMatrix::DensityMatrix(TruncatedSpace s, Dense m) : space(s), entries(std::move(m))
{
    if (entries.rows() != space.dim() || entries.cols() != space.dim())
        throw Error(ErrorKind::DimensionMismatch, "density matrix size does not match space");
}

DensityMatrix DensityMatrix::basis_state(const TruncatedSpace &space, int atom, int photon)
{
    Dense m = Dense::Zero(space.dim(), space.dim());
    const int i = space.index(atom, photon);
    m(i, i) = 1.0;
    return DensityMatrix(space, std::move(m));
}

DensityMatrix DensityMatrix::from_ket(const TruncatedSpace &space, const Ket &psi)
{
    const Ket n = psi / psi.norm();
    return DensityMatrix(space, n * n.adjoint());
}

double tail_mass(const DensityMatrix &rho)
{
    const TruncatedSpace &sp = rho.space;
    double mass = 0.0;
    for (int s = 0; s < 2; ++s)
        for (int n = std::max(0, sp.n_max - 1); n <= sp.n_max; ++n) {
            const int i = sp.index(s, n);
            mass += rho.entries(i, i).real();
        }
    return mass;
}

DensityDiagnostics diagnose(const DensityMatrix &rho)
{
    DensityDiagnostics d;
    d.trace_error = std::abs(rho.entries.trace() - Complex(1.0));
    d.hermitian_error = (rho.entries - rho.entries.adjoint()).cwiseAbs().maxCoeff();
    const Dense herm = 0.5 * (rho.entries + rho.entries.adjoint());
    Eigen::SelfAdjointEigenSolver<Dense> es(herm, Eigen::EigenvaluesOnly);
    d.min_eigenvalue = es.eigenvalues().minCoeff();
    d.tail_mass = tail_mass(rho);
    return d;
}

void check_invariants(const DensityMatrix &rho, double tail_tolerance)
{
    const DensityDiagnostics d = diagnose(rho);
    if (d.trace_error > 1e-9)
        throw Error(ErrorKind::InvalidParams, "density matrix trace deviates from 1");
    if (d.hermitian_error > 1e-9)
        throw Error(ErrorKind::InvalidParams, "density matrix is not Hermitian");
    if (d.min_eigenvalue < -1e-7)
        throw Error(ErrorKind::InvalidParams, "density matrix has a negative eigenvalue");
    if (d.tail_mass >= tail_tolerance)
        throw Error(ErrorKind::TruncationInsufficient,
                    "tail mass " + std::to_string(d.tail_mass) + " at n_max="
                        + std::to_string(rho.space.n_max));
}

Eigen::VectorXcd vectorize(const Dense &m)
{
    return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

Dense unvectorize(const Eigen::VectorXcd &v, int dim)
{
    return Eigen::Map<const Dense>(v.data(), dim, dim);
}

SpMat left_multiplier(const SpMat &a)
{
    SpMat id(a.rows(), a.cols());
    id.setIdentity();
    return Eigen::kroneckerProduct(id, a);
}

SpMat right_multiplier(const SpMat &b)
{
    SpMat id(b.rows(), b.cols());
    id.setIdentity();
    return Eigen::kroneckerProduct(SpMat(b.transpose()), id);
}

SpMat dissipator(const SpMat &c)
{
    const SpMat cd = c.adjoint();
    const SpMat cdc = cd * c;
    SpMat jump = Eigen::kroneckerProduct(SpMat(c.conjugate()), c);
    return jump - 0.5 * (left_multiplier(cdc) + right_multiplier(cdc));
}

Liouvillian build_liouvillian(const SystemParams &p)
{
    validate(p);
    const TruncatedSpace space(p.n_max);
    const OperatorMatrix h = hamiltonian(p, space);
    SpMat l = -kI * (left_multiplier(h.entries) - right_multiplier(h.entries));
    // Photon loss: kappa (2 a rho a^dag - ...) = 2 kappa D[a].
    l += Complex(2.0 * p.kappa) * dissipator(annihilation(space).entries);
    if (p.gamma > 0.0)
        l += Complex(p.gamma) * dissipator(atom_operators(space).sigma_minus.entries);
    l.prune(Complex(0.0));
    l.makeCompressed();
    return Liouvillian{space, std::move(l), p.kappa, p.gamma, p.g == 0.0 && p.gamma == 0.0};
}

double trace_functional_residual(const Liouvillian &l)
{
    const int dim = l.space.dim();
    Eigen::RowVectorXcd tr = Eigen::RowVectorXcd::Zero(dim * dim);
    for (int i = 0; i < dim; ++i)
        tr(i + i * dim) = 1.0;
    const Eigen::RowVectorXcd sums = tr * l.superop;
    return sums.cwiseAbs().maxCoeff();
}

double steady_state_residual(const Liouvillian &l, const DensityMatrix &rho)
{
    const Eigen::VectorXcd v = vectorize(rho.entries);
    return (l.superop * v).norm() / v.norm();
}

namespace {

// Replaces the equation for rho(0,0) by tr(rho) = 1.
SpMat trace_constrained(const SpMat &superop, int dim)
{
    std::vector<Triplet> t;
    t.reserve(superop.nonZeros() + dim);
    for (int k = 0; k < superop.outerSize(); ++k)
        for (SpMat::InnerIterator it(superop, k); it; ++it)
            if (it.row() != 0)
                t.emplace_back(it.row(), it.col(), it.value());
    for (int i = 0; i < dim; ++i)
        t.emplace_back(0, i + i * dim, 1.0);
    SpMat a(superop.rows(), superop.cols());
    a.setFromTriplets(t.begin(), t.end());
    a.makeCompressed();
    return a;
}

Eigen::VectorXcd solve_direct(const SpMat &superop, int dim)
{
    const SpMat a = trace_constrained(superop, dim);
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(a.rows());
    b(0) = 1.0;
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success)
        throw Error(ErrorKind::SolverSingular, "sparse LU failed: " + lu.lastErrorMessage());
    Eigen::VectorXcd x = lu.solve(b);
    // One step of iterative refinement.
    const Eigen::VectorXcd r = b - a * x;
    x += lu.solve(r);
    if (!x.allFinite())
        throw Error(ErrorKind::SolverSingular, "non-finite steady state");
    return x;
}

Eigen::VectorXcd solve_inverse_iteration(const SpMat &superop, int dim)
{
    const double scale = std::max(1.0, superop.coeffs().cwiseAbs().maxCoeff());
    const double shift = 1e-6 * scale;
    SpMat id(superop.rows(), superop.cols());
    id.setIdentity();
    const SpMat shifted = superop - Complex(shift) * id;
    Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<Complex>> solver;
    solver.preconditioner().setDroptol(1e-6);
    solver.preconditioner().setFillfactor(20);
    solver.setTolerance(1e-13);
    solver.setMaxIterations(20000);
    solver.compute(shifted);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorKind::SolverSingular, "ILU preconditioner failed");
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(superop.rows());
    for (int i = 0; i < dim; ++i)
        x(i + i * dim) = 1.0 / dim;
    for (int it = 0; it < 50; ++it) {
        Eigen::VectorXcd y = solver.solveWithGuess(x, x);
        if (!y.allFinite())
            throw Error(ErrorKind::SolverSingular, "inverse iteration diverged");
        Complex tr = 0.0;
        for (int i = 0; i < dim; ++i)
            tr += y(i + i * dim);
        y /= tr;
        const double change = (y - x).norm() / y.norm();
        x = std::move(y);
        if (change < 1e-12 && (superop * x).norm() / x.norm() < 1e-10)
            break;
    }
    return x;
}

} // namespace

DensityMatrix steady_state(const Liouvillian &l, const SteadyStateOptions &opts)
{
    if (!(l.kappa > 0.0))
        throw Error(ErrorKind::InvalidParams, "steady state requires kappa > 0");
    const int dim = l.space.dim();
    const std::size_t unknowns = std::size_t(dim) * std::size_t(dim);
    SpMat pinned;
    if (l.atom_decoupled) {
        // Atomic decay does not touch the field when g = 0; it only selects
        // the ground state out of the degenerate kernel.
        pinned = l.superop + dissipator(atom_operators(l.space).sigma_minus.entries);
        pinned.makeCompressed();
    }
    const SpMat &op = l.atom_decoupled ? pinned : l.superop;
    const Eigen::VectorXcd x = unknowns <= opts.direct_cap ? solve_direct(op, dim)
                                                           : solve_inverse_iteration(op, dim);
    Dense m = unvectorize(x, dim);
    m = 0.5 * (m + m.adjoint()).eval();
    m /= m.trace();
    DensityMatrix rho(l.space, std::move(m));

    const double residual = steady_state_residual(l, rho);
    if (!(residual < 1e-8))
        throw Error(ErrorKind::SolverSingular,
                    "steady state residual " + std::to_string(residual) + " too large");
    check_invariants(rho, opts.check_tail ? opts.tail_tolerance
                                          : std::numeric_limits<double>::infinity());
    return rho;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

void renormalize_trace(Eigen::VectorXcd &v, int dim)
{
    Complex tr = 0.0;
    for (int i = 0; i < dim; ++i)
        tr += v(i + i * dim);
    if (std::abs(tr - Complex(1.0)) > 1e-10)
        v /= tr;
}

} // namespace

std::vector<DensityMatrix> evolve(const Liouvillian &l, const DensityMatrix &rho0,
                                  const std::vector<double> &t_grid, const EvolveOptions &opts)
{
    if (!(rho0.space == l.space))
        throw Error(ErrorKind::DimensionMismatch, "initial state does not match Liouvillian");
    if (t_grid.empty() || t_grid.front() != 0.0)
        throw Error(ErrorKind::InvalidParams, "time grid must start at 0");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw Error(ErrorKind::InvalidParams, "time grid must be strictly increasing");

    const int dim = l.space.dim();
    const SpMat &lm = l.superop;
    Eigen::VectorXcd y = vectorize(rho0.entries);
    std::vector<DensityMatrix> out;
    out.reserve(t_grid.size());
    out.push_back(rho0);

    double t = 0.0;
    double h = opts.initial_step;
    Eigen::VectorXcd k1 = lm * y, k2, k3, k4, k5, k6, k7, ytmp, ynew, err;
    for (std::size_t gi = 1; gi < t_grid.size(); ++gi) {
        const double t_target = t_grid[gi];
        while (t < t_target) {
            const bool last = t + h >= t_target;
            const double hs = last ? t_target - t : h;
            ytmp = y + hs * a21 * k1;
            k2 = lm * ytmp;
            ytmp = y + hs * (a31 * k1 + a32 * k2);
            k3 = lm * ytmp;
            ytmp = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
            k4 = lm * ytmp;
            ytmp = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
            k5 = lm * ytmp;
            ytmp = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            k6 = lm * ytmp;
            ynew = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            k7 = lm * ynew;
            err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            double e = 0.0;
            for (Eigen::Index i = 0; i < y.size(); ++i) {
                const double sc = opts.tolerance
                                  * (1.0 + std::max(std::abs(y(i)), std::abs(ynew(i))));
                e = std::max(e, std::abs(err(i)) / sc);
            }
            const double factor = std::clamp(e > 0.0 ? 0.9 * std::pow(e, -0.2) : 5.0, 0.2, 5.0);
            if (e <= 1.0) {
                t = last ? t_target : t + hs;
                y = ynew;
                renormalize_trace(y, dim);
                k1 = lm * y;
                if (!last)
                    h = hs * factor;
            } else {
                h = hs * factor;
                if (h < opts.min_step)
                    throw Error(ErrorKind::StepRejected, "step size fell below minimum");
            }
        }
        Dense m = unvectorize(y, dim);
        m = 0.5 * (m + m.adjoint()).eval();
        out.emplace_back(l.space, std::move(m));
    }
    return out;
}

} // namespace jcsim
