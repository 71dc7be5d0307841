#ifndef JCSIM_MASTER_EQUATION_HPP
#define JCSIM_MASTER_EQUATION_HPP

#include <cstddef>
#include <vector>

#include "jcsim/operators.hpp"
#include "jcsim/params.hpp"
#include "jcsim/types.hpp"

namespace jcsim {

struct DensityMatrix {
    TruncatedSpace space;
    Dense entries;

    DensityMatrix(TruncatedSpace s, Dense m);

    /// |atom, photon><atom, photon|
    static DensityMatrix basis_state(const TruncatedSpace &space, int atom, int photon);
    static DensityMatrix from_ket(const TruncatedSpace &space, const Ket &psi);
};

/// Quantities checked against the DensityMatrix invariants.
struct DensityDiagnostics {
    double trace_error = 0.0;     ///< |tr rho - 1|
    double hermitian_error = 0.0; ///< max |rho - rho^dagger|
    double min_eigenvalue = 0.0;
    double tail_mass = 0.0;       ///< population of the two highest Fock levels
};

DensityDiagnostics diagnose(const DensityMatrix &rho);

/// Throws Error(InvalidParams) on trace/Hermiticity/positivity violations and
/// Error(TruncationInsufficient) when the tail mass reaches `tail_tolerance`.
void check_invariants(const DensityMatrix &rho, double tail_tolerance = 1e-6);

/// Population of the two highest Fock levels.
double tail_mass(const DensityMatrix &rho);

/// Superoperator of the master equation acting on column-stacked rho, i.e.
/// vec(rho)[i + j * dim] = rho(i, j).
struct Liouvillian {
    TruncatedSpace space;
    SpMat superop;
    double kappa = 1.0;
    double gamma = 0.0;
    /// g = 0 and gamma = 0: the atom is neither driven nor damped, so every
    /// atomic state is stationary.
    bool atom_decoupled = false;
};

/// Superoperator of rho -> A rho.
SpMat left_multiplier(const SpMat &a);
/// Superoperator of rho -> rho B.
SpMat right_multiplier(const SpMat &b);
/// Superoperator of rho -> c rho c^dagger - (c^dagger c rho + rho c^dagger c) / 2.
SpMat dissipator(const SpMat &c);

/// rho' = -i[H, rho] + kappa (2 a rho a^dag - a^dag a rho - rho a^dag a)
///        + (gamma / 2)(2 s- rho s+ - s+ s- rho - rho s+ s-)
Liouvillian build_liouvillian(const SystemParams &p);

/// max over columns of |sum_i L[(i,i), col]|.
double trace_functional_residual(const Liouvillian &l);

struct SteadyStateOptions {
    /// Largest number of unknowns (dim^2) handed to the direct sparse LU;
    /// above it the solver switches to shifted inverse iteration with an
    /// ILU-preconditioned BiCGSTAB inner solve.
    std::size_t direct_cap = 300000;
    double tail_tolerance = 1e-6;
    bool check_tail = true;
};

/// Unique stationary state. For a decoupled atom the fixed point is not
/// unique; the atom is then placed in its ground state.
DensityMatrix steady_state(const Liouvillian &l, const SteadyStateOptions &opts = {});

/// ||L vec(rho)|| / ||vec(rho)||
double steady_state_residual(const Liouvillian &l, const DensityMatrix &rho);

struct EvolveOptions {
    double tolerance = 1e-8;
    double min_step = 1e-12;
    double initial_step = 1e-3;
};

/// Integrates from t_grid[0] (which must be 0) and returns one state per grid
/// point. Adaptive Dormand-Prince 5(4).
std::vector<DensityMatrix> evolve(const Liouvillian &l, const DensityMatrix &rho0,
                                  const std::vector<double> &t_grid,
                                  const EvolveOptions &opts = {});

Eigen::VectorXcd vectorize(const Dense &m);
Dense unvectorize(const Eigen::VectorXcd &v, int dim);

} // namespace jcsim

#endif // JCSIM_MASTER_EQUATION_HPP
