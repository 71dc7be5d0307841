#ifndef JCSIM_OPERATORS_HPP
#define JCSIM_OPERATORS_HPP

#include "jcsim/params.hpp"
#include "jcsim/types.hpp"

namespace jcsim {

/// Two-level atom (x) Fock space truncated at `n_max` photons.
///
/// Basis ordering: atom index slow, photon index fast, i.e. the state
/// |s, n> sits at `s * (n_max + 1) + n` with s = 0 ground and s = 1 excited.
struct TruncatedSpace {
    int n_max = 1;

    explicit TruncatedSpace(int n) : n_max(n) {}

    int photon_levels() const { return n_max + 1; }
    int dim() const { return 2 * (n_max + 1); }
    int index(int atom, int photon) const { return atom * (n_max + 1) + photon; }

    bool operator==(const TruncatedSpace &) const = default;
};

struct OperatorMatrix {
    TruncatedSpace space;
    SpMat entries;
    bool hermitian_hint = false;

    OperatorMatrix(TruncatedSpace s, SpMat m, bool hermitian = false);

    OperatorMatrix adjoint() const;
};

OperatorMatrix operator*(const OperatorMatrix &lhs, const OperatorMatrix &rhs);
OperatorMatrix operator+(const OperatorMatrix &lhs, const OperatorMatrix &rhs);
OperatorMatrix operator-(const OperatorMatrix &lhs, const OperatorMatrix &rhs);
OperatorMatrix operator*(Complex c, const OperatorMatrix &op);

/// max |A - A^dagger| over stored entries.
double hermiticity_residual(const SpMat &m);

OperatorMatrix identity(const TruncatedSpace &space);
OperatorMatrix annihilation(const TruncatedSpace &space);
OperatorMatrix number(const TruncatedSpace &space);

struct AtomOperators {
    OperatorMatrix sigma_plus;
    OperatorMatrix sigma_minus;
    OperatorMatrix sigma_z;
    OperatorMatrix sigma_x;
    OperatorMatrix sigma_y;
};

AtomOperators atom_operators(const TruncatedSpace &space);

/// The three Hermitian pieces of the interaction-picture Hamiltonian, so that
/// H = -delta * excitation + g * coupling + eps * drive. Time-dependent
/// schedules recombine them without rebuilding the sparsity pattern.
struct HamiltonianParts {
    OperatorMatrix excitation; ///< sigma_+ sigma_- + a^dagger a
    OperatorMatrix coupling;   ///< i (a^dagger sigma_- - a sigma_+)
    OperatorMatrix drive;      ///< i (a^dagger - a)
};

HamiltonianParts hamiltonian_parts(const TruncatedSpace &space);

/// H = -delta (sigma_+ sigma_- + a^dagger a) + i g (a^dagger sigma_- - a sigma_+)
///     + i eps (a^dagger - a), hbar = 1. Uses p.n_max for the space.
OperatorMatrix hamiltonian(const SystemParams &p);
OperatorMatrix hamiltonian(const SystemParams &p, const TruncatedSpace &space);

} // namespace jcsim

#endif // JCSIM_OPERATORS_HPP
