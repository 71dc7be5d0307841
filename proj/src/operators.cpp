#include "jcsim/operators.hpp"

#include <cmath>
#include <vector>

#include "jcsim/error.hpp"

namespace jcsim {

namespace {

void require_same_space(const OperatorMatrix &a, const OperatorMatrix &b)
{
    if (!(a.space == b.space))
        throw Error(ErrorKind::DimensionMismatch, "operators live on different spaces");
}

} // namespace

OperatorMatrix::OperatorMatrix(TruncatedSpace s, SpMat m, bool hermitian)
    : space(s), entries(std::move(m)), hermitian_hint(hermitian)
{
    if (entries.rows() != space.dim() || entries.cols() != space.dim())
        throw Error(ErrorKind::DimensionMismatch, "operator size does not match space");
    entries.makeCompressed();
    if (hermitian_hint && hermiticity_residual(entries) >= 1e-12)
        throw Error(ErrorKind::InvalidParams, "operator flagged Hermitian is not");
}

OperatorMatrix OperatorMatrix::adjoint() const
{
    return OperatorMatrix(space, SpMat(entries.adjoint()), hermitian_hint);
}

OperatorMatrix operator*(const OperatorMatrix &lhs, const OperatorMatrix &rhs)
{
    require_same_space(lhs, rhs);
    return OperatorMatrix(lhs.space, SpMat(lhs.entries * rhs.entries));
}

OperatorMatrix operator+(const OperatorMatrix &lhs, const OperatorMatrix &rhs)
{
    require_same_space(lhs, rhs);
    return OperatorMatrix(lhs.space, SpMat(lhs.entries + rhs.entries));
}

OperatorMatrix operator-(const OperatorMatrix &lhs, const OperatorMatrix &rhs)
{
    require_same_space(lhs, rhs);
    return OperatorMatrix(lhs.space, SpMat(lhs.entries - rhs.entries));
}

OperatorMatrix operator*(Complex c, const OperatorMatrix &op)
{
    return OperatorMatrix(op.space, SpMat(c * op.entries));
}

double hermiticity_residual(const SpMat &m)
{
    const SpMat diff = m - SpMat(m.adjoint());
    double worst = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k)
        for (SpMat::InnerIterator it(diff, k); it; ++it)
            worst = std::max(worst, std::abs(it.value()));
    return worst;
}

OperatorMatrix identity(const TruncatedSpace &space)
{
    SpMat m(space.dim(), space.dim());
    m.setIdentity();
    return OperatorMatrix(space, std::move(m), true);
}

OperatorMatrix annihilation(const TruncatedSpace &space)
{
    std::vector<Triplet> t;
    t.reserve(2 * space.n_max);
    for (int s = 0; s < 2; ++s)
        for (int n = 1; n <= space.n_max; ++n)
            t.emplace_back(space.index(s, n - 1), space.index(s, n), std::sqrt(double(n)));
    SpMat m(space.dim(), space.dim());
    m.setFromTriplets(t.begin(), t.end());
    return OperatorMatrix(space, std::move(m));
}

OperatorMatrix number(const TruncatedSpace &space)
{
    std::vector<Triplet> t;
    for (int s = 0; s < 2; ++s)
        for (int n = 1; n <= space.n_max; ++n)
            t.emplace_back(space.index(s, n), space.index(s, n), double(n));
    SpMat m(space.dim(), space.dim());
    m.setFromTriplets(t.begin(), t.end());
    return OperatorMatrix(space, std::move(m), true);
}

AtomOperators atom_operators(const TruncatedSpace &space)
{
    const int d = space.dim();
    std::vector<Triplet> tm, tz;
    for (int n = 0; n <= space.n_max; ++n) {
        tm.emplace_back(space.index(0, n), space.index(1, n), 1.0);
        tz.emplace_back(space.index(0, n), space.index(0, n), -1.0);
        tz.emplace_back(space.index(1, n), space.index(1, n), 1.0);
    }
    SpMat sm(d, d), sz(d, d);
    sm.setFromTriplets(tm.begin(), tm.end());
    sz.setFromTriplets(tz.begin(), tz.end());
    SpMat sp = sm.adjoint();
    SpMat sx = sp + sm;
    SpMat sy = SpMat(-kI * sp) + SpMat(kI * sm);
    return AtomOperators{
        OperatorMatrix(space, sp),
        OperatorMatrix(space, sm),
        OperatorMatrix(space, sz, true),
        OperatorMatrix(space, sx, true),
        OperatorMatrix(space, sy, true),
    };
}

HamiltonianParts hamiltonian_parts(const TruncatedSpace &space)
{
    const OperatorMatrix a = annihilation(space);
    const OperatorMatrix ad = a.adjoint();
    const AtomOperators at = atom_operators(space);
    SpMat excitation = SpMat(at.sigma_plus.entries * at.sigma_minus.entries)
                       + SpMat(ad.entries * a.entries);
    SpMat coupling = kI * (SpMat(ad.entries * at.sigma_minus.entries)
                           - SpMat(a.entries * at.sigma_plus.entries));
    SpMat drive = kI * (ad.entries - a.entries);
    return HamiltonianParts{
        OperatorMatrix(space, std::move(excitation), true),
        OperatorMatrix(space, std::move(coupling), true),
        OperatorMatrix(space, std::move(drive), true),
    };
}

OperatorMatrix hamiltonian(const SystemParams &p)
{
    return hamiltonian(p, TruncatedSpace(p.n_max));
}

OperatorMatrix hamiltonian(const SystemParams &p, const TruncatedSpace &space)
{
    validate(p);
    const HamiltonianParts parts = hamiltonian_parts(space);
    SpMat h = Complex(-p.delta_omega) * parts.excitation.entries
              + Complex(p.g) * parts.coupling.entries
              + Complex(p.eps_d) * parts.drive.entries;
    h.prune(Complex(0.0));
    return OperatorMatrix(space, std::move(h), true);
}

} // namespace jcsim
