#ifndef JCSIM_OBSERVABLES_HPP
#define JCSIM_OBSERVABLES_HPP

#include <optional>
#include <vector>

#include "jcsim/error.hpp"
#include "jcsim/master_equation.hpp"
#include "jcsim/operators.hpp"
#include "jcsim/types.hpp"

namespace jcsim {

/// tr(A rho) for a sparse operator and any dense expression.
template <typename OpDerived, typename RhoDerived>
auto trace_product(const Eigen::SparseMatrixBase<OpDerived> &op,
                   const Eigen::MatrixBase<RhoDerived> &rho)
{
    using Scalar = typename RhoDerived::Scalar;
    const auto &a = op.derived();
    const auto &r = rho.derived();
    Scalar sum(0);
    for (Eigen::Index k = 0; k < a.outerSize(); ++k)
        for (typename OpDerived::InnerIterator it(a, k); it; ++it)
            sum += it.value() * r(it.col(), it.row());
    return sum;
}

/// <psi| A |psi> / <psi|psi>
template <typename OpDerived, typename KetDerived>
auto ket_expectation(const Eigen::SparseMatrixBase<OpDerived> &op,
                     const Eigen::MatrixBase<KetDerived> &psi)
{
    return psi.derived().dot(op.derived() * psi.derived()) / psi.derived().squaredNorm();
}

Complex expectation(const OperatorMatrix &a, const DensityMatrix &rho);
Complex expectation(const OperatorMatrix &a, const Ket &psi);

/// Partial trace over the atom: (n_max+1) x (n_max+1) field density matrix.
template <typename Derived>
DenseT<typename Derived::RealScalar> reduce_field(const Eigen::MatrixBase<Derived> &rho,
                                                  const TruncatedSpace &space)
{
    const int n = space.photon_levels();
    return rho.derived().topLeftCorner(n, n) + rho.derived().bottomRightCorner(n, n);
}

Dense reduce_field(const DensityMatrix &rho);

/// 2x2 atomic density matrix in the basis (ground, excited).
Eigen::Matrix2cd reduce_atom(const DensityMatrix &rho);

struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = -1.0;

    double norm() const;
};

BlochVector bloch_vector(const Eigen::Matrix2cd &atom);
BlochVector bloch_vector(const DensityMatrix &rho);
/// Bloch vector of the atom's reduced state for a pure joint state.
BlochVector bloch_vector(const TruncatedSpace &space, const Ket &psi);

/// Field reduced state of a pure joint state.
Dense reduce_field(const TruncatedSpace &space, const Ket &psi);

/// Phase-space axes convention: alpha = (scale / 2) (x + i y). The default
/// scale 2 puts alpha = x + i y, so grid coordinates read directly as <a>.
/// scale = sqrt(2) gives the quadrature convention x + i y = sqrt(2) alpha.
/// Either way the distributions are normalised to 1 over dx dy.
struct PhaseSpaceConvention {
    double scale = 2.0;

    Complex alpha(double x, double y) const { return 0.5 * scale * Complex(x, y); }
    /// Jacobian d^2 alpha / (dx dy).
    double jacobian() const { return 0.25 * scale * scale; }
};

struct GridSpec {
    double x_min = -5.0;
    double x_max = 5.0;
    int nx = 201;
    double y_min = -5.0;
    double y_max = 5.0;
    int ny = 201;

    /// 201 x 201 points spanning +-(sqrt(mean_n) + 4) in each quadrature
    /// (expressed in grid coordinates of `conv`).
    static GridSpec around(double mean_n, const PhaseSpaceConvention &conv = {});
};

enum class QuasiKind { Wigner, Husimi };

struct QuasiProbGrid {
    QuasiKind kind = QuasiKind::Husimi;
    PhaseSpaceConvention convention;
    Eigen::VectorXd x_axis;
    Eigen::VectorXd y_axis;
    /// values(iy, ix)
    Eigen::MatrixXd values;
    std::optional<SystemParams> params_snapshot;

    double dx() const;
    double dy() const;
    /// Riemann sum of values dx dy.
    double integral() const;
};

struct QuasiOptions {
    PhaseSpaceConvention convention;
    /// Throw GridTooSmall when the boundary exceeds 1e-6 of the maximum.
    bool check_boundary = true;
    int workers = 1;
};

/// Largest Fock dimension accepted by the Wigner recurrence.
inline constexpr int kWignerMaxLevels = 400;

QuasiProbGrid husimi_q(const Dense &rho_field, const GridSpec &grid, const QuasiOptions &opts = {});
QuasiProbGrid wigner(const Dense &rho_field, const GridSpec &grid, const QuasiOptions &opts = {});

/// <alpha| rho |alpha> / pi, density with respect to d^2 alpha.
double husimi_at(const Dense &rho_field, Complex alpha);
/// Wigner density with respect to d^2 alpha.
double wigner_at(const Dense &rho_field, Complex alpha);

struct Peak {
    double x = 0.0;
    double y = 0.0;
    double value = 0.0;
};

/// Strict 8-neighbour interior maxima above `min_relative` of the global
/// maximum, highest first.
std::vector<Peak> local_maxima(const QuasiProbGrid &grid, double min_relative = 1e-3);

/// Pattern-search refinement of a Husimi maximum. Coordinates and value stay
/// in the grid convention.
Peak refine_husimi_peak(const Dense &rho_field, const Peak &start, double initial_step,
                        const PhaseSpaceConvention &conv = {});

/// Moments of a grid by quadrature, expressed in alpha.
struct PhaseSpaceMoments {
    double norm = 0.0;
    Complex mean;          ///< <alpha>
    double mean_abs2 = 0.0; ///< <|alpha|^2>
    Complex mean_sq;       ///< <alpha^2>
};

PhaseSpaceMoments grid_moments(const QuasiProbGrid &grid);

} // namespace jcsim

#endif // JCSIM_OBSERVABLES_HPP
