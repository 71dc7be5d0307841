#include "jcsim/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "jcsim/parallel.hpp"

namespace jcsim {

namespace {

void require_space(const TruncatedSpace &space, Eigen::Index rows)
{
    if (rows != space.dim())
        throw Error(ErrorKind::DimensionMismatch, "state does not match operator space");
}

Eigen::VectorXd linspace(double lo, double hi, int n)
{
    if (n < 2 || !(hi > lo))
        throw Error(ErrorKind::InvalidParams, "grid axis needs n >= 2 and hi > lo");
    return Eigen::VectorXd::LinSpaced(n, lo, hi);
}

} // namespace

Complex expectation(const OperatorMatrix &a, const DensityMatrix &rho)
{
    if (!(a.space == rho.space))
        throw Error(ErrorKind::DimensionMismatch, "operator and state spaces differ");
    return trace_product(a.entries, rho.entries);
}

Complex expectation(const OperatorMatrix &a, const Ket &psi)
{
    require_space(a.space, psi.size());
    return ket_expectation(a.entries, psi);
}

Dense reduce_field(const DensityMatrix &rho)
{
    return reduce_field(rho.entries, rho.space);
}

Eigen::Matrix2cd reduce_atom(const DensityMatrix &rho)
{
    const int n = rho.space.photon_levels();
    const Dense &r = rho.entries;
    Eigen::Matrix2cd atom;
    atom(0, 0) = r.topLeftCorner(n, n).trace();
    atom(1, 1) = r.bottomRightCorner(n, n).trace();
    atom(0, 1) = r.topRightCorner(n, n).trace();
    atom(1, 0) = r.bottomLeftCorner(n, n).trace();
    return atom;
}

double BlochVector::norm() const
{
    return std::sqrt(x * x + y * y + z * z);
}

BlochVector bloch_vector(const Eigen::Matrix2cd &atom)
{
    // sigma_+ = |e><g|, so <sigma_+> = rho_ge.
    const Complex ge = atom(0, 1);
    BlochVector b;
    b.x = 2.0 * ge.real();
    b.y = 2.0 * ge.imag();
    b.z = (atom(1, 1) - atom(0, 0)).real();
    return b;
}

BlochVector bloch_vector(const DensityMatrix &rho)
{
    return bloch_vector(reduce_atom(rho));
}

BlochVector bloch_vector(const TruncatedSpace &space, const Ket &psi)
{
    require_space(space, psi.size());
    const int n = space.photon_levels();
    const double norm2 = psi.squaredNorm();
    const auto g = psi.head(n);
    const auto e = psi.tail(n);
    Eigen::Matrix2cd atom;
    atom(0, 0) = g.squaredNorm() / norm2;
    atom(1, 1) = e.squaredNorm() / norm2;
    atom(0, 1) = e.dot(g) / norm2; // sum_n g_n conj(e_n)
    atom(1, 0) = std::conj(atom(0, 1));
    return bloch_vector(atom);
}

Dense reduce_field(const TruncatedSpace &space, const Ket &psi)
{
    require_space(space, psi.size());
    const int n = space.photon_levels();
    const Ket g = psi.head(n);
    const Ket e = psi.tail(n);
    return (g * g.adjoint() + e * e.adjoint()) / psi.squaredNorm();
}

GridSpec GridSpec::around(double mean_n, const PhaseSpaceConvention &conv)
{
    const double half = (std::sqrt(std::max(0.0, mean_n)) + 4.0) * 2.0 / conv.scale;
    return GridSpec{-half, half, 201, -half, half, 201};
}

double QuasiProbGrid::dx() const
{
    return x_axis(1) - x_axis(0);
}

double QuasiProbGrid::dy() const
{
    return y_axis(1) - y_axis(0);
}

double QuasiProbGrid::integral() const
{
    return values.sum() * dx() * dy();
}

double husimi_at(const Dense &rho_field, Complex alpha)
{
    const Eigen::Index n = rho_field.rows();
    Ket v(n);
    v(0) = std::exp(-0.5 * std::norm(alpha));
    for (Eigen::Index k = 1; k < n; ++k)
        v(k) = v(k - 1) * alpha / std::sqrt(double(k));
    // <alpha|rho|alpha> with <k|alpha> = v(k).
    return v.dot(rho_field * v).real() / std::numbers::pi;
}

double wigner_at(const Dense &rho_field, Complex alpha)
{
    const Eigen::Index levels = rho_field.rows();
    if (levels > kWignerMaxLevels)
        throw Error(ErrorKind::RecurrenceOverflow,
                    "Wigner recurrence limited to " + std::to_string(kWignerMaxLevels) + " levels");
    // Diagonal k of rho pairs with the normalised Laguerre functions
    // f_m^k(x) = sqrt(m!/(m+k)!) x^(k/2) exp(-x/2) L_m^k(x), x = 4|alpha|^2,
    // which stay bounded by 1 so the recurrence in m neither overflows nor
    // cancels.
    const double x = 4.0 * std::norm(alpha);
    const Complex phase = std::abs(alpha) > 0.0 ? alpha / std::abs(alpha) : Complex(1.0);
    Complex rotation(1.0);
    double sum = 0.0;
    for (Eigen::Index k = 0; k < levels; ++k) {
        double prev = 0.0;
        double f = k == 0 ? std::exp(-0.5 * x)
                          : (x > 0.0 ? std::exp(0.5 * double(k) * std::log(x) - 0.5 * x
                                                - 0.5 * std::lgamma(double(k) + 1.0))
                                     : 0.0);
        Complex diagonal(0.0);
        for (Eigen::Index m = 0; m + k < levels; ++m) {
            const double sign = m % 2 == 0 ? 1.0 : -1.0;
            diagonal += sign * f * rho_field(m, m + k);
            const double md = double(m), kd = double(k);
            const double next = ((2.0 * md + 1.0 + kd - x) * f - std::sqrt(md * (md + kd)) * prev)
                                / std::sqrt((md + 1.0) * (md + kd + 1.0));
            prev = f;
            f = next;
        }
        sum += (k == 0 ? 1.0 : 2.0) * (diagonal * rotation).real();
        rotation *= phase;
    }
    return 2.0 * sum / std::numbers::pi;
}

namespace {

template <typename PointFn>
QuasiProbGrid evaluate_grid(QuasiKind kind, const GridSpec &spec, const QuasiOptions &opts,
                            PointFn &&point)
{
    QuasiProbGrid grid;
    grid.kind = kind;
    grid.convention = opts.convention;
    grid.x_axis = linspace(spec.x_min, spec.x_max, spec.nx);
    grid.y_axis = linspace(spec.y_min, spec.y_max, spec.ny);
    grid.values.resize(spec.ny, spec.nx);
    const double jac = opts.convention.jacobian();
    parallel_for(std::size_t(spec.ny), opts.workers, [&](std::size_t iy) {
        for (int ix = 0; ix < spec.nx; ++ix)
            grid.values(Eigen::Index(iy), ix)
                = jac * point(opts.convention.alpha(grid.x_axis(ix), grid.y_axis(Eigen::Index(iy))));
    });
    if (opts.check_boundary) {
        const double peak = grid.values.cwiseAbs().maxCoeff();
        const Eigen::Index ny = grid.values.rows(), nx = grid.values.cols();
        const double edge = std::max({grid.values.row(0).cwiseAbs().maxCoeff(),
                                      grid.values.row(ny - 1).cwiseAbs().maxCoeff(),
                                      grid.values.col(0).cwiseAbs().maxCoeff(),
                                      grid.values.col(nx - 1).cwiseAbs().maxCoeff()});
        if (edge > 1e-6 * peak)
            throw Error(ErrorKind::GridTooSmall, "distribution does not decay inside the grid");
    }
    return grid;
}

void require_square(const Dense &rho_field)
{
    if (rho_field.rows() != rho_field.cols() || rho_field.rows() < 1)
        throw Error(ErrorKind::DimensionMismatch, "field density matrix must be square");
}

} // namespace

QuasiProbGrid husimi_q(const Dense &rho_field, const GridSpec &grid, const QuasiOptions &opts)
{
    require_square(rho_field);
    return evaluate_grid(QuasiKind::Husimi, grid, opts,
                         [&](Complex a) { return husimi_at(rho_field, a); });
}

QuasiProbGrid wigner(const Dense &rho_field, const GridSpec &grid, const QuasiOptions &opts)
{
    require_square(rho_field);
    if (rho_field.rows() > kWignerMaxLevels)
        throw Error(ErrorKind::RecurrenceOverflow, "too many Fock levels for the Wigner recurrence");
    return evaluate_grid(QuasiKind::Wigner, grid, opts,
                         [&](Complex a) { return wigner_at(rho_field, a); });
}

std::vector<Peak> local_maxima(const QuasiProbGrid &grid, double min_relative)
{
    const Eigen::MatrixXd &v = grid.values;
    const double top = v.maxCoeff();
    std::vector<Peak> peaks;
    for (Eigen::Index iy = 1; iy + 1 < v.rows(); ++iy)
        for (Eigen::Index ix = 1; ix + 1 < v.cols(); ++ix) {
            const double c = v(iy, ix);
            if (c < min_relative * top)
                continue;
            bool is_max = true;
            for (int dy = -1; dy <= 1 && is_max; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0)
                        continue;
                    const double nb = v(iy + dy, ix + dx);
                    // Ties broken towards the lower index so plateaus give one peak.
                    if (nb > c || (nb == c && (dy < 0 || (dy == 0 && dx < 0)))) {
                        is_max = false;
                        break;
                    }
                }
            if (is_max)
                peaks.push_back(Peak{grid.x_axis(ix), grid.y_axis(iy), c});
        }
    std::sort(peaks.begin(), peaks.end(),
              [](const Peak &a, const Peak &b) { return a.value > b.value; });
    return peaks;
}

Peak refine_husimi_peak(const Dense &rho_field, const Peak &start, double initial_step,
                        const PhaseSpaceConvention &conv)
{
    auto value = [&](double x, double y) {
        return conv.jacobian() * husimi_at(rho_field, conv.alpha(x, y));
    };
    Peak best{start.x, start.y, value(start.x, start.y)};
    double step = initial_step;
    while (step > 1e-7) {
        bool moved = false;
        const double dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (const auto &d : dirs) {
            const double x = best.x + step * d[0];
            const double y = best.y + step * d[1];
            const double q = value(x, y);
            if (q > best.value) {
                best = Peak{x, y, q};
                moved = true;
                break;
            }
        }
        if (!moved)
            step *= 0.5;
    }
    return best;
}

PhaseSpaceMoments grid_moments(const QuasiProbGrid &grid)
{
    PhaseSpaceMoments m;
    const double cell = grid.dx() * grid.dy();
    for (Eigen::Index iy = 0; iy < grid.values.rows(); ++iy)
        for (Eigen::Index ix = 0; ix < grid.values.cols(); ++ix) {
            const double w = grid.values(iy, ix) * cell;
            const Complex a = grid.convention.alpha(grid.x_axis(ix), grid.y_axis(iy));
            m.norm += w;
            m.mean += w * a;
            m.mean_abs2 += w * std::norm(a);
            m.mean_sq += w * a * a;
        }
    return m;
}

} // namespace jcsim
