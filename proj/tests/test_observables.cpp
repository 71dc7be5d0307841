#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "jcsim/error.hpp"
#include "jcsim/master_equation.hpp"
#include "jcsim/observables.hpp"

using namespace jcsim;

namespace {

constexpr double kPi = std::numbers::pi;

Dense fock(int levels, int n)
{
    Dense m = Dense::Zero(levels, levels);
    m(n, n) = 1.0;
    return m;
}

Ket coherent_ket(int levels, Complex beta)
{
    Ket v(levels);
    v(0) = std::exp(-0.5 * std::norm(beta));
    for (int k = 1; k < levels; ++k)
        v(k) = v(k - 1) * beta / std::sqrt(double(k));
    return v;
}

Dense coherent(int levels, Complex beta)
{
    const Ket v = coherent_ket(levels, beta);
    return v * v.adjoint();
}

const PhaseSpaceConvention kQuadrature{std::sqrt(2.0)};

ErrorKind kind_of(auto &&fn)
{
    try {
        fn();
    } catch (const Error &e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::Config;
}

} // namespace

TEST_CASE("expectations on simple states")
{
    const TruncatedSpace s(6);
    const DensityMatrix vac = DensityMatrix::basis_state(s, 0, 0);
    CHECK(expectation(number(s), vac) == Complex(0.0));
    CHECK(expectation(atom_operators(s).sigma_z, vac).real() == -1.0);
    const DensityMatrix e3 = DensityMatrix::basis_state(s, 1, 3);
    CHECK(expectation(number(s), e3).real() == doctest::Approx(3.0));
    CHECK(kind_of([&] { expectation(number(TruncatedSpace(5)), vac); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("partial traces")
{
    const TruncatedSpace s(5);
    const DensityMatrix vac = DensityMatrix::basis_state(s, 0, 0);
    const Dense field = reduce_field(vac);
    CHECK((field - fock(6, 0)).norm() == 0.0);
    const BlochVector b = bloch_vector(vac);
    CHECK(b.z == -1.0);
    CHECK(b.x == 0.0);

    // (|g> + i|e>)/sqrt2 (x) |beta>
    const Ket f = coherent_ket(6, Complex(0.3, 0.1));
    Ket psi = Ket::Zero(s.dim());
    psi.head(6) = f / std::sqrt(2.0);
    psi.tail(6) = kI * f / std::sqrt(2.0);
    const DensityMatrix rho = DensityMatrix::from_ket(s, psi / psi.norm());
    const BlochVector bp = bloch_vector(rho);
    CHECK(bp.y == doctest::Approx(-1.0).epsilon(1e-10)); // <sigma_y> for (|g> + i|e>)/sqrt2
    CHECK(bp.norm() == doctest::Approx(1.0).epsilon(1e-10));
    const BlochVector bk = bloch_vector(s, psi / psi.norm());
    CHECK(bk.y == doctest::Approx(bp.y));
    CHECK(reduce_field(rho).trace().real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((reduce_field(s, psi / psi.norm()) - reduce_field(rho)).norm() < 1e-12);
}

TEST_CASE("property: reduced states are unit-trace and Bloch norm is bounded")
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n;
    const TruncatedSpace s(4);
    for (int i = 0; i < 100; ++i) {
        Dense m(s.dim(), s.dim());
        for (int r = 0; r < s.dim(); ++r)
            for (int c = 0; c < s.dim(); ++c)
                m(r, c) = Complex(n(rng), n(rng));
        Dense rho = m * m.adjoint();
        rho /= rho.trace();
        const DensityMatrix dm(s, rho);
        CHECK(reduce_field(dm).trace().real() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(reduce_atom(dm).trace().real() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(bloch_vector(dm).norm() <= 1.0 + 1e-9);
    }
}

TEST_CASE("Husimi function")
{
    SUBCASE("vacuum")
    {
        CHECK(husimi_at(fock(10, 0), 0.0) == doctest::Approx(1.0 / kPi));
        CHECK(husimi_at(fock(10, 0), Complex(0.5, -1.0)) == doctest::Approx(std::exp(-1.25) / kPi));
        const QuasiProbGrid q = husimi_q(fock(10, 0), GridSpec::around(0.0));
        CHECK(q.integral() == doctest::Approx(1.0).epsilon(1e-2));
        CHECK(q.values.maxCoeff() == doctest::Approx(1.0 / kPi));
    }
    SUBCASE("coherent state peaks at its amplitude")
    {
        const Complex beta(1.5, -0.8);
        const Dense rho = coherent(40, beta);
        const QuasiProbGrid q = husimi_q(rho, GridSpec::around(std::norm(beta)));
        const std::vector<Peak> peaks = local_maxima(q);
        REQUIRE(peaks.size() == 1);
        const Peak fine = refine_husimi_peak(rho, peaks[0], q.dx());
        CHECK(fine.x == doctest::Approx(1.5).epsilon(1e-5));
        CHECK(fine.y == doctest::Approx(-0.8).epsilon(1e-5));
    }
    SUBCASE("quadrature convention rescales the axes")
    {
        const QuasiOptions qo{kQuadrature};
        const QuasiProbGrid q = husimi_q(fock(10, 0), GridSpec::around(0.0, kQuadrature), qo);
        CHECK(q.values.maxCoeff() == doctest::Approx(0.5 / kPi));
        CHECK(q.integral() == doctest::Approx(1.0).epsilon(1e-2));
    }
    SUBCASE("grid too small")
    {
        CHECK(kind_of([&] { husimi_q(coherent(30, 2.0), GridSpec{-1, 1, 21, -1, 1, 21}); })
              == ErrorKind::GridTooSmall);
    }
}

TEST_CASE("Wigner function")
{
    SUBCASE("vacuum and first Fock state in the quadrature convention")
    {
        const QuasiOptions qo{kQuadrature};
        const QuasiProbGrid w = wigner(fock(8, 0), GridSpec::around(0.0, kQuadrature), qo);
        CHECK(w.values.maxCoeff() == doctest::Approx(1.0 / kPi));
        CHECK(w.integral() == doctest::Approx(1.0).epsilon(1e-2));
        const double jac = kQuadrature.jacobian();
        CHECK(jac * wigner_at(fock(8, 1), 0.0) == doctest::Approx(-1.0 / kPi));
        // exp(-x^2 - y^2) / pi at x = 1, y = 0.5
        CHECK(jac * wigner_at(fock(8, 0), kQuadrature.alpha(1.0, 0.5))
              == doctest::Approx(std::exp(-1.25) / kPi));
    }
    SUBCASE("density with respect to d^2 alpha")
    {
        CHECK(wigner_at(fock(8, 0), 0.0) == doctest::Approx(2.0 / kPi));
        CHECK(wigner_at(fock(8, 1), 0.0) == doctest::Approx(-2.0 / kPi));
        // W_n(0) = 2 (-1)^n / pi for every Fock state
        for (int n = 0; n < 30; ++n)
            CHECK(wigner_at(fock(31, n), 0.0) == doctest::Approx((n % 2 ? -2.0 : 2.0) / kPi));
    }
    SUBCASE("Fock state |2> against the Laguerre closed form")
    {
        const Complex a(0.4, 0.7);
        const double r = 4.0 * std::norm(a);
        const double l2 = 1.0 - 2.0 * r + 0.5 * r * r;
        CHECK(wigner_at(fock(5, 2), a) == doctest::Approx(2.0 / kPi * std::exp(-2.0 * std::norm(a)) * l2));
    }
    SUBCASE("coherent superposition: cross terms")
    {
        // Cat state W has interference fringes; compare one point with the
        // closed form of |b><b| + |-b><-b| + cross terms.
        const double b = 1.2;
        const Ket plus = coherent_ket(40, b), minus = coherent_ket(40, -b);
        Ket cat = plus + minus;
        cat /= cat.norm();
        const Dense rho = cat * cat.adjoint();
        const Complex a(0.1, 0.3);
        const double nrm = 2.0 * (1.0 + std::exp(-2.0 * b * b));
        const double gauss = std::exp(-2.0 * std::norm(a - b)) + std::exp(-2.0 * std::norm(a + b));
        const double fringe = 2.0 * std::exp(-2.0 * std::norm(a)) * std::cos(4.0 * b * a.imag());
        CHECK(wigner_at(rho, a) == doctest::Approx(2.0 / kPi * (gauss + fringe) / nrm).epsilon(1e-10));
    }
    SUBCASE("recurrence size limit")
    {
        CHECK(kind_of([&] { wigner_at(fock(kWignerMaxLevels + 1, 0), 0.0); })
              == ErrorKind::RecurrenceOverflow);
        CHECK_NOTHROW(wigner_at(fock(kWignerMaxLevels, 0), 0.0));
        CHECK(std::isfinite(wigner_at(coherent(kWignerMaxLevels, 12.0), 12.0)));
    }
    SUBCASE("bright coherent state in a large Fock space")
    {
        // |beta|^2 = 58: the kernel terms pass e^(2|alpha|^2) without normalisation
        const Complex beta(7.0, 3.0);
        const Dense rho = coherent(220, beta);
        for (const Complex shift : {Complex(0, 0), Complex(0.5, 0), Complex(-0.3, 0.4), Complex(1.5, -1.0)})
            CHECK(wigner_at(rho, beta + shift)
                  == doctest::Approx(2.0 / kPi * std::exp(-2.0 * std::norm(shift))).scale(1.0).epsilon(1e-9));
        CHECK(std::abs(wigner_at(rho, 0.0)) < 1e-12);
        CHECK(std::abs(wigner_at(rho, Complex(-7.0, 3.0))) < 1e-12);
    }
}

TEST_CASE("quasi-probability moments match direct expectations")
{
    // A driven blockade steady state has nontrivial first and second moments.
    const DensityMatrix rho = steady_state(build_liouvillian(SystemParams::from_ratios(5, 0.2, 0.8, 0, 20)));
    const Dense f = reduce_field(rho);
    const int levels = int(f.rows());
    Dense a = Dense::Zero(levels, levels);
    for (int k = 1; k < levels; ++k)
        a(k - 1, k) = std::sqrt(double(k));
    const Complex ea = (a * f).trace();
    const Complex ea2 = (a * a * f).trace();
    const double en = (a.adjoint() * a * f).trace().real();

    const double n_mean = en;
    const PhaseSpaceMoments q = grid_moments(husimi_q(f, GridSpec::around(n_mean)));
    const PhaseSpaceMoments w = grid_moments(wigner(f, GridSpec::around(n_mean)));
    CHECK(q.norm == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(w.norm == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(std::abs(q.mean - ea) < 1e-3 * std::abs(ea));
    CHECK(std::abs(w.mean - ea) < 1e-3 * std::abs(ea));
    CHECK(std::abs(q.mean_sq - ea2) < 1e-3 * std::abs(ea2));
    CHECK(std::abs(w.mean_sq - ea2) < 1e-3 * std::abs(ea2));
    CHECK(q.mean_abs2 == doctest::Approx(en + 1.0).epsilon(1e-3)); // anti-normal order
    CHECK(w.mean_abs2 == doctest::Approx(en + 0.5).epsilon(1e-3)); // symmetric order
}

TEST_CASE("five-photon resonance state")
{
    const DensityMatrix rho = steady_state(build_liouvillian(SystemParams::from_ratios(5000, 0.09, 0.451, 0, 25)));
    const Dense f = reduce_field(rho);
    const double n = expectation(number(rho.space), rho).real();
    const QuasiProbGrid w = wigner(f, GridSpec::around(n));
    CHECK(w.integral() == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(w.values.minCoeff() >= -2.0 / kPi * (1.0 + 1e-9));
    const QuasiProbGrid q = husimi_q(f, GridSpec::around(n));
    CHECK(q.integral() == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(q.values.minCoeff() >= 0.0);
}

TEST_CASE("empty-cavity Wigner function is a positive Gaussian")
{
    const DensityMatrix rho = steady_state(build_liouvillian(SystemParams::from_absolute(0, 1, 0, 0.5, 1.5, 25)));
    const QuasiProbGrid w = wigner(reduce_field(rho), GridSpec::around(2.0));
    CHECK(w.values.minCoeff() > -1e-10 * w.values.maxCoeff());
    const std::vector<Peak> peaks = local_maxima(w);
    REQUIRE(peaks.size() == 1);
    const Complex beta = 1.5 / Complex(1.0, -0.5);
    CHECK(peaks[0].x == doctest::Approx(beta.real()).epsilon(0.05));
    CHECK(peaks[0].y == doctest::Approx(beta.imag()).epsilon(0.05));
}

TEST_CASE("local maxima are ordered by height")
{
    QuasiProbGrid g;
    g.x_axis = Eigen::VectorXd::LinSpaced(9, -4, 4);
    g.y_axis = Eigen::VectorXd::LinSpaced(9, -4, 4);
    g.values = Eigen::MatrixXd::Zero(9, 9);
    g.values(2, 2) = 0.5;
    g.values(6, 5) = 1.0;
    g.values(4, 4) = 1e-4; // below the relative floor
    const std::vector<Peak> p = local_maxima(g);
    REQUIRE(p.size() == 2);
    CHECK(p[0].x == 1.0);
    CHECK(p[0].y == 2.0);
    CHECK(p[1].value == 0.5);
}
