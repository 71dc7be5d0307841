#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <vector>

#include "jcsim/error.hpp"
#include "jcsim/operators.hpp"

using namespace jcsim;

namespace {

Dense dense(const OperatorMatrix &op)
{
    return Dense(op.entries);
}

} // namespace

TEST_CASE("truncated space layout")
{
    const TruncatedSpace s(7);
    CHECK(s.dim() == 16);
    CHECK(s.index(0, 3) == 3);
    CHECK(s.index(1, 0) == 8);
}

TEST_CASE("annihilation operator")
{
    const TruncatedSpace s(6);
    const Dense a = dense(annihilation(s));
    CHECK(a(s.index(0, 1), s.index(0, 2)).real() == doctest::Approx(std::sqrt(2.0)));
    CHECK(a(s.index(1, 1), s.index(1, 2)).real() == doctest::Approx(std::sqrt(2.0)));
    CHECK(a.col(s.index(0, 0)).norm() == 0.0);
    CHECK(a.col(s.index(1, 0)).norm() == 0.0);
    // no atom flips
    CHECK(a(s.index(0, 1), s.index(1, 2)) == Complex(0.0));
    const Dense n = dense(number(s));
    CHECK(n(s.index(1, 6), s.index(1, 6)).real() == 6.0);
}

TEST_CASE("commutator [a, a+] is the identity away from the top level")
{
    const TruncatedSpace s(9);
    const Dense a = dense(annihilation(s));
    const Dense c = a * a.adjoint() - a.adjoint() * a;
    for (int atom = 0; atom < 2; ++atom)
        for (int n = 0; n < s.n_max; ++n)
            for (int atom2 = 0; atom2 < 2; ++atom2)
                for (int m = 0; m < s.n_max; ++m) {
                    const Complex expected = (atom == atom2 && n == m) ? 1.0 : 0.0;
                    CHECK(std::abs(c(s.index(atom, n), s.index(atom2, m)) - expected) < 1e-14);
                }
    // the truncation artefact sits on the top level only
    CHECK(c(s.index(0, s.n_max), s.index(0, s.n_max)).real() == doctest::Approx(-double(s.n_max)));
}

TEST_CASE("atom operators")
{
    const TruncatedSpace s(4);
    const AtomOperators at = atom_operators(s);
    const Dense sp = dense(at.sigma_plus), sm = dense(at.sigma_minus), sz = dense(at.sigma_z);
    const Dense sx = dense(at.sigma_x), sy = dense(at.sigma_y);
    const Dense id = Dense::Identity(s.dim(), s.dim());

    CHECK((sz - (2.0 * sp * sm - id)).norm() < 1e-14);
    CHECK((sx * sy - sy * sx - 2.0 * kI * sz).norm() < 1e-14);
    CHECK((sp + sm - sx).norm() == 0.0);
    CHECK((sm.col(s.index(0, 2))).norm() == 0.0);

    Eigen::SelfAdjointEigenSolver<Dense> es(sz);
    const Eigen::VectorXd ev = es.eigenvalues();
    CHECK((ev.array() == -1.0).count() == s.photon_levels());
    CHECK((ev.array() == 1.0).count() == s.photon_levels());
}

TEST_CASE("hermitian flag is verified on construction")
{
    const TruncatedSpace s(3);
    CHECK_THROWS_AS(OperatorMatrix(s, annihilation(s).entries, true), Error);
    CHECK_NOTHROW(OperatorMatrix(s, number(s).entries, true));
    try {
        OperatorMatrix(TruncatedSpace(4), number(s).entries);
        FAIL("dimension mismatch accepted");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::DimensionMismatch);
    }
}

TEST_CASE("hamiltonian")
{
    SUBCASE("uncoupled and undriven: minus detuning times excitation number")
    {
        const SystemParams p = SystemParams::from_absolute(0, 1, 0, 0.7, 0, 5);
        const Dense h = dense(hamiltonian(p));
        const TruncatedSpace s(5);
        CHECK((h - Dense(h.diagonal().asDiagonal())).norm() == 0.0);
        for (int atom = 0; atom < 2; ++atom)
            for (int n = 0; n <= 5; ++n)
                CHECK(h(s.index(atom, n), s.index(atom, n)).real() == doctest::Approx(-0.7 * (atom + n)));
    }
    SUBCASE("dressed-state spectrum on resonance")
    {
        const double g = 3.0;
        const int n_max = 12;
        const SystemParams p = SystemParams::from_absolute(g, 1, 0, 0, 0, n_max);
        Eigen::SelfAdjointEigenSolver<Dense> es(dense(hamiltonian(p)));
        std::vector<double> got(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
        // The truncated space closes every doublet except |e, n_max>, which
        // pairs with nothing and sits at zero.
        std::vector<double> expected{0.0, 0.0};
        for (int n = 1; n <= n_max; ++n) {
            expected.push_back(std::sqrt(double(n)) * g);
            expected.push_back(-std::sqrt(double(n)) * g);
        }
        std::sort(expected.begin(), expected.end());
        REQUIRE(got.size() == expected.size());
        for (std::size_t i = 0; i < got.size(); ++i)
            CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-10).scale(g));
    }
    SUBCASE("blockade point is hermitian to round-off")
    {
        const OperatorMatrix h = hamiltonian(SystemParams::from_ratios(5, 0.09, 1, 0, 15));
        CHECK(hermiticity_residual(h.entries) < 1e-12);
        CHECK(h.hermitian_hint);
    }
    SUBCASE("parts recombine into the full operator")
    {
        const SystemParams p = SystemParams::from_ratios(4, 0.3, -0.6, 0, 7);
        const HamiltonianParts parts = hamiltonian_parts(TruncatedSpace(7));
        const Dense sum = -p.delta_omega * dense(parts.excitation) + p.g * dense(parts.coupling)
                          + p.eps_d * dense(parts.drive);
        CHECK((sum - dense(hamiltonian(p))).norm() < 1e-13);
    }
}
