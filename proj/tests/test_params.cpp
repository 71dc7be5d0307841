#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "jcsim/error.hpp"
#include "jcsim/params.hpp"

using namespace jcsim;

TEST_CASE("from_ratios stores rates in units of kappa")
{
    const SystemParams p = SystemParams::from_ratios(200, 0.09, 0.45, 0.5, 30);
    CHECK(p.kappa == 1.0);
    CHECK(p.g == doctest::Approx(200));
    CHECK(p.eps_d == doctest::Approx(18));
    CHECK(p.delta_omega == doctest::Approx(90));
    CHECK(p.gamma == doctest::Approx(0.5));
    CHECK(p.n_max == 30);
    CHECK(p.eps_over_g() == doctest::Approx(0.09));
    CHECK(p.delta_over_g() == doctest::Approx(0.45));
}

TEST_CASE("from_absolute divides by kappa")
{
    const SystemParams p = SystemParams::from_absolute(10, 2, 1, -4, 3, 12);
    CHECK(p.kappa == 1.0);
    CHECK(p.g == 5.0);
    CHECK(p.gamma == 0.5);
    CHECK(p.delta_omega == -2.0);
    CHECK(p.eps_d == 1.5);
    CHECK(std::isnan(SystemParams::from_absolute(0, 1, 0, 0, 1).eps_over_g()));
}

TEST_CASE("validate rejects out-of-range parameters")
{
    SystemParams p = SystemParams::from_ratios(5, 0.1, 0.2);
    CHECK_NOTHROW(validate(p));
    auto rejects = [](SystemParams q) {
        try {
            validate(q);
        } catch (const Error &e) {
            return e.kind() == ErrorKind::InvalidParams;
        }
        return false;
    };
    SystemParams q = p;
    q.kappa = 0;
    CHECK(rejects(q));
    q = p;
    q.g = -1;
    CHECK(rejects(q));
    q = p;
    q.gamma = -0.1;
    CHECK(rejects(q));
    q = p;
    q.eps_d = -1;
    CHECK(rejects(q));
    q = p;
    q.n_max = 0;
    CHECK(rejects(q));
    q = p;
    q.delta_omega = NAN;
    CHECK(rejects(q));
}

TEST_CASE("derived scales")
{
    SUBCASE("strong coupling scale")
    {
        CHECK(derived_scales(SystemParams::from_ratios(5000, 0.09, 0.45)).n_sc
              == doctest::Approx(6.25e6));
    }
    SUBCASE("zero coupling leaves g-scaled values absent")
    {
        const ScaleSet s = derived_scales(SystemParams::from_absolute(0, 1, 1, 0.3, 0.5));
        CHECK(s.n_sc == 0.0);
        CHECK_FALSE(s.n_wc.has_value());
        CHECK_FALSE(s.n_K.has_value());
        CHECK_FALSE(s.scaled_drive.has_value());
    }
    SUBCASE("scaled drive")
    {
        CHECK(*derived_scales(SystemParams::from_ratios(100, 0.495, 0)).scaled_drive
              == doctest::Approx(0.99));
    }
    SUBCASE("weak coupling and Kerr scales")
    {
        const ScaleSet s = derived_scales(SystemParams::from_ratios(10, 0.1, 0.5, 4));
        CHECK(*s.n_wc == doctest::Approx(16.0 / 800.0));
        CHECK(*s.n_K == doctest::Approx(0.125));
        // |gamma/2 + i delta|^2 / (2 g^2) = (4 + 25) / 200
        CHECK(*s.n_wc_tilde == doctest::Approx(29.0 / 200.0));
    }
}

TEST_CASE("property: derived scales are invariant under a common rescaling of rates")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.01, 10.0);
    for (int i = 0; i < 200; ++i) {
        const double g = u(rng), k = u(rng), gm = u(rng), d = u(rng) - 5.0, e = u(rng);
        const double c = u(rng);
        const ScaleSet a = derived_scales(SystemParams::from_absolute(g, k, gm, d, e));
        const ScaleSet b = derived_scales(SystemParams::from_absolute(c * g, c * k, c * gm, c * d, c * e));
        CHECK(a.n_sc == doctest::Approx(b.n_sc).epsilon(1e-12));
        CHECK(*a.n_wc == doctest::Approx(*b.n_wc).epsilon(1e-12));
        CHECK(*a.n_K == doctest::Approx(*b.n_K).epsilon(1e-12));
        CHECK(*a.scaled_drive == doctest::Approx(*b.scaled_drive).epsilon(1e-12));
        CHECK(*a.n_wc_tilde == doctest::Approx(*b.n_wc_tilde).epsilon(1e-12));
    }
}

TEST_CASE("describe round-trips values at full precision")
{
    const SystemParams p = SystemParams::from_ratios(5000, 0.09, 0.4526);
    const std::string d = describe(p);
    CHECK(d.find("g/kappa=5000 ") != std::string::npos);
    CHECK(d.find("n_max=20") != std::string::npos);
}
