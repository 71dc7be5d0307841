#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "jcsim/harness.hpp"
#include "jcsim/semiclassical.hpp"

using namespace jcsim;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(auto &&fn)
{
    try {
        fn();
    } catch (const Error &e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::InvalidParams;
}

std::vector<Scenario> load(const std::string &text)
{
    std::istringstream is(text);
    return load_scenarios(is);
}

std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch(const std::string &name)
{
    const fs::path dir = fs::temp_directory_path() / ("jcsim_test_" + name);
    fs::remove_all(dir);
    return dir;
}

} // namespace

TEST_CASE("config text")
{
    std::istringstream ok("# leading comment\n[a]\nx = 1 ; trailing\n\n[b]\ny=two words\n[a]\nx = 3\n");
    const auto sections = parse_config(ok);
    REQUIRE(sections.size() == 3);
    CHECK(sections[0].name == "a");
    CHECK(sections[0].find("x")->value == "1");
    CHECK(sections[1].find("y")->value == "two words");
    CHECK(sections[1].find("x") == nullptr);
    CHECK(sections[2].line == 7);

    for (const char *bad : {"x = 1\n[a]\n", "[a]\njust words\n", "[a]\nx=1\nx=2\n", "[a\nx=1\n", "[a]\n= 4\n"}) {
        std::istringstream is(bad);
        CHECK(kind_of([&] { parse_config(is); }) == ErrorKind::Config);
    }
    CHECK(kind_of([] { parse_config_file("/nonexistent/jcsim.ini"); }) == ErrorKind::Config);
}

TEST_CASE("scenario parsing")
{
    const auto s = load("[scenario]\nname = p\nkind = steady\ng_over_kappa = 200\neps_over_g = 0.09\n"
                        "delta_over_g = 0.45\nn_max = 30\nworkers = 3\n");
    REQUIRE(s.size() == 1);
    CHECK(s[0].name == "p");
    CHECK(s[0].params.g_over_kappa() == 200);
    CHECK(s[0].params.n_max == 30);
    CHECK_FALSE(s[0].auto_n_max);
    CHECK(s[0].workers == 3);

    const auto scan = load("[scenario]\nname = s\nkind = steady_scan\ng_over_kappa = 50\neps_over_g = 0.1\n"
                           "sweep = delta_over_g\nsweep_from = 0.2\nsweep_to = 1.0\nsweep_points = 5\n");
    REQUIRE(scan[0].sweep);
    CHECK(scan[0].sweep->values.size() == 5);
    CHECK(scan[0].sweep->values[2] == doctest::Approx(0.6));

    const auto logs = load("[scenario]\nname = s\nkind = steady_scan\ng_over_kappa = 50\neps_over_g = 0.1\n"
                           "sweep = g_over_kappa\nsweep_from = 10\nsweep_to = 1000\nsweep_points = 3\n"
                           "sweep_spacing = log\n");
    CHECK(logs[0].sweep->values[1] == doctest::Approx(100));
    const SystemParams moved = logs[0].sweep->apply(logs[0].params, 2);
    CHECK(moved.g_over_kappa() == doctest::Approx(1000));
    CHECK(moved.eps_over_g() == doctest::Approx(0.1));

    const auto cavity = load("[scenario]\nname = c\nkind = steady\ng_over_kappa = 0\neps_over_kappa = 2\n");
    CHECK(cavity[0].params.eps_over_kappa() == 2);

    const char *bad[] = {
        "",
        "[scenario]\nname = x\ng_over_kappa = 1\n",
        "[scenario]\nname = x\nkind = nonsense\n",
        "[scenario]\nname = x\nkind = steady\ncolour = red\n",
        "[scenario]\nname = x\nkind = steady\ng_over_kappa = abc\n",
        "[scenario]\nname = x\nkind = steady\ng_over_kappa = 5 5\n",
        "[scenario]\nname = x\nkind = steady\nn_max = -3\n",
        "[scenario]\nname = x\nkind = steady_scan\ng_over_kappa = 5\n",
        "[scenario]\nname = x\nkind = steady\nsweep = eps_over_g\nsweep_from = 0\nsweep_to = 1\nsweep_points = 3\n",
        "[scenario]\nname = x\nkind = steady\ng_over_kappa = 0\neps_over_g = 1\n",
        "[scenario]\nname = x\nkind = steady\n[scenario]\nname = x\nkind = steady\n",
        "[scenario]\nname = x\nkind = steady\nworkers = 0\n",
    };
    for (const char *text : bad)
        CHECK_MESSAGE(kind_of([&] { load(text); }) == ErrorKind::Config, text);
}

TEST_CASE("manifest hash")
{
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(hex_hash(0xabcULL) == "0000000000000abc");

    const std::string base = "[scenario]\nname = p\nkind = steady\ng_over_kappa = 20\neps_over_g = 0.1\ndelta_over_g = 0.5\n";
    const Scenario a = load(base)[0];
    const Scenario b = load(base + "workers = 4\n")[0];
    const Scenario c = load("[scenario]\nname = p\nkind = steady\ng_over_kappa = 20\neps_over_g = 0.1\ndelta_over_g = 0.51\n")[0];
    CHECK(canonical_text(a) == canonical_text(b));
    CHECK(fnv1a(canonical_text(a)) == fnv1a(canonical_text(load(base)[0])));
    CHECK(fnv1a(canonical_text(a)) != fnv1a(canonical_text(c)));
    CHECK(canonical_text(a).find("workers") == std::string::npos);
}

TEST_CASE("automatic truncation")
{
    CHECK(auto_truncation(SystemParams::from_absolute(0, 1, 0, 0, 2)) >= 30);
    CHECK(auto_truncation(SystemParams::from_ratios(200, 0.0, 0.0)) == 20);

    const SystemParams blockade = SystemParams::from_ratios(200, 0.09, 1.0 / std::sqrt(5.0));
    const SolvedPoint sp = solve_auto(blockade);
    CHECK(sp.n_max >= 20);
    CHECK(tail_mass(sp.rho) < 1e-6);

    CHECK(auto_truncation(SystemParams::from_ratios(100, 0.495, 0.0)) >= 80);
    CHECK(kind_of([] { auto_truncation(SystemParams::from_ratios(100, 0.8, 0.0), 60); })
          == ErrorKind::TruncationExplosion);
}

TEST_CASE("scan output is independent of the worker count")
{
    const std::string text = "[scenario]\nname = w\nkind = steady_scan\ng_over_kappa = 20\neps_over_g = 0.1\n"
                             "sweep = delta_over_g\nsweep_from = 0.3\nsweep_to = 1.1\nsweep_points = 7\n";
    Scenario s = load(text)[0];
    const fs::path d1 = scratch("w1"), d4 = scratch("w4");
    s.workers = 1;
    const RunReport r1 = run_scenario(s, d1);
    s.workers = 4;
    const RunReport r4 = run_scenario(s, d4);
    CHECK(r1.all_ok());
    CHECK(r1.hash == r4.hash);
    CHECK(slurp(d1 / "w.dat") == slurp(d4 / "w.dat"));
    CHECK(slurp(d1 / "w.manifest") == slurp(d4 / "w.manifest"));

    const std::string dat = slurp(d1 / "w.dat");
    CHECK(dat.find("# manifest " + r1.hash) == 0);
    const std::string manifest = slurp(d1 / "w.manifest");
    CHECK(manifest.find(kCodeVersion) != std::string::npos);
    CHECK(manifest.find(canonical_text(s)) != std::string::npos);
    fs::remove_all(d1);
    fs::remove_all(d4);
}

TEST_CASE("failing points are isolated")
{
    // Past threshold on resonance the estimated Fock space outgrows the cap.
    const Scenario s = load("[scenario]\nname = f\nkind = steady_scan\ng_over_kappa = 50\ndelta_over_g = 0\n"
                            "n_max_cap = 40\nsweep = eps_over_g\nsweep_from = 0.02\nsweep_to = 0.8\n"
                            "sweep_points = 4\n")[0];
    const fs::path dir = scratch("fail");
    const RunReport r = run_scenario(s, dir);
    REQUIRE(r.points.size() == 4);
    CHECK(r.points.front().ok);
    CHECK_FALSE(r.points.back().ok);
    CHECK_FALSE(r.all_ok());
    CHECK(r.points.back().error.find("TruncationExplosion") != std::string::npos);
    const std::string dat = slurp(dir / "f.dat");
    CHECK(std::count(dat.begin(), dat.end(), '\n') > 4);
    fs::remove_all(dir);
}

TEST_CASE("spectrum and semiclassical scenarios")
{
    const fs::path dir = scratch("tables");
    const auto scenarios = load("[scenario]\nname = collapse\nkind = spectrum_table\ng_over_kappa = 10\neps_over_g = 0.5\n"
                                "m_max = 4\n"
                                "[scenario]\nname = curve\nkind = semiclassical_curve\ng_over_kappa = 5000\n"
                                "delta_over_g = 0.408248290463863\nsweep = eps_over_g\n"
                                "sweep_from = 0.19\nsweep_to = 0.2\nsweep_points = 3\n");
    REQUIRE(scenarios.size() == 2);

    const RunReport spec = run_scenario(scenarios[0], dir);
    CHECK(spec.all_ok());
    std::istringstream rows(slurp(dir / "collapse.dat"));
    std::string line;
    int values = 0;
    while (std::getline(rows, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("n,", 0) == 0)
            continue;
        std::istringstream fields(line);
        std::string n, sign, value;
        std::getline(fields, n, ',');
        std::getline(fields, sign, ',');
        std::getline(fields, value, ',');
        CHECK(std::stod(value) == 0.0);
        ++values;
    }
    CHECK(values == 8);

    const RunReport curve = run_scenario(scenarios[1], dir);
    CHECK(curve.all_ok());
    std::istringstream in(slurp(dir / "curve.dat"));
    const BranchCurve bc = read_branch_curve(in);
    REQUIRE(bc.points.size() == 3);
    const BranchPoint &mid = bc.points[1];
    CHECK(mid.control == doctest::Approx(0.195));
    REQUIRE(mid.roots.size() == 3);
    CHECK(mid.roots.back() == doctest::Approx(2.7).epsilon(0.1));
    fs::remove_all(dir);
}

TEST_CASE("trajectory scenario writes one record per seed")
{
    const fs::path dir = scratch("traj");
    const Scenario s = load("[scenario]\nname = t\nkind = trajectory\ng_over_kappa = 5\neps_over_g = 0.09\n"
                            "delta_over_g = 1\nn_max = 6\nt_total = 2\nsample_dt = 0.5\n"
                            "seed = 11\nseeds = 3\n")[0];
    CHECK(s.seeds() == std::vector<std::uint64_t>{11, 12, 13});
    const RunReport r = run_scenario(s, dir);
    CHECK(r.all_ok());
    for (int seed : {11, 12, 13})
        CHECK(fs::exists(dir / ("t_seed" + std::to_string(seed) + ".dat")));
    CHECK(fs::exists(dir / "t.dat"));
    fs::remove_all(dir);
}

TEST_CASE("boundary search rejects a range without two maxima")
{
    // Far below threshold the Q function has a single peak everywhere.
    const SystemParams weak = SystemParams::from_ratios(20, 0.02, 0.0);
    const ErrorKind k = kind_of([&] { boundary_search(weak, 5, 10); });
    CHECK((k == ErrorKind::NotBimodal || k == ErrorKind::NoRoot));
    CHECK(kind_of([&] { boundary_search(weak, 10, 5); }) == ErrorKind::InvalidParams);
}
