#ifndef JCSIM_HARNESS_HPP
#define JCSIM_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "jcsim/config.hpp"
#include "jcsim/error.hpp"
#include "jcsim/master_equation.hpp"
#include "jcsim/observables.hpp"
#include "jcsim/params.hpp"
#include "jcsim/trajectories.hpp"

namespace jcsim {

inline constexpr const char *kCodeVersion = "jcsim 0.1.0";

enum class ScenarioKind {
    Steady,
    SteadyScan,
    QGrid,
    WGrid,
    Trajectory,
    SemiclassicalCurve,
    SpectrumTable,
    BoundarySearch,
};

std::string to_string(ScenarioKind k);
ScenarioKind scenario_kind_from(const std::string &s);

enum class SweepParam { DeltaOverG, EpsOverG, GOverKappa };

std::string to_string(SweepParam s);

struct Sweep {
    SweepParam param = SweepParam::DeltaOverG;
    std::vector<double> values; ///< strictly monotone

    SystemParams apply(const SystemParams &base, std::size_t i) const;
};

struct Scenario {
    std::string name;
    ScenarioKind kind = ScenarioKind::Steady;
    SystemParams params;
    bool auto_n_max = true;
    int n_max_cap = 400;
    std::optional<Sweep> sweep;

    // phase-space grids
    std::optional<GridSpec> grid; ///< sized from <n> when empty
    double phase_scale = 2.0;

    // trajectories
    ScanSchedule schedule;
    double sample_dt = 0.1;
    std::uint64_t seed_base = 1;
    int seed_count = 1;
    double tolerance = 1e-3;
    double t_from = 0.0; ///< start of the long-time average

    // spectra
    int m_max = 5;
    std::optional<double> omega0_over_g;

    // boundary search
    double g_lo = 20.0;
    double g_hi = 100.0;

    int workers = 1;

    std::vector<std::uint64_t> seeds() const;
};

/// Throws Error(Config) on unknown keys, missing keys or bad values.
Scenario parse_scenario(const ConfigSection &section);
std::vector<Scenario> load_scenarios(std::istream &is);
std::vector<Scenario> load_scenarios_file(const std::string &path);

/// Every field that influences outputs, one `key = value` per line.
/// `workers` is left out so the hash is independent of parallelism.
std::string canonical_text(const Scenario &s);
std::uint64_t fnv1a(const std::string &text);
std::string hex_hash(std::uint64_t h);

/// Photon-number scale used to size the Fock space.
double truncation_estimate(const SystemParams &p);
/// max(20, ceil(mu + 8 sqrt(mu) + 10)); throws TruncationExplosion above cap.
int auto_truncation(const SystemParams &p, int cap = 400);

struct SolvedPoint {
    DensityMatrix rho;
    int n_max = 0;
    int attempts = 0;
};

/// Steady state with automatic truncation: the Fock space is doubled
/// (at most twice) while the tail-mass invariant fails.
SolvedPoint solve_auto(const SystemParams &p, int cap = 400);

/// Steady-state summary row.
struct SteadySummary {
    double n = 0.0;
    Complex a;
    BlochVector bloch;
    double tail = 0.0;
};

SteadySummary summarize(const DensityMatrix &rho);

struct BoundaryProbe {
    double g_over_kappa = 0.0;
    int n_max = 0;
    int peak_count = 0;
    double near_height = 0.0; ///< Q at the dim (near-vacuum) maximum
    double far_height = 0.0;  ///< Q at the bright maximum
    double imbalance = 0.0;   ///< (far - near) / max(far, near), or +-1 for one peak
};

struct BoundaryResult {
    double g_over_kappa = 0.0;
    std::vector<BoundaryProbe> history;
};

struct BoundaryOptions {
    double tolerance = 1e-2;
    int max_iterations = 40;
    int n_max_cap = 400;
    int workers = 1;
};

BoundaryProbe probe_bimodality(const SystemParams &p, const BoundaryOptions &opts = {});

/// Bisection on g/kappa for equal heights of the two Q maxima.
BoundaryResult boundary_search(const SystemParams &base, double g_lo, double g_hi,
                               const BoundaryOptions &opts = {});

struct PointStatus {
    std::size_t index = 0;
    double control = 0.0;
    int n_max = 0;
    bool ok = true;
    std::string error;
};

struct RunReport {
    std::string scenario;
    std::string hash;
    std::vector<PointStatus> points;
    std::vector<std::filesystem::path> files;

    bool all_ok() const;
};

/// Runs one scenario and writes `<name>.dat` (plus any auxiliary tables) and
/// `<name>.manifest` under `out_dir`. Errors at individual sweep points or
/// seeds are recorded and the remaining work continues.
RunReport run_scenario(const Scenario &s, const std::filesystem::path &out_dir);

/// Grid rows `x,y,value` with 9 significant digits.
void write_grid(std::ostream &os, const QuasiProbGrid &grid);

} // namespace jcsim

#endif // JCSIM_HARNESS_HPP
