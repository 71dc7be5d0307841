#ifndef JCSIM_TRAJECTORIES_HPP
#define JCSIM_TRAJECTORIES_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "jcsim/observables.hpp"
#include "jcsim/params.hpp"
#include "jcsim/types.hpp"

namespace jcsim {

enum class ScheduleKind { Constant, DetuningRamp, DriveTriangle };

/// Piecewise-linear parameter schedule over [0, t_total] (units of 1/kappa).
///
/// DetuningRamp moves delta/g linearly from `start` to `end`. DriveTriangle
/// moves eps/g from `start` to `end` at t_total/2 and back to `start`.
struct ScanSchedule {
    ScheduleKind kind = ScheduleKind::Constant;
    double t_total = 1.0;
    double start = 0.0;
    double end = 0.0;

    static ScanSchedule constant(double t_total);
    static ScanSchedule detuning_ramp(double t_total, double from, double to);
    static ScanSchedule drive_triangle(double t_total, double from, double peak);

    /// Parameters in force at time t.
    SystemParams at(const SystemParams &base, double t) const;

    bool operator==(const ScanSchedule &) const = default;
};

std::string to_string(ScheduleKind k);

struct TrajectoryRecord {
    std::uint64_t seed = 0;
    SystemParams params;
    ScanSchedule schedule;
    std::vector<double> times;
    std::vector<Complex> a_mean;
    std::vector<double> n_mean;
    std::vector<BlochVector> bloch;
    /// Largest |<psi|psi> - 1| seen at any sample.
    double max_norm_error = 0.0;
    std::uint64_t substeps = 0;
};

struct TrajectoryOptions {
    /// Embedded deterministic error bound per substep (state norm units).
    double tolerance = 1e-3;
    /// Upper bound on dt * ||H||.
    double stiffness_cap = 0.05;
    /// The noise grid is sample_dt / 2^noise_level.
    int noise_level = 6;
    double min_step = 1e-12;
    /// Initial joint state; ground state and vacuum when empty.
    std::optional<Ket> initial_state;
};

/// Normalised quantum state diffusion with channels sqrt(2 kappa) a and, for
/// gamma > 0, sqrt(gamma) sigma_-. Each channel has its own complex Wiener
/// process with E|dW|^2 = dt.
TrajectoryRecord run_trajectory(const SystemParams &p, const ScanSchedule &schedule,
                                std::uint64_t seed, double sample_dt,
                                const TrajectoryOptions &opts = {});

std::vector<TrajectoryRecord> run_ensemble(const SystemParams &p, const ScanSchedule &schedule,
                                           const std::vector<std::uint64_t> &seeds,
                                           double sample_dt, const TrajectoryOptions &opts = {},
                                           int workers = 1);

/// Standard normal keyed by a counter tuple; the generator behind the noise.
double counter_normal(std::uint64_t seed, std::uint64_t channel, std::uint64_t cell,
                      std::uint64_t level, std::uint64_t position, std::uint64_t component);

/// Splits a complex Wiener increment over `length` into 2^level equal-time
/// increments by Brownian bridging; draws are keyed by the counter tuple so the
/// path at any level is a refinement of the coarser ones.
std::vector<Complex> bridge_increments(Complex total, double length, int level,
                                       std::uint64_t seed, std::uint64_t channel,
                                       std::uint64_t cell);

enum class Observable { PhotonNumber, ReA, ImA, X, Y, Z };

std::vector<double> series(const TrajectoryRecord &r, Observable obs);

struct EnsembleSeries {
    std::vector<double> times;
    std::vector<double> mean;
    std::vector<double> stderr_;
};

/// Pointwise mean and standard error. Needs >= 2 records sharing a schedule.
EnsembleSeries ensemble_mean(const std::vector<TrajectoryRecord> &records, Observable obs);

struct ScalarEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t samples = 0;
};

/// Per-record time average over t >= t_from, then mean and standard error
/// across records (records are independent).
ScalarEstimate long_time_mean(const std::vector<TrajectoryRecord> &records, Observable obs,
                              double t_from);

struct Band {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double v) const { return v >= lo && v <= hi; }
};

enum class Segment { Low, High, Transit };

struct DwellStatistics {
    std::vector<Segment> segments;   ///< per-sample classification
    std::vector<double> low_dwell;   ///< completed visits to the low band
    std::vector<double> high_dwell;  ///< completed visits to the high band
    std::size_t switch_count = 0;
};

/// Hysteresis segmentation of an observable series between two disjoint
/// bands. A visit starts at the first sample inside a band and ends at the
/// first later sample inside the other band.
DwellStatistics dwell_statistics(const std::vector<double> &times, const std::vector<double> &values,
                                 const Band &low, const Band &high);
DwellStatistics dwell_statistics(const TrajectoryRecord &record, Observable obs, const Band &low,
                                 const Band &high);

/// Header (params, schedule, seed) then rows: t, Re<a>, Im<a>, <n>, X, Y, Z.
void write_trajectory(std::ostream &os, const TrajectoryRecord &r);

} // namespace jcsim

#endif // JCSIM_TRAJECTORIES_HPP
