#include "jcsim/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "jcsim/error.hpp"
#include "jcsim/operators.hpp"
#include "jcsim/parallel.hpp"

namespace jcsim {

ScanSchedule ScanSchedule::constant(double t_total)
{
    return ScanSchedule{ScheduleKind::Constant, t_total, 0.0, 0.0};
}

ScanSchedule ScanSchedule::detuning_ramp(double t_total, double from, double to)
{
    return ScanSchedule{ScheduleKind::DetuningRamp, t_total, from, to};
}

ScanSchedule ScanSchedule::drive_triangle(double t_total, double from, double peak)
{
    return ScanSchedule{ScheduleKind::DriveTriangle, t_total, from, peak};
}

SystemParams ScanSchedule::at(const SystemParams &base, double t) const
{
    SystemParams p = base;
    const double s = std::clamp(t / t_total, 0.0, 1.0);
    switch (kind) {
    case ScheduleKind::Constant:
        break;
    case ScheduleKind::DetuningRamp:
        p.delta_omega = p.g * (start + (end - start) * s);
        break;
    case ScheduleKind::DriveTriangle: {
        const double up = s <= 0.5 ? 2.0 * s : 2.0 * (1.0 - s);
        p.eps_d = p.g * (start + (end - start) * up);
        break;
    }
    }
    return p;
}

std::string to_string(ScheduleKind k)
{
    switch (k) {
    case ScheduleKind::Constant: return "constant";
    case ScheduleKind::DetuningRamp: return "detuning_ramp";
    case ScheduleKind::DriveTriangle: return "drive_triangle";
    }
    return "?";
}

namespace {

std::uint64_t splitmix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double unit_interval(std::uint64_t bits)
{
    return double(bits >> 11) * 0x1.0p-53;
}

} // namespace

double counter_normal(std::uint64_t seed, std::uint64_t channel, std::uint64_t cell,
                      std::uint64_t level, std::uint64_t position, std::uint64_t component)
{
    std::uint64_t h = splitmix(seed ^ 0x6a09e667f3bcc908ULL);
    h = splitmix(h ^ channel);
    h = splitmix(h ^ cell);
    h = splitmix(h ^ level);
    h = splitmix(h ^ position);
    h = splitmix(h ^ component);
    const double u1 = 1.0 - unit_interval(splitmix(h)); // (0, 1]
    const double u2 = unit_interval(splitmix(h ^ 0xbb67ae8584caa73bULL));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<Complex> bridge_increments(Complex total, double length, int level,
                                       std::uint64_t seed, std::uint64_t channel,
                                       std::uint64_t cell)
{
    std::vector<Complex> cur{total};
    double h = length;
    for (int l = 1; l <= level; ++l) {
        std::vector<Complex> next(cur.size() * 2);
        // Each real component has variance h/2 over the parent interval, so
        // the midpoint deviates from the chord with variance h/8.
        const double sd = std::sqrt(h / 8.0);
        for (std::size_t j = 0; j < cur.size(); ++j) {
            const Complex dev(sd * counter_normal(seed, channel, cell, l, j, 0),
                              sd * counter_normal(seed, channel, cell, l, j, 1));
            const Complex left = 0.5 * cur[j] + dev;
            next[2 * j] = left;
            next[2 * j + 1] = cur[j] - left;
        }
        cur = std::move(next);
        h *= 0.5;
    }
    return cur;
}

namespace {

/// Normalised QSD stepper for one trajectory.
class QsdStepper {
public:
    QsdStepper(const SystemParams &p, const ScanSchedule &schedule)
        : base_(p), schedule_(schedule), space_(p.n_max), parts_(hamiltonian_parts(space_))
    {
        excitation_ = parts_.excitation.entries.diagonal();
        const SpMat a = annihilation(space_).entries;
        channels_.push_back(std::sqrt(2.0 * p.kappa) * a);
        if (p.gamma > 0.0)
            channels_.push_back(std::sqrt(p.gamma) * atom_operators(space_).sigma_minus.entries);
        decay_ = SpMat(space_.dim(), space_.dim());
        for (const SpMat &l : channels_)
            decay_ += SpMat(SpMat(l.adjoint()) * l);
        decay_.makeCompressed();
        lpsi_.resize(channels_.size());
        lmean_.resize(channels_.size());
    }

    const TruncatedSpace &space() const { return space_; }
    std::size_t channel_count() const { return channels_.size(); }

    /// Bound on the generator norm at time t.
    double stiffness(double t) const
    {
        const SystemParams q = schedule_.at(base_, t);
        const double n = space_.n_max;
        return std::abs(q.delta_omega) * (n + 1.0) + q.g * std::sqrt(n)
               + 2.0 * q.eps_d * std::sqrt(n) + q.kappa * n + 0.5 * q.gamma;
    }

    /// One substep. Returns the embedded error estimate of the drift.
    double step(Ket &psi, double t, double dt, const std::vector<Complex> &dw)
    {
        const SystemParams q = schedule_.at(base_, t);
        drift(q, psi, d1_, true);
        pred_ = psi + dt * d1_;
        drift(q, pred_, d2_, false);
        const double err = 0.5 * dt * (d2_ - d1_).norm();
        next_ = psi + (0.5 * dt) * (d1_ + d2_);
        for (std::size_t k = 0; k < channels_.size(); ++k)
            next_ += dw[k] * (lpsi_[k] - lmean_[k] * psi);
        next_ /= next_.norm();
        psi.swap(next_);
        return err;
    }

private:
    // D(psi) = -i H psi + sum_k (conj<L_k> L_k - |<L_k>|^2 / 2) psi - (1/2) sum_k L_k^dag L_k psi.
    // With `keep`, L_k psi and <L_k> are stored for the noise term.
    void drift(const SystemParams &q, const Ket &psi, Ket &out, bool keep)
    {
        const double norm2 = psi.squaredNorm();
        hpsi_ = Complex(-q.delta_omega) * excitation_.cwiseProduct(psi);
        if (q.g != 0.0)
            hpsi_ += Complex(q.g) * (parts_.coupling.entries * psi);
        if (q.eps_d != 0.0)
            hpsi_ += Complex(q.eps_d) * (parts_.drive.entries * psi);
        out = -kI * hpsi_ - 0.5 * (decay_ * psi);
        for (std::size_t k = 0; k < channels_.size(); ++k) {
            tmp_ = channels_[k] * psi;
            const Complex mean = psi.dot(tmp_) / norm2;
            out += std::conj(mean) * tmp_ - (0.5 * std::norm(mean)) * psi;
            if (keep) {
                lpsi_[k] = tmp_;
                lmean_[k] = mean;
            }
        }
    }

    SystemParams base_;
    ScanSchedule schedule_;
    TruncatedSpace space_;
    HamiltonianParts parts_;
    Ket excitation_;
    std::vector<SpMat> channels_;
    SpMat decay_;
    std::vector<Ket> lpsi_;
    std::vector<Complex> lmean_;
    Ket d1_, d2_, pred_, next_, hpsi_, tmp_;
};

void append_sample(TrajectoryRecord &rec, const TruncatedSpace &space, const SpMat &a,
                   const Ket &psi, double t)
{
    const int levels = space.photon_levels();
    const double norm2 = psi.squaredNorm();
    double n = 0.0;
    for (int s = 0; s < 2; ++s)
        for (int k = 1; k < levels; ++k)
            n += k * std::norm(psi(space.index(s, k)));
    rec.times.push_back(t);
    rec.a_mean.push_back(psi.dot(a * psi) / norm2);
    rec.n_mean.push_back(n / norm2);
    rec.bloch.push_back(bloch_vector(space, psi));
    rec.max_norm_error = std::max(rec.max_norm_error, std::abs(norm2 - 1.0));
}

} // namespace

TrajectoryRecord run_trajectory(const SystemParams &p, const ScanSchedule &schedule,
                                std::uint64_t seed, double sample_dt,
                                const TrajectoryOptions &opts)
{
    validate(p);
    if (!(schedule.t_total > 0.0))
        throw Error(ErrorKind::InvalidParams, "schedule duration must be positive");
    if (!(sample_dt > 0.0) || sample_dt > schedule.t_total)
        throw Error(ErrorKind::InvalidParams, "sample_dt must lie in (0, t_total]");
    if (opts.noise_level < 0 || opts.noise_level > 20)
        throw Error(ErrorKind::InvalidParams, "noise_level out of range");

    QsdStepper stepper(p, schedule);
    const TruncatedSpace &space = stepper.space();
    const SpMat a = annihilation(space).entries;

    Ket psi;
    if (opts.initial_state) {
        if (opts.initial_state->size() != space.dim())
            throw Error(ErrorKind::DimensionMismatch, "initial state has wrong dimension");
        psi = *opts.initial_state / opts.initial_state->norm();
    } else {
        psi = Ket::Zero(space.dim());
        psi(space.index(0, 0)) = 1.0;
    }

    TrajectoryRecord rec;
    rec.seed = seed;
    rec.params = p;
    rec.schedule = schedule;
    const std::size_t samples = std::size_t(std::floor(schedule.t_total / sample_dt + 1e-9)) + 1;
    rec.times.reserve(samples);
    append_sample(rec, space, a, psi, 0.0);

    const std::uint64_t cells_per_sample = std::uint64_t(1) << opts.noise_level;
    const double dt_noise = sample_dt / double(cells_per_sample);
    const std::size_t nch = stepper.channel_count();
    std::vector<Complex> cell_dw(nch);
    std::vector<std::vector<Complex>> sub_dw(nch);
    std::vector<Complex> dw(nch);
    int level_hint = 0;
    Ket saved;

    for (std::size_t s = 1; s < samples; ++s) {
        for (std::uint64_t c = 0; c < cells_per_sample; ++c) {
            const std::uint64_t cell = (s - 1) * cells_per_sample + c;
            const double t_cell = double(cell) * dt_noise;
            const double sd = std::sqrt(0.5 * dt_noise);
            for (std::size_t k = 0; k < nch; ++k)
                cell_dw[k] = Complex(sd * counter_normal(seed, k, cell, 0, 0, 0),
                                     sd * counter_normal(seed, k, cell, 0, 0, 1));

            const double stiff = std::max(stepper.stiffness(t_cell),
                                          stepper.stiffness(t_cell + dt_noise));
            int level_min = 0;
            while (dt_noise / double(1 << level_min) * stiff > opts.stiffness_cap)
                ++level_min;
            int level = std::max(level_min, level_hint - 1);
            saved = psi;
            for (;;) {
                const double dt = dt_noise / double(1 << level);
                if (dt < opts.min_step || level > 40)
                    throw Error(ErrorKind::StepUnderflow,
                                "adaptive step fell below " + std::to_string(opts.min_step));
                for (std::size_t k = 0; k < nch; ++k)
                    sub_dw[k] = bridge_increments(cell_dw[k], dt_noise, level, seed, k, cell);
                bool ok = true;
                const int nsub = 1 << level;
                for (int j = 0; j < nsub; ++j) {
                    for (std::size_t k = 0; k < nch; ++k)
                        dw[k] = sub_dw[k][std::size_t(j)];
                    const double err = stepper.step(psi, t_cell + j * dt, dt, dw);
                    if (!(err <= opts.tolerance)) {
                        ok = false;
                        break;
                    }
                }
                rec.substeps += std::uint64_t(nsub);
                if (ok)
                    break;
                psi = saved;
                ++level;
            }
            level_hint = level;
        }
        append_sample(rec, space, a, psi, double(s) * sample_dt);
    }
    return rec;
}

std::vector<TrajectoryRecord> run_ensemble(const SystemParams &p, const ScanSchedule &schedule,
                                           const std::vector<std::uint64_t> &seeds,
                                           double sample_dt, const TrajectoryOptions &opts,
                                           int workers)
{
    std::vector<TrajectoryRecord> out(seeds.size());
    parallel_for(seeds.size(), workers, [&](std::size_t i) {
        out[i] = run_trajectory(p, schedule, seeds[i], sample_dt, opts);
    });
    return out;
}

std::vector<double> series(const TrajectoryRecord &r, Observable obs)
{
    std::vector<double> out(r.times.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        switch (obs) {
        case Observable::PhotonNumber: out[i] = r.n_mean[i]; break;
        case Observable::ReA: out[i] = r.a_mean[i].real(); break;
        case Observable::ImA: out[i] = r.a_mean[i].imag(); break;
        case Observable::X: out[i] = r.bloch[i].x; break;
        case Observable::Y: out[i] = r.bloch[i].y; break;
        case Observable::Z: out[i] = r.bloch[i].z; break;
        }
    }
    return out;
}

namespace {

void require_shared_schedule(const std::vector<TrajectoryRecord> &records)
{
    if (records.size() < 2)
        throw Error(ErrorKind::InvalidParams, "ensemble statistics need at least two records");
    const TrajectoryRecord &ref = records.front();
    for (const TrajectoryRecord &r : records)
        if (!(r.schedule == ref.schedule) || r.times != ref.times)
            throw Error(ErrorKind::ScheduleMismatch, "records do not share a schedule");
}

ScalarEstimate mean_and_stderr(const std::vector<double> &xs)
{
    ScalarEstimate e;
    e.samples = xs.size();
    double sum = 0.0;
    for (double x : xs)
        sum += x;
    e.mean = sum / double(xs.size());
    double ss = 0.0;
    for (double x : xs)
        ss += (x - e.mean) * (x - e.mean);
    e.stderr_ = std::sqrt(ss / double(xs.size() - 1) / double(xs.size()));
    return e;
}

} // namespace

EnsembleSeries ensemble_mean(const std::vector<TrajectoryRecord> &records, Observable obs)
{
    require_shared_schedule(records);
    const std::size_t nt = records.front().times.size();
    std::vector<std::vector<double>> cols;
    cols.reserve(records.size());
    for (const TrajectoryRecord &r : records)
        cols.push_back(series(r, obs));
    EnsembleSeries out;
    out.times = records.front().times;
    out.mean.resize(nt);
    out.stderr_.resize(nt);
    std::vector<double> xs(records.size());
    for (std::size_t t = 0; t < nt; ++t) {
        for (std::size_t i = 0; i < records.size(); ++i)
            xs[i] = cols[i][t];
        const ScalarEstimate e = mean_and_stderr(xs);
        out.mean[t] = e.mean;
        out.stderr_[t] = e.stderr_;
    }
    return out;
}

ScalarEstimate long_time_mean(const std::vector<TrajectoryRecord> &records, Observable obs,
                              double t_from)
{
    require_shared_schedule(records);
    std::vector<double> averages;
    averages.reserve(records.size());
    for (const TrajectoryRecord &r : records) {
        const std::vector<double> v = series(r, obs);
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < v.size(); ++i)
            if (r.times[i] >= t_from) {
                sum += v[i];
                ++count;
            }
        if (count == 0)
            throw Error(ErrorKind::InvalidParams, "no samples after t_from");
        averages.push_back(sum / double(count));
    }
    return mean_and_stderr(averages);
}

DwellStatistics dwell_statistics(const std::vector<double> &times, const std::vector<double> &values,
                                 const Band &low, const Band &high)
{
    if (times.size() != values.size())
        throw Error(ErrorKind::DimensionMismatch, "times and values differ in length");
    if (!(low.lo <= low.hi) || !(high.lo <= high.hi))
        throw Error(ErrorKind::InvalidParams, "band bounds reversed");
    if (!(low.hi < high.lo || high.hi < low.lo))
        throw Error(ErrorKind::BandsOverlap, "dwell bands must be disjoint");

    DwellStatistics st;
    st.segments.reserve(values.size());
    Segment state = Segment::Transit;
    double entered = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        Segment cls = Segment::Transit;
        if (low.contains(values[i]))
            cls = Segment::Low;
        else if (high.contains(values[i]))
            cls = Segment::High;
        st.segments.push_back(cls);
        if (cls == Segment::Transit || cls == state)
            continue;
        if (state != Segment::Transit) {
            ++st.switch_count;
            (state == Segment::Low ? st.low_dwell : st.high_dwell).push_back(times[i] - entered);
        }
        state = cls;
        entered = times[i];
    }
    return st;
}

DwellStatistics dwell_statistics(const TrajectoryRecord &record, Observable obs, const Band &low,
                                 const Band &high)
{
    return dwell_statistics(record.times, series(record, obs), low, high);
}

void write_trajectory(std::ostream &os, const TrajectoryRecord &r)
{
    os << "# trajectory seed=" << r.seed << '\n';
    os << "# " << describe(r.params) << '\n';
    {
        std::ostringstream h;
        h.precision(17);
        h << "# schedule kind=" << to_string(r.schedule.kind) << " t_total=" << r.schedule.t_total
          << " start=" << r.schedule.start << " end=" << r.schedule.end;
        os << h.str() << '\n';
    }
    os << "# columns: t,re_a,im_a,n,X,Y,Z\n";
    std::ostringstream row;
    row.precision(12);
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        row.str("");
        row << r.times[i] << ',' << r.a_mean[i].real() << ',' << r.a_mean[i].imag() << ','
            << r.n_mean[i] << ',' << r.bloch[i].x << ',' << r.bloch[i].y << ',' << r.bloch[i].z;
        os << row.str() << '\n';
    }
}

} // namespace jcsim
