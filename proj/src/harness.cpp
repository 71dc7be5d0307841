#include "jcsim/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "jcsim/operators.hpp"
#include "jcsim/parallel.hpp"
#include "jcsim/semiclassical.hpp"
#include "jcsim/spectrum.hpp"

namespace jcsim {

namespace {

const std::map<std::string, ScenarioKind> &kind_names()
{
    static const std::map<std::string, ScenarioKind> names{
        {"steady", ScenarioKind::Steady},
        {"steady_scan", ScenarioKind::SteadyScan},
        {"qgrid", ScenarioKind::QGrid},
        {"wgrid", ScenarioKind::WGrid},
        {"trajectory", ScenarioKind::Trajectory},
        {"semiclassical_curve", ScenarioKind::SemiclassicalCurve},
        {"spectrum_table", ScenarioKind::SpectrumTable},
        {"boundary_search", ScenarioKind::BoundarySearch},
    };
    return names;
}

} // namespace

std::string to_string(ScenarioKind k)
{
    for (const auto &[name, kind] : kind_names())
        if (kind == k)
            return name;
    return "?";
}

ScenarioKind scenario_kind_from(const std::string &s)
{
    const auto it = kind_names().find(s);
    if (it == kind_names().end())
        throw Error(ErrorKind::Config, "unknown scenario kind '" + s + "'");
    return it->second;
}

std::string to_string(SweepParam s)
{
    switch (s) {
    case SweepParam::DeltaOverG: return "delta_over_g";
    case SweepParam::EpsOverG: return "eps_over_g";
    case SweepParam::GOverKappa: return "g_over_kappa";
    }
    return "?";
}

SystemParams Sweep::apply(const SystemParams &base, std::size_t i) const
{
    SystemParams q = base;
    const double v = values.at(i);
    switch (param) {
    case SweepParam::DeltaOverG:
        q.delta_omega = v * q.g;
        break;
    case SweepParam::EpsOverG:
        q.eps_d = v * q.g;
        break;
    case SweepParam::GOverKappa:
        q.eps_d = base.eps_over_g() * v * q.kappa;
        q.delta_omega = base.delta_over_g() * v * q.kappa;
        q.g = v * q.kappa;
        break;
    }
    return q;
}

std::vector<std::uint64_t> Scenario::seeds() const
{
    std::vector<std::uint64_t> out(std::size_t(std::max(0, seed_count)));
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = seed_base + i;
    return out;
}

// ---------------------------------------------------------------- parsing

namespace {

class Reader {
public:
    explicit Reader(const ConfigSection &s) : s_(s) {}

    bool has(const std::string &key) const { return s_.find(key) != nullptr; }

    std::string text(const std::string &key, const std::string &fallback) const
    {
        used_.insert(key);
        const ConfigEntry *e = s_.find(key);
        return e ? e->value : fallback;
    }

    std::string required(const std::string &key) const
    {
        used_.insert(key);
        const ConfigEntry *e = s_.find(key);
        if (!e)
            fail(s_.line, "missing key '" + key + "'");
        return e->value;
    }

    double number(const std::string &key, double fallback) const
    {
        used_.insert(key);
        const ConfigEntry *e = s_.find(key);
        return e ? to_double(*e) : fallback;
    }

    double required_number(const std::string &key) const
    {
        required(key);
        return to_double(*s_.find(key));
    }

    long long integer(const std::string &key, long long fallback) const
    {
        used_.insert(key);
        const ConfigEntry *e = s_.find(key);
        if (!e)
            return fallback;
        long long v = 0;
        const char *b = e->value.data();
        const char *end = b + e->value.size();
        auto [ptr, ec] = std::from_chars(b, end, v);
        if (ec != std::errc{} || ptr != end)
            fail(e->line, "'" + key + "' expects an integer, got '" + e->value + "'");
        return v;
    }

    void check_unused() const
    {
        for (const ConfigEntry &e : s_.entries)
            if (!used_.count(e.key))
                fail(e.line, "unknown key '" + e.key + "'");
    }

    [[noreturn]] static void fail(int line, const std::string &what)
    {
        throw Error(ErrorKind::Config, "line " + std::to_string(line) + ": " + what);
    }

    int line() const { return s_.line; }

private:
    static double to_double(const ConfigEntry &e)
    {
        double v = 0.0;
        const char *b = e.value.data();
        const char *end = b + e.value.size();
        auto [ptr, ec] = std::from_chars(b, end, v);
        if (ec != std::errc{} || ptr != end || !std::isfinite(v))
            fail(e.line, "'" + e.key + "' expects a number, got '" + e.value + "'");
        return v;
    }

    const ConfigSection &s_;
    mutable std::set<std::string> used_;
};

std::vector<double> axis_values(double from, double to, int points, bool log_spacing)
{
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double s = double(i) / double(points - 1);
        v[std::size_t(i)] = log_spacing ? from * std::pow(to / from, s) : from + (to - from) * s;
    }
    v.back() = to;
    return v;
}

bool valid_name(const std::string &name)
{
    if (name.empty())
        return false;
    return std::all_of(name.begin(), name.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
}

} // namespace

Scenario parse_scenario(const ConfigSection &section)
{
    if (section.name != "scenario")
        Reader::fail(section.line, "unknown section [" + section.name + "]");
    const Reader r(section);
    Scenario s;
    s.name = r.required("name");
    if (!valid_name(s.name))
        Reader::fail(r.line(), "scenario name must be [A-Za-z0-9_.-]+");
    s.kind = scenario_kind_from(r.required("kind"));

    const double g = r.number("g_over_kappa", 0.0);
    const double eps = r.number("eps_over_g", 0.0);
    const double delta = r.number("delta_over_g", 0.0);
    const double gamma = r.number("gamma_over_kappa", 0.0);
    const std::string n_max = r.text("n_max", "auto");
    s.n_max_cap = int(r.integer("n_max_cap", 400));
    int fixed_n = 20;
    if (n_max == "auto") {
        s.auto_n_max = true;
    } else {
        s.auto_n_max = false;
        fixed_n = int(r.integer("n_max", 20));
    }
    try {
        // Eps and delta are read relative to g, so g = 0 needs absolute values.
        if (g == 0.0)
            s.params = SystemParams::from_absolute(0.0, 1.0, gamma, r.number("delta_over_kappa", 0.0),
                                                   r.number("eps_over_kappa", 0.0), fixed_n);
        else
            s.params = SystemParams::from_ratios(g, eps, delta, gamma, fixed_n);
        validate(s.params);
    } catch (const Error &e) {
        Reader::fail(r.line(), e.what());
    }
    if (g == 0.0 && (r.has("eps_over_g") || r.has("delta_over_g")))
        Reader::fail(r.line(), "with g_over_kappa = 0 use eps_over_kappa / delta_over_kappa");
    if (g != 0.0 && (r.has("eps_over_kappa") || r.has("delta_over_kappa")))
        Reader::fail(r.line(), "eps_over_kappa / delta_over_kappa only apply when g_over_kappa = 0");
    if (s.n_max_cap < 2)
        Reader::fail(r.line(), "n_max_cap must be >= 2");

    if (r.has("sweep")) {
        Sweep sw;
        const std::string param = r.required("sweep");
        if (param == "delta_over_g")
            sw.param = SweepParam::DeltaOverG;
        else if (param == "eps_over_g")
            sw.param = SweepParam::EpsOverG;
        else if (param == "g_over_kappa")
            sw.param = SweepParam::GOverKappa;
        else
            Reader::fail(r.line(), "unknown sweep parameter '" + param + "'");
        const double from = r.required_number("sweep_from");
        const double to = r.required_number("sweep_to");
        const long long points = r.integer("sweep_points", 0);
        const std::string spacing = r.text("sweep_spacing", "linear");
        if (points < 2 || from == to)
            Reader::fail(r.line(), "sweep grid must be strictly monotone with >= 2 points");
        if (spacing != "linear" && spacing != "log")
            Reader::fail(r.line(), "sweep_spacing must be linear or log");
        if (spacing == "log" && (from <= 0.0 || to <= 0.0))
            Reader::fail(r.line(), "log sweep needs positive bounds");
        if (sw.param != SweepParam::GOverKappa && s.params.g == 0.0)
            Reader::fail(r.line(), "ratio sweeps need g_over_kappa > 0");
        if (sw.param == SweepParam::GOverKappa && (from <= 0.0 || to <= 0.0))
            Reader::fail(r.line(), "g_over_kappa sweep must stay positive");
        sw.values = axis_values(from, to, int(points), spacing == "log");
        s.sweep = sw;
    }

    s.phase_scale = r.number("phase_scale", 2.0);
    if (!(s.phase_scale > 0.0))
        Reader::fail(r.line(), "phase_scale must be positive");
    if (r.has("grid_half_width") || r.has("grid_points")) {
        const double half = r.required_number("grid_half_width");
        const long long pts = r.integer("grid_points", 201);
        if (!(half > 0.0) || pts < 3)
            Reader::fail(r.line(), "grid needs grid_half_width > 0 and grid_points >= 3");
        s.grid = GridSpec{-half, half, int(pts), -half, half, int(pts)};
    }

    const std::string schedule = r.text("schedule", "constant");
    const double t_total = r.number("t_total", 10.0);
    const double ramp_from = r.number("ramp_from", 0.0);
    const double ramp_to = r.number("ramp_to", 0.0);
    if (schedule == "constant")
        s.schedule = ScanSchedule::constant(t_total);
    else if (schedule == "detuning_ramp")
        s.schedule = ScanSchedule::detuning_ramp(t_total, ramp_from, ramp_to);
    else if (schedule == "drive_triangle")
        s.schedule = ScanSchedule::drive_triangle(t_total, ramp_from, ramp_to);
    else
        Reader::fail(r.line(), "unknown schedule '" + schedule + "'");
    if (!(t_total > 0.0))
        Reader::fail(r.line(), "t_total must be positive");
    s.sample_dt = r.number("sample_dt", 0.1);
    if (!(s.sample_dt > 0.0) || s.sample_dt > t_total)
        Reader::fail(r.line(), "sample_dt must lie in (0, t_total]");
    const long long seed = r.integer("seed", 1);
    if (seed < 0)
        Reader::fail(r.line(), "seed must be non-negative");
    s.seed_base = std::uint64_t(seed);
    s.seed_count = int(r.integer("seeds", 1));
    if (s.seed_count < 1)
        Reader::fail(r.line(), "seeds must be >= 1");
    s.tolerance = r.number("tolerance", 1e-3);
    s.t_from = r.number("t_from", 0.0);

    s.m_max = int(r.integer("m_max", 5));
    if (s.m_max < 1)
        Reader::fail(r.line(), "m_max must be >= 1");
    if (r.has("omega0_over_g"))
        s.omega0_over_g = r.number("omega0_over_g", 0.0);

    s.g_lo = r.number("g_min", 20.0);
    s.g_hi = r.number("g_max", 100.0);
    if (!(s.g_lo > 0.0 && s.g_hi > s.g_lo))
        Reader::fail(r.line(), "boundary search needs 0 < g_min < g_max");

    s.workers = int(r.integer("workers", 1));
    if (s.workers < 1)
        Reader::fail(r.line(), "workers must be >= 1");
    r.check_unused();

    const bool needs_sweep = s.kind == ScenarioKind::SteadyScan
                             || s.kind == ScenarioKind::SemiclassicalCurve;
    if (needs_sweep && !s.sweep)
        Reader::fail(r.line(), to_string(s.kind) + " needs a sweep");
    if (!needs_sweep && s.sweep)
        Reader::fail(r.line(), to_string(s.kind) + " does not take a sweep");
    if (s.kind == ScenarioKind::SemiclassicalCurve && s.sweep->param == SweepParam::GOverKappa)
        Reader::fail(r.line(), "semiclassical curves sweep eps_over_g or delta_over_g");
    if (s.kind == ScenarioKind::BoundarySearch && s.params.g == 0.0)
        Reader::fail(r.line(), "boundary search needs ratios relative to g");
    return s;
}

std::vector<Scenario> load_scenarios(std::istream &is)
{
    std::vector<Scenario> out;
    std::set<std::string> names;
    for (const ConfigSection &sec : parse_config(is)) {
        Scenario s = parse_scenario(sec);
        if (!names.insert(s.name).second)
            Reader::fail(sec.line, "duplicate scenario name '" + s.name + "'");
        out.push_back(std::move(s));
    }
    if (out.empty())
        throw Error(ErrorKind::Config, "no [scenario] sections");
    return out;
}

std::vector<Scenario> load_scenarios_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::Config, "cannot open " + path);
    return load_scenarios(in);
}

std::string canonical_text(const Scenario &s)
{
    std::ostringstream os;
    os.precision(17);
    const SystemParams &p = s.params;
    os << "name = " << s.name << '\n'
       << "kind = " << to_string(s.kind) << '\n'
       << "g = " << p.g << '\n'
       << "kappa = " << p.kappa << '\n'
       << "gamma = " << p.gamma << '\n'
       << "delta_omega = " << p.delta_omega << '\n'
       << "eps_d = " << p.eps_d << '\n';
    if (s.auto_n_max)
        os << "n_max = auto\n";
    else
        os << "n_max = " << p.n_max << '\n';
    os << "n_max_cap = " << s.n_max_cap << '\n';
    if (s.sweep) {
        os << "sweep = " << to_string(s.sweep->param) << '\n' << "sweep_values =";
        for (double v : s.sweep->values)
            os << ' ' << v;
        os << '\n';
    }
    if (s.grid)
        os << "grid = " << s.grid->x_min << ' ' << s.grid->x_max << ' ' << s.grid->nx << ' '
           << s.grid->y_min << ' ' << s.grid->y_max << ' ' << s.grid->ny << '\n';
    os << "phase_scale = " << s.phase_scale << '\n'
       << "schedule = " << to_string(s.schedule.kind) << ' ' << s.schedule.t_total << ' '
       << s.schedule.start << ' ' << s.schedule.end << '\n'
       << "sample_dt = " << s.sample_dt << '\n'
       << "seed = " << s.seed_base << '\n'
       << "seeds = " << s.seed_count << '\n'
       << "tolerance = " << s.tolerance << '\n'
       << "t_from = " << s.t_from << '\n'
       << "m_max = " << s.m_max << '\n';
    if (s.omega0_over_g)
        os << "omega0_over_g = " << *s.omega0_over_g << '\n';
    os << "g_range = " << s.g_lo << ' ' << s.g_hi << '\n';
    return os.str();
}

std::uint64_t fnv1a(const std::string &text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex_hash(std::uint64_t h)
{
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

// ---------------------------------------------------------------- truncation

double truncation_estimate(const SystemParams &p)
{
    validate(p);
    const double k2 = p.kappa * p.kappa;
    if (p.g == 0.0)
        return p.eps_d * p.eps_d / (k2 + p.delta_omega * p.delta_omega);
    double mu = 0.0;
    if (p.delta_omega == 0.0 && p.gamma == 0.0) {
        // The mean-field intensity vanishes below threshold while quantum
        // fluctuations near the critical point reach ~ sqrt(n_sc).
        const double x = 2.0 * p.eps_d / p.g;
        mu = std::sqrt(derived_scales(p).n_sc) * x * x;
        if (x > 1.0)
            mu = std::max(mu, above_threshold_intensity(p));
        return std::min(mu, p.eps_d * p.eps_d / k2);
    }
    try {
        const std::vector<double> roots = mean_field_roots(p);
        if (!roots.empty())
            mu = *std::max_element(roots.begin(), roots.end());
    } catch (const Error &) {
        mu = 0.0;
    }
    return mu;
}

int auto_truncation(const SystemParams &p, int cap)
{
    const double mu = truncation_estimate(p);
    const double n = std::max(20.0, std::ceil(mu + 8.0 * std::sqrt(mu) + 10.0));
    if (n > double(cap))
        throw Error(ErrorKind::TruncationExplosion,
                    "estimated n_max " + std::to_string(int(n)) + " exceeds cap " + std::to_string(cap));
    return int(n);
}

SolvedPoint solve_auto(const SystemParams &p, int cap)
{
    int n = auto_truncation(p, cap);
    for (int attempt = 1;; ++attempt) {
        try {
            return SolvedPoint{steady_state(build_liouvillian(p.with_n_max(n))), n, attempt};
        } catch (const Error &e) {
            if (e.kind() != ErrorKind::TruncationInsufficient || attempt == 3)
                throw;
        }
        n *= 2;
        if (n > cap)
            throw Error(ErrorKind::TruncationExplosion,
                        "tail check needs n_max above cap " + std::to_string(cap));
    }
}

SteadySummary summarize(const DensityMatrix &rho)
{
    SteadySummary s;
    s.n = expectation(number(rho.space), rho).real();
    s.a = expectation(annihilation(rho.space), rho);
    s.bloch = bloch_vector(rho);
    s.tail = tail_mass(rho);
    return s;
}

// ---------------------------------------------------------------- boundary

BoundaryProbe probe_bimodality(const SystemParams &p, const BoundaryOptions &opts)
{
    const SolvedPoint solved = solve_auto(p, opts.n_max_cap);
    const Dense field = reduce_field(solved.rho);
    const double mean_n = summarize(solved.rho).n;

    QuasiOptions qo;
    qo.check_boundary = false;
    qo.workers = opts.workers;
    const QuasiProbGrid grid = husimi_q(field, GridSpec::around(mean_n, qo.convention), qo);
    std::vector<Peak> peaks = local_maxima(grid, 1e-3);

    BoundaryProbe probe;
    probe.g_over_kappa = p.g_over_kappa();
    probe.n_max = solved.n_max;
    probe.peak_count = int(peaks.size());
    if (peaks.empty())
        throw Error(ErrorKind::GridTooSmall, "no interior Q maximum");
    for (std::size_t i = 0; i < std::min<std::size_t>(2, peaks.size()); ++i)
        peaks[i] = refine_husimi_peak(field, peaks[i], grid.dx(), qo.convention);
    auto abs2 = [&](const Peak &pk) { return std::norm(qo.convention.alpha(pk.x, pk.y)); };

    if (peaks.size() >= 2) {
        const bool first_near = abs2(peaks[0]) < abs2(peaks[1]);
        probe.near_height = first_near ? peaks[0].value : peaks[1].value;
        probe.far_height = first_near ? peaks[1].value : peaks[0].value;
        probe.imbalance = (probe.far_height - probe.near_height)
                          / std::max(probe.far_height, probe.near_height);
        return probe;
    }
    // One maximum: decide which branch it belongs to from the mean-field
    // upper intensity.
    double upper = 0.0;
    try {
        const std::vector<double> roots = mean_field_roots(p);
        if (!roots.empty())
            upper = roots.back();
    } catch (const Error &) {
    }
    if (abs2(peaks[0]) > 0.5 * upper && upper > 0.0) {
        probe.far_height = peaks[0].value;
        probe.imbalance = 1.0;
    } else {
        probe.near_height = peaks[0].value;
        probe.imbalance = -1.0;
    }
    return probe;
}

BoundaryResult boundary_search(const SystemParams &base, double g_lo, double g_hi,
                               const BoundaryOptions &opts)
{
    if (!(g_lo > 0.0 && g_hi > g_lo) || base.g <= 0.0)
        throw Error(ErrorKind::InvalidParams, "boundary search needs 0 < g_lo < g_hi and g > 0");
    Sweep axis{SweepParam::GOverKappa, {}};
    BoundaryResult result;
    auto probe_at = [&](double gk) {
        axis.values = {gk};
        result.history.push_back(probe_bimodality(axis.apply(base, 0), opts));
        return result.history.back();
    };
    auto any_bimodal = [&]() {
        return std::any_of(result.history.begin(), result.history.end(),
                           [](const BoundaryProbe &b) { return b.peak_count >= 2; });
    };

    BoundaryProbe lo = probe_at(g_lo);
    BoundaryProbe hi = probe_at(g_hi);
    if ((lo.imbalance > 0.0) == (hi.imbalance > 0.0)) {
        // Look for a sign change inside the range before giving up.
        bool found = false;
        const int inner = 8;
        BoundaryProbe prev = lo;
        for (int i = 1; i <= inner && !found; ++i) {
            const double gk = g_lo * std::pow(g_hi / g_lo, double(i) / double(inner + 1));
            const BoundaryProbe cur = probe_at(gk);
            if ((cur.imbalance > 0.0) != (prev.imbalance > 0.0)) {
                lo = prev;
                hi = cur;
                found = true;
            }
            prev = cur;
        }
        if (!found) {
            if (!any_bimodal())
                throw Error(ErrorKind::NotBimodal, "Q function has one maximum over the whole range");
            throw Error(ErrorKind::NoRoot, "Q peak heights never cross inside the range");
        }
    }
    if (std::abs(lo.imbalance) < opts.tolerance && lo.peak_count >= 2) {
        result.g_over_kappa = lo.g_over_kappa;
        return result;
    }
    if (std::abs(hi.imbalance) < opts.tolerance && hi.peak_count >= 2) {
        result.g_over_kappa = hi.g_over_kappa;
        return result;
    }
    double a = lo.g_over_kappa, b = hi.g_over_kappa;
    const bool lo_positive = lo.imbalance > 0.0;
    for (int it = 0; it < opts.max_iterations; ++it) {
        const double mid = 0.5 * (a + b);
        const BoundaryProbe m = probe_at(mid);
        if (m.peak_count >= 2 && std::abs(m.imbalance) < opts.tolerance) {
            result.g_over_kappa = mid;
            return result;
        }
        if ((m.imbalance > 0.0) == lo_positive)
            a = mid;
        else
            b = mid;
        if ((b - a) < 1e-4 * mid)
            break;
    }
    if (!any_bimodal())
        throw Error(ErrorKind::NotBimodal, "no bimodal point met during the search");
    result.g_over_kappa = 0.5 * (a + b);
    return result;
}

// ---------------------------------------------------------------- running

bool RunReport::all_ok() const
{
    return std::all_of(points.begin(), points.end(), [](const PointStatus &p) { return p.ok; });
}

void write_grid(std::ostream &os, const QuasiProbGrid &grid)
{
    os << "# columns: x,y,value\n";
    std::ostringstream row;
    row.precision(9);
    for (Eigen::Index iy = 0; iy < grid.values.rows(); ++iy)
        for (Eigen::Index ix = 0; ix < grid.values.cols(); ++ix) {
            row.str("");
            row << grid.x_axis(ix) << ',' << grid.y_axis(iy) << ',' << grid.values(iy, ix);
            os << row.str() << '\n';
        }
}

namespace {

struct Output {
    std::filesystem::path path;
    std::ofstream stream;

    Output(const std::filesystem::path &p, const std::string &hash, const Scenario &s) : path(p)
    {
        stream.open(p);
        if (!stream)
            throw Error(ErrorKind::Config, "cannot write " + p.string());
        stream << "# manifest " << hash << '\n'
               << "# scenario " << s.name << " kind=" << to_string(s.kind) << '\n';
    }
};

std::string fmt(double v, int precision = 12)
{
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

std::string summary_columns()
{
    return "n_max,n,re_a,im_a,X,Y,Z,tail";
}

std::string summary_row(int n_max, const SteadySummary &s)
{
    return std::to_string(n_max) + ',' + fmt(s.n) + ',' + fmt(s.a.real()) + ',' + fmt(s.a.imag())
           + ',' + fmt(s.bloch.x) + ',' + fmt(s.bloch.y) + ',' + fmt(s.bloch.z) + ',' + fmt(s.tail);
}

std::string failed_summary_row()
{
    return "0,nan,nan,nan,nan,nan,nan,nan";
}

SolvedPoint solve_point(const Scenario &s, const SystemParams &p)
{
    if (s.auto_n_max)
        return solve_auto(p, s.n_max_cap);
    return SolvedPoint{steady_state(build_liouvillian(p)), p.n_max, 1};
}

void record_failure(PointStatus &st, const std::exception &e)
{
    st.ok = false;
    st.error = e.what();
}

void run_steady(const Scenario &s, const std::filesystem::path &dir, RunReport &rep)
{
    Output out(dir / (s.name + ".dat"), rep.hash, s);
    out.stream << "# columns: " << summary_columns() << '\n';
    PointStatus st;
    try {
        const SolvedPoint sp = solve_point(s, s.params);
        st.n_max = sp.n_max;
        out.stream << summary_row(sp.n_max, summarize(sp.rho)) << '\n';
    } catch (const std::exception &e) {
        record_failure(st, e);
    }
    rep.points.push_back(st);
    rep.files.push_back(out.path);
}

void run_scan(const Scenario &s, const std::filesystem::path &dir, RunReport &rep)
{
    const Sweep &sw = *s.sweep;
    const std::size_t n = sw.values.size();
    std::vector<PointStatus> status(n);
    std::vector<std::string> rows(n);
    parallel_for(n, s.workers, [&](std::size_t i) {
        PointStatus &st = status[i];
        st.index = i;
        st.control = sw.values[i];
        try {
            const SolvedPoint sp = solve_point(s, sw.apply(s.params, i));
            st.n_max = sp.n_max;
            rows[i] = summary_row(sp.n_max, summarize(sp.rho));
        } catch (const std::exception &e) {
            record_failure(st, e);
            rows[i] = failed_summary_row();
        }
    });
    Output out(dir / (s.name + ".dat"), rep.hash, s);
    out.stream << "# columns: " << to_string(sw.param) << ",status," << summary_columns() << '\n';
    for (std::size_t i = 0; i < n; ++i)
        out.stream << fmt(sw.values[i], 17) << ',' << (status[i].ok ? "ok" : "error") << ','
                   << rows[i] << '\n';
    rep.points = std::move(status);
    rep.files.push_back(out.path);
}

void run_grid(const Scenario &s, const std::filesystem::path &dir, RunReport &rep)
{
    PointStatus st;
    try {
        const SolvedPoint sp = solve_point(s, s.params);
        st.n_max = sp.n_max;
        const Dense field = reduce_field(sp.rho);
        QuasiOptions qo;
        qo.convention.scale = s.phase_scale;
        qo.workers = s.workers;
        GridSpec spec = s.grid ? *s.grid : GridSpec::around(summarize(sp.rho).n, qo.convention);
        const bool husimi = s.kind == ScenarioKind::QGrid;
        QuasiProbGrid grid;
        for (int attempt = 0;; ++attempt) {
            try {
                grid = husimi ? husimi_q(field, spec, qo) : wigner(field, spec, qo);
                break;
            } catch (const Error &e) {
                // an automatic window may be too tight for broad states
                if (s.grid || e.kind() != ErrorKind::GridTooSmall || attempt == 3)
                    throw;
            }
            spec.x_min *= 1.3;
            spec.x_max *= 1.3;
            spec.y_min *= 1.3;
            spec.y_max *= 1.3;
        }
        grid.params_snapshot = s.params.with_n_max(sp.n_max);

        Output out(dir / (s.name + ".dat"), rep.hash, s);
        out.stream << "# " << (husimi ? "husimi" : "wigner") << " phase_scale=" << fmt(s.phase_scale, 17)
                   << " integral=" << fmt(grid.integral()) << '\n'
                   << "# " << describe(*grid.params_snapshot) << '\n';
        write_grid(out.stream, grid);
        rep.files.push_back(out.path);

        Output peaks(dir / (s.name + "_peaks.dat"), rep.hash, s);
        peaks.stream << "# columns: x,y,value\n";
        for (Peak pk : local_maxima(grid)) {
            if (husimi)
                pk = refine_husimi_peak(field, pk, grid.dx(), qo.convention);
            peaks.stream << fmt(pk.x) << ',' << fmt(pk.y) << ',' << fmt(pk.value) << '\n';
        }
        rep.files.push_back(peaks.path);
    } catch (const std::exception &e) {
        record_failure(st, e);
    }
    rep.points.push_back(st);
}

void run_traj(const Scenario &s, const std::filesystem::path &dir, RunReport &rep)
{
    const std::vector<std::uint64_t> seeds = s.seeds();
    SystemParams p = s.params;
    if (s.auto_n_max)
        p.n_max = auto_truncation(p, s.n_max_cap);
    TrajectoryOptions opts;
    opts.tolerance = s.tolerance;
    std::vector<std::optional<TrajectoryRecord>> records(seeds.size());
    std::vector<PointStatus> status(seeds.size());
    parallel_for(seeds.size(), s.workers, [&](std::size_t i) {
        status[i].index = i;
        status[i].control = double(seeds[i]);
        status[i].n_max = p.n_max;
        try {
            records[i] = run_trajectory(p, s.schedule, seeds[i], s.sample_dt, opts);
        } catch (const std::exception &e) {
            record_failure(status[i], e);
        }
    });
    std::vector<TrajectoryRecord> done;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (!records[i])
            continue;
        Output out(dir / (s.name + "_seed" + std::to_string(seeds[i]) + ".dat"), rep.hash, s);
        write_trajectory(out.stream, *records[i]);
        rep.files.push_back(out.path);
        done.push_back(std::move(*records[i]));
    }
    if (done.size() >= 2) {
        Output out(dir / (s.name + ".dat"), rep.hash, s);
        const EnsembleSeries n = ensemble_mean(done, Observable::PhotonNumber);
        const EnsembleSeries re = ensemble_mean(done, Observable::ReA);
        const EnsembleSeries im = ensemble_mean(done, Observable::ImA);
        const ScalarEstimate lt = long_time_mean(done, Observable::PhotonNumber, s.t_from);
        out.stream << "# records=" << done.size() << " long_time_n=" << fmt(lt.mean)
                   << " stderr=" << fmt(lt.stderr_) << " t_from=" << fmt(s.t_from) << '\n'
                   << "# columns: t,n,n_stderr,re_a,re_a_stderr,im_a,im_a_stderr\n";
        for (std::size_t t = 0; t < n.times.size(); ++t)
            out.stream << fmt(n.times[t]) << ',' << fmt(n.mean[t]) << ',' << fmt(n.stderr_[t]) << ','
                       << fmt(re.mean[t]) << ',' << fmt(re.stderr_[t]) << ',' << fmt(im.mean[t])
                       << ',' << fmt(im.stderr_[t]) << '\n';
        rep.files.push_back(out.path);
    }
    rep.points = std::move(status);
}

void run_semiclassical(const Scenario &s, const std::filesystem::path &dir, RunReport &rep)
{
    const Sweep &sw = *s.sweep;
    BranchCurve curve;
    curve.control = sw.param == SweepParam::EpsOverG ? BranchControl::EpsOverG
                                                     : BranchControl::DeltaOverG;
    curve.params_snapshot = s.params;
    std::vector<std::optional<BranchPoint>> pts(sw.values.size());
    std::vector<PointStatus> status(sw.values.size());
    parallel_for(sw.values.size(), s.workers, [&](std::size_t i) {
        status[i].index = i;
        status[i].control = sw.values[i];
        try {
            BranchPoint bp;
            bp.control = sw.values[i];
            bp.roots = mean_field_roots(sw.apply(s.params, i));
            bp.labels = s_curve_labels(bp.roots.size());
            pts[i] = std::move(bp);
        } catch (const std::exception &e) {
            record_failure(status[i], e);
        }
    });
    for (auto &bp : pts)
        if (bp)
            curve.points.push_back(std::move(*bp));
    Output out(dir / (s.name + ".dat"), rep.hash, s);
    write_branch_curve(out.stream, curve);
    rep.files.push_back(out.path);
    rep.points = std::move(status);
}

void run_spectrum(const Scenario &s, const std::filesystem::path &dir, RunReport &rep)
{
    std::vector<SpectralLine> lines;
    for (int m = 1; m <= s.m_max; ++m) {
        PointStatus st;
        st.index = std::size_t(m - 1);
        st.control = m;
        try {
            const auto [plus, minus] = quasi_energies(m, s.params);
            lines.push_back(plus);
            lines.push_back(minus);
            if (s.omega0_over_g) {
                const auto [up, down] = dressed_frequencies(m, *s.omega0_over_g, 1.0);
                lines.push_back(up);
                lines.push_back(down);
            }
        } catch (const std::exception &e) {
            record_failure(st, e);
        }
        rep.points.push_back(st);
    }
    Output out(dir / (s.name + ".dat"), rep.hash, s);
    write_spectrum_table(out.stream, lines);
    rep.files.push_back(out.path);
}

void run_boundary(const Scenario &s, const std::filesystem::path &dir, RunReport &rep)
{
    PointStatus st;
    BoundaryOptions opts;
    opts.n_max_cap = s.n_max_cap;
    opts.workers = s.workers;
    Output out(dir / (s.name + ".dat"), rep.hash, s);
    try {
        const BoundaryResult r = boundary_search(s.params, s.g_lo, s.g_hi, opts);
        st.control = r.g_over_kappa;
        out.stream << "# boundary g_over_kappa=" << fmt(r.g_over_kappa) << '\n'
                   << "# columns: g_over_kappa,n_max,peaks,near_height,far_height,imbalance\n";
        for (const BoundaryProbe &b : r.history)
            out.stream << fmt(b.g_over_kappa) << ',' << b.n_max << ',' << b.peak_count << ','
                       << fmt(b.near_height) << ',' << fmt(b.far_height) << ','
                       << fmt(b.imbalance) << '\n';
    } catch (const std::exception &e) {
        record_failure(st, e);
    }
    rep.points.push_back(st);
    rep.files.push_back(out.path);
}

void write_manifest(const Scenario &s, const std::filesystem::path &dir, RunReport &rep)
{
    const std::filesystem::path path = dir / (s.name + ".manifest");
    std::ofstream os(path);
    if (!os)
        throw Error(ErrorKind::Config, "cannot write " + path.string());
    os << "# manifest " << rep.hash << '\n'
       << "version = " << kCodeVersion << '\n'
       << "[config]\n"
       << canonical_text(s) << "[points]\n"
       << "index,control,n_max,status,message\n";
    for (const PointStatus &p : rep.points)
        os << p.index << ',' << fmt(p.control, 17) << ',' << p.n_max << ','
           << (p.ok ? "ok" : "error") << ',' << p.error << '\n';
    rep.files.push_back(path);
}

} // namespace

RunReport run_scenario(const Scenario &s, const std::filesystem::path &out_dir)
{
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw Error(ErrorKind::Config, "cannot create " + out_dir.string() + ": " + ec.message());
    RunReport rep;
    rep.scenario = s.name;
    rep.hash = hex_hash(fnv1a(canonical_text(s)));
    switch (s.kind) {
    case ScenarioKind::Steady: run_steady(s, out_dir, rep); break;
    case ScenarioKind::SteadyScan: run_scan(s, out_dir, rep); break;
    case ScenarioKind::QGrid:
    case ScenarioKind::WGrid: run_grid(s, out_dir, rep); break;
    case ScenarioKind::Trajectory: run_traj(s, out_dir, rep); break;
    case ScenarioKind::SemiclassicalCurve: run_semiclassical(s, out_dir, rep); break;
    case ScenarioKind::SpectrumTable: run_spectrum(s, out_dir, rep); break;
    case ScenarioKind::BoundarySearch: run_boundary(s, out_dir, rep); break;
    }
    write_manifest(s, out_dir, rep);
    return rep;
}

} // namespace jcsim
