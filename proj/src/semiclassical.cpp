#include "jcsim/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "jcsim/error.hpp"
#include "jcsim/parallel.hpp"
#include "jcsim/roots.hpp"

namespace jcsim {

namespace {

constexpr int kScanPoints = 20000;
constexpr double kScanFloor = 1e-12;

double drive2(const SystemParams &p)
{
    const double e = p.eps_d / p.kappa;
    return e * e;
}

double n_sc(const SystemParams &p)
{
    return p.g * p.g / (4.0 * p.kappa * p.kappa);
}

double relative_residual(double u, double rhs)
{
    const double scale = std::max(std::abs(u), std::abs(rhs));
    return scale > 0.0 ? (u - rhs) / scale : 0.0;
}

// Roots of F on (0, hi] where F(0) < 0: the grid starts at kScanFloor, with a
// bisection on [0, floor] when the sign already changed below it.
template <typename Fn>
std::vector<double> positive_roots(Fn &&fn, double hi)
{
    std::vector<double> roots;
    if (fn(kScanFloor) > 0.0)
        roots.push_back(bisect(fn, 0.0, kScanFloor));
    if (hi > kScanFloor) {
        auto more = bracket_roots(fn, kScanFloor, hi, kScanPoints, true);
        roots.insert(roots.end(), more.begin(), more.end());
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots;
}

bool is_zero_detuning(const SystemParams &p)
{
    return p.delta_omega == 0.0;
}

} // namespace

double neoclassical_f(const SystemParams &p, double u)
{
    const double k = p.kappa;
    const double dw = p.delta_omega / k;
    if (p.g == 0.0)
        return 1.0 / (1.0 + dw * dw);
    const double gk = p.g / k;
    const double sgn = dw > 0.0 ? 1.0 : (dw < 0.0 ? -1.0 : 0.0);
    const double inner = dw * dw / (gk * gk * gk * gk) + u / n_sc(p);
    const double bracket = dw - sgn / std::sqrt(inner);
    return 1.0 / (1.0 + bracket * bracket);
}

double neoclassical_residual(const SystemParams &p, double u)
{
    return relative_residual(u, drive2(p) * neoclassical_f(p, u));
}

std::vector<double> neoclassical_roots(const SystemParams &p)
{
    validate(p);
    if (is_zero_detuning(p))
        throw Error(ErrorKind::ResonanceSingular,
                    "the scaling law needs delta != 0; use above_threshold on resonance");
    const double e2 = drive2(p);
    if (e2 == 0.0)
        return {0.0};
    if (p.g == 0.0)
        return {e2 * neoclassical_f(p, 0.0)};
    auto fn = [&](double u) { return u - e2 * neoclassical_f(p, u); };
    const double hi = 10.0 * e2 + 10.0 * n_sc(p);
    std::vector<double> roots = positive_roots(fn, hi);
    if (roots.empty())
        throw Error(ErrorKind::NoRoot, "no root of the scaling law for eps > 0");
    return roots;
}

Complex spontaneous_h(const SystemParams &p, double u)
{
    const double k = p.kappa;
    const double dw = p.delta_omega / k;
    if (p.g == 0.0)
        return 1.0 / Complex(1.0, -dw);
    const Complex gt(0.5 * p.gamma / k, dw); // gamma~ = gamma/2 + i delta
    const double gt2 = std::norm(gt);
    if (gt2 == 0.0)
        throw Error(ErrorKind::ResonanceSingular, "gamma = 0 and delta = 0");
    const double gk = p.g / k;
    const double n_wc_tilde = gt2 / (2.0 * gk * gk);
    const Complex coupling = gk * gk * gt / gt2;
    return 1.0 / (Complex(1.0, -dw) + coupling / (1.0 + u / n_wc_tilde));
}

double spontaneous_residual(const SystemParams &p, double u)
{
    return relative_residual(u, drive2(p) * std::norm(spontaneous_h(p, u)));
}

std::vector<double> spontaneous_roots(const SystemParams &p)
{
    validate(p);
    const double e2 = drive2(p);
    if (p.g > 0.0 && p.gamma == 0.0 && is_zero_detuning(p))
        throw Error(ErrorKind::ResonanceSingular, "gamma = 0 and delta = 0");
    if (e2 == 0.0)
        return {0.0};
    if (p.g == 0.0)
        return {e2 * std::norm(spontaneous_h(p, 0.0))};
    auto fn = [&](double u) { return u - e2 * std::norm(spontaneous_h(p, u)); };
    // |h| <= 1, so every root lies in (0, e2].
    std::vector<double> roots = positive_roots(fn, e2 * (1.0 + 1e-12));
    if (roots.empty())
        throw Error(ErrorKind::NoRoot, "no root of the spontaneous-emission law");
    return roots;
}

KerrMapping kerr_effective(const SystemParams &p)
{
    validate(p);
    if (is_zero_detuning(p))
        throw Error(ErrorKind::InvalidParams, "Kerr mapping needs delta != 0");
    const double dw = p.delta_omega;
    KerrMapping k;
    k.delta_bar = dw - p.g * p.g / dw;
    const double g4 = std::pow(p.g, 4);
    k.bistable = k.delta_bar * k.delta_bar > 3.0 * p.kappa * p.kappa
                 && k.delta_bar * (g4 / (dw * dw * dw)) < 0.0;
    if (p.g > 0.0) {
        const double ratio = p.eps_d / (2.0 * p.g);
        k.vac_rabi_amp2 = std::cbrt(ratio * ratio);
        k.vac_rabi_valid = ratio < 0.1;
    }
    return k;
}

double bistability_onset_detuning(const SystemParams &p)
{
    validate(p);
    const double r = std::sqrt(3.0) * p.kappa / p.g;
    // r == 1 is the boundary case and still well defined.
    if (p.g == 0.0 || r > 1.0 + 4.0 * std::numeric_limits<double>::epsilon())
        throw Error(ErrorKind::CouplingTooWeak, "g must be at least sqrt(3) kappa");
    const double c = std::max(0.0, 1.0 - r);
    return std::sqrt(0.5 * (1.0 + c * c));
}

std::pair<double, double> offset_detuning(const SystemParams &p)
{
    validate(p);
    if (!(p.eps_d > 0.0))
        throw Error(ErrorKind::InvalidParams, "offset detuning needs eps > 0");
    // 2x^2 (sqrt(1 + x^-4 / 4) - 1) rewritten as 1 / (sqrt(4x^4 + 1) + 2x^2).
    const double x2 = drive2(p);
    const double d2 = 1.0 / (std::sqrt(4.0 * x2 * x2 + 1.0) + 2.0 * x2);
    const double d = std::sqrt(d2);
    return {d, -d};
}

AsymptoticRoots asymptotic_roots(const SystemParams &p)
{
    validate(p);
    if (is_zero_detuning(p))
        throw Error(ErrorKind::ResonanceSingular, "asymptotic roots are 0/0 on resonance");
    const double dw = p.delta_omega;
    AsymptoticRoots r;
    const double plus = (p.g + 2.0 * p.eps_d) / (2.0 * dw);
    const double minus = (p.g - 2.0 * p.eps_d) / (2.0 * dw);
    r.amp2_plus = plus * plus;
    r.amp2_minus = minus * minus;
    const double g2 = p.g * p.g;
    r.plus_valid = 4.0 * g2 * r.amp2_plus > 10.0 * dw * dw;
    r.minus_valid = 4.0 * g2 * r.amp2_minus > 10.0 * dw * dw;
    return r;
}

AnharmonicResult anharmonic_n(const SystemParams &p)
{
    validate(p);
    const double e2 = drive2(p);
    const double gk = p.g / p.kappa;
    auto fn = [&](double n) {
        const double b = 1.0 - n / std::sqrt(4.0 * n * n + 1.0);
        return n + gk * gk * b * b - e2;
    };
    AnharmonicResult r;
    r.asymptote = e2 - n_sc(p);
    r.asymptote_applicable = p.g > 0.0 && std::pow(2.0 * p.eps_d / p.g, 2) > 2.0;
    if (e2 == 0.0) {
        r.root_found = p.g == 0.0;
        return r;
    }
    std::vector<double> roots;
    if (fn(0.0) == 0.0)
        roots.push_back(0.0);
    auto more = bracket_roots(fn, kScanFloor, e2, kScanPoints, true);
    roots.insert(roots.end(), more.begin(), more.end());
    if (fn(0.0) < 0.0 && fn(kScanFloor) > 0.0)
        roots.push_back(bisect(fn, 0.0, kScanFloor));
    if (!roots.empty()) {
        r.root_found = true;
        r.n = *std::max_element(roots.begin(), roots.end());
    }
    return r;
}

ThresholdStates above_threshold(const SystemParams &p)
{
    validate(p);
    if (!is_zero_detuning(p))
        throw Error(ErrorKind::InvalidParams, "threshold states are defined on resonance");
    if (p.g == 0.0)
        throw Error(ErrorKind::InvalidParams, "threshold states need g > 0");
    const double scaled = 2.0 * p.eps_d / p.g;
    if (scaled < 1.0 - 1e-12)
        throw Error(ErrorKind::BelowThreshold, "eps < g/2: mean-field amplitude is zero");
    ThresholdStates s;
    if (scaled <= 1.0 + 1e-12) {
        s.degenerate = true;
        s.theta_plus = s.theta_minus = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    const double r = p.g / (2.0 * p.eps_d);
    const double one_minus = 1.0 - r * r;
    const double re = (p.eps_d / p.kappa) * one_minus;
    const double im = (p.g / (2.0 * p.kappa)) * std::sqrt(one_minus);
    s.alpha_plus = Complex(re, im);
    s.alpha_minus = Complex(re, -im);
    const double theta = std::atan(1.0 / std::sqrt(scaled * scaled - 1.0));
    s.theta_plus = theta;
    s.theta_minus = -theta;
    s.small_angle_valid = scaled > 10.0;
    return s;
}

double above_threshold_intensity(const SystemParams &p)
{
    const double scaled = 2.0 * p.eps_d / p.g;
    return n_sc(p) * (scaled * scaled - 1.0);
}

BlochVector bloch_below_threshold(double eps_over_g)
{
    if (eps_over_g < 0.0)
        throw Error(ErrorKind::InvalidParams, "drive must be non-negative");
    if (eps_over_g > 0.5)
        throw Error(ErrorKind::AboveThreshold, "Bloch curve defined for eps/g <= 1/2");
    const double x = -2.0 * eps_over_g;
    return BlochVector{x, 0.0, -std::sqrt(std::max(0.0, 1.0 - x * x))};
}

WeakDrive weak_drive_photon(const SystemParams &p)
{
    validate(p);
    if (p.g == 0.0)
        throw Error(ErrorKind::InvalidParams, "weak-drive law needs g > 0");
    const double r = p.eps_d / p.g;
    return WeakDrive{2.0 * r * r * r * r, r < 0.15};
}

std::string to_string(BranchControl c)
{
    return c == BranchControl::EpsOverG ? "eps_over_g" : "delta_over_g";
}

std::string to_string(StabilityLabel l)
{
    switch (l) {
    case StabilityLabel::Stable: return "stable";
    case StabilityLabel::Unstable: return "unstable";
    case StabilityLabel::Fold: return "fold";
    }
    return "?";
}

namespace {

StabilityLabel label_from_string(const std::string &s)
{
    if (s == "stable")
        return StabilityLabel::Stable;
    if (s == "unstable")
        return StabilityLabel::Unstable;
    if (s == "fold")
        return StabilityLabel::Fold;
    throw Error(ErrorKind::Config, "unknown stability label '" + s + "'");
}

} // namespace

std::vector<StabilityLabel> s_curve_labels(std::size_t count)
{
    if (count == 2)
        return {StabilityLabel::Fold, StabilityLabel::Fold};
    std::vector<StabilityLabel> labels(count, StabilityLabel::Unstable);
    if (count > 0) {
        labels.front() = StabilityLabel::Stable;
        labels.back() = StabilityLabel::Stable;
    }
    return labels;
}

std::vector<std::size_t> BranchCurve::fold_indices() const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        if (points[i].roots.size() != points[i + 1].roots.size())
            out.push_back(i);
    return out;
}

std::vector<double> mean_field_roots(const SystemParams &p)
{
    if (p.gamma > 0.0)
        return spontaneous_roots(p);
    if (is_zero_detuning(p)) {
        if (p.g == 0.0)
            return {drive2(p)};
        if (2.0 * p.eps_d < p.g)
            return {0.0};
        return {above_threshold_intensity(p)};
    }
    return neoclassical_roots(p);
}

BranchCurve branch_curve(const SystemParams &base, BranchControl control,
                         const std::vector<double> &values, int workers)
{
    validate(base);
    if (base.g == 0.0)
        throw Error(ErrorKind::InvalidParams, "branch curves are parameterised in units of g");
    BranchCurve curve;
    curve.control = control;
    curve.params_snapshot = base;
    curve.points.resize(values.size());
    parallel_for(values.size(), workers, [&](std::size_t i) {
        SystemParams p = base;
        if (control == BranchControl::EpsOverG)
            p.eps_d = values[i] * p.g;
        else
            p.delta_omega = values[i] * p.g;
        BranchPoint pt;
        pt.control = values[i];
        pt.roots = mean_field_roots(p);
        pt.labels = s_curve_labels(pt.roots.size());
        curve.points[i] = std::move(pt);
    });
    return curve;
}

void write_branch_curve(std::ostream &os, const BranchCurve &curve)
{
    const SystemParams &p = curve.params_snapshot;
    os << "# branch_curve control=" << to_string(curve.control) << '\n';
    os << "# " << describe(p) << '\n';
    os << "# columns: control,count,root_1..root_count,label_1..label_count\n";
    std::ostringstream line;
    line.precision(17);
    for (const BranchPoint &pt : curve.points) {
        line.str("");
        line << pt.control << ',' << pt.roots.size();
        for (double r : pt.roots)
            line << ',' << r;
        for (StabilityLabel l : pt.labels)
            line << ',' << to_string(l);
        os << line.str() << '\n';
    }
}

BranchCurve read_branch_curve(std::istream &is)
{
    BranchCurve curve;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        if (line[0] == '#') {
            if (line.find("control=delta_over_g") != std::string::npos)
                curve.control = BranchControl::DeltaOverG;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (cells.size() < 2)
            throw Error(ErrorKind::Config, "malformed branch row: " + line);
        BranchPoint pt;
        pt.control = std::stod(cells[0]);
        const std::size_t count = std::stoul(cells[1]);
        if (cells.size() != 2 + 2 * count)
            throw Error(ErrorKind::Config, "branch row has wrong cell count: " + line);
        for (std::size_t k = 0; k < count; ++k)
            pt.roots.push_back(std::stod(cells[2 + k]));
        for (std::size_t k = 0; k < count; ++k)
            pt.labels.push_back(label_from_string(cells[2 + count + k]));
        curve.points.push_back(std::move(pt));
    }
    return curve;
}

} // namespace jcsim
