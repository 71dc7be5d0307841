#ifndef JCSIM_ROOTS_HPP
#define JCSIM_ROOTS_HPP

#include <cmath>
#include <vector>

#include "jcsim/error.hpp"

namespace jcsim {

/// Bisection on a sign-changing bracket until the bracket is at machine
/// resolution (or `rel_tol` relative). Returns the endpoint with the smaller
/// residual.
template <typename Fn>
double bisect(Fn &&fn, double lo, double hi, double rel_tol = 1e-15)
{
    double flo = fn(lo);
    double fhi = fn(hi);
    if (flo == 0.0)
        return lo;
    if (fhi == 0.0)
        return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw Error(ErrorKind::NoRoot, "bracket does not change sign");
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi || (hi - lo) <= rel_tol * std::abs(mid))
            break;
        const double fm = fn(mid);
        if (fm == 0.0)
            return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    return std::abs(flo) <= std::abs(fhi) ? lo : hi;
}

/// Every sign change of fn on a grid of `points` nodes over [lo, hi]
/// (log-spaced when `log_spacing`), each refined by bisection. Roots sharing a
/// grid node are reported once.
template <typename Fn>
std::vector<double> bracket_roots(Fn &&fn, double lo, double hi, int points, bool log_spacing)
{
    std::vector<double> roots;
    if (!(hi > lo) || points < 2)
        return roots;
    auto node = [&](int i) {
        const double t = double(i) / double(points - 1);
        if (log_spacing)
            return i == points - 1 ? hi : lo * std::pow(hi / lo, t);
        return i == points - 1 ? hi : lo + (hi - lo) * t;
    };
    double x0 = node(0);
    double f0 = fn(x0);
    if (f0 == 0.0)
        roots.push_back(x0);
    for (int i = 1; i < points; ++i) {
        const double x1 = node(i);
        const double f1 = fn(x1);
        if (f1 == 0.0) {
            roots.push_back(x1);
        } else if (f0 != 0.0 && (f0 > 0.0) != (f1 > 0.0)) {
            roots.push_back(bisect(fn, x0, x1));
        }
        x0 = x1;
        f0 = f1;
    }
    return roots;
}

} // namespace jcsim

#endif // JCSIM_ROOTS_HPP
