#include "jcsim/params.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "jcsim/error.hpp"

namespace jcsim {

SystemParams SystemParams::from_ratios(double g_over_kappa, double eps_over_g,
                                       double delta_over_g, double gamma_over_kappa,
                                       int n_max)
{
    SystemParams p;
    p.kappa = 1.0;
    p.g = g_over_kappa;
    p.eps_d = eps_over_g * p.g;
    p.delta_omega = delta_over_g * p.g;
    p.gamma = gamma_over_kappa;
    p.n_max = n_max;
    validate(p);
    return p;
}

SystemParams SystemParams::from_absolute(double g, double kappa, double gamma,
                                         double delta_omega, double eps_d, int n_max)
{
    if (!(kappa > 0.0))
        throw Error(ErrorKind::InvalidParams, "kappa must be positive");
    SystemParams p;
    p.kappa = 1.0;
    p.g = g / kappa;
    p.gamma = gamma / kappa;
    p.delta_omega = delta_omega / kappa;
    p.eps_d = eps_d / kappa;
    p.n_max = n_max;
    validate(p);
    return p;
}

double SystemParams::eps_over_g() const
{
    return g > 0.0 ? eps_d / g : std::numeric_limits<double>::quiet_NaN();
}

double SystemParams::delta_over_g() const
{
    return g > 0.0 ? delta_omega / g : std::numeric_limits<double>::quiet_NaN();
}

SystemParams SystemParams::with_n_max(int n) const
{
    SystemParams p = *this;
    p.n_max = n;
    return p;
}

void validate(const SystemParams &p)
{
    auto fail = [](const char *msg) { throw Error(ErrorKind::InvalidParams, msg); };
    if (!std::isfinite(p.g) || !std::isfinite(p.kappa) || !std::isfinite(p.gamma)
        || !std::isfinite(p.delta_omega) || !std::isfinite(p.eps_d))
        fail("non-finite rate");
    if (!(p.kappa > 0.0))
        fail("kappa must be positive");
    if (p.g < 0.0)
        fail("g must be non-negative");
    if (p.gamma < 0.0)
        fail("gamma must be non-negative");
    if (p.eps_d < 0.0)
        fail("eps_d must be non-negative");
    if (p.n_max < 1)
        fail("n_max must be at least 1");
}

ScaleSet derived_scales(const SystemParams &p)
{
    validate(p);
    const double k2 = p.kappa * p.kappa;
    ScaleSet s;
    s.n_sc = p.g * p.g / (4.0 * k2);
    if (p.g > 0.0) {
        const double g2 = p.g * p.g;
        s.n_wc = p.gamma * p.gamma / (8.0 * g2);
        s.n_K = p.delta_omega * p.delta_omega / (2.0 * g2);
        s.scaled_drive = 2.0 * p.eps_d / p.g;
        const double gt_re = 0.5 * p.gamma;
        const double gt_im = p.delta_omega;
        s.n_wc_tilde = (gt_re * gt_re + gt_im * gt_im) / (2.0 * g2);
    }
    return s;
}

std::string describe(const SystemParams &p)
{
    std::ostringstream os;
    os.precision(17);
    os << "g/kappa=" << p.g / p.kappa << " gamma/kappa=" << p.gamma / p.kappa
       << " delta/kappa=" << p.delta_omega / p.kappa << " eps/kappa=" << p.eps_d / p.kappa
       << " n_max=" << p.n_max;
    return os.str();
}

} // namespace jcsim
