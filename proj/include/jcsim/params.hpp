#ifndef JCSIM_PARAMS_HPP
#define JCSIM_PARAMS_HPP

#include <optional>
#include <string>

namespace jcsim {

/// Physical parameters of the driven, damped Jaynes-Cummings oscillator.
///
/// All rates are stored in units of the cavity half-width, so `kappa` is 1
/// for every object built through `from_ratios` or `from_absolute`. Only the
/// drive-cavity detuning enters; the bare frequencies never appear.
struct SystemParams {
    double g = 0.0;           ///< atom-field coupling
    double kappa = 1.0;       ///< cavity half-width (photon loss rate 2 kappa)
    double gamma = 0.0;       ///< spontaneous emission rate
    double delta_omega = 0.0; ///< omega_d - omega_0
    double eps_d = 0.0;       ///< drive amplitude
    int n_max = 20;           ///< highest Fock level kept

    /// Build from g/kappa, eps/g, delta/g and gamma/kappa.
    static SystemParams from_ratios(double g_over_kappa, double eps_over_g,
                                    double delta_over_g, double gamma_over_kappa = 0.0,
                                    int n_max = 20);

    /// Build from absolute rates; everything is divided by `kappa`.
    static SystemParams from_absolute(double g, double kappa, double gamma,
                                      double delta_omega, double eps_d, int n_max = 20);

    double g_over_kappa() const { return g / kappa; }
    double eps_over_kappa() const { return eps_d / kappa; }
    /// Undefined (NaN) when g = 0.
    double eps_over_g() const;
    double delta_over_g() const;

    SystemParams with_n_max(int n) const;

    bool operator==(const SystemParams &) const = default;
};

/// Throws Error(InvalidParams) when an invariant is violated.
void validate(const SystemParams &p);

/// Derived scale numbers. Scales whose denominator vanishes (g = 0) are
/// empty.
struct ScaleSet {
    double n_sc = 0.0;
    std::optional<double> n_wc;
    std::optional<double> n_K;
    std::optional<double> scaled_drive;
    std::optional<double> n_wc_tilde;
};

ScaleSet derived_scales(const SystemParams &p);

std::string describe(const SystemParams &p);

} // namespace jcsim

#endif // JCSIM_PARAMS_HPP
