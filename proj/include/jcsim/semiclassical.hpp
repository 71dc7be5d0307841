#ifndef JCSIM_SEMICLASSICAL_HPP
#define JCSIM_SEMICLASSICAL_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jcsim/observables.hpp"
#include "jcsim/params.hpp"
#include "jcsim/types.hpp"

namespace jcsim {

// Mean-field (neoclassical) steady states of the driven JC oscillator. All
// intensities u are |alpha_ss|^2 in photons; rates in units of kappa.

/// f(delta/kappa, g/kappa; u / n_sc) of the neoclassical scaling law, valid
/// for delta != 0 with negative inversion.
double neoclassical_f(const SystemParams &p, double u);

/// (u - (eps/kappa)^2 f(u)) / max(u, (eps/kappa)^2 f(u)): zero at a root.
double neoclassical_residual(const SystemParams &p, double u);

/// All |alpha_ss|^2 solving u = (eps/kappa)^2 f(u), ascending.
/// Throws ResonanceSingular for delta = 0.
std::vector<double> neoclassical_roots(const SystemParams &p);

/// h(...) of the mean-field amplitude with spontaneous emission:
/// alpha_ss = (eps/kappa) h(u).
Complex spontaneous_h(const SystemParams &p, double u);
double spontaneous_residual(const SystemParams &p, double u);
/// Roots of u = (eps/kappa)^2 |h(u)|^2, ascending. Throws ResonanceSingular
/// when gamma = 0 and delta = 0 (the h form is 0/0 there).
std::vector<double> spontaneous_roots(const SystemParams &p);

struct KerrMapping {
    double delta_bar = 0.0;        ///< delta - g^2 / delta
    bool bistable = false;
    double vac_rabi_amp2 = 0.0;    ///< (eps / 2g)^(2/3)
    bool vac_rabi_valid = false;   ///< eps / 2g < 0.1
};

KerrMapping kerr_effective(const SystemParams &p);

/// delta/g at which the Kerr mapping first admits bistability.
/// Throws CouplingTooWeak for g < sqrt(3) kappa.
double bistability_onset_detuning(const SystemParams &p);

/// +-delta/g at which the scaling law gives |alpha|^2 = (eps/kappa)^2.
std::pair<double, double> offset_detuning(const SystemParams &p);

struct AsymptoticRoots {
    double amp2_plus = 0.0;  ///< [(g + 2 eps) / (2 delta)]^2
    double amp2_minus = 0.0; ///< [(g - 2 eps) / (2 delta)]^2
    bool plus_valid = false; ///< 4 g^2 u / delta^2 > 10
    bool minus_valid = false;
};

AsymptoticRoots asymptotic_roots(const SystemParams &p);

struct AnharmonicResult {
    bool root_found = false;
    double n = 0.0;                 ///< largest root
    double asymptote = 0.0;         ///< (eps/kappa)^2 - n_sc
    bool asymptote_applicable = false; ///< (2 eps / g)^2 > 2
};

/// Largest root of n + (g/kappa)^2 [1 - n (4n^2 + 1)^(-1/2)]^2 = (eps/kappa)^2
/// on [0, (eps/kappa)^2]. No root exists below threshold (2 eps < g).
AnharmonicResult anharmonic_n(const SystemParams &p);

struct ThresholdStates {
    Complex alpha_plus;
    Complex alpha_minus;
    double theta_plus = 0.0;
    double theta_minus = 0.0;
    bool degenerate = false;      ///< at eps = g/2, where alpha = 0 and theta is undefined
    bool small_angle_valid = false; ///< 2 eps / g > 10, theta ~ g / (2 eps)

    double intensity() const { return std::norm(alpha_plus); }
};

/// Resonant (delta = 0) mean-field states above threshold.
/// Throws BelowThreshold for eps < g/2 and InvalidParams for delta != 0.
ThresholdStates above_threshold(const SystemParams &p);

/// |alpha_ss|^2 = n_sc [(2 eps / g)^2 - 1]
double above_threshold_intensity(const SystemParams &p);

/// Bloch vector on the resonant neoclassical curve below threshold.
/// Throws AboveThreshold for eps/g > 1/2.
BlochVector bloch_below_threshold(double eps_over_g);

struct WeakDrive {
    double n = 0.0;     ///< 2 (eps/g)^4
    bool valid = false; ///< eps/g < 0.15
};

WeakDrive weak_drive_photon(const SystemParams &p);

enum class BranchControl { EpsOverG, DeltaOverG };
enum class StabilityLabel { Stable, Unstable, Fold };

std::string to_string(BranchControl c);
std::string to_string(StabilityLabel l);

struct BranchPoint {
    double control = 0.0;
    std::vector<double> roots;
    std::vector<StabilityLabel> labels;
};

struct BranchCurve {
    BranchControl control = BranchControl::EpsOverG;
    std::vector<BranchPoint> points;
    SystemParams params_snapshot;

    /// Indices i where the root count differs between points i and i + 1.
    std::vector<std::size_t> fold_indices() const;
};

/// Stable / unstable labels from the S-curve convention: outer roots stable,
/// middle root unstable; a two-root point is a fold.
std::vector<StabilityLabel> s_curve_labels(std::size_t count);

/// Mean-field intensities at one parameter point, routed by regime:
/// gamma > 0 uses the spontaneous-emission law, delta = 0 uses the resonant
/// threshold law, otherwise the neoclassical scaling law.
std::vector<double> mean_field_roots(const SystemParams &p);

BranchCurve branch_curve(const SystemParams &base, BranchControl control,
                         const std::vector<double> &values, int workers = 1);

/// One row per point: control, root count, roots ascending, labels.
void write_branch_curve(std::ostream &os, const BranchCurve &curve);
BranchCurve read_branch_curve(std::istream &is);

} // namespace jcsim

#endif // JCSIM_SEMICLASSICAL_HPP
