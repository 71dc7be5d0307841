#ifndef JCSIM_SPECTRUM_HPP
#define JCSIM_SPECTRUM_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "jcsim/params.hpp"

namespace jcsim {

enum class Picture { Schrodinger, Interaction };
enum class FrequencyUnit { G, Kappa };

/// One branch (+ or -) of the n-th rung of a closed-form JC spectrum. Every
/// line records the picture and unit it is expressed in.
struct SpectralLine {
    int n = 1;
    int sign = +1;
    double value = 0.0;
    Picture picture = Picture::Schrodinger;
    FrequencyUnit unit = FrequencyUnit::G;
};

std::string to_string(Picture p);
std::string to_string(FrequencyUnit u);

/// n omega0 +- sqrt(n) g (Schrodinger picture, units of g when omega0 and g
/// are given in units of g).
std::pair<SpectralLine, SpectralLine> dressed_frequencies(int n, double omega0, double g);

/// Drive-dressed quasi-energies on resonance, +-sqrt(m) g [1 - (2 eps/g)^2]^(3/4)
/// in units of g (interaction picture). Exactly zero at eps = g/2; throws
/// AboveCollapse beyond it.
std::pair<SpectralLine, SpectralLine> quasi_energies(int m, const SystemParams &p);

/// delta / g = +-1/sqrt(n) of the n-photon resonance.
std::pair<double, double> resonance_detuning(int n);

/// Detuning blocking the (n+1)-photon step at the n-photon resonance,
/// -+kappa sqrt(n_sc / n), returned in units of kappa as (upper ladder,
/// lower ladder).
std::pair<double, double> blockade_detuning(int n, const SystemParams &p);

/// Tabular export: n, sign, value, picture, unit.
void write_spectrum_table(std::ostream &os, const std::vector<SpectralLine> &lines);

} // namespace jcsim

#endif // JCSIM_SPECTRUM_HPP
