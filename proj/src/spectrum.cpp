#include "jcsim/spectrum.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "jcsim/error.hpp"

namespace jcsim {

std::string to_string(Picture p)
{
    return p == Picture::Schrodinger ? "schrodinger" : "interaction";
}

std::string to_string(FrequencyUnit u)
{
    return u == FrequencyUnit::G ? "g" : "kappa";
}

namespace {

void require_rung(int n)
{
    if (n < 1)
        throw Error(ErrorKind::InvalidParams, "excitation index must be >= 1");
}

} // namespace

std::pair<SpectralLine, SpectralLine> dressed_frequencies(int n, double omega0, double g)
{
    require_rung(n);
    const double split = std::sqrt(double(n)) * g;
    const double centre = n * omega0;
    return {SpectralLine{n, +1, centre + split, Picture::Schrodinger, FrequencyUnit::G},
            SpectralLine{n, -1, centre - split, Picture::Schrodinger, FrequencyUnit::G}};
}

std::pair<SpectralLine, SpectralLine> quasi_energies(int m, const SystemParams &p)
{
    require_rung(m);
    validate(p);
    if (p.g == 0.0)
        throw Error(ErrorKind::InvalidParams, "quasi-energies need g > 0");
    const double scaled = 2.0 * p.eps_d / p.g;
    if (scaled > 1.0)
        throw Error(ErrorKind::AboveCollapse, "quasi-energy spectrum has collapsed above eps = g/2");
    const double value = std::sqrt(double(m)) * std::pow(1.0 - scaled * scaled, 0.75);
    return {SpectralLine{m, +1, value, Picture::Interaction, FrequencyUnit::G},
            SpectralLine{m, -1, value == 0.0 ? 0.0 : -value, Picture::Interaction, FrequencyUnit::G}};
}

std::pair<double, double> resonance_detuning(int n)
{
    require_rung(n);
    const double d = 1.0 / std::sqrt(double(n));
    return {d, -d};
}

std::pair<double, double> blockade_detuning(int n, const SystemParams &p)
{
    require_rung(n);
    validate(p);
    const double nsc = p.g * p.g / (4.0 * p.kappa * p.kappa);
    const double mag = p.kappa * std::sqrt(nsc / n);
    return {-mag, mag};
}

void write_spectrum_table(std::ostream &os, const std::vector<SpectralLine> &lines)
{
    os << "# columns: n,sign,value,picture,unit\n";
    std::ostringstream row;
    row.precision(17);
    for (const SpectralLine &l : lines) {
        row.str("");
        row << l.n << ',' << (l.sign > 0 ? '+' : '-') << ',' << l.value << ','
            << to_string(l.picture) << ',' << to_string(l.unit);
        os << row.str() << '\n';
    }
}

} // namespace jcsim
