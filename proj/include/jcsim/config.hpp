#ifndef JCSIM_CONFIG_HPP
#define JCSIM_CONFIG_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace jcsim {

struct ConfigEntry {
    std::string key;
    std::string value;
    int line = 0;
};

/// One `[name]` block. Repeated section names are allowed and kept in order.
struct ConfigSection {
    std::string name;
    int line = 0;
    std::vector<ConfigEntry> entries;

    const ConfigEntry *find(const std::string &key) const;
};

/// Flat `key = value` text grouped into `[section]` blocks. `#` and `;`
/// start comments. Entries before the first header, malformed lines and keys
/// repeated inside one section throw Error(Config).
std::vector<ConfigSection> parse_config(std::istream &is);
std::vector<ConfigSection> parse_config_file(const std::string &path);

} // namespace jcsim

#endif // JCSIM_CONFIG_HPP
