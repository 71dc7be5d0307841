#include "jcsim/config.hpp"

#include <fstream>
#include <istream>

#include "jcsim/error.hpp"

namespace jcsim {

namespace {

std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string &what)
{
    throw Error(ErrorKind::Config, "line " + std::to_string(line) + ": " + what);
}

} // namespace

const ConfigEntry *ConfigSection::find(const std::string &key) const
{
    for (const ConfigEntry &e : entries)
        if (e.key == key)
            return &e;
    return nullptr;
}

std::vector<ConfigSection> parse_config(std::istream &is)
{
    std::vector<ConfigSection> out;
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        const auto cut = raw.find_first_of("#;");
        const std::string text = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
        if (text.empty())
            continue;
        if (text.front() == '[') {
            if (text.back() != ']')
                fail(line, "unterminated section header");
            const std::string name = trim(text.substr(1, text.size() - 2));
            if (name.empty())
                fail(line, "empty section name");
            out.push_back(ConfigSection{name, line, {}});
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            fail(line, "expected key = value");
        if (out.empty())
            fail(line, "entry outside of a section");
        ConfigEntry e{trim(text.substr(0, eq)), trim(text.substr(eq + 1)), line};
        if (e.key.empty())
            fail(line, "empty key");
        if (out.back().find(e.key))
            fail(line, "duplicate key '" + e.key + "'");
        out.back().entries.push_back(std::move(e));
    }
    return out;
}

std::vector<ConfigSection> parse_config_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::Config, "cannot open " + path);
    return parse_config(in);
}

} // namespace jcsim
