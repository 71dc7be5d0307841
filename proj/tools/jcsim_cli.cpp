// Command-line front end: runs the scenarios of a config file that match the
// chosen subcommand.
#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>

#include "jcsim/harness.hpp"

namespace {

const std::map<std::string, jcsim::ScenarioKind> kSubcommands{
    {"steady", jcsim::ScenarioKind::Steady},
    {"scan", jcsim::ScenarioKind::SteadyScan},
    {"wigner", jcsim::ScenarioKind::WGrid},
    {"husimi", jcsim::ScenarioKind::QGrid},
    {"traj", jcsim::ScenarioKind::Trajectory},
    {"semiclassical", jcsim::ScenarioKind::SemiclassicalCurve},
    {"spectrum", jcsim::ScenarioKind::SpectrumTable},
    {"boundary", jcsim::ScenarioKind::BoundarySearch},
};

struct Flags {
    std::string config;
    std::string out = "out";
    std::optional<int> workers;
    std::optional<std::uint64_t> seed;
};

int run(const std::string &command, const Flags &flags)
{
    std::vector<jcsim::Scenario> selected;
    try {
        for (jcsim::Scenario &s : jcsim::load_scenarios_file(flags.config)) {
            if (s.kind != kSubcommands.at(command))
                continue;
            if (flags.workers)
                s.workers = *flags.workers;
            if (flags.seed)
                s.seed_base = *flags.seed;
            selected.push_back(std::move(s));
        }
    } catch (const jcsim::Error &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    }
    if (selected.empty()) {
        std::cerr << "config error: no scenario of kind " << jcsim::to_string(kSubcommands.at(command))
                  << " in " << flags.config << '\n';
        return 1;
    }

    bool partial = false;
    for (const jcsim::Scenario &s : selected) {
        jcsim::RunReport rep;
        try {
            rep = jcsim::run_scenario(s, flags.out);
        } catch (const jcsim::Error &e) {
            std::cerr << s.name << ": " << e.what() << '\n';
            if (e.kind() == jcsim::ErrorKind::Config)
                return 1;
            partial = true;
            continue;
        }
        std::size_t failed = 0;
        for (const jcsim::PointStatus &p : rep.points)
            if (!p.ok) {
                ++failed;
                std::cerr << s.name << " point " << p.index << ": " << p.error << '\n';
            }
        std::cout << s.name << ' ' << rep.hash << ' ' << (rep.points.size() - failed) << '/'
                  << rep.points.size() << " ok\n";
        partial = partial || failed > 0;
    }
    return partial ? 2 : 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Driven, damped Jaynes-Cummings oscillator toolkit"};
    app.require_subcommand(1);
    Flags flags;
    for (const auto &[name, kind] : kSubcommands) {
        CLI::App *sub = app.add_subcommand(name, "run " + jcsim::to_string(kind) + " scenarios");
        sub->add_option("--config", flags.config, "scenario file")->required();
        sub->add_option("--out", flags.out, "output directory");
        sub->add_option("--workers", flags.workers, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--seed", flags.seed, "base seed for trajectories");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    return run(app.get_subcommands().front()->get_name(), flags);
}
