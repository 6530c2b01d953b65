// graded-gm: runs session files, or one-command sessions through the op aliases.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ggm/error.hpp"
#include "ggm/session.hpp"

namespace {

using nlohmann::json;

struct Common {
    int jobs = 1;
    std::string field;
    std::string window;
    bool no_timestamp = false;
    bool quiet = false;
};

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--jobs", c.jobs, "worker threads for cell-level parallelism")->check(CLI::PositiveNumber);
    app->add_option("--field", c.field, "coefficient field override: Q or Fp:<p>");
    app->add_option("--window", c.window, "weight window override a,b (write --window=-4,4 for negative a)");
    app->add_flag("--no-timestamp", c.no_timestamp, "omit the generated-at header line");
    app->add_flag("-q,--quiet", c.quiet, "no progress log on stderr");
}

ggm::Overrides overrides(const Common& c)
{
    ggm::Overrides ov;
    ov.jobs = c.jobs;
    ov.timestamp = !c.no_timestamp;
    if (!c.field.empty())
        ov.field = ggm::Field::parse(c.field);
    if (!c.window.empty()) {
        const auto comma = c.window.find(',');
        if (comma == std::string::npos)
            throw ggm::ArgumentError("--window expects a,b");
        int a = 0, b = 0;
        try {
            a = std::stoi(c.window.substr(0, comma));
            b = std::stoi(c.window.substr(comma + 1));
        } catch (const std::exception&) {
            throw ggm::ArgumentError("--window expects two integers a,b");
        }
        if (a > b)
            throw ggm::ArgumentError("--window needs a <= b");
        ov.window = std::pair{a, b};
    }
    return ov;
}

ggm::Logger logger(const Common& c)
{
    if (c.quiet)
        return {};
    return [](const std::string& s) { fmt::print(stderr, "graded-gm: {}\n", s); };
}

struct AliasArgs {
    std::string session;
    std::string module;
    std::string output = "-";
    std::vector<std::string> gens;
    std::vector<std::string> element;
    std::vector<std::string> sets;
    int d = 0;
    int m = 0;
};

int finish(const ggm::SessionResult& r) { return static_cast<int>(r.status()); }

int run_alias(const std::string& alias, const AliasArgs& a, const Common& c)
{
    std::ifstream f(a.session, std::ios::binary);
    if (!f)
        throw ggm::Error("cannot read " + a.session);
    const std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    json session = ggm::parse_session(text);
    json cmd{{"op", ggm::canonical_op(alias)}, {"output", a.output}};
    if (!a.module.empty())
        cmd["module"] = a.module;
    if (!a.gens.empty())
        cmd["gens"] = a.gens;
    if (!a.element.empty())
        cmd["element"] = a.element;
    if (a.d > 0)
        cmd["d"] = a.d;
    if (a.m > 0)
        cmd["m"] = a.m;
    for (const auto& s : a.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ggm::ArgumentError("--set expects key=<json value>");
        cmd[s.substr(0, eq)] = ggm::parse_session(s.substr(eq + 1));
    }
    session["commands"] = json::array({cmd});
    ggm::validate_session(session);
    return finish(ggm::run_session(session, ".", overrides(c), logger(c)));
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Weightwise local cohomology, Čech and Greenlees–May computations on graded rings"};
    app.require_subcommand(1);
    Common common;

    std::string session_path;
    auto* run = app.add_subcommand("run", "execute every command of a session file");
    run->add_option("session", session_path, "session JSON file")->required();
    add_common(run, common);

    AliasArgs alias;
    const std::vector<std::pair<std::string, std::string>> aliases{
        {"cohomology", "sheaf cohomology table of a module"},
        {"local-cohomology", "local cohomology table"},
        {"saturate", "saturation N' with its unit"},
        {"torsion", "torsion test of an element or of whole weight pieces"},
        {"cartier", "Cartier certificate search (needs --d)"},
        {"gm-check", "duality check with dualizing twist detection"},
        {"completion", "graded completion"},
        {"veronese", "Veronese reindexing of the sheaf table (needs --m)"},
    };
    std::vector<CLI::App*> alias_apps;
    for (const auto& [name, help] : aliases) {
        auto* sub = app.add_subcommand(name, help + " (ring and modules read from a session file)");
        sub->add_option("session", alias.session, "session JSON file providing field, ring, modules, params")
            ->required();
        sub->add_option("--module", alias.module, "module name (default A)");
        sub->add_option("-o,--output", alias.output, "output path; .tsv or .json, - for stdout JSON");
        sub->add_option("--gens", alias.gens, "ideal generators")->delimiter(',');
        sub->add_option("--element", alias.element, "module element, one entry per generator")->delimiter(',');
        sub->add_option("--d", alias.d, "Cartier degree");
        sub->add_option("--m", alias.m, "Veronese multiplier");
        sub->add_option("--set", alias.sets, "extra command argument key=<json value>");
        add_common(sub, common);
        alias_apps.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (run->parsed())
            return finish(ggm::run_session_file(session_path, overrides(common), logger(common)));
        for (auto* sub : alias_apps)
            if (sub->parsed())
                return run_alias(sub->get_name(), alias, common);
    } catch (const std::exception& e) {
        fmt::print(stderr, "graded-gm: error: {}\n", e.what());
        return 1;
    }
    return 1;
}
