// atombs: coincidence, excitation and joint-distribution runs for two
// photons scattering on a two-level atom in a waveguide.

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "atombs/cli_io.hpp"

namespace {

struct Flag {
    const char* name;  // long flag without dashes; also the config key
    const char* help;
};

constexpr Flag kFlags[] = {
    {"pulse", "pulse family: square, gaussian, exprising"},
    {"pulse-file", "sampled pulse, CSV with tau,re,im columns"},
    {"gamma", "atomic bandwidth (default 1)"},
    {"bandwidth", "pulse bandwidth Omega"},
    {"detuning", "carrier minus atomic frequency"},
    {"delay", "delay of the second photon"},
    {"sweep", "coincidence sweep variable: detuning or bandwidth"},
    {"sweep-min", "first sweep value (delays for delay-scan)"},
    {"sweep-max", "last sweep value"},
    {"sweep-points", "number of sweep values"},
    {"sweep-scale", "linear or log"},
    {"bandwidths", "comma-separated bandwidths for excitation"},
    {"domain", "joint distribution domain: time or frequency"},
    {"time", "running time for the joint time distribution (inf = after scattering)"},
    {"reference", "atomic, or linear for the linear-beamsplitter comparison"},
    {"postselect", "marginal: condition on the other photon at this tau"},
    {"grid-lower", "grid lower bound"},
    {"grid-upper", "grid upper bound"},
    {"grid-points", "grid points per axis"},
    {"output", "output file (relative paths go under ATOMBS_OUTPUT_DIR); stdout if unset"},
    {"format", "csv (with a .json sidecar) or json"},
    {"seed", "reserved; all runs are deterministic"},
};

constexpr const char* kCommands[][2] = {
    {"coincidence", "asymptotic coincidence against detuning or bandwidth"},
    {"excitation", "atomic excitation probability against time"},
    {"joint", "joint time or frequency distribution of the coincidence sector"},
    {"delay-scan", "coincidence against the delay between the photons"},
    {"marginal", "single-photon time distribution with the other photon traced out"},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-photon scattering on a two-level atom: coincidences and correlations", "atombs"};
    app.fallthrough();
    app.require_subcommand(0, 1);

    std::string recipe;
    std::string config_file;
    bool print_config = false;
    bool list_recipes = false;
    app.add_option("--recipe", recipe, "figure recipe from the recipes directory, e.g. fig4");
    app.add_option("--config", config_file, "key = value config file applied after the recipe");
    app.add_flag("--print-config", print_config, "print the resolved configuration and exit");
    app.add_flag("--list-recipes", list_recipes, "list the available recipes and exit");

    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    for (const auto& f : kFlags) options[f.name] = app.add_option(std::string("--") + f.name, values[f.name], f.help);

    std::map<std::string, CLI::App*> commands;
    for (const auto& c : kCommands) commands[c[0]] = app.add_subcommand(c[0], c[1]);

    CLI11_PARSE(app, argc, argv);

    try {
        if (list_recipes) {
            for (const auto& name : atombs::io::recipe_names()) std::cout << name << '\n';
            return 0;
        }
        atombs::io::RunConfig config;
        if (!recipe.empty()) atombs::io::apply_file(config, atombs::io::recipe_path(recipe));
        if (!config_file.empty()) atombs::io::apply_file(config, config_file);
        for (const auto& f : kFlags)
            if (options[f.name]->count() > 0) atombs::io::apply_setting(config, f.name, values[f.name]);
        for (const auto& [name, sub] : commands)
            if (sub->parsed()) config.command = atombs::io::parse_command(name);
        if (recipe.empty() && config_file.empty() && app.get_subcommands().empty())
            throw std::invalid_argument("give a subcommand, --recipe or --config");

        if (print_config) {
            std::cout << atombs::io::serialize(config);
            return 0;
        }
        const auto result = atombs::io::run(config);
        for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
        for (const auto& path : atombs::io::write_result(config, result, std::cout))
            std::cerr << "wrote " << path.string() << '\n';
    } catch (const atombs::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
