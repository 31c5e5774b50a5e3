#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "lagflow/config.hpp"
#include "lagflow/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"lagflow: experiments for the flow u_t = sum_j arctan(lambda_j(D^2 u))"};
    std::string command;
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    bool quiet = false;

    app.add_option("command", command, "hypotheses | solve | compare | converge | quadratic")
        ->required()
        ->check(CLI::IsMember({"hypotheses", "solve", "compare", "converge", "quadratic"}));
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "override the configuration seed");
    app.add_flag("--quiet", quiet, "suppress the run log");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return lagflow::kExitConfigError;
    }

    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot read " << config_path << "\n";
        return lagflow::kExitIoError;
    }
    std::stringstream text;
    text << in.rdbuf();

    lagflow::RunConfig config;
    try {
        config = lagflow::parse_config(text.str());
    } catch (const lagflow::ConfigError& e) {
        std::cerr << "config error: " << config_path << ": " << e.what() << "\n";
        return lagflow::kExitConfigError;
    }
    if (lagflow::to_string(config.command) != command) {
        std::cerr << "config error: " << config_path << ": command: config says '" << lagflow::to_string(config.command)
                  << "' but '" << command << "' was requested\n";
        return lagflow::kExitConfigError;
    }
    if (seed) {
        lagflow::override_seed(config, *seed);
    }
    return lagflow::run(config, {out_dir, quiet}, std::cerr);
}
