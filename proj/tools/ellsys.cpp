#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ellsys/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Solvers and checks for first-order elliptic systems on periodic grids"};
    app.require_subcommand(1);

    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> format;

    const std::map<std::string, std::string> about = {
        {"analyze", "Ellipticity constant of the tensor, plus nearness of F when configured"},
        {"solve-linear", "Spectral solve of A:Du = f; writes u.efof and report"},
        {"solve-nonlinear", "Fixed-point solve of F(x, Du) = f; writes u.efof and trace"},
        {"verify", "Run the estimate and oracle checks; writes verify report"},
    };
    for (const auto& name : ellsys::command_names()) {
        const auto it = about.find(name);
        auto* sub = app.add_subcommand(name, it == about.end() ? "" : it->second);
        sub->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "Output directory")->capture_default_str();
        sub->add_option("--seed", seed, "Override [run] seed");
        sub->add_option("--format", format, "Report format: csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : ellsys::kExitConfig;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    return ellsys::run_command(command, config, out, {seed, format}, std::cerr);
}
