// rhc: run and verify drive/response parameter-estimation scenarios.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rhc/commands.hpp"
#include "rhc/logging.hpp"

int main(int argc, char** argv) {
    rhc::configure_logging();

    CLI::App app{"Adaptive receding-horizon parameter estimation for the HIV / CD4+ model"};
    app.require_subcommand(1);

    rhc::cli::RunArgs run_args;
    std::string out_csv;
    std::string out_svg;
    auto* run = app.add_subcommand("run", "Simulate a preset or scenario file and write CSV/SVG output");
    run->add_option("target", run_args.target, "Preset name (case1, case2) or scenario file")->required();
    run->add_option("--set", run_args.overrides, "Override a key, e.g. nrhc.t_s=0.01")->take_all();
    run->add_option("--out-csv", out_csv, "CSV output path");
    run->add_option("--out-svg", out_svg, "SVG output stem (writes <stem>_states.svg etc.)");

    std::string verify_target;
    auto* verify = app.add_subcommand("verify", "Cross-check the solver against the slow oracles");
    verify->add_option("target", verify_target, "Preset name or scenario file")->required();

    app.add_subcommand("list-presets", "List the built-in scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : rhc::cli::kExitConfig;
    }

    if (run->parsed()) {
        if (!out_csv.empty()) run_args.out_csv = out_csv;
        if (!out_svg.empty()) run_args.out_svg = out_svg;
        return rhc::cli::cmd_run(run_args, std::cout, std::cerr);
    }
    if (verify->parsed()) return rhc::cli::cmd_verify(verify_target, {}, std::cout, std::cerr);
    return rhc::cli::cmd_list_presets(std::cout);
}
