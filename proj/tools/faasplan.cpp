#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "faasplan/cli/commands.hpp"

using namespace faasplan::cli;

int main(int argc, char** argv) {
    CLI::App app{"Idle-time and capacity planning for serverless function platforms"};
    app.require_subcommand(1);

    CommandOptions opts;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::string format = "table";

    using Handler = int (*)(const CommandOptions&, std::ostream&);
    const std::map<std::string, std::pair<std::string, Handler>> commands{
        {"gen", {"Generate the experiment grid", cmd_gen}},
        {"simulate", {"Simulate the configured workload at its idle times", cmd_simulate}},
        {"solve-ctmc", {"Solve the per-function cold-start chains and the layered model", cmd_solve_ctmc}},
        {"validate", {"Compare model and simulation response times over the grid", cmd_validate}},
        {"plan", {"Size idle times, cores and memory under the SLA", cmd_plan}},
        {"baseline", {"Availability baselines at fixed hit-rate targets", cmd_baseline}},
        {"compare", {"Planned sizing versus baselines, verified by simulation", cmd_compare}},
    };

    Handler selected = nullptr;
    for (const auto& [name, entry] : commands) {
        auto* sub = app.add_subcommand(name, entry.first);
        sub->add_option("--config", opts.config, "JSON configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "Master seed override");
        sub->add_option("--out", out_dir, "Directory for CSV output");
        sub->add_option("--workers", opts.workers, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "table"}));
        sub->add_flag("--dump-model", opts.dump_model, "Write chain states and the layered model");
        sub->add_flag("--dump-trace", opts.dump_trace, "Write the memory trace of the first replication");
        sub->callback([&selected, h = entry.second] { selected = h; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config_error;
    }

    for (auto* sub : app.get_subcommands()) {
        if (sub->count("--seed")) opts.seed = seed;
        if (sub->count("--out")) opts.out = out_dir;
    }
    opts.format = format == "csv" ? Format::csv : Format::table;

    try {
        return selected(opts, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
}
