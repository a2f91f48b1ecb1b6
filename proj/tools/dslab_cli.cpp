#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dslab/dslab.h"

namespace {

struct Options {
    std::string config;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out;
    std::vector<std::string> targets;
    int grid_refine = 0;
    bool quiet = false;
};

int report_error(dsl_status s) {
    std::fprintf(stderr, "dslab: %s: %s\n", dsl_status_name(s), dsl_last_error());
    return 2;
}

void add_common(CLI::App* cmd, Options& o, bool with_targets) {
    cmd->add_option("--config", o.config, "Scenario config file");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&o](const std::uint64_t& s) { o.seed = s, o.seed_set = true; }, "Master seed override");
    cmd->add_option("--out", o.out, "Output directory for summary.txt, verdicts.json and series/");
    if (with_targets) cmd->add_option("--target", o.targets, "Target to run (repeatable)");
    cmd->add_option("--grid-refine", o.grid_refine, "Time grid refinement factor")->check(CLI::Range(1, 16));
    cmd->add_flag("--quiet", o.quiet, "Suppress the summary on stdout");
}

int execute(const Options& o, const std::vector<std::string>& forced_targets, bool all_targets) {
    dsl_scenario* scn = nullptr;
    dsl_status s = o.config.empty() ? dsl_scenario_default(&scn) : dsl_scenario_load(o.config.c_str(), &scn);
    if (s != DSL_OK) return report_error(s);
    std::string list;
    const auto& chosen = forced_targets.empty() ? o.targets : forced_targets;
    for (const auto& t : chosen) list += (list.empty() ? "" : ",") + t;
    if (all_targets)
        for (std::size_t i = 0; i < dsl_target_count(); ++i) list += (list.empty() ? "" : ",") + std::string(dsl_target_name(i));
    if (!list.empty() && (s = dsl_scenario_set_targets(scn, list.c_str())) != DSL_OK) {
        dsl_scenario_free(scn);
        return report_error(s);
    }
    if (o.seed_set) dsl_scenario_set_seed(scn, o.seed);
    if (o.grid_refine > 0 && (s = dsl_scenario_set_grid_refine(scn, o.grid_refine)) != DSL_OK) {
        dsl_scenario_free(scn);
        return report_error(s);
    }
    dsl_report* rep = nullptr;
    s = dsl_scenario_run(scn, &rep);
    const std::string out = !o.out.empty() ? o.out : dsl_scenario_out_dir(scn);
    dsl_scenario_free(scn);
    if (s != DSL_OK) return report_error(s);
    if (!out.empty() && (s = dsl_report_write(rep, out.c_str())) != DSL_OK) {
        dsl_report_free(rep);
        return report_error(s);
    }
    if (!o.quiet) std::fputs(dsl_report_summary(rep), stdout);
    int pass = 0;
    dsl_report_all_pass(rep, &pass);
    dsl_report_free(rep);
    return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral lattice verification runner"};
    app.require_subcommand(1);
    app.set_version_flag("--version", dsl_version());

    Options run_opt, all_opt;
    auto* run = app.add_subcommand("run", "Run the targets named in the config or via --target");
    add_common(run, run_opt, true);
    auto* all = app.add_subcommand("verify-all", "Run every target");
    add_common(all, all_opt, false);

    std::vector<Options> per(dsl_target_count());
    std::vector<CLI::App*> per_cmd;
    for (std::size_t i = 0; i < dsl_target_count(); ++i) {
        auto* c = app.add_subcommand(dsl_target_name(i), std::string("Run the ") + dsl_target_name(i) + " target");
        add_common(c, per[i], false);
        per_cmd.push_back(c);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (run->parsed()) return execute(run_opt, {}, false);
    if (all->parsed()) return execute(all_opt, {}, true);
    for (std::size_t i = 0; i < per_cmd.size(); ++i)
        if (per_cmd[i]->parsed()) return execute(per[i], {dsl_target_name(i)}, false);
    return 2;
}
