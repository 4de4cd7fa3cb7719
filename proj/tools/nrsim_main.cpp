// Command-line front end: validate, run, ensemble, arrow, currents, rerun.

#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "nrsim/commands.hpp"

namespace
{
using namespace nrsim;

struct RunFlags
{
    std::string scenario;
    std::string out_dir = "out";
    std::optional<std::string> rules;
    std::optional<std::string> gap_mode;
    std::vector<std::string> suspend;
    std::optional<double> dt;
    std::optional<double> t_max;
    std::optional<std::uint64_t> seed;
    std::size_t n = 1;
    std::size_t sample_every = 1;
    std::string policy = "preserve_total";
    std::string direction = "all";
    std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool with_n, bool with_direction)
{
    cmd->add_option("--scenario", f.scenario, "Scenario document (JSON)")->required();
    cmd->add_option("--out-dir", f.out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--rules", f.rules, "nrules3 or nrules4 (default from scenario)")
        ->check(CLI::IsMember({"nrules3", "nrules4"}));
    cmd->add_option("--gap-mode", f.gap_mode, "oneway, compensated or hermitian")
        ->check(CLI::IsMember({"oneway", "compensated", "hermitian"}));
    cmd->add_option("--suspend", f.suspend, "Suspend a rule (n3_1 or n4_4); needs --gap-mode hermitian")
        ->check(CLI::IsMember({"n3_1", "n4_4"}));
    cmd->add_option("--dt", f.dt, "Time step");
    cmd->add_option("--t-max", f.t_max, "End time");
    cmd->add_option("--seed", f.seed, "Master seed");
    cmd->add_option("--sample-every", f.sample_every, "Record every k-th step")->capture_default_str();
    cmd->add_option("--policy", f.policy, "Collapse norm policy")
        ->check(CLI::IsMember({"preserve_total", "raw"}))
        ->capture_default_str();
    if (with_n)
    {
        cmd->add_option("--n", f.n, "Number of trajectories")->capture_default_str();
        cmd->add_option("--workers", f.workers, "Worker threads (does not affect outputs)");
    }
    if (with_direction)
    {
        cmd->add_option("--direction", f.direction, "all, forward or reverse")
            ->check(CLI::IsMember({"all", "forward", "reverse"}))
            ->capture_default_str();
    }
}

int run_command(std::string const& name, RunFlags const& f)
{
    RunManifest m;
    m.command = name;
    m.scenario_path = f.scenario;
    m.n = f.n;
    m.sample_every = f.sample_every;
    m.direction = f.direction;
    m.policy = f.policy == "raw" ? NormPolicy::raw : NormPolicy::preserve_total;
    for (auto const& s : f.suspend)
        m.suspended.push_back(*parse_rule_id(s));

    auto complete = [&f](RunManifest& man, ScenarioModel const& model) {
        auto const& d = model.defaults;
        man.rules = f.rules ? *parse_rules_variant(*f.rules) : d.rules;
        man.gap_mode = f.gap_mode ? *parse_gap_mode(*f.gap_mode) : d.gap_mode;
        man.dt = f.dt.value_or(d.dt);
        man.t_max = f.t_max.value_or(d.t_max);
        man.seed = f.seed.value_or(d.seed);
    };
    return execute_from_files(m, complete, f.out_dir, f.workers, std::cout, std::cerr);
}
}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Stochastic collapse simulator driven by probability current"};
    app.require_subcommand(1);

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Validate a scenario document");
    validate->add_option("scenario", validate_path, "Scenario document")->required();

    RunFlags run_flags, ens_flags, arrow_flags, cur_flags;
    auto* run = app.add_subcommand("run", "Run one trajectory");
    add_run_flags(run, run_flags, false, false);
    auto* ensemble = app.add_subcommand("ensemble", "Run an ensemble and compare with the current-integral oracle");
    add_run_flags(ensemble, ens_flags, true, false);
    auto* arrow = app.add_subcommand("arrow", "Time's-arrow experiments; exit 0 iff every verdict is as expected");
    add_run_flags(arrow, arrow_flags, false, true);
    auto* currents = app.add_subcommand("currents", "Hit-free current profile and oracle integrals");
    add_run_flags(currents, cur_flags, false, false);

    std::string manifest_path;
    std::string rerun_out = "out";
    std::size_t rerun_workers = 1;
    auto* rerun = app.add_subcommand("rerun", "Re-execute the command recorded in a manifest");
    rerun->add_option("--manifest", manifest_path, "manifest.json to replay")->required();
    rerun->add_option("--out-dir", rerun_out, "Output directory")->capture_default_str();
    rerun->add_option("--workers", rerun_workers, "Worker threads");

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    if (*validate)
        return validate_command(validate_path, std::cout);
    if (*run)
        return run_command("run", run_flags);
    if (*ensemble)
        return run_command("ensemble", ens_flags);
    if (*arrow)
        return run_command("arrow", arrow_flags);
    if (*currents)
        return run_command("currents", cur_flags);

    RunManifest m;
    try
    {
        m = RunManifest::from_json(nlohmann::json::parse(read_file(manifest_path)));
    }
    catch (std::exception const& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return execute_from_files(m, nullptr, rerun_out, rerun_workers, std::cout, std::cerr);
}
