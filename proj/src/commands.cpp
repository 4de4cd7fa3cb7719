#include "nrsim/commands.hpp"

#include <algorithm>
#include <sstream>

#include <fmt/format.h>

#include "nrsim/scenario_io.hpp"

namespace nrsim
{
namespace
{
std::string dump(nlohmann::json const& j)
{
    return j.dump(2) + "\n";
}

class OutputDir
{
  public:
    OutputDir(std::filesystem::path dir, RunManifest& manifest)
        : dir_(std::move(dir)), manifest_(manifest)
    {
        std::filesystem::create_directories(dir_);
        manifest_.outputs.clear();
    }

    void write(std::string const& name, std::string const& text)
    {
        write_file(dir_ / name, text);
        manifest_.outputs.push_back(name);
    }

    void finish() { write_file(dir_ / "manifest.json", dump(manifest_.to_json())); }

  private:
    std::filesystem::path dir_;
    RunManifest& manifest_;
};

RunConfig run_config(RunManifest const& m)
{
    RunConfig cfg;
    cfg.integrator.dt = m.dt;
    cfg.integrator.sample_every = m.sample_every;
    cfg.t_max = m.t_max;
    cfg.gap_mode = m.gap_mode;
    cfg.policy = m.policy;
    return cfg;
}
}  // namespace

void check_manifest(RunManifest const& m)
{
    static constexpr std::string_view commands[] = {"run", "ensemble", "arrow", "currents"};
    if (std::find(std::begin(commands), std::end(commands), m.command) == std::end(commands))
        throw UsageError(fmt::format("unknown command '{}'", m.command));
    if (!(m.dt > 0))
        throw UsageError("--dt must be positive");
    if (!(m.t_max > 0))
        throw UsageError("--t-max must be positive");
    if (m.n < 1)
        throw UsageError("--n must be at least 1");
    if (m.sample_every < 1)
        throw UsageError("--sample-every must be at least 1");
    for (auto r : m.suspended)
    {
        if (r != RuleId::n3_1 && r != RuleId::n4_4)
            throw UsageError(fmt::format("--suspend {} is not supported; use n3_1 or n4_4", to_string(r)));
        if ((r == RuleId::n3_1) != (m.rules == RulesVariant::nrules3))
        {
            throw UsageError(fmt::format("--suspend {} does not belong to --rules {}",
                                         to_string(r), to_string(m.rules)));
        }
        if (m.gap_mode != GapMode::hermitian_truncated)
        {
            throw UsageError(fmt::format(
                "--suspend {} requires --gap-mode hermitian: under {} semantics the launch"
                " sector is frozen and the counterfactual would be vacuous",
                to_string(r), to_string(m.gap_mode)));
        }
    }
    if (m.command == "arrow")
    {
        if (!m.suspended.empty())
            throw UsageError("arrow runs its own suspension counterfactual; drop --suspend");
        if (m.direction != "all" && m.direction != "forward" && m.direction != "reverse")
            throw UsageError("--direction must be all, forward or reverse");
    }
}

int execute(RunManifest m,
            ScenarioModel const& model,
            std::filesystem::path const& out_dir,
            std::size_t workers,
            std::ostream& log)
{
    check_manifest(m);
    RuleSet rules{m.rules, {m.suspended.begin(), m.suspended.end()}};
    auto cfg = run_config(m);
    OutputDir out(out_dir, m);
    int code = exit_ok;

    if (m.command == "run")
    {
        auto rec = run_trajectory(model, rules, cfg, m.seed);
        std::ostringstream csv, events;
        write_trajectory_csv(csv, model, rec.samples);
        std::vector<std::pair<std::size_t, CollapseEvent>> tagged;
        for (auto const& ev : rec.events)
            tagged.emplace_back(0, ev);
        write_event_log(events, tagged);
        out.write("trajectory.csv", csv.str());
        out.write("events.jsonl", events.str());
        out.write("summary.json", dump(record_summary_json(rec)));
        log << fmt::format("run: {} event(s), terminal={}\n", rec.events.size(), to_string(rec.terminal));
    }
    else if (m.command == "ensemble")
    {
        EnsembleOptions opts;
        opts.workers = workers;
        auto stats = run_ensemble(model, rules, cfg, m.n, m.seed, opts);
        auto oracle = deterministic_oracle(model, cfg);
        auto cmp = compare(stats, oracle);
        std::ostringstream events, hist, surv;
        write_event_log(events, stats.events);
        write_histogram_csv(hist, stats.hit_histogram);
        write_survival_csv(surv, stats, oracle);
        out.write("ensemble.json", dump(ensemble_stats_json(stats)));
        out.write("oracle.json", dump(oracle_json(oracle)));
        out.write("comparison.json", dump(comparison_json(cmp)));
        out.write("events.jsonl", events.str());
        out.write("hit_histogram.csv", hist.str());
        out.write("survival.csv", surv.str());
        log << fmt::format("ensemble: n={} collapsed={} ks={:.4g} (critical {:.4g}) comparison {}\n",
                           stats.n, cmp.n_collapsed, cmp.ks_statistic, cmp.ks_critical,
                           cmp.pass() ? "pass" : "FAIL");
    }
    else if (m.command == "arrow")
    {
        std::vector<ArrowCheck> checks;
        if (m.direction == "all")
        {
            checks = arrow_checks(model, rules, cfg, m.seed);
        }
        else if (m.direction == "forward")
        {
            auto rep = forward_experiment(model, rules, cfg, m.seed);
            auto expected = has_active_coupling(model) ? Verdict::flowed : Verdict::blocked;
            checks.push_back({"forward", rep, expected,
                              rep.verdict == expected && rep.max_backflow == 0});
        }
        else
        {
            auto rep = reverse_experiment(model, rules, cfg, m.seed);
            checks.push_back({"reverse", rep, Verdict::blocked, rep.verdict == Verdict::blocked});
        }
        out.write("arrow_report.json", dump(arrow_checks_json(checks)));
        for (auto const& c : checks)
        {
            log << fmt::format("{:<10} verdict={:<8} expected={:<8} max_backflow={} hits={} {}\n",
                               c.name, to_string(c.report.verdict), to_string(c.expected),
                               format_real(c.report.max_backflow), c.report.total_hits,
                               c.ok ? "ok" : "UNEXPECTED");
            if (!c.ok)
                code = exit_failed;
        }
    }
    else if (m.command == "currents")
    {
        cfg.sample_hits = false;
        auto rec = run_trajectory(model, rules, cfg, m.seed);
        auto oracle = deterministic_oracle(model, cfg);
        std::ostringstream csv;
        write_trajectory_csv(csv, model, rec.samples);
        out.write("currents.csv", csv.str());
        out.write("oracle.json", dump(oracle_json(oracle)));
        log << fmt::format("currents: {} sample(s)\n", rec.samples.size());
    }
    out.finish();
    return code;
}

int validate_command(std::filesystem::path const& scenario, std::ostream& out)
{
    std::string text;
    try
    {
        text = read_file(scenario);
    }
    catch (std::exception const& e)
    {
        out << "error: " << e.what() << "\n";
        return exit_usage;
    }
    ScenarioModel model;
    try
    {
        model = parse_scenario(text);
    }
    catch (ScenarioError const& e)
    {
        out << "invalid: " << e.what() << "\n";
        return exit_failed;
    }
    auto report = validate_model(model);
    for (auto const& e : report.errors)
        out << "error: " << e << "\n";
    for (auto const& w : report.warnings)
        out << "warning: " << w << "\n";
    out << (report.ok() ? "valid" : "invalid") << "\n";
    return report.ok() ? exit_ok : exit_failed;
}

int execute_from_files(RunManifest m,
                       ManifestCompleter const& complete,
                       std::filesystem::path const& out_dir,
                       std::size_t workers,
                       std::ostream& log,
                       std::ostream& err)
{
    std::string text;
    try
    {
        text = read_file(m.scenario_path);
    }
    catch (std::exception const& e)
    {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
    auto hash = sha256_hex(text);
    if (!m.scenario_sha256.empty() && m.scenario_sha256 != hash)
    {
        err << "error: scenario " << m.scenario_path << " does not match the manifest hash\n";
        return exit_usage;
    }
    m.scenario_sha256 = hash;

    ScenarioModel model;
    try
    {
        model = load_scenario(text);
    }
    catch (ScenarioError const& e)
    {
        err << e.what() << "\n";
        return exit_failed;
    }
    try
    {
        if (complete)
            complete(m, model);
        return execute(std::move(m), model, out_dir, workers, log);
    }
    catch (UsageError const& e)
    {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
    catch (std::filesystem::filesystem_error const& e)
    {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
    catch (std::exception const& e)
    {
        err << "error: " << e.what() << "\n";
        return exit_failed;
    }
}

}  // namespace nrsim
