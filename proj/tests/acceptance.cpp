// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <sys/wait.h>
#include <thread>

#include <fmt/format.h>

#include "nrsim/arrow.hpp"
#include "nrsim/io.hpp"
#include "nrsim/scenario_io.hpp"

using namespace nrsim;
namespace fs = std::filesystem;

namespace
{
std::vector<std::string> const kFixtures{"two_level", "symmetric_two_mode", "three_mode"};

ScenarioModel fixture(std::string const& name)
{
    return load_scenario_file(fs::path(NRSIM_FIXTURE_DIR) / (name + ".json"));
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Outcome
{
    bool pass = false;
    std::string detail;
};

Outcome irreversibility()
{
    auto t0 = std::chrono::steady_clock::now();
    double worst_backflow = 0;
    std::size_t hits = 0, runs = 0;
    double worst_change = 0;
    for (auto const& name : kFixtures)
    {
        auto m = fixture(name);
        auto cfg = RunConfig::from_defaults(m);
        for (auto variant : {RulesVariant::nrules3, RulesVariant::nrules4})
        {
            for (std::uint64_t seed = 0; seed < 100; ++seed)
            {
                auto rep = reverse_experiment(m, RuleSet{variant, {}}, cfg, seed);
                worst_backflow = std::max(worst_backflow, rep.max_backflow);
                worst_change = std::max(worst_change, rep.max_state_change);
                hits += rep.total_hits;
                ++runs;
            }
        }
    }
    double secs = seconds_since(t0);
    bool ok = worst_backflow == 0.0 && hits == 0 && worst_change == 0.0 && secs < 10.0;
    return {ok, fmt::format("{} reverse runs (3 fixtures x 2 engines x 100 seeds): max_backflow={} hits={} "
                            "max|psi(t)-psi(0)|={} in {:.2f} s (limit 10 s)",
                            runs, worst_backflow, hits, worst_change, secs)};
}

Outcome counterfactual()
{
    auto m = fixture("two_level");
    auto cfg = RunConfig::from_defaults(m);
    cfg.gap_mode = GapMode::hermitian_truncated;
    auto [sus3, res3] = suspension_counterfactual(m, cfg, RuleId::n3_1, 42);
    auto [sus4, res4] = suspension_counterfactual(m, cfg, RuleId::n4_4, 42);
    bool agree = sus3.max_backflow == sus4.max_backflow && res3.max_backflow == res4.max_backflow
                 && sus3.verdict == sus4.verdict && res3.verdict == res4.verdict
                 && sus3.total_hits == sus4.total_hits && res3.total_hits == res4.total_hits;
    bool ok = sus3.max_backflow > 1e-3 && res3.max_backflow == 0.0 && sus3.verdict == Verdict::flowed
              && res3.verdict == Verdict::blocked && agree;
    return {ok, fmt::format("suspended max_backflow={:.6f} ({}), restored max_backflow={} ({}), "
                            "nrules3/nrules4 agree={}",
                            sus3.max_backflow, to_string(sus3.verdict), res3.max_backflow,
                            to_string(res3.verdict), agree)};
}

Outcome rate_law()
{
    auto t0 = std::chrono::steady_clock::now();
    auto m = fixture("three_mode");
    auto cfg = RunConfig::from_defaults(m);
    EnsembleOptions opts;
    opts.workers = std::max(1u, std::thread::hardware_concurrency());
    opts.keep_events = false;
    auto stats = run_ensemble(m, RuleSet{}, cfg, 20000, m.defaults.seed, opts);
    auto oracle = deterministic_oracle(m, cfg);
    auto rep = compare(stats, oracle);
    double secs = seconds_since(t0);
    std::string shares;
    for (auto const& [id, p] : rep.predicted_shares)
    {
        shares += fmt::format(" C{}: {:.4f} vs {:.4f} (z={:+.2f})", id.value, rep.empirical_shares.at(id), p,
                              rep.z_scores.at(id));
    }
    bool ok = rep.pass() && secs < 120.0;
    return {ok, fmt::format("n=20000 collapsed={};{}; KS D={:.4f} < {:.4f}; {:.1f} s (limit 120 s)",
                            rep.n_collapsed, shares, rep.ks_statistic, rep.ks_critical, secs)};
}

Outcome engine_equivalence()
{
    std::size_t runs = 0, events = 0, mismatches = 0;
    for (auto const& name : kFixtures)
    {
        auto m = fixture(name);
        auto cfg = RunConfig::from_defaults(m);
        cfg.record_samples = false;
        for (std::uint64_t seed = 0; seed < 100; ++seed)
        {
            auto a = run_trajectory(m, RuleSet{RulesVariant::nrules3, {}}, cfg, seed);
            auto b = run_trajectory(m, RuleSet{RulesVariant::nrules4, {}}, cfg, seed);
            ++runs;
            events += a.events.size();
            bool same = a.events.size() == b.events.size();
            for (std::size_t e = 0; same && e < a.events.size(); ++e)
            {
                same = a.events[e].t_sc == b.events[e].t_sc && a.events[e].chosen == b.events[e].chosen
                       && a.events[e].epoch == b.events[e].epoch;
            }
            mismatches += !same;
        }
    }
    return {mismatches == 0 && events > 0,
            fmt::format("{} seed/fixture pairs, {} events, {} mismatching sequences", runs, events, mismatches)};
}

StateVector random_state(std::size_t dim, std::mt19937_64& gen)
{
    std::normal_distribution<double> nd;
    StateVector psi(dim);
    for (auto& a : psi.amplitudes())
        a = {nd(gen), nd(gen)};
    double s = std::sqrt(psi.square_modulus());
    for (auto& a : psi.amplitudes())
        a /= s;
    return psi;
}

Outcome hygiene()
{
    // (a) analytic vs finite-difference currents.
    std::mt19937_64 gen(20261016);
    double worst_rel = 0;
    std::size_t states = 0;
    for (auto const& name : kFixtures)
    {
        auto m = fixture(name);
        RuleSet rules;
        for (auto mode : {GapMode::one_way_feed, GapMode::norm_compensated, GapMode::hermitian_truncated})
        {
            auto g = assemble_generator(m, rules, mode, initial_statuses(m, rules));
            for (int k = 0; k < 1000; ++k)
            {
                auto psi = random_state(m.dim, gen);
                std::vector<Complex> gpsi(m.dim);
                g.apply(psi.amplitudes(), gpsi);
                auto a = all_component_currents(psi, gpsi, m);
                auto f = fd_all_currents(psi, g, m);
                double scale = 0, diff = 0;
                for (std::size_t c = 0; c < a.size(); ++c)
                {
                    scale = std::max(scale, std::abs(a[c]));
                    diff = std::max(diff, std::abs(a[c] - f[c]));
                }
                worst_rel = std::max(worst_rel, scale > 0 ? diff / scale : diff);
                ++states;
            }
        }
    }

    // (b) RK4 convergence on the Rabi problem (two-level, hermitian).
    auto m = fixture("two_level");
    RuleSet rules;
    auto herm = assemble_generator(m, rules, GapMode::hermitian_truncated, initial_statuses(m, rules));
    double const t_end = 2.0;
    auto endpoint_error = [&](double dt) {
        IntegratorConfig cfg;
        cfg.dt = dt;
        cfg.sample_every = 1u << 30;
        cfg.norm_drift_budget = 1.0;  // coarse steps; drift is measured separately below
        auto psi = evolve(m.psi0, herm, m, 0.0, t_end, cfg).final_state;
        return std::abs(psi[0] - Complex(std::cos(t_end))) + std::abs(psi[1] - Complex(0, -std::sin(t_end)));
    };
    double min_ratio = 1e300;
    std::string ratios;
    for (double dt : {0.2, 0.1, 0.05})
    {
        double r = endpoint_error(dt) / endpoint_error(dt / 2);
        min_ratio = std::min(min_ratio, r);
        ratios += fmt::format(" {:.2f}", r);
    }

    // (c) hermitian-mode norm drift at dt = 1e-3.
    double worst_drift = 0;
    for (auto const& name : kFixtures)
    {
        auto fm = fixture(name);
        auto g = assemble_generator(fm, rules, GapMode::hermitian_truncated, initial_statuses(fm, rules));
        IntegratorConfig cfg;
        cfg.dt = 1e-3;
        cfg.sample_every = 100;
        auto seg = evolve(fm.psi0, g, fm, 0.0, fm.defaults.t_max, cfg);
        double s0 = fm.psi0.square_modulus();
        for (auto const& s : seg.samples)
            if (s.t > 0)
                worst_drift = std::max(worst_drift, std::abs(s.state.square_modulus() - s0) / s.t);
    }

    bool ok = worst_rel <= 1e-6 && min_ratio >= 8.0 && worst_drift < 1e-8;
    return {ok, fmt::format("current FD rel err {:.2e} over {} states (limit 1e-6); RK4 halving ratios{} "
                            "(need >= 8); norm drift {:.2e}/unit time (limit 1e-8)",
                            worst_rel, states, ratios, worst_drift)};
}

int cli(std::string const& args)
{
    std::string cmd = std::string(NRSIM_CLI) + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool same_tree(fs::path const& a, fs::path const& b, std::size_t& files)
{
    std::size_t na = 0, nb = 0;
    bool same = true;
    for (auto const& e : fs::directory_iterator(a))
    {
        ++na;
        auto other = b / e.path().filename();
        same = same && fs::exists(other) && read_file(e.path()) == read_file(other);
    }
    for ([[maybe_unused]] auto const& e : fs::directory_iterator(b))
        ++nb;
    files += na;
    return same && na == nb && na > 0;
}

Outcome determinism()
{
    auto root = fs::temp_directory_path() / "nrsim_acceptance";
    fs::remove_all(root);
    auto fx = [](std::string const& name) {
        return (fs::path(NRSIM_FIXTURE_DIR) / (name + ".json")).string();
    };
    std::size_t files = 0;
    bool ok = true;
    std::vector<std::string> failed;
    auto twice = [&](std::string const& label, std::string const& args, std::string const& extra_a,
                     std::string const& extra_b) {
        auto a = root / (label + "_a");
        auto b = root / (label + "_b");
        int ca = cli(args + " --out-dir " + a.string() + extra_a);
        int cb = cli(args + " --out-dir " + b.string() + extra_b);
        bool same = ca == 0 && cb == 0 && same_tree(a, b, files);
        if (!same)
            failed.push_back(label);
        ok = ok && same;
    };
    for (auto const& name : kFixtures)
    {
        twice("run_" + name, "run --scenario " + fx(name) + " --seed 7", "", "");
        twice("arrow_" + name, "arrow --scenario " + fx(name), "", "");
    }
    twice("currents", "currents --scenario " + fx("two_level") + " --gap-mode hermitian", "", "");
    twice("ensemble_repeat", "ensemble --scenario " + fx("three_mode") + " --n 2000 --workers 8", "", "");
    twice("ensemble_workers", "ensemble --scenario " + fx("three_mode") + " --n 2000", " --workers 1",
          " --workers 8");
    std::string detail = fmt::format("{} output files compared across repeated runs and 1 vs 8 workers", files);
    if (!failed.empty())
        detail += "; differing: " + fmt::format("{}", fmt::join(failed, ", "));
    return {ok, detail};
}
}  // namespace

int main()
{
    struct Criterion
    {
        int id;
        char const* name;
        Outcome (*run)();
    };
    Criterion const criteria[] = {
        {1, "irreversibility", irreversibility},
        {2, "counterfactual", counterfactual},
        {3, "rate-law statistics", rate_law},
        {4, "engine equivalence", engine_equivalence},
        {5, "numerical hygiene", hygiene},
        {6, "determinism", determinism},
    };
    bool all = true;
    for (auto const& c : criteria)
    {
        Outcome o;
        try
        {
            o = c.run();
        }
        catch (std::exception const& e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        all = all && o.pass;
        std::cout << fmt::format("{} criterion {} ({}): {}", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail)
                  << std::endl;
    }
    return all ? 0 : 1;
}
