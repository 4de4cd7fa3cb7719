#include "nrsim/ensemble.hpp"

#include <atomic>
#include <exception>
#include <thread>

#include <fmt/format.h>

#include "nrsim/scenario_io.hpp"

namespace nrsim
{

EnsembleError::EnsembleError(std::size_t index, std::string const& what)
    : std::runtime_error(fmt::format("trajectory {}: {}", index, what)), index_(index)
{
}

std::uint64_t model_fingerprint(ScenarioModel const& model)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : serialize_scenario(model))
    {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

Provenance make_provenance(ScenarioModel const& model, RunConfig const& cfg)
{
    return {model_fingerprint(model), cfg.gap_mode, cfg.integrator.dt, cfg.t_max};
}

void finalize_stats(EnsembleStats& stats, double t_max, EnsembleOptions const& opts)
{
    double const n = static_cast<double>(stats.n);
    std::size_t collapsed = 0;
    for (auto const& [id, count] : stats.counts)
    {
        stats.shares[id] = static_cast<double>(count) / n;
        collapsed += count;
    }
    stats.no_collapse_fraction = static_cast<double>(stats.n - collapsed) / n;
    std::sort(stats.hit_times.begin(), stats.hit_times.end());

    auto& hist = stats.hit_histogram;
    hist.lo = 0;
    hist.hi = t_max;
    hist.counts.assign(std::max<std::size_t>(opts.histogram_bins, 1), 0);
    for (auto t : stats.hit_times)
    {
        auto bin = static_cast<std::size_t>(t / hist.bin_width());
        hist.counts[std::min(bin, hist.counts.size() - 1)] += 1;
    }

    auto const points = std::max<std::size_t>(opts.survival_points, 2);
    stats.survival_t.clear();
    stats.survival.clear();
    for (std::size_t i = 0; i < points; ++i)
    {
        double t = t_max * static_cast<double>(i) / static_cast<double>(points - 1);
        auto hits = std::upper_bound(stats.hit_times.begin(), stats.hit_times.end(), t)
                    - stats.hit_times.begin();
        stats.survival_t.push_back(t);
        stats.survival.push_back(1.0 - static_cast<double>(hits) / n);
    }
}

EnsembleStats run_ensemble(ScenarioModel const& model,
                           RuleSet const& rules,
                           RunConfig const& cfg,
                           std::size_t n,
                           std::uint64_t master_seed,
                           EnsembleOptions const& opts)
{
    if (n < 1)
        throw std::invalid_argument("ensemble needs at least one trajectory");
    rules.check();

    RunConfig run_cfg = cfg;
    run_cfg.record_samples = false;
    run_cfg.track_flux = false;

    std::vector<std::vector<CollapseEvent>> events(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++)
        {
            try
            {
                events[i] = run_trajectory(model, rules, run_cfg, master_seed, i).events;
            }
            catch (...)
            {
                errors[i] = std::current_exception();
            }
        }
    };
    auto const workers = std::clamp<std::size_t>(opts.workers, 1, n);
    if (workers == 1)
    {
        worker();
    }
    else
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(worker);
    }

    for (std::size_t i = 0; i < n; ++i)
    {
        if (!errors[i])
            continue;
        try
        {
            std::rethrow_exception(errors[i]);
        }
        catch (std::exception const& e)
        {
            throw EnsembleError(i, e.what());
        }
    }

    EnsembleStats stats;
    stats.n = n;
    stats.seed = master_seed;
    stats.provenance = make_provenance(model, cfg);
    auto statuses = initial_statuses(model, rules);
    for (std::size_t c = 0; c < statuses.size(); ++c)
    {
        if (is_launch_like(statuses[c]))
            stats.counts[model.components[c].id] = 0;
    }
    for (std::size_t i = 0; i < n; ++i)
    {
        if (events[i].empty())
            continue;
        auto const& first = events[i].front();
        stats.counts[first.chosen] += 1;
        stats.hit_times.push_back(first.t_sc);
        if (opts.keep_events)
        {
            for (auto const& ev : events[i])
                stats.events.emplace_back(i, ev);
        }
    }
    finalize_stats(stats, cfg.t_max, opts);
    return stats;
}

double OracleResult::survival_at(double time) const
{
    if (t.empty())
        return 1.0;
    if (time <= t.front())
        return survival_pred.front();
    if (time >= t.back())
        return survival_pred.back();
    auto it = std::upper_bound(t.begin(), t.end(), time);
    auto hi = static_cast<std::size_t>(it - t.begin());
    auto lo = hi - 1;
    double w = (time - t[lo]) / (t[hi] - t[lo]);
    return survival_pred[lo] + w * (survival_pred[hi] - survival_pred[lo]);
}

OracleResult deterministic_oracle(ScenarioModel const& model, RunConfig const& cfg, std::size_t refine)
{
    cfg.integrator.check();
    if (refine < 1)
        throw std::invalid_argument("oracle refinement must be at least 1");

    RuleSet rules;
    auto statuses = initial_statuses(model, rules);
    auto gen = assemble_generator(model, rules, cfg.gap_mode, statuses);

    OracleResult out;
    out.provenance = make_provenance(model, cfg);
    out.grid_dt = cfg.integrator.dt / static_cast<double>(refine);

    StateVector psi = cfg.initial_state ? *cfg.initial_state : model.psi0;
    std::vector<Complex> g(psi.dim());
    auto measure = [&](std::vector<double>& positive) {
        gen.apply(psi.amplitudes(), g);
        auto j = component_currents(psi, g, gen, model);
        positive.assign(j.size(), 0.0);
        for (std::size_t m = 0; m < j.size(); ++m)
            positive[m] = std::max(j.values[m], 0.0);
        double s = psi.square_modulus();
        return s > 0 ? j.positive_sum() / s : 0.0;
    };

    auto const& launch = gen.launch();
    std::vector<double> integral(launch.size(), 0.0);
    std::vector<double> jp_prev, jp_next;
    double rate_prev = measure(jp_prev);
    double hazard = 0;
    out.t.push_back(0.0);
    out.survival_pred.push_back(1.0);

    auto const n = step_count(cfg.t_max, out.grid_dt);
    for (std::size_t k = 0; k < n; ++k)
    {
        double const tk = static_cast<double>(k) * out.grid_dt;
        double const t_next = (k + 1 == n) ? cfg.t_max : static_cast<double>(k + 1) * out.grid_dt;
        double const h = t_next - tk;
        psi = step_from(psi, g, gen, h);
        double rate_next = measure(jp_next);
        for (std::size_t m = 0; m < launch.size(); ++m)
            integral[m] += 0.5 * h * (jp_prev[m] + jp_next[m]);
        hazard += 0.5 * h * (rate_prev + rate_next);
        out.t.push_back(t_next);
        out.survival_pred.push_back(std::exp(-hazard));
        rate_prev = rate_next;
        std::swap(jp_prev, jp_next);
    }

    double total = 0;
    for (std::size_t m = 0; m < launch.size(); ++m)
    {
        out.integrals[launch[m]] = integral[m];
        total += integral[m];
    }
    for (std::size_t m = 0; m < launch.size(); ++m)
        out.predicted_shares[launch[m]] = total > 0 ? integral[m] / total : 0.0;
    return out;
}

ComparisonReport
compare(EnsembleStats const& stats, OracleResult const& oracle, CompareThresholds const& thresholds)
{
    if (!(stats.provenance == oracle.provenance))
        throw ProvenanceError("ensemble and oracle were computed from different models or settings");

    ComparisonReport rep;
    for (auto const& [id, count] : stats.counts)
        rep.n_collapsed += count;
    rep.predicted_shares = oracle.predicted_shares;
    double const nc = static_cast<double>(rep.n_collapsed);
    for (auto const& [id, p] : oracle.predicted_shares)
    {
        auto it = stats.counts.find(id);
        double count = it == stats.counts.end() ? 0.0 : static_cast<double>(it->second);
        double emp = nc > 0 ? count / nc : 0.0;
        rep.empirical_shares[id] = emp;
        double se = nc > 0 ? std::sqrt(p * (1 - p) / nc) : 0.0;
        double z = 0;
        if (se > 0)
            z = (emp - p) / se;
        else if (nc > 0 && emp != p)
            z = std::copysign(std::numeric_limits<double>::infinity(), emp - p);
        rep.z_scores[id] = z;
        rep.shares_pass = rep.shares_pass && std::abs(z) < thresholds.z_max;
    }

    auto const& times = stats.hit_times;
    if (!times.empty())
    {
        double const s_end = oracle.survival_at(stats.provenance.t_max);
        double const norm = 1.0 - s_end;
        auto cdf = [&](double t) {
            return norm > 0 ? (1.0 - oracle.survival_at(t)) / norm : 1.0;
        };
        rep.ks_statistic = ks_statistic(times, cdf);
        rep.ks_critical = thresholds.ks_coefficient / std::sqrt(static_cast<double>(times.size()));
        rep.ks_pass = rep.ks_statistic < rep.ks_critical;
    }
    return rep;
}

}  // namespace nrsim
