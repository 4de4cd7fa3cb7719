#include "nrsim/engine.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace nrsim
{

double hit_rate(CurrentVector const& currents, double s)
{
    if (!(s > 0))
        throw EngineError(fmt::format("degenerate state: hit rate needs s > 0, got {}", s));
    return currents.positive_sum() / s;
}

bool sample_hit(PhiloxStream& rng, double rate, double dt)
{
    double p = -std::expm1(-rate * dt);
    return rng.uniform() < p;
}

ComponentId choose_component(PhiloxStream& rng, CurrentVector const& currents)
{
    double total = currents.positive_sum();
    if (!(total > 0))
        throw EngineError("no launch component has positive current");
    double u = rng.uniform() * total;
    double cum = 0;
    std::optional<ComponentId> last;
    for (std::size_t m = 0; m < currents.size(); ++m)
    {
        double j = currents.values[m];
        if (!(j > 0))
            continue;
        cum += j;
        last = currents.ids[m];
        if (u < cum)
            return currents.ids[m];
    }
    return *last;
}

std::string_view to_string(NormPolicy p)
{
    return p == NormPolicy::preserve_total ? "preserve_total" : "raw";
}

std::string_view to_string(Terminal t)
{
    return t == Terminal::t_max_reached ? "t_max_reached" : "collapsed_quiescent";
}

EngineState apply_collapse(EngineState const& engine,
                           ComponentId chosen,
                           ScenarioModel const& model,
                           RuleSet const& rules,
                           NormPolicy policy)
{
    auto pos = model.position(chosen);
    if (!pos)
        throw EngineError(fmt::format("collapse onto unknown component C{}", chosen.value));
    if (!is_launch_like(engine.statuses.at(*pos)))
    {
        throw EngineError(fmt::format("collapse onto C{} which has status {}",
                                      chosen.value, to_string(engine.statuses[*pos])));
    }
    auto const& comp = model.components[*pos];
    double const pre_s = engine.state.square_modulus();
    double const kept = component_square_modulus(engine.state, comp);
    if (kept == 0)
        throw EngineError(fmt::format("collapse-on-empty: C{} has no amplitude", chosen.value));

    EngineState out;
    out.epoch = engine.epoch + 1;
    out.t = engine.t;
    out.statuses = statuses_after_collapse(model, rules, chosen);
    out.state = StateVector(engine.state.dim());
    double const scale = policy == NormPolicy::preserve_total ? std::sqrt(pre_s / kept) : 1.0;
    for (auto idx : comp.basis_indices)
        out.state[idx] = engine.state[idx] * scale;
    return out;
}

RunConfig RunConfig::from_defaults(ScenarioModel const& model)
{
    RunConfig cfg;
    cfg.integrator.dt = model.defaults.dt;
    cfg.t_max = model.defaults.t_max;
    cfg.gap_mode = model.defaults.gap_mode;
    return cfg;
}

namespace
{
struct Probe
{
    std::vector<Complex> g_psi;
    double s = 0;
    CurrentVector launch;
    double rate = 0;
};

Probe probe(StateVector const& psi, EffectiveGenerator const& gen, ScenarioModel const& model)
{
    Probe p;
    p.g_psi.resize(psi.dim());
    gen.apply(psi.amplitudes(), p.g_psi);
    p.s = psi.square_modulus();
    p.launch = component_currents(psi, p.g_psi, gen, model);
    p.rate = p.s > 0 ? hit_rate(p.launch, p.s) : 0.0;
    return p;
}

RecordSample make_sample(double t, int epoch, StateVector const& psi, Probe const& p, ScenarioModel const& model)
{
    RecordSample out;
    out.t = t;
    out.epoch = epoch;
    out.s = p.s;
    for (auto const& c : model.components)
        out.square_moduli.push_back(component_square_modulus(psi, c));
    out.currents = all_component_currents(psi, p.g_psi, model);
    return out;
}
}  // namespace

TrajectoryRecord run_trajectory(ScenarioModel const& model,
                                RuleSet const& rules,
                                RunConfig const& cfg,
                                std::uint64_t seed,
                                std::uint64_t stream)
{
    rules.check();
    cfg.integrator.check();
    if (!(cfg.t_max >= 0))
        throw std::invalid_argument("t_max must be non-negative");

    PhiloxStream rng(seed, stream);
    TrajectoryRecord rec;

    EngineState eng;
    eng.statuses = initial_statuses(model, rules);
    eng.state = cfg.initial_state ? *cfg.initial_state : model.psi0;
    if (eng.state.dim() != model.dim)
        throw EngineError("initial state dimension does not match the model");
    auto gen = assemble_generator(model, rules, cfg.gap_mode, eng.statuses, eng.epoch);
    auto cur = probe(eng.state, gen, model);
    double epoch_s = cur.s;
    double epoch_t = 0;

    auto track = [&] {
        if (!cfg.track_flux)
            return;
        for (auto const& gap : model.gaps())
        {
            if (!gap.irreversible)
                continue;
            auto f = gap_flux(eng.state, gen, model, gap);
            rec.max_forward_flux = std::max(rec.max_forward_flux, f.forward);
            rec.max_backflow = std::max(rec.max_backflow, f.backward);
        }
    };
    auto note_launch = [&] {
        bool negative = false;
        for (auto v : cur.launch.values)
        {
            rec.min_launch_current = std::min(rec.min_launch_current, v);
            negative = negative || v < 0;
        }
        rec.negative_current_steps += negative;
    };

    track();
    note_launch();
    if (cfg.record_samples)
        rec.samples.push_back(make_sample(0.0, eng.epoch, eng.state, cur, model));

    auto const dt = cfg.integrator.dt;
    auto const n = step_count(cfg.t_max, dt);
    for (std::size_t k = 0; k < n; ++k)
    {
        double const tk = static_cast<double>(k) * dt;
        double const t_next = (k + 1 == n) ? cfg.t_max : static_cast<double>(k + 1) * dt;
        double const h = t_next - tk;
        eng.state = step_from(eng.state, cur.g_psi, gen, h);
        eng.t = t_next;
        double const rate_prev = cur.rate;
        cur = probe(eng.state, gen, model);
        track();
        note_launch();

        if (gen.conserves_norm())
        {
            double drift = std::abs(cur.s - epoch_s);
            if (drift > cfg.integrator.norm_drift_budget * (t_next - epoch_t) + 1e-14)
            {
                throw NumericalError(fmt::format(
                    "norm drift {:.3e} at t={} exceeds budget {:.3e} per unit time",
                    drift, t_next, cfg.integrator.norm_drift_budget));
            }
        }

        bool collapsed = false;
        if (cfg.sample_hits && rules.trigger_enabled() && cur.launch.positive_sum() > 0)
        {
            double const mean_rate = 0.5 * (rate_prev + cur.rate);
            if (sample_hit(rng, mean_rate, h))
            {
                CollapseEvent ev;
                ev.t_sc = t_next;
                ev.chosen = choose_component(rng, cur.launch);
                ev.pre_hit_s = cur.s;
                ev.pre_hit_currents = cur.launch;
                ev.epoch = eng.epoch;
                ev.policy = cfg.policy;
                rec.events.push_back(ev);
                if (rules.collapse_enabled())
                {
                    eng = apply_collapse(eng, ev.chosen, model, rules, cfg.policy);
                    gen = assemble_generator(model, rules, cfg.gap_mode, eng.statuses, eng.epoch);
                    cur = probe(eng.state, gen, model);
                    epoch_s = cur.s;
                    epoch_t = t_next;
                    collapsed = true;
                }
            }
        }

        bool const quiescent = collapsed && gen.launch().empty();
        bool const sample_now = (k + 1) % cfg.integrator.sample_every == 0 || k + 1 == n;
        if (cfg.record_samples && (sample_now || collapsed))
            rec.samples.push_back(make_sample(t_next, eng.epoch, eng.state, cur, model));
        if (quiescent)
        {
            rec.terminal = Terminal::collapsed_quiescent;
            break;
        }
    }
    rec.t_end = eng.t;
    rec.final_state = eng.state;
    return rec;
}

}  // namespace nrsim
