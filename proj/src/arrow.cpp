#include "nrsim/arrow.hpp"

#include <cmath>

#include <fmt/format.h>

namespace nrsim
{

std::string_view to_string(Direction d)
{
    return d == Direction::forward ? "forward" : "reverse";
}

std::string_view to_string(Verdict v)
{
    return v == Verdict::blocked ? "blocked" : "flowed";
}

namespace
{
struct Profile
{
    double max_backflow = 0;
    double max_forward = 0;
    double integrated = 0;
    double min_launch = 0;
    double max_change = 0;
};

// Hit-free evolution in epoch 0, measuring gap fluxes at every step.
Profile deterministic_profile(ScenarioModel const& model,
                              RuleSet const& rules,
                              RunConfig const& cfg,
                              StateVector const& start)
{
    auto statuses = initial_statuses(model, rules);
    auto gen = assemble_generator(model, rules, cfg.gap_mode, statuses);
    Profile p;
    StateVector psi = start;
    std::vector<Complex> g(psi.dim());

    auto measure = [&] {
        gen.apply(psi.amplitudes(), g);
        for (auto const& gap : model.gaps())
        {
            if (!gap.irreversible)
                continue;
            auto f = gap_flux(psi, gen, model, gap);
            p.max_backflow = std::max(p.max_backflow, f.backward);
            p.max_forward = std::max(p.max_forward, f.forward);
        }
        for (std::size_t i = 0; i < psi.dim(); ++i)
            p.max_change = std::max(p.max_change, std::abs(psi[i] - start[i]));
        double sum = 0;
        for (auto v : component_currents(psi, g, gen, model).values)
        {
            p.min_launch = std::min(p.min_launch, v);
            sum += v;
        }
        return sum;
    };

    double j_prev = measure();
    auto const dt = cfg.integrator.dt;
    auto const n = step_count(cfg.t_max, dt);
    for (std::size_t k = 0; k < n; ++k)
    {
        double const tk = static_cast<double>(k) * dt;
        double const t_next = (k + 1 == n) ? cfg.t_max : static_cast<double>(k + 1) * dt;
        psi = step_from(psi, g, gen, t_next - tk);
        double j_next = measure();
        p.integrated += 0.5 * (t_next - tk) * (j_prev + j_next);
        j_prev = j_next;
    }
    return p;
}

ArrowReport run_experiment(ScenarioModel const& model,
                           RuleSet const& rules,
                           RunConfig const& cfg,
                           std::uint64_t seed,
                           Direction direction,
                           StateVector const& start)
{
    auto profile = deterministic_profile(model, rules, cfg, start);

    RunConfig sampled = cfg;
    sampled.initial_state = start;
    sampled.record_samples = false;
    sampled.track_flux = true;
    auto rec = run_trajectory(model, rules, sampled, seed);

    ArrowReport rep;
    rep.direction = direction;
    rep.max_backflow = std::max(profile.max_backflow, rec.max_backflow);
    rep.max_forward_flow = std::max(profile.max_forward, rec.max_forward_flux);
    rep.integrated_launch_current = profile.integrated;
    rep.min_launch_current = profile.min_launch;
    rep.max_state_change = profile.max_change;
    rep.total_hits = rec.events.size();
    rep.rules = rules;
    rep.gap_mode = cfg.gap_mode;
    if (direction == Direction::forward)
    {
        rep.verdict = (rep.max_forward_flow > 0 || rep.total_hits > 0) ? Verdict::flowed
                                                                       : Verdict::blocked;
    }
    else
    {
        rep.verdict = (rep.max_backflow == 0 && rep.total_hits == 0) ? Verdict::blocked
                                                                     : Verdict::flowed;
    }
    return rep;
}
}  // namespace

StateVector reverse_state(ScenarioModel const& model, RuleSet const& rules)
{
    auto statuses = initial_statuses(model, rules);
    std::vector<std::size_t> targets;
    for (std::size_t c = 0; c < statuses.size(); ++c)
    {
        if (is_launch_like(statuses[c]))
        {
            auto const& idx = model.components[c].basis_indices;
            targets.insert(targets.end(), idx.begin(), idx.end());
        }
    }
    if (targets.empty())
        throw std::invalid_argument("model has no launch components to start from");
    double s = model.psi0.square_modulus();
    if (!(s > 0))
        s = 1.0;
    StateVector out(model.dim);
    double const amp = std::sqrt(s / static_cast<double>(targets.size()));
    for (auto i : targets)
        out[i] = amp;
    return out;
}

ArrowReport forward_experiment(ScenarioModel const& model,
                               RuleSet const& rules,
                               RunConfig const& cfg,
                               std::uint64_t seed)
{
    auto start = cfg.initial_state ? *cfg.initial_state : model.psi0;
    return run_experiment(model, rules, cfg, seed, Direction::forward, start);
}

ArrowReport reverse_experiment(ScenarioModel const& model,
                               RuleSet const& rules,
                               RunConfig const& cfg,
                               std::uint64_t seed)
{
    return run_experiment(model, rules, cfg, seed, Direction::reverse, reverse_state(model, rules));
}

std::pair<ArrowReport, ArrowReport> suspension_counterfactual(ScenarioModel const& model,
                                                              RunConfig const& cfg,
                                                              RuleId rule,
                                                              std::uint64_t seed)
{
    RuleSet restored;
    if (rule == RuleId::n3_1)
        restored.variant = RulesVariant::nrules3;
    else if (rule == RuleId::n4_4)
        restored.variant = RulesVariant::nrules4;
    else
        throw RuleError(fmt::format("rule {} cannot be used for a counterfactual", to_string(rule)));

    RuleSet suspended = restored;
    suspended.suspended.insert(rule);

    RunConfig herm = cfg;
    herm.gap_mode = GapMode::hermitian_truncated;
    RunConfig sink = cfg;
    sink.gap_mode = GapMode::one_way_feed;
    return {reverse_experiment(model, suspended, herm, seed),
            reverse_experiment(model, restored, sink, seed)};
}

bool has_active_coupling(ScenarioModel const& model)
{
    for (auto const& gap : model.gaps())
    {
        if (!gap.irreversible || model.component(gap.low).status != Status::active)
            continue;
        for (auto const& e : gap.interaction.entries)
        {
            if (e.value != Complex{})
                return true;
        }
    }
    return false;
}

std::vector<ArrowCheck> arrow_checks(ScenarioModel const& model,
                                     RuleSet const& rules,
                                     RunConfig const& cfg,
                                     std::uint64_t seed)
{
    bool const coupled = has_active_coupling(model);
    std::vector<ArrowCheck> out;

    auto fwd = forward_experiment(model, rules, cfg, seed);
    bool fwd_ok = fwd.verdict == (coupled ? Verdict::flowed : Verdict::blocked);
    if (cfg.gap_mode != GapMode::hermitian_truncated)
        fwd_ok = fwd_ok && fwd.max_backflow == 0;
    out.push_back({"forward", fwd, coupled ? Verdict::flowed : Verdict::blocked, fwd_ok});

    auto rev = reverse_experiment(model, rules, cfg, seed);
    out.push_back({"reverse", rev, Verdict::blocked, rev.verdict == Verdict::blocked});

    auto [sus, res] = suspension_counterfactual(model, cfg, rules.freeze_rule(), seed);
    auto expect_sus = coupled ? Verdict::flowed : Verdict::blocked;
    out.push_back({"suspended", sus, expect_sus, sus.verdict == expect_sus});
    out.push_back({"restored", res, Verdict::blocked, res.verdict == Verdict::blocked});
    return out;
}

}  // namespace nrsim
