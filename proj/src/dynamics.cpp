#include "nrsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include <fmt/format.h>

namespace nrsim
{
namespace
{
constexpr Complex kMinusI{0.0, -1.0};

// The high<-low feed of a gap. Entries stored in the low<-high direction
// contribute their conjugate transpose when the forward entry is absent.
std::vector<Triplet> gap_feed(Gap const& gap, std::vector<int> const& owner, ScenarioModel const& model)
{
    auto low = static_cast<int>(*model.position(gap.low));
    auto high = static_cast<int>(*model.position(gap.high));
    std::map<std::pair<std::size_t, std::size_t>, Complex> feed;
    for (auto const& e : gap.interaction.entries)
    {
        if (owner[e.row] == high && owner[e.col] == low)
            feed[{e.row, e.col}] = e.value;
    }
    for (auto const& e : gap.interaction.entries)
    {
        if (owner[e.row] == low && owner[e.col] == high)
            feed.try_emplace({e.col, e.row}, std::conj(e.value));
    }
    std::vector<Triplet> out;
    for (auto const& [rc, v] : feed)
        out.push_back({rc.first, rc.second, v});
    return out;
}

void append_block(std::vector<Triplet>& dst, OperatorBlock const& block)
{
    dst.insert(dst.end(), block.entries.begin(), block.entries.end());
}

void append_hermitian(std::vector<Triplet>& dst, std::vector<Triplet> const& feed)
{
    for (auto const& t : feed)
    {
        dst.push_back(t);
        dst.push_back({t.col, t.row, std::conj(t.value)});
    }
}

bool is_driven(Status s)
{
    return s == Status::active || s == Status::realized;
}

void check_finite(StateVector const& s)
{
    for (std::size_t i = 0; i < s.dim(); ++i)
    {
        if (!std::isfinite(s[i].real()) || !std::isfinite(s[i].imag()))
        {
            throw NumericalError(
                fmt::format("non-finite amplitude at basis index {}", i));
        }
    }
}

// RK4 without the dt > 0 precondition; the finite-difference oracle steps
// backwards.
StateVector rk4(StateVector const& state,
                std::span<Complex const> g_psi,
                EffectiveGenerator const& gen,
                double dt)
{
    auto const n = state.dim();
    auto const& psi = state.amplitudes();
    std::vector<Complex> k1(n), k2(n), k3(n), k4(n), tmp(n), g(n);
    for (std::size_t i = 0; i < n; ++i)
        k1[i] = kMinusI * g_psi[i];

    for (std::size_t i = 0; i < n; ++i)
        tmp[i] = psi[i] + (0.5 * dt) * k1[i];
    gen.apply(tmp, g);
    for (std::size_t i = 0; i < n; ++i)
        k2[i] = kMinusI * g[i];

    for (std::size_t i = 0; i < n; ++i)
        tmp[i] = psi[i] + (0.5 * dt) * k2[i];
    gen.apply(tmp, g);
    for (std::size_t i = 0; i < n; ++i)
        k3[i] = kMinusI * g[i];

    for (std::size_t i = 0; i < n; ++i)
        tmp[i] = psi[i] + dt * k3[i];
    gen.apply(tmp, g);
    for (std::size_t i = 0; i < n; ++i)
        k4[i] = kMinusI * g[i];

    StateVector out(n);
    double const w = dt / 6.0;
    for (std::size_t i = 0; i < n; ++i)
        out[i] = psi[i] + w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    check_finite(out);
    return out;
}

std::vector<Complex> apply(EffectiveGenerator const& gen, StateVector const& state)
{
    std::vector<Complex> g(state.dim());
    gen.apply(state.amplitudes(), g);
    return g;
}
}  // namespace

EffectiveGenerator::EffectiveGenerator(CsrMatrix linear,
                                       GeneratorProvenance provenance,
                                       EpochStatus statuses,
                                       std::vector<ComponentId> launch,
                                       std::vector<std::size_t> launch_indices,
                                       std::vector<std::size_t> source_indices,
                                       bool compensated)
    : linear_(std::move(linear))
    , provenance_(std::move(provenance))
    , statuses_(std::move(statuses))
    , launch_(std::move(launch))
    , launch_indices_(std::move(launch_indices))
    , source_indices_(std::move(source_indices))
    , compensated_(compensated)
{
}

bool EffectiveGenerator::conserves_norm() const
{
    return compensated_ || provenance_.mode == GapMode::hermitian_truncated;
}

void EffectiveGenerator::apply(std::span<Complex const> psi, std::span<Complex> out) const
{
    linear_.apply(psi, out);
    if (!compensated_)
        return;
    double feed = 0;
    for (auto i : launch_indices_)
        feed += 2.0 * (std::conj(psi[i]) * out[i]).imag();
    double source = 0;
    for (auto i : source_indices_)
        source += std::norm(psi[i]);
    if (source == 0)
        return;
    Complex const loss{0.0, -feed / (2.0 * source)};
    for (auto i : source_indices_)
        out[i] += loss * psi[i];
}

EffectiveGenerator assemble_generator(ScenarioModel const& model,
                                      RuleSet const& rules,
                                      GapMode mode,
                                      EpochStatus const& statuses,
                                      int epoch)
{
    rules.check();
    if (statuses.size() != model.components.size())
    {
        throw GeneratorError(fmt::format("expected {} component statuses, got {}",
                                         model.components.size(), statuses.size()));
    }
    auto const pending = rules.pending_status();
    std::size_t n_active = 0;
    std::size_t n_realized = 0;
    for (std::size_t c = 0; c < statuses.size(); ++c)
    {
        auto s = statuses[c];
        n_active += s == Status::active;
        n_realized += s == Status::realized;
        if (is_launch_like(s) && s != pending)
        {
            throw GeneratorError(fmt::format(
                "component C{} has status {} which {} does not use",
                model.components[c].id.value, to_string(s), to_string(rules.variant)));
        }
    }
    if (n_realized > 1 || (n_realized == 1 && n_active > 0))
    {
        throw GeneratorError(
            "unknown component status combination: at most one realized component"
            " and no active components after a collapse");
    }
    bool const thaw = rules.freeze_suspended();
    if (thaw && mode != GapMode::hermitian_truncated)
    {
        throw GeneratorError(fmt::format(
            "suspending {} requires hermitian gap mode", to_string(rules.freeze_rule())));
    }

    auto owner = model.owner_table();
    std::vector<Triplet> triplets;
    std::vector<ComponentId> launch;
    std::vector<std::size_t> launch_indices;
    std::vector<std::size_t> source_indices;

    for (std::size_t c = 0; c < statuses.size(); ++c)
    {
        auto const& comp = model.components[c];
        bool include_own = is_driven(statuses[c]) || (thaw && is_launch_like(statuses[c]));
        if (include_own)
        {
            if (auto it = model.hamiltonian.own.find(comp.id); it != model.hamiltonian.own.end())
                append_block(triplets, it->second);
        }
        if (is_launch_like(statuses[c]))
        {
            launch.push_back(comp.id);
            launch_indices.insert(launch_indices.end(), comp.basis_indices.begin(),
                                  comp.basis_indices.end());
        }
    }

    std::vector<bool> is_source(model.components.size(), false);
    for (auto const& gap : model.gaps())
    {
        auto low = *model.position(gap.low);
        auto high = *model.position(gap.high);
        if (!gap.irreversible)
        {
            if (is_driven(statuses[low]) && is_driven(statuses[high]))
                append_hermitian(triplets, gap_feed(gap, owner, model));
            continue;
        }
        if (!is_driven(statuses[low]) || !is_launch_like(statuses[high]))
            continue;
        auto feed = gap_feed(gap, owner, model);
        if (mode == GapMode::hermitian_truncated)
            append_hermitian(triplets, feed);
        else
            triplets.insert(triplets.end(), feed.begin(), feed.end());
        is_source[low] = true;
    }
    for (std::size_t c = 0; c < is_source.size(); ++c)
    {
        if (is_source[c])
        {
            auto const& idx = model.components[c].basis_indices;
            source_indices.insert(source_indices.end(), idx.begin(), idx.end());
        }
    }
    std::sort(launch.begin(), launch.end());

    GeneratorProvenance prov{rules.variant, mode, rules.suspended, epoch};
    return EffectiveGenerator(CsrMatrix(model.dim, std::move(triplets)),
                              std::move(prov),
                              statuses,
                              std::move(launch),
                              std::move(launch_indices),
                              std::move(source_indices),
                              mode == GapMode::norm_compensated);
}

void IntegratorConfig::check() const
{
    if (!(dt > 0) || !std::isfinite(dt))
        throw std::invalid_argument("integrator dt must be positive");
    if (sample_every < 1)
        throw std::invalid_argument("sample_every must be at least 1");
}

double CurrentVector::positive_sum() const
{
    double sum = 0;
    for (auto v : values)
        sum += std::max(v, 0.0);
    return sum;
}

StateVector step(StateVector const& state, EffectiveGenerator const& gen, double dt)
{
    if (!(dt > 0))
        throw std::invalid_argument("step requires dt > 0");
    check_finite(state);
    auto g = apply(gen, state);
    return rk4(state, g, gen, dt);
}

StateVector step_from(StateVector const& state,
                      std::span<Complex const> g_psi,
                      EffectiveGenerator const& gen,
                      double dt)
{
    if (!(dt > 0))
        throw std::invalid_argument("step requires dt > 0");
    return rk4(state, g_psi, gen, dt);
}

double sector_current(StateVector const& state,
                      std::span<Complex const> g_psi,
                      std::vector<std::size_t> const& indices)
{
    double j = 0;
    for (auto i : indices)
        j += (std::conj(state[i]) * g_psi[i]).imag();
    return 2.0 * j;
}

CurrentVector component_currents(StateVector const& state,
                                 std::span<Complex const> g_psi,
                                 EffectiveGenerator const& gen,
                                 ScenarioModel const& model)
{
    CurrentVector out;
    out.ids = gen.launch();
    out.values.reserve(out.ids.size());
    for (auto id : out.ids)
        out.values.push_back(sector_current(state, g_psi, model.component(id).basis_indices));
    return out;
}

CurrentVector component_currents(StateVector const& state,
                                 EffectiveGenerator const& gen,
                                 ScenarioModel const& model)
{
    auto g = apply(gen, state);
    return component_currents(state, g, gen, model);
}

std::vector<double> all_component_currents(StateVector const& state,
                                           std::span<Complex const> g_psi,
                                           ScenarioModel const& model)
{
    std::vector<double> out;
    out.reserve(model.components.size());
    for (auto const& c : model.components)
        out.push_back(sector_current(state, g_psi, c.basis_indices));
    return out;
}

std::vector<double> fd_all_currents(StateVector const& state,
                                    EffectiveGenerator const& gen,
                                    ScenarioModel const& model,
                                    double dt_probe)
{
    auto g = apply(gen, state);
    auto plus = rk4(state, g, gen, dt_probe);
    auto minus = rk4(state, g, gen, -dt_probe);
    std::vector<double> out;
    for (auto const& c : model.components)
    {
        out.push_back((component_square_modulus(plus, c) - component_square_modulus(minus, c))
                      / (2.0 * dt_probe));
    }
    return out;
}

CurrentVector fd_current_check(StateVector const& state,
                               EffectiveGenerator const& gen,
                               ScenarioModel const& model,
                               double dt_probe)
{
    auto all = fd_all_currents(state, gen, model, dt_probe);
    CurrentVector out;
    out.ids = gen.launch();
    for (auto id : out.ids)
        out.values.push_back(all[*model.position(id)]);
    return out;
}

GapFlux gap_flux(StateVector const& state,
                 EffectiveGenerator const& gen,
                 ScenarioModel const& model,
                 Gap const& gap)
{
    auto const& low = model.component(gap.low).basis_indices;
    auto const& high = model.component(gap.high).basis_indices;
    auto const& m = gen.linear();
    auto block_flux = [&](std::vector<std::size_t> const& rows,
                          std::vector<std::size_t> const& cols) {
        double j = 0;
        for (auto r : rows)
        {
            Complex acc{};
            auto rc = m.row_cols(r);
            auto rv = m.row_values(r);
            for (std::size_t k = 0; k < rc.size(); ++k)
            {
                if (std::binary_search(cols.begin(), cols.end(), rc[k]))
                    acc += rv[k] * state[rc[k]];
            }
            j += (std::conj(state[r]) * acc).imag();
        }
        return 2.0 * j;
    };
    return {block_flux(high, low), block_flux(low, high)};
}

std::size_t step_count(double span, double dt)
{
    if (span <= 0)
        return 0;
    double ratio = span / dt;
    auto n = static_cast<std::size_t>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio))
        n = static_cast<std::size_t>(std::ceil(ratio));
    return std::max<std::size_t>(n, 1);
}

Segment evolve(StateVector const& state,
               EffectiveGenerator const& gen,
               ScenarioModel const& model,
               double t0,
               double t1,
               IntegratorConfig const& cfg)
{
    cfg.check();
    if (t1 < t0)
        throw std::invalid_argument("evolve requires t1 >= t0");
    check_finite(state);

    Segment seg;
    auto const n = step_count(t1 - t0, cfg.dt);
    StateVector psi = state;
    auto g = apply(gen, psi);
    double const s0 = psi.square_modulus();
    seg.samples.push_back({t0, psi, component_currents(psi, g, gen, model)});

    for (std::size_t k = 0; k < n; ++k)
    {
        double const tk = t0 + static_cast<double>(k) * cfg.dt;
        double const t_next = (k + 1 == n) ? t1 : t0 + static_cast<double>(k + 1) * cfg.dt;
        psi = rk4(psi, g, gen, t_next - tk);
        gen.apply(psi.amplitudes(), g);
        if (gen.conserves_norm())
        {
            double drift = std::abs(psi.square_modulus() - s0);
            if (drift > cfg.norm_drift_budget * (t_next - t0) + 1e-14)
            {
                throw NumericalError(fmt::format(
                    "norm drift {:.3e} at t={} exceeds budget {:.3e} per unit time",
                    drift, t_next, cfg.norm_drift_budget));
            }
        }
        if ((k + 1) % cfg.sample_every == 0 || k + 1 == n)
            seg.samples.push_back({t_next, psi, component_currents(psi, g, gen, model)});
    }
    seg.final_state = std::move(psi);
    return seg;
}

}  // namespace nrsim
