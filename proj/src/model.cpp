#include "nrsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include <fmt/format.h>

namespace nrsim
{
namespace
{
std::string id_str(ComponentId id)
{
    return fmt::format("C{}", id.value);
}

// Checks shared by own and interaction blocks: bounds and duplicate entries.
void check_block_shape(OperatorBlock const& block,
                       std::size_t dim,
                       std::string const& where,
                       ValidationReport& report)
{
    if (block.dim != dim)
    {
        report.errors.push_back(fmt::format(
            "{}: block dim {} does not match model dim {}", where, block.dim, dim));
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (auto const& e : block.entries)
    {
        if (e.row >= dim || e.col >= dim)
        {
            report.errors.push_back(fmt::format(
                "{}: entry ({}, {}) out of range", where, e.row, e.col));
        }
        if (!seen.emplace(e.row, e.col).second)
        {
            report.errors.push_back(fmt::format(
                "{}: duplicate entry ({}, {})", where, e.row, e.col));
        }
        if (!std::isfinite(e.value.real()) || !std::isfinite(e.value.imag()))
        {
            report.errors.push_back(fmt::format(
                "{}: non-finite entry ({}, {})", where, e.row, e.col));
        }
    }
}
}  // namespace

std::string_view to_string(Status s)
{
    switch (s)
    {
        case Status::active: return "active";
        case Status::launch: return "launch";
        case Status::ready: return "ready";
        case Status::realized: return "realized";
        case Status::zeroed: return "zeroed";
    }
    return "?";
}

std::optional<Status> parse_status(std::string_view text)
{
    for (auto s : {Status::active,
                   Status::launch,
                   Status::ready,
                   Status::realized,
                   Status::zeroed})
    {
        if (to_string(s) == text)
            return s;
    }
    return std::nullopt;
}

std::string_view to_string(RulesVariant v)
{
    return v == RulesVariant::nrules3 ? "nrules3" : "nrules4";
}

std::string_view to_string(GapMode m)
{
    switch (m)
    {
        case GapMode::one_way_feed: return "oneway";
        case GapMode::norm_compensated: return "compensated";
        case GapMode::hermitian_truncated: return "hermitian";
    }
    return "?";
}

std::optional<RulesVariant> parse_rules_variant(std::string_view text)
{
    if (text == "nrules3")
        return RulesVariant::nrules3;
    if (text == "nrules4")
        return RulesVariant::nrules4;
    return std::nullopt;
}

std::optional<GapMode> parse_gap_mode(std::string_view text)
{
    if (text == "oneway" || text == "one_way_feed")
        return GapMode::one_way_feed;
    if (text == "compensated" || text == "norm_compensated")
        return GapMode::norm_compensated;
    if (text == "hermitian" || text == "hermitian_truncated")
        return GapMode::hermitian_truncated;
    return std::nullopt;
}

std::optional<Complex> OperatorBlock::find(std::size_t row, std::size_t col) const
{
    for (auto const& e : entries)
    {
        if (e.row == row && e.col == col)
            return e.value;
    }
    return std::nullopt;
}

bool OperatorBlock::is_hermitian(double tol) const
{
    for (auto const& e : entries)
    {
        auto mirror = this->find(e.col, e.row);
        Complex expected = std::conj(e.value);
        Complex actual = mirror.value_or(Complex{});
        if (std::abs(actual - expected) > tol)
            return false;
    }
    return true;
}

double StateVector::square_modulus() const
{
    double s = 0;
    for (auto const& a : amplitudes_)
        s += std::norm(a);
    return s;
}

std::optional<std::size_t> ScenarioModel::position(ComponentId id) const
{
    for (std::size_t i = 0; i < components.size(); ++i)
    {
        if (components[i].id == id)
            return i;
    }
    return std::nullopt;
}

Component const& ScenarioModel::component(ComponentId id) const
{
    auto pos = this->position(id);
    if (!pos)
        throw ScenarioError("unknown component " + id_str(id));
    return components[*pos];
}

std::vector<int> ScenarioModel::owner_table() const
{
    std::vector<int> owner(dim, -1);
    for (std::size_t c = 0; c < components.size(); ++c)
    {
        for (auto idx : components[c].basis_indices)
        {
            if (idx < dim)
                owner[idx] = static_cast<int>(c);
        }
    }
    return owner;
}

ValidationError::ValidationError(ValidationReport report)
    : ScenarioError([&] {
        std::string msg = "scenario failed validation:";
        for (auto const& e : report.errors)
            msg += "\n  " + e;
        return msg;
    }())
    , report_(std::move(report))
{
}

ValidationReport validate_model(ScenarioModel const& model)
{
    ValidationReport report;
    auto& err = report.errors;
    auto& warn = report.warnings;

    if (model.dim == 0)
        err.push_back("dim must be positive");

    // Components
    std::set<ComponentId> ids;
    std::vector<int> owner(model.dim, -1);
    for (std::size_t c = 0; c < model.components.size(); ++c)
    {
        auto const& comp = model.components[c];
        if (!ids.insert(comp.id).second)
            err.push_back("duplicate component id " + id_str(comp.id));
        if (comp.basis_indices.empty())
            err.push_back("component " + id_str(comp.id) + " has no basis indices");
        if (comp.status == Status::realized)
        {
            err.push_back("component " + id_str(comp.id)
                          + " cannot be declared realized");
        }
        for (auto idx : comp.basis_indices)
        {
            if (idx >= model.dim)
            {
                err.push_back(fmt::format("component {} index {} out of range",
                                          id_str(comp.id), idx));
                continue;
            }
            if (owner[idx] == static_cast<int>(c))
            {
                err.push_back(fmt::format("component {} repeats index {}",
                                          id_str(comp.id), idx));
            }
            else if (owner[idx] >= 0)
            {
                err.push_back(fmt::format(
                    "components overlap: {} and {} share index {}",
                    id_str(model.components[owner[idx]].id),
                    id_str(comp.id),
                    idx));
            }
            else
            {
                owner[idx] = static_cast<int>(c);
            }
        }
    }
    for (std::size_t i = 0; i < owner.size(); ++i)
    {
        if (owner[i] < 0)
            warn.push_back(fmt::format("basis index {} belongs to no component", i));
    }

    auto rank_of = [&](ComponentId id) -> std::optional<int> {
        auto pos = model.position(id);
        if (!pos)
            return std::nullopt;
        return model.components[*pos].entropy_rank;
    };
    auto owner_id = [&](std::size_t idx) -> std::optional<ComponentId> {
        if (idx >= owner.size() || owner[idx] < 0)
            return std::nullopt;
        return model.components[owner[idx]].id;
    };

    // Gaps
    std::set<std::pair<ComponentId, ComponentId>> gap_pairs;
    std::map<ComponentId, std::set<ComponentId>> feeders;
    std::set<ComponentId> irreversible_highs;
    for (std::size_t g = 0; g < model.gaps().size(); ++g)
    {
        auto const& gap = model.gaps()[g];
        std::string where = fmt::format("gap {} ({} -> {})",
                                        g, id_str(gap.low), id_str(gap.high));
        auto low_rank = rank_of(gap.low);
        auto high_rank = rank_of(gap.high);
        if (!low_rank || !high_rank)
        {
            err.push_back(where + ": references unknown component");
            continue;
        }
        if (gap.low == gap.high)
            err.push_back(where + ": connects a component to itself");
        if (!(*high_rank > *low_rank))
            err.push_back(where + ": gap not entropy-increasing");
        auto key = std::minmax(gap.low, gap.high);
        if (!gap_pairs.insert(key).second)
            err.push_back(where + ": duplicate gap for this component pair");

        check_block_shape(gap.interaction, model.dim, where, report);
        bool has_forward = false;
        bool has_backward = false;
        for (auto const& e : gap.interaction.entries)
        {
            auto r = owner_id(e.row);
            auto c = owner_id(e.col);
            bool forward = r == gap.high && c == gap.low;
            bool backward = r == gap.low && c == gap.high;
            if (!forward && !backward)
            {
                err.push_back(fmt::format(
                    "{}: entry ({}, {}) does not cross the gap", where, e.row, e.col));
            }
            has_forward = has_forward || forward;
            has_backward = has_backward || backward;
        }
        if (has_forward && has_backward && !gap.interaction.is_hermitian())
            err.push_back(where + ": interaction block stored in both directions but not Hermitian");

        auto const& low = model.component(gap.low);
        auto const& high = model.component(gap.high);
        if (gap.irreversible)
        {
            irreversible_highs.insert(gap.high);
            feeders[gap.high].insert(gap.low);
            if (!is_launch_like(high.status))
            {
                err.push_back(where + ": high side of an irreversible gap must be"
                                      " declared launch or ready");
            }
        }
        else if (low.status != Status::active || high.status != Status::active)
        {
            err.push_back(where + ": reversible gaps must join two active components");
        }
    }

    for (auto const& comp : model.components)
    {
        if (is_launch_like(comp.status) && !irreversible_highs.count(comp.id))
        {
            err.push_back("component " + id_str(comp.id)
                          + " is launch/ready but is not the high side of any gap");
        }
    }
    for (auto const& [high, lows] : feeders)
    {
        std::size_t active_feeders = 0;
        for (auto low : lows)
        {
            auto pos = model.position(low);
            if (pos && model.components[*pos].status == Status::active)
                ++active_feeders;
        }
        if (active_feeders > 1)
        {
            warn.push_back("launch component " + id_str(high)
                           + " is fed by several active components; currents are summed");
        }
    }

    // Own blocks
    for (auto const& [id, block] : model.hamiltonian.own)
    {
        std::string where = "own block of " + id_str(id);
        auto pos = model.position(id);
        if (!pos)
        {
            err.push_back(where + ": unknown component");
            continue;
        }
        check_block_shape(block, model.dim, where, report);
        for (auto const& e : block.entries)
        {
            if (owner_id(e.row) != id || owner_id(e.col) != id)
            {
                err.push_back(fmt::format("{}: entry ({}, {}) outside the component",
                                          where, e.row, e.col));
            }
        }
        if (!block.is_hermitian())
            err.push_back(where + ": own block not Hermitian");
    }

    // Initial state
    if (model.psi0.dim() != model.dim)
    {
        err.push_back(fmt::format("psi0 has length {}, expected {}",
                                  model.psi0.dim(), model.dim));
    }
    else
    {
        for (std::size_t i = 0; i < model.dim; ++i)
        {
            auto a = model.psi0[i];
            if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
            {
                err.push_back(fmt::format("psi0[{}] is not finite", i));
                continue;
            }
            if (a == Complex{})
                continue;
            auto o = owner_id(i);
            if (!o || model.component(*o).status != Status::active)
            {
                err.push_back(fmt::format(
                    "psi0 has amplitude on index {} outside the active components", i));
            }
        }
        if (model.psi0.square_modulus() == 0)
            warn.push_back("psi0 has zero square modulus");
    }

    if (!(model.defaults.dt > 0))
        err.push_back("defaults.dt must be positive");
    if (!(model.defaults.t_max > 0))
        err.push_back("defaults.t_max must be positive");

    return report;
}

StateVector
project(StateVector const& state, ComponentId comp, ScenarioModel const& model)
{
    auto const& c = model.component(comp);
    StateVector out(state.dim());
    for (auto idx : c.basis_indices)
        out[idx] = state[idx];
    return out;
}

double component_square_modulus(StateVector const& state, Component const& comp)
{
    double s = 0;
    for (auto idx : comp.basis_indices)
        s += std::norm(state[idx]);
    return s;
}

}  // namespace nrsim
