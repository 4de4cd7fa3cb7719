#include "nrsim/ruleset.hpp"

#include <fmt/format.h>

namespace nrsim
{

std::string_view to_string(RuleId r)
{
    switch (r)
    {
        case RuleId::n3_1: return "n3_1";
        case RuleId::n3_2: return "n3_2";
        case RuleId::n3_3: return "n3_3";
        case RuleId::n4_4: return "n4_4";
    }
    return "?";
}

std::optional<RuleId> parse_rule_id(std::string_view text)
{
    for (auto r : {RuleId::n3_1, RuleId::n3_2, RuleId::n3_3, RuleId::n4_4})
    {
        if (to_string(r) == text)
            return r;
    }
    return std::nullopt;
}

void RuleSet::check() const
{
    for (auto r : suspended)
    {
        bool belongs = variant == RulesVariant::nrules3 ? r != RuleId::n4_4
                                                        : r == RuleId::n4_4;
        if (!belongs)
        {
            throw RuleError(fmt::format("rule {} does not belong to {}",
                                        to_string(r), to_string(variant)));
        }
    }
}

namespace
{
EpochStatus statuses_for_sources(ScenarioModel const& model,
                                 RuleSet const& rules,
                                 std::vector<ComponentId> const& sources,
                                 Status source_status)
{
    EpochStatus out(model.components.size(), Status::zeroed);
    for (auto id : sources)
        out[*model.position(id)] = source_status;
    for (auto const& gap : model.gaps())
    {
        if (!gap.irreversible)
            continue;
        auto low = *model.position(gap.low);
        auto high = *model.position(gap.high);
        if (out[low] == source_status)
            out[high] = rules.pending_status();
    }
    return out;
}
}  // namespace

EpochStatus initial_statuses(ScenarioModel const& model, RuleSet const& rules)
{
    std::vector<ComponentId> active;
    for (auto const& c : model.components)
    {
        if (c.status == Status::active)
            active.push_back(c.id);
    }
    return statuses_for_sources(model, rules, active, Status::active);
}

EpochStatus
statuses_after_collapse(ScenarioModel const& model, RuleSet const& rules, ComponentId chosen)
{
    if (!model.position(chosen))
        throw RuleError(fmt::format("unknown component C{}", chosen.value));
    return statuses_for_sources(model, rules, {chosen}, Status::realized);
}

}  // namespace nrsim
