#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "model.hpp"

namespace nrsim
{

//! Identifiers of rules that an experiment may suspend.
enum class RuleId
{
    n3_1,  // high-entropy side not driven by its own Hamiltonian
    n3_2,  // stochastic trigger with rate (sum of positive J) / s
    n3_3,  // collapse onto the chosen launch component
    n4_4   // ready components neither evolve nor source current
};

std::string_view to_string(RuleId r);
std::optional<RuleId> parse_rule_id(std::string_view text);

class RuleError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

struct RuleSet
{
    RulesVariant variant = RulesVariant::nrules3;
    std::set<RuleId> suspended;

    //! Throws RuleError if a suspended rule does not belong to the variant.
    void check() const;

    bool is_suspended(RuleId r) const { return suspended.count(r) != 0; }

    //! The rule that keeps the high-entropy side frozen before a hit.
    RuleId freeze_rule() const
    {
        return variant == RulesVariant::nrules3 ? RuleId::n3_1 : RuleId::n4_4;
    }
    bool freeze_suspended() const { return this->is_suspended(this->freeze_rule()); }
    bool trigger_enabled() const { return !this->is_suspended(RuleId::n3_2); }
    bool collapse_enabled() const { return !this->is_suspended(RuleId::n3_3); }

    //! Status label for the high side of a bridged gap.
    Status pending_status() const
    {
        return variant == RulesVariant::nrules3 ? Status::launch : Status::ready;
    }
};

//! Per-component statuses for one epoch, aligned with ScenarioModel::components.
using EpochStatus = std::vector<Status>;

//! Statuses at epoch 0: declared active components stay active, high sides
//! of gaps leaving them become launch (nrules3) or ready (nrules4), every
//! other component is zeroed.
EpochStatus initial_statuses(ScenarioModel const& model, RuleSet const& rules);

//! Statuses after a collapse onto `chosen`.
EpochStatus
statuses_after_collapse(ScenarioModel const& model, RuleSet const& rules, ComponentId chosen);

}  // namespace nrsim
