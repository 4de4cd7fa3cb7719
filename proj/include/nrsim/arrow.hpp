#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "engine.hpp"

namespace nrsim
{

enum class Direction
{
    forward,
    reverse
};

enum class Verdict
{
    blocked,
    flowed
};

std::string_view to_string(Direction d);
std::string_view to_string(Verdict v);

struct ArrowReport
{
    Direction direction = Direction::forward;
    //! Peak high->low flux across any irreversible gap (1/time).
    double max_backflow = 0;
    //! Peak low->high flux across any irreversible gap (1/time).
    double max_forward_flow = 0;
    //! Sum over launch components of the integral of J_m over [0, t_max]
    //! along the deterministic, hit-free profile.
    double integrated_launch_current = 0;
    //! Smallest launch current on the deterministic profile.
    double min_launch_current = 0;
    //! Largest |psi(t) - psi(0)| entry on the deterministic profile.
    double max_state_change = 0;
    std::size_t total_hits = 0;
    RuleSet rules;
    GapMode gap_mode = GapMode::one_way_feed;
    Verdict verdict = Verdict::blocked;
};

/*!
 * Initial state for the reverse experiment: the square modulus of psi0 spread
 * evenly over the basis states of the epoch-0 launch components.
 */
StateVector reverse_state(ScenarioModel const& model, RuleSet const& rules);

/*!
 * Start from psi0 in the low-entropy components. Records the deterministic
 * current profile and a sampled trajectory. Verdict is flowed iff any
 * low->high flux or hit occurred.
 */
ArrowReport forward_experiment(ScenarioModel const& model,
                               RuleSet const& rules,
                               RunConfig const& cfg,
                               std::uint64_t seed);

/*!
 * Start entirely in the launch components. Verdict is blocked iff the peak
 * backflow is exactly zero and no hit fired.
 */
ArrowReport reverse_experiment(ScenarioModel const& model,
                               RuleSet const& rules,
                               RunConfig const& cfg,
                               std::uint64_t seed);

/*!
 * Reverse experiment with `rule` (n3_1 or n4_4) suspended under hermitian
 * gap mode, then again with the rule restored under one-way feed.
 * Returns (suspended, restored).
 */
std::pair<ArrowReport, ArrowReport> suspension_counterfactual(ScenarioModel const& model,
                                                              RunConfig const& cfg,
                                                              RuleId rule,
                                                              std::uint64_t seed);

struct ArrowCheck
{
    std::string name;
    ArrowReport report;
    Verdict expected = Verdict::blocked;
    bool ok = false;
};

//! True when some irreversible gap leaving an active component has a
//! nonzero coupling entry.
bool has_active_coupling(ScenarioModel const& model);

/*!
 * The full battery: forward, reverse and the counterfactual pair for the
 * variant's freeze rule, each with its expected verdict. The forward run
 * additionally requires zero backflow unless it runs in hermitian mode.
 */
std::vector<ArrowCheck> arrow_checks(ScenarioModel const& model,
                                     RuleSet const& rules,
                                     RunConfig const& cfg,
                                     std::uint64_t seed);

}  // namespace nrsim
