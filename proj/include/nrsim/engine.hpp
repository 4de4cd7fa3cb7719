#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dynamics.hpp"
#include "model.hpp"
#include "rng.hpp"
#include "ruleset.hpp"

namespace nrsim
{

class EngineError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! Hit rate (sum of positive currents) / s. Throws EngineError if s <= 0.
double hit_rate(CurrentVector const& currents, double s);

//! Bernoulli draw with probability 1 - exp(-rate * dt).
bool sample_hit(PhiloxStream& rng, double rate, double dt);

//! Pick a launch component with probability proportional to max(J_m, 0).
ComponentId choose_component(PhiloxStream& rng, CurrentVector const& currents);

enum class NormPolicy
{
    preserve_total,
    raw
};

std::string_view to_string(NormPolicy p);

struct EngineState
{
    int epoch = 0;
    double t = 0;
    EpochStatus statuses;
    StateVector state;
};

struct CollapseEvent
{
    double t_sc = 0;
    ComponentId chosen;
    double pre_hit_s = 0;
    CurrentVector pre_hit_currents;
    int epoch = 0;  // epoch in which the hit occurred
    NormPolicy policy = NormPolicy::preserve_total;
};

/*!
 * Reduce every component but `chosen` to zero and start a new epoch driven
 * by the chosen component's own Hamiltonian.
 *
 * With preserve_total the surviving amplitudes are rescaled so the total
 * square modulus is unchanged.
 */
EngineState apply_collapse(EngineState const& engine,
                           ComponentId chosen,
                           ScenarioModel const& model,
                           RuleSet const& rules,
                           NormPolicy policy = NormPolicy::preserve_total);

enum class Terminal
{
    t_max_reached,
    collapsed_quiescent
};

std::string_view to_string(Terminal t);

struct RecordSample
{
    double t = 0;
    int epoch = 0;
    double s = 0;
    std::vector<double> square_moduli;  // per component, model order
    std::vector<double> currents;       // per component, model order
};

struct TrajectoryRecord
{
    std::vector<RecordSample> samples;
    std::vector<CollapseEvent> events;
    Terminal terminal = Terminal::t_max_reached;
    double t_end = 0;
    StateVector final_state;
    //! Peak low->high flux and high->low flux over irreversible bridged gaps
    //! (only filled when flux tracking is on).
    double max_forward_flux = 0;
    double max_backflow = 0;
    //! Smallest launch current seen and how many steps had a negative one.
    double min_launch_current = 0;
    std::size_t negative_current_steps = 0;
};

struct RunConfig
{
    IntegratorConfig integrator;
    double t_max = 5.0;
    GapMode gap_mode = GapMode::one_way_feed;
    NormPolicy policy = NormPolicy::preserve_total;
    bool record_samples = true;
    bool track_flux = false;
    //! When false the trajectory never hits (deterministic current profile).
    bool sample_hits = true;
    //! Overrides the model's psi0 when set.
    std::optional<StateVector> initial_state;

    static RunConfig from_defaults(ScenarioModel const& model);
};

/*!
 * Run one trajectory: evolve, evaluate launch currents, maybe hit, maybe
 * collapse, until t_max or until a collapse leaves no launch components.
 *
 * Hits are sampled per step with probability 1 - exp(-H) where H is the
 * trapezoidal integral of the hit rate over the step; the hit time is the end
 * of the step. The random stream is (seed, stream).
 */
TrajectoryRecord run_trajectory(ScenarioModel const& model,
                                RuleSet const& rules,
                                RunConfig const& cfg,
                                std::uint64_t seed,
                                std::uint64_t stream = 0);

}  // namespace nrsim
