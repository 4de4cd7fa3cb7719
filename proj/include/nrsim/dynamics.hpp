#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "model.hpp"
#include "ruleset.hpp"
#include "sparse.hpp"

namespace nrsim
{

class NumericalError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class GeneratorError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

struct GeneratorProvenance
{
    RulesVariant ruleset = RulesVariant::nrules3;
    GapMode mode = GapMode::one_way_feed;
    std::set<RuleId> suspended;
    int epoch = 0;
};

/*!
 * Operator applied during one epoch: dpsi/dt = -i G psi.
 *
 * The linear part is a sparse matrix. In norm_compensated mode the action
 * adds a state-dependent loss on the source sectors that removes exactly the
 * square modulus flowing into the launch sectors.
 */
class EffectiveGenerator
{
  public:
    EffectiveGenerator() = default;
    EffectiveGenerator(CsrMatrix linear,
                       GeneratorProvenance provenance,
                       EpochStatus statuses,
                       std::vector<ComponentId> launch,
                       std::vector<std::size_t> launch_indices,
                       std::vector<std::size_t> source_indices,
                       bool compensated);

    std::size_t dim() const { return linear_.dim(); }
    CsrMatrix const& linear() const { return linear_; }
    GeneratorProvenance const& provenance() const { return provenance_; }
    EpochStatus const& statuses() const { return statuses_; }
    //! Launch/ready components of this epoch, sorted by id.
    std::vector<ComponentId> const& launch() const { return launch_; }
    bool compensated() const { return compensated_; }
    //! True when the evolution conserves s analytically.
    bool conserves_norm() const;

    //! out = G psi (including the compensation term when enabled).
    void apply(std::span<Complex const> psi, std::span<Complex> out) const;

  private:
    CsrMatrix linear_;
    GeneratorProvenance provenance_;
    EpochStatus statuses_;
    std::vector<ComponentId> launch_;
    std::vector<std::size_t> launch_indices_;
    std::vector<std::size_t> source_indices_;
    bool compensated_ = false;
};

/*!
 * Build the generator for one epoch.
 *
 * Driven components (active or realized) contribute their own blocks and
 * any reversible gaps between them. A gap is bridged when its low side is
 * driven and its high side is launch/ready. Bridged gaps contribute only the
 * high<-low feed in one_way_feed and norm_compensated modes, and the full
 * Hermitian coupling in hermitian_truncated mode. Suspending the freeze rule
 * (n3_1 or n4_4) is only allowed in hermitian_truncated mode and restores the
 * launch components' own blocks.
 */
EffectiveGenerator assemble_generator(ScenarioModel const& model,
                                      RuleSet const& rules,
                                      GapMode mode,
                                      EpochStatus const& statuses,
                                      int epoch = 0);

enum class IntegratorMethod
{
    rk4_fixed
};

struct IntegratorConfig
{
    IntegratorMethod method = IntegratorMethod::rk4_fixed;
    double dt = 1e-3;
    std::size_t sample_every = 1;
    //! Allowed |s(t) - s(t0)| per unit time when the generator conserves s.
    double norm_drift_budget = 1e-6;

    void check() const;
};

struct CurrentVector
{
    std::vector<ComponentId> ids;
    std::vector<double> values;

    std::size_t size() const { return ids.size(); }
    double positive_sum() const;
};

//! One classical RK4 step of dpsi/dt = -i G psi.
StateVector step(StateVector const& state, EffectiveGenerator const& gen, double dt);

//! RK4 step reusing a precomputed G psi for the first stage.
StateVector step_from(StateVector const& state,
                      std::span<Complex const> g_psi,
                      EffectiveGenerator const& gen,
                      double dt);

//! d|P_m psi|^2/dt for an arbitrary set of basis indices, given G psi.
double sector_current(StateVector const& state,
                      std::span<Complex const> g_psi,
                      std::vector<std::size_t> const& indices);

//! Analytic currents 2 Im <P_m psi | G psi> into each launch component.
CurrentVector component_currents(StateVector const& state,
                                 EffectiveGenerator const& gen,
                                 ScenarioModel const& model);

//! Same as component_currents with G psi already evaluated.
CurrentVector component_currents(StateVector const& state,
                                 std::span<Complex const> g_psi,
                                 EffectiveGenerator const& gen,
                                 ScenarioModel const& model);

//! Currents into every component, in model order.
std::vector<double> all_component_currents(StateVector const& state,
                                           std::span<Complex const> g_psi,
                                           ScenarioModel const& model);

/*!
 * Central-difference oracle for the launch-component currents: propagate
 * by +h and -h with RK4 and difference the sector square moduli.
 */
CurrentVector fd_current_check(StateVector const& state,
                               EffectiveGenerator const& gen,
                               ScenarioModel const& model,
                               double dt_probe = 1e-6);

//! Finite-difference currents for every component, in model order.
std::vector<double> fd_all_currents(StateVector const& state,
                                    EffectiveGenerator const& gen,
                                    ScenarioModel const& model,
                                    double dt_probe = 1e-6);

/*!
 * Probability flux across one gap split by direction: `forward` is the
 * contribution of the high<-low block to d|P_high psi|^2/dt, `backward` is
 * the contribution of the low<-high block to d|P_low psi|^2/dt.
 */
struct GapFlux
{
    double forward = 0;
    double backward = 0;
};

GapFlux gap_flux(StateVector const& state,
                 EffectiveGenerator const& gen,
                 ScenarioModel const& model,
                 Gap const& gap);

struct TrajectorySample
{
    double t = 0;
    StateVector state;
    CurrentVector currents;
};

struct Segment
{
    std::vector<TrajectorySample> samples;
    StateVector final_state;
};

/*!
 * Integrate from t0 to t1 with fixed steps. Samples are taken at t0, every
 * `sample_every` steps and at t1. If (t1 - t0) is not a whole number of
 * steps the last step is shortened.
 */
Segment evolve(StateVector const& state,
               EffectiveGenerator const& gen,
               ScenarioModel const& model,
               double t0,
               double t1,
               IntegratorConfig const& cfg);

//! Number of fixed steps covering [0, span] at step dt.
std::size_t step_count(double span, double dt);

}  // namespace nrsim
