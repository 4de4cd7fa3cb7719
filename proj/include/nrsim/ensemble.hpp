#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "engine.hpp"

namespace nrsim
{

class EnsembleError : public std::runtime_error
{
  public:
    EnsembleError(std::size_t index, std::string const& what);
    std::size_t trajectory() const { return index_; }

  private:
    std::size_t index_;
};

//! Identifies what an ensemble or oracle was computed from.
struct Provenance
{
    std::uint64_t model_fingerprint = 0;
    GapMode gap_mode = GapMode::one_way_feed;
    double dt = 0;
    double t_max = 0;

    bool operator==(Provenance const&) const = default;
};

Provenance make_provenance(ScenarioModel const& model, RunConfig const& cfg);

struct Histogram
{
    double lo = 0;
    double hi = 0;
    std::vector<std::size_t> counts;

    double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
};

struct EnsembleStats
{
    std::size_t n = 0;
    std::uint64_t seed = 0;
    Provenance provenance;
    //! First-collapse counts and fractions per component.
    std::map<ComponentId, std::size_t> counts;
    std::map<ComponentId, double> shares;
    double no_collapse_fraction = 1.0;
    //! First-hit times, sorted ascending.
    std::vector<double> hit_times;
    Histogram hit_histogram;
    //! Empirical survival S(t) on `survival_t`.
    std::vector<double> survival_t;
    std::vector<double> survival;
    //! All events, ordered by trajectory index then time.
    std::vector<std::pair<std::size_t, CollapseEvent>> events;
};

struct EnsembleOptions
{
    std::size_t workers = 1;
    std::size_t histogram_bins = 50;
    std::size_t survival_points = 201;
    bool keep_events = true;
};

/*!
 * Run n trajectories; trajectory i uses random stream (master_seed, i).
 * Results are reduced in index order, so the output does not depend on the
 * worker count.
 */
EnsembleStats run_ensemble(ScenarioModel const& model,
                           RuleSet const& rules,
                           RunConfig const& cfg,
                           std::size_t n,
                           std::uint64_t master_seed,
                           EnsembleOptions const& opts = {});

struct OracleResult
{
    Provenance provenance;
    double grid_dt = 0;
    std::map<ComponentId, double> integrals;
    std::map<ComponentId, double> predicted_shares;
    std::vector<double> t;
    std::vector<double> survival_pred;

    //! Linear interpolation of survival_pred.
    double survival_at(double time) const;
};

/*!
 * Evolve without hits on a grid `refine` times finer than cfg.dt and
 * integrate the positive launch currents and the hit rate with the
 * trapezoidal rule.
 */
OracleResult deterministic_oracle(ScenarioModel const& model,
                                  RunConfig const& cfg,
                                  std::size_t refine = 10);

struct CompareThresholds
{
    double z_max = 3.0;
    //! KS critical value is ks_coefficient / sqrt(n_hits).
    double ks_coefficient = 1.63;
};

struct ComparisonReport
{
    std::size_t n_collapsed = 0;
    std::map<ComponentId, double> empirical_shares;  // conditioned on collapse
    std::map<ComponentId, double> predicted_shares;
    std::map<ComponentId, double> z_scores;
    double ks_statistic = 0;
    double ks_critical = 0;
    bool shares_pass = true;
    bool ks_pass = true;

    bool pass() const { return shares_pass && ks_pass; }
};

class ProvenanceError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

ComparisonReport compare(EnsembleStats const& stats,
                         OracleResult const& oracle,
                         CompareThresholds const& thresholds = {});

//! KS statistic of sorted samples against a continuous CDF.
template<class Cdf>
double ks_statistic(std::vector<double> const& sorted, Cdf&& cdf);

//! FNV-1a over the serialized scenario.
std::uint64_t model_fingerprint(ScenarioModel const& model);

//! Fill the derived fields (shares, histogram, survival) from counts and
//! hit times.
void finalize_stats(EnsembleStats& stats, double t_max, EnsembleOptions const& opts);

template<class Cdf>
double ks_statistic(std::vector<double> const& sorted, Cdf&& cdf)
{
    double const n = static_cast<double>(sorted.size());
    double d = 0;
    std::size_t i = 0;
    while (i < sorted.size())
    {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i])
            ++j;
        double f = cdf(sorted[i]);
        double before = static_cast<double>(i) / n;
        double after = static_cast<double>(j) / n;
        d = std::max({d, std::abs(f - before), std::abs(after - f)});
        i = j;
    }
    return d;
}

}  // namespace nrsim
