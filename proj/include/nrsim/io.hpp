#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "arrow.hpp"
#include "ensemble.hpp"

namespace nrsim
{

inline constexpr std::string_view kToolVersion = "nrsim 1.0.0";
inline constexpr std::string_view kManifestSchema = "nrsim.manifest/1";
inline constexpr std::string_view kReportSchema = "nrsim.report/1";

//! Decimal with 17 significant digits (round-trips any double).
std::string format_real(double x);

//! Components that are the high side of some irreversible gap.
std::vector<ComponentId> launchable_components(ScenarioModel const& model);

/*!
 * Trajectory CSV: t, epoch, s, sq_C<id> per component, J_C<id> per
 * launchable component.
 */
void write_trajectory_csv(std::ostream& out,
                          ScenarioModel const& model,
                          std::vector<RecordSample> const& samples);

//! One JSON object per line, in the given order.
void write_event_log(std::ostream& out,
                     std::vector<std::pair<std::size_t, CollapseEvent>> const& events);

nlohmann::json event_json(std::size_t trajectory_id, CollapseEvent const& ev);
nlohmann::json record_summary_json(TrajectoryRecord const& rec);
nlohmann::json arrow_report_json(ArrowReport const& rep);
nlohmann::json arrow_checks_json(std::vector<ArrowCheck> const& checks);
nlohmann::json ensemble_stats_json(EnsembleStats const& stats);
nlohmann::json oracle_json(OracleResult const& oracle);
nlohmann::json comparison_json(ComparisonReport const& rep);
nlohmann::json validation_json(ValidationReport const& rep);

void write_histogram_csv(std::ostream& out, Histogram const& hist);
//! t, empirical S(t), predicted S(t).
void write_survival_csv(std::ostream& out, EnsembleStats const& stats, OracleResult const& oracle);

std::string sha256_hex(std::string_view bytes);

struct RunManifest
{
    std::string command;
    std::string scenario_path;
    std::string scenario_sha256;
    RulesVariant rules = RulesVariant::nrules3;
    GapMode gap_mode = GapMode::one_way_feed;
    std::vector<RuleId> suspended;
    NormPolicy policy = NormPolicy::preserve_total;
    double dt = 0;
    double t_max = 0;
    std::uint64_t seed = 0;
    std::size_t n = 1;
    std::size_t sample_every = 1;
    std::string direction = "all";
    std::string tool_version{kToolVersion};
    std::vector<std::string> outputs;

    nlohmann::json to_json() const;
    static RunManifest from_json(nlohmann::json const& j);
};

//! Write text to a file, replacing it. Throws on I/O failure.
void write_file(std::filesystem::path const& path, std::string const& text);
std::string read_file(std::filesystem::path const& path);

}  // namespace nrsim
