#include "nrsim/io.hpp"

#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <openssl/evp.h>

namespace nrsim
{
using nlohmann::json;

namespace
{
std::string cid(ComponentId id)
{
    return fmt::format("C{}", id.value);
}

template<class V>
json by_component(std::map<ComponentId, V> const& m)
{
    json out = json::object();
    for (auto const& [id, v] : m)
        out[cid(id)] = v;
    return out;
}
}  // namespace

std::string format_real(double x)
{
    return fmt::format("{:.17g}", x);
}

std::vector<ComponentId> launchable_components(ScenarioModel const& model)
{
    std::vector<ComponentId> out;
    for (auto const& c : model.components)
    {
        for (auto const& g : model.gaps())
        {
            if (g.irreversible && g.high == c.id)
            {
                out.push_back(c.id);
                break;
            }
        }
    }
    return out;
}

void write_trajectory_csv(std::ostream& out,
                          ScenarioModel const& model,
                          std::vector<RecordSample> const& samples)
{
    auto launchable = launchable_components(model);
    out << "t,epoch,s";
    for (auto const& c : model.components)
        out << ",sq_" << cid(c.id);
    for (auto id : launchable)
        out << ",J_" << cid(id);
    out << '\n';
    for (auto const& smp : samples)
    {
        out << format_real(smp.t) << ',' << smp.epoch << ',' << format_real(smp.s);
        for (auto v : smp.square_moduli)
            out << ',' << format_real(v);
        for (auto id : launchable)
            out << ',' << format_real(smp.currents[*model.position(id)]);
        out << '\n';
    }
}

json event_json(std::size_t trajectory_id, CollapseEvent const& ev)
{
    json currents = json::object();
    for (std::size_t m = 0; m < ev.pre_hit_currents.size(); ++m)
        currents[cid(ev.pre_hit_currents.ids[m])] = ev.pre_hit_currents.values[m];
    return {{"trajectory_id", trajectory_id},
            {"epoch", ev.epoch},
            {"t_sc", ev.t_sc},
            {"chosen", cid(ev.chosen)},
            {"pre_hit_s", ev.pre_hit_s},
            {"J", currents},
            {"norm_policy", to_string(ev.policy)}};
}

void write_event_log(std::ostream& out,
                     std::vector<std::pair<std::size_t, CollapseEvent>> const& events)
{
    for (auto const& [id, ev] : events)
        out << event_json(id, ev).dump() << '\n';
}

json record_summary_json(TrajectoryRecord const& rec)
{
    return {{"schema", kReportSchema},
            {"kind", "trajectory"},
            {"terminal", to_string(rec.terminal)},
            {"t_end", rec.t_end},
            {"events", rec.events.size()},
            {"final_s", rec.final_state.square_modulus()},
            {"min_launch_current", rec.min_launch_current},
            {"negative_current_steps", rec.negative_current_steps}};
}

json arrow_report_json(ArrowReport const& rep)
{
    json suspended = json::array();
    for (auto r : rep.rules.suspended)
        suspended.push_back(to_string(r));
    return {{"direction", to_string(rep.direction)},
            {"verdict", to_string(rep.verdict)},
            {"max_backflow", rep.max_backflow},
            {"max_forward_flow", rep.max_forward_flow},
            {"integrated_launch_current", rep.integrated_launch_current},
            {"min_launch_current", rep.min_launch_current},
            {"max_state_change", rep.max_state_change},
            {"total_hits", rep.total_hits},
            {"rules", to_string(rep.rules.variant)},
            {"suspended", suspended},
            {"gap_mode", to_string(rep.gap_mode)}};
}

json arrow_checks_json(std::vector<ArrowCheck> const& checks)
{
    json arr = json::array();
    bool all_ok = true;
    for (auto const& c : checks)
    {
        arr.push_back({{"name", c.name},
                       {"expected", to_string(c.expected)},
                       {"ok", c.ok},
                       {"report", arrow_report_json(c.report)}});
        all_ok = all_ok && c.ok;
    }
    return {{"schema", kReportSchema}, {"kind", "arrow"}, {"all_ok", all_ok}, {"checks", arr}};
}

json ensemble_stats_json(EnsembleStats const& stats)
{
    return {{"schema", kReportSchema},
            {"kind", "ensemble"},
            {"n", stats.n},
            {"seed", stats.seed},
            {"gap_mode", to_string(stats.provenance.gap_mode)},
            {"dt", stats.provenance.dt},
            {"t_max", stats.provenance.t_max},
            {"counts", by_component(stats.counts)},
            {"shares", by_component(stats.shares)},
            {"no_collapse_fraction", stats.no_collapse_fraction},
            {"n_hits", stats.hit_times.size()}};
}

json oracle_json(OracleResult const& oracle)
{
    return {{"schema", kReportSchema},
            {"kind", "oracle"},
            {"grid_dt", oracle.grid_dt},
            {"integrals", by_component(oracle.integrals)},
            {"predicted_shares", by_component(oracle.predicted_shares)},
            {"survival_at_t_max", oracle.survival_pred.empty() ? 1.0 : oracle.survival_pred.back()}};
}

json comparison_json(ComparisonReport const& rep)
{
    return {{"schema", kReportSchema},
            {"kind", "comparison"},
            {"n_collapsed", rep.n_collapsed},
            {"empirical_shares", by_component(rep.empirical_shares)},
            {"predicted_shares", by_component(rep.predicted_shares)},
            {"z_scores", by_component(rep.z_scores)},
            {"ks_statistic", rep.ks_statistic},
            {"ks_critical", rep.ks_critical},
            {"shares_pass", rep.shares_pass},
            {"ks_pass", rep.ks_pass},
            {"pass", rep.pass()}};
}

json validation_json(ValidationReport const& rep)
{
    return {{"valid", rep.ok()}, {"errors", rep.errors}, {"warnings", rep.warnings}};
}

void write_histogram_csv(std::ostream& out, Histogram const& hist)
{
    out << "bin_lo,bin_hi,count\n";
    double const w = hist.bin_width();
    for (std::size_t b = 0; b < hist.counts.size(); ++b)
    {
        out << format_real(hist.lo + w * static_cast<double>(b)) << ','
            << format_real(hist.lo + w * static_cast<double>(b + 1)) << ',' << hist.counts[b]
            << '\n';
    }
}

void write_survival_csv(std::ostream& out, EnsembleStats const& stats, OracleResult const& oracle)
{
    out << "t,survival_empirical,survival_predicted\n";
    for (std::size_t i = 0; i < stats.survival_t.size(); ++i)
    {
        double t = stats.survival_t[i];
        out << format_real(t) << ',' << format_real(stats.survival[i]) << ','
            << format_real(oracle.survival_at(t)) << '\n';
    }
}

std::string sha256_hex(std::string_view bytes)
{
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1
        || EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1
        || EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
    {
        throw std::runtime_error("sha256 failed");
    }
    std::string hex;
    for (unsigned int i = 0; i < len; ++i)
        hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

json RunManifest::to_json() const
{
    json sus = json::array();
    for (auto r : suspended)
        sus.push_back(to_string(r));
    return {{"schema", kManifestSchema},
            {"command", command},
            {"scenario", {{"path", scenario_path}, {"sha256", scenario_sha256}}},
            {"rules", to_string(rules)},
            {"gap_mode", to_string(gap_mode)},
            {"suspended", sus},
            {"norm_policy", to_string(policy)},
            {"dt", dt},
            {"t_max", t_max},
            {"seed", seed},
            {"n", n},
            {"sample_every", sample_every},
            {"direction", direction},
            {"tool_version", tool_version},
            {"outputs", outputs}};
}

RunManifest RunManifest::from_json(json const& j)
{
    if (j.value("schema", "") != kManifestSchema)
        throw std::runtime_error("not an nrsim manifest");
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.scenario_path = j.at("scenario").at("path").get<std::string>();
    m.scenario_sha256 = j.at("scenario").at("sha256").get<std::string>();
    auto rules = parse_rules_variant(j.at("rules").get<std::string>());
    auto mode = parse_gap_mode(j.at("gap_mode").get<std::string>());
    if (!rules || !mode)
        throw std::runtime_error("manifest has unknown rules or gap mode");
    m.rules = *rules;
    m.gap_mode = *mode;
    for (auto const& s : j.at("suspended"))
    {
        auto r = parse_rule_id(s.get<std::string>());
        if (!r)
            throw std::runtime_error("manifest has unknown suspended rule");
        m.suspended.push_back(*r);
    }
    m.policy = j.at("norm_policy").get<std::string>() == "raw" ? NormPolicy::raw
                                                               : NormPolicy::preserve_total;
    m.dt = j.at("dt").get<double>();
    m.t_max = j.at("t_max").get<double>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.n = j.at("n").get<std::size_t>();
    m.sample_every = j.value("sample_every", std::size_t{1});
    m.direction = j.value("direction", "all");
    m.tool_version = j.at("tool_version").get<std::string>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    return m;
}

void write_file(std::filesystem::path const& path, std::string const& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

std::string read_file(std::filesystem::path const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace nrsim
