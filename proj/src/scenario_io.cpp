#include "nrsim/scenario_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace nrsim
{
namespace
{
using nlohmann::json;

[[noreturn]] void field_error(std::string const& path, std::string const& what)
{
    throw ScenarioError(fmt::format("scenario field '{}': {}", path, what));
}

json const& require(json const& obj, char const* key, std::string const& path)
{
    if (!obj.is_object())
        field_error(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end())
        field_error(path + "." + key, "missing");
    return *it;
}

double as_double(json const& v, std::string const& path)
{
    if (!v.is_number())
        field_error(path, "expected a number");
    return v.get<double>();
}

std::size_t as_index(json const& v, std::string const& path)
{
    if (!v.is_number_integer() || v.get<long long>() < 0)
        field_error(path, "expected a non-negative integer");
    return v.get<std::size_t>();
}

int as_int(json const& v, std::string const& path)
{
    if (!v.is_number_integer())
        field_error(path, "expected an integer");
    return v.get<int>();
}

Complex as_complex(json const& v, std::string const& path)
{
    if (!v.is_array() || v.size() != 2)
        field_error(path, "expected [re, im]");
    return {as_double(v[0], path + "[0]"), as_double(v[1], path + "[1]")};
}

OperatorBlock parse_entries(json const& arr, std::size_t dim, std::string const& path)
{
    if (!arr.is_array())
        field_error(path, "expected an array of [row, col, re, im]");
    OperatorBlock block;
    block.dim = dim;
    for (std::size_t i = 0; i < arr.size(); ++i)
    {
        auto p = fmt::format("{}[{}]", path, i);
        auto const& e = arr[i];
        if (!e.is_array() || e.size() != 4)
            field_error(p, "expected [row, col, re, im]");
        block.entries.push_back({as_index(e[0], p + "[0]"),
                                 as_index(e[1], p + "[1]"),
                                 {as_double(e[2], p + "[2]"), as_double(e[3], p + "[3]")}});
    }
    return block;
}

json entries_json(OperatorBlock const& block)
{
    json arr = json::array();
    for (auto const& e : block.entries)
        arr.push_back({e.row, e.col, e.value.real(), e.value.imag()});
    return arr;
}

std::string location_of(std::string_view text, std::size_t byte)
{
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i)
    {
        if (text[i] == '\n')
        {
            ++line;
            col = 1;
        }
        else
        {
            ++col;
        }
    }
    return fmt::format("line {}, column {}", line, col);
}
}  // namespace

ScenarioModel parse_scenario(std::string_view text)
{
    json doc;
    try
    {
        doc = json::parse(text.begin(), text.end());
    }
    catch (json::parse_error const& e)
    {
        throw ScenarioError(fmt::format("scenario parse error at {}: {}",
                                        location_of(text, e.byte), e.what()));
    }
    if (!doc.is_object())
        field_error("$", "document must be an object");

    if (auto it = doc.find("schema"); it != doc.end())
    {
        if (!it->is_string() || it->get<std::string>() != kScenarioSchema)
            field_error("schema", fmt::format("expected \"{}\"", kScenarioSchema));
    }

    ScenarioModel model;
    model.dim = as_index(require(doc, "dim", "$"), "dim");

    auto const& comps = require(doc, "components", "$");
    if (!comps.is_array())
        field_error("components", "expected an array");
    for (std::size_t i = 0; i < comps.size(); ++i)
    {
        auto p = fmt::format("components[{}]", i);
        Component c;
        c.id.value = as_int(require(comps[i], "id", p), p + ".id");
        auto const& idx = require(comps[i], "indices", p);
        if (!idx.is_array())
            field_error(p + ".indices", "expected an array");
        for (std::size_t k = 0; k < idx.size(); ++k)
            c.basis_indices.push_back(as_index(idx[k], fmt::format("{}.indices[{}]", p, k)));
        std::sort(c.basis_indices.begin(), c.basis_indices.end());
        c.entropy_rank = as_int(require(comps[i], "entropy_rank", p), p + ".entropy_rank");
        auto const& st = require(comps[i], "status", p);
        auto status = st.is_string() ? parse_status(st.get<std::string>()) : std::nullopt;
        if (!status)
            field_error(p + ".status", "expected one of active, launch, ready, zeroed");
        c.status = *status;
        model.components.push_back(std::move(c));
    }

    if (auto it = doc.find("gaps"); it != doc.end())
    {
        if (!it->is_array())
            field_error("gaps", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i)
        {
            auto p = fmt::format("gaps[{}]", i);
            auto const& g = (*it)[i];
            Gap gap;
            gap.low.value = as_int(require(g, "low", p), p + ".low");
            gap.high.value = as_int(require(g, "high", p), p + ".high");
            auto const& irr = require(g, "irreversible", p);
            if (!irr.is_boolean())
                field_error(p + ".irreversible", "expected a boolean");
            gap.irreversible = irr.get<bool>();
            gap.interaction = parse_entries(require(g, "entries", p), model.dim, p + ".entries");
            model.hamiltonian.interactions.push_back(std::move(gap));
        }
    }

    if (auto it = doc.find("own"); it != doc.end())
    {
        if (!it->is_array())
            field_error("own", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i)
        {
            auto p = fmt::format("own[{}]", i);
            ComponentId id{as_int(require((*it)[i], "component", p), p + ".component")};
            auto block = parse_entries(require((*it)[i], "entries", p), model.dim, p + ".entries");
            if (!model.hamiltonian.own.emplace(id, std::move(block)).second)
                field_error(p + ".component", "duplicate own block");
        }
    }

    auto const& psi = require(doc, "psi0", "$");
    if (!psi.is_array())
        field_error("psi0", "expected an array of [re, im]");
    std::vector<Complex> amps;
    for (std::size_t i = 0; i < psi.size(); ++i)
        amps.push_back(as_complex(psi[i], fmt::format("psi0[{}]", i)));
    model.psi0 = StateVector(std::move(amps));

    if (auto it = doc.find("defaults"); it != doc.end())
    {
        auto const& d = *it;
        if (!d.is_object())
            field_error("defaults", "expected an object");
        if (d.contains("dt"))
            model.defaults.dt = as_double(d["dt"], "defaults.dt");
        if (d.contains("t_max"))
            model.defaults.t_max = as_double(d["t_max"], "defaults.t_max");
        if (d.contains("rules"))
        {
            auto v = d["rules"].is_string()
                         ? parse_rules_variant(d["rules"].get<std::string>())
                         : std::nullopt;
            if (!v)
                field_error("defaults.rules", "expected nrules3 or nrules4");
            model.defaults.rules = *v;
        }
        if (d.contains("gap_mode"))
        {
            auto v = d["gap_mode"].is_string()
                         ? parse_gap_mode(d["gap_mode"].get<std::string>())
                         : std::nullopt;
            if (!v)
                field_error("defaults.gap_mode", "expected oneway, compensated or hermitian");
            model.defaults.gap_mode = *v;
        }
        if (d.contains("seed"))
        {
            if (!d["seed"].is_number_unsigned())
                field_error("defaults.seed", "expected a non-negative integer");
            model.defaults.seed = d["seed"].get<std::uint64_t>();
        }
    }
    return model;
}

ScenarioModel load_scenario(std::string_view text)
{
    auto model = parse_scenario(text);
    auto report = validate_model(model);
    if (!report.ok())
        throw ValidationError(std::move(report));
    return model;
}

ScenarioModel load_scenario_file(std::filesystem::path const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open scenario file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_scenario(ss.str());
}

std::string serialize_scenario(ScenarioModel const& model)
{
    json doc;
    doc["schema"] = kScenarioSchema;
    doc["dim"] = model.dim;
    doc["components"] = json::array();
    for (auto const& c : model.components)
    {
        doc["components"].push_back({{"id", c.id.value},
                                     {"indices", c.basis_indices},
                                     {"entropy_rank", c.entropy_rank},
                                     {"status", to_string(c.status)}});
    }
    doc["gaps"] = json::array();
    for (auto const& g : model.gaps())
    {
        doc["gaps"].push_back({{"low", g.low.value},
                               {"high", g.high.value},
                               {"irreversible", g.irreversible},
                               {"entries", entries_json(g.interaction)}});
    }
    doc["own"] = json::array();
    for (auto const& [id, block] : model.hamiltonian.own)
        doc["own"].push_back({{"component", id.value}, {"entries", entries_json(block)}});
    doc["psi0"] = json::array();
    for (auto const& a : model.psi0.amplitudes())
        doc["psi0"].push_back({a.real(), a.imag()});
    doc["defaults"] = {{"dt", model.defaults.dt},
                       {"t_max", model.defaults.t_max},
                       {"rules", to_string(model.defaults.rules)},
                       {"gap_mode", to_string(model.defaults.gap_mode)},
                       {"seed", model.defaults.seed}};
    return doc.dump(2) + "\n";
}

}  // namespace nrsim
