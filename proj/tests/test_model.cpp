#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "nrsim/model.hpp"
#include "nrsim/scenario_io.hpp"
#include "support.hpp"

using namespace nrsim;
using namespace nrsim::testing;

namespace
{
bool has_message(std::vector<std::string> const& list, std::string const& needle)
{
    return std::any_of(list.begin(), list.end(),
                       [&](auto const& s) { return s.find(needle) != std::string::npos; });
}
}  // namespace

TEST_CASE("shipped fixtures load")
{
    auto two = fixture("two_level");
    CHECK(two.dim == 2);
    CHECK(two.components.size() == 2);
    CHECK(validate_model(two).ok());

    auto three = fixture("three_mode");
    CHECK(three.dim == 4);
    CHECK(three.gaps().size() == 3);
    auto rep = validate_model(three);
    CHECK(rep.errors.empty());
    CHECK(rep.warnings.empty());

    CHECK(validate_model(fixture("symmetric_two_mode")).ok());
}

TEST_CASE("overlapping basis indices are rejected")
{
    auto m = two_level(1.0);
    m.components[0].basis_indices = {0, 1};
    auto rep = validate_model(m);
    CHECK_FALSE(rep.ok());
    CHECK(has_message(rep.errors, "components overlap"));

    CHECK_THROWS_AS(load_scenario_file(fixture_path("overlapping")), ValidationError);
}

TEST_CASE("validation messages")
{
    SUBCASE("own block not Hermitian")
    {
        auto m = two_level(1.0);
        m.hamiltonian.own[ComponentId{0}] = {2, {{0, 0, Complex(0.0, 1.0)}}};
        CHECK(has_message(validate_model(m).errors, "own block not Hermitian"));
    }
    SUBCASE("equal entropy ranks")
    {
        auto m = two_level(1.0);
        m.components[1].entropy_rank = 0;
        CHECK(has_message(validate_model(m).errors, "gap not entropy-increasing"));
    }
    SUBCASE("amplitude in a launch component")
    {
        auto m = two_level(1.0);
        m.psi0[1] = 0.5;
        CHECK_FALSE(validate_model(m).ok());
    }
    SUBCASE("index out of range")
    {
        auto m = two_level(1.0);
        m.components[1].basis_indices = {2};
        CHECK_FALSE(validate_model(m).ok());
    }
    SUBCASE("gap entry inside one component")
    {
        auto m = two_level(1.0);
        m.hamiltonian.interactions[0].interaction.entries.push_back({0, 0, 1.0});
        CHECK(has_message(validate_model(m).errors, "does not cross the gap"));
    }
    SUBCASE("non-Hermitian pair of gap entries")
    {
        auto m = two_level(1.0);
        m.hamiltonian.interactions[0].interaction.entries[1].value = 2.0;
        CHECK_FALSE(validate_model(m).ok());
    }
    SUBCASE("non-positive defaults")
    {
        auto m = two_level(1.0);
        m.defaults.dt = 0;
        CHECK_FALSE(validate_model(m).ok());
    }
}

TEST_CASE("projection")
{
    auto m = two_level(1.0);
    StateVector a(std::vector<Complex>{1.0, 0.0});
    CHECK(project(a, ComponentId{0}, m) == a);

    double r = 1 / std::sqrt(2.0);
    StateVector b(std::vector<Complex>{r, r});
    auto p = project(b, ComponentId{1}, m);
    CHECK(p[0] == Complex(0.0));
    CHECK(p[1] == Complex(r));
    CHECK(component_square_modulus(b, m.components[1]) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("projections decompose random states")
{
    std::mt19937_64 gen(7);
    std::normal_distribution<double> nd;
    for (auto const& name : fixture_names())
    {
        auto m = fixture(name);
        for (int k = 0; k < 50; ++k)
        {
            StateVector psi(m.dim);
            for (auto& a : psi.amplitudes())
                a = {nd(gen), nd(gen)};
            StateVector sum(m.dim);
            double parts = 0;
            for (auto const& c : m.components)
            {
                auto p = project(psi, c.id, m);
                for (std::size_t i = 0; i < m.dim; ++i)
                    sum[i] += p[i];
                parts += component_square_modulus(psi, c);
            }
            CHECK(sum == psi);
            CHECK(parts == doctest::Approx(psi.square_modulus()).epsilon(1e-14));
        }
    }
}

TEST_CASE("owner table covers the basis")
{
    for (auto const& name : fixture_names())
    {
        auto m = fixture(name);
        auto owners = m.owner_table();
        REQUIRE(owners.size() == m.dim);
        CHECK(std::none_of(owners.begin(), owners.end(), [](int o) { return o < 0; }));
    }
}

TEST_CASE("serialization round-trips bit-exactly")
{
    for (auto const& name : fixture_names())
    {
        auto m = fixture(name);
        auto text = serialize_scenario(m);
        auto back = load_scenario(text);
        CHECK(serialize_scenario(back) == text);
        CHECK(back.psi0 == m.psi0);
        REQUIRE(back.gaps().size() == m.gaps().size());
        for (std::size_t g = 0; g < m.gaps().size(); ++g)
        {
            auto const& a = m.gaps()[g].interaction.entries;
            auto const& b = back.gaps()[g].interaction.entries;
            REQUIRE(a.size() == b.size());
            for (std::size_t e = 0; e < a.size(); ++e)
                CHECK(a[e].value == b[e].value);
        }
    }

    auto m = two_level(0.1 + 0.2, 1.0 / 3.0, -std::sqrt(2.0));
    m.psi0[0] = Complex(0.6, -0.8);
    auto back = load_scenario(serialize_scenario(m));
    CHECK(back.psi0 == m.psi0);
    CHECK(back.hamiltonian.own.at(ComponentId{0}).entries[0].value == m.hamiltonian.own.at(ComponentId{0}).entries[0].value);
    CHECK(back.gaps()[0].interaction.entries[0].value == Complex(0.1 + 0.2));
}

TEST_CASE("parse errors carry positions and field paths")
{
    try
    {
        parse_scenario("{\n  \"dim\": 2,\n  oops\n}");
        FAIL("expected a parse error");
    }
    catch (ScenarioError const& e)
    {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }

    auto text = serialize_scenario(fixture("two_level"));
    auto pos = text.find("\"indices\": [\n        1\n      ]");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, std::string("\"indices\": [\n        1\n      ]").size(), "\"indices\": \"x\"");
    try
    {
        parse_scenario(text);
        FAIL("expected a field error");
    }
    catch (ScenarioError const& e)
    {
        CHECK(std::string(e.what()).find("components[1].indices") != std::string::npos);
    }
}

TEST_CASE("status and mode names")
{
    for (auto s : {Status::active, Status::launch, Status::ready, Status::realized, Status::zeroed})
        CHECK(parse_status(to_string(s)) == s);
    for (auto g : {GapMode::one_way_feed, GapMode::norm_compensated, GapMode::hermitian_truncated})
        CHECK(parse_gap_mode(to_string(g)) == g);
    CHECK(parse_gap_mode("hermitian_truncated") == GapMode::hermitian_truncated);
    CHECK_FALSE(parse_gap_mode("sideways").has_value());
    CHECK(parse_rules_variant("nrules4") == RulesVariant::nrules4);
}
