#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "nrsim/scenario_io.hpp"

namespace nrsim::testing
{

inline std::filesystem::path fixture_path(std::string const& name)
{
    return std::filesystem::path(NRSIM_FIXTURE_DIR) / (name + ".json");
}

inline ScenarioModel fixture(std::string const& name)
{
    return load_scenario_file(fixture_path(name));
}

inline std::vector<std::string> const& fixture_names()
{
    static std::vector<std::string> const names{"two_level", "symmetric_two_mode", "three_mode"};
    return names;
}

// Two one-dimensional components coupled by g, with optional own energies.
inline ScenarioModel two_level(double g, double e0 = 0, double e1 = 0)
{
    ScenarioModel m;
    m.dim = 2;
    m.components = {{ComponentId{0}, {0}, 0, Status::active}, {ComponentId{1}, {1}, 1, Status::launch}};
    Gap gap{ComponentId{0}, ComponentId{1}, true, {2, {{1, 0, g}, {0, 1, g}}}};
    m.hamiltonian.interactions.push_back(gap);
    if (e0 != 0)
        m.hamiltonian.own[ComponentId{0}] = {2, {{0, 0, e0}}};
    if (e1 != 0)
        m.hamiltonian.own[ComponentId{1}] = {2, {{1, 1, e1}}};
    m.psi0 = StateVector(std::vector<Complex>{1.0, 0.0});
    return m;
}

inline std::filesystem::path scratch_dir(std::string const& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("nrsim_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace nrsim::testing
