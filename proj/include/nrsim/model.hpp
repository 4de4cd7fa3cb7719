#pragma once

#include <compare>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nrsim
{

using Complex = std::complex<double>;

//! Tolerance used for every Hermiticity check on operator blocks.
inline constexpr double kHermitianTolerance = 1e-12;

struct ComponentId
{
    int value = 0;

    friend constexpr auto operator<=>(ComponentId, ComponentId) = default;
};

enum class Status
{
    active,
    launch,
    ready,
    realized,
    zeroed
};

std::string_view to_string(Status s);
std::optional<Status> parse_status(std::string_view text);

inline bool is_launch_like(Status s)
{
    return s == Status::launch || s == Status::ready;
}

struct Triplet
{
    std::size_t row = 0;
    std::size_t col = 0;
    Complex value;
};

/*!
 * Sparse operator block stored as (row, col, value) triplets over the global
 * basis. Values are energies with hbar = 1.
 */
struct OperatorBlock
{
    std::size_t dim = 0;
    std::vector<Triplet> entries;

    std::optional<Complex> find(std::size_t row, std::size_t col) const;
    bool is_hermitian(double tol = kHermitianTolerance) const;
};

struct Component
{
    ComponentId id;
    std::vector<std::size_t> basis_indices;  // sorted ascending
    int entropy_rank = 0;
    Status status = Status::active;
};

struct Gap
{
    ComponentId low;
    ComponentId high;
    bool irreversible = true;
    OperatorBlock interaction;
};

struct HamiltonianPartition
{
    std::map<ComponentId, OperatorBlock> own;
    std::vector<Gap> interactions;
};

class StateVector
{
  public:
    StateVector() = default;
    explicit StateVector(std::size_t dim) : amplitudes_(dim) {}
    explicit StateVector(std::vector<Complex> amplitudes)
        : amplitudes_(std::move(amplitudes))
    {
    }

    std::size_t dim() const { return amplitudes_.size(); }
    //! Total square modulus.
    double square_modulus() const;

    Complex& operator[](std::size_t i) { return amplitudes_[i]; }
    Complex const& operator[](std::size_t i) const { return amplitudes_[i]; }

    std::vector<Complex>& amplitudes() { return amplitudes_; }
    std::vector<Complex> const& amplitudes() const { return amplitudes_; }

    bool operator==(StateVector const&) const = default;

  private:
    std::vector<Complex> amplitudes_;
};

enum class RulesVariant
{
    nrules3,
    nrules4
};

enum class GapMode
{
    one_way_feed,
    norm_compensated,
    hermitian_truncated
};

std::string_view to_string(RulesVariant v);
std::string_view to_string(GapMode m);
std::optional<RulesVariant> parse_rules_variant(std::string_view text);
//! Accepts the short CLI names (oneway, compensated, hermitian) and the long
//! names.
std::optional<GapMode> parse_gap_mode(std::string_view text);

struct RunDefaults
{
    double dt = 1e-3;
    double t_max = 5.0;
    RulesVariant rules = RulesVariant::nrules3;
    GapMode gap_mode = GapMode::one_way_feed;
    std::uint64_t seed = 42;
};

struct ScenarioModel
{
    std::size_t dim = 0;
    std::vector<Component> components;
    HamiltonianPartition hamiltonian;
    StateVector psi0;
    RunDefaults defaults;

    std::vector<Gap> const& gaps() const { return hamiltonian.interactions; }

    //! Position of a component in `components`, or nullopt.
    std::optional<std::size_t> position(ComponentId id) const;
    Component const& component(ComponentId id) const;
    //! Owning component position per basis index; -1 for orphan indices.
    std::vector<int> owner_table() const;
};

struct ValidationReport
{
    std::vector<std::string> errors;
    std::vector<std::string> warnings;

    bool ok() const { return errors.empty(); }
};

//! Error raised for malformed scenario documents or invalid models.
class ScenarioError : public std::runtime_error
{
  public:
    explicit ScenarioError(std::string const& msg) : std::runtime_error(msg)
    {
    }
};

class ValidationError : public ScenarioError
{
  public:
    explicit ValidationError(ValidationReport report);
    ValidationReport const& report() const { return report_; }

  private:
    ValidationReport report_;
};

ValidationReport validate_model(ScenarioModel const& model);

//! Zero every amplitude outside the component's basis indices.
StateVector
project(StateVector const& state, ComponentId comp, ScenarioModel const& model);

//! Square modulus of the component's part of the state.
double component_square_modulus(StateVector const& state,
                                Component const& comp);

}  // namespace nrsim
