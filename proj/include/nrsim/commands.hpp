#pragma once

#include <filesystem>
#include <functional>
#include <ostream>
#include <stdexcept>

#include "io.hpp"

namespace nrsim
{

//! Bad flag combinations or values; reported with exit code 2.
class UsageError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

enum ExitCode : int
{
    exit_ok = 0,
    exit_failed = 1,  // invalid scenario or an unexpected verdict
    exit_usage = 2    // I/O errors and flag conflicts
};

//! Throws UsageError on conflicting or out-of-range settings.
void check_manifest(RunManifest const& m);

/*!
 * Execute a run/ensemble/arrow/currents command described by a manifest
 * and write its outputs plus manifest.json into out_dir. The scenario file
 * is re-read and its hash must match the manifest when one is recorded.
 * `workers` only affects ensemble scheduling, never the output bytes.
 */
int execute(RunManifest m,
            ScenarioModel const& model,
            std::filesystem::path const& out_dir,
            std::size_t workers,
            std::ostream& log);

//! Validate a scenario file and print the report; returns the exit code.
int validate_command(std::filesystem::path const& scenario, std::ostream& out);

//! Fills manifest fields left to the scenario's defaults.
using ManifestCompleter = std::function<void(RunManifest&, ScenarioModel const&)>;

//! Load the scenario named by the manifest, check its hash and execute.
int execute_from_files(RunManifest m,
                       ManifestCompleter const& complete,
                       std::filesystem::path const& out_dir,
                       std::size_t workers,
                       std::ostream& log,
                       std::ostream& err);

}  // namespace nrsim
