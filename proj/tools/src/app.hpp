// app.hpp — Command dispatch for the floquet-if tool

#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace floquet::app {

struct AppOptions {
    std::string command;
    std::string config_path;
    std::optional<std::string> out_dir;  ///< overrides FLOQUET_IF_OUT and output.directory
    std::optional<int> workers;          ///< overrides FLOQUET_IF_WORKERS and the config
    bool no_cache = false;
};

const std::vector<std::string>& command_names();
bool is_command(const std::string& name);

/// Runs one command, writing CSV artifacts and metadata.json into the output directory.
/// Exceptions propagate to the caller.
void run(const AppOptions& options, std::ostream& log);

}  // namespace floquet::app
