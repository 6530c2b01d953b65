#pragma once

// Batch sessions: a JSON file declaring a ring, named modules and a list of
// commands, each writing one JSON or TSV output file.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ggm/linalg.hpp"

namespace ggm {

struct Overrides {
    std::optional<Field> field;
    std::optional<std::pair<int, int>> window;
    int jobs = 1;
    bool timestamp = true;
};

enum class ExitStatus { Success = 0, Error = 1, Partial = 2 };

struct CommandResult {
    std::string op;
    std::string output;
    bool ok = false;
    bool partial = false;  // at least one Inconclusive cell or verdict
    std::string error;
    double seconds = 0;
    std::string stats;
};

struct SessionResult {
    std::vector<CommandResult> commands;
    std::string error;  // session-level failure (parse, ring construction)
    ExitStatus status() const;
};

using Logger = std::function<void(const std::string&)>;

/// Canonical op name for an op or one of its CLI aliases; empty when unknown.
std::string canonical_op(const std::string& name);

/// Validates a parsed session document; throws ParseError naming the
/// offending field (and its line in `text` when given).
void validate_session(const nlohmann::json& session, const std::string& text = {});

/// Parses session text; syntax errors carry the line number.
nlohmann::json parse_session(const std::string& text);

/// Runs every command in order. Relative output paths resolve against `base_dir`;
/// an output of "-" goes to standard output.
SessionResult run_session(const nlohmann::json& session, const std::filesystem::path& base_dir,
                          const Overrides& overrides = {}, const Logger& log = {});

/// Relative output paths resolve against the current working directory.
SessionResult run_session_file(const std::filesystem::path& path, const Overrides& overrides = {},
                               const Logger& log = {});

}  // namespace ggm
