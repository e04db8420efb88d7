#pragma once

#include <iosfwd>
#include <string>

#include "frogsim/harness.hpp"
#include "frogsim/report.hpp"

namespace frog {

/// Reads flat `key=value` lines. Blank lines and lines starting with '#'
/// are skipped; whitespace around keys and values is trimmed. Throws
/// std::invalid_argument naming the line on malformed input.
KeyValues parse_key_values(std::istream& in);

/// Applies one setting. Keys: kind, model, p, n, tmax, replications, seed,
/// cap, draws, random_states, large_n, alpha_tol, max_steps. List-valued keys
/// (p, n) take comma-separated values. Throws std::invalid_argument on an
/// unknown key or unparsable value.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Strict numeric parsing helpers shared with the CLI.
std::int64_t parse_int(const std::string& text);
std::uint64_t parse_seed(const std::string& text);
double parse_real(const std::string& text);

}  // namespace frog
