#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "nfnls/config.hpp"

namespace nfnls::cli {

/// Runs one subcommand. `args` excludes the program name. Exit codes:
/// 0 success, 1 domain error (JSON record on `err`), 2 usage error.
int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err);
int dispatch(std::span<const std::string> args);

/// Every key a subcommand accepts, with its default. Empty for unknown names.
Settings default_settings(const std::string& subcommand);

/// Replaces derived placeholders ("auto" exponents, support -1, empty
/// m_range) by their values so a snapshot needs no implicit defaults.
void resolve_settings(const std::string& subcommand, Settings& s);

/// Write to a sibling temporary, then rename over the target.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace nfnls::cli
