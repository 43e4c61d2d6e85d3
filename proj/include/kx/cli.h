#pragma once

#include <ostream>
#include <span>
#include <string>

namespace kx::cli {

// Environment variable naming the default reader (same syntax as --reader).
inline constexpr const char* kReaderEnv = "KX_READER";

// Runs one subcommand. Exit codes: 0 success, 1 domain error (a JSON object
// {"error", "message", ...} on err), 2 usage error.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace kx::cli
