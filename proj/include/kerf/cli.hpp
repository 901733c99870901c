#pragma once

#include <ostream>

namespace kerf::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kProgramErrors = 1;  // parse diagnostics with errors
inline constexpr int kBadInvocation = 2;  // usage, I/O or machine-config errors

// Subcommands: analyze, validate, serve. Summary goes to `out`,
// diagnostics and errors to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kerf::cli
