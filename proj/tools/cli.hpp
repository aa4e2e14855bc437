// Command-line front end. Kept in a library so tests can drive it in-process.
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ecl::cli {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitUnexpected = 1;
inline constexpr int kExitUsage = 2;
/// A tolerance check (table2, validate-approx) did not pass.
inline constexpr int kExitToleranceFailed = 20;

/// Runs one invocation. `args` excludes the program name. Data goes to
/// `out`; diagnostics and the error class go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ecl::cli
