#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lazybits {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 success, 2 usage, 3 budget exceeded, 4 property violation.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitBudget = 3;
inline constexpr int kExitViolation = 4;

// The whole command-line tool as a function: args exclude argv[0]. Results
// go to `out` (or the --out file), diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

} // namespace lazybits
