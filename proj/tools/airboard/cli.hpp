#pragma once

#include <iosfwd>

namespace airboard::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;

// Entry point shared by the `airboard` binary and the tests:
//
//   airboard replay    --trace <dir> [--config <file>] --out <dir>
//   airboard gen-trace --spec <file> --out <dir>
//   airboard bench     --trace <dir> [--config <file>] [--repeats <n>]
//   airboard serve     [--config <file>] [--port <p>]
//
// Returns 0 on success, 2 for usage or input errors, 1 for internal errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace airboard::cli
