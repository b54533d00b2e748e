#ifndef ERWLAB_TOOLS_CLI_HPP_
#define ERWLAB_TOOLS_CLI_HPP_

#include <atomic>
#include <iosfwd>

namespace erw::cli {

enum ExitCode : int { kOk = 0, kError = 1, kOverCensored = 2 };

/// Parses argv and runs one subcommand. Summary paths go to `out`, logs and
/// diagnostics to `err`. `abort` is polled by long simulations.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
        const std::atomic<bool>* abort = nullptr);

}  // namespace erw::cli

#endif  // ERWLAB_TOOLS_CLI_HPP_
