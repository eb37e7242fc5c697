#ifndef SSWMR_CLI_HPP
#define SSWMR_CLI_HPP

namespace sswmr {

/// Benchmark harness entry point. Exit codes: 0 success, 1 validation or
/// usage error, 2 numerical failure.
int cli_main(int argc, const char* const* argv);

}  // namespace sswmr

#endif  // SSWMR_CLI_HPP
