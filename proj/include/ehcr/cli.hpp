#pragma once

namespace ehcr {

/// Entry point of the `ehcr` command line tool. Exit codes: 0 success,
/// 2 malformed input, 3 solver failure or failed audit.
int cli_main(int argc, const char* const* argv);

}  // namespace ehcr
