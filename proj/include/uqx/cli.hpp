#pragma once

namespace uqx {

/// Entry point behind the uqexplain binary. Returns the process exit code:
/// 0 on success, 2 on configuration errors and 1 on runtime failures.
int run_cli(int argc, const char* const* argv);

} // namespace uqx
