#pragma once

#include <ostream>

namespace morreymax::cli {

enum ExitCode : int { kPass = 0, kAssertionFailed = 1, kInvalidInput = 2, kNonConvergence = 3 };

/// Default directory for verify reports; "." when unset.
inline constexpr const char* kOutDirEnv = "MORREYMAX_OUT_DIR";

/// Entry point of the morreymax tool with streams injected for tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace morreymax::cli
