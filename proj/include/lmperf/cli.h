#pragma once

#include <iosfwd>

namespace lmperf {

// Exit codes: 0 success, 1 I/O failure, 2 validation or parse error,
// 3 oracle-check verdict other than PASS.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lmperf
