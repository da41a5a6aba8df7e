#pragma once

#include <ostream>

namespace wearssl::cli {

/// Entry point of the wearssl tool. Returns 0 on success, 1 on a runtime
/// failure and 2 on a usage, config or missing-input error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wearssl::cli
