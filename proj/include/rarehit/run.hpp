#pragma once

#include <ostream>

#include "rarehit/error.hpp"
#include "rarehit/io.hpp"

namespace rarehit {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitAssertion = 2, kExitResource = 3 };

/// Executes one analysis and writes its report (config header included) to
/// `out`. Returns kExitAssertion when `assert` is set and a check failed,
/// with a one-line reason on `log`. Throws Error on bad input.
int run(const RunConfig& config, std::ostream& out, std::ostream& log);

int exit_code_for(const Error& e) noexcept;

}  // namespace rarehit
