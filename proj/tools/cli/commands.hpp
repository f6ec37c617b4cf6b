#pragma once

#include <iosfwd>
#include <string>

namespace tbound::cli {

enum ExitCode : int { ok = 0, invalid_input = 2, internal_error = 3 };

/// Runs one `tbound` invocation; argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// 12 significant digits, the only number format the tool emits.
std::string format_number(double value);

}  // namespace tbound::cli
