#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace splice::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Runs one `splice` invocation. `args` excludes the program name. Returns
/// the process exit status; diagnostics go to `err`, reports to `out`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace splice::cli
