#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chaos::cli {

/// Runs one `chaos` invocation; `args[0]` is the program name.
/// Returns 0 on success, 1 on data or I/O errors, 2 on validation errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chaos::cli
