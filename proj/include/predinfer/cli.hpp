#pragma once

#include <string>
#include <vector>

namespace predinfer::cli {

// Entry point behind the predinfer executable. Returns 0 on success, 2 on a
// usage error, 1 on a runtime failure.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace predinfer::cli
